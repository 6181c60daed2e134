#pragma once

#include <stdexcept>
#include <string>
#include <variant>

#include "ssde/model.hpp"

namespace ssde {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                           std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

using ModelOrPlan = std::variant<GeneralizedSde, PastingPlan>;

// Parses the TOML-compatible model format.  Syntax errors throw ParseError;
// semantic findings (validation, compatibility) are appended to `report`
// when given.  `base_dir` resolves regime file references.
ModelOrPlan parse_model(const std::string& text,
                        ValidationReport* report = nullptr,
                        const std::string& base_dir = ".");

ModelOrPlan parse_model_file(const std::string& path,
                             ValidationReport* report = nullptr);

}  // namespace ssde
