#include "ssde/model_io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <vector>

namespace ssde {

namespace {

// Minimal TOML subset: sections (dotted), key = value with numbers
// (inf/-inf allowed), booleans, basic strings, arrays, and inline tables.
struct Value {
  enum class Kind { number, boolean, string, array, table };
  Kind kind = Kind::number;
  double num = 0.0;
  bool flag = false;
  std::string str;
  std::vector<Value> items;
  std::map<std::string, Value> fields;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  Value parse_document() {
    Value root;
    root.kind = Value::Kind::table;
    Value* section = &root;
    while (skip_blank(), !eof()) {
      if (peek() == '[') {
        section = &open_section(root);
        continue;
      }
      auto [key, value] = parse_key_value();
      if (section->fields.count(key))
        fail("duplicate key '" + key + "'");
      section->fields.emplace(std::move(key), std::move(value));
    }
    return root;
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, line_, column());
  }

  int column() const {
    int col = 1;
    for (std::size_t i = line_start_; i < pos_ && i < text_.size(); ++i) ++col;
    return col;
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      line_start_ = pos_ + 1;
    }
    ++pos_;
  }

  void skip_ws_inline() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r'))
      advance();
    if (!eof() && peek() == '#')
      while (!eof() && peek() != '\n') advance();
  }

  // whitespace, comments and newlines
  void skip_blank() {
    for (;;) {
      skip_ws_inline();
      if (!eof() && peek() == '\n') {
        advance();
        continue;
      }
      return;
    }
  }

  std::string parse_bare_key() {
    skip_ws_inline();
    std::string key;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                      peek() == '_' || peek() == '-')) {
      key.push_back(peek());
      advance();
    }
    if (key.empty()) fail("expected a key");
    return key;
  }

  Value& open_section(Value& root) {
    advance();  // '['
    Value* node = &root;
    for (;;) {
      const std::string part = parse_bare_key();
      Value& child = node->fields[part];
      if (child.fields.empty() && child.kind != Value::Kind::table)
        child.kind = Value::Kind::table;
      node = &child;
      skip_ws_inline();
      if (!eof() && peek() == '.') {
        advance();
        continue;
      }
      break;
    }
    if (eof() || peek() != ']') fail("unterminated section header");
    advance();
    skip_ws_inline();
    if (!eof() && peek() != '\n') fail("junk after section header");
    return *node;
  }

  std::pair<std::string, Value> parse_key_value() {
    const std::string key = parse_bare_key();
    skip_ws_inline();
    if (eof() || peek() != '=') fail("expected '=' after key '" + key + "'");
    advance();
    Value v = parse_value();
    skip_ws_inline();
    if (!eof() && peek() != '\n') fail("junk after value for '" + key + "'");
    return {key, std::move(v)};
  }

  Value parse_value() {
    skip_value_space();
    if (eof()) fail("expected a value");
    const char c = peek();
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    if (c == '"') return parse_string();
    return parse_scalar();
  }

  // inside arrays/inline tables newlines are allowed
  void skip_value_space() {
    for (;;) {
      skip_ws_inline();
      if (!eof() && peek() == '\n' && depth_ > 0) {
        advance();
        continue;
      }
      return;
    }
  }

  Value parse_array() {
    advance();  // '['
    ++depth_;
    Value v;
    v.kind = Value::Kind::array;
    skip_value_space();
    while (!eof() && peek() != ']') {
      v.items.push_back(parse_value());
      skip_value_space();
      if (!eof() && peek() == ',') {
        advance();
        skip_value_space();
      }
    }
    if (eof()) fail("unterminated array");
    advance();  // ']'
    --depth_;
    return v;
  }

  Value parse_inline_table() {
    advance();  // '{'
    ++depth_;
    Value v;
    v.kind = Value::Kind::table;
    skip_value_space();
    while (!eof() && peek() != '}') {
      const std::string key = parse_bare_key();
      skip_value_space();
      if (eof() || peek() != '=') fail("expected '=' in inline table");
      advance();
      v.fields.emplace(key, parse_value());
      skip_value_space();
      if (!eof() && peek() == ',') {
        advance();
        skip_value_space();
      }
    }
    if (eof()) fail("unterminated inline table");
    advance();  // '}'
    --depth_;
    return v;
  }

  Value parse_string() {
    advance();  // '"'
    Value v;
    v.kind = Value::Kind::string;
    while (!eof() && peek() != '"') {
      if (peek() == '\\') {
        advance();
        if (eof()) fail("unterminated escape");
        const char e = peek();
        v.str.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
        advance();
        continue;
      }
      if (peek() == '\n') fail("newline in string");
      v.str.push_back(peek());
      advance();
    }
    if (eof()) fail("unterminated string");
    advance();
    return v;
  }

  Value parse_scalar() {
    std::string token;
    while (!eof() && peek() != ',' && peek() != ']' && peek() != '}' &&
           peek() != '\n' && peek() != '#' && peek() != ' ' && peek() != '\t' &&
           peek() != '\r') {
      token.push_back(peek());
      advance();
    }
    Value v;
    if (token == "true" || token == "false") {
      v.kind = Value::Kind::boolean;
      v.flag = token == "true";
      return v;
    }
    if (token == "inf" || token == "+inf") {
      v.num = std::numeric_limits<double>::infinity();
      return v;
    }
    if (token == "-inf") {
      v.num = -std::numeric_limits<double>::infinity();
      return v;
    }
    try {
      std::size_t used = 0;
      v.num = std::stod(token, &used);
      if (used != token.size()) fail("bad number '" + token + "'");
    } catch (const ParseError&) {
      throw;
    } catch (...) {
      fail("bad value '" + token + "'");
    }
    return v;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  int line_ = 1;
  int depth_ = 0;
};

const Value* find(const Value& table, const std::string& key) {
  const auto it = table.fields.find(key);
  return it == table.fields.end() ? nullptr : &it->second;
}

double require_number(const Value& table, const std::string& key,
                      const std::string& where) {
  const Value* v = find(table, key);
  if (!v || v->kind != Value::Kind::number)
    throw ParseError("missing number '" + key + "' in " + where, 0, 0);
  return v->num;
}

double number_or(const Value& table, const std::string& key, double fallback) {
  const Value* v = find(table, key);
  return v && v->kind == Value::Kind::number ? v->num : fallback;
}

bool flag_or(const Value& table, const std::string& key, bool fallback) {
  const Value* v = find(table, key);
  return v && v->kind == Value::Kind::boolean ? v->flag : fallback;
}

GeneralizedSde sde_from_table(const Value& root, const std::string& where);

GeneralizedSde regime_from_value(const Value& v, const std::string& base_dir,
                                 ValidationReport* report,
                                 const std::string& which);

GeneralizedSde sde_from_table(const Value& root, const std::string& where) {
  GeneralizedSde sde;
  const Value* coeffs = find(root, "coefficients");
  if (!coeffs)
    throw ParseError("missing [coefficients] in " + where, 0, 0);
  if (const Value* bps = find(*coeffs, "breakpoints"))
    for (const auto& b : bps->items)
      sde.coeffs.breakpoints.push_back(b.num);
  const Value* pieces = find(*coeffs, "pieces");
  if (!pieces || pieces->kind != Value::Kind::array)
    throw ParseError("missing pieces array in " + where, 0, 0);
  for (const auto& p : pieces->items) {
    CoefficientPiece piece;
    piece.a = number_or(p, "a", 0.0);
    piece.b = number_or(p, "b", 0.0);
    piece.sigma = number_or(p, "sigma", 1.0);
    piece.gamma = number_or(p, "gamma", 0.0);
    sde.coeffs.pieces.push_back(piece);
  }

  if (const Value* measure = find(root, "measure"))
    if (const Value* atoms = find(*measure, "atoms"))
      for (const auto& a : atoms->items)
        sde.measure.atoms.push_back(
            {require_number(a, "x", where), require_number(a, "beta", where)});

  if (const Value* sticky = find(root, "sticky"))
    if (const Value* points = find(*sticky, "points"))
      for (const auto& s : points->items)
        sde.sticky.points.push_back({require_number(s, "theta", where),
                                     require_number(s, "kappa", where)});

  const Value* init = find(root, "init");
  if (!init) throw ParseError("missing [init] in " + where, 0, 0);
  sde.x0 = require_number(*init, "x0", where);
  if (const Value* space = find(*init, "state_space")) {
    sde.state_space.lo = number_or(*space, "lo", sde.state_space.lo);
    sde.state_space.hi = number_or(*space, "hi", sde.state_space.hi);
    sde.state_space.lo_closed = flag_or(*space, "lo_closed", false);
    sde.state_space.hi_closed = flag_or(*space, "hi_closed", false);
  }
  return sde;
}

GeneralizedSde regime_from_value(const Value& v, const std::string& base_dir,
                                 ValidationReport* report,
                                 const std::string& which) {
  if (const Value* file = find(v, "file")) {
    if (file->kind != Value::Kind::string)
      throw ParseError("regime file reference must be a string in " + which, 0,
                       0);
    std::string path = file->str;
    if (!path.empty() && path[0] != '/') path = base_dir + "/" + path;
    std::ifstream in(path);
    if (!in)
      throw ParseError("cannot open regime file '" + path + "'", 0, 0);
    std::stringstream buf;
    buf << in.rdbuf();
    ValidationReport sub;
    ModelOrPlan parsed = parse_model(buf.str(), &sub, base_dir);
    if (report)
      for (auto& f : sub.findings) report->findings.push_back(f);
    if (!std::holds_alternative<GeneralizedSde>(parsed))
      throw ParseError("regime file '" + path + "' contains a pasting plan",
                       0, 0);
    return std::get<GeneralizedSde>(parsed);
  }
  return sde_from_table(v, which);
}

}  // namespace

ModelOrPlan parse_model(const std::string& text, ValidationReport* report,
                        const std::string& base_dir) {
  Parser parser(text);
  const Value root = parser.parse_document();

  if (const Value* pasting = find(root, "pasting")) {
    PastingPlan plan;
    plan.vartheta = require_number(*pasting, "vartheta", "[pasting]");
    plan.epsilon = require_number(*pasting, "epsilon", "[pasting]");
    const Value* rm = find(*pasting, "regime_minus");
    const Value* rp = find(*pasting, "regime_plus");
    if (!rm || !rp)
      throw ParseError("pasting plan needs regime_minus and regime_plus", 0,
                       0);
    plan.regime_minus =
        regime_from_value(*rm, base_dir, report, "regime_minus");
    plan.regime_plus = regime_from_value(*rp, base_dir, report, "regime_plus");
    if (report) {
      const ValidationReport vm = validate(plan.regime_minus);
      const ValidationReport vp = validate(plan.regime_plus);
      for (const auto& f : vm.findings) report->findings.push_back(f);
      for (const auto& f : vp.findings) report->findings.push_back(f);
      const ValidationReport comp = check_compatibility(plan);
      for (const auto& f : comp.findings) report->findings.push_back(f);
    }
    return plan;
  }

  GeneralizedSde sde = sde_from_table(root, "model");
  if (report) {
    const ValidationReport v = validate(sde);
    for (const auto& f : v.findings) report->findings.push_back(f);
  }
  return sde;
}

ModelOrPlan parse_model_file(const std::string& path,
                             ValidationReport* report) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file '" + path + "'", 0, 0);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string dir = ".";
  const auto slash = path.find_last_of('/');
  if (slash != std::string::npos) dir = path.substr(0, slash);
  return parse_model(buf.str(), report, dir);
}

}  // namespace ssde
