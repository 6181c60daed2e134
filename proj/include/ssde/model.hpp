#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace ssde {

// One coefficient regime: drift(x) = a - b*x, diffusion(x) = sigma*|x|^gamma.
struct CoefficientPiece {
  double a = 0.0;
  double b = 0.0;
  double sigma = 1.0;
  double gamma = 0.0;

  friend bool operator==(const CoefficientPiece&,
                         const CoefficientPiece&) = default;
};

// Sorted breakpoints theta_1 < ... < theta_k with k+1 pieces.  Each
// breakpoint belongs to the piece on its right.
struct PiecewiseCoefficients {
  std::vector<double> breakpoints;
  std::vector<CoefficientPiece> pieces;

  std::size_t piece_index(double x) const;
  const CoefficientPiece& piece_at(double x) const {
    return pieces[piece_index(x)];
  }
};

double eval_drift(const PiecewiseCoefficients& coeffs, double x);
double eval_diffusion(const PiecewiseCoefficients& coeffs, double x);

// Diffusion magnitude of a single piece at x, with 0^0 := 1.
inline double piece_diffusion(const CoefficientPiece& p, double x) {
  if (p.gamma == 0.0) return p.sigma;
  const double ax = std::abs(x);
  if (p.gamma == 0.5) return p.sigma * std::sqrt(ax);
  if (p.gamma == 1.0) return p.sigma * ax;
  if (p.gamma == 0.75) return p.sigma * std::sqrt(ax * std::sqrt(ax));
  if (p.gamma == 0.25) return p.sigma * std::sqrt(std::sqrt(ax));
  return p.sigma * std::pow(ax, p.gamma);
}

struct Atom {
  double x = 0.0;
  double beta = 0.0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

// Finite atomic part of the singular measure nu; |beta| < 1 per atom.
struct SingularMeasure {
  std::vector<Atom> atoms;

  bool has_atom_at(double x) const;
};

struct StickyPoint {
  double theta = 0.0;
  double kappa = 0.0;
};

struct StickySet {
  std::vector<StickyPoint> points;

  bool empty() const { return points.empty(); }
};

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(double x) const {
    if (x < lo || x > hi) return false;
    if (x == lo && !lo_closed) return false;
    if (x == hi && !hi_closed) return false;
    return true;
  }
  bool interior_contains(double x) const { return x > lo && x < hi; }
  bool is_empty() const { return lo > hi || (lo == hi && !(lo_closed && hi_closed)); }
};

struct GeneralizedSde {
  PiecewiseCoefficients coeffs;
  SingularMeasure measure;
  StickySet sticky;
  double x0 = 0.0;
  Interval state_space;
};

// Two-regime pasting problem: coefficients and measures of the regimes must
// agree on the strip (vartheta - epsilon, vartheta + epsilon).
struct PastingPlan {
  GeneralizedSde regime_minus;
  GeneralizedSde regime_plus;
  double vartheta = 0.0;
  double epsilon = 0.0;
};

enum class Severity { warn, error };

struct Finding {
  Severity severity = Severity::error;
  std::string code;
  std::string message;
  double location = std::numeric_limits<double>::quiet_NaN();
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const {
    for (const auto& f : findings)
      if (f.severity == Severity::error) return false;
    return true;
  }
  bool has(const std::string& code) const {
    for (const auto& f : findings)
      if (f.code == code) return true;
    return false;
  }
  void error(std::string code, std::string message,
             double location = std::numeric_limits<double>::quiet_NaN()) {
    findings.push_back(
        {Severity::error, std::move(code), std::move(message), location});
  }
  void warn(std::string code, std::string message,
            double location = std::numeric_limits<double>::quiet_NaN()) {
    findings.push_back(
        {Severity::warn, std::move(code), std::move(message), location});
  }
};

ValidationReport validate(const GeneralizedSde& sde);

// Checks the three compatibility clauses on the strip and, on success, the
// pasted state space is available through pasted_state_space().
ValidationReport check_compatibility(const PastingPlan& plan);

Interval pasted_state_space(const PastingPlan& plan);

// Assembles the global SDE from the plan: plus-regime data at and above
// vartheta, minus-regime data below (right-hand convention).
GeneralizedSde pasted_sde(const PastingPlan& plan, double x0);

}  // namespace ssde
