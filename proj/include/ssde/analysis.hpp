#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ssde/model.hpp"

namespace ssde {

// ---------------------------------------------------------------------------
// Engelbert-Schmidt sets of the diffusion coefficient
// ---------------------------------------------------------------------------

enum class EsCase { undefined, es1, es2, es3, es4 };

struct EsClassification {
  std::vector<double> n_sigma;  // zeros of the diffusion in the domain
  std::vector<double> e_sigma;  // points where 1/sigma^2 is not locally L1
  EsCase es_case = EsCase::undefined;
  std::vector<std::string> notes;
};

const char* to_string(EsCase c);

// Classifies the zeros / non-integrability points of sigma(x) = sigma_i
// |x|^{gamma_i} over `domain`.  Boundary exponents 2*gamma == 1 (log
// divergence) are counted as integrable, with a note.
EsClassification classify_es(const PiecewiseCoefficients& coeffs,
                             const Interval& domain);

// Same, but folds sticky points in as indicator-type zeros of the effective
// diffusion sigma(x) 1_{x != theta}.
EsClassification classify_es(const GeneralizedSde& sde);

// ---------------------------------------------------------------------------
// Scale transform S (drift removal) and its boundary-limit taxonomy
// ---------------------------------------------------------------------------

enum class ScaleCase { s1, s2, s3, s4 };

const char* to_string(ScaleCase c);

class ScaleTransform {
 public:
  double reference() const { return reference_; }
  const Interval& domain() const { return domain_; }
  double lower_limit() const { return s0_; }   // S at the lower endpoint
  double upper_limit() const { return sinf_; } // S at the upper endpoint
  ScaleCase scale_case() const { return case_; }
  bool used_fallback_limits() const { return fallback_; }

  // Scale density s(x) = exp(-2 int_r^x b/sigma^2).
  double density(double x) const;
  // Speed density m(x) = 1 / (s(x) sigma^2(x)).
  double speed_density(double x) const;
  // S(x) = int_r^x s(y) dy; strictly increasing, S(r) = 0.
  double value(double x) const;
  // Inverse R with |S(R(y)) - y| <= 1e-10 max(1, |y|).
  double inverse(double y) const;

  const std::vector<std::string>& notes() const { return notes_; }

 private:
  friend ScaleTransform build_scale(const GeneralizedSde& sde,
                                    double reference);

  // exponent E(x) = int_r^x 2 b_drift / sigma^2 with per-piece closed forms
  // and continuity offsets; s = exp(-E).
  double exponent(double x) const;

  PiecewiseCoefficients coeffs_;
  Interval domain_;
  double reference_ = 0.0;
  std::vector<double> cell_edges_;    // breakpoints clipped to the domain
  std::vector<double> exp_offsets_;   // continuity constants per cell
  std::vector<double> anchors_x_;     // cached nodes for S
  std::vector<double> anchors_s_;     // S at the nodes
  double s0_ = 0.0;
  double sinf_ = 0.0;
  ScaleCase case_ = ScaleCase::s1;
  bool fallback_ = false;
  std::vector<std::string> notes_;
};

// Throws std::domain_error with code "SCALE_NOT_DEFINED" if b/sigma^2 fails
// local integrability at an interior degeneracy.
ScaleTransform build_scale(const GeneralizedSde& sde, double reference);

// R(y); throws std::out_of_range ("OUT_OF_RANGE") outside [S0, Sinf).
double inverse_scale(const ScaleTransform& t, double y);

// ---------------------------------------------------------------------------
// Skew removal transform Phi_nu built from g_nu
// ---------------------------------------------------------------------------

class SkewTransform {
 public:
  double xstar() const { return xstar_; }
  const Interval& range() const { return range_j_; }

  // g_nu: piecewise constant, cadlag, jumps by (1-beta)/(1+beta) across each
  // atom (left to right), equal to 1 on the interval containing xstar.
  double g(double x) const;
  // Phi_nu(x) = int_xstar^x g_nu; piecewise linear, Phi(xstar) = 0.
  double phi(double x) const;
  // Exact piecewise-linear inverse Psi_nu.
  double psi(double y) const;

 private:
  friend SkewTransform build_skew_transform(const SingularMeasure& measure,
                                            double xstar);
  double xstar_ = 0.0;
  std::vector<double> nodes_x_;   // atom locations
  std::vector<double> nodes_y_;   // Phi at the atoms
  std::vector<double> slopes_;    // nodes_x_.size() + 1 interval slopes
  Interval range_j_;
};

SkewTransform build_skew_transform(const SingularMeasure& measure,
                                   double xstar);

// ---------------------------------------------------------------------------
// Decidable hypothesis checks for the piecewise power-law family
// ---------------------------------------------------------------------------

// Checks the threshold conditions at a declared breakpoint theta:
// ellipticity on a strip, controlled jump, and per-region regularity.
ValidationReport check_hypothesis_T(const PiecewiseCoefficients& coeffs,
                                    double theta);

// ---------------------------------------------------------------------------
// Verdict engine
// ---------------------------------------------------------------------------

enum class Existence { none, weak, strong };
enum class UniquenessKind { none, in_law, pathwise };
enum class BoundaryAtZero { unreachable, reflecting, not_applicable };

const char* to_string(Existence e);
const char* to_string(UniquenessKind u);
const char* to_string(BoundaryAtZero b);

struct AppliedResult {
  std::string tag;                  // which result was applied
  std::vector<std::string> trace;   // hypothesis checks along the way
};

struct Verdict {
  Existence existence = Existence::none;
  UniquenessKind uniqueness = UniquenessKind::none;
  Interval state_space;
  BoundaryAtZero boundary_at_zero = BoundaryAtZero::not_applicable;
  std::vector<AppliedResult> applied_results;

  bool unknown() const {
    return existence == Existence::none && uniqueness == UniquenessKind::none;
  }
};

// Parameters of the (skew-sticky) threshold CKLS family, when matched.
struct TcklsParams {
  double theta = 0.0;
  double a_minus = 0.0, b_minus = 0.0, sigma_minus = 0.0, gamma_minus = 0.0;
  double a_plus = 0.0, b_plus = 0.0, sigma_plus = 0.0, gamma_plus = 0.0;
  double beta = 0.0;
  double kappa = 0.0;
};

std::optional<TcklsParams> match_tckls(const GeneralizedSde& sde);

Verdict wellposedness_verdict(const GeneralizedSde& sde,
                              const std::optional<PastingPlan>& plan = {});

}  // namespace ssde
