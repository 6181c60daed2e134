#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ssde/engine.hpp"

namespace ssde {

struct TestReport {
  std::string name;
  bool pass = false;
  double statistic = std::numeric_limits<double>::quiet_NaN();
  double threshold = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> standard_error;
  long n_paths = 0;
  std::string config_echo;
  std::vector<std::string> notes;
};

// Two-sample Kolmogorov-Smirnov statistic with asymptotic p-value.
std::pair<double, double> ks_statistic(std::vector<double> a,
                                       std::vector<double> b);

// ---------------------------------------------------------------------------
// Evaluation cores (fixture-injectable; the drivers below fill them from
// Monte Carlo runs)
// ---------------------------------------------------------------------------

TestReport evaluate_zero_occupation(const std::vector<double>& deltas,
                                    const std::vector<double>& mean_occ);
TestReport evaluate_sticky_ratio(const std::vector<double>& ratios,
                                 long n_invalid, double kappa);
TestReport evaluate_skew_ratio(long n_above, long n, double beta);
TestReport evaluate_comparison(long violations, long samples);

// ---------------------------------------------------------------------------
// Experiment drivers
// ---------------------------------------------------------------------------

// Mean occupation of [0, delta] decreasing over delta in {0.1, 0.05, 0.025,
// 0.0125} with the final value below twice the linear extrapolation.
TestReport test_zero_occupation(const GeneralizedSde& sde, const SimConfig& cfg,
                                std::uint64_t seed);

// Mean over paths of occupation-at-theta / window local time, compared to
// kappa within max(0.1 kappa, 3 s.e.).
TestReport test_sticky_ratio(const GeneralizedSde& sde, const SimConfig& cfg,
                             std::uint64_t seed);

// Empirical P(X_T > theta) within 3 s.e. of (1+beta)/2.
TestReport test_skew_ratio(const GeneralizedSde& sde, const SimConfig& cfg,
                           std::uint64_t seed);

// Same-noise ordering between two SDEs sharing sigma and nu with dominated
// drift; violations beyond 10 sqrt(dt) max|sigma| must be absent.
// `independent_noise` drives the harness negative control.
TestReport test_comparison(const GeneralizedSde& upper,
                           const GeneralizedSde& lower, const SimConfig& cfg,
                           std::uint64_t seed, bool independent_noise = false);

// Degenerate same-noise pathwise equality, strict switch-level alternation,
// and a two-sample KS test of pasted vs direct terminal marginals.
TestReport test_pasting_consistency(const PastingPlan& plan,
                                    const GeneralizedSde& global,
                                    const SimConfig& cfg, std::uint64_t seed);

// P(min X <= 1e-6 before the horizon): > 0.01 in the attainable regime,
// < 0.001 otherwise.
TestReport test_boundary_behavior(const GeneralizedSde& sde,
                                  const SimConfig& cfg, std::uint64_t seed);

// Pathwise-uniqueness proxy: two schemes under the same Brownian path must
// contract as dt -> dt/4 with L2-distance ratio >= 1.5.
TestReport test_scheme_coupling(const GeneralizedSde& sde, const SimConfig& cfg,
                                std::uint64_t seed);

// Canonical experiment configurations (also used by the acceptance suite).
SimConfig default_config(const std::string& test_name);

// Runs a named suite ("all" or a single test) against a model or plan.
std::vector<TestReport> run_suite(const std::string& suite,
                                  const GeneralizedSde* sde,
                                  const PastingPlan* plan, std::uint64_t seed);

std::string reports_to_json(const std::vector<TestReport>& reports);

}  // namespace ssde
