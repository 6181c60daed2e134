#include "ssde/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "ssde/localtime.hpp"
#include "ssde/numerics.hpp"
#include "ssde/parallel.hpp"

namespace ssde {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Stream ids keep the tests' noise families disjoint.
namespace streams {
constexpr std::uint64_t zero_occ = 11;
constexpr std::uint64_t sticky = 12;
constexpr std::uint64_t skew = 13;
constexpr std::uint64_t comparison = 14;
constexpr std::uint64_t comparison_b = 15;
constexpr std::uint64_t pasting = 16;
constexpr std::uint64_t pasting_direct = 17;
constexpr std::uint64_t pasting_degenerate = 18;
constexpr std::uint64_t boundary = 19;
constexpr std::uint64_t coupling = 20;
}  // namespace streams

std::string echo_config(const SimConfig& cfg, std::uint64_t seed) {
  std::ostringstream os;
  os << "dt=" << cfg.dt << " horizon=" << cfg.horizon
     << " paths=" << cfg.n_paths << " scheme=" << to_string(cfg.scheme)
     << " bridge=" << (cfg.bridge_correction ? 1 : 0) << " seed=" << seed;
  return os.str();
}

double sample_mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

std::pair<double, double> ks_statistic(std::vector<double> a,
                                       std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_statistic: EMPTY_SAMPLE");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sq = std::sqrt(ne);
  const double lambda = (sq + 0.12 + 0.11 / sq) * d;
  return {d, num::kolmogorov_q(lambda)};
}

// ---------------------------------------------------------------------------
// Evaluation cores
// ---------------------------------------------------------------------------

TestReport evaluate_zero_occupation(const std::vector<double>& deltas,
                                    const std::vector<double>& mean_occ) {
  TestReport r;
  r.name = "zero_occupation";
  if (deltas.size() != mean_occ.size() || deltas.size() < 3) {
    r.notes.push_back("need at least three window levels");
    return r;
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < mean_occ.size(); ++i)
    if (!(mean_occ[i] < mean_occ[i - 1])) decreasing = false;

  const std::size_t k = deltas.size();
  const double d1 = deltas[k - 3], d2 = deltas[k - 2], df = deltas[k - 1];
  const double o1 = mean_occ[k - 3], o2 = mean_occ[k - 2];
  const double slope = (o1 - o2) / (d1 - d2);
  const double extrapolated = o2 + slope * (df - d2);

  r.threshold = 2.0;
  std::ostringstream note;
  note << "mean occupation:";
  for (std::size_t i = 0; i < k; ++i)
    note << " [0," << deltas[i] << "]=" << mean_occ[i];
  r.notes.push_back(note.str());
  if (!decreasing) r.notes.push_back("sequence not strictly decreasing");
  if (!(extrapolated > 0.0)) {
    r.notes.push_back("linear extrapolation non-positive");
    r.pass = false;
    return r;
  }
  r.statistic = mean_occ[k - 1] / extrapolated;
  r.pass = decreasing && r.statistic < r.threshold;
  return r;
}

TestReport evaluate_sticky_ratio(const std::vector<double>& ratios,
                                 long n_invalid, double kappa) {
  TestReport r;
  r.name = "sticky_ratio";
  r.n_paths = static_cast<long>(ratios.size()) + n_invalid;
  if (ratios.empty()) {
    r.notes.push_back("NO_LOCAL_TIME: no path produced a usable ratio");
    return r;
  }
  if (n_invalid > 0)
    r.notes.push_back("NO_LOCAL_TIME on " + std::to_string(n_invalid) +
                      " paths (excluded)");
  const double mean = sample_mean(ratios);
  const double se =
      sample_sd(ratios, mean) / std::sqrt(static_cast<double>(ratios.size()));
  r.statistic = mean;
  r.standard_error = se;
  r.threshold = std::max(0.1 * kappa, 3.0 * se);
  r.pass = std::abs(mean - kappa) <= r.threshold;
  if (kappa == 0.0)
    r.notes.push_back("kappa = 0: occupation numerator vanishes identically");
  return r;
}

TestReport evaluate_skew_ratio(long n_above, long n, double beta) {
  TestReport r;
  r.name = "skew_ratio";
  r.n_paths = n;
  const double p_hat = static_cast<double>(n_above) / n;
  const double se = std::sqrt(std::max(p_hat * (1.0 - p_hat), 1e-12) / n);
  r.statistic = p_hat;
  r.standard_error = se;
  r.threshold = 3.0 * se;
  r.pass = std::abs(p_hat - 0.5 * (1.0 + beta)) <= r.threshold;
  return r;
}

TestReport evaluate_comparison(long violations, long samples) {
  TestReport r;
  r.name = "comparison";
  r.statistic =
      samples > 0 ? static_cast<double>(violations) / samples : 0.0;
  r.threshold = 0.0;
  r.pass = violations == 0;
  if (violations > 0)
    r.notes.push_back(std::to_string(violations) +
                      " ordering violations beyond the scheme tolerance");
  return r;
}

// ---------------------------------------------------------------------------
// Experiment drivers
// ---------------------------------------------------------------------------

TestReport test_zero_occupation(const GeneralizedSde& sde, const SimConfig& cfg,
                                std::uint64_t seed) {
  const std::vector<double> deltas{0.1, 0.05, 0.025, 0.0125};
  if (!match_tckls(sde)) {
    TestReport r;
    r.name = "zero_occupation";
    r.notes.push_back("PRECONDITION: model is not in the threshold CKLS "
                      "family");
    r.config_echo = echo_config(cfg, seed);
    return r;
  }
  const NoiseSource noise(seed, streams::zero_occ);
  const long n = cfg.n_paths;
  std::vector<std::array<double, 4>> occ(n);
  parallel_for(n, [&](std::size_t i) {
    const Path p = simulate(sde, cfg, noise, i);
    std::array<double, 4> o{0.0, 0.0, 0.0, 0.0};
    for (std::size_t k = 0; k + 1 < p.size(); ++k) {
      const double x = p.values[k];
      const double dt = p.times[k + 1] - p.times[k];
      if (x >= 0.0)
        for (std::size_t d = 0; d < 4; ++d)
          if (x <= deltas[d]) o[d] += dt;
    }
    occ[i] = o;
  });
  std::vector<double> mean_occ(4, 0.0);
  for (long i = 0; i < n; ++i)
    for (std::size_t d = 0; d < 4; ++d) mean_occ[d] += occ[i][d];
  for (auto& m : mean_occ) m /= static_cast<double>(n);

  TestReport r = evaluate_zero_occupation(deltas, mean_occ);
  r.n_paths = n;
  r.config_echo = echo_config(cfg, seed);
  return r;
}

TestReport test_sticky_ratio(const GeneralizedSde& sde, const SimConfig& cfg,
                             std::uint64_t seed) {
  TestReport pre;
  pre.name = "sticky_ratio";
  pre.config_echo = echo_config(cfg, seed);
  if (sde.sticky.points.size() != 1) {
    pre.notes.push_back("PRECONDITION: exactly one sticky point required");
    return pre;
  }
  const double theta = sde.sticky.points[0].theta;
  const double kappa = sde.sticky.points[0].kappa;
  const double bandwidth = default_bandwidth(cfg.dt);
  const NoiseSource noise(seed, streams::sticky);
  const long n = cfg.n_paths;

  const TimeChangeSimulator sim(sde, cfg);
  const auto sigma_eval = [&](double x) {
    return x == theta ? 0.0 : eval_diffusion(sde.coeffs, x);
  };

  std::vector<double> ratio(n, std::numeric_limits<double>::quiet_NaN());
  parallel_for(n, [&](std::size_t i) {
    const Path p = sim.run(noise, i);
    double occ = 0.0;
    for (std::size_t k = 0; k + 1 < p.size(); ++k)
      if (p.values[k] == theta) occ += p.times[k + 1] - p.times[k];
    const LocalTimeCurve lt = estimate_local_time(
        p, theta, LocalTimeKind::symmetric, bandwidth, sigma_eval);
    if (lt.terminal() > 0.0) ratio[i] = occ / lt.terminal();
  });
  std::vector<double> valid;
  long invalid = 0;
  for (double v : ratio)
    if (std::isfinite(v))
      valid.push_back(v);
    else
      ++invalid;

  TestReport r = evaluate_sticky_ratio(valid, invalid, kappa);
  r.config_echo = echo_config(cfg, seed);
  return r;
}

TestReport test_skew_ratio(const GeneralizedSde& sde, const SimConfig& cfg,
                           std::uint64_t seed) {
  TestReport pre;
  pre.name = "skew_ratio";
  pre.config_echo = echo_config(cfg, seed);
  if (!sde.measure.has_atom_at(sde.x0)) {
    pre.notes.push_back("PRECONDITION: x0 must sit on a skew atom");
    return pre;
  }
  const double theta = sde.x0;
  double beta = 0.0;
  for (const auto& a : sde.measure.atoms)
    if (a.x == theta) beta = a.beta;
  const CoefficientPiece& right = sde.coeffs.piece_at(theta);
  const CoefficientPiece& left =
      sde.coeffs.piece_at(std::nextafter(theta, -kInf));
  if (left.a != 0.0 || left.b != 0.0 || right.a != 0.0 || right.b != 0.0 ||
      left.gamma != 0.0 || right.gamma != 0.0 || left.sigma != right.sigma) {
    pre.notes.push_back(
        "PRECONDITION: needs zero drift and constant equal |sigma| around "
        "the atom");
    return pre;
  }

  const NoiseSource noise(seed, streams::skew);
  const long n = cfg.n_paths;
  std::vector<std::uint8_t> above(n, 0);
  parallel_for(n, [&](std::size_t i) {
    above[i] = simulate_skew_terminal(sde, cfg, noise, i) > theta ? 1 : 0;
  });
  long n_above = 0;
  for (auto b : above) n_above += b;

  TestReport r = evaluate_skew_ratio(n_above, n, beta);
  r.config_echo = echo_config(cfg, seed);
  r.notes.push_back("target=" + std::to_string(0.5 * (1.0 + beta)));
  return r;
}

namespace {

// Structural drift dominance upper >= lower on the state space; requires
// matching breakpoints and identical diffusion data.
bool comparison_preconditions(const GeneralizedSde& upper,
                              const GeneralizedSde& lower, std::string* why) {
  if (upper.coeffs.breakpoints != lower.coeffs.breakpoints) {
    *why = "breakpoints differ";
    return false;
  }
  if (!(upper.x0 >= lower.x0)) {
    *why = "x0 ordering violated";
    return false;
  }
  if (upper.measure.atoms != lower.measure.atoms) {
    *why = "measures differ";
    return false;
  }
  const auto& bp = upper.coeffs.breakpoints;
  for (std::size_t i = 0; i < upper.coeffs.pieces.size(); ++i) {
    const auto& pu = upper.coeffs.pieces[i];
    const auto& pl = lower.coeffs.pieces[i];
    if (pu.sigma != pl.sigma || pu.gamma != pl.gamma) {
      *why = "diffusion data differ";
      return false;
    }
    const double lo = std::max(i == 0 ? -kInf : bp[i - 1],
                               upper.state_space.lo);
    const double hi = std::min(i < bp.size() ? bp[i] : kInf,
                               upper.state_space.hi);
    if (hi < lo) continue;
    // (a_u - a_l) - (b_u - b_l) x >= 0 on [lo, hi]
    const double da = pu.a - pl.a;
    const double db = pu.b - pl.b;
    const auto value = [&](double x) { return da - db * x; };
    if (std::isfinite(lo) && value(lo) < 0.0) {
      *why = "drift dominance fails";
      return false;
    }
    if (std::isfinite(hi) && value(hi) < 0.0) {
      *why = "drift dominance fails";
      return false;
    }
    if (!std::isfinite(lo) && db > 0.0) {
      *why = "PRECONDITION_UNVERIFIABLE: dominance at -inf undecidable";
      return false;
    }
    if (!std::isfinite(hi) && db < 0.0) {
      *why = "PRECONDITION_UNVERIFIABLE: dominance at +inf undecidable";
      return false;
    }
  }
  return true;
}

}  // namespace

TestReport test_comparison(const GeneralizedSde& upper,
                           const GeneralizedSde& lower, const SimConfig& cfg,
                           std::uint64_t seed, bool independent_noise) {
  TestReport pre;
  pre.name = "comparison";
  pre.config_echo = echo_config(cfg, seed);
  std::string why;
  if (!comparison_preconditions(upper, lower, &why)) {
    pre.notes.push_back(why);
    return pre;
  }

  const NoiseSource noise_a(seed, streams::comparison);
  const NoiseSource noise_b(seed, independent_noise ? streams::comparison_b
                                                    : streams::comparison);
  const long n = cfg.n_paths;
  std::vector<long> violations(n, 0);
  std::vector<long> samples(n, 0);
  parallel_for(n, [&](std::size_t i) {
    const Path pu = simulate(upper, cfg, noise_a, i);
    const Path pl = simulate(lower, cfg, noise_b, i);
    double max_sigma = 0.0;
    for (std::size_t k = 0; k < pu.size(); ++k) {
      max_sigma = std::max(max_sigma,
                           eval_diffusion(upper.coeffs, pu.values[k]));
      max_sigma = std::max(max_sigma,
                           eval_diffusion(lower.coeffs, pl.values[k]));
    }
    const double tol = 10.0 * std::sqrt(cfg.dt) * max_sigma;
    long v = 0;
    for (std::size_t k = 0; k < pu.size(); ++k)
      if (pu.values[k] < pl.values[k] - tol) ++v;
    violations[i] = v;
    samples[i] = static_cast<long>(pu.size());
  });
  long total_v = 0, total_s = 0;
  for (long i = 0; i < n; ++i) {
    total_v += violations[i];
    total_s += samples[i];
  }
  TestReport r = evaluate_comparison(total_v, total_s);
  r.n_paths = n;
  r.config_echo = echo_config(cfg, seed);
  if (independent_noise)
    r.notes.push_back("negative control: independent noise streams");
  return r;
}

TestReport test_pasting_consistency(const PastingPlan& plan,
                                    const GeneralizedSde& global,
                                    const SimConfig& cfg, std::uint64_t seed) {
  TestReport r;
  r.name = "pasting_consistency";
  r.config_echo = echo_config(cfg, seed);

  const ValidationReport comp = check_compatibility(plan);
  if (!comp.ok()) {
    for (const auto& f : comp.findings)
      if (f.severity == Severity::error)
        r.notes.push_back("compatibility: " + f.code);
    return r;
  }
  if (!global.measure.atoms.empty() || !global.sticky.empty()) {
    r.notes.push_back(
        "PRECONDITION: global SDE must be directly simulable (no atoms, no "
        "sticky points)");
    return r;
  }

  // (a) degenerate plan: pathwise equality under the same noise.
  PastingPlan degenerate;
  degenerate.regime_minus = global;
  degenerate.regime_plus = global;
  degenerate.vartheta = plan.vartheta;
  degenerate.epsilon = plan.epsilon;
  const NoiseSource noise_deg(seed, streams::pasting_degenerate);
  double max_diff = 0.0;
  const long n_deg = std::min<long>(cfg.n_paths, 64);
  for (long i = 0; i < n_deg; ++i) {
    SimConfig c = cfg;
    c.bridge_correction = true;
    const Path pasted = paste_simulate(degenerate, global.x0, c, noise_deg, i);
    const Path direct = simulate_em(global, cfg, noise_deg, i);
    for (std::size_t k = 0; k < pasted.size(); ++k)
      max_diff =
          std::max(max_diff, std::abs(pasted.values[k] - direct.values[k]));
  }
  const bool degenerate_ok = max_diff == 0.0;
  r.notes.push_back("degenerate max |paste - direct| = " +
                    std::to_string(max_diff));

  // (b) strict switch-level alternation and KS on terminal marginals.
  const NoiseSource noise_paste(seed, streams::pasting);
  const NoiseSource noise_direct(seed, streams::pasting_direct);
  const long n = cfg.n_paths;
  std::vector<double> term_paste(n), term_direct(n);
  std::vector<std::uint8_t> alternation_ok(n, 1);
  SimConfig paste_cfg = cfg;
  paste_cfg.bridge_correction = true;
  parallel_for(n, [&](std::size_t i) {
    const Path p = paste_simulate(plan, global.x0, paste_cfg, noise_paste, i);
    term_paste[i] = p.values.back();
    for (std::size_t k = 1; k < p.switches.size(); ++k)
      if (p.switches[k].level == p.switches[k - 1].level)
        alternation_ok[i] = 0;
    const Path q = simulate_em(global, cfg, noise_direct, i);
    term_direct[i] = q.values.back();
  });
  bool alternation = true;
  for (auto ok : alternation_ok) alternation = alternation && ok;

  const auto [d, p_value] = ks_statistic(term_paste, term_direct);
  r.statistic = p_value;
  r.threshold = 0.01;
  r.n_paths = n;
  r.notes.push_back("ks_statistic=" + std::to_string(d));
  if (!alternation) r.notes.push_back("switch levels failed to alternate");
  if (!degenerate_ok) r.notes.push_back("degenerate equality failed");
  r.pass = degenerate_ok && alternation && p_value > r.threshold;
  return r;
}

TestReport test_boundary_behavior(const GeneralizedSde& sde,
                                  const SimConfig& cfg, std::uint64_t seed) {
  TestReport r;
  r.name = "boundary_behavior";
  r.config_echo = echo_config(cfg, seed);
  const auto params = match_tckls(sde);
  if (!params) {
    r.notes.push_back("PRECONDITION: model is not in the threshold CKLS "
                      "family");
    return r;
  }
  const bool attainable =
      params->gamma_minus == 0.5 &&
      params->sigma_minus * params->sigma_minus > 2.0 * params->a_minus;
  const double level = 1e-6;

  const NoiseSource noise(seed, streams::boundary);
  const long n = cfg.n_paths;
  std::vector<std::uint8_t> hit(n, 0);
  parallel_for(n, [&](std::size_t i) {
    const auto [path, info] =
        simulate_regime(sde, sde.x0, level, kInf, cfg, noise, i, 0);
    hit[i] = info.hit ? 1 : 0;
  });
  long hits = 0;
  for (auto h : hit) hits += h;
  const double p_hat = static_cast<double>(hits) / n;

  r.statistic = p_hat;
  r.n_paths = n;
  if (attainable) {
    r.threshold = 0.01;
    r.pass = p_hat > r.threshold;
    r.notes.push_back("attainable regime: expect hit fraction > 0.01");
  } else {
    r.threshold = 0.001;
    r.pass = p_hat < r.threshold;
    r.notes.push_back("unattainable regime: expect hit fraction < 0.001");
  }
  return r;
}

TestReport test_scheme_coupling(const GeneralizedSde& sde, const SimConfig& cfg,
                                std::uint64_t seed) {
  TestReport r;
  r.name = "scheme_coupling";
  r.config_echo = echo_config(cfg, seed);
  const NoiseSource noise(seed, streams::coupling);
  const long n = cfg.n_paths;

  const auto l2_distance = [&](double dt, int substeps) {
    SimConfig c = cfg;
    c.dt = dt;
    c.noise_substeps = substeps;
    std::vector<double> sq(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
      SimConfig ce = c;
      ce.scheme = Scheme::euler;
      SimConfig cs = c;
      cs.scheme = Scheme::square_root_safe;
      const Path pe = simulate(sde, ce, noise, i);
      const Path ps = simulate(sde, cs, noise, i);
      const double diff = pe.values.back() - ps.values.back();
      sq[i] = diff * diff;
    });
    return std::sqrt(sample_mean(sq));
  };

  const double d_coarse = l2_distance(cfg.dt, 4);
  const double d_fine = l2_distance(cfg.dt / 4.0, 1);
  r.n_paths = n;
  r.threshold = 1.5;
  r.notes.push_back("L2(dt)=" + std::to_string(d_coarse) +
                    " L2(dt/4)=" + std::to_string(d_fine));
  if (d_fine == 0.0) {
    r.notes.push_back("schemes coincide on every path; coupling ratio "
                      "undefined");
    return r;
  }
  r.statistic = d_coarse / d_fine;
  r.pass = r.statistic >= r.threshold;
  return r;
}

// ---------------------------------------------------------------------------
// Canonical configurations and the suite runner
// ---------------------------------------------------------------------------

SimConfig default_config(const std::string& test_name) {
  SimConfig cfg;
  if (test_name == "zero_occupation") {
    cfg.dt = 1e-4;
    cfg.horizon = 1.0;
    cfg.n_paths = 10000;
    cfg.scheme = Scheme::square_root_safe;
  } else if (test_name == "sticky") {
    cfg.dt = 1e-5;
    cfg.horizon = 1.0;
    cfg.n_paths = 1000;
  } else if (test_name == "skew") {
    cfg.dt = 1e-4;
    cfg.horizon = 1.0;
    cfg.n_paths = 100000;
  } else if (test_name == "comparison") {
    cfg.dt = 1e-4;
    cfg.horizon = 1.0;
    cfg.n_paths = 1000;
    cfg.scheme = Scheme::square_root_safe;
  } else if (test_name == "pasting") {
    cfg.dt = 1e-3;
    cfg.horizon = 1.0;
    cfg.n_paths = 10000;
  } else if (test_name == "boundary") {
    cfg.dt = 1e-5;
    cfg.horizon = 5.0;
    cfg.n_paths = 10000;
    cfg.scheme = Scheme::square_root_safe;
  } else if (test_name == "coupling") {
    cfg.dt = 1e-3;
    cfg.horizon = 1.0;
    cfg.n_paths = 2000;
    cfg.scheme = Scheme::square_root_safe;
  }
  return cfg;
}

namespace {

GeneralizedSde raised_drift_variant(const GeneralizedSde& sde) {
  GeneralizedSde up = sde;
  if (match_tckls(sde)) {
    up.coeffs.pieces[0].a += 1.0;
  } else {
    for (auto& p : up.coeffs.pieces) p.a += 1.0;
  }
  return up;
}

}  // namespace

std::vector<TestReport> run_suite(const std::string& suite,
                                  const GeneralizedSde* sde,
                                  const PastingPlan* plan,
                                  std::uint64_t seed) {
  std::vector<TestReport> out;
  const bool all = suite == "all";

  const auto applicable = [&](const std::string& name) {
    if (!all) return suite == name;
    if (name == "zero_occupation" || name == "boundary")
      return sde != nullptr && match_tckls(*sde).has_value();
    if (name == "sticky")
      return sde != nullptr && sde->sticky.points.size() == 1;
    if (name == "skew")
      return sde != nullptr && sde->measure.has_atom_at(sde->x0);
    if (name == "comparison")
      return sde != nullptr && sde->sticky.empty();
    if (name == "pasting") return plan != nullptr;
    return false;
  };

  if (applicable("zero_occupation") && sde)
    out.push_back(
        test_zero_occupation(*sde, default_config("zero_occupation"), seed));
  if (applicable("sticky") && sde)
    out.push_back(test_sticky_ratio(*sde, default_config("sticky"), seed));
  if (applicable("skew") && sde)
    out.push_back(test_skew_ratio(*sde, default_config("skew"), seed));
  if (applicable("comparison") && sde) {
    const GeneralizedSde upper = raised_drift_variant(*sde);
    out.push_back(
        test_comparison(upper, *sde, default_config("comparison"), seed));
  }
  if (applicable("pasting") && plan) {
    const double x0 = plan->regime_minus.x0;
    const GeneralizedSde global = pasted_sde(*plan, x0);
    out.push_back(test_pasting_consistency(*plan, global,
                                           default_config("pasting"), seed));
  }
  if (applicable("boundary") && sde)
    out.push_back(
        test_boundary_behavior(*sde, default_config("boundary"), seed));

  if (out.empty()) {
    TestReport r;
    r.name = suite;
    r.notes.push_back("no applicable test for this model/suite combination");
    out.push_back(r);
  }
  std::sort(out.begin(), out.end(),
            [](const TestReport& a, const TestReport& b) {
              return a.name < b.name;
            });
  return out;
}

std::string reports_to_json(const std::vector<TestReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json j{{"name", r.name},
                     {"pass", r.pass},
                     {"statistic", r.statistic},
                     {"threshold", r.threshold},
                     {"n_paths", r.n_paths},
                     {"config", r.config_echo},
                     {"notes", r.notes}};
    if (r.standard_error)
      j["standard_error"] = *r.standard_error;
    else
      j["standard_error"] = nullptr;
    if (!std::isfinite(r.statistic)) j["statistic"] = nullptr;
    if (!std::isfinite(r.threshold)) j["threshold"] = nullptr;
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

}  // namespace ssde
