#include "ssde/engine.hpp"

#include <algorithm>
#include <cmath>

#include "ssde/numerics.hpp"

namespace ssde {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::euler: return "euler";
    case Scheme::square_root_safe: return "square_root_safe";
    case Scheme::scale_space: return "scale_space";
  }
  return "?";
}

std::uint64_t SimConfig::steps() const {
  if (!(dt > 0.0) || !(horizon > 0.0) || dt > horizon)
    throw std::invalid_argument("SimConfig: need 0 < dt <= horizon");
  const double ratio = horizon / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) < 1e-9 * ratio + 1e-12)
    return static_cast<std::uint64_t>(rounded);
  return static_cast<std::uint64_t>(std::ceil(ratio));
}

namespace {

// Brownian increments over the simulation grid, optionally aggregated from a
// finer base resolution so different dt share one Brownian path.
struct WienerGrid {
  const NoiseSource* noise;
  double scale;   // sqrt(base dt)
  int substeps;

  WienerGrid(const NoiseSource& n, double dt, int m)
      : noise(&n), scale(std::sqrt(dt / m)), substeps(m) {}

  double increment(std::uint64_t path, std::uint64_t step) const {
    if (substeps == 1) return scale * noise->normal(path, step);
    double sum = 0.0;
    const std::uint64_t base = step * static_cast<std::uint64_t>(substeps);
    for (int j = 0; j < substeps; ++j) sum += noise->normal(path, base + j);
    return scale * sum;
  }
};

struct PlainDynamics {
  const PiecewiseCoefficients* coeffs;
  bool safe;

  double drift(double x) const { return eval_drift(*coeffs, x); }
  double diffusion(double x) const {
    const CoefficientPiece& p = coeffs->piece_at(x);
    if (safe && x < 0.0 && p.gamma >= 0.5 && p.gamma < 1.0)
      return eval_diffusion(*coeffs, 0.0);
    return piece_diffusion(p, x);
  }
};

// Dynamics of the transformed SDE: btilde = (g o Psi)(drift o Psi),
// sigmatilde = (g o Psi)(sigma o Psi); the state variable is y = Phi(x).
struct SkewDynamics {
  const SkewTransform* t;
  const PiecewiseCoefficients* coeffs;
  bool safe;

  double drift(double y) const {
    const double x = t->psi(y);
    return t->g(x) * eval_drift(*coeffs, x);
  }
  double diffusion(double y) const {
    const double x = t->psi(y);
    const CoefficientPiece& p = coeffs->piece_at(x);
    if (safe && x < 0.0 && p.gamma >= 0.5 && p.gamma < 1.0)
      return t->g(x) * eval_diffusion(*coeffs, 0.0);
    return t->g(x) * piece_diffusion(p, x);
  }
};

struct SegmentEnd {
  std::uint64_t step = 0;  // global index of the last produced sample
  bool hit = false;
  double level = 0.0;
  double value = 0.0;  // raw value at the last produced sample
};

// Core stepping loop.  Starts at (step_begin, x) and emits one sample per
// step via emit(global_step, value).  Stops at the first detected crossing
// of stop_lo / stop_hi or at step_end.
template <class Dyn, class Emit>
SegmentEnd run_segment(const Dyn& dyn, double x, double dt,
                       std::uint64_t step_begin, std::uint64_t step_end,
                       double stop_lo, double stop_hi, bool bridge,
                       const WienerGrid& wiener, std::uint64_t path,
                       Emit&& emit) {
  SegmentEnd end;
  end.value = x;
  end.step = step_begin;
  for (std::uint64_t i = step_begin; i < step_end; ++i) {
    const double sig = dyn.diffusion(x);
    const double x_new =
        x + dyn.drift(x) * dt + sig * wiener.increment(path, i);
    if (!std::isfinite(x_new))
      throw SimulationError("NONFINITE", "state overflowed", i);
    emit(i + 1, x_new);
    end.step = i + 1;
    end.value = x_new;
    if (x_new >= stop_hi) {
      end.hit = true;
      end.level = stop_hi;
      return end;
    }
    if (x_new <= stop_lo) {
      end.hit = true;
      end.level = stop_lo;
      return end;
    }
    if (bridge && sig > 0.0) {
      const double var = sig * sig * dt;
      if (std::isfinite(stop_hi)) {
        const double p =
            std::exp(-2.0 * (stop_hi - x) * (stop_hi - x_new) / var);
        if (wiener.noise->uniform(path, i, 1) < p) {
          end.hit = true;
          end.level = stop_hi;
          return end;
        }
      }
      if (std::isfinite(stop_lo)) {
        const double p =
            std::exp(-2.0 * (x - stop_lo) * (x_new - stop_lo) / var);
        if (wiener.noise->uniform(path, i, 2) < p) {
          end.hit = true;
          end.level = stop_lo;
          return end;
        }
      }
    }
    x = x_new;
  }
  return end;
}

void init_path(Path& p, const SimConfig& cfg, const NoiseSource& noise,
               std::uint64_t path_id, std::uint64_t n_samples) {
  p.times.clear();
  p.values.clear();
  p.regime.clear();
  p.switches.clear();
  p.times.reserve(n_samples);
  p.values.reserve(n_samples);
  p.regime.reserve(n_samples);
  p.path_id = path_id;
  p.seed = noise.seed();
  p.stream = noise.stream();
  (void)cfg;
}

void require_plain(const GeneralizedSde& sde, const char* who) {
  if (!sde.measure.atoms.empty())
    throw std::invalid_argument(std::string(who) +
                                ": measure atoms are not supported here");
  if (!sde.sticky.empty())
    throw std::invalid_argument(std::string(who) +
                                ": sticky points are not supported here");
}

}  // namespace

Path simulate_em(const GeneralizedSde& sde, const SimConfig& cfg,
                 const NoiseSource& noise, std::uint64_t path_id) {
  if (cfg.scheme == Scheme::scale_space)
    return simulate_time_changed(sde, cfg, noise, path_id);
  require_plain(sde, "simulate_em");

  const std::uint64_t n = cfg.steps();
  Path p;
  init_path(p, cfg, noise, path_id, n + 1);
  p.times.push_back(0.0);
  p.values.push_back(sde.x0);
  p.regime.push_back(0);

  const WienerGrid wiener(noise, cfg.dt, cfg.noise_substeps);
  const PlainDynamics dyn{&sde.coeffs,
                          cfg.scheme == Scheme::square_root_safe};
  run_segment(dyn, sde.x0, cfg.dt, 0, n, -kInf, kInf, false, wiener, path_id,
              [&](std::uint64_t step, double x) {
                p.times.push_back(step * cfg.dt);
                p.values.push_back(x);
                p.regime.push_back(0);
              });
  return p;
}

std::pair<Path, HitInfo> simulate_regime(const GeneralizedSde& regime,
                                         double x0, double stop_lo,
                                         double stop_hi, const SimConfig& cfg,
                                         const NoiseSource& noise,
                                         std::uint64_t path_id,
                                         std::uint64_t step_offset) {
  if (!regime.sticky.empty())
    throw std::invalid_argument(
        "simulate_regime: sticky regimes are simulated by simulate_sticky");
  const std::uint64_t n = cfg.steps();
  Path p;
  init_path(p, cfg, noise, path_id, n + 1);
  p.times.push_back(step_offset * cfg.dt);
  p.values.push_back(x0);
  p.regime.push_back(0);

  const WienerGrid wiener(noise, cfg.dt, cfg.noise_substeps);
  SegmentEnd end;
  if (regime.measure.atoms.empty()) {
    const PlainDynamics dyn{&regime.coeffs,
                            cfg.scheme == Scheme::square_root_safe};
    end = run_segment(dyn, x0, cfg.dt, step_offset, step_offset + n, stop_lo,
                      stop_hi, cfg.bridge_correction, wiener, path_id,
                      [&](std::uint64_t step, double x) {
                        p.times.push_back(step * cfg.dt);
                        p.values.push_back(x);
                        p.regime.push_back(0);
                      });
  } else {
    const SkewTransform t = build_skew_transform(
        regime.measure, regime.state_space.interior_contains(x0)
                            ? x0
                            : regime.measure.atoms.front().x);
    const SkewDynamics dyn{&t, &regime.coeffs,
                           cfg.scheme == Scheme::square_root_safe};
    const double y_lo = std::isfinite(stop_lo) ? t.phi(stop_lo) : -kInf;
    const double y_hi = std::isfinite(stop_hi) ? t.phi(stop_hi) : kInf;
    end = run_segment(dyn, t.phi(x0), cfg.dt, step_offset, step_offset + n,
                      y_lo, y_hi, cfg.bridge_correction, wiener, path_id,
                      [&](std::uint64_t step, double y) {
                        p.times.push_back(step * cfg.dt);
                        p.values.push_back(t.psi(y));
                        p.regime.push_back(0);
                      });
    end.value = t.psi(end.value);
    if (end.hit) end.level = end.level == y_hi ? stop_hi : stop_lo;
  }

  HitInfo info;
  if (end.hit) {
    info.hit = true;
    info.time = end.step * cfg.dt;
    info.level = end.level;
    p.values.back() = end.level;  // recorded terminal pinned to the level
  }
  return {std::move(p), info};
}

Path paste_simulate(const PastingPlan& plan, double x0, const SimConfig& cfg,
                    const NoiseSource& noise, std::uint64_t path_id) {
  const ValidationReport comp = check_compatibility(plan);
  if (!comp.ok())
    throw std::invalid_argument(
        "paste_simulate: compatibility check failed: " +
        comp.findings.front().message);
  if (cfg.dt > plan.epsilon * plan.epsilon / 16.0)
    throw std::invalid_argument(
        "paste_simulate: dt must satisfy dt <= epsilon^2/16");
  const Interval space = pasted_state_space(plan);
  if (!space.interior_contains(x0))
    throw std::invalid_argument(
        "paste_simulate: x0 outside the pasted state space interior");
  for (const auto& r : {plan.regime_minus, plan.regime_plus})
    if (!r.sticky.empty())
      throw std::invalid_argument(
          "paste_simulate: sticky regimes are not supported; simulate the "
          "sticky model directly");

  const std::uint64_t n = cfg.steps();
  Path p;
  init_path(p, cfg, noise, path_id, n + 1);

  bool minus_active = x0 < plan.vartheta;
  p.times.push_back(0.0);
  p.values.push_back(x0);
  p.regime.push_back(minus_active ? -1 : 1);

  const WienerGrid wiener(noise, cfg.dt, cfg.noise_substeps);
  const double release = plan.vartheta - plan.epsilon / 2.0;

  // Prebuilt transforms for regimes with atoms.
  std::unique_ptr<SkewTransform> tm, tp;
  if (!plan.regime_minus.measure.atoms.empty())
    tm = std::make_unique<SkewTransform>(
        build_skew_transform(plan.regime_minus.measure, plan.vartheta));
  if (!plan.regime_plus.measure.atoms.empty())
    tp = std::make_unique<SkewTransform>(
        build_skew_transform(plan.regime_plus.measure, plan.vartheta));

  double x = x0;
  std::uint64_t step = 0;
  std::uint64_t switches = 0;
  while (step < n) {
    const GeneralizedSde& regime =
        minus_active ? plan.regime_minus : plan.regime_plus;
    const SkewTransform* t = minus_active ? tm.get() : tp.get();
    const double stop_lo = minus_active ? -kInf : release;
    const double stop_hi = minus_active ? plan.vartheta : kInf;
    const std::int8_t label = minus_active ? -1 : 1;

    SegmentEnd end;
    if (t == nullptr) {
      const PlainDynamics dyn{&regime.coeffs,
                              cfg.scheme == Scheme::square_root_safe};
      end = run_segment(dyn, x, cfg.dt, step, n, stop_lo, stop_hi,
                        cfg.bridge_correction, wiener, path_id,
                        [&](std::uint64_t s, double v) {
                          p.times.push_back(s * cfg.dt);
                          p.values.push_back(v);
                          p.regime.push_back(label);
                        });
    } else {
      const SkewDynamics dyn{t, &regime.coeffs,
                             cfg.scheme == Scheme::square_root_safe};
      const double y_lo = std::isfinite(stop_lo) ? t->phi(stop_lo) : -kInf;
      const double y_hi = std::isfinite(stop_hi) ? t->phi(stop_hi) : kInf;
      end = run_segment(dyn, t->phi(x), cfg.dt, step, n, y_lo, y_hi,
                        cfg.bridge_correction, wiener, path_id,
                        [&](std::uint64_t s, double v) {
                          p.times.push_back(s * cfg.dt);
                          p.values.push_back(t->psi(v));
                          p.regime.push_back(label);
                        });
      end.value = t->psi(end.value);
    }

    x = end.value;
    step = end.step;
    if (!end.hit) break;
    if (++switches > n)
      throw SimulationError("SWITCH_STORM",
                            "more regime switches than grid steps", step);
    const double level = minus_active ? plan.vartheta : release;
    p.switches.push_back({step * cfg.dt, level});
    minus_active = !minus_active;
  }
  return p;
}

namespace {

// Discontinuities of the piecewise-constant transformed diffusion, in the
// transformed coordinate.
struct ConstantInterfaces {
  std::vector<double> y;
  std::vector<double> sig_left;
  std::vector<double> sig_right;
};

bool piecewise_constant_driftless(const GeneralizedSde& sde) {
  for (const auto& p : sde.coeffs.pieces)
    if (p.a != 0.0 || p.b != 0.0 || p.gamma != 0.0) return false;
  return true;
}

ConstantInterfaces collect_interfaces(const GeneralizedSde& sde,
                                      const SkewTransform& t) {
  std::vector<double> kinks;
  for (const auto& a : sde.measure.atoms) kinks.push_back(a.x);
  for (double bp : sde.coeffs.breakpoints) kinks.push_back(bp);
  std::sort(kinks.begin(), kinks.end());
  kinks.erase(std::unique(kinks.begin(), kinks.end()), kinks.end());

  const auto sigma_tilde = [&](double x) {
    return t.g(x) * eval_diffusion(sde.coeffs, x);
  };
  ConstantInterfaces out;
  for (double x : kinks) {
    const double sl = sigma_tilde(std::nextafter(x, -kInf));
    const double sr = sigma_tilde(x);
    if (sl == sr) continue;  // no genuine discontinuity
    out.y.push_back(t.phi(x));
    out.sig_left.push_back(sl);
    out.sig_right.push_back(sr);
  }
  return out;
}

// Exact transition of Brownian motion with a single diffusion discontinuity
// at yk (sig_left below, sig_right above), through the skew representation:
// the process is h(S) with h(s) = sr s^+ - sl s^- and S a skew Brownian
// motion with parameter (sl - sr)/(sl + sr).
double exact_interface_step(double y, double yk, double sl, double sr,
                            double dt, const NoiseSource& noise,
                            std::uint64_t path, std::uint64_t step) {
  const double beta_star = (sl - sr) / (sl + sr);
  double s = y >= yk ? (y - yk) / sr : (y - yk) / sl;
  // mirror so the current point sits at s >= 0
  const bool flipped = s < 0.0;
  double b = beta_star;
  if (flipped) {
    s = -s;
    b = -b;
  }
  const double sq = std::sqrt(dt);
  const double z = noise.normal(path, step);

  double s_new;
  if (s == 0.0) {
    const double u = noise.uniform(path, step, 3);
    s_new = u < 0.5 * (1.0 + b) ? sq * std::abs(z) : -sq * std::abs(z);
  } else {
    const double g = s + sq * z;
    bool hit = false;
    if (g > 0.0) {
      const double p_hit = std::exp(-2.0 * s * g / dt);
      hit = noise.uniform(path, step, 3) < p_hit;
    } else {
      hit = true;
    }
    if (!hit) {
      s_new = g;
    } else {
      const double mass = num::normal_cdf(-s / sq);
      if (mass <= 0.0) {
        s_new = g;  // numerically unreachable crossing
      } else {
        const double u2 = noise.uniform(path, step, 4);
        const double v = sq * num::normal_quantile(u2 * mass);
        const double r = -v - s;
        const double u3 = noise.uniform(path, step, 5);
        s_new = u3 < 0.5 * (1.0 + b) ? r : -r;
      }
    }
  }
  if (flipped) s_new = -s_new;
  return yk + (s_new >= 0.0 ? sr * s_new : sl * s_new);
}

// Stepper for the transformed equation: exact one-interface transitions for
// driftless piecewise-constant diffusions, Euler otherwise.
template <class Emit>
void skew_transformed_loop(const GeneralizedSde& sde, const SkewTransform& t,
                           const SimConfig& cfg, const NoiseSource& noise,
                           std::uint64_t path_id, Emit&& emit) {
  const std::uint64_t n = cfg.steps();
  const WienerGrid wiener(noise, cfg.dt, cfg.noise_substeps);

  if (piecewise_constant_driftless(sde) && cfg.noise_substeps == 1) {
    const ConstantInterfaces ifaces = collect_interfaces(sde, t);
    const auto sigma_tilde = [&](double y) {
      const double x = t.psi(y);
      return t.g(x) * eval_diffusion(sde.coeffs, x);
    };
    double y = t.phi(sde.x0);
    const double sq = std::sqrt(cfg.dt);
    for (std::uint64_t i = 0; i < n; ++i) {
      // nearest interface within reach of one Gaussian step?
      int near = -1;
      const double sig = sigma_tilde(y);
      for (std::size_t k = 0; k < ifaces.y.size(); ++k) {
        const double d = std::abs(y - ifaces.y[k]);
        const double reach = 7.0 * sq * std::max({ifaces.sig_left[k],
                                                  ifaces.sig_right[k], sig});
        if (d < reach) near = near == -1 ? static_cast<int>(k) : -2;
      }
      if (near >= 0) {
        y = exact_interface_step(y, ifaces.y[near], ifaces.sig_left[near],
                                 ifaces.sig_right[near], cfg.dt, noise,
                                 path_id, i);
      } else {
        // far from every interface (or, in the rare two-interface overlap,
        // an Euler step): Gaussian increment
        y += sig * sq * noise.normal(path_id, i);
      }
      if (!std::isfinite(y))
        throw SimulationError("NONFINITE", "state overflowed", i);
      emit(i + 1, y);
    }
    return;
  }

  const SkewDynamics dyn{&t, &sde.coeffs,
                         cfg.scheme == Scheme::square_root_safe};
  run_segment(dyn, t.phi(sde.x0), cfg.dt, 0, n, -kInf, kInf, false, wiener,
              path_id, std::forward<Emit>(emit));
}

}  // namespace

Path simulate_skew(const GeneralizedSde& sde, const SimConfig& cfg,
                   const NoiseSource& noise, std::uint64_t path_id) {
  if (!sde.sticky.empty())
    throw std::invalid_argument("simulate_skew: sticky set must be empty");
  if (sde.measure.atoms.empty()) return simulate_em(sde, cfg, noise, path_id);

  const SkewTransform t = build_skew_transform(sde.measure, sde.x0);
  const std::uint64_t n = cfg.steps();
  Path p;
  init_path(p, cfg, noise, path_id, n + 1);
  p.times.push_back(0.0);
  p.values.push_back(sde.x0);
  p.regime.push_back(0);

  skew_transformed_loop(sde, t, cfg, noise, path_id,
                        [&](std::uint64_t step, double y) {
                          p.times.push_back(step * cfg.dt);
                          p.values.push_back(t.psi(y));
                          p.regime.push_back(0);
                        });
  return p;
}

double simulate_skew_terminal(const GeneralizedSde& sde, const SimConfig& cfg,
                              const NoiseSource& noise,
                              std::uint64_t path_id) {
  const SkewTransform t = build_skew_transform(sde.measure, sde.x0);
  double last = t.phi(sde.x0);
  skew_transformed_loop(sde, t, cfg, noise, path_id,
                        [&](std::uint64_t, double y) { last = y; });
  return t.psi(last);
}

// ---------------------------------------------------------------------------
// Time-change constructions
// ---------------------------------------------------------------------------

TimeChangeSimulator::TimeChangeSimulator(const GeneralizedSde& sde,
                                         const SimConfig& cfg)
    : sde_(sde), cfg_(cfg) {
  if (!sde.measure.atoms.empty())
    throw std::invalid_argument(
        "time change construction: measure atoms must be removed first");
  if (sde.sticky.points.size() > 1)
    throw std::invalid_argument(
        "time change construction: at most one sticky point is supported");

  sticky_ = sde.sticky.points.size() == 1;
  double reference;
  if (sticky_) {
    theta_ = sde.sticky.points[0].theta;
    kappa_ = sde.sticky.points[0].kappa;
    if (!(eval_diffusion(sde.coeffs, theta_) > 0.0) ||
        (theta_ == 0.0 && sde.coeffs.piece_at(0.0).gamma > 0.0))
      throw SimulationError(
          "STICKY_ELLIPTICITY",
          "diffusion must be bounded below on a strip around the sticky "
          "point");
    reference = theta_;
  } else {
    reference = sde.x0;
    for (double bp : sde.coeffs.breakpoints)
      if (sde.state_space.interior_contains(bp)) {
        reference = bp;
        break;
      }
  }

  GeneralizedSde plain = sde;
  plain.sticky.points.clear();
  scale_ = build_scale(plain, reference);
  reflected_ = std::isfinite(scale_.lower_limit());
  y_floor_ = scale_.lower_limit();
  y_start_ = scale_.value(sde.x0);

  // Fast speed evaluation for driftless constant-sigma models (s == 1).
  simple_speed_ = true;
  for (const auto& pc : sde.coeffs.pieces)
    if (pc.a != 0.0 || pc.b != 0.0 || pc.gamma != 0.0) simple_speed_ = false;

  // Interpolation table for R on the y-range the mother path can reach.
  const double mother_span =
      10.0 * std::sqrt(cfg.horizon) + std::abs(y_start_) + 1.0;
  double y_hi = y_start_ + mother_span;
  if (std::isfinite(scale_.upper_limit()))
    y_hi = std::min(y_hi, scale_.upper_limit() -
                              1e-9 * std::abs(scale_.upper_limit()));
  double y_lo = reflected_ ? y_floor_ : y_start_ - mother_span;
  if (!reflected_ && std::isfinite(y_floor_)) y_lo = std::max(y_lo, y_floor_);

  const int n_nodes = 4096;
  const double x_hi = scale_.inverse(y_hi);
  double x_lo;
  if (reflected_) {
    x_lo = sde.state_space.lo;  // R(S0) = lower endpoint
  } else {
    x_lo = scale_.inverse(std::max(
        y_lo, std::isfinite(y_floor_) ? y_floor_ + 1e-12 : y_lo));
  }
  table_x_.reserve(n_nodes + 2);
  table_y_.reserve(n_nodes + 2);
  if (reflected_) {
    table_x_.push_back(x_lo);
    table_y_.push_back(y_floor_);
  }
  // quadratic grading toward the lower end, where R bends the most
  const double width = x_hi - x_lo;
  const double eps0 = std::max(1e-14, 1e-6 * width);
  for (int k = 0; k < n_nodes; ++k) {
    const double frac = static_cast<double>(k) / (n_nodes - 1);
    const double x = x_lo + eps0 + (width - eps0) * frac * frac;
    if (!table_x_.empty() && x <= table_x_.back()) continue;
    if (x >= sde.state_space.hi) break;
    table_x_.push_back(x);
    table_y_.push_back(scale_.value(x));
  }
}

double TimeChangeSimulator::map_back(double y) const {
  if (y <= table_y_.front()) return table_x_.front();
  if (y >= table_y_.back()) {
    if (y < scale_.upper_limit()) return scale_.inverse(y);
    throw SimulationError("UPPER_SCALE_BOUNDARY_HIT",
                          "mother path reached the finite upper scale limit");
  }
  const auto it = std::upper_bound(table_y_.begin(), table_y_.end(), y);
  const std::size_t j = it - table_y_.begin();
  const double w = (y - table_y_[j - 1]) / (table_y_[j] - table_y_[j - 1]);
  return table_x_[j - 1] + w * (table_x_[j] - table_x_[j - 1]);
}

double TimeChangeSimulator::rho(double x) const {
  const double sig = eval_diffusion(sde_.coeffs, x);
  if (simple_speed_) return 1.0 / (sig * sig);
  const double sd = scale_.density(x) * sig;
  return 1.0 / (sd * sd);
}

Path TimeChangeSimulator::run(const NoiseSource& noise,
                              std::uint64_t path_id) const {
  return clock_construction() ? run_clock(noise, path_id)
                              : run_scale_em(noise, path_id);
}

// Euler-Maruyama on the driftless equation dY = sigma~(Y) dB in scale space,
// mapped back through R.  Used when S0 = -inf (no reflecting boundary).
Path TimeChangeSimulator::run_scale_em(const NoiseSource& noise,
                                       std::uint64_t path_id) const {
  const std::uint64_t n_out = cfg_.steps();
  const double dt = cfg_.dt;
  Path p;
  init_path(p, cfg_, noise, path_id, n_out + 1);
  p.times.push_back(0.0);
  p.values.push_back(sde_.x0);
  p.regime.push_back(0);

  const WienerGrid wiener(noise, dt, cfg_.noise_substeps);
  double y = y_start_;
  for (std::uint64_t i = 0; i < n_out; ++i) {
    const double x = map_back(y);
    const double sig_tilde = eval_diffusion(sde_.coeffs, x) *
                             (simple_speed_ ? 1.0 : scale_.density(x));
    y += sig_tilde * wiener.increment(path_id, i);
    if (!std::isfinite(y))
      throw SimulationError("NONFINITE", "scale-space state overflowed", i);
    p.times.push_back((i + 1) * dt);
    p.values.push_back(map_back(y));
    p.regime.push_back(0);
  }
  return p;
}

Path TimeChangeSimulator::run_clock(const NoiseSource& noise,
                                    std::uint64_t path_id) const {
  const std::uint64_t n_out = cfg_.steps();
  const double dt = cfg_.dt;
  Path p;
  init_path(p, cfg_, noise, path_id, n_out + 1);
  p.times.push_back(0.0);
  p.values.push_back(sde_.x0);
  p.regime.push_back(0);

  const WienerGrid wiener(noise, dt, cfg_.noise_substeps);
  const double z0 = reflected_ ? y_start_ - y_floor_ : y_start_;

  // Clock bookkeeping relative to the identity clock: after i mother steps
  // the clock reads i*dt + drift_, which keeps the kappa = 0 construction
  // grid-exact.
  double z = z0;
  double clock_extra = 0.0;
  double pos = reflected_ ? y_floor_ + std::abs(z) : z;
  double rho_left = rho(map_back(pos));
  const double sticky_level = sticky_ ? scale_.value(theta_) : 0.0;

  std::uint64_t j = 1;  // next output sample to fill
  const std::uint64_t mother_cap = 64 * n_out + 1000000;
  for (std::uint64_t i = 0; i < mother_cap && j <= n_out; ++i) {
    const double clock_i = i * dt + clock_extra;
    const double z_new = z + wiener.increment(path_id, i);
    const double pos_new = reflected_ ? y_floor_ + std::abs(z_new) : z_new;
    const double rho_right = rho(map_back(pos_new));
    const double transit = 0.5 * (rho_left + rho_right) * dt;

    double dwell = 0.0;
    if (sticky_ && kappa_ > 0.0) {
      const double a = pos - sticky_level;
      const double b = pos_new - sticky_level;
      const double sgn_a = a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
      const double dl = std::abs(b) - std::abs(a) - sgn_a * (b - a);
      dwell = kappa_ * dl;
    }
    if (!std::isfinite(transit) || !std::isfinite(dwell))
      throw SimulationError("CLOCK_OVERFLOW",
                            "clock increment is not finite", i);

    const double clock_next = (i + 1) * dt + (clock_extra + transit - dt + dwell);
    // output samples falling inside [clock_i, clock_next)
    while (j <= n_out && j * dt < clock_next) {
      const double t_j = j * dt;
      if (dwell > 0.0 && t_j >= clock_i + transit) {
        p.values.push_back(theta_);  // dwell sample pinned to the point
      } else {
        p.values.push_back(map_back(pos));
      }
      p.times.push_back(t_j);
      p.regime.push_back(0);
      ++j;
    }
    clock_extra += transit - dt + dwell;
    z = z_new;
    pos = pos_new;
    rho_left = rho_right;
  }
  if (j <= n_out)
    throw SimulationError("CLOCK_STALLED",
                          "clock did not reach the horizon within the mother "
                          "step budget",
                          mother_cap);
  return p;
}

Path simulate_sticky(const GeneralizedSde& sde, const SimConfig& cfg,
                     const NoiseSource& noise, std::uint64_t path_id) {
  if (sde.sticky.points.size() != 1)
    throw std::invalid_argument(
        "simulate_sticky: exactly one sticky point is required");
  const TimeChangeSimulator sim(sde, cfg);
  return sim.run(noise, path_id);
}

Path simulate_time_changed(const GeneralizedSde& sde, const SimConfig& cfg,
                           const NoiseSource& noise, std::uint64_t path_id) {
  GeneralizedSde plain = sde;
  plain.sticky.points.clear();
  const TimeChangeSimulator sim(plain, cfg);
  return sim.run(noise, path_id);
}

Path simulate(const GeneralizedSde& sde, const SimConfig& cfg,
              const NoiseSource& noise, std::uint64_t path_id) {
  if (!sde.sticky.empty()) return simulate_sticky(sde, cfg, noise, path_id);
  if (!sde.measure.atoms.empty())
    return simulate_skew(sde, cfg, noise, path_id);
  if (cfg.scheme == Scheme::scale_space)
    return simulate_time_changed(sde, cfg, noise, path_id);
  return simulate_em(sde, cfg, noise, path_id);
}

}  // namespace ssde
