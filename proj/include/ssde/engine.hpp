#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ssde/analysis.hpp"
#include "ssde/model.hpp"
#include "ssde/noise.hpp"

namespace ssde {

enum class Scheme { euler, square_root_safe, scale_space };

const char* to_string(Scheme s);

struct SimConfig {
  double dt = 1e-3;
  double horizon = 1.0;
  long n_paths = 1;
  Scheme scheme = Scheme::euler;
  bool bridge_correction = false;
  // Brownian increments are sums of `noise_substeps` base-resolution draws;
  // running at (dt, m) and (dt/m, 1) couples the two grids to one Brownian
  // path, which the scheme-coupling tests rely on.
  int noise_substeps = 1;

  std::uint64_t steps() const;
};

struct SwitchRecord {
  double time = 0.0;
  double level = 0.0;
};

// Regime labels stored per sample: -1 minus regime, +1 plus regime, 0 single.
struct Path {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<std::int8_t> regime;
  std::vector<SwitchRecord> switches;
  std::uint64_t path_id = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  std::size_t size() const { return times.size(); }
};

struct HitInfo {
  bool hit = false;
  double time = std::numeric_limits<double>::quiet_NaN();
  double level = std::numeric_limits<double>::quiet_NaN();
};

class SimulationError : public std::runtime_error {
 public:
  SimulationError(std::string code, const std::string& what,
                  std::uint64_t step = 0)
      : std::runtime_error(code + ": " + what),
        code_(std::move(code)),
        step_(step) {}
  const std::string& code() const { return code_; }
  std::uint64_t step() const { return step_; }

 private:
  std::string code_;
  std::uint64_t step_;
};

// Euler-Maruyama on a uniform grid; `square_root_safe` clamps the diffusion
// argument at 0 for pieces with gamma in [1/2, 1).  Atoms and sticky points
// must be absent.
Path simulate_em(const GeneralizedSde& sde, const SimConfig& cfg,
                 const NoiseSource& noise, std::uint64_t path_id);

// Runs one regime from x0 until the first detected crossing of either stop
// level (grid crossing, plus optional Brownian-bridge correction).  The
// recorded terminal value is pinned to the level.  Noise indices start at
// step_offset.
std::pair<Path, HitInfo> simulate_regime(const GeneralizedSde& regime,
                                         double x0, double stop_lo,
                                         double stop_hi, const SimConfig& cfg,
                                         const NoiseSource& noise,
                                         std::uint64_t path_id,
                                         std::uint64_t step_offset);

// Alternating-regime construction: minus segments run to vartheta from
// below, plus segments to vartheta - epsilon/2 from above, concatenated
// continuously on one noise stream.
Path paste_simulate(const PastingPlan& plan, double x0, const SimConfig& cfg,
                    const NoiseSource& noise, std::uint64_t path_id);

// Removes the atoms with the skew transform, simulates the transformed SDE,
// and maps back; output values live in the original space.  For driftless
// piecewise-constant diffusions the transformed equation is stepped with the
// closed-form one-interface transition (exact in law); everything else runs
// through the Euler schemes.
Path simulate_skew(const GeneralizedSde& sde, const SimConfig& cfg,
                   const NoiseSource& noise, std::uint64_t path_id);

// Terminal value only; identical in law (and in noise indexing) to
// simulate_skew but without storing the grid.
double simulate_skew_terminal(const GeneralizedSde& sde, const SimConfig& cfg,
                              const NoiseSource& noise, std::uint64_t path_id);

// Time-change constructions share one simulator so the scale table is built
// once per model and reused across paths.
class TimeChangeSimulator {
 public:
  // kappa is taken from the sde's sticky set (empty set: plain time change).
  TimeChangeSimulator(const GeneralizedSde& sde, const SimConfig& cfg);

  Path run(const NoiseSource& noise, std::uint64_t path_id) const;

  const ScaleTransform& scale() const { return scale_; }
  bool reflected() const { return reflected_; }
  // S3/S4 and sticky models use the Brownian clock construction; on S1/S2
  // without stickiness the driftless scale-space SDE is stepped directly.
  bool clock_construction() const { return reflected_ || sticky_; }

 private:
  Path run_clock(const NoiseSource& noise, std::uint64_t path_id) const;
  Path run_scale_em(const NoiseSource& noise, std::uint64_t path_id) const;
  double map_back(double y) const;  // interpolated R with exact fallback
  double rho(double x) const;       // (sigma s)^{-2} at x

  GeneralizedSde sde_;
  SimConfig cfg_;
  ScaleTransform scale_;
  bool reflected_ = false;
  bool sticky_ = false;
  double kappa_ = 0.0;
  double theta_ = 0.0;
  double y_start_ = 0.0;
  double y_floor_ = 0.0;  // S0 when reflected
  bool simple_speed_ = false;
  std::vector<double> table_x_;
  std::vector<double> table_y_;
};

// Sticky-point simulation by the clock construction: mother Brownian path in
// scale space, clock advancing by the speed density off the point and by
// kappa dL on it, path read off the inverse clock (dwell samples pinned to
// theta).
Path simulate_sticky(const GeneralizedSde& sde, const SimConfig& cfg,
                     const NoiseSource& noise, std::uint64_t path_id);

// Reflected-Brownian time change for scale cases S3/S4 (falls back to the
// unreflected construction when S0 = -inf).
Path simulate_time_changed(const GeneralizedSde& sde, const SimConfig& cfg,
                           const NoiseSource& noise, std::uint64_t path_id);

// Dispatch on the model: sticky -> clock construction, atoms -> skew
// transform, scale_space scheme -> time change, otherwise Euler-Maruyama.
Path simulate(const GeneralizedSde& sde, const SimConfig& cfg,
              const NoiseSource& noise, std::uint64_t path_id);

}  // namespace ssde
