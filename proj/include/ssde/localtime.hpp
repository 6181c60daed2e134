#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ssde/engine.hpp"

namespace ssde {

enum class LocalTimeKind { symmetric, right };
enum class LocalTimeEstimator { window, tanaka };

const char* to_string(LocalTimeKind k);
const char* to_string(LocalTimeEstimator e);

struct LocalTimeCurve {
  std::vector<double> times;
  std::vector<double> values;
  double level = 0.0;
  LocalTimeKind kind = LocalTimeKind::symmetric;
  LocalTimeEstimator estimator = LocalTimeEstimator::window;
  double bandwidth = 0.0;
  std::string warning;  // e.g. BANDWIDTH_TOO_SMALL

  double terminal() const { return values.empty() ? 0.0 : values.back(); }
};

// Default bandwidth dt^{0.4}: between the dt^{1/2} fluctuation scale and
// O(1).
inline double default_bandwidth(double dt) { return std::pow(dt, 0.4); }

// Lebesgue time spent in [lo, hi] along the grid.
double occupation_time(const Path& path, double lo, double hi);

using DiffusionEval = std::function<double(double)>;

// Window estimator: cumulative (2 eps)^{-1} sum 1{|x_i - level| < eps}
// sigma^2(x_i) dt (one-sided window [level, level+eps) with factor 1/eps for
// kind = right).  With realized_qv the weight sigma^2 dt is replaced by the
// realized squared increment.
LocalTimeCurve estimate_local_time(const Path& path, double level,
                                   LocalTimeKind kind, double bandwidth,
                                   const DiffusionEval& sigma_eval,
                                   bool realized_qv = false);

// Discrete Tanaka formula with the symmetric sign convention sgn(0) = 0,
// clipped below at 0.
LocalTimeCurve tanaka_local_time(const Path& path, double level);

}  // namespace ssde
