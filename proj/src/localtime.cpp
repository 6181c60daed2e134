#include "ssde/localtime.hpp"

#include <algorithm>
#include <cmath>

namespace ssde {

const char* to_string(LocalTimeKind k) {
  return k == LocalTimeKind::symmetric ? "symmetric" : "right";
}

const char* to_string(LocalTimeEstimator e) {
  return e == LocalTimeEstimator::window ? "window" : "tanaka";
}

double occupation_time(const Path& path, double lo, double hi) {
  if (!(lo <= hi))
    throw std::invalid_argument("occupation_time: need lo <= hi");
  double occ = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double x = path.values[i];
    if (x >= lo && x <= hi) occ += path.times[i + 1] - path.times[i];
  }
  return occ;
}

LocalTimeCurve estimate_local_time(const Path& path, double level,
                                   LocalTimeKind kind, double bandwidth,
                                   const DiffusionEval& sigma_eval,
                                   bool realized_qv) {
  if (!(bandwidth > 0.0))
    throw std::invalid_argument("estimate_local_time: bandwidth must be > 0");
  LocalTimeCurve curve;
  curve.level = level;
  curve.kind = kind;
  curve.estimator = LocalTimeEstimator::window;
  curve.bandwidth = bandwidth;
  curve.times = path.times;
  curve.values.assign(path.size(), 0.0);

  const double norm = kind == LocalTimeKind::symmetric ? 0.5 / bandwidth
                                                       : 1.0 / bandwidth;
  double acc = 0.0;
  long in_window = 0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double x = path.values[i];
    const bool inside =
        kind == LocalTimeKind::symmetric
            ? std::abs(x - level) < bandwidth
            : (x >= level && x < level + bandwidth);
    if (inside) {
      ++in_window;
      double qv;
      if (realized_qv) {
        const double dx = path.values[i + 1] - x;
        qv = dx * dx;
      } else {
        const double s = sigma_eval(x);
        qv = s * s * (path.times[i + 1] - path.times[i]);
      }
      acc += norm * qv;
    }
    curve.values[i + 1] = acc;
  }
  if (in_window < 10 && in_window > 0)
    curve.warning = "BANDWIDTH_TOO_SMALL";
  return curve;
}

LocalTimeCurve tanaka_local_time(const Path& path, double level) {
  if (path.size() < 2)
    throw std::invalid_argument("tanaka_local_time: need at least 2 points");
  LocalTimeCurve curve;
  curve.level = level;
  curve.kind = LocalTimeKind::symmetric;
  curve.estimator = LocalTimeEstimator::tanaka;
  curve.times = path.times;
  curve.values.assign(path.size(), 0.0);

  const double base = std::abs(path.values[0] - level);
  double sum_sgn = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double d = path.values[i] - level;
    const double sgn = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    sum_sgn += sgn * (path.values[i + 1] - path.values[i]);
    const double lt = std::abs(path.values[i + 1] - level) - base - sum_sgn;
    curve.values[i + 1] = std::max(0.0, lt);
  }
  return curve;
}

}  // namespace ssde
