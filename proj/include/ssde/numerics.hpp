#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>

namespace ssde::num {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

// Gauss-Kronrod 7-15 pair on [a, b].
template <class F>
QuadResult gk15(const F& f, double a, double b) {
  static const double xgk[8] = {
      0.991455371120812639206854697526329,
      0.949107912342758524526189684047851,
      0.864864423359769072789712788640926,
      0.741531185599394439863864773280788,
      0.586087235467691130294144838258730,
      0.405845151377397166906606412076961,
      0.207784955007898467600689403773245,
      0.000000000000000000000000000000000};
  static const double wgk[8] = {
      0.022935322010529224963732008058970,
      0.063092092629978553290700663189204,
      0.104790010322250183839876322541518,
      0.140653259715525918745189590510238,
      0.169004726639267902826583426598550,
      0.190350578064785409913256402421014,
      0.204432940075298892414161999234649,
      0.209482141084727828012999174891714};
  static const double wg[4] = {
      0.129484966168869693270611432679082,
      0.279705391489276667901467771423780,
      0.381830050505118944950369775488975,
      0.417959183673469387755102040816327};

  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double result_g = wg[3] * fc;
  double result_k = wgk[7] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * xgk[j];
    const double fsum = f(center - dx) + f(center + dx);
    result_k += wgk[j] * fsum;
    if (j % 2 == 1) result_g += wg[j / 2] * fsum;
  }
  QuadResult r;
  r.value = result_k * half;
  r.error = std::abs((result_k - result_g) * half);
  return r;
}

// Adaptive driver around gk15: repeatedly bisects the panel with the largest
// error estimate under a panel budget.  Panels whose evaluation is not
// finite (an isolated singular point at fp resolution) are subdivided until
// a width floor and then dropped; their integrable mass is below the floor.
template <class F>
QuadResult integrate(const F& f, double a, double b, double rel_tol = 1e-12,
                     double abs_tol = 1e-14, int max_panels = 4000) {
  if (a == b) return {0.0, 0.0, true};
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }

  struct Panel {
    double lo, hi, value, error;
  };
  constexpr double huge_err = std::numeric_limits<double>::max();
  const auto eval = [&](double lo, double hi) -> Panel {
    const QuadResult q = gk15(f, lo, hi);
    const bool ok = std::isfinite(q.value) && std::isfinite(q.error);
    return {lo, hi, ok ? q.value : 0.0, ok ? q.error : huge_err};
  };

  std::vector<Panel> panels;
  panels.reserve(64);
  panels.push_back(eval(a, b));
  int evals = 1;
  bool dropped = false;
  for (;;) {
    double total = 0.0, err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      total += panels[i].value;
      err += panels[i].error;
      if (panels[i].error > panels[worst].error) worst = i;
    }
    if (err <= std::max(abs_tol, rel_tol * std::abs(total)))
      return {sign * total, err, !dropped};
    if (evals >= max_panels) return {sign * total, err, false};

    Panel w = panels[worst];
    const double mid = 0.5 * (w.lo + w.hi);
    const double floor_w =
        16.0 * std::numeric_limits<double>::epsilon() *
        std::max({std::abs(w.lo), std::abs(w.hi), 1e-30});
    if (!(w.lo < mid && mid < w.hi) || w.hi - w.lo < floor_w) {
      if (w.error == huge_err) dropped = true;
      panels[worst].error = 0.0;  // cannot refine further at fp resolution
      continue;
    }
    panels[worst] = eval(w.lo, mid);
    panels.push_back(eval(mid, w.hi));
    evals += 2;
  }
}

// Integral over (a, b] where f may have an integrable singularity at a.
// Sums dyadically refined panels toward a until the terms are negligible.
template <class F>
QuadResult integrate_singular_lower(const F& f, double a, double b,
                                    double rel_tol = 1e-12) {
  QuadResult total;
  double hi = b;
  double width = b - a;
  for (int k = 0; k < 2000; ++k) {
    const double lo = a + 0.5 * width;
    if (!(lo < hi)) break;
    const QuadResult panel = integrate(f, lo, hi, rel_tol, 0.0);
    total.value += panel.value;
    total.error += panel.error;
    hi = lo;
    width *= 0.5;
    if (k > 8 && std::abs(panel.value) <
                     0.5 * rel_tol * std::max(1.0, std::abs(total.value)))
      return total;
    if (width < 1e-280) break;
  }
  total.converged = false;
  return total;
}

// Mirror image: integrable singularity at the upper endpoint b.
template <class F>
QuadResult integrate_singular_upper(const F& f, double a, double b,
                                    double rel_tol = 1e-12) {
  auto g = [&](double u) { return f(a + b - u); };
  return integrate_singular_lower(g, a, b, rel_tol);
}

// Integral over [a, cutoff] with geometric panels, used as the fallback for
// limits at +infinity (cutoff 1e6 with a doubling check).
template <class F>
QuadResult integrate_tail_upper(const F& f, double a, double cutoff = 1e6,
                                double rel_tol = 1e-10) {
  QuadResult total;
  double lo = a;
  double width = std::max(1.0, std::abs(a));
  while (lo < cutoff) {
    const double hi = std::min(cutoff, lo + width);
    const QuadResult panel = integrate(f, lo, hi, rel_tol, 0.0);
    total.value += panel.value;
    total.error += panel.error;
    lo = hi;
    width *= 2.0;
  }
  // Richardson-style check: extend to 2x the cutoff and compare.
  QuadResult ext = integrate(f, cutoff, 2.0 * cutoff, rel_tol, 0.0);
  total.converged =
      std::abs(ext.value) <= 1e-6 * std::max(1.0, std::abs(total.value));
  total.error += std::abs(ext.value);
  total.value += ext.value;
  return total;
}

// Bracketed root finding (Brent).  Requires f(lo) and f(hi) of opposite sign.
template <class F>
double brent_root(const F& f, double lo, double hi, double xtol = 1e-14,
                  int max_iter = 200) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0))
    throw std::invalid_argument("brent_root: endpoints do not bracket a root");
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol = 2.0 * std::numeric_limits<double>::epsilon() *
                           std::abs(b) + 0.5 * xtol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
      d = e = m;  // bisection
    } else {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q),
                             std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = e = m;
      }
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0 ? tol : -tol);
    fb = f(b);
  }
  return b;
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

// Acklam's rational approximation of the standard normal quantile, refined
// with one Halley step.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile: p outside (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
          c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

// Kolmogorov asymptotic survival function Q(lambda) = 2 sum (-1)^{k-1}
// exp(-2 k^2 lambda^2).
inline double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-16) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sum));
}

}  // namespace ssde::num
