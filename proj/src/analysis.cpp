#include "ssde/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ssde/numerics.hpp"

namespace ssde {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Local integrability of 1/sigma^2 across a power zero: |x|^{-2 gamma} is
// integrable near 0 iff 2 gamma < 1.  The boundary exponent 2 gamma == 1
// diverges logarithmically; the classifier counts it as integrable and
// records a note (the divergence-test oracle in the tests distinguishes
// power divergence from log divergence the same way).
bool inv_sq_power_integrable(double gamma) { return 2.0 * gamma <= 1.0; }
bool inv_sq_power_log_boundary(double gamma) { return 2.0 * gamma == 1.0; }

}  // namespace

const char* to_string(EsCase c) {
  switch (c) {
    case EsCase::es1: return "ES1";
    case EsCase::es2: return "ES2";
    case EsCase::es3: return "ES3";
    case EsCase::es4: return "ES4";
    default: return "UNDEFINED";
  }
}

const char* to_string(ScaleCase c) {
  switch (c) {
    case ScaleCase::s1: return "S1";
    case ScaleCase::s2: return "S2";
    case ScaleCase::s3: return "S3";
    case ScaleCase::s4: return "S4";
  }
  return "?";
}

const char* to_string(Existence e) {
  switch (e) {
    case Existence::none: return "none";
    case Existence::weak: return "weak";
    case Existence::strong: return "strong";
  }
  return "?";
}

const char* to_string(UniquenessKind u) {
  switch (u) {
    case UniquenessKind::none: return "none";
    case UniquenessKind::in_law: return "in_law";
    case UniquenessKind::pathwise: return "pathwise";
  }
  return "?";
}

const char* to_string(BoundaryAtZero b) {
  switch (b) {
    case BoundaryAtZero::unreachable: return "unreachable";
    case BoundaryAtZero::reflecting: return "reflecting";
    case BoundaryAtZero::not_applicable: return "not_applicable";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Engelbert-Schmidt classification
// ---------------------------------------------------------------------------

EsClassification classify_es(const PiecewiseCoefficients& coeffs,
                             const Interval& domain) {
  EsClassification out;

  for (std::size_t i = 0; i < coeffs.pieces.size(); ++i) {
    if (coeffs.pieces[i].sigma != 0.0) continue;
    const double lo = i == 0 ? -kInf : coeffs.breakpoints[i - 1];
    const double hi =
        i < coeffs.breakpoints.size() ? coeffs.breakpoints[i] : kInf;
    if (std::max(lo, domain.lo) < std::min(hi, domain.hi)) {
      out.es_case = EsCase::undefined;
      out.notes.push_back(
          "sigma vanishes on an interval; zeros are not isolated points");
      return out;
    }
  }

  bool zero_at_origin = false;
  bool e_at_origin = false;
  if (domain.contains(0.0)) {
    const CoefficientPiece& right = coeffs.piece_at(0.0);
    zero_at_origin = right.gamma > 0.0;

    // Either side with a non-integrable 1/sigma^2 makes 0 an E-point.
    if (0.0 > domain.lo) {
      const CoefficientPiece& left =
          coeffs.piece_at(std::nextafter(0.0, -kInf));
      if (left.gamma > 0.0 && !inv_sq_power_integrable(left.gamma))
        e_at_origin = true;
      if (left.gamma > 0.0 && inv_sq_power_log_boundary(left.gamma))
        out.notes.push_back(
            "left exponent 2*gamma == 1 at 0: log divergence counted as "
            "integrable");
    }
    if (right.gamma > 0.0 && !inv_sq_power_integrable(right.gamma))
      e_at_origin = true;
    if (right.gamma > 0.0 && inv_sq_power_log_boundary(right.gamma))
      out.notes.push_back(
          "right exponent 2*gamma == 1 at 0: log divergence counted as "
          "integrable");
  }

  if (zero_at_origin) out.n_sigma.push_back(0.0);
  if (e_at_origin) out.e_sigma.push_back(0.0);

  if (e_at_origin && !zero_at_origin) {
    out.es_case = EsCase::undefined;
    out.notes.push_back(
        "E_sigma not contained in N_sigma: no solution exists for the "
        "driftless equation");
    return out;
  }

  const bool n_empty = out.n_sigma.empty();
  const bool e_empty = out.e_sigma.empty();
  if (n_empty && e_empty)
    out.es_case = EsCase::es1;
  else if (!e_empty && out.e_sigma == out.n_sigma)
    out.es_case = EsCase::es2;
  else if (e_empty)
    out.es_case = EsCase::es3;
  else
    out.es_case = EsCase::es4;
  return out;
}

EsClassification classify_es(const GeneralizedSde& sde) {
  EsClassification out = classify_es(sde.coeffs, sde.state_space);
  if (out.es_case == EsCase::undefined) return out;

  bool added = false;
  for (const auto& s : sde.sticky.points) {
    if (!sde.state_space.contains(s.theta)) continue;
    if (std::find(out.n_sigma.begin(), out.n_sigma.end(), s.theta) ==
        out.n_sigma.end()) {
      out.n_sigma.push_back(s.theta);
      added = true;
    }
  }
  if (added) {
    std::sort(out.n_sigma.begin(), out.n_sigma.end());
    // Indicator-type zeros do not affect the integrability of 1/sigma^2.
    out.es_case = out.e_sigma.empty()
                      ? EsCase::es3
                      : (out.e_sigma == out.n_sigma ? EsCase::es2
                                                    : EsCase::es4);
    if (out.es_case == EsCase::es3)
      out.notes.push_back(
          "indicator-type zero: sticky solutions exist alongside the unique "
          "fundamental solution");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scale transform
// ---------------------------------------------------------------------------

namespace {

// Antiderivative of u -> 2 (a - b u) / (sigma^2 u^{2 gamma}) for u > 0.
double scale_primitive_pos(const CoefficientPiece& p, double u) {
  const double inv_s2 = 1.0 / (p.sigma * p.sigma);
  if (p.gamma == 0.0) return inv_s2 * (2.0 * p.a * u - p.b * u * u);
  if (p.gamma == 0.5)
    return inv_s2 * (2.0 * p.a * std::log(u) - 2.0 * p.b * u);
  if (p.gamma == 1.0)
    return inv_s2 * (-2.0 * p.a / u - 2.0 * p.b * std::log(u));
  const double e1 = 1.0 - 2.0 * p.gamma;
  const double e2 = 2.0 - 2.0 * p.gamma;
  return inv_s2 * (2.0 * p.a * std::pow(u, e1) / e1 -
                   2.0 * p.b * std::pow(u, e2) / e2);
}

// Extension to u <= 0 through the mirror u -> -u, which maps (a,b) to (a,-b).
// At u == 0 the primitive is evaluated as a limit; finite whenever the
// integrability gate for b/sigma^2 passed.
double scale_primitive(const CoefficientPiece& p, double u) {
  if (u > 0.0) return scale_primitive_pos(p, u);
  if (u == 0.0) {
    if (p.gamma == 0.0) return 0.0;
    if (p.gamma < 0.5) return 0.0;           // both terms vanish at 0
    if (p.a == 0.0 && p.gamma < 1.0) return 0.0;
    if (p.a == 0.0 && p.gamma == 1.0 && p.b == 0.0) return 0.0;
    throw std::domain_error("scale exponent diverges at 0");
  }
  CoefficientPiece mirrored = p;
  mirrored.b = -p.b;
  return -scale_primitive_pos(mirrored, -u);
}

bool drift_over_sigma2_integrable_at_zero(const CoefficientPiece& p) {
  if (p.gamma == 0.0) return true;
  if (p.a != 0.0) return 2.0 * p.gamma < 1.0;
  // drift reduces to -b x: integrand ~ |x|^{1 - 2 gamma}
  return p.b == 0.0 || p.gamma < 1.0;
}

// Divergence conditions for lim_{x->+inf} S(x) on a power-law piece.
bool scale_upper_limit_infinite(const CoefficientPiece& p) {
  if (p.gamma == 0.5)
    return p.b > 0.0 || (p.b == 0.0 && 2.0 * p.a <= p.sigma * p.sigma);
  if (p.gamma < 0.5) return p.b > 0.0 || (p.b == 0.0 && p.a <= 0.0);
  if (p.gamma < 1.0) return p.b >= 0.0;
  return 2.0 * p.b >= -(p.sigma * p.sigma);
}

// lim_{x->0+} S(x) = -inf iff gamma > 1/2, or gamma == 1/2 and
// sigma^2 <= 2a.
bool scale_lower_limit_at_zero_infinite(const CoefficientPiece& p) {
  if (p.gamma > 0.5) return true;
  if (p.gamma == 0.5) return p.sigma * p.sigma <= 2.0 * p.a;
  return false;
}

}  // namespace

double ScaleTransform::exponent(double x) const {
  std::size_t cell = 0;
  while (cell < cell_edges_.size() && x >= cell_edges_[cell]) ++cell;
  return scale_primitive(coeffs_.piece_at(x), x) + exp_offsets_[cell];
}

double ScaleTransform::density(double x) const {
  return std::exp(-exponent(x));
}

double ScaleTransform::speed_density(double x) const {
  const double sig = eval_diffusion(coeffs_, x);
  return 1.0 / (density(x) * sig * sig);
}

double ScaleTransform::value(double x) const {
  if (x == reference_) return 0.0;
  if (!(x >= domain_.lo && x <= domain_.hi))
    throw std::out_of_range("scale value: x outside the state space");
  if (x == domain_.lo) {
    if (std::isfinite(s0_)) return s0_;
    throw std::out_of_range("scale value: S diverges at the lower endpoint");
  }
  if (x == domain_.hi) {
    if (std::isfinite(sinf_)) return sinf_;
    throw std::out_of_range("scale value: S diverges at the upper endpoint");
  }
  auto it = std::lower_bound(anchors_x_.begin(), anchors_x_.end(), x);
  std::size_t idx;
  if (it == anchors_x_.end())
    idx = anchors_x_.size() - 1;
  else if (it == anchors_x_.begin())
    idx = 0;
  else
    idx = (x - *(it - 1) < *it - x) ? (it - 1 - anchors_x_.begin())
                                    : (it - anchors_x_.begin());
  const auto f = [this](double y) { return density(y); };
  const auto q = num::integrate(f, anchors_x_[idx], x, 1e-12, 1e-300);
  return anchors_s_[idx] + q.value;
}

double ScaleTransform::inverse(double y) const {
  if (std::isfinite(s0_) && y == s0_) return domain_.lo;
  if (!(y > s0_ && y < sinf_))
    throw std::out_of_range("inverse_scale: y outside the scale range");
  if (y == 0.0) return reference_;

  double xl, xr;
  if (y > 0.0) {
    xl = reference_;
    if (std::isfinite(domain_.hi)) {
      xr = domain_.hi;  // value(hi) == sinf_ > y
    } else {
      double step = std::max(1.0, std::abs(reference_));
      xr = reference_ + step;
      while (value(xr) < y) {
        step *= 2.0;
        xr = reference_ + step;
        if (step > 1e15)
          throw std::out_of_range("inverse_scale: bracket failed above");
      }
    }
  } else {
    xr = reference_;
    if (std::isfinite(domain_.lo)) {
      if (std::isfinite(s0_)) {
        xl = domain_.lo;  // value(lo) == s0_ <= y
      } else {
        double gap = 0.5 * (reference_ - domain_.lo);
        xl = domain_.lo + gap;
        while (value(xl) > y) {
          gap *= 0.5;
          xl = domain_.lo + gap;
          if (gap < 1e-290)
            throw std::out_of_range("inverse_scale: bracket failed below");
        }
      }
    } else {
      double step = std::max(1.0, std::abs(reference_));
      xl = reference_ - step;
      while (value(xl) > y) {
        step *= 2.0;
        xl = reference_ - step;
        if (step > 1e15)
          throw std::out_of_range("inverse_scale: bracket failed below");
      }
    }
  }
  const auto g = [this, y](double x) { return value(x) - y; };
  const double xtol = 1e-15 * std::max({1.0, std::abs(xl), std::abs(xr)});
  return num::brent_root(g, xl, xr, xtol);
}

ScaleTransform build_scale(const GeneralizedSde& sde, double reference) {
  const Interval& dom = sde.state_space;
  if (!dom.interior_contains(reference))
    throw std::invalid_argument(
        "build_scale: reference must lie in the interior of the state space");

  ScaleTransform t;
  t.coeffs_ = sde.coeffs;
  t.domain_ = dom;
  t.reference_ = reference;

  for (const auto& p : sde.coeffs.pieces)
    if (p.sigma == 0.0)
      throw std::domain_error(
          "SCALE_NOT_DEFINED: sigma vanishes identically on a piece");
  if (dom.interior_contains(0.0)) {
    const CoefficientPiece& right = sde.coeffs.piece_at(0.0);
    const CoefficientPiece& left =
        sde.coeffs.piece_at(std::nextafter(0.0, -kInf));
    if (!drift_over_sigma2_integrable_at_zero(right) ||
        !drift_over_sigma2_integrable_at_zero(left))
      throw std::domain_error(
          "SCALE_NOT_DEFINED: b/sigma^2 not locally integrable across the "
          "interior degeneracy at 0");
  }

  // Cells: breakpoints inside the domain, plus a cut at 0 when 0 is interior
  // (the closed-form exponent changes branch there).
  for (double bp : sde.coeffs.breakpoints)
    if (bp > dom.lo && bp < dom.hi) t.cell_edges_.push_back(bp);
  if (dom.interior_contains(0.0) &&
      std::find(t.cell_edges_.begin(), t.cell_edges_.end(), 0.0) ==
          t.cell_edges_.end())
    t.cell_edges_.push_back(0.0);
  std::sort(t.cell_edges_.begin(), t.cell_edges_.end());

  const std::size_t n_cells = t.cell_edges_.size() + 1;
  const auto cell_lo = [&](std::size_t c) {
    return c == 0 ? dom.lo : t.cell_edges_[c - 1];
  };
  const auto cell_hi = [&](std::size_t c) {
    return c < t.cell_edges_.size() ? t.cell_edges_[c] : dom.hi;
  };
  const auto piece_for_cell =
      [&](std::size_t c) -> const CoefficientPiece& {
    const double lo = cell_lo(c), hi = cell_hi(c);
    double probe;
    if (std::isfinite(lo) && std::isfinite(hi))
      probe = 0.5 * (lo + hi);
    else if (std::isfinite(lo))
      probe = lo + 1.0;
    else if (std::isfinite(hi))
      probe = hi - 1.0;
    else
      probe = 0.0;
    return sde.coeffs.piece_at(probe);
  };

  // Continuity offsets so that E is continuous with E(reference) = 0.
  t.exp_offsets_.assign(n_cells, 0.0);
  std::size_t ref_cell = 0;
  while (ref_cell < t.cell_edges_.size() &&
         reference >= t.cell_edges_[ref_cell])
    ++ref_cell;
  t.exp_offsets_[ref_cell] =
      -scale_primitive(piece_for_cell(ref_cell), reference);
  for (std::size_t c = ref_cell; c + 1 < n_cells; ++c) {
    const double e = t.cell_edges_[c];
    t.exp_offsets_[c + 1] = t.exp_offsets_[c] +
                            scale_primitive(piece_for_cell(c), e) -
                            scale_primitive(piece_for_cell(c + 1), e);
  }
  for (std::size_t c = ref_cell; c > 0; --c) {
    const double e = t.cell_edges_[c - 1];
    t.exp_offsets_[c - 1] = t.exp_offsets_[c] +
                            scale_primitive(piece_for_cell(c), e) -
                            scale_primitive(piece_for_cell(c - 1), e);
  }

  // Anchor grid for fast S evaluation: per cell a coarse uniform grid plus
  // dyadic refinement toward the cell ends (where the density may steepen).
  std::vector<double> nodes;
  nodes.push_back(reference);
  for (std::size_t c = 0; c < n_cells; ++c) {
    double lo = cell_lo(c), hi = cell_hi(c);
    if (!std::isfinite(lo))
      lo = std::min({-8.0, 2.0 * reference - 8.0,
                     std::isfinite(hi) ? hi - 8.0 : -8.0});
    if (!std::isfinite(hi))
      hi = std::max({8.0, 2.0 * reference + 8.0, lo + 8.0});
    if (!(lo < hi)) continue;
    const double w = hi - lo;
    for (int k = 1; k < 32; ++k) nodes.push_back(lo + w * k / 32.0);
    for (int k = 2; k <= 44; ++k) {
      nodes.push_back(lo + w * std::ldexp(1.0, -k));
      nodes.push_back(hi - w * std::ldexp(1.0, -k));
    }
    nodes.push_back(lo + 0.25 * w);
    // geometric extension for infinite cells
    if (!std::isfinite(cell_hi(c)))
      for (int k = 0; k <= 24; ++k) nodes.push_back(hi + std::ldexp(1.0, k));
    if (!std::isfinite(cell_lo(c)))
      for (int k = 0; k <= 24; ++k) nodes.push_back(lo - std::ldexp(1.0, k));
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  std::erase_if(nodes, [&](double v) { return v <= dom.lo || v >= dom.hi; });

  const auto dens = [&t](double y) { return t.density(y); };
  const std::size_t ref_idx =
      std::lower_bound(nodes.begin(), nodes.end(), reference) - nodes.begin();
  t.anchors_x_ = nodes;
  t.anchors_s_.assign(nodes.size(), 0.0);
  for (std::size_t i = ref_idx; i + 1 < nodes.size(); ++i)
    t.anchors_s_[i + 1] =
        t.anchors_s_[i] +
        num::integrate(dens, nodes[i], nodes[i + 1], 1e-13, 1e-300).value;
  for (std::size_t i = ref_idx; i > 0; --i)
    t.anchors_s_[i - 1] =
        t.anchors_s_[i] -
        num::integrate(dens, nodes[i - 1], nodes[i], 1e-13, 1e-300).value;

  // ---- limits at the state-space endpoints ---------------------------------
  const double first_anchor = t.anchors_x_.front();
  const double last_anchor = t.anchors_x_.back();
  const double s_first = t.anchors_s_.front();
  const double s_last = t.anchors_s_.back();

  if (dom.lo == 0.0) {
    const CoefficientPiece& p0 = piece_for_cell(0);
    if (p0.gamma > 0.0 && scale_lower_limit_at_zero_infinite(p0)) {
      t.s0_ = -kInf;
    } else {
      const auto q =
          num::integrate_singular_lower(dens, 0.0, first_anchor, 1e-11);
      t.s0_ = s_first - q.value;
      if (!q.converged) {
        t.fallback_ = true;
        t.notes_.push_back("lower limit integral converged slowly");
      }
    }
  } else if (std::isfinite(dom.lo)) {
    const auto q =
        num::integrate_singular_lower(dens, dom.lo, first_anchor, 1e-11);
    t.s0_ = s_first - q.value;
  } else {
    CoefficientPiece mirrored = piece_for_cell(0);
    mirrored.a = -mirrored.a;  // x -> -x maps the leftmost tail to +inf
    if (scale_upper_limit_infinite(mirrored)) {
      t.s0_ = -kInf;
    } else {
      const auto q = num::integrate_tail_upper(
          [&](double u) { return t.density(-u); }, -first_anchor);
      t.s0_ = s_first - q.value;
      t.fallback_ = true;
      if (!q.converged)
        t.notes_.push_back("lower tail cutoff not fully converged");
    }
  }

  if (std::isfinite(dom.hi)) {
    const auto q =
        num::integrate_singular_upper(dens, last_anchor, dom.hi, 1e-11);
    t.sinf_ = s_last + q.value;
  } else {
    const CoefficientPiece& plast = piece_for_cell(n_cells - 1);
    if (scale_upper_limit_infinite(plast)) {
      t.sinf_ = kInf;
    } else if (plast.gamma == 0.5 && plast.b == 0.0) {
      // pure power tail s = C x^{-p}, p = 2a/sigma^2 > 1: exact tail value
      const double p = 2.0 * plast.a / (plast.sigma * plast.sigma);
      t.sinf_ = s_last + t.density(last_anchor) * last_anchor / (p - 1.0);
    } else {
      const auto q = num::integrate_tail_upper(dens, last_anchor);
      t.sinf_ = s_last + q.value;
      t.fallback_ = true;
      if (!q.converged)
        t.notes_.push_back("upper tail cutoff not fully converged");
    }
  }

  const bool lo_inf = !std::isfinite(t.s0_);
  const bool hi_inf = !std::isfinite(t.sinf_);
  t.case_ = lo_inf ? (hi_inf ? ScaleCase::s1 : ScaleCase::s2)
                   : (hi_inf ? ScaleCase::s3 : ScaleCase::s4);
  return t;
}

double inverse_scale(const ScaleTransform& t, double y) { return t.inverse(y); }

// ---------------------------------------------------------------------------
// Skew transform
// ---------------------------------------------------------------------------

SkewTransform build_skew_transform(const SingularMeasure& measure,
                                   double xstar) {
  SkewTransform t;
  t.xstar_ = xstar;
  const std::size_t m = measure.atoms.size();
  t.nodes_x_.reserve(m);
  for (const auto& a : measure.atoms) {
    if (!(std::abs(a.beta) < 1.0))
      throw std::invalid_argument("build_skew_transform: |beta| must be < 1");
    t.nodes_x_.push_back(a.x);
  }
  t.slopes_.assign(m + 1, 1.0);

  // Interval containing xstar has slope 1; crossing atom a rightward
  // multiplies the slope by (1 - beta_a) / (1 + beta_a).
  std::size_t star_iv = 0;
  while (star_iv < m && xstar >= t.nodes_x_[star_iv]) ++star_iv;
  for (std::size_t j = star_iv; j < m; ++j) {
    const double q =
        (1.0 - measure.atoms[j].beta) / (1.0 + measure.atoms[j].beta);
    t.slopes_[j + 1] = t.slopes_[j] * q;
  }
  for (std::size_t j = star_iv; j > 0; --j) {
    const double q =
        (1.0 - measure.atoms[j - 1].beta) / (1.0 + measure.atoms[j - 1].beta);
    t.slopes_[j - 1] = t.slopes_[j] / q;
  }

  // Phi at the atom locations, anchored at Phi(xstar) = 0.
  t.nodes_y_.assign(m, 0.0);
  if (m > 0) {
    if (star_iv < m) {
      t.nodes_y_[star_iv] = (t.nodes_x_[star_iv] - xstar) * t.slopes_[star_iv];
      for (std::size_t j = star_iv + 1; j < m; ++j)
        t.nodes_y_[j] = t.nodes_y_[j - 1] +
                        (t.nodes_x_[j] - t.nodes_x_[j - 1]) * t.slopes_[j];
    }
    for (std::size_t j = star_iv; j > 0; --j) {
      const double upper_x = j == star_iv ? xstar : t.nodes_x_[j];
      const double upper_y = j == star_iv ? 0.0 : t.nodes_y_[j];
      t.nodes_y_[j - 1] = upper_y - (upper_x - t.nodes_x_[j - 1]) * t.slopes_[j];
    }
  }
  t.range_j_ = Interval{-kInf, kInf, false, false};
  return t;
}

double SkewTransform::g(double x) const {
  const std::size_t j =
      std::upper_bound(nodes_x_.begin(), nodes_x_.end(), x) - nodes_x_.begin();
  return slopes_[j];
}

double SkewTransform::phi(double x) const {
  if (nodes_x_.empty()) return x - xstar_;
  const std::size_t j =
      std::upper_bound(nodes_x_.begin(), nodes_x_.end(), x) - nodes_x_.begin();
  if (j == 0) return nodes_y_[0] + (x - nodes_x_[0]) * slopes_[0];
  return nodes_y_[j - 1] + (x - nodes_x_[j - 1]) * slopes_[j];
}

double SkewTransform::psi(double y) const {
  if (nodes_x_.empty()) return xstar_ + y;
  const std::size_t j =
      std::upper_bound(nodes_y_.begin(), nodes_y_.end(), y) - nodes_y_.begin();
  if (j == 0) return nodes_x_[0] + (y - nodes_y_[0]) / slopes_[0];
  return nodes_x_[j - 1] + (y - nodes_y_[j - 1]) / slopes_[j];
}

// ---------------------------------------------------------------------------
// Hypothesis T checks
// ---------------------------------------------------------------------------

ValidationReport check_hypothesis_T(const PiecewiseCoefficients& coeffs,
                                    double theta) {
  const auto it =
      std::find(coeffs.breakpoints.begin(), coeffs.breakpoints.end(), theta);
  if (it == coeffs.breakpoints.end())
    throw std::invalid_argument(
        "check_hypothesis_T: theta is not a breakpoint");

  ValidationReport rep;
  const CoefficientPiece& right = coeffs.piece_at(theta);
  const CoefficientPiece& left = coeffs.piece_at(std::nextafter(theta, -kInf));

  // (T1) ellipticity on a strip around theta
  bool t1 = left.sigma > 0.0 && right.sigma > 0.0;
  if (theta == 0.0 && (left.gamma > 0.0 || right.gamma > 0.0)) t1 = false;
  if (!t1)
    rep.error("T1_ELLIPTICITY",
              "diffusion is not bounded below by a positive constant on any "
              "strip around the threshold",
              theta);

  // (T2) controlled jump: one-sided limits of the power family exist and are
  // finite, so a bounded increasing step function controls the jump.
  if (t1) {
    if (left == right)
      rep.warn("T2_MAGNITUDE_AMBIGUITY",
               "no jump at the declared threshold: the magnitude formulation "
               "cannot rule out a signed-diffusion reading",
               theta);
  } else {
    rep.error("T2_JUMP",
              "controlled-jump condition not established without strip "
              "ellipticity",
              theta);
  }

  // (T3) per-region regularity on I1 = (-inf, theta), I2 = [theta, +inf)
  const auto check_region = [&](bool left_region) {
    const double lo = left_region ? -kInf : theta;
    const double hi = left_region ? theta : kInf;
    bool region_elliptic = true;
    bool interior_jump = false;
    for (std::size_t i = 0; i + 1 < coeffs.pieces.size(); ++i) {
      const double bp = coeffs.breakpoints[i];
      if (bp <= lo || bp >= hi || bp == theta) continue;
      if (!(coeffs.pieces[i] == coeffs.pieces[i + 1])) interior_jump = true;
    }
    for (std::size_t i = 0; i < coeffs.pieces.size(); ++i) {
      const double plo = i == 0 ? -kInf : coeffs.breakpoints[i - 1];
      const double phi = i < coeffs.breakpoints.size() ? coeffs.breakpoints[i]
                                                       : kInf;
      const double clo = std::max(plo, lo), chi = std::min(phi, hi);
      if (chi < clo) continue;
      const auto& p = coeffs.pieces[i];
      if (p.sigma == 0.0) region_elliptic = false;
      if (p.gamma > 0.0 && clo <= 0.0 && 0.0 <= chi) region_elliptic = false;
    }
    const bool zero_inside = lo < 0.0 && 0.0 < hi;
    if (zero_inside) {
      const CoefficientPiece& at0 = coeffs.piece_at(0.0);
      const CoefficientPiece& before0 =
          coeffs.piece_at(std::nextafter(0.0, -kInf));
      const bool holder_ok =
          (at0.gamma == 0.0 || at0.gamma >= 0.5) &&
          (before0.gamma == 0.0 || before0.gamma >= 0.5);
      if (!holder_ok)
        rep.error("T3_REGULARITY",
                  "diffusion exponent in (0, 1/2) at its vanishing point "
                  "breaks the Hoelder-1/2 modulus",
                  0.0);
      if (interior_jump && !region_elliptic)
        rep.error("T3_REGULARITY",
                  "region mixes an interior jump with a vanishing diffusion",
                  theta);
    } else if (interior_jump && !region_elliptic) {
      rep.error("T3_REGULARITY",
                "interior jump requires the region diffusion to be bounded "
                "below",
                theta);
    }
  };
  check_region(true);
  check_region(false);
  return rep;
}

// ---------------------------------------------------------------------------
// Verdict engine
// ---------------------------------------------------------------------------

std::optional<TcklsParams> match_tckls(const GeneralizedSde& sde) {
  const auto& c = sde.coeffs;
  if (c.breakpoints.size() != 1 || c.pieces.size() != 2) return std::nullopt;
  const double theta = c.breakpoints[0];
  if (!(theta > 0.0)) return std::nullopt;
  const auto& lo = c.pieces[0];
  const auto& hi = c.pieces[1];
  if (!(lo.a > 0.0 && lo.sigma > 0.0 && hi.sigma > 0.0)) return std::nullopt;
  if (!(lo.gamma >= 0.5 && lo.gamma <= 1.0)) return std::nullopt;
  if (!(hi.gamma >= 0.0 && hi.gamma <= 1.0)) return std::nullopt;
  if (!(sde.state_space.lo == 0.0 && sde.state_space.hi == kInf))
    return std::nullopt;
  if (!(sde.x0 > 0.0)) return std::nullopt;

  TcklsParams p;
  p.theta = theta;
  p.a_minus = lo.a;
  p.b_minus = lo.b;
  p.sigma_minus = lo.sigma;
  p.gamma_minus = lo.gamma;
  p.a_plus = hi.a;
  p.b_plus = hi.b;
  p.sigma_plus = hi.sigma;
  p.gamma_plus = hi.gamma;

  if (sde.measure.atoms.size() > 1) return std::nullopt;
  if (sde.measure.atoms.size() == 1) {
    if (sde.measure.atoms[0].x != theta) return std::nullopt;
    p.beta = sde.measure.atoms[0].beta;
  }
  if (sde.sticky.points.size() > 1) return std::nullopt;
  if (sde.sticky.points.size() == 1) {
    if (sde.sticky.points[0].theta != theta) return std::nullopt;
    p.kappa = sde.sticky.points[0].kappa;
  }
  return p;
}

namespace {

bool has_redundant_breakpoint(const PiecewiseCoefficients& c) {
  for (std::size_t i = 0; i + 1 < c.pieces.size(); ++i)
    if (c.pieces[i] == c.pieces[i + 1]) return true;
  return false;
}

bool driftless(const PiecewiseCoefficients& c) {
  for (const auto& p : c.pieces)
    if (p.a != 0.0 || p.b != 0.0) return false;
  return true;
}

bool elliptic_on(const PiecewiseCoefficients& c, const Interval& dom) {
  for (std::size_t i = 0; i < c.pieces.size(); ++i) {
    const double plo = i == 0 ? -kInf : c.breakpoints[i - 1];
    const double phi = i < c.breakpoints.size() ? c.breakpoints[i] : kInf;
    const double lo = std::max(plo, dom.lo);
    const double hi = std::min(phi, dom.hi);
    if (hi < lo) continue;
    const auto& p = c.pieces[i];
    if (p.sigma == 0.0) return false;
    if (p.gamma > 0.0 && lo <= 0.0 && 0.0 <= hi) return false;
  }
  return true;
}

bool holder_half_at_zero(const PiecewiseCoefficients& c, const Interval& dom) {
  if (!(dom.lo <= 0.0 && 0.0 <= dom.hi)) return true;
  const auto& right = c.piece_at(0.0);
  if (!(right.gamma == 0.0 || right.gamma >= 0.5)) return false;
  if (dom.lo < 0.0) {
    const auto& left = c.piece_at(std::nextafter(0.0, -kInf));
    if (!(left.gamma == 0.0 || left.gamma >= 0.5)) return false;
  }
  return true;
}

Existence min_existence(Existence a, Existence b) {
  return static_cast<int>(a) < static_cast<int>(b) ? a : b;
}
UniquenessKind min_uniqueness(UniquenessKind a, UniquenessKind b) {
  return static_cast<int>(a) < static_cast<int>(b) ? a : b;
}

}  // namespace

Verdict wellposedness_verdict(const GeneralizedSde& sde,
                              const std::optional<PastingPlan>& plan) {
  Verdict v;
  v.state_space = sde.state_space;

  const ValidationReport val = validate(sde);
  if (!val.ok()) {
    AppliedResult r{"validation", {}};
    for (const auto& f : val.findings)
      if (f.severity == Severity::error)
        r.trace.push_back(f.code + ": " + f.message);
    v.applied_results.push_back(std::move(r));
    return v;  // unknown
  }

  // (i) threshold CKLS family with optional skew atom / sticky point.
  if (const auto p = match_tckls(sde)) {
    AppliedResult r{"tckls-family", {}};
    r.trace.push_back("matched threshold CKLS family at theta=" +
                      std::to_string(p->theta));
    if (p->kappa > 0.0) {
      r.trace.push_back("sticky point (kappa > 0): no strong solution");
      v.existence = Existence::weak;
      v.uniqueness = UniquenessKind::in_law;
    } else {
      r.trace.push_back(
          "kappa = 0: pathwise uniqueness transfers through the pasting "
          "construction");
      v.existence = Existence::strong;
      v.uniqueness = UniquenessKind::pathwise;
    }
    const bool reflecting =
        p->gamma_minus == 0.5 &&
        p->sigma_minus * p->sigma_minus > 2.0 * p->a_minus;
    v.boundary_at_zero =
        reflecting ? BoundaryAtZero::reflecting : BoundaryAtZero::unreachable;
    r.trace.push_back(reflecting
                          ? "0 attainable (gamma-=1/2, sigma-^2 > 2a-): "
                            "instantaneously reflecting boundary"
                          : "0 unattainable");
    v.applied_results.push_back(std::move(r));
    return v;
  }

  // (ii) pasting plan: propagate the weaker of the regime verdicts.
  if (plan) {
    const ValidationReport comp = check_compatibility(*plan);
    AppliedResult r{"pasting", {}};
    if (!comp.ok()) {
      for (const auto& f : comp.findings)
        if (f.severity == Severity::error)
          r.trace.push_back(f.code + ": " + f.message);
      v.applied_results.push_back(std::move(r));
      return v;
    }
    const Verdict vm = wellposedness_verdict(plan->regime_minus);
    const Verdict vp = wellposedness_verdict(plan->regime_plus);
    if (vm.unknown() || vp.unknown()) {
      r.trace.push_back("a regime verdict is UNKNOWN; nothing to propagate");
      v.applied_results.push_back(std::move(r));
      return v;
    }
    v.existence = min_existence(vm.existence, vp.existence);
    v.uniqueness = min_uniqueness(vm.uniqueness, vp.uniqueness);
    v.state_space = pasted_state_space(*plan);
    r.trace.push_back(std::string("compatibility verified; regimes carry (") +
                      to_string(vm.existence) + "," + to_string(vm.uniqueness) +
                      ") and (" + to_string(vp.existence) + "," +
                      to_string(vp.uniqueness) + ")");
    r.tag =
        v.existence == Existence::strong ? "pasting-strong" : "pasting-weak";
    v.applied_results.push_back(std::move(r));
    return v;
  }

  // (iii) single-SDE routes.
  if (!sde.sticky.empty()) {
    AppliedResult r{"sticky-weak", {}};
    bool ok = elliptic_on(sde.coeffs, sde.state_space);
    for (const auto& s : sde.sticky.points)
      if (!(eval_diffusion(sde.coeffs, s.theta) > 0.0)) ok = false;
    if (!ok) {
      r.tag = "unknown";
      r.trace.push_back(
          "sticky SDE without strip ellipticity: no cited result applies");
      v.applied_results.push_back(std::move(r));
      return v;
    }
    r.trace.push_back(
        "elliptic diffusion with sticky interface(s): weak existence and "
        "uniqueness in law; stickiness excludes a strong solution");
    v.existence = Existence::weak;
    v.uniqueness = UniquenessKind::in_law;
    v.applied_results.push_back(std::move(r));
    return v;
  }

  const bool ambiguous = has_redundant_breakpoint(sde.coeffs);

  if (driftless(sde.coeffs)) {
    const EsClassification es = classify_es(sde);
    AppliedResult r{"engelbert-schmidt", {}};
    r.trace.push_back(std::string("case ") + to_string(es.es_case));
    for (const auto& n : es.notes) r.trace.push_back(n);
    if (es.es_case == EsCase::undefined) {
      r.tag = "unknown";
      v.applied_results.push_back(std::move(r));
      return v;
    }
    v.existence = Existence::weak;
    v.uniqueness = UniquenessKind::in_law;
    if (es.es_case == EsCase::es3 || es.es_case == EsCase::es4)
      r.trace.push_back(
          "uniqueness in law holds among fundamental solutions; "
          "non-fundamental solutions are not excluded");
    v.applied_results.push_back(std::move(r));

    bool upgrade =
        !ambiguous && holder_half_at_zero(sde.coeffs, sde.state_space);
    for (double bp : sde.coeffs.breakpoints)
      if (upgrade && !check_hypothesis_T(sde.coeffs, bp).ok()) upgrade = false;
    for (const auto& a : sde.measure.atoms)
      if (eval_diffusion(sde.coeffs, a.x) == 0.0) upgrade = false;
    if (upgrade) {
      AppliedResult u{"threshold-pathwise-uniqueness", {}};
      u.trace.push_back(
          "threshold regularity and Hoelder-1/2 modulus verified; pathwise "
          "uniqueness upgrades the verdict");
      if (!sde.measure.atoms.empty())
        u.trace.push_back(
            "atoms removed by the skew transform before applying the "
            "driftless criterion");
      v.existence = Existence::strong;
      v.uniqueness = UniquenessKind::pathwise;
      v.applied_results.push_back(std::move(u));
    } else if (ambiguous) {
      AppliedResult u{"withheld-upgrade", {}};
      u.trace.push_back(
          "declared threshold with identical pieces: a signed-diffusion "
          "reading cannot be ruled out, pathwise uniqueness not granted");
      v.applied_results.push_back(std::move(u));
    }
    return v;
  }

  // drifted, non-sticky
  if (sde.coeffs.breakpoints.empty() && sde.measure.atoms.empty()) {
    const auto& p = sde.coeffs.pieces[0];
    if (p.gamma == 0.0 || (p.gamma >= 0.5 && p.gamma <= 1.0)) {
      AppliedResult r{"yamada-watanabe", {}};
      r.trace.push_back(
          "affine drift with Hoelder-1/2 (or better) power diffusion: strong "
          "existence and pathwise uniqueness");
      v.existence = Existence::strong;
      v.uniqueness = UniquenessKind::pathwise;
      v.applied_results.push_back(std::move(r));
      return v;
    }
    AppliedResult r{"unknown", {}};
    r.trace.push_back(
        "diffusion exponent in (0, 1/2): no cited uniqueness result applies");
    v.applied_results.push_back(std::move(r));
    return v;
  }

  if (elliptic_on(sde.coeffs, sde.state_space) && !ambiguous) {
    bool t_ok = true;
    AppliedResult r{"threshold-pathwise-uniqueness", {}};
    for (double bp : sde.coeffs.breakpoints) {
      const auto rep = check_hypothesis_T(sde.coeffs, bp);
      if (!rep.ok()) {
        t_ok = false;
        for (const auto& f : rep.findings)
          if (f.severity == Severity::error)
            r.trace.push_back(f.code + " at breakpoint " + std::to_string(bp));
      }
    }
    if (t_ok) {
      r.trace.push_back(
          "elliptic piecewise coefficients with controlled jumps: strong "
          "existence and pathwise uniqueness");
      if (!sde.measure.atoms.empty())
        r.trace.push_back("skew atoms handled by the removal transform");
      v.existence = Existence::strong;
      v.uniqueness = UniquenessKind::pathwise;
      v.applied_results.push_back(std::move(r));
      return v;
    }
    r.tag = "unknown";
    v.applied_results.push_back(std::move(r));
    return v;
  }

  AppliedResult r{"unknown", {}};
  r.trace.push_back(ambiguous
                        ? "declared threshold with identical pieces: verdict "
                          "withheld (signed-diffusion ambiguity)"
                        : "degenerate diffusion with drift outside the "
                          "threshold CKLS family: no cited result applies");
  v.applied_results.push_back(std::move(r));
  return v;
}

}  // namespace ssde
