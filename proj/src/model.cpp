#include "ssde/model.hpp"

#include <algorithm>
#include <cmath>

namespace ssde {

std::size_t PiecewiseCoefficients::piece_index(double x) const {
  // Right-closed convention: at x == theta_i the piece on the right owns x.
  const auto it =
      std::upper_bound(breakpoints.begin(), breakpoints.end(), x,
                       [](double v, double bp) { return v < bp; });
  return static_cast<std::size_t>(it - breakpoints.begin());
}

double eval_drift(const PiecewiseCoefficients& coeffs, double x) {
  const CoefficientPiece& p = coeffs.piece_at(x);
  return p.a - p.b * x;
}

double eval_diffusion(const PiecewiseCoefficients& coeffs, double x) {
  return piece_diffusion(coeffs.piece_at(x), x);
}

bool SingularMeasure::has_atom_at(double x) const {
  for (const auto& a : atoms)
    if (a.x == x) return true;
  return false;
}

namespace {

void validate_coeffs(const PiecewiseCoefficients& c, ValidationReport& rep) {
  if (c.pieces.size() != c.breakpoints.size() + 1) {
    rep.error("PIECE_COUNT",
              "pieces list must have exactly one more entry than breakpoints");
    return;
  }
  for (std::size_t i = 1; i < c.breakpoints.size(); ++i) {
    if (!(c.breakpoints[i - 1] < c.breakpoints[i]))
      rep.error("UNSORTED_BREAKPOINTS",
                "breakpoints must be strictly increasing", c.breakpoints[i]);
  }
  for (std::size_t i = 0; i < c.pieces.size(); ++i) {
    const auto& p = c.pieces[i];
    if (!(p.sigma >= 0.0))
      rep.error("SIGMA_NEGATIVE", "sigma must be >= 0 per piece", p.sigma);
    if (!(p.gamma >= 0.0 && p.gamma <= 1.0))
      rep.error("GAMMA_OUT_OF_RANGE", "gamma must lie in [0,1]", p.gamma);
    if (p.sigma == 0.0)
      rep.warn("SIGMA_ZERO_PIECE",
               "diffusion vanishes identically on a piece interior");
  }
}

}  // namespace

ValidationReport validate(const GeneralizedSde& sde) {
  ValidationReport rep;
  validate_coeffs(sde.coeffs, rep);

  for (std::size_t i = 0; i < sde.measure.atoms.size(); ++i) {
    const Atom& a = sde.measure.atoms[i];
    if (!(std::abs(a.beta) < 1.0))
      rep.error("BETA_OUT_OF_RANGE", "atom weight must satisfy |beta| < 1",
                a.x);
    if (i > 0 && !(sde.measure.atoms[i - 1].x < a.x))
      rep.error("UNSORTED_ATOMS", "atom locations must be strictly increasing",
                a.x);
    if (!sde.state_space.contains(a.x))
      rep.error("ATOM_OUTSIDE_STATE_SPACE",
                "atom location must lie inside the state space", a.x);
  }

  for (std::size_t i = 0; i < sde.sticky.points.size(); ++i) {
    const StickyPoint& s = sde.sticky.points[i];
    if (!(s.kappa >= 0.0))
      rep.error("KAPPA_NEGATIVE", "sticky kappa must be >= 0", s.theta);
    if (i > 0 && !(sde.sticky.points[i - 1].theta < s.theta))
      rep.error("UNSORTED_STICKY",
                "sticky locations must be strictly increasing", s.theta);
    if (sde.measure.has_atom_at(s.theta))
      rep.error("STICKY_ATOM_COLLISION",
                "sticky point coincides with a measure atom", s.theta);
    if (!sde.state_space.contains(s.theta))
      rep.error("STICKY_OUTSIDE_STATE_SPACE",
                "sticky point must lie inside the state space", s.theta);
  }

  if (!sde.state_space.interior_contains(sde.x0))
    rep.error("X0_OUTSIDE_INTERIOR",
              "initial condition must lie in the interior of the state space",
              sde.x0);
  return rep;
}

namespace {

// Breakpoint/parameter description of a piecewise family restricted to an
// open interval (lo, hi): boundaries inside the strip plus per-cell pieces.
struct Restriction {
  std::vector<double> cuts;                  // interior breakpoints
  std::vector<CoefficientPiece> cells;       // cuts.size() + 1 entries
};

Restriction restrict_coeffs(const PiecewiseCoefficients& c, double lo,
                            double hi) {
  Restriction r;
  for (double bp : c.breakpoints)
    if (bp > lo && bp < hi) r.cuts.push_back(bp);
  double probe = lo;
  for (std::size_t i = 0; i <= r.cuts.size(); ++i) {
    const double right = i < r.cuts.size() ? r.cuts[i] : hi;
    const double mid = 0.5 * (probe + right);
    r.cells.push_back(c.piece_at(mid));
    probe = right;
  }
  return r;
}

std::vector<Atom> restrict_atoms(const SingularMeasure& m, double lo,
                                 double hi) {
  std::vector<Atom> out;
  for (const auto& a : m.atoms)
    if (a.x > lo && a.x < hi) out.push_back(a);
  return out;
}

}  // namespace

ValidationReport check_compatibility(const PastingPlan& plan) {
  ValidationReport rep;
  if (!(plan.epsilon > 0.0)) {
    rep.error("EPSILON_NONPOSITIVE", "pasting strip half-width must be > 0");
    return rep;
  }
  const double lo = plan.vartheta - plan.epsilon;
  const double hi = plan.vartheta + plan.epsilon;

  const Interval& im = plan.regime_minus.state_space;
  const Interval& ip = plan.regime_plus.state_space;
  if (!(im.lo <= lo && hi <= im.hi && ip.lo <= lo && hi <= ip.hi))
    rep.error("STRIP_OUTSIDE_STATE_SPACES",
              "(vartheta-epsilon, vartheta+epsilon) must lie in both state "
              "spaces",
              plan.vartheta);

  const Restriction rm = restrict_coeffs(plan.regime_minus.coeffs, lo, hi);
  const Restriction rp = restrict_coeffs(plan.regime_plus.coeffs, lo, hi);
  if (rm.cuts != rp.cuts) {
    rep.error("COEFF_MISMATCH",
              "regime breakpoints differ inside the compatibility strip",
              plan.vartheta);
  } else {
    for (std::size_t i = 0; i < rm.cells.size(); ++i) {
      if (!(rm.cells[i] == rp.cells[i])) {
        const double where =
            i < rm.cuts.size() ? rm.cuts[i] : plan.vartheta;
        rep.error("COEFF_MISMATCH",
                  "regime coefficients differ on the compatibility strip",
                  where);
      }
    }
  }

  const auto am = restrict_atoms(plan.regime_minus.measure, lo, hi);
  const auto ap = restrict_atoms(plan.regime_plus.measure, lo, hi);
  if (am != ap)
    rep.error("MEASURE_MISMATCH",
              "measure atoms differ inside the compatibility strip",
              plan.vartheta);

  for (const auto& s : plan.regime_minus.sticky.points)
    if (s.theta > lo && s.theta < hi)
      rep.error("STICKY_IN_STRIP",
                "sticky point lies inside the compatibility strip", s.theta);
  for (const auto& s : plan.regime_plus.sticky.points)
    if (s.theta > lo && s.theta < hi)
      rep.error("STICKY_IN_STRIP",
                "sticky point lies inside the compatibility strip", s.theta);

  if (pasted_state_space(plan).is_empty())
    rep.error("EMPTY_PASTED_SPACE", "pasted state space is empty");
  return rep;
}

Interval pasted_state_space(const PastingPlan& plan) {
  // I := (I+ \cap (vartheta-eps, +inf)) U (I- \cap (-inf, vartheta+eps))
  const Interval& im = plan.regime_minus.state_space;
  const Interval& ip = plan.regime_plus.state_space;
  const double lo_strip = plan.vartheta - plan.epsilon;
  const double hi_strip = plan.vartheta + plan.epsilon;

  Interval upper{std::max(ip.lo, lo_strip), ip.hi,
                 ip.lo > lo_strip ? ip.lo_closed : false, ip.hi_closed};
  Interval lower{im.lo, std::min(im.hi, hi_strip), im.lo_closed,
                 im.hi < hi_strip ? im.hi_closed : false};
  // The two halves overlap on the strip, so the union is one interval.
  Interval out;
  out.lo = std::min(lower.lo, upper.lo);
  out.hi = std::max(lower.hi, upper.hi);
  out.lo_closed = lower.lo <= upper.lo ? lower.lo_closed : upper.lo_closed;
  out.hi_closed = upper.hi >= lower.hi ? upper.hi_closed : lower.hi_closed;
  return out;
}

GeneralizedSde pasted_sde(const PastingPlan& plan, double x0) {
  GeneralizedSde out;
  out.x0 = x0;
  out.state_space = pasted_state_space(plan);

  const PiecewiseCoefficients& cm = plan.regime_minus.coeffs;
  const PiecewiseCoefficients& cp = plan.regime_plus.coeffs;
  PiecewiseCoefficients merged;
  for (std::size_t i = 0; i < cm.breakpoints.size(); ++i) {
    if (cm.breakpoints[i] < plan.vartheta) {
      merged.breakpoints.push_back(cm.breakpoints[i]);
      merged.pieces.push_back(cm.pieces[i]);
    }
  }
  // piece reaching up to vartheta comes from the minus regime
  merged.pieces.push_back(cm.piece_at(
      std::nextafter(plan.vartheta, -std::numeric_limits<double>::infinity())));
  // swap in the plus regime from vartheta on
  merged.breakpoints.push_back(plan.vartheta);
  merged.pieces.push_back(cp.piece_at(plan.vartheta));
  for (std::size_t i = 0; i < cp.breakpoints.size(); ++i) {
    if (cp.breakpoints[i] > plan.vartheta) {
      merged.breakpoints.push_back(cp.breakpoints[i]);
      merged.pieces.push_back(cp.pieces[i + 1]);
    }
  }
  out.coeffs = std::move(merged);

  for (const auto& a : plan.regime_minus.measure.atoms)
    if (a.x < plan.vartheta) out.measure.atoms.push_back(a);
  for (const auto& a : plan.regime_plus.measure.atoms)
    if (a.x >= plan.vartheta) out.measure.atoms.push_back(a);

  for (const auto& s : plan.regime_minus.sticky.points)
    if (s.theta < plan.vartheta) out.sticky.points.push_back(s);
  for (const auto& s : plan.regime_plus.sticky.points)
    if (s.theta >= plan.vartheta) out.sticky.points.push_back(s);
  return out;
}

}  // namespace ssde
