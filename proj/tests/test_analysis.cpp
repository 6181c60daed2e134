#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ssde/analysis.hpp"
#include "ssde/numerics.hpp"

using namespace ssde;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

GeneralizedSde make_sde(PiecewiseCoefficients c, Interval space, double x0) {
  GeneralizedSde sde;
  sde.coeffs = std::move(c);
  sde.state_space = space;
  sde.x0 = x0;
  return sde;
}

GeneralizedSde tckls(double a_m, double b_m, double s_m, double g_m,
                     double a_p, double b_p, double s_p, double g_p,
                     double theta, double x0) {
  return make_sde({{theta}, {{a_m, b_m, s_m, g_m}, {a_p, b_p, s_p, g_p}}},
                  {0.0, kInf, false, false}, x0);
}

// Divergence-test oracle: integrates 1/sigma^2 over (delta, eps) for a dyadic
// sequence of delta and classifies how the value grows.
enum class Divergence { convergent, logarithmic, power };

Divergence divergence_oracle(double gamma) {
  const auto inv_sq = [gamma](double x) { return std::pow(x, -2.0 * gamma); };
  double prev = num::integrate(inv_sq, 0.5, 1.0).value;
  std::vector<double> increments;
  double total = prev;
  double lo = 0.25;
  for (int k = 0; k < 20; ++k) {
    const double inc = num::integrate(inv_sq, lo, 2.0 * lo).value;
    increments.push_back(inc);
    total += inc;
    lo *= 0.5;
  }
  const double tail_ratio = increments.back() / increments[increments.size() - 2];
  if (tail_ratio > 1.2) return Divergence::power;        // increments grow
  if (tail_ratio > 0.8) return Divergence::logarithmic;  // increments level
  return Divergence::convergent;                         // increments vanish
}

}  // namespace

TEST_CASE("divergence oracle agrees with the exponent rule") {
  CHECK(divergence_oracle(0.75) == Divergence::power);
  CHECK(divergence_oracle(0.5) == Divergence::logarithmic);
  CHECK(divergence_oracle(0.25) == Divergence::convergent);
}

TEST_CASE("es classification golden catalog") {
  const Interval whole{-kInf, kInf, false, false};

  SUBCASE("sign SDE magnitude: ES1") {
    PiecewiseCoefficients sign{{0.0},
                               {{0, 0, 1, 0}, {0, 0, 1, 0}}};
    const auto es = classify_es(sign, whole);
    CHECK(es.es_case == EsCase::es1);
    CHECK(es.n_sigma.empty());
    CHECK(es.e_sigma.empty());
  }
  SUBCASE("|x|^{1/2}: ES3 (log-divergent boundary exponent)") {
    PiecewiseCoefficients c{{}, {{0, 0, 1, 0.5}}};
    const auto es = classify_es(c, whole);
    CHECK(es.es_case == EsCase::es3);
    CHECK(es.n_sigma == std::vector<double>{0.0});
    CHECK(es.e_sigma.empty());
    CHECK(!es.notes.empty());  // the boundary-case convention is recorded
  }
  SUBCASE("|x|^{3/4}: ES2") {
    PiecewiseCoefficients c{{}, {{0, 0, 1, 0.75}}};
    const auto es = classify_es(c, whole);
    CHECK(es.es_case == EsCase::es2);
    CHECK(es.n_sigma == std::vector<double>{0.0});
    CHECK(es.e_sigma == std::vector<double>{0.0});
  }
  SUBCASE("indicator diffusion via a sticky point: ES3 with caveat") {
    GeneralizedSde sde = make_sde({{}, {{0, 0, 1, 0}}}, whole, 0.5);
    sde.sticky.points = {{0.0, 1.0}};
    const auto es = classify_es(sde);
    CHECK(es.es_case == EsCase::es3);
    CHECK(es.n_sigma == std::vector<double>{0.0});
    bool caveat = false;
    for (const auto& n : es.notes)
      if (n.find("sticky") != std::string::npos) caveat = true;
    CHECK(caveat);
  }
  SUBCASE("mixed exponents across 0") {
    PiecewiseCoefficients c{{0.0}, {{0, 0, 1, 0.75}, {0, 0, 1, 0.5}}};
    const auto es = classify_es(c, whole);
    CHECK(es.es_case == EsCase::es2);  // left side power-divergent
  }
  SUBCASE("sigma vanishing on an interval is UNDEFINED") {
    PiecewiseCoefficients c{{0.0}, {{0, 0, 0, 0}, {0, 0, 1, 0}}};
    const auto es = classify_es(c, whole);
    CHECK(es.es_case == EsCase::undefined);
  }
  SUBCASE("domain excluding 0 sees no zero") {
    PiecewiseCoefficients c{{}, {{0, 0, 1, 0.5}}};
    const auto es = classify_es(c, Interval{0.0, kInf, false, false});
    CHECK(es.es_case == EsCase::es1);
  }
}

TEST_CASE("scale density closed forms against the explicit CIR law") {
  // CIR piece below theta: s(x) = theta^{2a/s^2} exp(-2 b theta / s^2)
  //                               x^{-2a/s^2} exp(2 b x / s^2)
  const double a = 0.3, b = 0.7, sig = 1.1, theta = 2.0;
  GeneralizedSde sde = tckls(a, b, sig, 0.5, 0.4, 0.2, 0.9, 0.5, theta, 1.0);
  const ScaleTransform t = build_scale(sde, theta);

  const double q = 2.0 * a / (sig * sig);
  const double w = 2.0 * b / (sig * sig);
  for (double x : {0.2, 0.5, 1.0, 1.5, 1.9}) {
    const double expected = std::pow(theta, q) * std::exp(-w * theta) *
                            std::pow(x, -q) * std::exp(w * x);
    CHECK(t.density(x) == doctest::Approx(expected).epsilon(1e-12));
  }

  // S by independent quadrature of the explicit density
  for (double x : {0.2, 0.7, 1.4, 5.0, 12.0}) {
    const auto oracle = num::integrate(
        [&](double y) { return t.density(y); }, theta, x, 1e-13);
    CHECK(t.value(x) == doctest::Approx(oracle.value).epsilon(1e-8));
  }
}

TEST_CASE("scale closed form matches quadrature on [theta/10, 10 theta]") {
  const double theta = 1.5;
  GeneralizedSde sde = tckls(1.0, 0.5, 1.0, 0.5, 0.8, 0.3, 1.2, 0.5, theta,
                             1.0);
  const ScaleTransform t = build_scale(sde, theta);
  // trapezoid oracle over the explicit density
  const auto simpson = [&](double lo, double hi) {
    const int n = 4000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x0 = lo + (hi - lo) * i / n;
      const double x1 = lo + (hi - lo) * (i + 1) / n;
      const double xm = 0.5 * (x0 + x1);
      acc += (hi - lo) / n / 6.0 *
             (t.density(x0) + 4.0 * t.density(xm) + t.density(x1));
    }
    return acc;
  };
  const double lo = theta / 10.0, hi = 10.0 * theta;
  const double s_lo = t.value(lo), s_hi = t.value(hi);
  CHECK(s_hi - s_lo == doctest::Approx(simpson(lo, hi)).epsilon(1e-8));
}

TEST_CASE("scale boundary limits for the CKLS family") {
  SUBCASE("CIR with sigma^2 <= 2a: S0 = -inf") {
    GeneralizedSde sde = tckls(1.0, 1.0, 1.0, 0.5, 0.5, 1.0, 1.0, 0.5, 2.0,
                               1.0);
    const ScaleTransform t = build_scale(sde, 2.0);
    CHECK(std::isinf(t.lower_limit()));
    CHECK(t.lower_limit() < 0.0);
  }
  SUBCASE("CIR with sigma^2 > 2a: S0 finite and strictly negative") {
    GeneralizedSde sde = tckls(0.3, 1.0, 1.0, 0.5, 0.5, 1.0, 1.0, 0.5, 2.0,
                               1.0);
    const ScaleTransform t = build_scale(sde, 2.0);
    CHECK(std::isfinite(t.lower_limit()));
    CHECK(t.lower_limit() < 0.0);
  }
  SUBCASE("gamma+ = 1/2 with b+ > 0: Sinf = +inf") {
    GeneralizedSde sde = tckls(1.0, 1.0, 1.0, 0.5, 0.5, 1.0, 1.0, 0.5, 2.0,
                               1.0);
    const ScaleTransform t = build_scale(sde, 2.0);
    CHECK(std::isinf(t.upper_limit()));
    CHECK(t.upper_limit() > 0.0);
  }
  SUBCASE("gamma- > 1/2: S0 = -inf regardless of a") {
    GeneralizedSde sde = tckls(0.1, 0.0, 1.0, 0.75, 0.5, 1.0, 1.0, 0.5, 2.0,
                               1.0);
    const ScaleTransform t = build_scale(sde, 2.0);
    CHECK(std::isinf(t.lower_limit()));
  }
  SUBCASE("mean-averting upper piece: Sinf finite") {
    // gamma+ = 1/2, b+ < 0 pushes outward, s decays, Sinf finite
    GeneralizedSde sde = tckls(0.3, 1.0, 1.0, 0.5, 0.5, -1.0, 1.0, 0.5, 2.0,
                               1.0);
    const ScaleTransform t = build_scale(sde, 2.0);
    CHECK(std::isfinite(t.upper_limit()));
    CHECK(t.scale_case() == ScaleCase::s4);
  }
}

TEST_CASE("scale case taxonomy") {
  // S1: OU on the whole line
  GeneralizedSde ou = make_sde({{}, {{0.0, 1.0, 1.0, 0.0}}},
                               {-kInf, kInf, false, false}, 0.0);
  CHECK(build_scale(ou, 0.0).scale_case() == ScaleCase::s1);

  // S3: attainable CIR with mean reversion
  GeneralizedSde cir = tckls(0.3, 1.0, 1.0, 0.5, 0.3, 1.0, 1.0, 0.5, 1.0,
                             0.5);
  CHECK(build_scale(cir, 1.0).scale_case() == ScaleCase::s3);
}

TEST_CASE("scale strict monotonicity and S(r) = 0") {
  GeneralizedSde sde = tckls(0.4, 0.6, 1.0, 0.5, 0.2, 0.4, 0.7, 0.0, 1.0,
                             0.5);
  const ScaleTransform t = build_scale(sde, 1.0);
  CHECK(t.value(1.0) == 0.0);
  double prev = -kInf;
  for (int i = 0; i < 1000; ++i) {
    const double x = 0.05 + (6.0 - 0.05) * i / 999.0;
    const double s = t.value(x);
    CHECK(s > prev);
    prev = s;
  }
}

TEST_CASE("speed density positive wherever sigma > 0") {
  GeneralizedSde sde = tckls(0.4, 0.6, 1.0, 0.5, 0.2, 0.4, 0.7, 0.0, 1.0,
                             0.5);
  const ScaleTransform t = build_scale(sde, 1.0);
  for (double x : {0.1, 0.5, 1.0, 2.0, 7.0})
    CHECK(t.speed_density(x) > 0.0);
}

TEST_CASE("inverse scale") {
  SUBCASE("y = 0 maps to the reference") {
    GeneralizedSde sde = tckls(0.4, 0.6, 1.0, 0.5, 0.2, 0.4, 0.7, 0.0, 1.0,
                               0.5);
    const ScaleTransform t = build_scale(sde, 1.0);
    CHECK(inverse_scale(t, 0.0) == 1.0);
  }
  SUBCASE("driftless unit diffusion: S is a shift") {
    GeneralizedSde sde = make_sde({{}, {{0, 0, 1, 0}}},
                                  {-kInf, kInf, false, false}, 0.3);
    const ScaleTransform t = build_scale(sde, 0.3);
    CHECK(t.value(1.8) == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(inverse_scale(t, 1.5) == doctest::Approx(1.8).epsilon(1e-12));
  }
  SUBCASE("OU round trip within 1e-10") {
    GeneralizedSde ou = make_sde({{}, {{0.0, 1.0, 1.0, 0.0}}},
                                 {-kInf, kInf, false, false}, 0.0);
    const ScaleTransform t = build_scale(ou, 0.0);
    for (double x : {-2.0, -1.0, 0.5, 3.0}) {
      const double rt = inverse_scale(t, t.value(x));
      CHECK(std::abs(rt - x) <= 1e-10 * std::max(1.0, std::abs(x)));
    }
  }
  SUBCASE("out of range throws") {
    GeneralizedSde sde = tckls(0.3, 1.0, 1.0, 0.5, 0.5, -1.0, 1.0, 0.5, 2.0,
                               1.0);
    const ScaleTransform t = build_scale(sde, 2.0);  // S4: both limits finite
    CHECK_THROWS_AS(inverse_scale(t, t.upper_limit() + 1.0),
                    std::out_of_range);
    CHECK(inverse_scale(t, t.lower_limit()) == 0.0);
  }
}

TEST_CASE("scale not defined across an interior degeneracy with drift") {
  GeneralizedSde sde = make_sde({{}, {{1.0, 0.0, 1.0, 0.5}}},
                                {-kInf, kInf, false, false}, 1.0);
  CHECK_THROWS_AS(build_scale(sde, 1.0), std::domain_error);
}

TEST_CASE("skew transform") {
  SUBCASE("no atoms: identity shift") {
    const SkewTransform t = build_skew_transform({}, 0.7);
    CHECK(t.phi(2.0) == doctest::Approx(1.3));
    CHECK(t.psi(1.3) == doctest::Approx(2.0));
    CHECK(t.g(0.0) == 1.0);
  }
  SUBCASE("single atom slope change") {
    SingularMeasure m{{{2.0, 0.5}}};
    const SkewTransform t = build_skew_transform(m, 0.0);
    CHECK(t.g(1.0) == 1.0);
    CHECK(t.g(2.0) == doctest::Approx((1.0 - 0.5) / (1.0 + 0.5)));
    CHECK(t.phi(2.0) == doctest::Approx(2.0));
    CHECK(t.phi(5.0) == doctest::Approx(2.0 + 3.0 / 3.0));
  }
  SUBCASE("two atoms give slopes 1, 1/3, 1") {
    SingularMeasure m{{{0.0, 0.5}, {1.0, -0.5}}};
    const SkewTransform t = build_skew_transform(m, -1.0);
    CHECK(t.g(-0.5) == doctest::Approx(1.0));
    CHECK(t.g(0.5) == doctest::Approx(1.0 / 3.0));
    CHECK(t.g(2.0) == doctest::Approx(1.0));
    // oracle: midpoint quadrature of the piecewise-constant g
    for (double x : {-0.8, 0.3, 0.99, 1.5, 4.0}) {
      const int n = 200000;
      double acc = 0.0;
      const double lo = -1.0;
      for (int i = 0; i < n; ++i)
        acc += t.g(lo + (x - lo) * (i + 0.5) / n) * (x - lo) / n;
      CHECK(t.phi(x) == doctest::Approx(acc).epsilon(1e-4));
    }
  }
  SUBCASE("g ratio across an atom is (1-beta)/(1+beta) exactly") {
    SingularMeasure m{{{0.3, 0.25}, {1.1, -0.6}, {2.0, 0.9}}};
    const SkewTransform t = build_skew_transform(m, 0.0);
    for (const auto& a : m.atoms) {
      const double before = t.g(std::nextafter(a.x, -kInf));
      const double after = t.g(a.x);
      CHECK(after / before ==
            doctest::Approx((1.0 - a.beta) / (1.0 + a.beta)).epsilon(1e-15));
    }
  }
  SUBCASE("round trip within 1e-10 relative") {
    SingularMeasure m{{{-1.0, -0.4}, {0.0, 0.6}, {0.5, 0.2}}};
    const SkewTransform t = build_skew_transform(m, 0.25);
    for (int i = 0; i <= 1000; ++i) {
      const double x = -5.0 + 10.0 * i / 1000.0;
      const double rt = t.psi(t.phi(x));
      CHECK(std::abs(rt - x) <= 1e-10 * std::max(1.0, std::abs(x)));
    }
  }
}

TEST_CASE("hypothesis T checks") {
  SUBCASE("threshold CKLS passes all clauses") {
    GeneralizedSde sde = tckls(1.0, 0.5, 1.0, 0.5, 0.4, 0.2, 0.8, 0.0, 2.0,
                               1.0);
    const auto rep = check_hypothesis_T(sde.coeffs, 2.0);
    CHECK(rep.ok());
  }
  SUBCASE("sign-SDE-style threshold passes T1/T2 with an ambiguity note") {
    PiecewiseCoefficients sign{{0.0}, {{0, 0, 1, 0}, {0, 0, 1, 0}}};
    const auto rep = check_hypothesis_T(sign, 0.0);
    CHECK(rep.ok());
    CHECK(rep.has("T2_MAGNITUDE_AMBIGUITY"));
  }
  SUBCASE("CIR with threshold at 0 fails ellipticity") {
    PiecewiseCoefficients c{{0.0}, {{1, 1, 1, 0.5}, {1, 1, 1, 0.5}}};
    const auto rep = check_hypothesis_T(c, 0.0);
    CHECK(!rep.ok());
    CHECK(rep.has("T1_ELLIPTICITY"));
  }
  SUBCASE("exponent below 1/2 at the vanishing point fails T3") {
    PiecewiseCoefficients c{{1.0}, {{0, 0, 1, 0.25}, {0, 0, 2, 0.25}}};
    const auto rep = check_hypothesis_T(c, 1.0);
    CHECK(rep.has("T3_REGULARITY"));
  }
  SUBCASE("theta must be a breakpoint") {
    PiecewiseCoefficients c{{1.0}, {{0, 0, 1, 0}, {0, 0, 2, 0}}};
    CHECK_THROWS_AS(check_hypothesis_T(c, 0.5), std::invalid_argument);
  }
}

TEST_CASE("verdict engine") {
  SUBCASE("threshold CKLS, kappa = 0: strong + pathwise") {
    GeneralizedSde sde = tckls(1.0, 0.5, 1.0, 0.5, 0.4, 0.2, 0.8, 0.0, 2.0,
                               1.0);
    const Verdict v = wellposedness_verdict(sde);
    CHECK(v.existence == Existence::strong);
    CHECK(v.uniqueness == UniquenessKind::pathwise);
  }
  SUBCASE("threshold CKLS, kappa > 0: weak + in law, never strong") {
    GeneralizedSde sde = tckls(1.0, 0.5, 1.0, 0.5, 0.4, 0.2, 0.8, 0.0, 2.0,
                               1.0);
    sde.sticky.points = {{2.0, 0.3}};
    const Verdict v = wellposedness_verdict(sde);
    CHECK(v.existence == Existence::weak);
    CHECK(v.uniqueness == UniquenessKind::in_law);
  }
  SUBCASE("boundary flag follows the attainability dichotomy") {
    GeneralizedSde attainable = tckls(0.3, 0.0, 1.0, 0.5, 0.3, 1.0, 1.0, 0.5,
                                      2.0, 1.0);
    CHECK(wellposedness_verdict(attainable).boundary_at_zero ==
          BoundaryAtZero::reflecting);
    GeneralizedSde unattainable = tckls(1.0, 0.0, 1.0, 0.5, 0.3, 1.0, 1.0,
                                        0.5, 2.0, 1.0);
    CHECK(wellposedness_verdict(unattainable).boundary_at_zero ==
          BoundaryAtZero::unreachable);
    GeneralizedSde high_exponent = tckls(0.1, 0.0, 1.0, 0.75, 0.3, 1.0, 1.0,
                                         0.5, 2.0, 1.0);
    CHECK(wellposedness_verdict(high_exponent).boundary_at_zero ==
          BoundaryAtZero::unreachable);
  }
  SUBCASE("monotonicity: removing stickiness never weakens the verdict") {
    GeneralizedSde sticky = tckls(1.0, 0.5, 1.0, 0.5, 0.4, 0.2, 0.8, 0.0, 2.0,
                                  1.0);
    sticky.sticky.points = {{2.0, 0.5}};
    GeneralizedSde plain = sticky;
    plain.sticky.points.clear();
    const Verdict vs = wellposedness_verdict(sticky);
    const Verdict vp = wellposedness_verdict(plain);
    CHECK(static_cast<int>(vp.existence) >= static_cast<int>(vs.existence));
    CHECK(static_cast<int>(vp.uniqueness) >= static_cast<int>(vs.uniqueness));
  }
  SUBCASE("sign-SDE input: weak + in law, pathwise withheld") {
    GeneralizedSde sign = make_sde(
        {{0.0}, {{0, 0, 1, 0}, {0, 0, 1, 0}}},
        {-kInf, kInf, false, false}, 0.1);
    const Verdict v = wellposedness_verdict(sign);
    CHECK(v.existence == Existence::weak);
    CHECK(v.uniqueness == UniquenessKind::in_law);
  }
  SUBCASE("plain Brownian motion: strong") {
    GeneralizedSde bm = make_sde({{}, {{0, 0, 1, 0}}},
                                 {-kInf, kInf, false, false}, 0.0);
    const Verdict v = wellposedness_verdict(bm);
    CHECK(v.existence == Existence::strong);
    CHECK(v.uniqueness == UniquenessKind::pathwise);
  }
  SUBCASE("driftless |x|^{3/4}: pathwise upgrade applies") {
    GeneralizedSde sde = make_sde({{}, {{0, 0, 1, 0.75}}},
                                  {-kInf, kInf, false, false}, 1.0);
    const Verdict v = wellposedness_verdict(sde);
    CHECK(v.existence == Existence::strong);
    CHECK(v.uniqueness == UniquenessKind::pathwise);
  }
  SUBCASE("skew Brownian motion: strong via the removal transform") {
    GeneralizedSde sde = make_sde({{}, {{0, 0, 1, 0}}},
                                  {-kInf, kInf, false, false}, 0.0);
    sde.measure.atoms = {{0.0, 0.6}};
    const Verdict v = wellposedness_verdict(sde);
    CHECK(v.existence == Existence::strong);
    CHECK(v.uniqueness == UniquenessKind::pathwise);
  }
  SUBCASE("degenerate drifted SDE outside the family: UNKNOWN") {
    GeneralizedSde sde = make_sde({{}, {{0.0, 1.0, 1.0, 0.25}}},
                                  {-kInf, kInf, false, false}, 1.0);
    const Verdict v = wellposedness_verdict(sde);
    CHECK(v.unknown());
  }
  SUBCASE("pure sticky Brownian motion: weak + in law") {
    GeneralizedSde sde = make_sde({{}, {{0, 0, 1, 0}}},
                                  {-kInf, kInf, false, false}, 0.5);
    sde.sticky.points = {{0.0, 2.0}};
    const Verdict v = wellposedness_verdict(sde);
    CHECK(v.existence == Existence::weak);
    CHECK(v.uniqueness == UniquenessKind::in_law);
  }
  SUBCASE("pasting plan propagation") {
    GeneralizedSde bm = make_sde({{}, {{1.0, 0, 1, 0}}},
                                 {-kInf, kInf, false, false}, 0.0);
    GeneralizedSde bm2 = make_sde({{}, {{1.0, 0, 1, 0}}},
                                  {-kInf, kInf, false, false}, 0.0);
    PastingPlan plan{bm, bm2, 0.0, 0.5};
    GeneralizedSde global = pasted_sde(plan, 0.0);
    const Verdict v = wellposedness_verdict(global, plan);
    CHECK(v.existence == Existence::strong);
    CHECK(v.uniqueness == UniquenessKind::pathwise);
  }
}
