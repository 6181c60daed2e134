#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ssde/noise.hpp"
#include "ssde/numerics.hpp"

using namespace ssde;

TEST_CASE("philox4x32-10 known-answer vectors") {
  // Published test vectors for the all-ones and pi-digit inputs.
  const auto ones = philox::block(
      {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
      {0xffffffffu, 0xffffffffu});
  CHECK(ones[0] == 0x408f276du);
  CHECK(ones[1] == 0x41c83b0eu);
  CHECK(ones[2] == 0xa20bc7c6u);
  CHECK(ones[3] == 0x6d5451fdu);

  const auto pi = philox::block(
      {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
      {0xa4093822u, 0x299f31d0u});
  CHECK(pi[0] == 0xd16cfe09u);
  CHECK(pi[1] == 0x94fdccebu);
  CHECK(pi[2] == 0x5001e420u);
  CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("noise determinism and stream separation") {
  const NoiseSource a(42, 7);
  const NoiseSource b(42, 7);
  const NoiseSource c(42, 8);
  CHECK(a.normal(3, 11) == b.normal(3, 11));
  CHECK(a.uniform(3, 11, 1) == b.uniform(3, 11, 1));
  CHECK(a.normal(3, 11) != c.normal(3, 11));
  // slot separation: uniforms differ from each other and stay in (0, 1]
  CHECK(a.uniform(3, 11, 1) != a.uniform(3, 11, 2));
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform(0, i, 1);
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("noise moments") {
  const NoiseSource n(123, 1);
  const long N = 400000;
  double sum = 0.0, sumsq = 0.0, lag = 0.0;
  double prev = 0.0;
  for (long i = 0; i < N; ++i) {
    const double z = n.normal(0, i);
    sum += z;
    sumsq += z * z;
    if (i > 0) lag += z * prev;
    prev = z;
  }
  const double mean = sum / N;
  const double var = sumsq / N - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(double(N)));
  CHECK(std::abs(var - 1.0) < 0.02);
  CHECK(std::abs(lag / N) < 4.0 / std::sqrt(double(N)));
}

TEST_CASE("gauss-kronrod basics") {
  const auto q1 = num::integrate([](double x) { return x * x; }, 0.0, 3.0);
  CHECK(q1.value == doctest::Approx(9.0).epsilon(1e-12));
  const auto q2 =
      num::integrate([](double x) { return std::exp(-x * x); }, -6.0, 6.0);
  CHECK(q2.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
  const auto q3 = num::integrate([](double x) { return std::sin(x); }, 0.0,
                                 M_PI, 1e-13);
  CHECK(q3.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("singular endpoint integration") {
  // int_0^1 x^{-1/2} dx = 2
  const auto q = num::integrate_singular_lower(
      [](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-11);
  CHECK(q.value == doctest::Approx(2.0).epsilon(1e-9));
  // int_0^1 x^{-0.8} dx = 5
  const auto q2 = num::integrate_singular_lower(
      [](double x) { return std::pow(x, -0.8); }, 0.0, 1.0, 1e-11);
  CHECK(q2.value == doctest::Approx(5.0).epsilon(1e-8));
  // mirrored singularity: accuracy limited by cancellation in 1 - (1 - u)
  const auto q3 = num::integrate_singular_upper(
      [](double x) { return 1.0 / std::sqrt(1.0 - x); }, 0.0, 1.0, 1e-11);
  CHECK(q3.value == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("tail integration with cutoff check") {
  const auto q = num::integrate_tail_upper(
      [](double x) { return std::exp(-x); }, 0.0);
  CHECK(q.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(q.converged);
}

TEST_CASE("brent root finding") {
  const double r = num::brent_root(
      [](double x) { return x * x * x - 2.0; }, 0.0, 2.0, 1e-15);
  CHECK(r == doctest::Approx(std::cbrt(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(num::brent_root([](double x) { return x * x + 1.0; }, -1.0,
                                  1.0),
                  std::invalid_argument);
}

TEST_CASE("normal quantile round trip") {
  for (double p : {1e-8, 1e-4, 0.025, 0.31, 0.5, 0.77, 0.975, 1.0 - 1e-6}) {
    const double x = num::normal_quantile(p);
    CHECK(num::normal_cdf(x) == doctest::Approx(p).epsilon(1e-10));
  }
}

TEST_CASE("kolmogorov survival function") {
  CHECK(num::kolmogorov_q(0.0) == doctest::Approx(1.0));
  // Q(1.36) ~ 0.049, the classical 5% critical value
  CHECK(num::kolmogorov_q(1.36) == doctest::Approx(0.0495).epsilon(0.02));
  CHECK(num::kolmogorov_q(10.0) < 1e-15);
}
