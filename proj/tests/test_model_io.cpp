#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ssde/model_io.hpp"

using namespace ssde;

TEST_CASE("minimal Brownian model parses and validates") {
  const std::string text = R"(
# driftless unit diffusion
[coefficients]
breakpoints = []
pieces = [{a = 0, b = 0, sigma = 1, gamma = 0}]

[init]
x0 = 0.0
)";
  ValidationReport rep;
  const auto parsed = parse_model(text, &rep);
  REQUIRE(std::holds_alternative<GeneralizedSde>(parsed));
  CHECK(rep.ok());
  const auto& sde = std::get<GeneralizedSde>(parsed);
  CHECK(sde.coeffs.pieces.size() == 1);
  CHECK(eval_diffusion(sde.coeffs, 3.0) == 1.0);
  CHECK(std::isinf(sde.state_space.lo));
}

TEST_CASE("full model with measure, sticky and bounds") {
  const std::string text = R"(
[coefficients]
breakpoints = [2.0]
pieces = [
  {a = 1.0, b = 0.5, sigma = 1.0, gamma = 0.5},
  {a = 0.4, b = 0.2, sigma = 0.8, gamma = 0.0},
]

[measure]
atoms = [{x = 2.0, beta = 0.4}]

[sticky]
points = []

[init]
x0 = 1.0
state_space = {lo = 0.0, hi = inf, lo_closed = false, hi_closed = false}
)";
  ValidationReport rep;
  const auto parsed = parse_model(text, &rep);
  REQUIRE(std::holds_alternative<GeneralizedSde>(parsed));
  CHECK(rep.ok());
  const auto& sde = std::get<GeneralizedSde>(parsed);
  CHECK(sde.measure.atoms.size() == 1);
  CHECK(sde.state_space.lo == 0.0);
  CHECK(std::isinf(sde.state_space.hi));
}

TEST_CASE("beta out of range surfaces as a validation finding") {
  const std::string text = R"(
[coefficients]
pieces = [{sigma = 1}]
[measure]
atoms = [{x = 0.0, beta = 1.0}]
[init]
x0 = 0.5
)";
  ValidationReport rep;
  const auto parsed = parse_model(text, &rep);
  REQUIRE(std::holds_alternative<GeneralizedSde>(parsed));
  CHECK(!rep.ok());
  CHECK(rep.has("BETA_OUT_OF_RANGE"));
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse_model("[coefficients\npieces = []"), ParseError);
  try {
    parse_model("key = @bad");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }
  CHECK_THROWS_AS(parse_model("[init]\nx0 = 1.0\n"), ParseError);  // no coeffs
}

TEST_CASE("pasting plan with inline regimes") {
  const std::string text = R"(
[pasting]
vartheta = 1.5
epsilon = 0.25

[pasting.regime_minus.coefficients]
breakpoints = [1.75]
pieces = [{a = 1, b = 0, sigma = 1, gamma = 0}, {a = -1, b = 0, sigma = 1, gamma = 0}]
[pasting.regime_minus.init]
x0 = 0.5

[pasting.regime_plus.coefficients]
breakpoints = [1.75]
pieces = [{a = 1, b = 0, sigma = 1, gamma = 0}, {a = -1, b = 0, sigma = 1, gamma = 0}]
[pasting.regime_plus.init]
x0 = 2.0
)";
  ValidationReport rep;
  const auto parsed = parse_model(text, &rep);
  REQUIRE(std::holds_alternative<PastingPlan>(parsed));
  CHECK(rep.ok());
  const auto& plan = std::get<PastingPlan>(parsed);
  CHECK(plan.vartheta == 1.5);
  CHECK(plan.epsilon == 0.25);
  CHECK(plan.regime_minus.coeffs.pieces.size() == 2);
}

TEST_CASE("pasting plan with mismatched strips reports findings") {
  const std::string text = R"(
[pasting]
vartheta = 0.0
epsilon = 0.5
regime_minus = {coefficients = {pieces = [{a = 0, b = 0, sigma = 1, gamma = 0}]}, init = {x0 = -0.5}}
regime_plus = {coefficients = {pieces = [{a = 0, b = 0, sigma = 2, gamma = 0}]}, init = {x0 = 0.5}}
)";
  ValidationReport rep;
  const auto parsed = parse_model(text, &rep);
  REQUIRE(std::holds_alternative<PastingPlan>(parsed));
  CHECK(!rep.ok());
  CHECK(rep.has("COEFF_MISMATCH"));
}
