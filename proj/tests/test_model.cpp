#include <cmath>

#include "doctest.h"
#include "starwave/errors.hpp"
#include "starwave/model.hpp"

using namespace starwave;

TEST_CASE("default model values") {
  const ModelSpec m = default_model(6.0);
  for (double x : {0.0, 0.3, 0.9, 1.0}) {
    CHECK(m.H1(x, 0, 0, 0).value * m.J(x, 0, 0).value == 1.0);
    CHECK(m.H2(x, 0, 0, 0, 0).value == 0.0);
  }
  const H2Eval h = m.H2(0.99, 0.0, 0.0, 0.0, 0.05);
  CHECK(h.dw / (1 - 0.99) == doctest::Approx(0.1));
  CHECK_THROWS_AS(default_model(4.0), std::invalid_argument);
}

TEST_CASE("default and variant models pass") {
  for (const ModelSpec& m : {default_model(6.0), variant_model_zJ(6.0), default_model(5.0)}) {
    const AssumptionReport r = check_assumptions(m);
    CHECK(r.all_pass());
    CHECK(r.item("B2").residual == 0.0);
    CHECK(r.item("derivatives").residual < 1e-8);
  }
  const ModelSpec v = variant_model_zJ(6.0);
  CHECK(v.J(0.4, 0.0, 1.0).dz == doctest::Approx(0.6));
  CHECK(v.J(0.4, 0.0, 0.0).value == 1.0);
}

TEST_CASE("constructed violations are flagged") {
  CoefficientFns c;
  const ModelSpec b2 = polynomial_model("b2", {{2.0}}, {{1.0}}, {{1.0, 0, 2}}, false, c);
  const AssumptionReport r2 = check_assumptions(b2);
  CHECK_FALSE(r2.item("B2").pass);
  CHECK(r2.item("B2").residual == doctest::Approx(0.5));
  CHECK(r2.item("B3").pass);

  // H2 = y^2 + w^2 without the (1-x) factor
  const ModelSpec b3 = polynomial_model("b3", {{1.0}, {1.0, 0, 1}}, {}, {{1.0, 0, 2}, {1.0, 0, 0, 0, 0, 2}}, true, c);
  const AssumptionReport r3 = check_assumptions(b3);
  CHECK(r3.item("B2").pass);
  CHECK_FALSE(r3.item("B3").pass);
  CHECK(r3.item("B3").residual > 0.0);
  CHECK_FALSE(r3.all_pass());

  // H2 with a linear term
  const ModelSpec b1 = polynomial_model("b1", {{1.0}}, {{1.0}}, {{0.3, 0, 1}}, false, c);
  CHECK_FALSE(check_assumptions(b1).item("B1").pass);

  c.n_param = 3.0;
  const ModelSpec b0 = polynomial_model("b0", {{1.0}}, {{1.0}}, {}, false, c);
  CHECK_FALSE(check_assumptions(b0).item("B0").pass);
}

TEST_CASE("polynomial model partials and B3 via dzJ") {
  CoefficientFns c;
  // J = 1 + y + z: dzJ does not vanish at x = 1
  const ModelSpec m = polynomial_model("zj", {{1.0}, {1.0, 0, 1}, {1.0, 0, 0, 1}}, {}, {{1.0, 0, 2}}, true, c);
  const AssumptionReport r = check_assumptions(m);
  CHECK(r.item("derivatives").pass);
  CHECK_FALSE(r.item("B3").pass);
  CHECK_THROWS_AS(polynomial_model("bad", {{1.0, 0, 0, 0, 1}}, {}, {}, true, c), std::invalid_argument);
  CHECK_THROWS_AS(named_model("nope", 6.0), ConfigError);
  CHECK(named_model("variant_zJ", 6.0).name == "variant_zJ");
}

TEST_CASE("non-finite evaluation inside the box") {
  CoefficientFns c;
  // J = y, so H1 = 1/J is infinite at the origin
  const ModelSpec m = polynomial_model("sing", {{1.0, 0, 1}}, {}, {}, true, c);
  CHECK_THROWS_AS(check_assumptions(m), NumericalError);
}
