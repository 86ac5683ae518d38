#include <doctest.h>

#include "fixtures.hpp"
#include "tq/errors.hpp"
#include "tq/model_io.hpp"

using namespace tq;

TEST_CASE("all shipped fixtures load and validate") {
  for (const char* stem : {"cp1", "cp2", "blowup", "cp1xcp1", "point", "pl_empty"}) {
    const ToricModel model = testing::load_fixture(stem);
    CHECK(model.name == stem);
    CHECK(model.facet_count() >= model.dimension() + 1);
  }
}

TEST_CASE("rational strings parse exactly") {
  const ToricModel model = testing::load_fixture("blowup");
  CHECK(model.basepoint() == RationalVector{Rational(-1, 4), Rational(3, 2)});
  // psi constant term 37/32 survives untouched
  bool found = false;
  for (const auto& term : model.psi().terms()) {
    if (term.exponents == std::vector<int>{0, 0}) {
      found = true;
      CHECK(term.coefficient == Rational(37, 32));
    }
  }
  CHECK(found);
}

TEST_CASE("defaults: phi zero, psi half square distance, basepoint barycenter") {
  const std::string text = R"({
    "dimension": 1,
    "facets": [{"normal": [1], "lambda_L": 0}, {"normal": [-1], "lambda_L": 2}]
  })";
  const ToricModel model = parse_model(text);
  CHECK(model.phi().is_zero());
  CHECK(model.basepoint() == RationalVector{Rational(1)});
  CHECK(model.psi().terms().size() == 3);  // x^2/2 - x + 1/2
  Eigen::VectorXd x(1);
  x << 3.0;
  CHECK(model.psi()(x) == doctest::Approx(2.0));
}

TEST_CASE("round trip through json preserves the model") {
  const ToricModel model = testing::load_fixture("blowup");
  const ToricModel again = parse_model(model_to_json(model));
  CHECK(again.dimension() == model.dimension());
  REQUIRE(again.facet_count() == model.facet_count());
  for (int j = 0; j < model.facet_count(); ++j) {
    CHECK(again.facets()[j].normal == model.facets()[j].normal);
    CHECK(again.facets()[j].lambda_L == model.facets()[j].lambda_L);
  }
  CHECK(again.basepoint() == model.basepoint());
  CHECK(again.lattice_points() == model.lattice_points());
  CHECK(again.psi().terms().size() == model.psi().terms().size());
}

TEST_CASE("malformed inputs are rejected with MalformedInput") {
  const auto expect_malformed = [](const std::string& text) {
    bool threw = false;
    try {
      static_cast<void>(parse_model(text));
    } catch (const Error& e) {
      threw = true;
      CHECK(e.code() == errc::malformed_input);
    }
    CHECK(threw);
  };
  expect_malformed("not json at all");
  expect_malformed("[]");
  expect_malformed(R"({"facets": []})");
  expect_malformed(R"({"dimension": 1, "facets": []})");
  expect_malformed(R"({"dimension": 1, "facets": [{"normal": [1]}]})");
  expect_malformed(R"({"dimension": 2,
    "facets": [{"normal": [1], "lambda_L": 0}, {"normal": [-1], "lambda_L": 2}]})");
  expect_malformed(R"({"dimension": 1,
    "facets": [{"normal": [1], "lambda_L": 0}, {"normal": [-1], "lambda_L": 2}],
    "psi": {"terms": [{"exp": [2], "coef": "1/0"}]}})");
  expect_malformed(R"({"dimension": 1,
    "facets": [{"normal": [1], "lambda_L": 0}, {"normal": [-1], "lambda_L": 2}],
    "basepoint": ["1.5"]})");
}

TEST_CASE("non-delzant data is rejected at load with NonDelzant") {
  const std::string text = R"({
    "dimension": 2,
    "facets": [
      {"normal": [1, 0], "lambda_L": 0},
      {"normal": [0, 1], "lambda_L": 0},
      {"normal": [-1, -2], "lambda_L": 2}
    ]
  })";
  bool threw = false;
  try {
    static_cast<void>(parse_model(text));
  } catch (const Error& e) {
    threw = true;
    CHECK(e.code() == errc::non_delzant);
  }
  CHECK(threw);
}
