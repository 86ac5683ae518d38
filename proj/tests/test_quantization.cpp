#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "tq/errors.hpp"
#include "tq/quantization.hpp"

using namespace tq;

namespace {

Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v << x;
  return v;
}

Eigen::VectorXd vec2(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return v;
}

}  // namespace

TEST_CASE("pointwise density closed form at the mode") {
  const ToricModel model = testing::load_fixture("cp1");
  // h_m(m) = -g_0(1) = -1.5 log 1.5, det G_0(1) = 2/3
  const double expected = std::pow(1.5, 3.0) * std::sqrt(2.0 / 3.0);
  CHECK(pointwise_density(model, 0.0, {1}, vec1(1.0)) ==
        doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("pointwise density boundary behavior on cp1") {
  const ToricModel model = testing::load_fixture("cp1");
  // ell_L(m=1) = (1,1): vanishing at both facets
  double prev = 1e300;
  for (int k = 2; k <= 8; ++k) {
    const double v = pointwise_density(model, 1.0, {1}, vec1(-0.5 + std::pow(10.0, -k)));
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev <= 1e-6);
  CHECK(pointwise_density(model, 1.0, {1}, vec1(-0.5)) == 0.0);

  // ell_L(m=0) = (0,2): finite positive limit at the left facet
  const double at_boundary = pointwise_density(model, 1.0, {0}, vec1(-0.5));
  CHECK(at_boundary > 0.0);
  const double near = pointwise_density(model, 1.0, {0}, vec1(-0.5 + 1e-8));
  CHECK(std::abs(near - at_boundary) <= 1e-5 * at_boundary);
  // stabilization between the two last graded levels
  const double near7 = pointwise_density(model, 1.0, {0}, vec1(-0.5 + 1e-7));
  CHECK(std::abs(near7 - near) / near <= 1e-3);
}

TEST_CASE("pointwise density boundary behavior on the blow-up") {
  const ToricModel model = testing::load_fixture("blowup");
  const LatticePoint m{0, 1};
  // facet 1 (y = 1/2) has ell_L(m) = 0: finite limit
  const double at_boundary = pointwise_density(model, 1.0, m, vec2(0.0, 0.5));
  CHECK(at_boundary > 0.0);
  const double near = pointwise_density(model, 1.0, m, vec2(0.0, 0.5 + 1e-8));
  CHECK(std::abs(near - at_boundary) <= 1e-5 * at_boundary);
  // facet 0 (x = -3/2) has ell_L(m) = 1: vanishing
  CHECK(pointwise_density(model, 1.0, m, vec2(-1.5, 1.0)) == 0.0);
  CHECK(pointwise_density(model, 1.0, m, vec2(-1.5 + 1e-8, 1.0)) <= 1e-6);
}

TEST_CASE("pointwise density rejects bad input") {
  const ToricModel model = testing::load_fixture("cp1");
  CHECK_THROWS_AS(static_cast<void>(pointwise_density(model, 0.0, {7}, vec1(1.0))), Error);
  CHECK_THROWS_AS(static_cast<void>(pointwise_density(model, 0.0, {1}, vec1(9.0))), Error);
}

TEST_CASE("norm squared is symmetric under the lattice symmetry of cp1") {
  const ToricModel model = testing::load_fixture("cp1");
  QuadratureOptions opts;
  opts.rel_tol = 1e-9;
  for (double s : {0.0, 1.0, 10.0}) {
    const double n0 = norm_squared(model, s, {0}, opts).value;
    const double n2 = norm_squared(model, s, {2}, opts).value;
    CHECK(std::abs(n0 - n2) <= 4e-9 * n0);
  }
}

TEST_CASE("laplace prediction closed form and ratio convergence") {
  const ToricModel model = testing::load_fixture("cp1");
  const double pred = laplace_prediction(model, 17.0, {1});  // psi(1) = 0: s-independent
  CHECK(pred == doctest::Approx(std::sqrt(std::numbers::pi) * std::pow(1.5, 3.0)).epsilon(1e-13));

  QuadratureOptions opts;
  opts.rel_tol = 1e-8;
  const double r640 = norm_squared(model, 640.0, {1}, opts).value / pred;
  CHECK(std::abs(r640 - 1.0) <= 0.01);
}

TEST_CASE("laplace prediction shifts exponentially with psi constants") {
  const ToricModel model = testing::load_fixture("cp1");
  PotentialSelector sel;
  sel.s = 3.0;
  sel.psi_shift = 0.25;  // psi -> psi - 1/4 multiplies the prediction by e^{-2 s/4}
  const double base = laplace_prediction(model, 3.0, {1});
  const double shifted = laplace_prediction(model, sel, {1});
  CHECK(shifted == doctest::Approx(base * std::exp(-2.0 * 3.0 * 0.25)).epsilon(1e-12));
}

TEST_CASE("blow-up laplace prediction at s=0 matches the jet") {
  const ToricModel model = testing::load_fixture("blowup");
  const double g0 = potential_jet(model, 0.0, vec2(0.0, 1.0)).g;
  CHECK(laplace_prediction(model, 0.0, {0, 1}) ==
        doctest::Approx(std::numbers::pi * std::exp(2.0 * g0)).epsilon(1e-13));
}

TEST_CASE("single-mode model has a finite positive norm") {
  const ToricModel model = testing::load_fixture("point");
  QuadratureOptions opts;
  opts.rel_tol = 1e-8;
  const double n = norm_squared(model, 0.0, {0}, opts).value;
  CHECK(n > 0.0);
  CHECK(std::isfinite(n));
}

TEST_CASE("delta pairing approaches the half-form constant") {
  const ToricModel model = testing::load_fixture("cp1");
  QuadratureOptions opts;
  opts.rel_tol = 1e-8;
  const double target = std::sqrt(2.0) * std::pow(std::numbers::pi, 0.25);
  const Polynomial one = Polynomial::constant(1, Rational(1));
  const double at160 = delta_pairing(model, 160.0, {1}, one, opts);
  CHECK(std::abs(at160 - target) <= 0.05 * target);

  // t(x) = x picks out t(m) = 1 in the limit
  Polynomial tx(1);
  tx.add_term({1}, Rational(1));
  const double linear = delta_pairing(model, 640.0, {1}, tx, opts);
  CHECK(std::abs(linear - target) <= 0.02 * target);
}

TEST_CASE("concentration mass at s=100 exceeds 0.999") {
  QuadratureOptions opts;
  opts.rel_tol = 1e-8;
  const ToricModel cp1 = testing::load_fixture("cp1");
  CHECK(concentration_mass(cp1, 100.0, {1}, 6.0, opts) > 0.999);
  const ToricModel blowup = testing::load_fixture("blowup");
  CHECK(concentration_mass(blowup, 100.0, {0, 1}, 6.0, opts) > 0.999);
}

TEST_CASE("half density ratio identities") {
  const ToricModel model = testing::load_fixture("blowup");
  const Eigen::VectorXd x = vec2(-0.3, 1.4);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
  for (double s : {0.0, 1.0, 100.0}) {
    CHECK(half_density_ratio(model, s, x, id, zero) == doctest::Approx(1.0).epsilon(1e-12));
    const double theta_ratio = half_density_ratio(model, s, x, zero, id);
    const double det_g = std::exp(potential_jet(model, s, x).log_det_G);
    CHECK(theta_ratio == doctest::Approx(1.0 / std::sqrt(det_g)).epsilon(1e-12));
  }
}

TEST_CASE("half density ratio converges to |det a|^(1/2)") {
  const ToricModel model = testing::load_fixture("blowup");
  const Eigen::VectorXd x = vec2(0.2, 1.1);
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 1.0, 0.4, -0.2, 0.8;
  b << 0.3, -0.5, 0.7, 0.1;
  const double target = std::sqrt(std::abs(a.determinant()));
  const double err4 = std::abs(half_density_ratio(model, 1e4, x, a, b) - target);
  const double err6 = std::abs(half_density_ratio(model, 1e6, x, a, b) - target);
  CHECK(err6 <= 1e-2);
  CHECK(err6 < err4);
}

TEST_CASE("bohr-sommerfeld verdicts") {
  const ToricModel model = testing::load_fixture("cp1");
  const BohrSommerfeldVerdict in = bs_condition(model, {Rational(1)});
  CHECK(in.status == BSStatus::InBasis);
  REQUIRE(in.phases.size() == 1);
  CHECK(in.phases[0].real() == doctest::Approx(1.0));

  const BohrSommerfeldVerdict frac = bs_condition(model, {Rational(13, 10)});
  CHECK(frac.status == BSStatus::NontrivialHolonomy);
  const double angle = 2.0 * std::numbers::pi * 0.3;
  CHECK(frac.phases[0].real() == doctest::Approx(std::cos(angle)).epsilon(1e-12));
  CHECK(frac.phases[0].imag() == doctest::Approx(std::sin(angle)).epsilon(1e-12));

  const BohrSommerfeldVerdict boundary = bs_condition(model, {Rational(-1, 2)});
  CHECK(boundary.status == BSStatus::BoundaryObstructed);
  REQUIRE(boundary.phases.size() == 1);
  CHECK(boundary.phases[0].real() == doctest::Approx(-1.0));
  CHECK(boundary.phases[0].imag() == doctest::Approx(0.0));
  CHECK(boundary.collapsed_facets == std::vector<int>{0});

  CHECK_THROWS_AS(static_cast<void>(bs_condition(model, {Rational(7)})), Error);
}

TEST_CASE("boundary vertices collapse every adjacent cycle") {
  const ToricModel model = testing::load_fixture("blowup");
  const BohrSommerfeldVerdict v =
      bs_condition(model, {Rational(-3, 2), Rational(1, 2)});
  CHECK(v.status == BSStatus::BoundaryObstructed);
  CHECK(v.collapsed_facets == std::vector<int>{0, 1});
  CHECK(v.phases.size() == 2);
}

TEST_CASE("real basis equals the corrected-polytope basis on all fixtures") {
  for (const char* stem : {"cp1", "cp2", "blowup", "cp1xcp1", "point", "pl_empty"}) {
    const ToricModel model = testing::load_fixture(stem);
    CHECK(real_basis(model) == model.lattice_points());
  }
}

TEST_CASE("torus-reduced norm matches the explicit angle average") {
  // The integrand of the full-space norm is angle independent; averaging an
  // explicit theta grid against 1/(2 pi)^n must reproduce the reduced value.
  const ToricModel model = testing::load_fixture("cp1");
  QuadratureOptions opts;
  opts.rel_tol = 1e-9;
  const double reduced = norm_squared(model, 1.0, {1}, opts).value;

  const auto cells = triangulate_d(model);
  const int theta_samples = 16;
  double averaged = 0.0;
  for (int k = 0; k < theta_samples; ++k) {
    const auto density = [&](const double* x) {
      const Eigen::VectorXd xv = vec1(x[0]);
      const PotentialJet jet = potential_jet(model, 1.0, xv);
      const double h = (x[0] - 1.0) * jet.y[0] - jet.g;
      return -2.0 * h + 0.5 * jet.log_det_G;  // no theta dependence
    };
    averaged += integrate(cells, density, opts).value / theta_samples;
  }
  CHECK(std::abs(averaged - reduced) <= 4e-9 * reduced);
}

TEST_CASE("laplace ratio contracts for every mode of cp1 and the blow-up") {
  // psi is pinned to psi(m) = 0 per mode; the ratio is invariant under the
  // shift and the raw values would overflow for off-center modes at s = 640.
  QuadratureOptions opts;
  opts.rel_tol = 1e-8;
  for (const char* stem : {"cp1", "blowup"}) {
    const ToricModel model = testing::load_fixture(stem);
    for (const auto& m : model.lattice_points()) {
      Eigen::VectorXd md(model.dimension());
      for (int k = 0; k < model.dimension(); ++k) md[k] = static_cast<double>(m[k]);
      double prev_err = -1.0;
      for (double s : {10.0, 40.0, 160.0, 640.0}) {
        PotentialSelector sel;
        sel.s = s;
        sel.psi_shift = model.psi()(md);
        const double r = norm_squared(model, sel, m, opts).value /
                         laplace_prediction(model, sel, m);
        const double err = std::abs(r - 1.0);
        if (prev_err >= 0.0) CHECK(err <= 0.35 * prev_err);
        prev_err = err;
      }
    }
  }
}

TEST_CASE("norms respect the axis-swap symmetry of cp1xcp1") {
  const ToricModel model = testing::load_fixture("cp1xcp1");
  QuadratureOptions opts;
  opts.rel_tol = 1e-9;
  for (double s : {0.0, 1.0}) {
    const double a = norm_squared(model, s, {0, 1}, opts).value;
    const double b = norm_squared(model, s, {1, 0}, opts).value;
    CHECK(std::abs(a - b) <= 4e-9 * a);
    const double c = norm_squared(model, s, {0, 0}, opts).value;
    const double d = norm_squared(model, s, {2, 2}, opts).value;
    CHECK(std::abs(c - d) <= 4e-9 * c);
  }
}

TEST_CASE("delta pairing error decays with s for quadratic profiles") {
  const ToricModel model = testing::load_fixture("cp1");
  QuadratureOptions opts;
  opts.rel_tol = 1e-8;
  Polynomial t2(1);
  t2.add_term({2}, Rational(1));
  const double target = std::sqrt(2.0) * std::pow(std::numbers::pi, 0.25);
  const double err160 = std::abs(delta_pairing(model, 160.0, {1}, t2, opts) - target);
  const double err640 = std::abs(delta_pairing(model, 640.0, {1}, t2, opts) - target);
  CHECK(err640 < err160);
  CHECK(err640 <= err160 / 2.0);  // observed rate is ~1/s, well under 1/sqrt(s)
}

TEST_CASE("product model norms factor into one-dimensional norms") {
  // The cube model [-1/2, 5/2]^3 with psi = 1/2|x-(1,1,1)|^2 is a product of
  // three copies of the interval model, so its densities factor axis by axis
  // and the 3d norm must equal the product of 1d norms. This exercises the
  // full three-dimensional stack against an independent oracle.
  std::vector<Facet> facets;
  for (int i = 0; i < 3; ++i) {
    IntVector plus(3, 0), minus(3, 0);
    plus[i] = 1;
    minus[i] = -1;
    facets.push_back({plus, 0});
    facets.push_back({minus, 2});
  }
  const ToricModel cube = ToricModel::build(facets, Polynomial());
  REQUIRE(cube.basepoint() == RationalVector{Rational(1), Rational(1), Rational(1)});
  REQUIRE(cube.quantum_dimension() == 27);
  const ToricModel interval = testing::load_fixture("cp1");  // same axis factor

  QuadratureOptions opts3;
  opts3.rel_tol = 1e-7;
  QuadratureOptions opts1;
  opts1.rel_tol = 1e-10;
  for (double s : {0.0, 1.0}) {
    const double whole = norm_squared(cube, s, {1, 1, 1}, opts3).value;
    const double factor = norm_squared(interval, s, {1}, opts1).value;
    CHECK(std::abs(whole - factor * factor * factor) <= 5e-7 * whole);

    const double mixed = norm_squared(cube, s, {0, 1, 2}, opts3).value;
    const double f0 = norm_squared(interval, s, {0}, opts1).value;
    const double f2 = norm_squared(interval, s, {2}, opts1).value;
    CHECK(std::abs(mixed - f0 * factor * f2) <= 5e-7 * mixed);
  }
}
