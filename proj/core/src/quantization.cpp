#include "tq/quantization.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "density_kernels.hpp"
#include "tq/errors.hpp"

namespace tq {

namespace {

Eigen::VectorXd lattice_to_vec(const LatticePoint& m) {
  Eigen::VectorXd v(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) v[k] = static_cast<double>(m[k]);
  return v;
}

void require_mode_in_pl(const ToricModel& model, const LatticePoint& m) {
  if (static_cast<int>(m.size()) != model.dimension()) {
    fail(errc::malformed_input, "mode arity does not match model dimension");
  }
  if (!model.pl_contains_lattice(m)) {
    fail(errc::mode_outside_pl, "mode is not a lattice point of P_L");
  }
}

// Density functor reused by norm_squared / delta_pairing; holds flat copies of
// the model so node evaluation allocates nothing.
struct SectionDensity {
  detail::ModelKernel mk;
  detail::SelectorKernel sk;
  double m[detail::kMaxDim];
  double h_factor;  // -2 for the norm density, -1 for the pairing numerator

  double operator()(const double* x) const {
    detail::Jet jet;
    if (!detail::full_jet(mk, sk, x, jet)) {
      return -std::numeric_limits<double>::infinity();
    }
    return h_factor * detail::mode_h(mk.n, jet, x, m) + 0.5 * jet.log_det_G;
  }
};

SectionDensity make_density(const ToricModel& model, const PotentialSelector& sel,
                            const LatticePoint& m, double h_factor) {
  SectionDensity d;
  d.mk = detail::ModelKernel::from(model);
  d.sk = detail::SelectorKernel::from(sel);
  for (std::size_t k = 0; k < m.size(); ++k) d.m[k] = static_cast<double>(m[k]);
  d.h_factor = h_factor;
  return d;
}

QuadratureOptions with_hint(const ToricModel& model, const QuadratureOptions& options, double s,
                            const LatticePoint& m) {
  QuadratureOptions out = options;
  if (!out.hint && s > 0.0) {
    out.hint = ConcentrationHint{lattice_to_vec(m), 1.0 / std::sqrt(s)};
  }
  (void)model;
  return out;
}

// Continuous boundary extension of the density at a point with active facet
// set A. Per facet the density carries ell^(ell_L(m)): zero limit when any
// active exponent is positive, otherwise the finite limit assembled from the
// non-active part and the reduced Hessian
//   B = 1/2 sum_{j not in A} nu nu^T / ell_j + Hess(phi + extra + s psi),
// via det G ~ det B det(V^T B^-1 V) / prod_{a in A}(2 ell_a).
double boundary_limit(const ToricModel& model, const PotentialSelector& sel,
                      const LatticePoint& m, const Eigen::VectorXd& x,
                      const std::vector<int>& active) {
  const int n = model.dimension();
  for (int j : active) {
    if (model.ell_L_at_lattice(j, m) > 0) return 0.0;
  }
  double log_rho = 0.0;
  Eigen::MatrixXd b = model.phi().hessian(x) + sel.s * model.psi().hessian(x);
  if (sel.extra_phi.dimension() > 0) b += sel.extra_phi.hessian(x);
  Eigen::VectorXd grad_u = model.phi().gradient(x) + sel.s * model.psi().gradient(x);
  double u = model.phi()(x) + sel.s * (model.psi()(x) - sel.psi_shift);
  if (sel.extra_phi.dimension() > 0) {
    grad_u += sel.extra_phi.gradient(x);
    u += sel.extra_phi(x);
  }
  const Eigen::MatrixXd normals = model.normals_d();
  const Eigen::VectorXd md = lattice_to_vec(m);
  for (int j = 0; j < model.facet_count(); ++j) {
    const bool is_active = std::find(active.begin(), active.end(), j) != active.end();
    const double ell_m = model.ell(j, md);
    if (is_active) {
      log_rho += ell_m;  // the log ell piece cancels against det G
      continue;
    }
    const double ell_x = model.ell(j, x);
    log_rho += ell_m * std::log(ell_x) + ell_m - ell_x;
    b += 0.5 / ell_x * (normals.row(j).transpose() * normals.row(j));
  }
  log_rho += -2.0 * ((x - md).dot(grad_u) - u);
  Eigen::LLT<Eigen::MatrixXd> llt(b);
  if (llt.info() != Eigen::Success) {
    fail(errc::regularity_failure, "reduced boundary Hessian is not positive definite");
  }
  double log_det_b = 0.0;
  for (int k = 0; k < n; ++k) log_det_b += 2.0 * std::log(llt.matrixL()(k, k));
  Eigen::MatrixXd v(n, static_cast<int>(active.size()));
  for (std::size_t a = 0; a < active.size(); ++a) {
    v.col(static_cast<int>(a)) = normals.row(active[a]).transpose();
  }
  const Eigen::MatrixXd reduced = v.transpose() * llt.solve(v);
  const double det_reduced = reduced.determinant();
  if (!(det_reduced > 0.0)) {
    fail(errc::regularity_failure, "active-normal Gram determinant not positive");
  }
  log_rho += 0.5 * (log_det_b + std::log(det_reduced) -
                    static_cast<double>(active.size()) * std::numbers::ln2);
  return std::exp(log_rho);
}

}  // namespace

double pointwise_density(const ToricModel& model, double s, const LatticePoint& m,
                         const Eigen::VectorXd& x) {
  return pointwise_density(model, PotentialSelector::family(s), m, x);
}

double pointwise_density(const ToricModel& model, const PotentialSelector& sel,
                         const LatticePoint& m, const Eigen::VectorXd& x) {
  require_mode_in_pl(model, m);
  std::vector<int> active;
  for (int j = 0; j < model.facet_count(); ++j) {
    const double e = model.ell(j, x);
    if (e < 0.0) fail(errc::outside_polytope, "point lies outside the closed polytope");
    if (e == 0.0) active.push_back(j);
  }
  if (!active.empty()) return boundary_limit(model, sel, m, x, active);
  const SectionDensity density = make_density(model, sel, m, -2.0);
  return std::exp(density(x.data()));
}

IntegralResult norm_squared(const ToricModel& model, double s, const LatticePoint& m,
                            const QuadratureOptions& options) {
  return norm_squared(model, PotentialSelector::family(s), m, options);
}

IntegralResult norm_squared(const ToricModel& model, const PotentialSelector& sel,
                            const LatticePoint& m, const QuadratureOptions& options) {
  require_mode_in_pl(model, m);
  const SectionDensity density = make_density(model, sel, m, -2.0);
  const auto cells = triangulate_d(model);
  return integrate(cells, std::cref(density), with_hint(model, options, sel.s, m));
}

double laplace_prediction(const ToricModel& model, double s, const LatticePoint& m) {
  return laplace_prediction(model, PotentialSelector::family(s), m);
}

double laplace_prediction(const ToricModel& model, const PotentialSelector& sel,
                          const LatticePoint& m) {
  require_mode_in_pl(model, m);
  const PotentialJet jet = potential_jet(model, sel, lattice_to_vec(m));
  const double n = static_cast<double>(model.dimension());
  return std::pow(std::numbers::pi, 0.5 * n) * std::exp(2.0 * jet.g);
}

double delta_pairing(const ToricModel& model, double s, const LatticePoint& m,
                     const Polynomial& t, const QuadratureOptions& options) {
  require_mode_in_pl(model, m);
  if (t.dimension() != model.dimension()) {
    fail(errc::malformed_input, "test profile arity does not match model dimension");
  }
  PotentialSelector sel = PotentialSelector::family(s);
  sel.psi_shift = model.psi()(lattice_to_vec(m));
  const auto cells = triangulate_d(model);
  const QuadratureOptions opts = with_hint(model, options, s, m);

  const SectionDensity envelope = make_density(model, sel, m, -1.0);
  const detail::PolyKernel tk = detail::PolyKernel::from(t);
  const WeightFn weight = [&tk](const double* x) { return tk.value(x); };
  const IntegralResult numerator = integrate_weighted(cells, std::cref(envelope), weight, opts);

  const IntegralResult norm2 = norm_squared(model, sel, m, opts);
  if (!(norm2.value > 0.0)) fail(errc::internal, "norm squared must be positive");
  return numerator.value / std::sqrt(norm2.value);
}

double concentration_mass(const ToricModel& model, double s, const LatticePoint& m,
                          double radius, const QuadratureOptions& options) {
  require_mode_in_pl(model, m);
  if (!(s > 0.0)) fail(errc::malformed_input, "concentration mass requires s > 0");
  const int n = model.dimension();
  if (n > 2) fail(errc::unsupported, "concentration mass implemented for n <= 2");
  PotentialSelector sel = PotentialSelector::family(s);
  sel.psi_shift = model.psi()(lattice_to_vec(m));
  const SectionDensity density = make_density(model, sel, m, -2.0);
  const QuadratureOptions opts = with_hint(model, options, s, m);
  const IntegralResult total = integrate(triangulate_d(model), std::cref(density), opts);

  const double half = radius / std::sqrt(s);
  const Eigen::VectorXd md = lattice_to_vec(m);
  std::vector<SimplexD> box;
  if (n == 1) {
    const auto [lo, hi] = model.bounding_box(PolytopeSelector::PX);
    const double a = std::max(lo[0].to_double(), md[0] - half);
    const double b = std::min(hi[0].to_double(), md[0] + half);
    SimplexD cell;
    cell.vertices.resize(1, 2);
    cell.vertices(0, 0) = a;
    cell.vertices(0, 1) = b;
    box.push_back(std::move(cell));
  } else {
    // clip each triangle of the base mesh against the four box half-planes
    for (const SimplexD& tri : triangulate_d(model)) {
      std::vector<Eigen::Vector2d> poly;
      for (int v = 0; v < 3; ++v) poly.push_back(tri.vertices.col(v));
      for (int axis = 0; axis < 2 && !poly.empty(); ++axis) {
        for (int side = -1; side <= 1 && !poly.empty(); side += 2) {
          const double bound = md[axis] + side * half;
          auto inside = [&](const Eigen::Vector2d& p) {
            return side < 0 ? p[axis] >= bound : p[axis] <= bound;
          };
          std::vector<Eigen::Vector2d> next;
          for (std::size_t i = 0; i < poly.size(); ++i) {
            const Eigen::Vector2d& cur = poly[i];
            const Eigen::Vector2d& prev = poly[(i + poly.size() - 1) % poly.size()];
            const bool cur_in = inside(cur), prev_in = inside(prev);
            if (cur_in != prev_in) {
              const double tpar = (bound - prev[axis]) / (cur[axis] - prev[axis]);
              next.push_back(prev + tpar * (cur - prev));
            }
            if (cur_in) next.push_back(cur);
          }
          poly = std::move(next);
        }
      }
      for (std::size_t v = 2; v < poly.size(); ++v) {
        SimplexD cell;
        cell.vertices.resize(2, 3);
        cell.vertices.col(0) = poly[0];
        cell.vertices.col(1) = poly[v - 1];
        cell.vertices.col(2) = poly[v];
        if (simplex_volume(cell) > 1e-14) box.push_back(std::move(cell));
      }
    }
  }
  if (box.empty()) return 0.0;
  const IntegralResult inside = integrate(box, std::cref(density), opts);
  return inside.value / total.value;
}

double half_density_ratio(const ToricModel& model, double s, const Eigen::VectorXd& x,
                          const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const PotentialJet jet = potential_jet(model, s, x);
  const int n = model.dimension();
  Eigen::MatrixXcd m(n, n);
  const Eigen::MatrixXd ga = jet.G * a;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = std::complex<double>(ga(i, j), b(i, j));
  }
  const double abs_det = std::abs(m.determinant());
  return std::sqrt(abs_det) * std::exp(-0.5 * jet.log_det_G);
}

BohrSommerfeldVerdict bs_condition(const ToricModel& model, const RationalVector& x) {
  if (static_cast<int>(x.size()) != model.dimension()) {
    fail(errc::malformed_input, "point arity does not match model dimension");
  }
  BohrSommerfeldVerdict verdict;
  verdict.point = x;
  for (int j = 0; j < model.facet_count(); ++j) {
    const Rational e = model.ell_rational(j, x);
    if (e.sign() < 0) fail(errc::outside_polytope, "point lies outside the closed polytope");
    if (e.is_zero()) verdict.collapsed_facets.push_back(j);
  }
  if (!verdict.collapsed_facets.empty()) {
    // Each collapsed cycle carries the obstructing half-form phase
    // e^{2 pi i (x_v - 1/2)} with x_v = 0, i.e. exactly -1.
    verdict.status = BSStatus::BoundaryObstructed;
    verdict.phases.assign(verdict.collapsed_facets.size(), std::complex<double>(-1.0, 0.0));
    return verdict;
  }
  bool integral = true;
  constexpr double tau = 2.0 * std::numbers::pi;
  for (const Rational& c : x) {
    if (!c.is_integer()) integral = false;
    const Rational frac = c - Rational(c.floor());
    const double angle = tau * frac.to_double();
    verdict.phases.push_back(frac.is_zero() ? std::complex<double>(1.0, 0.0)
                                            : std::polar(1.0, angle));
  }
  verdict.status = integral ? BSStatus::InBasis : BSStatus::NontrivialHolonomy;
  return verdict;
}

std::vector<LatticePoint> real_basis(const ToricModel& model) {
  const int n = model.dimension();
  const auto [lo, hi] = model.bounding_box(PolytopeSelector::PX);
  std::vector<LatticePoint> basis;
  std::vector<long long> lo_i(n), hi_i(n);
  bool empty_box = false;
  for (int k = 0; k < n; ++k) {
    lo_i[k] = lo[k].ceil();
    hi_i[k] = hi[k].floor();
    empty_box |= lo_i[k] > hi_i[k];
  }
  if (!empty_box) {
    LatticePoint m(n);
    for (int k = 0; k < n; ++k) m[k] = lo_i[k];
    while (true) {
      RationalVector p(n);
      for (int k = 0; k < n; ++k) p[k] = Rational(m[k]);
      if (model.contains_rational(p) && bs_condition(model, p).status == BSStatus::InBasis) {
        basis.push_back(m);
      }
      int k = n - 1;
      while (k >= 0 && m[k] == hi_i[k]) {
        m[k] = lo_i[k];
        --k;
      }
      if (k < 0) break;
      ++m[k];
    }
  }
  std::sort(basis.begin(), basis.end());
  if (basis != model.lattice_points()) {
    fail(errc::basis_mismatch,
         "real-polarization basis disagrees with the corrected-polytope basis");
  }
  return basis;
}

const char* bs_status_name(BSStatus status) {
  switch (status) {
    case BSStatus::InBasis: return "InBasis";
    case BSStatus::NontrivialHolonomy: return "NontrivialHolonomy";
    case BSStatus::BoundaryObstructed: return "BoundaryObstructed";
  }
  return "Unknown";
}

}  // namespace tq
