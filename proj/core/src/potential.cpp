#include "tq/potential.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "density_kernels.hpp"
#include "tq/errors.hpp"

namespace tq {

namespace {

void check_dims(const ToricModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.dimension()) {
    fail(errc::malformed_input, "point arity does not match model dimension");
  }
  if (model.dimension() > detail::kMaxDim || model.facet_count() > detail::kMaxFacets) {
    fail(errc::unsupported, "model exceeds compiled dimension/facet limits");
  }
}

}  // namespace

PotentialJet potential_jet(const ToricModel& model, double s, const Eigen::VectorXd& x) {
  return potential_jet(model, PotentialSelector::family(s), x);
}

PotentialJet potential_jet(const ToricModel& model, const PotentialSelector& sel,
                           const Eigen::VectorXd& x) {
  check_dims(model, x);
  const int n = model.dimension();
  const detail::ModelKernel mk = detail::ModelKernel::from(model);
  const detail::SelectorKernel sk = detail::SelectorKernel::from(sel);
  detail::Jet jet;
  for (int j = 0; j < model.facet_count(); ++j) {
    if (model.ell(j, x) <= 0.0) {
      fail(errc::boundary_point, "potential jet requested outside the open polytope");
    }
  }
  if (!detail::full_jet(mk, sk, x.data(), jet)) {
    fail(errc::non_convex_potential, "Hessian not positive definite at requested point");
  }
  PotentialJet out;
  out.s = sel.s;
  out.x = x;
  out.g = jet.g;
  out.y = Eigen::Map<const Eigen::VectorXd>(jet.y, n);
  out.G = Eigen::Map<const Eigen::MatrixXd>(jet.G, n, n);
  out.log_det_G = jet.log_det_G;
  return out;
}

Eigen::VectorXd legendre_inverse(const ToricModel& model, double s, const Eigen::VectorXd& y,
                                 const NewtonOptions& options) {
  return legendre_inverse(model, PotentialSelector::family(s), y, options);
}

Eigen::VectorXd legendre_inverse(const ToricModel& model, const PotentialSelector& sel,
                                 const Eigen::VectorXd& y, const NewtonOptions& options) {
  check_dims(model, y);
  const int n = model.dimension();
  const detail::ModelKernel mk = detail::ModelKernel::from(model);
  const detail::SelectorKernel sk = detail::SelectorKernel::from(sel);

  Eigen::VectorXd x = model.basepoint_d();
  detail::Jet jet;
  if (!detail::full_jet(mk, sk, x.data(), jet)) {
    fail(errc::internal, "basepoint jet failed");
  }
  auto objective = [&](const detail::Jet& j, const Eigen::VectorXd& at) {
    return j.g - y.dot(at);
  };
  double fx = objective(jet, x);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    Eigen::VectorXd grad = Eigen::Map<const Eigen::VectorXd>(jet.y, n) - y;
    if (grad.norm() <= options.tol * (1.0 + y.norm())) return x;
    double step[detail::kMaxDim];
    Eigen::VectorXd rhs = -grad;
    detail::cholesky_solve(n, jet.L, rhs.data(), step);
    const Eigen::Map<const Eigen::VectorXd> d(step, n);
    const double slope = grad.dot(d);  // negative for a descent direction
    double t = 1.0;
    detail::Jet trial_jet;
    bool accepted = false;
    // Armijo with a rounding allowance: near the optimum the true decrement
    // drops below the floating-point resolution of fx, where the plain test
    // would reject the (correct) full Newton step.
    const double noise =
        8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(fx));
    for (int halvings = 0; halvings < 60; ++halvings) {
      Eigen::VectorXd trial = x + t * d;
      if (detail::full_jet(mk, sk, trial.data(), trial_jet)) {
        const double ft = objective(trial_jet, trial);
        if (ft <= fx + 1e-4 * t * slope + noise) {
          x = trial;
          fx = ft;
          jet = trial_jet;
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) fail(errc::newton_diverged, "line search failed in Legendre inversion");
  }
  fail(errc::newton_diverged, "Legendre inversion did not converge within the iteration cap");
}

ModeFunctions::ModeFunctions(const ToricModel& model, const PotentialSelector& sel, LatticePoint m)
    : model_(&model), sel_(sel), m_(std::move(m)) {
  if (static_cast<int>(m_.size()) != model.dimension()) {
    fail(errc::malformed_input, "mode arity does not match model dimension");
  }
  m_d_.resize(model.dimension());
  for (int k = 0; k < model.dimension(); ++k) m_d_[k] = static_cast<double>(m_[k]);
}

double ModeFunctions::h(const Eigen::VectorXd& x) const {
  const PotentialJet jet = potential_jet(*model_, sel_, x);
  return (x - m_d_).dot(jet.y) - jet.g;
}

double ModeFunctions::f(const Eigen::VectorXd& x) const {
  const Polynomial& psi = model_->psi();
  return (x - m_d_).dot(psi.gradient(x)) - (psi(x) - sel_.psi_shift);
}

RegularityReport regularity_scan(const ToricModel& model, int grid_density) {
  const int n = model.dimension();
  const int r = model.facet_count();
  const Eigen::MatrixXd normals = model.normals_d();

  std::vector<Eigen::VectorXd> samples;
  // graded approach to every facet, from the facet centroid and the midpoints
  // toward each of its vertices
  for (int j = 0; j < r; ++j) {
    std::vector<RationalVector> on_facet;
    for (const auto& v : model.vertices(PolytopeSelector::PX)) {
      if (model.ell_rational(j, v).is_zero()) on_facet.push_back(v);
    }
    if (on_facet.empty()) continue;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (const auto& v : on_facet) {
      for (int k = 0; k < n; ++k) centroid[k] += v[k].to_double();
    }
    centroid /= static_cast<double>(on_facet.size());
    const Eigen::VectorXd inward = normals.row(j).transpose().normalized();
    std::vector<Eigen::VectorXd> anchors{centroid};
    for (const auto& v : on_facet) {
      Eigen::VectorXd vd(n);
      for (int k = 0; k < n; ++k) vd[k] = v[k].to_double();
      anchors.push_back(0.5 * (centroid + vd));
    }
    for (const auto& a : anchors) {
      for (int e = 1; e <= 6; ++e) {
        const Eigen::VectorXd x = a + std::pow(10.0, -e) * inward;
        if (model.interior_contains(x)) samples.push_back(x);
      }
    }
  }
  // interior bounding-box grid
  {
    const auto [lo, hi] = model.bounding_box(PolytopeSelector::PX);
    const int g = std::max(2, grid_density);
    std::vector<int> ticks(n, 0);
    while (true) {
      Eigen::VectorXd x(n);
      for (int k = 0; k < n; ++k) {
        x[k] = lo[k].to_double() +
               (hi[k].to_double() - lo[k].to_double()) * ticks[k] / (g - 1.0);
      }
      if (model.interior_contains(x)) samples.push_back(x);
      int k = n - 1;
      while (k >= 0 && ticks[k] == g - 1) ticks[k--] = 0;
      if (k < 0) break;
      ++ticks[k];
    }
  }

  RegularityReport report;
  report.samples = static_cast<int>(samples.size());
  bool first = true;
  for (const auto& x : samples) {
    Eigen::MatrixXd h = model.phi().hessian(x);
    double log_prod = 0.0;
    for (int j = 0; j < r; ++j) {
      const double e = model.ell(j, x);
      log_prod += std::log(e);
      h += 0.5 / e * (normals.row(j).transpose() * normals.row(j));
    }
    const double q = h.determinant() * std::exp(log_prod);
    if (!std::isfinite(q) || q <= 0.0) {
      fail(errc::regularity_failure, "boundary regularity product degenerated");
    }
    if (first || q < report.min_value) report.min_value = q;
    if (first || q > report.max_value) report.max_value = q;
    first = false;
  }
  if (first) fail(errc::internal, "regularity scan produced no samples");
  report.ratio = report.max_value / report.min_value;
  report.pass = report.ratio < 1e4;
  return report;
}

}  // namespace tq
