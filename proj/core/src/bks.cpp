#include "tq/bks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "density_kernels.hpp"
#include "tq/errors.hpp"

namespace tq {

namespace {

void require_mode_in_pl(const ToricModel& model, const LatticePoint& m) {
  if (static_cast<int>(m.size()) != model.dimension()) {
    fail(errc::malformed_input, "mode arity does not match model dimension");
  }
  if (!model.pl_contains_lattice(m)) {
    fail(errc::mode_outside_pl, "mode is not a lattice point of P_L");
  }
}

// exp(-h_m^I - h_m^J) sqrt(det((G_I + G_J)/2)); written symmetrically in
// (I, J) so swapping the selectors reproduces bit-identical values.
struct PairingDensity {
  detail::ModelKernel mk;
  detail::SelectorKernel sk_i, sk_j;
  double m[detail::kMaxDim];

  double operator()(const double* x) const {
    const int n = mk.n;
    detail::Jet jet_i, jet_j;
    if (!detail::full_jet(mk, sk_i, x, jet_i)) return -std::numeric_limits<double>::infinity();
    if (!detail::full_jet(mk, sk_j, x, jet_j)) return -std::numeric_limits<double>::infinity();
    double mid[detail::kMaxDim * detail::kMaxDim];
    for (int k = 0; k < n * n; ++k) mid[k] = 0.5 * (jet_i.G[k] + jet_j.G[k]);
    double l[detail::kMaxDim * detail::kMaxDim];
    if (!detail::cholesky(n, mid, l)) return -std::numeric_limits<double>::infinity();
    const double h_i = detail::mode_h(n, jet_i, x, m);
    const double h_j = detail::mode_h(n, jet_j, x, m);
    return -(h_i + h_j) + 0.5 * detail::cholesky_log_det(n, l);
  }
};

QuadratureOptions pairing_hint(const QuadratureOptions& options, const LatticePoint& m,
                               double s_i, double s_j) {
  QuadratureOptions out = options;
  const double s = std::max(std::abs(s_i), std::abs(s_j));
  if (!out.hint && s > 0.0) {
    Eigen::VectorXd c(m.size());
    for (std::size_t k = 0; k < m.size(); ++k) c[k] = static_cast<double>(m[k]);
    out.hint = ConcentrationHint{std::move(c), 1.0 / std::sqrt(s)};
  }
  return out;
}

IntegralResult norm_squared_shifted(const ToricModel& model, double s, double psi_shift,
                                    const LatticePoint& m, const QuadratureOptions& options) {
  PotentialSelector sel;
  sel.s = s;
  sel.psi_shift = psi_shift;
  return norm_squared(model, sel, m, options);
}

}  // namespace

BksEntry bks_entry(const ToricModel& model, const PotentialSelector& I,
                   const PotentialSelector& J, const LatticePoint& m,
                   const QuadratureOptions& options) {
  require_mode_in_pl(model, m);
  PairingDensity density;
  density.mk = detail::ModelKernel::from(model);
  density.sk_i = detail::SelectorKernel::from(I);
  density.sk_j = detail::SelectorKernel::from(J);
  for (std::size_t k = 0; k < m.size(); ++k) density.m[k] = static_cast<double>(m[k]);
  const auto cells = triangulate_d(model);
  const IntegralResult integral =
      integrate(cells, std::cref(density), pairing_hint(options, m, I.s, J.s));
  BksEntry entry;
  entry.m = m;
  entry.I = I;
  entry.J = J;
  entry.integral = integral;
  entry.value = integral.value;
  return entry;
}

BksEntry bks_entry(const ToricModel& model, double s_i, double s_j, const LatticePoint& m,
                   const QuadratureOptions& options) {
  return bks_entry(model, PotentialSelector::family(s_i), PotentialSelector::family(s_j), m,
                   options);
}

double additivity_defect(const ToricModel& model, const LatticePoint& m, double s1, double s2,
                         double delta, const QuadratureOptions& options) {
  if (s1 < 0.0 || s2 < 0.0 || s1 + delta < 0.0 || s2 - delta < 0.0) {
    fail(errc::malformed_input, "additivity defect requires nonnegative family parameters");
  }
  const double base = bks_entry(model, s1, s2, m, options).value;
  const double moved = bks_entry(model, s1 + delta, s2 - delta, m, options).value;
  return std::abs(base - moved) / base;
}

UnitarityReport unitarity_derivative(const ToricModel& model, double s, const LatticePoint& m,
                                     const QuadratureOptions& options) {
  require_mode_in_pl(model, m);
  const int n = model.dimension();
  Eigen::VectorXd md(n);
  for (int k = 0; k < n; ++k) md[k] = static_cast<double>(m[k]);
  const double psi_at_m = model.psi()(md);

  PotentialSelector sel;
  sel.s = s;
  sel.psi_shift = psi_at_m;

  const detail::ModelKernel mk = detail::ModelKernel::from(model);
  const detail::SelectorKernel sk = detail::SelectorKernel::from(sel);
  const detail::PolyKernel psi_k = mk.psi;
  const double shift = psi_at_m;

  double mbuf[detail::kMaxDim];
  for (int k = 0; k < n; ++k) mbuf[k] = md[k];

  const LogDensityFn envelope = [&](const double* x) -> double {
    detail::Jet jet;
    if (!detail::full_jet(mk, sk, x, jet)) return -std::numeric_limits<double>::infinity();
    return -2.0 * detail::mode_h(mk.n, jet, x, mbuf) + 0.5 * jet.log_det_G;
  };
  const WeightFn weight = [&](const double* x) -> double {
    detail::Jet jet;
    if (!detail::full_jet(mk, sk, x, jet)) return 0.0;
    // 2(psi - (x-m).grad psi) + 1/2 tr(G^-1 Hess psi)
    double grad_psi[detail::kMaxDim] = {0};
    psi_k.add_gradient(x, 1.0, grad_psi);
    double first = psi_k.value(x) - shift;
    for (int k = 0; k < n; ++k) first -= (x[k] - mbuf[k]) * grad_psi[k];
    double hess_psi[detail::kMaxDim * detail::kMaxDim] = {0};
    psi_k.add_hessian(x, 1.0, hess_psi);
    double trace = 0.0;
    double col[detail::kMaxDim], sol[detail::kMaxDim];
    for (int c = 0; c < n; ++c) {
      for (int k = 0; k < n; ++k) col[k] = hess_psi[k * n + c];
      detail::cholesky_solve(n, jet.L, col, sol);
      trace += sol[c];
    }
    return 2.0 * first + 0.5 * trace;
  };

  const auto cells = triangulate_d(model);
  const QuadratureOptions opts = pairing_hint(options, m, s, s);
  const IntegralResult integral = integrate_weighted(cells, envelope, weight, opts);

  // Centered finite difference of the (psi-shifted) squared norm with step
  // h = max(1e-3, 1e-3 s); the small negative s-h at s = 0 stays admissible.
  const double h = std::max(1e-3, 1e-3 * s);
  QuadratureOptions fd_opts = opts;
  fd_opts.rel_tol = std::max(std::min(options.rel_tol, 1e-11), 1e-12);
  const double plus = norm_squared_shifted(model, s + h, psi_at_m, m, fd_opts).value;
  const double minus = norm_squared_shifted(model, s - h, psi_at_m, m, fd_opts).value;
  const double fd = (plus - minus) / (2.0 * h);

  UnitarityReport report;
  report.m = m;
  report.s = s;
  report.derivative = integral.value;
  report.fd_check = fd;
  report.integral = integral;
  if (std::abs(report.derivative - fd) > 1e-6 * (1.0 + std::abs(report.derivative))) {
    fail(errc::cross_check_failed,
         "closed-form and finite-difference norm derivatives disagree: " +
             std::to_string(report.derivative) + " vs " + std::to_string(fd));
  }
  return report;
}

double horizontality_defect(const ToricModel& model, double s0, const LatticePoint& m, double h,
                            const QuadratureOptions& options) {
  require_mode_in_pl(model, m);
  auto value = [&](double a, double b) { return bks_entry(model, a, b, m, options).value; };
  const double diag0 = value(s0, s0);
  auto normalized = [&](double s) {
    return value(s, s0) / std::sqrt(value(s, s) * diag0);
  };
  return std::abs(normalized(s0 + h) - normalized(s0 - h)) / (2.0 * h);
}

}  // namespace tq
