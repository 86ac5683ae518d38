#ifndef TQ_POTENTIAL_HPP
#define TQ_POTENTIAL_HPP

#include <Eigen/Core>

#include "tq/polytope.hpp"

namespace tq {

// Selects a member of the admissible potential family
//   g = g_P + phi + extra_phi + s * (psi - psi_shift),
// where phi, psi come from the model. psi_shift subtracts a constant from psi
// (used to pin psi(m) = 0); extra_phi deforms phi beyond the simple family.
struct PotentialSelector {
  double s = 0.0;
  Polynomial extra_phi;  // dimension 0 means unused
  double psi_shift = 0.0;

  static PotentialSelector family(double s) {
    PotentialSelector sel;
    sel.s = s;
    return sel;
  }
};

struct PotentialJet {
  double s = 0.0;
  Eigen::VectorXd x;
  double g = 0.0;
  Eigen::VectorXd y;   // gradient of g, the Legendre image
  Eigen::MatrixXd G;   // Hessian of g, symmetric positive definite
  double log_det_G = 0.0;
};

PotentialJet potential_jet(const ToricModel& model, double s, const Eigen::VectorXd& x);
PotentialJet potential_jet(const ToricModel& model, const PotentialSelector& sel,
                           const Eigen::VectorXd& x);

struct NewtonOptions {
  double tol = 1e-10;  // relative gradient residual
  int max_iterations = 100;
};

// Unique interior x with grad g_s(x) = y, by damped Newton on the strictly
// convex g_s - y.x seeded at the model basepoint.
Eigen::VectorXd legendre_inverse(const ToricModel& model, double s, const Eigen::VectorXd& y,
                                 const NewtonOptions& options = {});
Eigen::VectorXd legendre_inverse(const ToricModel& model, const PotentialSelector& sel,
                                 const Eigen::VectorXd& y, const NewtonOptions& options = {});

// Evaluators for h_m = (x-m).grad g - g and f_m = (x-m).grad psi - psi.
class ModeFunctions {
 public:
  ModeFunctions(const ToricModel& model, const PotentialSelector& sel, LatticePoint m);

  double h(const Eigen::VectorXd& x) const;
  double f(const Eigen::VectorXd& x) const;
  const LatticePoint& mode() const { return m_; }

 private:
  const ToricModel* model_;
  PotentialSelector sel_;
  LatticePoint m_;
  Eigen::VectorXd m_d_;
};

inline ModeFunctions mode_functions(const ToricModel& model, double s, LatticePoint m) {
  return ModeFunctions(model, PotentialSelector::family(s), std::move(m));
}

struct RegularityReport {
  double min_value = 0.0;
  double max_value = 0.0;
  double ratio = 0.0;
  bool pass = false;
  int samples = 0;
};

// Scans det(Hess(g_P + phi)) * prod ell_j on a grid graded toward each facet
// (distances 1e-1 .. 1e-6) plus interior bounding-box samples. The product
// extends the reciprocal of the boundary regularity factor and must stay
// positive and bounded.
RegularityReport regularity_scan(const ToricModel& model, int grid_density = 9);

}  // namespace tq

#endif
