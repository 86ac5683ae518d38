#ifndef TQ_BKS_HPP
#define TQ_BKS_HPP

#include "tq/quantization.hpp"

namespace tq {

// Pairing of the mode-m monomial sections attached to two admissible
// potentials:  integral of exp(-h_m^I - h_m^J) sqrt(det((G_I + G_J)/2)).
// Distinct modes pair to zero structurally, so only the diagonal is computed.
struct BksEntry {
  LatticePoint m;
  PotentialSelector I, J;
  IntegralResult integral;
  double value = 0.0;
};

BksEntry bks_entry(const ToricModel& model, const PotentialSelector& I,
                   const PotentialSelector& J, const LatticePoint& m,
                   const QuadratureOptions& options = {});
BksEntry bks_entry(const ToricModel& model, double s_i, double s_j, const LatticePoint& m,
                   const QuadratureOptions& options = {});

// |bks(s1,s2) - bks(s1+delta, s2-delta)| / bks(s1,s2); the pairing depends on
// the family parameters only through s1+s2, so the defect is pure quadrature.
double additivity_defect(const ToricModel& model, const LatticePoint& m, double s1, double s2,
                         double delta, const QuadratureOptions& options = {});

struct UnitarityReport {
  LatticePoint m;
  double s = 0.0;
  double derivative = 0.0;  // d/ds of the squared norm, closed-form integrand
  double fd_check = 0.0;    // centered finite difference of norm_squared
  IntegralResult integral;
};

// Closed-form s-derivative of |sigma_s^m|^2 with psi normalized so psi(m) = 0,
// integrand (2(psi - (x-m).grad psi) + 1/2 tr(G_s^-1 Hess psi)) e^{-2h_m} sqrt(det G_s),
// cross-validated against a centered finite difference with step
// h = max(1e-3, 1e-3 s). Throws cross_check_failed when the two disagree
// beyond 1e-6 (1 + |derivative|).
UnitarityReport unitarity_derivative(const ToricModel& model, double s, const LatticePoint& m,
                                     const QuadratureOptions& options = {});

// Centered finite difference at s0 of N(s) = bks(s,s0)/sqrt(bks(s,s) bks(s0,s0)).
// N is identically 1 in exact arithmetic; the defect measures quadrature noise.
double horizontality_defect(const ToricModel& model, double s0, const LatticePoint& m,
                            double h = 1e-3, const QuadratureOptions& options = {});

}  // namespace tq

#endif
