#ifndef TQ_QUANTIZATION_HPP
#define TQ_QUANTIZATION_HPP

#include <complex>

#include "tq/potential.hpp"
#include "tq/quadrature.hpp"

namespace tq {

// Pointwise norm density of the monomial section for mode m at family
// parameter s: exp(-2 h_m) sqrt(det G_s) on the interior, extended
// continuously to the boundary (0 on facets with ell_L(m) > 0, a finite
// positive limit where ell_L(m) = 0).
double pointwise_density(const ToricModel& model, double s, const LatticePoint& m,
                         const Eigen::VectorXd& x);
double pointwise_density(const ToricModel& model, const PotentialSelector& sel,
                         const LatticePoint& m, const Eigen::VectorXd& x);

// L2 norm squared of the monomial section: integral of the pointwise density
// over P_X, with a concentration hint at (m, 1/sqrt(s)).
IntegralResult norm_squared(const ToricModel& model, double s, const LatticePoint& m,
                            const QuadratureOptions& options = {});
IntegralResult norm_squared(const ToricModel& model, const PotentialSelector& sel,
                            const LatticePoint& m, const QuadratureOptions& options = {});

// Leading-order prediction pi^(n/2) exp(2 g_s(m)) for the norm squared.
double laplace_prediction(const ToricModel& model, double s, const LatticePoint& m);
double laplace_prediction(const ToricModel& model, const PotentialSelector& sel,
                          const LatticePoint& m);

// Normalized pairing of the L2-normalized half-density section against the
// invariant test profile t:
//   [ integral exp(-h_m) sqrt(det G_s) t dx ] / sqrt(norm_squared).
// Converges to 2^(n/2) pi^(n/4) t(m) as s grows. psi is shifted internally so
// psi(m) = 0 (the pairing is invariant under that shift).
double delta_pairing(const ToricModel& model, double s, const LatticePoint& m,
                     const Polynomial& t, const QuadratureOptions& options = {});

// Fraction of norm_squared carried by the box |x - m|_inf <= radius/sqrt(s).
double concentration_mass(const ToricModel& model, double s, const LatticePoint& m,
                          double radius = 6.0, const QuadratureOptions& options = {});

// Half-density ratio against a constant frame. Columns of a and b give the
// (d/dx, d/dtheta) components of each frame field; the matrix pairing is
// M = G_s a + i b and the ratio |det M|^(1/2) / (det G_s)^(1/2) tends to
// |det a|^(1/2) as s grows.
double half_density_ratio(const ToricModel& model, double s, const Eigen::VectorXd& x,
                          const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

enum class BSStatus { InBasis, NontrivialHolonomy, BoundaryObstructed };

struct BohrSommerfeldVerdict {
  RationalVector point;
  BSStatus status = BSStatus::NontrivialHolonomy;
  // Interior points: one holonomy phase e^{2 pi i x_k} per torus generator.
  // Boundary points: the phase -1 of each collapsed cycle.
  std::vector<std::complex<double>> phases;
  std::vector<int> collapsed_facets;  // active facets for boundary points
};

// Limit-holonomy test of the degenerate connection. Exact rational input so
// boundary and integrality checks carry no rounding.
BohrSommerfeldVerdict bs_condition(const ToricModel& model, const RationalVector& x);

// Integer points of P_X that pass bs_condition == InBasis; asserted equal to
// lattice_points(P_L).
std::vector<LatticePoint> real_basis(const ToricModel& model);

const char* bs_status_name(BSStatus status);

}  // namespace tq

#endif
