#ifndef TQ_QUADRATURE_HPP
#define TQ_QUADRATURE_HPP

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <vector>

#include "tq/polytope.hpp"

namespace tq {

// Exact simplex used by the triangulation layer.
struct Simplex {
  std::vector<RationalVector> vertices;  // n+1 points
};

// Fan triangulation of P_X from the lexicographically first vertex; simplices
// cover the polytope with disjoint interiors.
std::vector<Simplex> triangulate(const ToricModel& model);

// Double-precision simplex consumed by the integrator: one column per vertex.
struct SimplexD {
  Eigen::MatrixXd vertices;  // n x (n+1)
};

std::vector<SimplexD> to_double(const std::vector<Simplex>& cells);
std::vector<SimplexD> triangulate_d(const ToricModel& model);
// Kuhn triangulation of an axis-aligned box into n! simplices.
std::vector<SimplexD> box_cells(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

double simplex_volume(const SimplexD& cell);
double total_volume(const std::vector<SimplexD>& cells);
Rational simplex_volume_exact(const Simplex& cell);

struct IntegralResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  long long cells_used = 0;
};

// Optional concentration hint: the mesh is pre-refined to edge length <= scale
// inside the box center +- 6*scale before adaptation starts.
struct ConcentrationHint {
  Eigen::VectorXd center;
  double scale = 0.0;
};

struct QuadratureOptions {
  double rel_tol = 1e-8;
  long long max_cells = 1LL << 20;
  std::optional<ConcentrationHint> hint;
};

// log-density over the open interior; may return -inf where the density
// vanishes. Nodes are strictly interior (open tensor Gauss-Legendre rule on
// Duffy-mapped simplices), so boundary blowups of the log are never touched.
using LogDensityFn = std::function<double(const double*)>;
// Optional smooth signed factor applied in linear domain.
using WeightFn = std::function<double(const double*)>;

// Adaptive longest-edge bisection with a two-level error estimate per cell and
// per-cell tolerance proportional to volume share. Deterministic: fixed
// traversal order and compensated accumulation over cells sorted by index.
IntegralResult integrate(const std::vector<SimplexD>& cells, const LogDensityFn& log_density,
                         const QuadratureOptions& options = {});
IntegralResult integrate_weighted(const std::vector<SimplexD>& cells,
                                  const LogDensityFn& log_envelope, const WeightFn& weight,
                                  const QuadratureOptions& options = {});

}  // namespace tq

#endif
