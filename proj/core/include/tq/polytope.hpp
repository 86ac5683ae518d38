#ifndef TQ_POLYTOPE_HPP
#define TQ_POLYTOPE_HPP

#include <Eigen/Core>
#include <optional>
#include <utility>
#include <vector>

#include "tq/exact_linalg.hpp"
#include "tq/polynomial.hpp"
#include "tq/rational.hpp"

namespace tq {

// One facet inequality <normal, x> + lambda >= 0 with the half-shifted integer
// offset lambda_L = lambda - 1/2. Normals are primitive, inward pointing.
struct Facet {
  IntVector normal;
  long long lambda_L = 0;

  Rational lambda() const { return Rational(lambda_L) + Rational::half(); }
};

enum class PolytopeSelector { PX, PL };
enum class PLStatus { FullDimensional, LowerDimensional, Empty };

struct VertexChart {
  RationalVector vertex;
  std::vector<int> facet_indices;  // ascending
  IntMatrix rows;                  // rows = normals of the active facets
  RationalVector lambda_v;
  IntVector lambda_v_L;
  long long det = 0;  // +1 or -1
};

struct BuildOptions {
  int convexity_grid = 9;  // samples per axis for the Hessian validation grid
};

using LatticePoint = IntVector;

// Validated Delzant data plus the potential terms. Immutable after build;
// concurrent readers are safe.
class ToricModel {
 public:
  static ToricModel build(std::vector<Facet> facets, Polynomial phi, Polynomial psi,
                          std::optional<RationalVector> basepoint = std::nullopt,
                          const BuildOptions& options = {});
  // Same, with the default psi = half_square_distance(basepoint).
  static ToricModel build(std::vector<Facet> facets, Polynomial phi,
                          std::optional<RationalVector> basepoint = std::nullopt,
                          const BuildOptions& options = {});

  int dimension() const { return n_; }
  int facet_count() const { return static_cast<int>(facets_.size()); }
  const std::vector<Facet>& facets() const { return facets_; }
  const Polynomial& phi() const { return phi_; }
  const Polynomial& psi() const { return psi_; }
  const RationalVector& basepoint() const { return basepoint_; }
  std::string name;  // optional label carried into reports

  PLStatus pl_status() const { return pl_status_; }
  // Meaningful only when P_L is full-dimensional.
  std::optional<bool> pl_same_normal_fan() const { return pl_same_fan_; }

  const std::vector<RationalVector>& vertices(PolytopeSelector which) const;
  const std::vector<VertexChart>& charts() const { return charts_; }
  const VertexChart& vertex_chart(const RationalVector& v) const;

  const std::vector<LatticePoint>& lattice_points() const { return lattice_points_; }
  int quantum_dimension() const { return static_cast<int>(lattice_points_.size()); }

  // Affine facet values at a real point: (ell_j, ell_j^L) for every facet.
  std::vector<std::pair<double, double>> ell_values(const Eigen::VectorXd& x) const;
  double ell(int facet, const Eigen::VectorXd& x) const;
  double ell_L(int facet, const Eigen::VectorXd& x) const;
  Rational ell_rational(int facet, const RationalVector& x) const;
  Rational ell_L_rational(int facet, const RationalVector& x) const;
  long long ell_L_at_lattice(int facet, const LatticePoint& m) const;

  bool interior_contains(const Eigen::VectorXd& x) const;
  bool contains_rational(const RationalVector& x) const;        // closed P_X
  bool interior_contains_rational(const RationalVector& x) const;
  bool pl_contains_lattice(const LatticePoint& m) const;

  // Componentwise bounding box of the selected polytope's vertices.
  std::pair<RationalVector, RationalVector> bounding_box(PolytopeSelector which) const;

  Eigen::VectorXd basepoint_d() const;
  Eigen::MatrixXd normals_d() const;  // r x n

 private:
  ToricModel() = default;

  int n_ = 0;
  std::vector<Facet> facets_;
  Polynomial phi_, psi_;
  RationalVector basepoint_;
  std::vector<RationalVector> vertices_px_, vertices_pl_;
  std::vector<VertexChart> charts_;
  std::vector<LatticePoint> lattice_points_;
  PLStatus pl_status_ = PLStatus::Empty;
  std::optional<bool> pl_same_fan_;
};

}  // namespace tq

#endif
