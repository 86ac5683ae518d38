#include "tq/polytope.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include "tq/errors.hpp"

namespace tq {

namespace {

long long vector_gcd(const IntVector& v) {
  long long g = 0;
  for (long long e : v) g = std::gcd(g, e < 0 ? -e : e);
  return g;
}

// Enumerates the vertices of {x : <nu_j, x> + offset_j >= 0} by solving all
// n-subsets of facet equalities; r choose n stays tiny at desk scale.
std::vector<RationalVector> enumerate_vertices(const std::vector<Facet>& facets,
                                               const std::vector<Rational>& offsets) {
  const int r = static_cast<int>(facets.size());
  const int n = static_cast<int>(facets[0].normal.size());
  std::vector<RationalVector> found;
  // iterate over n-subsets in lexicographic order
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  auto advance = [&]() -> bool {
    int i = n - 1;
    while (i >= 0 && idx[i] == r - n + i) --i;
    if (i < 0) return false;
    ++idx[i];
    for (int j = i + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
    return true;
  };
  do {
    RationalMatrix a(n, RationalVector(n));
    RationalVector b(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a[i][j] = Rational(facets[idx[i]].normal[j]);
      b[i] = -offsets[idx[i]];
    }
    auto x = solve_rational(std::move(a), std::move(b));
    if (!x) continue;
    bool feasible = true;
    for (int j = 0; j < r && feasible; ++j) {
      Rational v(0);
      for (int k = 0; k < n; ++k) v += Rational(facets[j].normal[k]) * (*x)[k];
      v += offsets[j];
      if (v.sign() < 0) feasible = false;
    }
    if (feasible) found.push_back(std::move(*x));
  } while (advance());
  std::sort(found.begin(), found.end(), lex_less);
  found.erase(std::unique(found.begin(), found.end()), found.end());
  return found;
}

// Recession cone test: the polyhedron is unbounded iff some nonzero direction
// satisfies <nu_j, d> >= 0 for all j. Extreme rays of a pointed cone lie on
// n-1 independent active constraints, and a non-pointed cone contains a line
// in the kernel of the whole normal matrix.
bool is_unbounded(const std::vector<Facet>& facets, int n) {
  const int r = static_cast<int>(facets.size());
  RationalMatrix all(r, RationalVector(n));
  for (int j = 0; j < r; ++j) {
    for (int k = 0; k < n; ++k) all[j][k] = Rational(facets[j].normal[k]);
  }
  if (rational_rank(all) < n) return true;
  auto feasible_dir = [&](const RationalVector& d) {
    bool plus = true, minus = true;
    for (int j = 0; j < r; ++j) {
      Rational v(0);
      for (int k = 0; k < n; ++k) v += Rational(facets[j].normal[k]) * d[k];
      if (v.sign() < 0) plus = false;
      if (v.sign() > 0) minus = false;
    }
    return plus || minus;
  };
  if (n == 1) return feasible_dir({Rational(1)});
  std::vector<int> idx(n - 1);
  std::iota(idx.begin(), idx.end(), 0);
  auto advance = [&]() -> bool {
    int i = n - 2;
    while (i >= 0 && idx[i] == r - (n - 1) + i) --i;
    if (i < 0) return false;
    ++idx[i];
    for (int j = i + 1; j < n - 1; ++j) idx[j] = idx[j - 1] + 1;
    return true;
  };
  do {
    RationalMatrix sub(n - 1, RationalVector(n));
    for (int i = 0; i < n - 1; ++i) {
      for (int k = 0; k < n; ++k) sub[i][k] = Rational(facets[idx[i]].normal[k]);
    }
    auto d = kernel_direction(sub);
    if (d && feasible_dir(*d)) return true;
  } while (advance());
  return false;
}

RationalVector barycenter(const std::vector<RationalVector>& pts) {
  const int n = static_cast<int>(pts[0].size());
  RationalVector bc(n, Rational(0));
  for (const auto& p : pts) {
    for (int k = 0; k < n; ++k) bc[k] += p[k];
  }
  const Rational count(static_cast<long long>(pts.size()));
  for (auto& c : bc) c /= count;
  return bc;
}

bool spd_check(const Eigen::MatrixXd& h) {
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  return llt.info() == Eigen::Success;
}

}  // namespace

ToricModel ToricModel::build(std::vector<Facet> facets, Polynomial phi,
                             std::optional<RationalVector> basepoint,
                             const BuildOptions& options) {
  return build(std::move(facets), std::move(phi), Polynomial(), std::move(basepoint), options);
}

ToricModel ToricModel::build(std::vector<Facet> facets, Polynomial phi, Polynomial psi,
                             std::optional<RationalVector> basepoint,
                             const BuildOptions& options) {
  if (facets.empty()) fail(errc::malformed_input, "model has no facets");
  const int n = static_cast<int>(facets[0].normal.size());
  if (n < 1) fail(errc::malformed_input, "facet normals must have positive length");
  const int r = static_cast<int>(facets.size());
  if (r < n + 1) fail(errc::non_delzant, "fewer than n+1 facets; P_X cannot be bounded");
  for (const Facet& f : facets) {
    if (static_cast<int>(f.normal.size()) != n) {
      fail(errc::malformed_input, "facet normals of mixed lengths");
    }
    const long long g = vector_gcd(f.normal);
    if (g == 0) fail(errc::malformed_input, "zero facet normal");
    if (g != 1) fail(errc::malformed_input, "facet normal is not primitive");
  }

  ToricModel model;
  model.n_ = n;
  model.facets_ = std::move(facets);
  if (phi.is_zero() && phi.dimension() == 0) phi = Polynomial::zero(n);
  if (phi.dimension() != n) fail(errc::malformed_input, "phi arity does not match dimension");
  model.phi_ = std::move(phi);

  std::vector<Rational> offsets_px(r), offsets_pl(r);
  for (int j = 0; j < r; ++j) {
    offsets_px[j] = model.facets_[j].lambda();
    offsets_pl[j] = Rational(model.facets_[j].lambda_L);
  }

  model.vertices_px_ = enumerate_vertices(model.facets_, offsets_px);
  if (model.vertices_px_.empty()) {
    fail(errc::non_delzant, "P_X has no vertices (empty or unbounded)");
  }
  if (is_unbounded(model.facets_, n)) fail(errc::non_delzant, "P_X is unbounded");
  {
    const RationalVector bc = barycenter(model.vertices_px_);
    for (int j = 0; j < r; ++j) {
      if (model.ell_rational(j, bc).sign() <= 0) {
        fail(errc::non_delzant, "P_X is not full-dimensional");
      }
    }
  }

  // Delzant: exactly n facets active at each vertex, forming a lattice basis.
  for (const RationalVector& v : model.vertices_px_) {
    VertexChart chart;
    chart.vertex = v;
    for (int j = 0; j < r; ++j) {
      if (model.ell_rational(j, v).is_zero()) chart.facet_indices.push_back(j);
    }
    if (static_cast<int>(chart.facet_indices.size()) != n) {
      fail(errc::non_delzant, "vertex " + to_string(v) + " meets " +
                                  std::to_string(chart.facet_indices.size()) +
                                  " facets, expected " + std::to_string(n));
    }
    for (int j : chart.facet_indices) {
      chart.rows.push_back(model.facets_[j].normal);
      chart.lambda_v.push_back(model.facets_[j].lambda());
      chart.lambda_v_L.push_back(model.facets_[j].lambda_L);
    }
    chart.det = integer_determinant(chart.rows);
    if (chart.det != 1 && chart.det != -1) {
      fail(errc::non_delzant, "vertex " + to_string(v) + " has normal determinant " +
                                  std::to_string(chart.det));
    }
    model.charts_.push_back(std::move(chart));
  }

  model.vertices_pl_ = enumerate_vertices(model.facets_, offsets_pl);
  if (model.vertices_pl_.empty()) {
    model.pl_status_ = PLStatus::Empty;
  } else {
    const RationalVector bc = barycenter(model.vertices_pl_);
    bool strict = true;
    for (int j = 0; j < r && strict; ++j) {
      if (model.ell_L_rational(j, bc).sign() <= 0) strict = false;
    }
    model.pl_status_ = strict ? PLStatus::FullDimensional : PLStatus::LowerDimensional;
    if (strict) {
      auto active_sets = [&](const std::vector<RationalVector>& verts, bool shifted) {
        std::set<std::vector<int>> sets;
        for (const auto& v : verts) {
          std::vector<int> act;
          for (int j = 0; j < r; ++j) {
            const Rational e = shifted ? model.ell_L_rational(j, v) : model.ell_rational(j, v);
            if (e.is_zero()) act.push_back(j);
          }
          sets.insert(act);
        }
        return sets;
      };
      model.pl_same_fan_ = active_sets(model.vertices_px_, false) ==
                           active_sets(model.vertices_pl_, true);
    }
  }

  // Lattice points of P_L via bounding-box scan.
  if (!model.vertices_pl_.empty()) {
    auto [lo, hi] = [&]() {
      RationalVector lo = model.vertices_pl_[0], hi = model.vertices_pl_[0];
      for (const auto& v : model.vertices_pl_) {
        for (int k = 0; k < n; ++k) {
          if (v[k] < lo[k]) lo[k] = v[k];
          if (hi[k] < v[k]) hi[k] = v[k];
        }
      }
      return std::make_pair(lo, hi);
    }();
    LatticePoint m(n);
    std::vector<long long> lo_i(n), hi_i(n);
    for (int k = 0; k < n; ++k) {
      lo_i[k] = lo[k].ceil();
      hi_i[k] = hi[k].floor();
      m[k] = lo_i[k];
    }
    bool any_axis_empty = false;
    for (int k = 0; k < n; ++k) any_axis_empty |= lo_i[k] > hi_i[k];
    while (!any_axis_empty) {
      if (model.pl_contains_lattice(m)) model.lattice_points_.push_back(m);
      int k = n - 1;
      while (k >= 0 && m[k] == hi_i[k]) {
        m[k] = lo_i[k];
        --k;
      }
      if (k < 0) break;
      ++m[k];
    }
    std::sort(model.lattice_points_.begin(), model.lattice_points_.end());
  }

  // Basepoint: strictly interior; defaults to the vertex barycenter.
  if (basepoint) {
    if (static_cast<int>(basepoint->size()) != n) {
      fail(errc::malformed_input, "basepoint arity does not match dimension");
    }
    if (!model.interior_contains_rational(*basepoint)) {
      fail(errc::malformed_input, "basepoint is not strictly interior to P_X");
    }
    model.basepoint_ = std::move(*basepoint);
  } else {
    model.basepoint_ = barycenter(model.vertices_px_);
  }

  if (psi.is_zero() && psi.dimension() == 0) {
    psi = Polynomial::half_square_distance(model.basepoint_);
  }
  if (psi.dimension() != n) fail(errc::malformed_input, "psi arity does not match dimension");
  model.psi_ = std::move(psi);

  // Convexity validation grid: Hess(g_P + phi) on interior samples, Hess psi
  // on all samples of the closed polytope including the vertices.
  {
    const auto [lo, hi] = model.bounding_box(PolytopeSelector::PX);
    const int g = std::max(2, options.convexity_grid);
    std::vector<RationalVector> samples;
    RationalVector point(n);
    std::vector<int> ticks(n, 0);
    while (true) {
      for (int k = 0; k < n; ++k) {
        point[k] = lo[k] + (hi[k] - lo[k]) * Rational(ticks[k]) / Rational(g - 1);
      }
      samples.push_back(point);
      int k = n - 1;
      while (k >= 0 && ticks[k] == g - 1) ticks[k--] = 0;
      if (k < 0) break;
      ++ticks[k];
    }
    samples.insert(samples.end(), model.vertices_px_.begin(), model.vertices_px_.end());

    const Eigen::MatrixXd normals = model.normals_d();
    for (const RationalVector& s : samples) {
      if (!model.contains_rational(s)) continue;
      Eigen::VectorXd x(n);
      for (int k = 0; k < n; ++k) x[k] = s[k].to_double();
      if (!spd_check(model.psi_.hessian(x))) {
        fail(errc::non_convex_potential,
             "Hess psi not positive definite at " + to_string(s));
      }
      if (!model.interior_contains_rational(s)) continue;
      Eigen::MatrixXd h = model.phi_.hessian(x);
      for (int j = 0; j < r; ++j) {
        const double e = model.ell(j, x);
        h += 0.5 / e * (normals.row(j).transpose() * normals.row(j));
      }
      if (!spd_check(h)) {
        fail(errc::non_convex_potential,
             "Hess(g_P + phi) not positive definite at " + to_string(s));
      }
    }
  }

  return model;
}

const std::vector<RationalVector>& ToricModel::vertices(PolytopeSelector which) const {
  if (which == PolytopeSelector::PX) return vertices_px_;
  if (vertices_pl_.empty()) fail(errc::empty_polytope, "P_L is empty");
  return vertices_pl_;
}

const VertexChart& ToricModel::vertex_chart(const RationalVector& v) const {
  for (const VertexChart& c : charts_) {
    if (c.vertex == v) return c;
  }
  fail(errc::not_a_vertex, to_string(v) + " is not a vertex of P_X");
}

std::vector<std::pair<double, double>> ToricModel::ell_values(const Eigen::VectorXd& x) const {
  std::vector<std::pair<double, double>> out;
  out.reserve(facets_.size());
  for (int j = 0; j < facet_count(); ++j) out.emplace_back(ell(j, x), ell_L(j, x));
  return out;
}

double ToricModel::ell(int facet, const Eigen::VectorXd& x) const {
  return ell_L(facet, x) + 0.5;
}

double ToricModel::ell_L(int facet, const Eigen::VectorXd& x) const {
  const Facet& f = facets_[facet];
  double acc = static_cast<double>(f.lambda_L);
  for (int k = 0; k < n_; ++k) acc += static_cast<double>(f.normal[k]) * x[k];
  return acc;
}

Rational ToricModel::ell_rational(int facet, const RationalVector& x) const {
  return ell_L_rational(facet, x) + Rational::half();
}

Rational ToricModel::ell_L_rational(int facet, const RationalVector& x) const {
  const Facet& f = facets_[facet];
  Rational acc(f.lambda_L);
  for (int k = 0; k < n_; ++k) acc += Rational(f.normal[k]) * x[k];
  return acc;
}

long long ToricModel::ell_L_at_lattice(int facet, const LatticePoint& m) const {
  const Facet& f = facets_[facet];
  return dot(f.normal, m) + f.lambda_L;
}

bool ToricModel::interior_contains(const Eigen::VectorXd& x) const {
  for (int j = 0; j < facet_count(); ++j) {
    if (ell(j, x) <= 0.0) return false;
  }
  return true;
}

bool ToricModel::contains_rational(const RationalVector& x) const {
  for (int j = 0; j < facet_count(); ++j) {
    if (ell_rational(j, x).sign() < 0) return false;
  }
  return true;
}

bool ToricModel::interior_contains_rational(const RationalVector& x) const {
  for (int j = 0; j < facet_count(); ++j) {
    if (ell_rational(j, x).sign() <= 0) return false;
  }
  return true;
}

bool ToricModel::pl_contains_lattice(const LatticePoint& m) const {
  for (int j = 0; j < facet_count(); ++j) {
    if (ell_L_at_lattice(j, m) < 0) return false;
  }
  return true;
}

std::pair<RationalVector, RationalVector> ToricModel::bounding_box(PolytopeSelector which) const {
  const auto& verts = vertices(which);
  RationalVector lo = verts[0], hi = verts[0];
  for (const auto& v : verts) {
    for (int k = 0; k < n_; ++k) {
      if (v[k] < lo[k]) lo[k] = v[k];
      if (hi[k] < v[k]) hi[k] = v[k];
    }
  }
  return {lo, hi};
}

Eigen::VectorXd ToricModel::basepoint_d() const {
  Eigen::VectorXd p(n_);
  for (int k = 0; k < n_; ++k) p[k] = basepoint_[k].to_double();
  return p;
}

Eigen::MatrixXd ToricModel::normals_d() const {
  Eigen::MatrixXd m(facet_count(), n_);
  for (int j = 0; j < facet_count(); ++j) {
    for (int k = 0; k < n_; ++k) m(j, k) = static_cast<double>(facets_[j].normal[k]);
  }
  return m;
}

}  // namespace tq
