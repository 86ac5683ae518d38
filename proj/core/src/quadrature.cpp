#include "tq/quadrature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <set>

#include "density_kernels.hpp"
#include "tq/errors.hpp"

namespace tq {

namespace {

constexpr int kMaxDim = detail::kMaxDim;

// 7-point Gauss-Legendre on [-1,1]; frozen literals keep node placement
// independent of libm differences.
constexpr double kGL7X[7] = {
    -0.9491079123427585245261897, -0.7415311855993944398638648,
    -0.4058451513773971669066064, 0.0,
    0.4058451513773971669066064,  0.7415311855993944398638648,
    0.9491079123427585245261897};
constexpr double kGL7W[7] = {
    0.1294849661688696932706114, 0.2797053914892766679014678,
    0.3818300505051189449503698, 0.4179591836734693877551020,
    0.3818300505051189449503698, 0.2797053914892766679014678,
    0.1294849661688696932706114};

// Tensor rule on the unit cube pushed through the Duffy-style map onto the
// reference simplex {s_i >= 0, sum s <= 1}; nodes stay strictly interior.
struct SimplexRule {
  int n = 0;
  int count = 0;
  std::vector<double> s;  // count * n barycentric-style coordinates
  std::vector<double> w;  // count, includes the map Jacobian

  explicit SimplexRule(int dim) : n(dim) {
    count = 1;
    for (int i = 0; i < n; ++i) count *= 7;
    s.resize(static_cast<std::size_t>(count) * n);
    w.resize(count);
    std::vector<int> idx(n, 0);
    for (int node = 0; node < count; ++node) {
      // s_i = u_i * prod_{j<i}(1-u_j); the running product is the Jacobian factor.
      double weight = 1.0;
      double remaining = 1.0;
      for (int i = 0; i < n; ++i) {
        const double u = 0.5 * (kGL7X[idx[i]] + 1.0);
        const double wu = 0.5 * kGL7W[idx[i]];
        s[static_cast<std::size_t>(node) * n + i] = remaining * u;
        weight *= wu * remaining;
        remaining *= (1.0 - u);
      }
      w[node] = weight;
      int k = n - 1;
      while (k >= 0 && idx[k] == 6) idx[k--] = 0;
      if (k >= 0) ++idx[k];
    }
  }
};

struct Cell {
  long long id = 0;
  double verts[kMaxDim * (kMaxDim + 1)];  // vertex v occupies verts[v*n .. v*n+n)
  double volume = 0.0;
  double self = 0.0;
  double child_sum = 0.0;
  double err = std::numeric_limits<double>::infinity();
  bool children_ready = false;
  std::unique_ptr<std::pair<Cell, Cell>> children;
};

struct Accumulator {  // Neumaier compensated sum
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  double get() const { return sum + comp; }
};

class Integrator {
 public:
  Integrator(const std::vector<SimplexD>& base, const LogDensityFn& log_density,
             const WeightFn* weight, const QuadratureOptions& options)
      : f_(log_density), weight_(weight), options_(options) {
    if (base.empty()) fail(errc::internal, "integration over an empty cell list");
    n_ = static_cast<int>(base[0].vertices.rows());
    if (n_ > kMaxDim) fail(errc::unsupported, "dimension exceeds compiled quadrature limit");
    rule_ = std::make_unique<SimplexRule>(n_);
    for (const SimplexD& s : base) {
      Cell c;
      c.id = next_id_++;
      for (int v = 0; v <= n_; ++v) {
        for (int k = 0; k < n_; ++k) c.verts[v * n_ + k] = s.vertices(k, v);
      }
      c.volume = cell_volume(c);
      leaves_.push_back(std::move(c));
    }
    total_volume_ = 0.0;
    for (const Cell& c : leaves_) total_volume_ += c.volume;
  }

  IntegralResult run() {
    if (options_.hint && options_.hint->scale > 0.0) prerefine();
    for (Cell& c : leaves_) c.self = evaluate(c);

    const int kMaxSweeps = 120;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      for (Cell& c : leaves_) ensure_children(c);
      Accumulator total, absolute;
      for (const Cell& c : leaves_) {
        total.add(c.child_sum);
        absolute.add(std::abs(c.children->first.self) + std::abs(c.children->second.self));
      }
      double threshold = options_.rel_tol *
                         std::max(std::abs(total.get()), 1e-3 * absolute.get());
      if (threshold <= 0.0) threshold = std::numeric_limits<double>::min();

      std::vector<Cell> next;
      next.reserve(leaves_.size());
      bool refined = false;
      for (Cell& c : leaves_) {
        const double cell_tol = threshold * (c.volume / total_volume_);
        if (c.err > cell_tol) {
          refined = true;
          next.push_back(std::move(c.children->first));
          next.push_back(std::move(c.children->second));
        } else {
          next.push_back(std::move(c));
        }
      }
      leaves_ = std::move(next);
      if (static_cast<long long>(leaves_.size()) > options_.max_cells) {
        fail(errc::quadrature_not_converged,
             "cell budget exhausted at rel_tol " + std::to_string(options_.rel_tol));
      }
      if (!refined) break;
      if (sweep == kMaxSweeps - 1) {
        fail(errc::quadrature_not_converged, "refinement did not settle");
      }
    }

    std::sort(leaves_.begin(), leaves_.end(),
              [](const Cell& a, const Cell& b) { return a.id < b.id; });
    Accumulator value, err;
    for (const Cell& c : leaves_) {
      value.add(c.child_sum);
      err.add(c.err);
    }
    IntegralResult out;
    out.value = value.get();
    out.abs_error_estimate = err.get();
    out.cells_used = static_cast<long long>(leaves_.size());
    if (!std::isfinite(out.value)) {
      fail(errc::quadrature_not_converged, "integral is not finite");
    }
    return out;
  }

 private:
  double cell_volume(const Cell& c) const {
    // |det(v_i - v_0)| / n!
    double m[kMaxDim * kMaxDim];
    for (int i = 0; i < n_; ++i) {
      for (int k = 0; k < n_; ++k) {
        m[i * n_ + k] = c.verts[(i + 1) * n_ + k] - c.verts[k];
      }
    }
    // LU with partial pivoting on the small matrix
    double det = 1.0;
    for (int col = 0; col < n_; ++col) {
      int p = col;
      for (int i = col + 1; i < n_; ++i) {
        if (std::abs(m[i * n_ + col]) > std::abs(m[p * n_ + col])) p = i;
      }
      if (p != col) {
        for (int k = 0; k < n_; ++k) std::swap(m[p * n_ + k], m[col * n_ + k]);
        det = -det;
      }
      const double piv = m[col * n_ + col];
      if (piv == 0.0) return 0.0;
      det *= piv;
      for (int i = col + 1; i < n_; ++i) {
        const double fmul = m[i * n_ + col] / piv;
        for (int k = col; k < n_; ++k) m[i * n_ + k] -= fmul * m[col * n_ + k];
      }
    }
    double fact = 1.0;
    for (int i = 2; i <= n_; ++i) fact *= i;
    return std::abs(det) / fact;
  }

  double evaluate(const Cell& c) const {
    const double scale = c.volume;  // rule weights already sum to 1/n! times Jacobian
    double fact = 1.0;
    for (int i = 2; i <= n_; ++i) fact *= i;
    const double measure = scale * fact;  // |det M|
    Accumulator acc;
    double x[kMaxDim];
    const double* v0 = &c.verts[0];
    for (int node = 0; node < rule_->count; ++node) {
      const double* s = &rule_->s[static_cast<std::size_t>(node) * n_];
      for (int k = 0; k < n_; ++k) {
        double xk = v0[k];
        for (int i = 0; i < n_; ++i) xk += s[i] * (c.verts[(i + 1) * n_ + k] - v0[k]);
        x[k] = xk;
      }
      const double le = f_(x);
      double contrib;
      if (le == -std::numeric_limits<double>::infinity()) {
        contrib = 0.0;
      } else {
        contrib = std::exp(le);
        if (weight_) contrib *= (*weight_)(x);
      }
      if (!std::isfinite(contrib) && contrib != 0.0) {
        fail(errc::quadrature_not_converged, "non-finite integrand value");
      }
      acc.add(rule_->w[node] * contrib);
    }
    return acc.get() * measure;
  }

  void make_children(const Cell& c, Cell& a, Cell& b) const {
    // longest edge, lexicographic tie-break
    int bi = 0, bj = 1;
    double best = -1.0;
    for (int i = 0; i <= n_; ++i) {
      for (int j = i + 1; j <= n_; ++j) {
        double d2 = 0.0;
        for (int k = 0; k < n_; ++k) {
          const double d = c.verts[i * n_ + k] - c.verts[j * n_ + k];
          d2 += d * d;
        }
        if (d2 > best) {
          best = d2;
          bi = i;
          bj = j;
        }
      }
    }
    double mid[kMaxDim];
    for (int k = 0; k < n_; ++k) {
      mid[k] = 0.5 * (c.verts[bi * n_ + k] + c.verts[bj * n_ + k]);
    }
    a = Cell{};
    b = Cell{};
    std::copy(c.verts, c.verts + (n_ + 1) * n_, a.verts);
    std::copy(c.verts, c.verts + (n_ + 1) * n_, b.verts);
    for (int k = 0; k < n_; ++k) {
      a.verts[bi * n_ + k] = mid[k];
      b.verts[bj * n_ + k] = mid[k];
    }
    a.volume = 0.5 * c.volume;
    b.volume = 0.5 * c.volume;
  }

  void ensure_children(Cell& c) {
    if (c.children_ready) return;
    c.children = std::make_unique<std::pair<Cell, Cell>>();
    make_children(c, c.children->first, c.children->second);
    c.children->first.id = next_id_++;
    c.children->second.id = next_id_++;
    c.children->first.self = evaluate(c.children->first);
    c.children->second.self = evaluate(c.children->second);
    c.child_sum = c.children->first.self + c.children->second.self;
    c.err = std::abs(c.self - c.child_sum);
    c.children_ready = true;
    created_ += 2;
    if (created_ > options_.max_cells) {
      fail(errc::quadrature_not_converged, "cell budget exhausted");
    }
  }

  void prerefine() {
    const Eigen::VectorXd& ctr = options_.hint->center;
    const double scale = options_.hint->scale;
    std::vector<Cell> out;
    std::vector<Cell> queue = std::move(leaves_);
    std::size_t head = 0;
    while (head < queue.size()) {
      Cell c = std::move(queue[head++]);
      bool overlaps = true;
      double longest = 0.0;
      for (int k = 0; k < n_ && overlaps; ++k) {
        double lo = c.verts[k], hi = c.verts[k];
        for (int v = 1; v <= n_; ++v) {
          lo = std::min(lo, c.verts[v * n_ + k]);
          hi = std::max(hi, c.verts[v * n_ + k]);
        }
        if (lo > ctr[k] + 6.0 * scale || hi < ctr[k] - 6.0 * scale) overlaps = false;
      }
      for (int i = 0; i <= n_; ++i) {
        for (int j = i + 1; j <= n_; ++j) {
          double d2 = 0.0;
          for (int k = 0; k < n_; ++k) {
            const double d = c.verts[i * n_ + k] - c.verts[j * n_ + k];
            d2 += d * d;
          }
          longest = std::max(longest, d2);
        }
      }
      if (overlaps && std::sqrt(longest) > scale) {
        Cell a, b;
        make_children(c, a, b);
        a.id = next_id_++;
        b.id = next_id_++;
        created_ += 2;
        if (created_ > options_.max_cells) {
          fail(errc::quadrature_not_converged, "cell budget exhausted in pre-refinement");
        }
        queue.push_back(std::move(a));
        queue.push_back(std::move(b));
      } else {
        out.push_back(std::move(c));
      }
    }
    std::sort(out.begin(), out.end(), [](const Cell& a, const Cell& b) { return a.id < b.id; });
    leaves_ = std::move(out);
  }

  const LogDensityFn& f_;
  const WeightFn* weight_;
  QuadratureOptions options_;
  int n_ = 0;
  std::unique_ptr<SimplexRule> rule_;
  std::vector<Cell> leaves_;
  double total_volume_ = 0.0;
  long long next_id_ = 0;
  long long created_ = 0;
};

// ---- triangulation ---------------------------------------------------------

int affine_dim(const std::vector<RationalVector>& pts) {
  if (pts.size() <= 1) return 0;
  RationalMatrix diffs;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    RationalVector d(pts[0].size());
    for (std::size_t k = 0; k < pts[0].size(); ++k) d[k] = pts[i][k] - pts[0][k];
    diffs.push_back(std::move(d));
  }
  return rational_rank(diffs);
}

void triangulate_face(const ToricModel& model, std::vector<RationalVector> face, int dim,
                      std::vector<std::vector<RationalVector>>& out) {
  std::sort(face.begin(), face.end(), lex_less);
  if (static_cast<int>(face.size()) == dim + 1) {
    out.push_back(face);
    return;
  }
  const RationalVector apex = face.front();
  std::set<std::vector<std::size_t>> seen;
  for (int j = 0; j < model.facet_count(); ++j) {
    std::vector<RationalVector> sub;
    std::vector<std::size_t> key;
    for (std::size_t i = 0; i < face.size(); ++i) {
      if (model.ell_rational(j, face[i]).is_zero()) {
        sub.push_back(face[i]);
        key.push_back(i);
      }
    }
    if (sub.size() == face.size() || sub.empty()) continue;
    if (std::find(sub.begin(), sub.end(), apex) != sub.end()) continue;
    if (affine_dim(sub) != dim - 1) continue;
    if (!seen.insert(key).second) continue;
    std::vector<std::vector<RationalVector>> pieces;
    triangulate_face(model, sub, dim - 1, pieces);
    for (auto& piece : pieces) {
      piece.push_back(apex);
      std::sort(piece.begin(), piece.end(), lex_less);
      out.push_back(std::move(piece));
    }
  }
}

}  // namespace

std::vector<Simplex> triangulate(const ToricModel& model) {
  std::vector<std::vector<RationalVector>> pieces;
  triangulate_face(model, model.vertices(PolytopeSelector::PX), model.dimension(), pieces);
  std::vector<Simplex> cells;
  for (auto& p : pieces) cells.push_back(Simplex{std::move(p)});
  return cells;
}

std::vector<SimplexD> to_double(const std::vector<Simplex>& cells) {
  std::vector<SimplexD> out;
  for (const Simplex& s : cells) {
    const int n = static_cast<int>(s.vertices[0].size());
    SimplexD d;
    d.vertices.resize(n, static_cast<int>(s.vertices.size()));
    for (std::size_t v = 0; v < s.vertices.size(); ++v) {
      for (int k = 0; k < n; ++k) d.vertices(k, static_cast<int>(v)) = s.vertices[v][k].to_double();
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<SimplexD> triangulate_d(const ToricModel& model) {
  return to_double(triangulate(model));
}

std::vector<SimplexD> box_cells(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  const int n = static_cast<int>(lo.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<SimplexD> out;
  do {
    SimplexD s;
    s.vertices.resize(n, n + 1);
    Eigen::VectorXd v = lo;
    s.vertices.col(0) = v;
    for (int k = 0; k < n; ++k) {
      v[perm[k]] = hi[perm[k]];
      s.vertices.col(k + 1) = v;
    }
    out.push_back(std::move(s));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

double simplex_volume(const SimplexD& cell) {
  const int n = static_cast<int>(cell.vertices.rows());
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) m.col(i) = cell.vertices.col(i + 1) - cell.vertices.col(0);
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  return std::abs(m.determinant()) / fact;
}

double total_volume(const std::vector<SimplexD>& cells) {
  double acc = 0.0;
  for (const auto& c : cells) acc += simplex_volume(c);
  return acc;
}

Rational simplex_volume_exact(const Simplex& cell) {
  const int n = static_cast<int>(cell.vertices[0].size());
  RationalMatrix m(n, RationalVector(n));
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) m[i][k] = cell.vertices[i + 1][k] - cell.vertices[0][k];
  }
  // rational determinant by elimination
  Rational det(1);
  for (int col = 0; col < n; ++col) {
    int p = col;
    while (p < n && m[p][col].is_zero()) ++p;
    if (p == n) return Rational(0);
    if (p != col) {
      std::swap(m[p], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (int i = col + 1; i < n; ++i) {
      if (m[i][col].is_zero()) continue;
      const Rational f = m[i][col] / m[col][col];
      for (int k = col; k < n; ++k) m[i][k] -= f * m[col][k];
    }
  }
  if (det.sign() < 0) det = -det;
  Rational fact(1);
  for (long long i = 2; i <= n; ++i) fact *= Rational(i);
  return det / fact;
}

IntegralResult integrate(const std::vector<SimplexD>& cells, const LogDensityFn& log_density,
                         const QuadratureOptions& options) {
  Integrator integrator(cells, log_density, nullptr, options);
  return integrator.run();
}

IntegralResult integrate_weighted(const std::vector<SimplexD>& cells,
                                  const LogDensityFn& log_envelope, const WeightFn& weight,
                                  const QuadratureOptions& options) {
  Integrator integrator(cells, log_envelope, &weight, options);
  return integrator.run();
}

}  // namespace tq
