#ifndef TQ_SRC_DENSITY_KERNELS_HPP
#define TQ_SRC_DENSITY_KERNELS_HPP

// Allocation-free evaluation kernels shared by the quadrature densities.
// Quadrature drives millions of node evaluations; everything here works on
// caller-owned flat buffers sized by kMaxDim / kMaxFacets.

#include <cmath>
#include <vector>

#include "tq/errors.hpp"
#include "tq/polynomial.hpp"
#include "tq/polytope.hpp"
#include "tq/potential.hpp"

namespace tq::detail {

constexpr int kMaxDim = 6;
constexpr int kMaxFacets = 64;

struct PolyKernel {
  int n = 0;
  int nterms = 0;
  std::vector<double> coef;
  std::vector<int> exps;  // nterms * n

  static PolyKernel from(const Polynomial& p) {
    PolyKernel k;
    k.n = p.dimension();
    k.nterms = static_cast<int>(p.terms().size());
    for (const auto& t : p.terms()) {
      k.coef.push_back(t.coefficient.to_double());
      for (int e : t.exponents) k.exps.push_back(e);
    }
    return k;
  }

  double value(const double* x) const {
    double acc = 0.0;
    for (int t = 0; t < nterms; ++t) {
      double m = coef[t];
      const int* e = &exps[t * n];
      for (int i = 0; i < n; ++i) {
        for (int p = 0; p < e[i]; ++p) m *= x[i];
      }
      acc += m;
    }
    return acc;
  }

  void add_gradient(const double* x, double scale, double* g) const {
    for (int t = 0; t < nterms; ++t) {
      const int* e = &exps[t * n];
      for (int k = 0; k < n; ++k) {
        if (e[k] == 0) continue;
        double m = scale * coef[t] * e[k];
        for (int i = 0; i < n; ++i) {
          const int p = (i == k) ? e[i] - 1 : e[i];
          for (int q = 0; q < p; ++q) m *= x[i];
        }
        g[k] += m;
      }
    }
  }

  void add_hessian(const double* x, double scale, double* h) const {
    for (int t = 0; t < nterms; ++t) {
      const int* e = &exps[t * n];
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          double factor;
          if (k == l) {
            if (e[k] < 2) continue;
            factor = static_cast<double>(e[k]) * (e[k] - 1);
          } else {
            if (e[k] == 0 || e[l] == 0) continue;
            factor = static_cast<double>(e[k]) * e[l];
          }
          double m = scale * coef[t] * factor;
          for (int i = 0; i < n; ++i) {
            int p = e[i];
            if (i == k) --p;
            if (i == l) --p;
            for (int q = 0; q < p; ++q) m *= x[i];
          }
          h[k * n + l] += m;
        }
      }
    }
  }
};

struct ModelKernel {
  int n = 0;
  int r = 0;
  std::vector<double> normals;  // r * n
  std::vector<double> lambda;
  std::vector<double> lambda_L;
  PolyKernel phi, psi;
  bool has_phi = false;

  static ModelKernel from(const ToricModel& m) {
    if (m.dimension() > kMaxDim || m.facet_count() > kMaxFacets) {
      fail(errc::unsupported, "model exceeds compiled dimension/facet limits");
    }
    ModelKernel k;
    k.n = m.dimension();
    k.r = m.facet_count();
    for (const Facet& f : m.facets()) {
      for (long long c : f.normal) k.normals.push_back(static_cast<double>(c));
      k.lambda_L.push_back(static_cast<double>(f.lambda_L));
      k.lambda.push_back(static_cast<double>(f.lambda_L) + 0.5);
    }
    k.phi = PolyKernel::from(m.phi());
    k.has_phi = k.phi.nterms > 0;
    k.psi = PolyKernel::from(m.psi());
    return k;
  }
};

struct SelectorKernel {
  double s = 0.0;
  double psi_shift = 0.0;
  PolyKernel extra;
  bool has_extra = false;

  static SelectorKernel from(const PotentialSelector& sel) {
    SelectorKernel k;
    k.s = sel.s;
    k.psi_shift = sel.psi_shift;
    if (sel.extra_phi.dimension() > 0 && !sel.extra_phi.is_zero()) {
      k.extra = PolyKernel::from(sel.extra_phi);
      k.has_extra = true;
    }
    return k;
  }
};

// In-place lower Cholesky of the row-major symmetric matrix a (n x n).
// Returns false when a is not positive definite.
inline bool cholesky(int n, const double* a, double* l) {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = a[i * n + j];
      for (int k = 0; k < j; ++k) sum -= l[i * n + k] * l[j * n + k];
      if (i == j) {
        if (!(sum > 0.0)) return false;
        l[i * n + i] = std::sqrt(sum);
      } else {
        l[i * n + j] = sum / l[j * n + j];
      }
    }
  }
  return true;
}

inline double cholesky_log_det(int n, const double* l) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += std::log(l[i * n + i]);
  return 2.0 * acc;
}

inline void cholesky_solve(int n, const double* l, const double* b, double* x) {
  for (int i = 0; i < n; ++i) {
    double sum = b[i];
    for (int k = 0; k < i; ++k) sum -= l[i * n + k] * x[k];
    x[i] = sum / l[i * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double sum = x[i];
    for (int k = i + 1; k < n; ++k) sum -= l[k * n + i] * x[k];
    x[i] = sum / l[i * n + i];
  }
}

struct Jet {
  double g = 0.0;
  double y[kMaxDim];
  double G[kMaxDim * kMaxDim];
  double L[kMaxDim * kMaxDim];
  double log_det_G = 0.0;
};

// Full jet of g = g_P + phi + extra + s*(psi - shift) at strictly interior x.
// Returns false when x is not interior or the Hessian fails Cholesky.
inline bool full_jet(const ModelKernel& mk, const SelectorKernel& sk, const double* x, Jet& out) {
  const int n = mk.n;
  double ell[kMaxFacets];
  for (int j = 0; j < mk.r; ++j) {
    double e = mk.lambda[j];
    const double* nu = &mk.normals[j * n];
    for (int k = 0; k < n; ++k) e += nu[k] * x[k];
    if (!(e > 0.0)) return false;
    ell[j] = e;
  }
  double g = 0.0;
  for (int k = 0; k < n; ++k) out.y[k] = 0.0;
  for (int k = 0; k < n * n; ++k) out.G[k] = 0.0;
  for (int j = 0; j < mk.r; ++j) {
    const double lg = std::log(ell[j]);
    g += 0.5 * ell[j] * lg;
    const double* nu = &mk.normals[j * n];
    const double yfac = 0.5 * (lg + 1.0);
    const double gfac = 0.5 / ell[j];
    for (int k = 0; k < n; ++k) {
      out.y[k] += yfac * nu[k];
      for (int l = 0; l <= k; ++l) out.G[k * n + l] += gfac * nu[k] * nu[l];
    }
  }
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l) out.G[k * n + l] = out.G[l * n + k];
  }
  if (mk.has_phi) {
    g += mk.phi.value(x);
    mk.phi.add_gradient(x, 1.0, out.y);
    mk.phi.add_hessian(x, 1.0, out.G);
  }
  if (sk.has_extra) {
    g += sk.extra.value(x);
    sk.extra.add_gradient(x, 1.0, out.y);
    sk.extra.add_hessian(x, 1.0, out.G);
  }
  if (sk.s != 0.0 || sk.psi_shift != 0.0) {
    g += sk.s * (mk.psi.value(x) - sk.psi_shift);
    mk.psi.add_gradient(x, sk.s, out.y);
    mk.psi.add_hessian(x, sk.s, out.G);
  }
  out.g = g;
  if (!cholesky(n, out.G, out.L)) return false;
  out.log_det_G = cholesky_log_det(n, out.L);
  return true;
}

// h_m = (x-m).y - g for a jet already evaluated at x.
inline double mode_h(int n, const Jet& jet, const double* x, const double* m) {
  double acc = -jet.g;
  for (int k = 0; k < n; ++k) acc += (x[k] - m[k]) * jet.y[k];
  return acc;
}

}  // namespace tq::detail

#endif
