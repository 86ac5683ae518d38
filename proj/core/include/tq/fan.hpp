#ifndef TQ_FAN_HPP
#define TQ_FAN_HPP

#include "tq/polytope.hpp"

namespace tq {

// Normal fan of P_X. Generators are the facet normals in model order; each
// maximal cone is the set of facets active at one vertex. Always derived from
// the polytope, never supplied separately.
struct Fan {
  std::vector<IntVector> generators;
  std::vector<std::vector<int>> max_cones;  // indexed like model.charts()
};

Fan normal_fan(const ToricModel& model);

// Coefficients of div(w^m) on the invariant divisors: coeff_j = <nu_j, m>.
IntVector divisor_of_monomial(const ToricModel& model, const LatticePoint& m);

// div(w^m sigma) >= 0, i.e. <m, nu_j> + lambda_L_j >= 0 for all facets.
bool holomorphic_section_test(const ToricModel& model, const LatticePoint& m);

// Line-bundle transition exponent lambda^L_{to} - A_{to} A_{from}^{-1} lambda^L_{from};
// integral whenever both charts are unimodular.
IntVector transition_exponents(const ToricModel& model, const VertexChart& from,
                               const VertexChart& to);

// Divisor of the trivializing top form attached to the chart at v: zero on the
// facets through v, and <nu_i, A_v^{-1} 1> - 1 on every other facet.
IntVector canonical_chart_divisor(const ToricModel& model, const VertexChart& chart);

// Existence of a square root of the canonical bundle, computed two independent
// ways and cross-asserted:
//  (a) for every chart, each generator has odd coordinate sum in the chart basis;
//  (b) every canonical chart divisor is even.
bool sqrtk_exists(const ToricModel& model);

}  // namespace tq

#endif
