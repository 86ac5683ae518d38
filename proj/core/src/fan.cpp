#include "tq/fan.hpp"

#include <algorithm>

#include "tq/errors.hpp"

namespace tq {

namespace {

IntMatrix transpose(const IntMatrix& m) {
  const std::size_t rows = m.size(), cols = m[0].size();
  IntMatrix t(cols, IntVector(rows));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) t[j][i] = m[i][j];
  }
  return t;
}

}  // namespace

Fan normal_fan(const ToricModel& model) {
  Fan fan;
  for (const Facet& f : model.facets()) fan.generators.push_back(f.normal);
  for (const VertexChart& c : model.charts()) fan.max_cones.push_back(c.facet_indices);
  return fan;
}

IntVector divisor_of_monomial(const ToricModel& model, const LatticePoint& m) {
  IntVector coeffs(model.facet_count());
  for (int j = 0; j < model.facet_count(); ++j) {
    coeffs[j] = dot(model.facets()[j].normal, m);
  }
  return coeffs;
}

bool holomorphic_section_test(const ToricModel& model, const LatticePoint& m) {
  for (int j = 0; j < model.facet_count(); ++j) {
    if (model.ell_L_at_lattice(j, m) < 0) return false;
  }
  return true;
}

IntVector transition_exponents(const ToricModel& model, const VertexChart& from,
                               const VertexChart& to) {
  (void)model;
  const IntMatrix from_inv = unimodular_inverse(from.rows);
  const IntVector w = mat_vec(from_inv, from.lambda_v_L);
  const IntVector aw = mat_vec(to.rows, w);
  IntVector out(to.lambda_v_L.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = to.lambda_v_L[i] - aw[i];
  return out;
}

IntVector canonical_chart_divisor(const ToricModel& model, const VertexChart& chart) {
  const IntMatrix inv = unimodular_inverse(chart.rows);
  const IntVector ones(model.dimension(), 1);
  const IntVector w = mat_vec(inv, ones);
  // div(dW_v) = div(w^w) - sum of all invariant divisors
  IntVector coeffs = divisor_of_monomial(model, w);
  for (auto& c : coeffs) c -= 1;
  return coeffs;
}

bool sqrtk_exists(const ToricModel& model) {
  // (a) parity of generator coordinates in every vertex basis
  bool parity = true;
  for (const VertexChart& chart : model.charts()) {
    const IntMatrix inv_t = transpose(unimodular_inverse(chart.rows));
    for (const Facet& f : model.facets()) {
      const IntVector coords = mat_vec(inv_t, f.normal);
      long long sum = 0;
      for (long long c : coords) sum += c;
      if (((sum % 2) + 2) % 2 != 1) {
        parity = false;
        break;
      }
    }
    if (!parity) break;
  }
  // (b) evenness of every canonical chart divisor
  bool even = true;
  for (const VertexChart& chart : model.charts()) {
    for (long long c : canonical_chart_divisor(model, chart)) {
      if (((c % 2) + 2) % 2 != 0) {
        even = false;
        break;
      }
    }
    if (!even) break;
  }
  if (parity != even) {
    fail(errc::criteria_disagree, "square-root criteria disagree: parity=" +
                                      std::to_string(parity) + " evenness=" +
                                      std::to_string(even));
  }
  return parity;
}

}  // namespace tq
