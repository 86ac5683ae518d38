#ifndef TQ_ERRORS_HPP
#define TQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tq {

enum class errc {
  malformed_input,
  non_delzant,
  non_convex_potential,
  empty_polytope,
  not_a_vertex,
  boundary_point,
  outside_polytope,
  mode_outside_pl,
  unsupported,
  newton_diverged,
  regularity_failure,
  quadrature_not_converged,
  cross_check_failed,
  non_integral_exponent,
  criteria_disagree,
  basis_mismatch,
  internal,
};

// validation: bad model data or violated preconditions (CLI exit 2)
// numerical: an iteration or quadrature failed to converge (CLI exit 3)
// logic: internal consistency sentinel tripped, i.e. a bug (CLI exit 1)
enum class error_category { validation, numerical, logic };

inline const char* errc_name(errc code) {
  switch (code) {
    case errc::malformed_input: return "MalformedInput";
    case errc::non_delzant: return "NonDelzant";
    case errc::non_convex_potential: return "NonConvexPotential";
    case errc::empty_polytope: return "EmptyPolytope";
    case errc::not_a_vertex: return "NotAVertex";
    case errc::boundary_point: return "BoundaryPoint";
    case errc::outside_polytope: return "OutsidePolytope";
    case errc::mode_outside_pl: return "ModeOutsidePL";
    case errc::unsupported: return "Unsupported";
    case errc::newton_diverged: return "NewtonDiverged";
    case errc::regularity_failure: return "RegularityFailure";
    case errc::quadrature_not_converged: return "QuadratureNotConverged";
    case errc::cross_check_failed: return "CrossCheckFailed";
    case errc::non_integral_exponent: return "NonIntegralExponent";
    case errc::criteria_disagree: return "CriteriaDisagree";
    case errc::basis_mismatch: return "BasisMismatch";
    case errc::internal: return "Internal";
  }
  return "Unknown";
}

inline error_category errc_category(errc code) {
  switch (code) {
    case errc::malformed_input:
    case errc::non_delzant:
    case errc::non_convex_potential:
    case errc::empty_polytope:
    case errc::not_a_vertex:
    case errc::boundary_point:
    case errc::outside_polytope:
    case errc::mode_outside_pl:
    case errc::unsupported:
      return error_category::validation;
    case errc::newton_diverged:
    case errc::regularity_failure:
    case errc::quadrature_not_converged:
    case errc::cross_check_failed:
      return error_category::numerical;
    default:
      return error_category::logic;
  }
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  errc code() const { return code_; }
  error_category category() const { return errc_category(code_); }
  const char* code_name() const { return errc_name(code_); }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace tq

#endif
