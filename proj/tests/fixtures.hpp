#ifndef TQ_TESTS_FIXTURES_HPP
#define TQ_TESTS_FIXTURES_HPP

#include <string>

#include "tq/model_io.hpp"

namespace tq::testing {

inline std::string model_path(const std::string& stem) {
  return std::string(TQ_MODELS_DIR) + "/" + stem + ".json";
}

inline ToricModel load_fixture(const std::string& stem) {
  return load_model(model_path(stem));
}

}  // namespace tq::testing

#endif
