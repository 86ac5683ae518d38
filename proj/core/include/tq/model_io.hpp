#ifndef TQ_MODEL_IO_HPP
#define TQ_MODEL_IO_HPP

#include <string>

#include "tq/polytope.hpp"

namespace tq {

// Model file schema:
//   {"dimension": n,
//    "facets": [{"normal": [ints], "lambda_L": int}, ...],
//    "phi":  {"terms": [{"exp": [ints], "coef": "p/q"}]},   // optional, default 0
//    "psi":  {"terms": [...]},                              // optional, default 1/2|x-p|^2
//    "basepoint": ["p/q", ...]}                             // optional, default barycenter
// Rational strings are parsed exactly.
ToricModel load_model(const std::string& path, const BuildOptions& options = {});
ToricModel parse_model(const std::string& json_text, const BuildOptions& options = {});
std::string model_to_json(const ToricModel& model);
void save_model(const ToricModel& model, const std::string& path);

}  // namespace tq

#endif
