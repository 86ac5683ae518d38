#include "tq/model_io.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "tq/errors.hpp"

namespace tq {

namespace {

using nlohmann::json;

Rational parse_rational_field(const json& j, const std::string& where) {
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  fail(errc::malformed_input, where + ": expected an integer or a \"p/q\" string");
}

Polynomial parse_polynomial(const json& j, int dimension, const std::string& where) {
  if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array()) {
    fail(errc::malformed_input, where + ": expected {\"terms\": [...]}");
  }
  Polynomial p(dimension);
  for (const auto& t : j["terms"]) {
    if (!t.is_object() || !t.contains("exp") || !t.contains("coef") || !t["exp"].is_array()) {
      fail(errc::malformed_input, where + ": each term needs \"exp\" and \"coef\"");
    }
    std::vector<int> exps;
    for (const auto& e : t["exp"]) {
      if (!e.is_number_integer()) fail(errc::malformed_input, where + ": exponents must be integers");
      exps.push_back(e.get<int>());
    }
    if (static_cast<int>(exps.size()) != dimension) {
      fail(errc::malformed_input, where + ": exponent arity does not match dimension");
    }
    p.add_term(std::move(exps), parse_rational_field(t["coef"], where + ".coef"));
  }
  return p;
}

json polynomial_to_json(const Polynomial& p) {
  json terms = json::array();
  for (const auto& t : p.terms()) {
    terms.push_back({{"exp", t.exponents}, {"coef", t.coefficient.str()}});
  }
  return json{{"terms", terms}};
}

}  // namespace

ToricModel parse_model(const std::string& json_text, const BuildOptions& options) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(errc::malformed_input, std::string("model file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(errc::malformed_input, "model file must contain a JSON object");
  if (!j.contains("dimension") || !j["dimension"].is_number_integer()) {
    fail(errc::malformed_input, "missing integer field \"dimension\"");
  }
  const int n = j["dimension"].get<int>();
  if (n < 1) fail(errc::malformed_input, "\"dimension\" must be at least 1");
  if (!j.contains("facets") || !j["facets"].is_array() || j["facets"].empty()) {
    fail(errc::malformed_input, "missing nonempty array field \"facets\"");
  }
  std::vector<Facet> facets;
  for (const auto& fj : j["facets"]) {
    if (!fj.is_object() || !fj.contains("normal") || !fj.contains("lambda_L") ||
        !fj["normal"].is_array() || !fj["lambda_L"].is_number_integer()) {
      fail(errc::malformed_input, "each facet needs \"normal\": [ints] and \"lambda_L\": int");
    }
    Facet f;
    for (const auto& c : fj["normal"]) {
      if (!c.is_number_integer()) fail(errc::malformed_input, "facet normals must be integral");
      f.normal.push_back(c.get<long long>());
    }
    if (static_cast<int>(f.normal.size()) != n) {
      fail(errc::malformed_input, "facet normal length does not match \"dimension\"");
    }
    f.lambda_L = fj["lambda_L"].get<long long>();
    facets.push_back(std::move(f));
  }

  Polynomial phi = j.contains("phi") ? parse_polynomial(j["phi"], n, "phi") : Polynomial::zero(n);
  std::optional<RationalVector> basepoint;
  if (j.contains("basepoint")) {
    if (!j["basepoint"].is_array()) fail(errc::malformed_input, "\"basepoint\" must be an array");
    RationalVector p;
    for (const auto& c : j["basepoint"]) p.push_back(parse_rational_field(c, "basepoint"));
    basepoint = std::move(p);
  }
  if (j.contains("psi")) {
    return ToricModel::build(std::move(facets), std::move(phi),
                             parse_polynomial(j["psi"], n, "psi"), std::move(basepoint), options);
  }
  return ToricModel::build(std::move(facets), std::move(phi), std::move(basepoint), options);
}

ToricModel load_model(const std::string& path, const BuildOptions& options) {
  std::ifstream in(path);
  if (!in) fail(errc::malformed_input, "cannot open model file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  ToricModel model = parse_model(buf.str(), options);
  model.name = std::filesystem::path(path).stem().string();
  return model;
}

std::string model_to_json(const ToricModel& model) {
  json facets = json::array();
  for (const auto& f : model.facets()) {
    facets.push_back({{"normal", f.normal}, {"lambda_L", f.lambda_L}});
  }
  json bp = json::array();
  for (const auto& c : model.basepoint()) bp.push_back(c.str());
  json j{{"dimension", model.dimension()},
         {"facets", facets},
         {"phi", polynomial_to_json(model.phi())},
         {"psi", polynomial_to_json(model.psi())},
         {"basepoint", bp}};
  return j.dump(2) + "\n";
}

void save_model(const ToricModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::malformed_input, "cannot write model file '" + path + "'");
  out << model_to_json(model);
}

}  // namespace tq
