#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "run.hpp"
#include "tq/bks.hpp"
#include "tq/errors.hpp"
#include "tq/fan.hpp"
#include "tq/model_io.hpp"
#include "tq/quantization.hpp"

namespace tq::cli {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string mode_str(const LatticePoint& m) {
  std::string out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(m[i]);
  }
  return out;
}

std::string vertex_str(const RationalVector& v) { return to_string(v, ';'); }

std::string vertices_str(const std::vector<RationalVector>& vs) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += '|';
    out += vertex_str(vs[i]);
  }
  return out;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void validate(const RunConfig& config) {
  if (!(config.rel_tol > 1e-14 && config.rel_tol < 1e-2)) {
    fail(errc::malformed_input, "rel_tol must lie in (1e-14, 1e-2)");
  }
  if (config.max_cells < 1) fail(errc::malformed_input, "max_cells must be positive");
  if (config.threads < 1) fail(errc::malformed_input, "threads must be positive");
  if (config.format != "csv" && config.format != "json") {
    fail(errc::malformed_input, "format must be csv or json");
  }
  double prev = -1.0;
  for (double s : config.s_schedule) {
    if (s < 0.0) fail(errc::malformed_input, "s-schedule entries must be nonnegative");
    if (s < prev) fail(errc::malformed_input, "s-schedule must be ascending");
    prev = s;
  }
}

LatticePoint parse_mode(const std::string& text, int dimension) {
  LatticePoint m;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    try {
      m.push_back(std::stoll(part));
    } catch (const std::exception&) {
      fail(errc::malformed_input, "bad mode component '" + part + "'");
    }
  }
  if (static_cast<int>(m.size()) != dimension) {
    fail(errc::malformed_input, "mode '" + text + "' does not match model dimension");
  }
  return m;
}

RationalVector parse_point(const std::string& text, int dimension) {
  RationalVector p;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) p.push_back(Rational::parse(part));
  if (static_cast<int>(p.size()) != dimension) {
    fail(errc::malformed_input, "point '" + text + "' does not match model dimension");
  }
  return p;
}

std::vector<LatticePoint> select_modes(const ToricModel& model, const RunConfig& config) {
  if (config.modes.empty() || (config.modes.size() == 1 && config.modes[0] == "all")) {
    return model.lattice_points();
  }
  std::vector<LatticePoint> out;
  for (const std::string& text : config.modes) {
    LatticePoint m = parse_mode(text, model.dimension());
    if (!model.pl_contains_lattice(m)) {
      fail(errc::mode_outside_pl, "mode " + text + " is not in P_L");
    }
    out.push_back(std::move(m));
  }
  return out;
}

QuadratureOptions quad_options(const RunConfig& config) {
  QuadratureOptions opts;
  opts.rel_tol = config.rel_tol;
  opts.max_cells = config.max_cells;
  return opts;
}

// Runs fn(0..jobs-1) on up to `threads` workers. Results must go into
// preassigned slots; the first exception wins and is rethrown after join.
template <typename F>
void parallel_jobs(int threads, int jobs, F&& fn) {
  if (threads <= 1 || jobs <= 1) {
    for (int i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= jobs) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int nworkers = std::min(threads, jobs);
  pool.reserve(nworkers);
  for (int t = 0; t < nworkers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

Table cmd_check(const ToricModel& model, const RunConfig& config, int& exit_code) {
  (void)config;
  Table t;
  t.header = {"key", "value"};
  t.rows.push_back({"model", model.name});
  t.rows.push_back({"dimension", std::to_string(model.dimension())});
  t.rows.push_back({"facets", std::to_string(model.facet_count())});
  t.rows.push_back({"delzant", "1"});
  t.rows.push_back({"px_vertices", vertices_str(model.vertices(PolytopeSelector::PX))});
  const char* status = model.pl_status() == PLStatus::FullDimensional   ? "full"
                       : model.pl_status() == PLStatus::LowerDimensional ? "lower"
                                                                          : "empty";
  t.rows.push_back({"pl_status", status});
  t.rows.push_back({"pl_vertices", model.pl_status() == PLStatus::Empty
                                       ? ""
                                       : vertices_str(model.vertices(PolytopeSelector::PL))});
  t.rows.push_back({"dim_HQ", std::to_string(model.quantum_dimension())});
  t.rows.push_back({"sqrtk_exists", sqrtk_exists(model) ? "1" : "0"});
  const RegularityReport reg = regularity_scan(model);
  t.rows.push_back({"regularity_min", fmt(reg.min_value)});
  t.rows.push_back({"regularity_max", fmt(reg.max_value)});
  t.rows.push_back({"regularity_ratio", fmt(reg.ratio)});
  t.rows.push_back({"regularity_pass", reg.pass ? "1" : "0"});
  if (!reg.pass) {
    // report is still emitted; the exit code flags the failed scan
    std::cerr << "regularity scan failed: ratio " << fmt(reg.ratio) << " exceeds 1e4\n";
    exit_code = 3;
  }
  return t;
}

Table cmd_basis(const ToricModel& model) {
  const auto kahler = model.lattice_points();
  const auto real = real_basis(model);  // asserts equality internally
  Table t;
  t.header = {"m", "kahler", "real"};
  for (const auto& m : kahler) {
    const bool in_real = std::find(real.begin(), real.end(), m) != real.end();
    t.rows.push_back({mode_str(m), "1", in_real ? "1" : "0"});
  }
  return t;
}

Table cmd_norms(const ToricModel& model, const RunConfig& config) {
  const auto modes = select_modes(model, config);
  const auto schedule = config.s_schedule.empty() ? std::vector<double>{0.0, 1.0, 10.0}
                                                  : config.s_schedule;
  const QuadratureOptions opts = quad_options(config);
  struct Row {
    LatticePoint m;
    double s, norm2, pred, ratio, abs_err;
    long long cells;
  };
  const int jobs = static_cast<int>(modes.size() * schedule.size());
  std::vector<Row> rows(jobs);
  parallel_jobs(config.threads, jobs, [&](int i) {
    const LatticePoint& m = modes[i / schedule.size()];
    const double s = schedule[i % schedule.size()];
    // psi pinned to psi(m) = 0 per mode: the ratio is invariant and the raw
    // values stay inside double range for off-center modes at large s
    Eigen::VectorXd md(model.dimension());
    for (int k = 0; k < model.dimension(); ++k) md[k] = static_cast<double>(m[k]);
    PotentialSelector sel;
    sel.s = s;
    sel.psi_shift = model.psi()(md);
    const IntegralResult r = norm_squared(model, sel, m, opts);
    const double pred = laplace_prediction(model, sel, m);
    rows[i] = Row{m, s, r.value, pred, r.value / pred, r.abs_error_estimate, r.cells_used};
  });
  Table t;
  t.header = {"model", "m", "s", "norm2", "laplace_pred", "ratio", "abs_err", "cells"};
  for (const Row& r : rows) {
    t.rows.push_back({model.name, mode_str(r.m), fmt(r.s), fmt(r.norm2), fmt(r.pred),
                      fmt(r.ratio), fmt(r.abs_err), std::to_string(r.cells)});
  }
  return t;
}

Table cmd_degenerate(const ToricModel& model, const RunConfig& config) {
  const auto modes = select_modes(model, config);
  const auto schedule = config.s_schedule.empty() ? std::vector<double>{10.0, 100.0, 640.0}
                                                  : config.s_schedule;
  const QuadratureOptions opts = quad_options(config);
  const Polynomial one = Polynomial::constant(model.dimension(), Rational(1));
  const double target =
      std::pow(2.0, 0.5 * model.dimension()) * std::pow(std::numbers::pi, 0.25 * model.dimension());
  struct Row {
    LatticePoint m;
    double s, pairing, rel_err, mass;
  };
  const int jobs = static_cast<int>(modes.size() * schedule.size());
  std::vector<Row> rows(jobs);
  parallel_jobs(config.threads, jobs, [&](int i) {
    const LatticePoint& m = modes[i / schedule.size()];
    const double s = schedule[i % schedule.size()];
    const double pairing = delta_pairing(model, s, m, one, opts);
    const double mass = (model.dimension() <= 2 && s > 0.0)
                            ? concentration_mass(model, s, m, 6.0, opts)
                            : std::nan("");
    rows[i] = Row{m, s, pairing, std::abs(pairing - target) / target, mass};
  });
  Table t;
  t.header = {"model", "m", "s", "pairing", "target", "rel_err", "mass"};
  for (const Row& r : rows) {
    t.rows.push_back({model.name, mode_str(r.m), fmt(r.s), fmt(r.pairing), fmt(target),
                      fmt(r.rel_err), fmt(r.mass)});
  }
  return t;
}

Table cmd_bks(const ToricModel& model, const RunConfig& config, json* extra) {
  const auto modes = select_modes(model, config);
  const auto schedule =
      config.s_schedule.empty() ? std::vector<double>{0.0, 1.0, 2.0} : config.s_schedule;
  const QuadratureOptions opts = quad_options(config);
  struct Job {
    LatticePoint m;
    double si, sj;
  };
  std::vector<Job> jobs;
  for (const auto& m : modes) {
    for (std::size_t i = 0; i < schedule.size(); ++i) {
      for (std::size_t j = i; j < schedule.size(); ++j) {
        jobs.push_back({m, schedule[i], schedule[j]});
      }
    }
  }
  std::vector<BksEntry> entries(jobs.size());
  parallel_jobs(config.threads, static_cast<int>(jobs.size()), [&](int i) {
    entries[i] = bks_entry(model, jobs[i].si, jobs[i].sj, jobs[i].m, opts);
  });
  Table t;
  t.header = {"m", "s_I", "s_J", "value", "abs_err"};
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    t.rows.push_back({mode_str(jobs[i].m), fmt(jobs[i].si), fmt(jobs[i].sj),
                      fmt(entries[i].value), fmt(entries[i].integral.abs_error_estimate)});
  }
  // additivity defects over consecutive schedule pairs; the CSV schema stays
  // fixed, so these go to the JSON meta block and a stderr summary
  json defects = json::array();
  double max_defect = 0.0;
  for (const auto& m : modes) {
    for (std::size_t i = 0; i + 1 < schedule.size(); ++i) {
      const double s1 = schedule[i], s2 = schedule[i + 1];
      const double delta = 0.5 * (s2 - s1);
      const double defect = additivity_defect(model, m, s1, s2, delta, opts);
      max_defect = std::max(max_defect, defect);
      defects.push_back(
          {{"m", mode_str(m)}, {"s1", s1}, {"s2", s2}, {"delta", delta}, {"defect", defect}});
    }
  }
  if (!defects.empty()) {
    std::cerr << "bks additivity defects: max " << fmt(max_defect) << " over "
              << defects.size() << " consecutive pairs\n";
  }
  if (extra) (*extra)["additivity_defects"] = defects;
  return t;
}

Table cmd_unitarity(const ToricModel& model, const RunConfig& config) {
  const auto modes = select_modes(model, config);
  const auto schedule =
      config.s_schedule.empty() ? std::vector<double>{0.0, 5.0, 50.0} : config.s_schedule;
  const QuadratureOptions opts = quad_options(config);
  const int jobs = static_cast<int>(modes.size() * schedule.size());
  std::vector<UnitarityReport> reports(jobs);
  parallel_jobs(config.threads, jobs, [&](int i) {
    const LatticePoint& m = modes[i / schedule.size()];
    const double s = schedule[i % schedule.size()];
    reports[i] = unitarity_derivative(model, s, m, opts);
  });
  Table t;
  t.header = {"m", "s", "derivative", "fd_check"};
  int negative = 0;
  for (const auto& r : reports) {
    if (r.derivative < 0.0) ++negative;
    t.rows.push_back({mode_str(r.m), fmt(r.s), fmt(r.derivative), fmt(r.fd_check)});
  }
  std::cerr << "unitarity sign summary: " << negative << " of " << reports.size()
            << " derivatives negative\n";
  return t;
}

Table cmd_holonomy(const ToricModel& model, const RunConfig& config) {
  if (config.points.empty()) {
    fail(errc::malformed_input, "holonomy requires at least one --point");
  }
  Table t;
  t.header = {"point", "status", "phases", "collapsed_facets"};
  for (const std::string& text : config.points) {
    const RationalVector p = parse_point(text, model.dimension());
    const BohrSommerfeldVerdict v = bs_condition(model, p);
    std::string phases;
    for (std::size_t i = 0; i < v.phases.size(); ++i) {
      if (i) phases += '|';
      phases += fmt(v.phases[i].real()) + (v.phases[i].imag() < 0 ? "-" : "+") +
                fmt(std::abs(v.phases[i].imag())) + "i";
    }
    std::string collapsed;
    for (std::size_t i = 0; i < v.collapsed_facets.size(); ++i) {
      if (i) collapsed += '|';
      collapsed += std::to_string(v.collapsed_facets[i]);
    }
    t.rows.push_back({vertex_str(p), bs_status_name(v.status), phases, collapsed});
  }
  return t;
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (i) out += ',';
    out += t.header[i];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

std::string to_json_report(const Table& t, const RunConfig& config, const json& extra,
                           double wall_seconds) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json obj;
    for (std::size_t i = 0; i < t.header.size(); ++i) obj[t.header[i]] = row[i];
    rows.push_back(obj);
  }
  json out{{"meta",
            {{"subcommand", config.subcommand},
             {"model", config.model_path},
             {"rel_tol", config.rel_tol},
             {"max_cells", config.max_cells},
             {"threads", config.threads},
             {"wall_seconds", wall_seconds}}},
           {"rows", rows}};
  for (auto it = extra.begin(); it != extra.end(); ++it) out["meta"][it.key()] = it.value();
  return out.dump(2) + "\n";
}

}  // namespace

int run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  try {
    validate(config);
    const ToricModel model = load_model(config.model_path);
    Table table;
    json extra = json::object();
    int exit_code = 0;
    if (config.subcommand == "check") {
      table = cmd_check(model, config, exit_code);
    } else if (config.subcommand == "basis") {
      table = cmd_basis(model);
    } else if (config.subcommand == "norms") {
      table = cmd_norms(model, config);
    } else if (config.subcommand == "degenerate") {
      table = cmd_degenerate(model, config);
    } else if (config.subcommand == "bks") {
      table = cmd_bks(model, config, config.format == "json" ? &extra : nullptr);
    } else if (config.subcommand == "unitarity") {
      table = cmd_unitarity(model, config);
    } else if (config.subcommand == "holonomy") {
      table = cmd_holonomy(model, config);
    } else {
      fail(errc::malformed_input, "unknown subcommand '" + config.subcommand + "'");
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::string payload =
        config.format == "csv" ? to_csv(table) : to_json_report(table, config, extra, wall);
    if (config.out_path.empty()) {
      std::cout << payload;
    } else {
      std::ofstream out(config.out_path, std::ios::binary);
      if (!out) fail(errc::malformed_input, "cannot write output file " + config.out_path);
      out << payload;
    }
    return exit_code;
  } catch (const Error& e) {
    json diag{{"error", e.code_name()},
              {"category", e.category() == error_category::validation   ? "validation"
                           : e.category() == error_category::numerical ? "numerical"
                                                                        : "logic"},
              {"message", e.what()}};
    std::cerr << diag.dump() << "\n";
    switch (e.category()) {
      case error_category::validation: return 2;
      case error_category::numerical: return 3;
      default: return 1;
    }
  } catch (const std::exception& e) {
    json diag{{"error", "Unhandled"}, {"category", "logic"}, {"message", e.what()}};
    std::cerr << diag.dump() << "\n";
    return 1;
  }
}

}  // namespace tq::cli
