#include <CLI11.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "run.hpp"

namespace {

std::vector<double> parse_schedule(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    out.push_back(std::stod(part));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"toric half-form quantization toolkit"};
  app.require_subcommand(1);

  tq::cli::RunConfig config;
  std::string schedule_text;

  auto add_common = [&](CLI::App* sub, bool wants_modes, bool wants_schedule) {
    sub->add_option("model", config.model_path, "model JSON file")->required();
    sub->add_option("--tol", config.rel_tol, "quadrature relative tolerance");
    sub->add_option("--max-cells", config.max_cells, "adaptive cell budget");
    sub->add_option("--threads", config.threads, "worker cap (output is thread-count independent)");
    sub->add_option("--out", config.out_path, "write the report to this path instead of stdout");
    sub->add_option("--format", config.format, "csv or json");
    if (wants_modes) {
      sub->add_option("--modes", config.modes,
                      "mode filter, one 'a;b;..' per flag (default: all of P_L)");
    }
    if (wants_schedule) {
      sub->add_option("--s", schedule_text, "comma-separated ascending family parameters");
    }
  };

  CLI::App* check = app.add_subcommand("check", "validate the model and report its combinatorics");
  add_common(check, false, false);
  CLI::App* basis = app.add_subcommand("basis", "quantum basis from both polarizations");
  add_common(basis, false, false);
  CLI::App* norms = app.add_subcommand("norms", "norms against the Laplace prediction");
  add_common(norms, true, true);
  CLI::App* degenerate =
      app.add_subcommand("degenerate", "delta-limit pairings and concentration mass");
  add_common(degenerate, true, true);
  CLI::App* bks = app.add_subcommand("bks", "pairing matrix diagonals over the s-grid");
  add_common(bks, true, true);
  CLI::App* unitarity = app.add_subcommand("unitarity", "norm derivative table with fd check");
  add_common(unitarity, true, true);
  CLI::App* holonomy = app.add_subcommand("holonomy", "limit-holonomy verdicts for points");
  add_common(holonomy, false, false);
  holonomy->add_option("--point", config.points, "probe point 'p/q,r/s', repeatable");

  CLI11_PARSE(app, argc, argv);

  for (CLI::App* sub : {check, basis, norms, degenerate, bks, unitarity, holonomy}) {
    if (sub->parsed()) config.subcommand = sub->get_name();
  }
  if (!schedule_text.empty()) {
    try {
      config.s_schedule = parse_schedule(schedule_text);
    } catch (const std::exception&) {
      std::fprintf(stderr, "{\"error\":\"MalformedInput\",\"message\":\"bad --s list\"}\n");
      return 2;
    }
  }
  return tq::cli::run(config);
}
