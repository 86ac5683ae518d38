#ifndef TQ_TOOLS_RUN_HPP
#define TQ_TOOLS_RUN_HPP

#include <string>
#include <vector>

namespace tq::cli {

struct RunConfig {
  std::string subcommand;
  std::string model_path;
  std::vector<std::string> modes;   // "a;b;c" per mode; empty means all of P_L
  std::vector<double> s_schedule;   // nonnegative ascending
  std::vector<std::string> points;  // holonomy probes, "p/q,r/s" per point
  double rel_tol = 1e-8;
  long long max_cells = 1LL << 20;
  int threads = 1;
  double h_step = 1e-3;  // horizontality finite-difference step
  std::string out_path;  // empty: stdout
  std::string format = "csv";
};

// Executes one subcommand. Returns the process exit code: 0 success,
// 2 validation failure, 3 numerical non-convergence, 1 internal sentinel.
int run(const RunConfig& config);

}  // namespace tq::cli

#endif
