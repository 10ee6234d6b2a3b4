#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "kqkp/bnb.hpp"

namespace kqkp {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  double time_limit_s = 10800.0;
  double ipm_tol = 1e-7;
  int root_evals = 30;
  int node_evals = 10;
  // 0 selects the bundle defaults.
  std::size_t cuts_m = 0;
  int cut_update_period = 5;
  double gamma_drop = 1e-5;
  int bnp_node_k = 5;
  int bnp_root_k = 10;
  bool use_cuts = true;
  int threads = 1;
  std::optional<std::filesystem::path> trace_dir;
};

// Throws Error(Parse) on a non-positive tolerance or negative threshold.
void check_config(const RunConfig& config);
SolverConfig to_solver_config(const RunConfig& config);

// Solves every *.txt instance in `dir` (sorted by name) and returns the CSV
// table with header n,delta,gap_root_%,time_s,nodes. With with_time = false
// the time column holds "-" so that repeated runs compare equal.
std::string bench_table(const std::filesystem::path& dir, const RunConfig& config,
                        bool with_time = true, bool* all_optimal = nullptr);

// Entry point of the command line tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kqkp
