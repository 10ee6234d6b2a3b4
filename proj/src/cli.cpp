#include "kqkp/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kqkp/error.hpp"
#include "kqkp/generator.hpp"
#include "kqkp/heuristics.hpp"
#include "kqkp/oracle.hpp"

namespace kqkp {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void check_config(const RunConfig& c) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::Parse, what); };
  if (!(c.time_limit_s > 0)) fail("time limit must be positive");
  if (!(c.ipm_tol > 0)) fail("tolerance must be positive");
  if (!(c.gamma_drop > 0)) fail("gamma drop threshold must be positive");
  if (c.root_evals < 1 || c.node_evals < 1) fail("evaluation budgets must be at least 1");
  if (c.cut_update_period < 1) fail("cut update period must be at least 1");
  if (c.bnp_node_k < 0 || c.bnp_root_k < 0) fail("enumeration thresholds must be nonnegative");
  if (c.threads < 1) fail("thread count must be at least 1");
}

SolverConfig to_solver_config(const RunConfig& c) {
  SolverConfig s;
  s.time_limit_s = c.time_limit_s;
  s.ipm_tol = c.ipm_tol;
  s.root_evals = c.root_evals;
  s.node_evals = c.node_evals;
  s.bundle.cuts_per_update = c.cuts_m;
  s.bundle.update_period = c.cut_update_period;
  s.bundle.gamma_drop = c.gamma_drop;
  s.bnp_node_k = c.bnp_node_k;
  s.bnp_root_k = c.bnp_root_k;
  s.use_cuts = c.use_cuts;
  s.threads = c.threads;
  return s;
}

namespace {

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  j["time_limit_s"] = c.time_limit_s;
  j["ipm_tol"] = c.ipm_tol;
  j["root_evals"] = c.root_evals;
  j["node_evals"] = c.node_evals;
  j["cuts_m"] = c.cuts_m;
  j["cut_update_period"] = c.cut_update_period;
  j["gamma_drop"] = c.gamma_drop;
  j["bnp_node_k"] = c.bnp_node_k;
  j["bnp_root_k"] = c.bnp_root_k;
  j["use_cuts"] = c.use_cuts;
  j["threads"] = c.threads;
  j["trace_dir"] = c.trace_dir ? c.trace_dir->string() : std::string();
  return j;
}

Instance load(const fs::path& path) {
  try {
    return validate(read_instance_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

// Trace streams for one solve; the bundle and IPM traces are only attached
// when nodes are processed sequentially.
struct Traces {
  std::ofstream nodes;
  std::ofstream bundle;
  std::ofstream ipm;

  void attach(SolverConfig& s, const RunConfig& c, const fs::path& instance_path) {
    if (!c.trace_dir) return;
    fs::create_directories(*c.trace_dir);
    const std::string stem = instance_path.stem().string();
    nodes.open(*c.trace_dir / (stem + ".nodes.csv"));
    nodes << "id,parent,fixed_var,fixed_value,bound,incumbent,action\n";
    s.on_node = [this](const NodeEvent& e) {
      nodes << e.id << ',' << e.parent << ',' << e.fixed_var << ',' << e.fixed_value << ','
            << e.bound << ',';
      if (e.incumbent) nodes << *e.incumbent;
      nodes << ',' << to_string(e.action) << '\n';
    };
    if (s.threads == 1) {
      bundle.open(*c.trace_dir / (stem + ".bundle.csv"));
      bundle << "eval,f,cuts,step\n";
      s.bundle.trace = &bundle;
      // One block per relaxation solve, iterations restart at 0.
      ipm.open(*c.trace_dir / (stem + ".ipm.csv"));
      ipm << "iter,primal_obj,dual_obj,gap,alpha_p,alpha_d,pinf,dinf\n";
      s.bundle.ipm.log = &ipm;
    }
  }
};

ordered_json selection_json(const Selection& x) {
  ordered_json arr = ordered_json::array();
  for (auto v : x) arr.push_back(static_cast<int>(v));
  return arr;
}

ordered_json report_json(const fs::path& path, const SolveReport& r, const RunConfig& c) {
  ordered_json j;
  j["version"] = kVersion;
  j["instance"] = path.string();
  j["status"] = to_string(r.status);
  if (r.best) {
    j["value"] = r.best->value;
    j["x"] = selection_json(r.best->x);
    j["source"] = to_string(r.best->source);
  } else {
    j["value"] = nullptr;
    j["x"] = nullptr;
    j["source"] = nullptr;
  }
  j["root_bound"] = std::isfinite(r.root_bound) ? ordered_json(r.root_bound) : ordered_json();
  j["root_gap_percent"] = r.root_gap_percent;
  j["nodes"] = r.nodes;
  j["bnp_nodes"] = r.bnp_nodes;
  j["evals"] = r.evals;
  j["time_ms"] = r.time_ms;
  j["config"] = config_json(c);
  return j;
}

void emit(const ordered_json& j, const std::optional<fs::path>& output, std::ostream& out) {
  if (output) {
    std::ofstream file(*output);
    if (!file) throw Error(ErrorCode::Parse, "cannot write " + output->string());
    file << j.dump(2) << '\n';
  } else {
    out << j.dump(2) << '\n';
  }
}

int density_of(const fs::path& path, const Instance& inst) {
  static const std::regex pattern(R"(_d(\d+)_)");
  std::smatch m;
  const std::string name = path.filename().string();
  if (std::regex_search(name, m, pattern)) return std::stoi(m[1]);
  std::int64_t nonzero = 0;
  for (int i = 0; i < inst.n; ++i) {
    for (int j = i; j < inst.n; ++j) nonzero += inst.profit(i, j) != 0;
  }
  const double pairs = inst.n * (inst.n + 1) / 2.0;
  return static_cast<int>(std::lround(100.0 * static_cast<double>(nonzero) / pairs));
}

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

std::string bench_table(const fs::path& dir, const RunConfig& config, bool with_time,
                        bool* all_optimal) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  // Instances run in parallel, each solve single-threaded.
  RunConfig per_solve = config;
  per_solve.threads = 1;
  std::vector<std::string> rows(files.size());
  std::vector<char> optimal(files.size(), 1);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      try {
        const Instance inst = load(files[i]);
        SolverConfig s = to_solver_config(per_solve);
        Traces traces;
        traces.attach(s, per_solve, files[i]);
        const SolveReport r = solve(inst, s);
        optimal[i] = r.status == SolveStatus::Optimal;
        rows[i] = std::to_string(inst.n) + ',' + std::to_string(density_of(files[i], inst)) + ',' +
                  format("%.4f", r.root_gap_percent) + ',' +
                  (with_time ? format("%.3f", r.time_ms / 1000.0) : std::string("-")) + ',' +
                  std::to_string(r.nodes);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(config.threads, static_cast<int>(files.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::string table = "n,delta,gap_root_%,time_s,nodes\n";
  for (const auto& row : rows) table += row + '\n';
  if (all_optimal) *all_optimal = std::all_of(optimal.begin(), optimal.end(), [](char c) { return c; });
  return table;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact solver for the k-item quadratic knapsack problem"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunConfig config;
  std::optional<int> threads_flag;
  std::optional<fs::path> output;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--time-limit", config.time_limit_s, "Time limit in seconds");
    sub->add_option("--tol", config.ipm_tol, "Relative gap tolerance of plain relaxation solves");
    sub->add_option("--root-evals", config.root_evals, "Bundle evaluations at the root");
    sub->add_option("--node-evals", config.node_evals, "Bundle evaluations at other nodes");
    sub->add_option("--cuts-m", config.cuts_m, "Cuts added per pool update (0: min(5n, 300))");
    sub->add_option("--cut-update-period", config.cut_update_period,
                    "Descent steps between pool updates");
    sub->add_option("--gamma-drop", config.gamma_drop, "Drop cuts with multiplier below this");
    sub->add_option("--bnp-node-k", config.bnp_node_k, "Enumerate subtrees with k at most this");
    sub->add_option("--bnp-root-k", config.bnp_root_k, "Enumerate instances with k at most this");
    sub->add_option("--threads", threads_flag, "Worker threads (fallback: KQKP_THREADS)");
    sub->add_option("--trace-dir", config.trace_dir, "Write node, bundle and IPM traces here");
    sub->add_flag("!--no-cuts", config.use_cuts, "Bound with the plain relaxation only");
    sub->add_option("-o,--output", output, "Write the report here instead of stdout");
  };

  fs::path instance_path;
  auto* solve_cmd = app.add_subcommand("solve", "Solve an instance to optimality");
  solve_cmd->add_option("instance", instance_path)->required();
  add_config(solve_cmd);

  std::string mode = "sdpmet";
  auto* bound_cmd = app.add_subcommand("bound", "Root bound without branching");
  bound_cmd->add_option("instance", instance_path)->required();
  bound_cmd->add_option("--mode", mode)->check(CLI::IsMember({"sdp", "sdpmet"}));
  add_config(bound_cmd);

  auto* check_cmd = app.add_subcommand("check", "Compare solve against enumeration (n <= 24)");
  check_cmd->add_option("instance", instance_path)->required();
  add_config(check_cmd);

  GenSpec gen;
  int count = 1;
  fs::path out_dir = ".";
  auto* gen_cmd = app.add_subcommand("generate", "Write random instances");
  gen_cmd->add_option("--n", gen.n)->required();
  gen_cmd->add_option("--density", gen.density_percent, "Percent of nonzero profits")->required();
  gen_cmd->add_option("--seed", gen.seed, "First seed");
  gen_cmd->add_option("--count", count, "Number of consecutive seeds")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--out-dir", out_dir);

  fs::path bench_dir;
  bool no_time = false;
  auto* bench_cmd = app.add_subcommand("bench", "Solve all *.txt instances of a directory");
  bench_cmd->add_option("dir", bench_dir)->required()->check(CLI::ExistingDirectory);
  bench_cmd->add_flag("--no-time", no_time, "Print '-' in the time column");
  add_config(bench_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (threads_flag) {
      config.threads = *threads_flag;
    } else if (const char* env = std::getenv("KQKP_THREADS")) {
      try {
        config.threads = std::stoi(env);
      } catch (const std::exception&) {
        throw Error(ErrorCode::Parse, std::string("bad KQKP_THREADS value: ") + env);
      }
    }
    check_config(config);

    if (*solve_cmd) {
      const Instance inst = load(instance_path);
      SolverConfig s = to_solver_config(config);
      Traces traces;
      traces.attach(s, config, instance_path);
      const SolveReport r = solve(inst, s);
      emit(report_json(instance_path, r, config), output, out);
      return r.status == SolveStatus::Optimal ? 0 : 2;
    }
    if (*bound_cmd) {
      const Instance inst = load(instance_path);
      config.use_cuts = mode == "sdpmet";
      SolverConfig s = to_solver_config(config);
      Traces traces;
      traces.attach(s, config, instance_path);
      const auto start = std::chrono::steady_clock::now();
      const RootBound b = compute_root_bound(inst, s);
      const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
      ordered_json j;
      j["version"] = kVersion;
      j["instance"] = instance_path.string();
      j["mode"] = mode;
      j["bound"] = std::isfinite(b.bound) ? ordered_json(b.bound) : ordered_json();
      j["evals"] = b.evals;
      j["time_ms"] = ms;
      j["config"] = config_json(config);
      emit(j, output, out);
      return 0;
    }
    if (*check_cmd) {
      const Instance inst = load(instance_path);
      const OracleResult oracle = enumerate(inst);
      SolverConfig s = to_solver_config(config);
      Traces traces;
      traces.attach(s, config, instance_path);
      const SolveReport r = solve(inst, s);
      const bool same = r.best ? oracle.value && *oracle.value == r.best->value : !oracle.value;
      const bool match = r.status == SolveStatus::Optimal && same;
      ordered_json j;
      j["version"] = kVersion;
      j["instance"] = instance_path.string();
      j["status"] = to_string(r.status);
      j["value"] = r.best ? ordered_json(r.best->value) : ordered_json();
      j["oracle_value"] = oracle.value ? ordered_json(*oracle.value) : ordered_json();
      j["feasible_count"] = oracle.feasible_count;
      j["match"] = match;
      emit(j, output, out);
      return match ? 0 : 3;
    }
    if (*gen_cmd) {
      fs::create_directories(out_dir);
      const std::uint64_t first = gen.seed;
      for (int i = 0; i < count; ++i) {
        gen.seed = first + static_cast<std::uint64_t>(i);
        const fs::path path = out_dir / instance_file_name(gen);
        std::ofstream file(path);
        if (!file) throw Error(ErrorCode::Parse, "cannot write " + path.string());
        write_instance(file, generate(gen));
        out << path.string() << '\n';
      }
      return 0;
    }
    if (*bench_cmd) {
      bool all_optimal = true;
      const std::string table = bench_table(bench_dir, config, !no_time, &all_optimal);
      if (output) {
        std::ofstream file(*output);
        file << table;
      } else {
        out << table;
      }
      return all_optimal ? 0 : 2;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace kqkp
