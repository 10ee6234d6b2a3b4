#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "kqkp/cli.hpp"
#include "kqkp/heuristics.hpp"
#include "support.hpp"

using namespace kqkp;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
  nlohmann::json json() const { return nlohmann::json::parse(out); }
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "kqkp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("kqkp_test_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

fs::path write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

fs::path write_generated(const fs::path& dir, const GenSpec& g) {
  const fs::path path = dir / instance_file_name(g);
  std::ofstream file(path);
  write_instance(file, generate(g));
  return path;
}

}  // namespace

TEST_CASE("solve a trivial file") {
  TempDir tmp;
  const auto path = write_file(tmp.path / "t.txt", "2 1 1\n1 1\n1 0\n0 2\n");
  const auto r = run({"solve", path.string()});
  CHECK(r.code == 0);
  const auto j = r.json();
  CHECK(j["status"] == "Optimal");
  CHECK(j["value"] == 2);
  CHECK(j["nodes"].get<int>() >= 1);
  CHECK(j["version"] == kVersion);
  CHECK(j.contains("config"));
}

TEST_CASE("malformed input names the line") {
  TempDir tmp;
  const auto path = write_file(tmp.path / "bad.txt", "2 1 1\n1 x\n1 0\n0 2\n");
  const auto r = run({"solve", path.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("line 2") != std::string::npos);
  const auto missing = run({"solve", (tmp.path / "nope.txt").string()});
  CHECK(missing.code == 1);
  const auto asym = run({"solve", write_file(tmp.path / "a.txt", "2 1 2\n1 2\n1 2\n3 1\n").string()});
  CHECK(asym.code == 1);
}

TEST_CASE("solve agrees with check and the report validates itself") {
  TempDir tmp;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto path = write_generated(tmp.path, test::spec(12, 50, seed));
    const auto solved = run({"solve", path.string(), "--bnp-root-k", "0", "--bnp-node-k", "0"});
    REQUIRE(solved.code == 0);
    const auto checked = run({"check", path.string()});
    CHECK(checked.code == 0);
    const auto js = solved.json();
    const auto jc = checked.json();
    CHECK(jc["match"] == true);
    CHECK(js["value"] == jc["oracle_value"]);

    const auto inst = read_instance_file(path);
    Selection x;
    for (const auto& v : js["x"]) x.push_back(static_cast<std::uint8_t>(v.get<int>()));
    CHECK(objective(inst, x) == js["value"].get<std::int64_t>());
    CHECK(is_feasible(inst, x));
  }
}

TEST_CASE("bound modes") {
  TempDir tmp;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto g = test::spec(20, 25 * (1 + static_cast<int>(seed)), seed);
    const auto path = write_generated(tmp.path, g);
    const auto sdp = run({"bound", path.string(), "--mode", "sdp"});
    const auto met = run({"bound", path.string(), "--mode", "sdpmet"});
    REQUIRE(sdp.code == 0);
    REQUIRE(met.code == 0);
    const double b_sdp = sdp.json()["bound"];
    const double b_met = met.json()["bound"];
    CHECK(b_met <= b_sdp + 1e-6);
    const auto inst = generate(g);
    const auto inc = primal_heuristic(inst, preprocess(inst));
    REQUIRE(inc);
    CHECK(b_met >= static_cast<double>(inc->value) - 1e-6);
  }
  const auto bad = run({"bound", "x.txt", "--mode", "lp"});
  CHECK(bad.code == 1);
}

TEST_CASE("zero profit instance has bound zero") {
  TempDir tmp;
  const auto path = write_file(tmp.path / "z.txt",
                               "5 2 6\n1 2 3 4 5\n0 0 0 0 0\n0 0 0 0 0\n0 0 0 0 0\n0 0 0 0 0\n0 0 0 0 0\n");
  for (const char* mode : {"sdp", "sdpmet"}) {
    const auto r = run({"bound", path.string(), "--mode", mode});
    REQUIRE(r.code == 0);
    CHECK(r.json()["bound"].get<double>() == 0.0);
  }
}

TEST_CASE("generate writes named files") {
  TempDir tmp;
  const auto r = run({"generate", "--n", "9", "--density", "75", "--seed", "4", "--count", "2",
                      "--out-dir", tmp.path.string()});
  CHECK(r.code == 0);
  CHECK(fs::exists(tmp.path / "kqkp_n9_d75_s4.txt"));
  CHECK(fs::exists(tmp.path / "kqkp_n9_d75_s5.txt"));
  const auto back = read_instance_file(tmp.path / "kqkp_n9_d75_s4.txt");
  CHECK(back.profits == generate(test::spec(9, 75, 4)).profits);
}

TEST_CASE("bench") {
  TempDir tmp;
  const auto empty = run({"bench", tmp.path.string()});
  CHECK(empty.code == 0);
  CHECK(empty.out == "n,delta,gap_root_%,time_s,nodes\n");

  for (std::uint64_t seed = 0; seed < 10; ++seed)
    write_generated(tmp.path, test::spec(12, 25 * (1 + static_cast<int>(seed % 4)), seed));
  const auto first = run({"bench", tmp.path.string(), "--no-time"});
  REQUIRE(first.code == 0);
  std::istringstream lines(first.out);
  std::string line;
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    std::stringstream cells(line);
    std::string n, delta, gap, time, nodes;
    std::getline(cells, n, ',');
    std::getline(cells, delta, ',');
    std::getline(cells, gap, ',');
    std::getline(cells, time, ',');
    std::getline(cells, nodes, ',');
    CHECK(n == "12");
    CHECK(std::stod(gap) >= 0.0);
    CHECK(time == "-");
  }
  CHECK(rows == 10);
  CHECK(run({"bench", tmp.path.string(), "--no-time"}).out == first.out);
  CHECK(run({"bench", tmp.path.string(), "--no-time", "--threads", "2"}).out == first.out);
}

TEST_CASE("time limit exit code and traces") {
  TempDir tmp;
  const auto path = write_generated(tmp.path, test::spec(16, 50, 2));
  const auto trace = tmp.path / "trace";
  const auto r = run({"solve", path.string(), "--time-limit", "1e-9", "--bnp-root-k", "0",
                      "--trace-dir", trace.string()});
  CHECK(r.code == 2);
  CHECK(r.json()["status"] == "TimeLimit");
  CHECK(fs::exists(trace / (path.stem().string() + ".nodes.csv")));

  const auto full = run({"solve", path.string(), "--bnp-root-k", "0", "--trace-dir", trace.string()});
  CHECK(full.code == 0);
  std::ifstream nodes(trace / (path.stem().string() + ".nodes.csv"));
  std::string header;
  std::getline(nodes, header);
  CHECK(header == "id,parent,fixed_var,fixed_value,bound,incumbent,action");
  CHECK(fs::file_size(trace / (path.stem().string() + ".bundle.csv")) > 0);

  std::ifstream ipm(trace / (path.stem().string() + ".ipm.csv"));
  std::getline(ipm, header);
  CHECK(header == "iter,primal_obj,dual_obj,gap,alpha_p,alpha_d,pinf,dinf");
  std::string first;
  std::getline(ipm, first);
  CHECK(first.rfind("0,", 0) == 0);
}

TEST_CASE("configuration checks and thread fallback") {
  TempDir tmp;
  const auto path = write_file(tmp.path / "t.txt", "2 1 1\n1 1\n1 0\n0 2\n");
  CHECK(run({"solve", path.string(), "--tol", "0"}).code == 1);
  CHECK(run({"solve", path.string(), "--bnp-node-k", "-1"}).code == 1);
  ::setenv("KQKP_THREADS", "3", 1);
  CHECK(run({"solve", path.string()}).json()["config"]["threads"] == 3);
  CHECK(run({"solve", path.string(), "--threads", "2"}).json()["config"]["threads"] == 2);
  ::setenv("KQKP_THREADS", "zero", 1);
  CHECK(run({"solve", path.string()}).code == 1);
  ::unsetenv("KQKP_THREADS");
  CHECK(run({}).code == 1);
}
