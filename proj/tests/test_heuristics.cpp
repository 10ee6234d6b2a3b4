#include <doctest.h>

#include <chrono>

#include "kqkp/heuristics.hpp"
#include "kqkp/ipm.hpp"
#include "kqkp/oracle.hpp"
#include "kqkp/relaxation.hpp"
#include "support.hpp"

using namespace kqkp;

namespace {

void check_incumbent(const Instance& inst, const Incumbent& inc) {
  CHECK(inc.x.size() == static_cast<std::size_t>(inst.n));
  CHECK(is_feasible(inst, inc.x));
  // Recompute from scratch rather than through objective().
  std::int64_t value = inst.offset;
  for (int i = 0; i < inst.n; ++i)
    for (int j = 0; j < inst.n; ++j) value += inc.x[i] * inc.x[j] * inst.profit(i, j);
  CHECK(inc.value == value);
}

Eigen::VectorXd root_fractional(const Instance& inst) {
  const auto padded = pad_degenerate(inst);
  const auto data = build_relaxation(padded, preprocess(padded));
  return extract_fractional(solve_sdp(data, nullptr).X, data).head(inst.n);
}

}  // namespace

TEST_CASE("separable objective with unit weights picks the largest diagonal") {
  const auto inst = test::make_instance(
      3, 4, {1, 1, 1, 1, 1},
      {{5, 0, 0, 0, 0}, {0, 9, 0, 0, 0}, {0, 0, 2, 0, 0}, {0, 0, 0, 7, 0}, {0, 0, 0, 0, 8}});
  const auto inc = primal_heuristic(inst, preprocess(inst));
  REQUIRE(inc);
  CHECK(inc->x == Selection{0, 1, 0, 1, 1});
  CHECK(inc->value == 24);
}

TEST_CASE("zero weight items are preferred by the greedy ratio") {
  const auto inst = test::make_instance(1, 2, {0, 2, 2}, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  const auto inc = primal_heuristic(inst, preprocess(inst));
  REQUIRE(inc);
  CHECK(inc->value == 1);
}

TEST_CASE("primal heuristic quality on n = 12") {
  double ratio = 0.0;
  int count = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto inst = generate(test::spec(12, 25 * (1 + static_cast<int>(seed % 4)), seed));
    const auto prep = preprocess(inst);
    const auto inc = primal_heuristic(inst, prep);
    REQUIRE(inc);
    check_incumbent(inst, *inc);
    const auto opt = *enumerate(inst).value;
    CHECK(inc->value <= opt);
    if (opt > 0) {
      ratio += static_cast<double>(inc->value) / static_cast<double>(opt);
      ++count;
    }
  }
  MESSAGE("average primal ratio " << ratio / count);
  CHECK(ratio / count >= 0.9);
}

TEST_CASE("infeasible cardinality yields no incumbent") {
  auto inst = generate(test::spec(10, 50, 1));
  inst.k = preprocess(inst).k_max + 1;
  CHECK_FALSE(primal_heuristic(inst, preprocess(inst)));
}

TEST_CASE("improve fills up and exchanges") {
  const auto inst = test::make_instance(2, 10, {1, 1, 1, 1},
                                        {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 5, 3}, {0, 0, 3, 5}});
  Selection x{1, 0, 0, 0};
  improve(inst, x);
  CHECK(x == Selection{0, 0, 1, 1});
}

TEST_CASE("varfix reproduces binary points and never loses the incumbent") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = generate(test::spec(11, 50, seed));
    const auto prep = preprocess(inst);
    const auto best = enumerate(inst);
    Eigen::VectorXd binary(inst.n);
    for (int i = 0; i < inst.n; ++i) binary(i) = best.argmax[i];
    const auto from_binary = varfix_heuristic(inst, prep, binary, std::nullopt);
    REQUIRE(from_binary);
    CHECK(from_binary->value >= *best.value);
    check_incumbent(inst, *from_binary);

    Incumbent given{best.argmax, *best.value, IncumbentSource::BranchLeaf};
    const auto kept = varfix_heuristic(inst, prep, Eigen::VectorXd::Zero(inst.n), given);
    REQUIRE(kept);
    CHECK(kept->value >= given.value);
  }
}

TEST_CASE("varfix with root fractional points finds the optimum at least as often") {
  int primal_hits = 0;
  int combined_hits = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = generate(test::spec(12, 25 * (1 + static_cast<int>(seed % 4)), seed));
    const auto prep = preprocess(inst);
    if (prep.status != PreprocessStatus::Solvable) continue;
    const auto opt = *enumerate(inst).value;
    const auto primal = primal_heuristic(inst, prep);
    const auto varfix = varfix_heuristic(inst, prep, root_fractional(inst), std::nullopt);
    REQUIRE(varfix);
    check_incumbent(inst, *varfix);
    primal_hits += primal->value == opt;
    combined_hits += std::max(primal->value, varfix->value) == opt;
  }
  MESSAGE("optimum found: primal " << primal_hits << ", with varfix " << combined_hits);
  CHECK(combined_hits >= primal_hits);
}

TEST_CASE("heuristics are deterministic and fast at n = 150") {
  const auto inst = generate(test::spec(150, 50, 2));
  const auto prep = preprocess(inst);
  const auto start = std::chrono::steady_clock::now();
  const auto a = primal_heuristic(inst, prep);
  const double primal_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto b = primal_heuristic(inst, prep);
  REQUIRE(a);
  CHECK(a->x == b->x);
  CHECK(primal_s < 0.1);

  Eigen::VectorXd frac(inst.n);
  for (int i = 0; i < inst.n; ++i) frac(i) = (i % 10) / 10.0 + 0.05;
  const auto t0 = std::chrono::steady_clock::now();
  const auto v = varfix_heuristic(inst, prep, frac, std::nullopt);
  const double varfix_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  REQUIRE(v);
  CHECK(varfix_heuristic(inst, prep, frac, std::nullopt)->x == v->x);
  MESSAGE("primal " << primal_s << " s, varfix " << varfix_s << " s");
  CHECK(varfix_s < 0.1);
}
