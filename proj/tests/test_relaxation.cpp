#include <doctest.h>

#include <algorithm>
#include <random>

#include "kqkp/ipm.hpp"
#include "kqkp/oracle.hpp"
#include "kqkp/relaxation.hpp"
#include "support.hpp"

using namespace kqkp;

namespace {

Selection random_selection(int n, int k, std::mt19937_64& rng) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  Selection x(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < k; ++i) x[idx[i]] = 1;
  return x;
}

template <class F>
void for_each_k_subset(int n, int k, F&& f) {
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != k) continue;
    Selection x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x[i] = mask >> i & 1u;
    f(x);
  }
}

}  // namespace

TEST_CASE("relaxation reproduces the objective on binary points") {
  std::mt19937_64 rng(7);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = pad_degenerate(generate(test::spec(9 + static_cast<int>(seed), 50, seed)));
    const auto data = build_relaxation(inst, preprocess(inst));
    for (int trial = 0; trial < 100; ++trial) {
      const Selection x = random_selection(inst.n, inst.k, rng);
      const Eigen::MatrixXd X = feasible_X_from_binary(x, inst.k);
      const double lifted = (data.cost.array() * X.array()).sum() + data.const_term;
      CHECK(lifted == doctest::Approx(static_cast<double>(objective(inst, x))).epsilon(1e-12));
    }
  }
}

TEST_CASE("capacity vector worked example") {
  const auto inst = test::make_instance(2, 8, {2, 3, 4, 5, 6}, {});
  Instance full = inst;
  full.profits.assign(25, 1);
  const auto prep = preprocess(full);
  CHECK(prep.b_prime == 5);
  const auto data = build_relaxation(full, prep);
  const std::vector<double> expected{-5, -4, -3, -2, -1};
  for (int i = 0; i < 5; ++i) CHECK(data.cap_vector(i) == doctest::Approx(expected[i]));
  CHECK(data.proj_scale == doctest::Approx(-1.0));
  CHECK(data.rhs_card == doctest::Approx(1.0));
  CHECK(data.rhs_cap == doctest::Approx(9.0));
}

TEST_CASE("the projection annihilates the homogenized cardinality vector") {
  for (int n : {5, 8, 13}) {
    for (int k = 1; k < n; ++k) {
      if (2 * k == n) continue;
      const double p = 1.0 / (2 * k - n);
      CHECK(p * (n - 2 * k) + 1.0 == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("feasible_X_from_binary") {
  const Selection x{1, 0, 0};
  const Eigen::MatrixXd X = feasible_X_from_binary(x, 1);
  CHECK(X.sum() == doctest::Approx(1.0));
  CHECK(X(0, 1) == doctest::Approx(-1.0));
  CHECK(X(1, 2) == doctest::Approx(1.0));
  CHECK_THROWS_AS(feasible_X_from_binary(x, 2), Error);
}

TEST_CASE("binary feasible points satisfy every relaxation constraint") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = pad_degenerate(generate(test::spec(8 + static_cast<int>(seed % 3), 75, seed)));
    const auto data = build_relaxation(inst, preprocess(inst));
    for_each_k_subset(inst.n, inst.k, [&](const Selection& x) {
      if (!is_feasible(inst, x)) return;
      const Eigen::MatrixXd X = feasible_X_from_binary(x, inst.k);
      CHECK((X.diagonal().array() - 1.0).abs().maxCoeff() < 1e-12);
      CHECK(X.sum() == doctest::Approx(data.rhs_card));
      CHECK(data.cap_vector.dot(X * data.cap_vector) <= data.rhs_cap + 1e-9);
      CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(X).eigenvalues().minCoeff() > -1e-9);
    });
  }
}

TEST_CASE("the capacity constraint separates some overweight point") {
  bool witness = false;
  for (std::uint64_t seed = 0; seed < 20 && !witness; ++seed) {
    const auto inst = pad_degenerate(generate(test::spec(8, 50, seed)));
    const auto data = build_relaxation(inst, preprocess(inst));
    for_each_k_subset(inst.n, inst.k, [&](const Selection& x) {
      if (is_feasible(inst, x)) return;
      const Eigen::MatrixXd X = feasible_X_from_binary(x, inst.k);
      if (data.cap_vector.dot(X * data.cap_vector) > data.rhs_cap + 1e-9) witness = true;
    });
  }
  CHECK(witness);
}

TEST_CASE("extract_fractional round trip and clamping") {
  std::mt19937_64 rng(3);
  const auto inst = generate(test::spec(11, 50, 2));
  const auto data = build_relaxation(pad_degenerate(inst), preprocess(pad_degenerate(inst)));
  for (int trial = 0; trial < 20; ++trial) {
    const Selection x = random_selection(data.dim, inst.k, rng);
    const Eigen::VectorXd back = extract_fractional(feasible_X_from_binary(x, inst.k), data);
    for (int i = 0; i < data.dim; ++i) CHECK(back(i) == doctest::Approx(x[i]));
  }
  Eigen::MatrixXd X = feasible_X_from_binary(random_selection(data.dim, inst.k, rng), inst.k);
  X *= 1.01;
  const Eigen::VectorXd clamped = extract_fractional(X, data);
  CHECK(clamped.minCoeff() >= 0.0);
  CHECK(clamped.maxCoeff() <= 1.0);
}

TEST_CASE("fractional points of interior solutions lie in the unit box") {
  const auto inst = pad_degenerate(generate(test::spec(14, 50, 5)));
  const auto data = build_relaxation(inst, preprocess(inst));
  const auto sol = solve_sdp(data, nullptr);
  const Eigen::VectorXd x = extract_fractional(sol.X, data);
  CHECK(x.minCoeff() >= 0.0);
  CHECK(x.maxCoeff() <= 1.0);
}

TEST_CASE("n == 2k is rejected and padding preserves the optimum") {
  auto inst = generate(test::spec(10, 50, 1));
  inst.k = 5;
  while (preprocess(inst).k_max < 5) ++inst.capacity;
  CHECK_THROWS_AS(build_relaxation(inst, preprocess(inst)), Error);
  const auto padded = pad_degenerate(inst);
  CHECK(padded.n == 11);
  CHECK(padded.weights.back() == inst.capacity + 1);
  CHECK(enumerate(padded).value == enumerate(inst).value);
  CHECK_NOTHROW(build_relaxation(padded, preprocess(padded)));
}

TEST_CASE("cardinality outside 1..k_max is rejected") {
  auto inst = generate(test::spec(10, 50, 2));
  inst.k = preprocess(inst).k_max + 1;
  if (2 * inst.k == inst.n) ++inst.k;
  CHECK_THROWS_AS(build_relaxation(inst, preprocess(inst)), Error);
}
