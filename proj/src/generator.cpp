#include "kqkp/generator.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace kqkp {

Instance generate(const GenSpec& spec) {
  if (spec.n < 2 || spec.density_percent <= 0 || spec.density_percent > 100 ||
      spec.weight_min < 1 || spec.weight_max < spec.weight_min ||
      spec.profit_min < 0 || spec.profit_max < spec.profit_min) {
    throw Error(ErrorCode::Parse, "invalid generator specification");
  }
  std::mt19937_64 rng(spec.seed);
  const int n = spec.n;

  Instance inst;
  inst.n = n;
  inst.profits.assign(static_cast<std::size_t>(n) * n, 0);
  std::bernoulli_distribution present(spec.density_percent / 100.0);
  std::uniform_int_distribution<std::int64_t> profit(spec.profit_min, spec.profit_max);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      // Both draws happen unconditionally so the stream layout does not
      // depend on the density.
      const bool keep = present(rng);
      const auto value = profit(rng);
      if (keep) inst.profit(i, j) = inst.profit(j, i) = value;
    }
  }

  std::uniform_int_distribution<std::int64_t> weight(spec.weight_min, spec.weight_max);
  inst.weights.resize(n);
  for (auto& a : inst.weights) a = weight(rng);

  const auto max_a = *std::max_element(inst.weights.begin(), inst.weights.end());
  const auto sum_a = std::accumulate(inst.weights.begin(), inst.weights.end(), std::int64_t{0});
  std::uniform_int_distribution<std::int64_t> capacity(max_a, sum_a - 1);

  // Redraw b until two items fit; with n == 2 that never happens and k = 1.
  Preprocessed prep;
  for (int attempt = 0; attempt < 64; ++attempt) {
    inst.capacity = capacity(rng);
    inst.k = 1;
    prep = preprocess(inst);
    if (prep.k_max >= 2) break;
  }
  if (prep.k_max >= 2) {
    std::uniform_int_distribution<int> card(2, prep.k_max);
    inst.k = card(rng);
  } else {
    inst.k = 1;
  }
  return inst;
}

std::string instance_file_name(const GenSpec& spec) {
  return "kqkp_n" + std::to_string(spec.n) + "_d" + std::to_string(spec.density_percent) +
         "_s" + std::to_string(spec.seed) + ".txt";
}

}  // namespace kqkp
