#include "kqkp/oracle.hpp"

#include <numeric>
#include <vector>

namespace kqkp {

OracleResult enumerate(const Instance& inst) {
  if (inst.n > kOracleMaxItems) {
    throw Error(ErrorCode::TooLarge, "enumeration limited to n <= 24");
  }
  OracleResult out;
  const int n = inst.n;
  const int k = inst.k;
  if (k < 0 || k > n) return out;

  std::vector<int> combo(static_cast<std::size_t>(k));
  std::iota(combo.begin(), combo.end(), 0);
  Selection x(static_cast<std::size_t>(n), 0);
  for (;;) {
    std::int64_t weight = 0;
    for (int j : combo) weight += inst.weights[j];
    if (weight <= inst.capacity) {
      ++out.feasible_count;
      std::fill(x.begin(), x.end(), 0);
      for (int j : combo) x[j] = 1;
      const auto value = objective(inst, x);
      if (!out.value || value > *out.value) {
        out.value = value;
        out.argmax = x;
      }
    }
    // Next combination in lexicographic order.
    int pos = k - 1;
    while (pos >= 0 && combo[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++combo[pos];
    for (int r = pos + 1; r < k; ++r) combo[r] = combo[r - 1] + 1;
  }
  return out;
}

}  // namespace kqkp
