#pragma once

#include <cstdint>
#include <string>

#include "kqkp/instance.hpp"

namespace kqkp {

struct GenSpec {
  int n = 50;
  int density_percent = 100;
  std::uint64_t seed = 0;
  std::int64_t weight_min = 1;
  std::int64_t weight_max = 50;
  std::int64_t profit_min = 1;
  std::int64_t profit_max = 100;
};

// Random instance: each pair {i,j}, i <= j, gets a uniform profit with
// probability density/100; weights uniform; b uniform in [max a, sum a - 1];
// k uniform in [2, k_max]. Deterministic in the seed.
Instance generate(const GenSpec& spec);

// kqkp_n{n}_d{density}_s{seed}.txt
std::string instance_file_name(const GenSpec& spec);

}  // namespace kqkp
