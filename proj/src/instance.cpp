#include "kqkp/instance.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

namespace kqkp {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::NegativeData: return "NegativeData";
    case ErrorCode::CapacityOutOfRange: return "CapacityOutOfRange";
    case ErrorCode::InfeasibleFix: return "InfeasibleFix";
    case ErrorCode::DegenerateCardinality: return "DegenerateCardinality";
    case ErrorCode::CardinalityMismatch: return "CardinalityMismatch";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::IterLimit: return "IterLimit";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

Instance validate(Instance raw, ValidationLevel level, bool symmetrize) {
  const int n = raw.n;
  if (n < 0 || raw.k < 0 || raw.capacity < 0) {
    throw Error(ErrorCode::NegativeData, "n, k and b must be nonnegative");
  }
  if (raw.weights.size() != static_cast<std::size_t>(n) ||
      raw.profits.size() != static_cast<std::size_t>(n) * n) {
    throw Error(ErrorCode::Parse, "data dimensions do not match n");
  }
  for (int j = 0; j < n; ++j) {
    if (raw.weights[j] < 0) {
      throw Error(ErrorCode::NegativeData,
                  "negative weight for item " + std::to_string(j + 1));
    }
  }
  for (auto c : raw.profits) {
    if (c < 0) throw Error(ErrorCode::NegativeData, "negative profit entry");
  }

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto cij = raw.profit(i, j);
      const auto cji = raw.profit(j, i);
      if (cij == cji) continue;
      if (!symmetrize) {
        throw Error(ErrorCode::NonSymmetric,
                    "profit matrix is not symmetric at (" + std::to_string(i + 1) +
                        "," + std::to_string(j + 1) + ")");
      }
      if ((cij + cji) % 2 != 0) {
        throw Error(ErrorCode::NonSymmetric,
                    "symmetrized profit is not integral at (" + std::to_string(i + 1) +
                        "," + std::to_string(j + 1) + ")");
      }
      raw.profit(i, j) = raw.profit(j, i) = (cij + cji) / 2;
    }
  }

  if (level == ValidationLevel::Root) {
    const auto max_a = n == 0 ? 0 : *std::max_element(raw.weights.begin(), raw.weights.end());
    const auto sum_a = std::accumulate(raw.weights.begin(), raw.weights.end(), std::int64_t{0});
    if (!(max_a <= raw.capacity && raw.capacity < sum_a)) {
      throw Error(ErrorCode::CapacityOutOfRange,
                  "capacity must satisfy max a_j <= b < sum a_j (b=" +
                      std::to_string(raw.capacity) + ", max=" + std::to_string(max_a) +
                      ", sum=" + std::to_string(sum_a) + ")");
    }
  }
  return raw;
}

Preprocessed preprocess(const Instance& inst) {
  Preprocessed out;
  std::vector<std::int64_t> sorted = inst.weights;
  std::sort(sorted.begin(), sorted.end());

  std::int64_t prefix = 0;
  for (std::size_t m = 0; m < sorted.size(); ++m) {
    if (prefix + sorted[m] > inst.capacity) break;
    prefix += sorted[m];
    out.k_max = static_cast<int>(m) + 1;
  }
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(inst.k), sorted.size());
  out.b_prime = std::accumulate(sorted.begin(), sorted.begin() + take, std::int64_t{0});

  if (inst.k > out.k_max) {
    out.status = PreprocessStatus::Infeasible;
  } else if (inst.k == 1) {
    out.status = PreprocessStatus::TrivialK1;
    for (int j = 0; j < inst.n; ++j) {
      if (inst.weights[j] > inst.capacity) continue;
      if (out.trivial_index < 0 || inst.profit(j, j) > inst.profit(out.trivial_index, out.trivial_index)) {
        out.trivial_index = j;
      }
    }
    out.trivial_value = inst.profit(out.trivial_index, out.trivial_index) + inst.offset;
  }
  return out;
}

Instance fix_variable(const Instance& inst, int j, bool value) {
  if (j < 0 || j >= inst.n) {
    throw Error(ErrorCode::InfeasibleFix, "item index out of range");
  }
  if (value && (inst.k == 0 || inst.weights[j] > inst.capacity)) {
    throw Error(ErrorCode::InfeasibleFix,
                "item " + std::to_string(j + 1) + " cannot be fixed to one");
  }

  Instance out;
  out.n = inst.n - 1;
  out.k = inst.k;
  out.capacity = inst.capacity;
  out.offset = inst.offset;
  out.weights.reserve(out.n);
  out.profits.reserve(static_cast<std::size_t>(out.n) * out.n);
  for (int i = 0; i < inst.n; ++i) {
    if (i == j) continue;
    out.weights.push_back(inst.weights[i]);
    for (int l = 0; l < inst.n; ++l) {
      if (l != j) out.profits.push_back(inst.profit(i, l));
    }
  }

  if (value) {
    out.k -= 1;
    out.capacity -= inst.weights[j];
    out.offset += inst.profit(j, j);
    int r = 0;
    for (int i = 0; i < inst.n; ++i) {
      if (i == j) continue;
      out.profit(r, r) += 2 * inst.profit(i, j);
      ++r;
    }
  }
  return out;
}

std::int64_t quadratic_value(const Instance& inst, std::span<const std::uint8_t> x) {
  std::int64_t value = 0;
  for (int i = 0; i < inst.n; ++i) {
    if (!x[i]) continue;
    for (int j = 0; j < inst.n; ++j) {
      if (x[j]) value += inst.profit(i, j);
    }
  }
  return value;
}

std::int64_t objective(const Instance& inst, std::span<const std::uint8_t> x) {
  return quadratic_value(inst, x) + inst.offset;
}

bool is_feasible(const Instance& inst, std::span<const std::uint8_t> x) {
  if (x.size() != static_cast<std::size_t>(inst.n)) return false;
  int count = 0;
  std::int64_t weight = 0;
  for (int j = 0; j < inst.n; ++j) {
    if (x[j] > 1) return false;
    if (x[j]) {
      ++count;
      weight += inst.weights[j];
    }
  }
  return count == inst.k && weight <= inst.capacity;
}

namespace {

struct NumberedLine {
  int number;
  std::string text;
};

std::vector<std::int64_t> parse_integers(const NumberedLine& line, std::size_t expected,
                                         const char* what) {
  std::istringstream ss(line.text);
  std::vector<std::int64_t> values;
  std::string token;
  while (ss >> token) {
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line.number) + ": '" + token +
                                        "' is not an integer (" + what + ")");
    }
    values.push_back(v);
  }
  if (values.size() != expected) {
    throw Error(ErrorCode::Parse, "line " + std::to_string(line.number) + ": expected " +
                                      std::to_string(expected) + " integers for " + what +
                                      ", found " + std::to_string(values.size()));
  }
  return values;
}

}  // namespace

Instance read_instance(std::istream& in) {
  std::vector<NumberedLine> lines;
  std::string text;
  int number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    const auto first = text.find_first_not_of(" \t");
    if (first == std::string::npos || text[first] == '#') continue;
    lines.push_back({number, text});
  }
  if (lines.empty()) throw Error(ErrorCode::Parse, "line 1: missing header 'n k b'");

  const auto header = parse_integers(lines[0], 3, "header 'n k b'");
  if (header[0] < 0 || header[0] > 100000) {
    throw Error(ErrorCode::Parse, "line " + std::to_string(lines[0].number) + ": invalid n");
  }
  Instance inst;
  inst.n = static_cast<int>(header[0]);
  inst.k = static_cast<int>(header[1]);
  inst.capacity = header[2];

  const auto need = static_cast<std::size_t>(inst.n) + 2;
  if (lines.size() < need) {
    const int at = lines.back().number + 1;
    throw Error(ErrorCode::Parse, "line " + std::to_string(at) + ": unexpected end of input, " +
                                      std::to_string(need - lines.size()) + " line(s) missing");
  }
  if (lines.size() > need) {
    throw Error(ErrorCode::Parse,
                "line " + std::to_string(lines[need].number) + ": unexpected trailing data");
  }
  inst.weights = parse_integers(lines[1], inst.n, "weights");
  inst.profits.reserve(static_cast<std::size_t>(inst.n) * inst.n);
  for (int i = 0; i < inst.n; ++i) {
    const auto row = parse_integers(lines[2 + i], inst.n, "profit row");
    inst.profits.insert(inst.profits.end(), row.begin(), row.end());
  }
  return inst;
}

Instance read_instance_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path.string());
  return read_instance(in);
}

void write_instance(std::ostream& out, const Instance& inst) {
  out << inst.n << ' ' << inst.k << ' ' << inst.capacity << '\n';
  for (int j = 0; j < inst.n; ++j) out << (j ? " " : "") << inst.weights[j];
  out << '\n';
  for (int i = 0; i < inst.n; ++i) {
    for (int j = 0; j < inst.n; ++j) out << (j ? " " : "") << inst.profit(i, j);
    out << '\n';
  }
}

}  // namespace kqkp
