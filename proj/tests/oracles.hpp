#pragma once

// Straightforward reference implementations that the optimised code is
// checked against. Deliberately naive.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "cdscan/lexicon.hpp"

namespace oracle {

/// Every schema whose tokens occur as a contiguous window of `tokens`.
inline std::vector<cdscan::SchemaId> sliding_window_matches(const std::vector<cdscan::Schema>& lexicon,
                                                            const std::vector<std::string>& tokens) {
  std::vector<cdscan::SchemaId> ids;
  for (const auto& s : lexicon) {
    const auto n = s.tokens.size();
    for (std::size_t start = 0; start + n <= tokens.size(); ++start) {
      bool equal = true;
      for (std::size_t k = 0; k < n && equal; ++k) equal = tokens[start + k] == s.tokens[k];
      if (equal) {
        ids.push_back(s.id);
        break;
      }
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

inline double ecdf(const std::vector<double>& xs, double t) {
  std::size_t c = 0;
  for (double x : xs) c += x <= t ? 1 : 0;
  return static_cast<double>(c) / static_cast<double>(xs.size());
}

/// sup |F_a - F_b|, evaluated at every observed value.
inline double ks_statistic(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (const auto* s : {&a, &b}) {
    for (double t : *s) d = std::max(d, std::abs(ecdf(a, t) - ecdf(b, t)));
  }
  return d;
}

/// Share of all splits of the pooled sample into groups of |a| and |b|
/// whose statistic reaches the observed one. Needs |a| + |b| <= 24.
inline double ks_permutation_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size();
  const std::size_t k = a.size();
  const double observed = ks_statistic(a, b);
  std::uint64_t total = 0, extreme = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1u ? x : y).push_back(pooled[i]);
    ++total;
    if (ks_statistic(x, y) >= observed - 1e-12) ++extreme;
  }
  return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace oracle
