#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "cdscan/stats.hpp"

namespace cdscan {

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  constexpr double kEps = 1e-12;
  if (lambda < 1.18) {
    // Q = 1 - sqrt(2 pi)/lambda * sum_j exp(-(2j-1)^2 pi^2 / (8 lambda^2)),
    // which converges quickly where the alternating series does not.
    const double y = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
    double sum = 0.0;
    for (int j = 1; j < 100; ++j) {
      const double term = std::pow(y, static_cast<double>((2 * j - 1) * (2 * j - 1)));
      sum += term;
      if (term < kEps) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int j = 1; j < 100; ++j) {
    const double term = 2.0 * std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1) ? term : -term;
    if (term < kEps) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());

  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  // Step both ECDFs past every copy of the next smallest value, then compare.
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  // Once one sample is exhausted its ECDF is 1; the gap is largest right there.
  d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));

  KsResult r;
  r.statistic = d;
  r.n_a = x.size();
  r.n_b = y.size();
  r.p_value = kolmogorov_survival(std::sqrt(na * nb / (na + nb)) * d);
  return r;
}

double ks_exact_p_value(std::span<const double> a, std::span<const double> b) {
  const double d_obs = ks_two_sample(a, b).statistic;
  const std::size_t m = a.size();
  const std::size_t n = b.size();
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::sort(pooled.begin(), pooled.end());

  // A relabelling is a lattice path from (0, 0) to (m, n); its statistic is
  // the largest |i/m - j/n| over points that end a run of tied values.
  // Count the paths that stay strictly below the observed statistic.
  std::vector<bool> boundary(m + n + 1, true);
  for (std::size_t k = 1; k < m + n; ++k) boundary[k] = pooled[k - 1] != pooled[k];
  const double tol = 1e-12;
  auto inside = [&](std::size_t i, std::size_t j) {
    if (!boundary[i + j]) return true;
    return std::abs(static_cast<double>(i) / static_cast<double>(m) - static_cast<double>(j) / static_cast<double>(n)) <
           d_obs - tol;
  };

  // Counts are normalised by C(i + j, i) on the fly to stay in range:
  // f(i, j) = paths(i, j) / C(i + j, i) obeys
  // f(i, j) = f(i - 1, j) * i / (i + j) + f(i, j - 1) * j / (i + j).
  std::vector<double> row(n + 1, 0.0);
  for (std::size_t i = 0; i <= m; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      double f;
      if (i == 0 && j == 0) {
        f = 1.0;
      } else {
        const double s = static_cast<double>(i + j);
        const double up = i > 0 ? row[j] * static_cast<double>(i) / s : 0.0;
        const double left = j > 0 ? row[j - 1] * static_cast<double>(j) / s : 0.0;
        f = up + left;
      }
      row[j] = inside(i, j) ? f : 0.0;
    }
  }
  return std::clamp(1.0 - row[n], 0.0, 1.0);
}

}  // namespace cdscan
