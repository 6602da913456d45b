#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace gmf::stats {

/// Arithmetic mean. Returns the common value exactly when all entries are
/// bitwise equal, so constant samples keep zero dispersion downstream.
inline double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  if (*mn == *mx) return *mn;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two
/// entries or a constant sample.
inline double sample_stddev(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  if (ss == 0.0) return 0.0;
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

/// Population standard deviation (n denominator); 0 for empty or constant
/// samples.
inline double population_stddev(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  if (ss == 0.0) return 0.0;
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

/// Median by value; even-sized samples average the two middle entries.
inline double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  std::size_t n = xs.size();
  if (n % 2 == 1) return xs[n / 2];
  return (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

/// 1-based ranks with ties averaged (fractional ranks).
inline std::vector<double> average_ranks(std::span<const double> xs) {
  std::size_t n = xs.size();
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && xs[idx[j + 1]] == xs[idx[i]]) ++j;
    double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

/// Pearson correlation; 0 when undefined (either side constant).
inline double pearson(std::span<const double> a, std::span<const double> b) {
  std::size_t n = a.size();
  if (n != b.size() || n < 2) return 0.0;
  double ma = mean(a);
  double mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

/// Spearman rank correlation with average ranks for ties.
///
/// When either rank vector is constant the coefficient is undefined; this
/// returns 1 if the two rank vectors are identical (same ordering,
/// including the all-tied case) and 0 otherwise.
inline double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) return 0.0;
  std::vector<double> ra = average_ranks(a);
  std::vector<double> rb = average_ranks(b);
  auto constant = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(),
                       [&](double x) { return x == v.front(); });
  };
  if (constant(ra) || constant(rb)) return ra == rb ? 1.0 : 0.0;
  return pearson(ra, rb);
}

}  // namespace gmf::stats
