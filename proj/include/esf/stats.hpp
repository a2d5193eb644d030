#pragma once

// Goodness-of-fit helpers for comparing Monte Carlo output with exact laws.

#include "esf/core.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace esf {

/// Half the L1 distance between empirical frequencies (counts / total) and an
/// exact law. Keys missing from either side count as zero there.
template <class Key, class Count, class Prob>
double tv_distance(const std::map<Key, Count>& counts, const std::map<Key, Prob>& exact) {
  double total = 0;
  for (const auto& [key, c] : counts) total += static_cast<double>(c);
  if (total <= 0) throw InvalidInput("no observations");
  double sum = 0;
  for (const auto& [key, p] : exact) {
    auto it = counts.find(key);
    const double f = it == counts.end() ? 0.0 : static_cast<double>(it->second) / total;
    sum += std::abs(f - to_double(p));
  }
  for (const auto& [key, c] : counts)
    if (!exact.contains(key)) sum += static_cast<double>(c) / total;
  return 0.5 * sum;
}

struct ChiSquareResult {
  double statistic;
  int degrees_of_freedom;
  double p_value;
};

/// Pearson test of counts against an exact law. Cells with expected count
/// below `min_expected` are pooled into one cell.
template <class Key, class Count, class Prob>
ChiSquareResult chi_square_test(const std::map<Key, Count>& counts, const std::map<Key, Prob>& exact,
                                double min_expected = 5.0) {
  double total = 0;
  for (const auto& [key, c] : counts) total += static_cast<double>(c);
  if (total <= 0) throw InvalidInput("no observations");
  double stat = 0;
  int cells = 0;
  double pooled_obs = 0;
  double pooled_exp = 0;
  for (const auto& [key, p] : exact) {
    auto it = counts.find(key);
    const double obs = it == counts.end() ? 0.0 : static_cast<double>(it->second);
    const double expected = to_double(p) * total;
    if (expected < min_expected) {
      pooled_obs += obs;
      pooled_exp += expected;
      continue;
    }
    stat += (obs - expected) * (obs - expected) / expected;
    ++cells;
  }
  for (const auto& [key, c] : counts)
    if (!exact.contains(key)) pooled_obs += static_cast<double>(c);
  if (pooled_exp > 0) {
    stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++cells;
  } else if (pooled_obs > 0) {
    return {INFINITY, std::max(cells - 1, 1), 0.0};
  }
  const int dof = std::max(cells - 1, 1);
  boost::math::chi_squared dist(dof);
  return {stat, dof, boost::math::cdf(boost::math::complement(dist, stat))};
}

inline double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Kolmogorov-Smirnov statistic sup |F_n - Φ|.
inline double ks_statistic_normal(std::vector<double> samples) {
  if (samples.empty()) throw InvalidInput("no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = standard_normal_cdf(samples[i]);
    d = std::max({d, (static_cast<double>(i) + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace esf
