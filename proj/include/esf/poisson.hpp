#pragma once

// Independent Poisson representation of the allele-count matrix: exact
// conditional identity, the constrained normalising sum, and total variation
// between the first m rows under the exact law and independent Poissons.

#include "esf/core.hpp"
#include "esf/measure.hpp"
#include "esf/partitions.hpp"
#include "esf/rng.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace esf {

/// Means μ_{j,l} = θ_l / j for rows j = 1..m.
class PoissonMatrixLaw {
 public:
  PoissonMatrixLaw(int m, const FloatParams& theta) : m_(m), k_(theta.k()) {
    if (m < 1) throw InvalidInput("Poisson matrix needs m >= 1");
    for (int j = 1; j <= m; ++j)
      for (int l = 0; l < k_; ++l) means_.push_back(theta[l] / j);
  }

  int rows() const noexcept { return m_; }
  int k() const noexcept { return k_; }
  double mean(int j, int l) const {
    return means_[static_cast<std::size_t>(j - 1) * static_cast<std::size_t>(k_) + static_cast<std::size_t>(l)];
  }

  /// grid[j-1][l] ~ Poisson(θ_l / j), all independent.
  std::vector<std::vector<int>> sample(Rng& rng) const {
    std::vector<std::vector<int>> grid(static_cast<std::size_t>(m_), std::vector<int>(static_cast<std::size_t>(k_)));
    for (int j = 1; j <= m_; ++j)
      for (int l = 0; l < k_; ++l) {
        std::poisson_distribution<int> poisson(mean(j, l));
        grid[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(l)] = poisson(rng);
      }
    return grid;
  }

 private:
  int m_;
  int k_;
  std::vector<double> means_;
};

inline std::vector<std::vector<int>> poisson_matrix_sample(int m, const FloatParams& theta, Rng& rng) {
  return PoissonMatrixLaw(m, theta).sample(rng);
}

inline std::vector<std::vector<int>> poisson_matrix_sample(int m, const FloatParams& theta, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return poisson_matrix_sample(m, theta, rng);
}

/// prod_{l,j} (θ_l/j)^{a_j^(l)} / a_j^(l)!: the Poisson mass of the matrix with
/// the common factor exp(-sum_{l,j} θ_l/j) removed.
inline Rational poisson_weight(const MultiplePartition& p, const ExactParams& theta) {
  Rational r(1);
  for (int l = 0; l < p.k(); ++l) {
    auto mult = p[l].multiplicities();
    for (std::size_t j = 1; j < mult.size(); ++j)
      if (mult[j] > 0)
        r *= int_power(Rational(theta[l] / Rational(static_cast<long>(j))), mult[j]) / factorial<Rational>(mult[j]);
  }
  return r;
}

/// sum over matrices with sum_{l,j} j a_j^(l) = n of poisson_weight == (w)_n / n!
inline bool poisson_constraint_sum_check(int n, const ExactParams& theta) {
  Rational sum(0);
  for_each_multipartition(n, theta.k(), [&](const MultiplePartition& p) { sum += poisson_weight(p, theta); });
  return sum == pochhammer(theta.w(), n) / factorial<Rational>(n);
}

/// The refined Ewens law equals the independent Poisson matrix conditioned on
/// sum j η_j = n. Exponential factors are common to numerator and denominator
/// and cancel, leaving poisson_weight(a) / ((w)_n / n!).
inline CheckReport conditional_identity_check(int n, const ExactParams& theta) {
  const Rational normaliser = pochhammer(theta.w(), n) / factorial<Rational>(n);
  CheckReport report;
  for_each_multipartition(n, theta.k(), [&](const MultiplePartition& p) {
    report.record(refined_esf_pmf(p, theta) == poisson_weight(p, theta) / normaliser, to_string(p));
  });
  return report;
}

/// Total variation between (A_1, ..., A_m) under the refined Ewens law at size
/// n and the independent Poisson(θ_l/j) grid. The Ewens marginal is aggregated
/// exactly; the Poisson law is taken in full, so its mass off the Ewens support
/// enters as 1 - Q(support).
inline double truncated_tv_distance(int n, int m, const ExactParams& theta) {
  if (n < 1 || m < 1) throw InvalidInput("truncated TV needs n >= 1 and m >= 1");
  if (m > n) throw InvalidInput("truncated TV needs m <= n");
  const int k = theta.k();
  std::map<std::vector<int>, Rational> marginal;
  for_each_multipartition(n, k, [&](const MultiplePartition& p) {
    std::vector<int> key(static_cast<std::size_t>(m * k), 0);
    for (int l = 0; l < k; ++l)
      for (int j = 1; j <= m; ++j) key[static_cast<std::size_t>((j - 1) * k + l)] = p[l].multiplicity(j);
    marginal[key] += refined_esf_pmf(p, theta);
  });

  const FloatParams ft = theta.to_double();
  std::vector<double> log_means;
  for (int j = 1; j <= m; ++j)
    for (int l = 0; l < k; ++l) log_means.push_back(std::log(ft[l] / j));
  double mean_total = 0;
  for (int j = 1; j <= m; ++j) mean_total += ft.w() / j;

  double abs_diff = 0;
  double q_support = 0;
  for (const auto& [key, prob] : marginal) {
    double log_q = -mean_total;
    for (std::size_t i = 0; i < key.size(); ++i) log_q += key[i] * log_means[i] - std::lgamma(key[i] + 1.0);
    const double q = std::exp(log_q);
    q_support += q;
    abs_diff += std::abs(to_double(prob) - q);
  }
  return 0.5 * (abs_diff + std::max(0.0, 1.0 - q_support));
}

}  // namespace esf
