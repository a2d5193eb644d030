// Empirical law of the class-coloured urn against the exact measure, n = 4.

#include "esf/esf.hpp"

#include <cstdio>

int main() {
  using namespace esf;
  const ExactParams theta{make_rational(7, 10), make_rational(13, 10)};
  const int n = 4;
  const int draws = 200'000;
  Rng rng = make_rng(derive_seed(2024, 0));
  std::map<MultiplePartition, long> counts;
  for (int r = 0; r < draws; ++r) ++counts[hoppe_urn_partition(n, theta.to_double(), rng)];

  std::map<MultiplePartition, Rational> exact;
  std::printf("%-20s %10s %10s %12s\n", "partition", "empirical", "exact", "rational");
  for_each_multipartition(n, theta.k(), [&](const MultiplePartition& p) {
    exact[p] = refined_esf_pmf(p, theta);
    std::printf("%-20s %10.5f %10.5f %12s\n", to_string(p).c_str(), static_cast<double>(counts[p]) / draws,
                to_double(exact[p]), to_fraction_string(exact[p]).c_str());
  });
  std::printf("TV distance: %.5f over %d draws\n", tv_distance(counts, exact), draws);
}
