// Restaurant process on S3 wreath S(n): the cycle type of each draw is a
// multiple partition with one component per conjugacy class of S3.

#include "esf/esf.hpp"

#include <cstdio>

int main() {
  using namespace esf;
  const auto group = GroupTable::symmetric3();
  const std::vector<Rational> t{make_rational(1, 1), make_rational(2, 1), make_rational(1, 2)};
  const WreathParams<Rational> exact_t(t, group);
  const WreathParams<double> float_t({1.0, 2.0, 0.5}, group);
  const int n = 3;
  const int draws = 300'000;

  Rng rng = make_rng(derive_seed(2024, 1));
  std::map<MultiplePartition, long> types;
  for (int r = 0; r < draws; ++r) ++types[cycle_type(crp_wreath_sample(n, group, float_t, rng), group).partition];

  std::printf("class weights theta_l = t_l |c_l| / |G|:");
  for (int l = 0; l < group.class_count(); ++l) std::printf(" %s", to_fraction_string(exact_t.theta()[l]).c_str());
  std::printf("\n%-22s %10s %10s\n", "cycle type", "empirical", "exact");
  std::map<MultiplePartition, Rational> exact;
  for_each_multipartition(n, group.class_count(), [&](const MultiplePartition& p) {
    exact[p] = refined_esf_pmf(p, exact_t.theta());
    std::printf("%-22s %10.5f %10.5f\n", to_string(p).c_str(), static_cast<double>(types[p]) / draws, to_double(exact[p]));
  });
  const auto chi = chi_square_test(types, exact);
  std::printf("chi-square %.3f on %d df, p = %.4f\n", chi.statistic, chi.degrees_of_freedom, chi.p_value);
}
