#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace esf;

namespace {

Rational q(long num, long den = 1) { return make_rational(num, den); }

long long factorial_ll(int n) { return n <= 1 ? 1 : n * factorial_ll(n - 1); }

}  // namespace

TEST(GroupTable, BuiltinsHaveExpectedClasses) {
  auto z2 = GroupTable::cyclic(2);
  EXPECT_EQ(z2.class_count(), 2);
  EXPECT_EQ(z2.class_members(0), (std::vector<int>{0}));
  auto s3 = GroupTable::symmetric3();
  EXPECT_EQ(s3.order(), 6);
  ASSERT_EQ(s3.class_count(), 3);
  std::vector<int> sizes;
  for (int c = 0; c < 3; ++c) sizes.push_back(s3.class_size(c));
  std::sort(sizes.begin(), sizes.end());
  EXPECT_EQ(sizes, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(s3.class_of(s3.identity()), 0);
  EXPECT_EQ(GroupTable::trivial().class_count(), 1);
}

TEST(GroupTable, RejectsNonGroups) {
  EXPECT_THROW(GroupTable({{0, 1}, {1, 1}}), InvalidInput);        // no inverse for 1
  EXPECT_THROW(GroupTable({{0, 0}, {0, 0}}), InvalidInput);        // no identity
  EXPECT_THROW(GroupTable({{0, 1}, {1}}), InvalidInput);           // not square
  EXPECT_THROW(GroupTable({{0, 1, 2}, {1, 0, 2}, {2, 2, 0}}), InvalidInput);
}

TEST(Wreath, GroupLawOnProducts) {
  auto g = GroupTable::symmetric3();
  std::vector<WreathElement> all;
  for_each_wreath_element(2, g, [&](const WreathElement& x) { all.push_back(x); });
  EXPECT_EQ(all.size(), 72u);
  const auto e = wreath_identity(2, g);
  for (const auto& x : all) {
    EXPECT_EQ(multiply(x, inverse(x, g), g), e);
    EXPECT_EQ(multiply(e, x, g), x);
  }
  for (std::size_t a = 0; a < all.size(); a += 7)
    for (std::size_t b = 0; b < all.size(); b += 5)
      for (std::size_t c = 0; c < all.size(); c += 11)
        EXPECT_EQ(multiply(multiply(all[a], all[b], g), all[c], g), multiply(all[a], multiply(all[b], all[c], g), g));
}

TEST(Wreath, ElementCount) {
  for (int order = 1; order <= 3; ++order)
    for (int n = 0; n <= 4; ++n) {
      long long count = 0;
      for_each_wreath_element(n, GroupTable::cyclic(order), [&](const WreathElement&) { ++count; });
      long long expected = factorial_ll(n);
      for (int i = 0; i < n; ++i) expected *= order;
      EXPECT_EQ(count, expected);
    }
}

TEST(CycleType, Examples) {
  auto z2 = GroupTable::cyclic(2);
  auto one = cycle_type(WreathElement{{1}, {0}}, z2);
  EXPECT_EQ(to_string(one.partition), "[[],[1]]");
  // s = (0 1), g = (e, a): cycle-product a·e = a
  auto two = cycle_type(WreathElement{{0, 1}, {1, 0}}, z2);
  EXPECT_EQ(to_string(two.partition), "[[],[2]]");
  EXPECT_EQ(two.class_counts, (std::vector<int>{0, 1}));
  auto trivial = cycle_type(WreathElement{{0, 0, 0, 0}, {1, 2, 0, 3}}, GroupTable::trivial());
  EXPECT_EQ(to_string(trivial.partition), "[[3,1]]");
  EXPECT_THROW(cycle_type(WreathElement{{0, 0}, {0, 0}}, z2), InvalidInput);
}

TEST(CycleType, ProductRunsAgainstCycleOrder) {
  // s = (0 1 2): cycle-product g_2 g_1 g_0
  auto g = GroupTable::symmetric3();
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b)
      for (int c = 0; c < 6; ++c) {
        auto ct = cycle_type(WreathElement{{a, b, c}, {1, 2, 0}}, g);
        const int expected = g.class_of(g.mul(c, g.mul(b, a)));
        EXPECT_EQ(ct.class_counts[static_cast<std::size_t>(expected)], 1);
      }
}

TEST(CycleType, InvariantUnderConjugation) {
  auto g = GroupTable::symmetric3();
  std::vector<WreathElement> all;
  for_each_wreath_element(3, g, [&](const WreathElement& x) { all.push_back(x); });
  for (std::size_t i = 0; i < all.size(); i += 13)
    for (std::size_t j = 0; j < all.size(); j += 17)
      EXPECT_EQ(cycle_type(conjugate(all[i], all[j], g), g).partition, cycle_type(all[i], g).partition);
}

TEST(WreathMeasure, NormalisedForZ2) {
  auto z2 = GroupTable::cyclic(2);
  WreathParams<Rational> t({q(1), q(2)}, z2);
  for (int n = 0; n <= 5; ++n) {
    Rational sum(0);
    for_each_wreath_element(n, z2, [&](const WreathElement& x) { sum += pewens_pmf(x, z2, t); });
    EXPECT_EQ(sum, q(1)) << n;
  }
}

TEST(WreathMeasure, CentralAndPushesForwardToRefinedEsf) {
  for (auto group : {GroupTable::cyclic(2), GroupTable::cyclic(3), GroupTable::symmetric3()}) {
    std::vector<Rational> weights;
    for (int l = 0; l < group.class_count(); ++l) weights.push_back(q(l + 1, 2));
    WreathParams<Rational> t(weights, group);
    const int n_max = group.order() == 6 ? 3 : 4;
    for (int n = 1; n <= n_max; ++n) {
      std::vector<WreathElement> all;
      for_each_wreath_element(n, group, [&](const WreathElement& x) { all.push_back(x); });
      std::map<MultiplePartition, Rational> pushed;
      for (const auto& x : all) pushed[cycle_type(x, group).partition] += pewens_pmf(x, group, t);
      for (const auto& [p, mass] : pushed) EXPECT_EQ(mass, refined_esf_pmf(p, t.theta()));
      for (std::size_t i = 0; i < all.size(); i += 5)
        for (std::size_t j = 0; j < all.size(); j += 7)
          EXPECT_EQ(pewens_pmf(conjugate(all[i], all[j], group), group, t), pewens_pmf(all[i], group, t));
    }
  }
}

TEST(WreathCrp, ProcessLawEqualsMeasureOnNonAbelianGroup) {
  // The within-cycle update g_p <- h^{-1} g_p keeps each cycle-product; the
  // exact law of the process must then be the central measure.
  for (auto group : {GroupTable::cyclic(2), GroupTable::cyclic(3), GroupTable::symmetric3()}) {
    std::vector<Rational> weights;
    for (int l = 0; l < group.class_count(); ++l) weights.push_back(q(2 * l + 1, 3));
    WreathParams<Rational> t(weights, group);
    for (int n = 1; n <= 3; ++n) {
      auto law = oracle::crp_process_law(n, group, weights);
      Rational total(0);
      for (const auto& [x, prob] : law) {
        EXPECT_EQ(prob, pewens_pmf(x, group, t)) << to_json_string(x);
        total += prob;
      }
      EXPECT_EQ(total, q(1));
    }
  }
}

TEST(WreathCrp, FirstStepClassShares) {
  auto g = GroupTable::symmetric3();
  WreathParams<double> t({1.0, 2.0, 0.5}, g);
  Rng rng = make_rng(31);
  std::vector<int> hits(3, 0);
  const int reps = 60000;
  for (int r = 0; r < reps; ++r) ++hits[static_cast<std::size_t>(g.class_of(crp_wreath_sample(1, g, t, rng).g[0]))];
  double denom = 0;
  for (int l = 0; l < 3; ++l) denom += t.t(l) * g.class_size(l);
  for (int l = 0; l < 3; ++l) {
    const double p = t.t(l) * g.class_size(l) / denom;
    EXPECT_NEAR(hits[static_cast<std::size_t>(l)] / static_cast<double>(reps), p, 3.5 * std::sqrt(p * (1 - p) / reps));
  }
}

TEST(WreathCrp, EmpiricalLawCloseToMeasure) {
  auto g = GroupTable::symmetric3();
  WreathParams<Rational> exact_t({q(1), q(2), q(1, 2)}, g);
  WreathParams<double> t({1.0, 2.0, 0.5}, g);
  std::map<WreathElement, Rational> exact;
  for_each_wreath_element(2, g, [&](const WreathElement& x) { exact[x] = pewens_pmf(x, g, exact_t); });
  Rng rng = make_rng(32);
  std::map<WreathElement, long> counts;
  for (int r = 0; r < 200000; ++r) ++counts[crp_wreath_sample(2, g, t, rng)];
  EXPECT_LT(tv_distance(counts, exact), 0.02);
}

TEST(WreathCrp, ClassCountsChangeOnlyOnNewCycles) {
  auto g = GroupTable::symmetric3();
  WreathParams<double> t({1.0, 2.0, 0.5}, g);
  WreathCrp crp(g, t);
  Rng rng = make_rng(33);
  std::vector<int> before(3, 0);
  for (int j = 0; j < 40; ++j) {
    const int cycles_before = std::accumulate(before.begin(), before.end(), 0);
    crp.step(rng);
    auto after = cycle_type(crp.state(), g).class_counts;
    const int cycles_after = std::accumulate(after.begin(), after.end(), 0);
    int changed = 0;
    for (int l = 0; l < 3; ++l) changed += std::abs(after[static_cast<std::size_t>(l)] - before[static_cast<std::size_t>(l)]);
    if (cycles_after == cycles_before)
      EXPECT_EQ(changed, 0);
    else
      EXPECT_EQ(changed, 1);
    before = after;
  }
}

TEST(WreathParams, DerivedThetas) {
  auto z2 = GroupTable::cyclic(2);
  WreathParams<Rational> t({q(1), q(2)}, z2);
  EXPECT_EQ(t.theta()[0], q(1, 2));
  EXPECT_EQ(t.theta()[1], q(1));
  EXPECT_THROW(WreathParams<Rational>({q(1)}, z2), InvalidInput);
  EXPECT_THROW(WreathParams<Rational>({q(1), q(0)}, z2), InvalidInput);
}

TEST(WreathElement, JsonForm) {
  EXPECT_EQ(to_json_string(WreathElement{{0, 1, 0}, {2, 0, 1}}), "{\"g\":[0,1,0],\"s\":[2,0,1]}");
}
