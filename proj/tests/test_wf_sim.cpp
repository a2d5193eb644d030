#include "oracles.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace esf;

namespace {

Rational q(long num, long den = 1) { return make_rational(num, den); }

std::set<AlleleId> allele_set(const Population& pop) { return {pop.genes().begin(), pop.genes().end()}; }

}  // namespace

TEST(AlleleId, PacksClassAndSerial) {
  const AlleleId a = make_allele(3, 123456789);
  EXPECT_EQ(allele_class(a), 3);
  EXPECT_EQ(allele_serial(a), 123456789u);
}

TEST(WfStep, ConservesSizeAndNeverReusesIds) {
  Population pop(40, 2);
  MutationRates mu({0.05, 0.1});
  Rng rng = make_rng(61);
  std::set<AlleleId> ever = allele_set(pop);
  for (int t = 0; t < 300; ++t) {
    Population next = wf_step(pop, mu, rng);
    EXPECT_EQ(next.size(), 40);
    EXPECT_EQ(next.generation(), pop.generation() + 1);
    const auto old_ids = allele_set(pop);
    for (AlleleId a : allele_set(next))
      if (!old_ids.contains(a)) EXPECT_TRUE(ever.insert(a).second) << "reused id";
    pop = std::move(next);
  }
}

TEST(WfStep, NoMutationOnlyResamples) {
  Population pop(30, 1);
  Rng rng = make_rng(62);
  MutationRates mu({0.3});
  for (int t = 0; t < 5; ++t) pop = wf_step(pop, mu, rng);
  MutationRates none({0.0});
  auto alleles = allele_set(pop);
  for (int t = 0; t < 50; ++t) {
    pop = wf_step(pop, none, rng);
    auto now = allele_set(pop);
    for (AlleleId a : now) EXPECT_TRUE(alleles.contains(a));
    alleles = now;
  }
}

TEST(WfStep, FreshAllelesPerGenerationMatchBinomialMean) {
  Population pop(2, 2);
  MutationRates mu({0.1, 0.25});
  Rng rng = make_rng(63);
  const int gens = 100000;
  for (int t = 0; t < gens; ++t) pop = wf_step(pop, mu, rng);
  for (int l = 0; l < 2; ++l) {
    const double fresh = static_cast<double>(pop.next_serial(l) - (l == 0 ? 1 : 0));
    const double p = mu[l];
    EXPECT_NEAR(fresh / gens, 2 * p, 3 * std::sqrt(2 * p * (1 - p) / gens));
  }
}

TEST(WrightFisher, FastStepMatchesMutationMean) {
  WrightFisher wf(Population(10, 2), MutationRates({0.02, 0.05}));
  Rng rng = make_rng(64);
  const int gens = 50000;
  wf.advance(gens, rng);
  for (int l = 0; l < 2; ++l) {
    const double fresh = static_cast<double>(wf.population().next_serial(l) - (l == 0 ? 1 : 0));
    const double p = l == 0 ? 0.02 : 0.05;
    EXPECT_NEAR(fresh / (10.0 * gens), p, 3 * std::sqrt(p * (1 - p) / (10.0 * gens)));
  }
  EXPECT_EQ(wf.population().size(), 10);
  EXPECT_EQ(wf.population().generation(), static_cast<std::uint64_t>(gens));
}

TEST(MutationRates, RejectsTotalAtLeastOne) {
  EXPECT_THROW(MutationRates({0.5, 0.5}), InvalidInput);
  EXPECT_THROW(MutationRates({-0.1}), InvalidInput);
  EXPECT_NO_THROW(MutationRates({0.0, 0.0}));
}

TEST(SampleComposition, Examples) {
  Population pop(6, 2, 1);
  Rng rng = make_rng(65);
  EXPECT_EQ(to_string(sample_composition(pop, 6, rng)), "[[],[6]]");
  EXPECT_EQ(to_string(sample_composition(pop, 1, rng)), "[[],[1]]");
  EXPECT_THROW(sample_composition(pop, 7, rng), InvalidInput);
}

TEST(SampleComposition, AlwaysValid) {
  WrightFisher wf(Population(200, 3), MutationRates({0.01, 0.02, 0.03}));
  Rng rng = make_rng(66);
  for (int t = 0; t < 50; ++t) {
    wf.advance(20, rng);
    for (int n : {1, 5, 60, 200}) {
      auto p = sample_composition(wf.population(), n, rng);
      EXPECT_EQ(p.size(), n);
      EXPECT_EQ(p.k(), 3);
    }
  }
}

TEST(Stirling2, Examples) {
  EXPECT_EQ(stirling_second(4, 2), BigInt(7));
  EXPECT_EQ(stirling_second(5, 3), BigInt(25));
  EXPECT_EQ(stirling_second(3, 0), BigInt(0));
  EXPECT_EQ(stirling_second(0, 0), BigInt(1));
}

TEST(TransitionProb, RowsSumToOne) {
  std::vector<Rational> mu{q(1, 50), q(3, 100)};
  for (int p = 0; p <= 6; ++p) {
    Rational sum(0);
    for (int m = 0; m <= p; ++m) sum += transition_prob(p, m, 100, mu);
    EXPECT_EQ(sum, q(1)) << p;
  }
}

TEST(TransitionProb, NoMutationIsNeutral) {
  for (int p = 0; p <= 6; ++p)
    for (int m = 0; m <= p; ++m) EXPECT_EQ(transition_prob(p, m, 20, {q(0), q(0)}), neutral_transition_prob(p, m, 20));
  // two genes: distinct parents with probability 1 - 1/(2N)
  EXPECT_EQ(neutral_transition_prob(2, 2, 20), q(19, 20));
}

TEST(TransitionProb, LargePopulationRateLimit) {
  const Rational theta1 = q(1, 2), theta2 = q(1);
  const long n_half = 1000000;  // N
  const int genes = static_cast<int>(2 * n_half);
  std::vector<Rational> mu{theta1 / (4 * n_half), theta2 / (4 * n_half)};
  const double w = 1.5;
  for (int p = 1; p <= 5; ++p) {
    const double scaled = 4.0 * n_half * to_double(1 - transition_prob(p, p, genes, mu));
    const double limit = p * (p - 1) + w * p;
    EXPECT_NEAR(scaled / limit, 1.0, 0.01) << p;
  }
}

TEST(TransitionProb, RejectsBadArguments) {
  EXPECT_THROW(transition_prob(2, 3, 10, {q(0)}), InvalidInput);
  EXPECT_THROW(transition_prob(11, 3, 10, {q(0)}), InvalidInput);
  EXPECT_THROW(transition_prob(2, 1, 10, {q(1, 2), q(1, 2)}), InvalidInput);
}

TEST(AncestralGenerator, Structure) {
  ExactParams theta{q(1, 2), q(1)};
  auto qm = ancestral_generator(6, theta);
  for (int j = 0; j <= 6; ++j) {
    Rational row(0);
    for (int i = 0; i <= 6; ++i) {
      row += qm[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      if (i != j) EXPECT_GE(qm[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)], 0);
    }
    EXPECT_EQ(row, q(0));
  }
  for (int i = 0; i <= 6; ++i) EXPECT_EQ(qm[0][static_cast<std::size_t>(i)], q(0));
  // jump chain: coalescence share of the total j(j-1) + w j rate
  for (int j = 1; j <= 6; ++j) {
    const Rational total = qm[static_cast<std::size_t>(j)][static_cast<std::size_t>(j - 1)] * 4;
    const auto rates = coalescent_rates(j, theta);
    EXPECT_EQ(Rational(j * (j - 1)) / total, rates.coalesce);
    EXPECT_EQ(theta[0] * j / total, rates.mutate[0]);
  }
}

TEST(WrightFisher, SmallPopulationStationaryPairLaw) {
  // 2N = 200, pairs only; coarse tolerance, the acceptance run is the real check.
  const int genes = 200;
  ExactParams theta{q(1, 2), q(1)};
  WrightFisher wf(Population(genes, 2), MutationRates::from_theta(theta.to_double(), genes));
  Rng rng = make_rng(67);
  wf.advance(20 * genes / 2, rng);
  std::map<MultiplePartition, long> counts;
  for (int s = 0; s < 4000; ++s) {
    wf.advance(genes / 2, rng);
    ++counts[sample_composition(wf.population(), 2, rng)];
  }
  std::map<MultiplePartition, Rational> exact;
  for_each_multipartition(2, 2, [&](const MultiplePartition& p) { exact[p] = refined_esf_pmf(p, theta); });
  EXPECT_LT(tv_distance(counts, exact), 0.08);
}
