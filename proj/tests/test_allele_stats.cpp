#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace esf;

namespace {

Rational q(long num, long den = 1) { return make_rational(num, den); }

/// Joint law of per-class row counts by aggregating the refined measure.
std::map<std::vector<int>, Rational> k_law_by_enumeration(int n, const ExactParams& theta) {
  std::map<std::vector<int>, Rational> law;
  for_each_multipartition(n, theta.k(), [&](const MultiplePartition& p) {
    std::vector<int> key;
    for (int l = 0; l < p.k(); ++l) key.push_back(p[l].length());
    law[key] += refined_esf_pmf(p, theta);
  });
  return law;
}

}  // namespace

TEST(Harmonic, Examples) {
  EXPECT_EQ(harmonic_h(1, 3, q(2, 5)), q(125, 8));
  EXPECT_EQ(harmonic_h(4, 1, q(1)), q(25, 12));
  EXPECT_DOUBLE_EQ(harmonic_h(1, 2, 0.5), 4.0);
  EXPECT_THROW(harmonic_h(3, 1, 0.0), InvalidInput);
}

TEST(Harmonic, BoundsHoldOnGrid) {
  for (double x : {0.1, 0.3, 1.0, 2.5, 10.0, 37.0, 100.0})
    for (int n : {1, 2, 3, 5, 10, 50, 100, 1000, 10000}) {
      const double h1 = harmonic_h(n, 1, x);
      const double h2 = harmonic_h(n, 2, x);
      const double gap = h1 - std::log1p(n / x);
      EXPECT_LT(n / (2 * x * (x + n)), gap) << x << " " << n;
      EXPECT_LT(gap, n / (x * (x + n))) << x << " " << n;
      EXPECT_LT(n / (x * (x + n)), h2) << x << " " << n;
      if (n > 1) EXPECT_LT(h2, 1 / (x * x) + (n - 1) / (x * (x + n - 1))) << x << " " << n;
    }
}

TEST(Harmonic, SecondUpperBoundIsEqualityForOneTerm) {
  for (const Rational& x : {make_rational(1, 10), make_rational(5, 2), Rational(37)})
    EXPECT_EQ(harmonic_h(1, 2, x), 1 / (x * x));
}

TEST(Moments, SingleDraw) {
  ExactParams theta{q(1, 3), q(2)};
  const Rational p = q(1, 3) / theta.w();
  EXPECT_EQ(expected_k(1, theta, 0), p);
  EXPECT_EQ(var_k(1, theta, 0), p * (1 - p));
}

TEST(Moments, SumOverClassesIsTotalTypes) {
  ExactParams theta{q(1, 3), q(2), q(5, 4)};
  for (int n = 1; n <= 12; ++n) {
    Rational sum(0);
    for (int l = 0; l < 3; ++l) sum += expected_k(n, theta, l);
    EXPECT_EQ(sum, expected_k(n, ExactParams{theta.w()}, 0));
  }
}

TEST(Moments, SingleClassMatchesEwensFormulas) {
  // E K = sum_i θ/(θ+i), Var K = sum_i θ i/(θ+i)^2
  const Rational theta = q(3, 2);
  for (int n = 1; n <= 10; ++n) {
    Rational e(0), v(0);
    for (int i = 0; i < n; ++i) {
      e += theta / (theta + i);
      v += theta * i / ((theta + i) * (theta + i));
    }
    EXPECT_EQ(expected_k(n, ExactParams{theta}, 0), e);
    EXPECT_EQ(var_k(n, ExactParams{theta}, 0), v);
  }
}

TEST(Moments, MatchJointLawMarginals) {
  ExactParams theta{q(7, 10), q(13, 10)};
  for (int n = 1; n <= 8; ++n) {
    auto law = k_law_by_enumeration(n, theta);
    for (int l = 0; l < 2; ++l) {
      Rational m1(0), m2(0);
      for (const auto& [key, prob] : law) {
        m1 += prob * key[static_cast<std::size_t>(l)];
        m2 += prob * key[static_cast<std::size_t>(l)] * key[static_cast<std::size_t>(l)];
      }
      EXPECT_EQ(expected_k(n, theta, l), m1);
      EXPECT_EQ(var_k(n, theta, l), m2 - m1 * m1);
    }
  }
}

TEST(Moments, MatchUrnMonteCarlo) {
  FloatParams theta{0.7, 1.3};
  Rng rng = make_rng(41);
  const int reps = 100000;
  std::vector<double> s1(2, 0), s2(2, 0);
  for (int r = 0; r < reps; ++r) {
    auto p = hoppe_urn_partition(50, theta, rng);
    for (int l = 0; l < 2; ++l) {
      const double k = p[l].length();
      s1[static_cast<std::size_t>(l)] += k;
      s2[static_cast<std::size_t>(l)] += k * k;
    }
  }
  for (int l = 0; l < 2; ++l) {
    const double mean = s1[static_cast<std::size_t>(l)] / reps;
    const double var = s2[static_cast<std::size_t>(l)] / reps - mean * mean;
    EXPECT_NEAR(mean, expected_k(50, theta, l), 3 * std::sqrt(var / reps));
    // standard error of the sample variance via the normal-theory approximation, inflated 2x
    EXPECT_NEAR(var, var_k(50, theta, l), 3 * 2 * var * std::sqrt(2.0 / reps));
  }
}

TEST(Stirling, Examples) {
  for (int n = 0; n <= 10; ++n) EXPECT_EQ(stirling_first(n, n), BigInt(1));
  EXPECT_EQ(stirling_first(3, 2), BigInt(3));
  for (int n = 1; n <= 12; ++n) EXPECT_EQ(stirling_first(n, 1), factorial<BigInt>(n - 1));
  EXPECT_EQ(stirling_first(2, 3), BigInt(0));
  for (int n = 0; n <= 9; ++n) {
    BigInt sum(0);
    for (int m = 0; m <= n; ++m) sum += stirling_first(n, m);
    EXPECT_EQ(sum, factorial<BigInt>(n));
  }
}

TEST(JointK, SumsToOne) {
  for (int k = 1; k <= 3; ++k) {
    std::vector<Rational> t{q(1), q(2, 3), q(5, 2)};
    t.resize(static_cast<std::size_t>(k));
    ExactParams theta(t);
    for (int n = 1; n <= 8; ++n) {
      Rational sum(0);
      std::vector<int> counts(static_cast<std::size_t>(k), 0);
      std::function<void(int)> rec = [&](int l) {
        if (l == k) {
          sum += joint_k_pmf(n, theta, counts);
          return;
        }
        for (int c = 0; c <= n; ++c) {
          counts[static_cast<std::size_t>(l)] = c;
          rec(l + 1);
        }
      };
      rec(0);
      EXPECT_EQ(sum, q(1)) << n << " " << k;
    }
  }
}

TEST(JointK, MatchesEnumeration) {
  ExactParams theta{q(1), q(2), q(3)};
  for (int n = 1; n <= 6; ++n)
    for (const auto& [key, prob] : k_law_by_enumeration(n, theta)) EXPECT_EQ(joint_k_pmf(n, theta, key), prob);
}

TEST(JointK, SingleClassClassicalLaw) {
  const Rational theta = q(4, 3);
  for (int n = 1; n <= 8; ++n)
    for (int p = 0; p <= n; ++p) {
      std::vector<int> c{p};
      EXPECT_EQ(joint_k_pmf(n, ExactParams{theta}, c),
                Rational(stirling_first(n, p)) * int_power(theta, p) / pochhammer(theta, n));
    }
}

TEST(Regime, Predictions) {
  auto a = regime_prediction(RegimeSpec(0, {1.5, 2}), 0);
  EXPECT_DOUBLE_EQ(a.limit, 1.5);
  EXPECT_EQ(a.normalization, Normalization::PowerLog);
  auto b = regime_prediction(RegimeSpec(1, {1, 1}), 0);
  EXPECT_DOUBLE_EQ(b.limit, std::log(1.5));
  EXPECT_EQ(b.normalization, Normalization::Linear);
  auto c = regime_prediction(RegimeSpec(2, {1, 3}), 1);
  EXPECT_DOUBLE_EQ(c.limit, 0.75);
  auto half = regime_prediction(RegimeSpec(0.5, {2}), 0);
  EXPECT_DOUBLE_EQ(half.limit, 1.0);
  EXPECT_THROW(RegimeSpec(-1, {1}), InvalidInput);
}

TEST(Regime, ExpectationApproachesPrediction) {
  // E K / norm moves toward the limit as n grows (β = 2: exact in the limit).
  RegimeSpec spec(2, {1, 3});
  double prev = 1e9;
  for (int n : {10, 100, 1000, 10000}) {
    const double e = expected_k(n, spec.theta_at(n), 0) / n;
    const double err = std::abs(e - regime_prediction(spec, 0).limit);
    EXPECT_LT(err, prev);
    prev = err;
  }
}

TEST(Clt, ScalingFormulas) {
  FloatParams theta{1.0, 2.0};
  auto c0 = clt_scaling(100, theta, CltRegime::ConstantTheta);
  EXPECT_DOUBLE_EQ(c0.center[1], 2 * std::log(100.0));
  EXPECT_DOUBLE_EQ(c0.variance[1], 2 * std::log(100.0));
  auto fast = clt_scaling(100, theta, CltRegime::Fast);
  EXPECT_DOUBLE_EQ(fast.center[0], 100.0 / 3);
  EXPECT_DOUBLE_EQ(fast.variance[0], 100.0 * (1.0 / 3) * (2.0 / 3));
  EXPECT_THROW(clt_scaling(100, FloatParams{5.0}, CltRegime::Fast), UnsupportedRegime);
  EXPECT_EQ(clt_regime_for(0), CltRegime::ConstantTheta);
  EXPECT_EQ(clt_regime_for(1.5), CltRegime::Moderate);
  EXPECT_EQ(clt_regime_for(1.6), CltRegime::Fast);
}

TEST(Clt, ModerateVarianceMatchesExactVarianceAsymptotically) {
  // σ^2 from the scaling vs the exact Var K: ratio -> 1.
  for (double beta : {0.5, 1.0, 1.5}) {
    RegimeSpec spec(beta, {1, 2});
    const int n = 100000;
    auto theta = spec.theta_at(n);
    auto s = clt_scaling(n, theta, CltRegime::Moderate);
    for (int l = 0; l < 2; ++l) {
      EXPECT_GT(s.variance[static_cast<std::size_t>(l)], 0);
      EXPECT_NEAR(s.variance[static_cast<std::size_t>(l)] / var_k(n, theta, l), 1.0, 0.05) << beta;
    }
  }
}

TEST(Clt, PositiveVarianceSweep) {
  Rng rng = make_rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    FloatParams theta{0.01 + 10 * uniform01(rng), 0.01 + 10 * uniform01(rng)};
    const int n = 2 + static_cast<int>(uniform_index(rng, 100000));
    for (auto regime : {CltRegime::ConstantTheta, CltRegime::Moderate, CltRegime::Fast})
      for (double v : clt_scaling(n, theta, regime).variance) EXPECT_GT(v, 0);
  }
}

TEST(Simulator, MomentsMatchFormulas) {
  FloatParams theta{1.0, 2.0};
  Rng rng = make_rng(43);
  const int reps = 50000;
  const int n = 200;
  std::vector<double> s1(2, 0), s2(2, 0);
  for (int r = 0; r < reps; ++r) {
    auto k = simulate_k_counts(n, theta, rng);
    for (std::size_t l = 0; l < 2; ++l) {
      s1[l] += k[l];
      s2[l] += static_cast<double>(k[l]) * k[l];
    }
  }
  for (int l = 0; l < 2; ++l) {
    const double mean = s1[static_cast<std::size_t>(l)] / reps;
    const double var = s2[static_cast<std::size_t>(l)] / reps - mean * mean;
    EXPECT_NEAR(mean, expected_k(n, theta, l), 3 * std::sqrt(var / reps));
  }
}

TEST(Concentration, RatioDecreasesAlongN) {
  for (double beta : {0.0, 0.5, 1.0, 2.0}) {
    RegimeSpec spec(beta, {1, 2});
    const double r2 = concentration_ratio(100, spec.theta_at(100), 0);
    const double r3 = concentration_ratio(1000, spec.theta_at(1000), 0);
    const double r4 = concentration_ratio(10000, spec.theta_at(10000), 0);
    EXPECT_GT(r2, r3);
    EXPECT_GT(r3, r4);
  }
}
