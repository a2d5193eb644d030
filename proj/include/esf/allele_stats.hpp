#pragma once

// Number of distinct alleles per class, K_n^(l): exact moments, exact joint
// law, asymptotic regimes and normal scalings, and a fast simulator that uses
// the independent Bernoulli indicators "draw i founds a new class-l allele".

#include "esf/core.hpp"
#include "esf/measure.hpp"
#include "esf/partitions.hpp"
#include "esf/rng.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace esf {

/// H_n^(p)(x) = sum_{j=0}^{n-1} (x + j)^{-p}
template <class T>
T harmonic_h(int n, int p, const T& x) {
  if (!(x > 0)) throw InvalidInput("harmonic_h needs x > 0");
  if (n < 0 || p < 1) throw InvalidInput("harmonic_h needs n >= 0 and p >= 1");
  T sum(0);
  for (int j = 0; j < n; ++j) sum += T(1) / int_power(T(x + T(j)), p);
  return sum;
}

/// E K_n^(l) = θ_l H_n^(1)(w)
template <class T>
T expected_k(int n, const MutationParams<T>& theta, int l) {
  return theta[l] * harmonic_h(n, 1, theta.w());
}

/// Var K_n^(l) = θ_l H_n^(1)(w) - θ_l^2 H_n^(2)(w)
template <class T>
T var_k(int n, const MutationParams<T>& theta, int l) {
  const T& t = theta[l];
  return t * harmonic_h(n, 1, theta.w()) - t * t * harmonic_h(n, 2, theta.w());
}

/// Var K / (E K)^2, the Chebyshev concentration ratio.
template <class T>
T concentration_ratio(int n, const MutationParams<T>& theta, int l) {
  const T e = expected_k(n, theta, l);
  return var_k(n, theta, l) / (e * e);
}

/// Unsigned Stirling numbers of the first kind [i, j] for 0 <= j <= i <= n.
inline std::vector<std::vector<BigInt>> stirling_first_table(int n) {
  if (n < 0) throw InvalidInput("stirling table needs n >= 0");
  std::vector<std::vector<BigInt>> s(static_cast<std::size_t>(n) + 1);
  s[0] = {BigInt(1)};
  for (int i = 0; i < n; ++i) {
    auto& next = s[static_cast<std::size_t>(i) + 1];
    const auto& cur = s[static_cast<std::size_t>(i)];
    next.assign(static_cast<std::size_t>(i) + 2, BigInt(0));
    for (int j = 0; j <= i; ++j) {
      next[static_cast<std::size_t>(j)] += BigInt(i) * cur[static_cast<std::size_t>(j)];
      next[static_cast<std::size_t>(j) + 1] += cur[static_cast<std::size_t>(j)];
    }
  }
  return s;
}

inline BigInt stirling_first(int n, int m) {
  if (n < 0 || m < 0) throw InvalidInput("stirling numbers need nonnegative arguments");
  if (m > n) return BigInt(0);
  return stirling_first_table(n)[static_cast<std::size_t>(n)][static_cast<std::size_t>(m)];
}

/// P(K_n^(1) = p_1, ..., K_n^(k) = p_k) =
///   n! prod θ_l^{p_l} / (w)_n * sum_{n_1+...+n_k=n} prod [n_l, p_l] / n_l!
inline Rational joint_k_pmf(int n, const ExactParams& theta, std::span<const int> counts) {
  if (static_cast<int>(counts.size()) != theta.k()) throw InvalidInput("need one count per class");
  for (int p : counts)
    if (p < 0) throw InvalidInput("allele counts must be nonnegative");
  const auto stirling = stirling_first_table(n);
  Rational sum(0);
  for_each_composition(n, theta.k(), [&](std::span<const int> sizes) {
    Rational term(1);
    for (int l = 0; l < theta.k(); ++l) {
      const int nl = sizes[static_cast<std::size_t>(l)];
      const int pl = counts[static_cast<std::size_t>(l)];
      if (pl > nl) return;
      term *= Rational(stirling[static_cast<std::size_t>(nl)][static_cast<std::size_t>(pl)]) / factorial<Rational>(nl);
    }
    sum += term;
  });
  Rational r = factorial<Rational>(n) * sum / pochhammer(theta.w(), n);
  for (int l = 0; l < theta.k(); ++l) r *= int_power(theta[l], counts[static_cast<std::size_t>(l)]);
  return r;
}

// ---------------------------------------------------------------------------
// Growing mutation rates θ_l(n) = α_l n^β
// ---------------------------------------------------------------------------

struct RegimeSpec {
  double beta = 0;
  std::vector<double> alphas;

  RegimeSpec(double b, std::vector<double> a) : beta(b), alphas(std::move(a)) {
    if (!(beta >= 0)) throw InvalidInput("beta must be >= 0");
    if (alphas.empty()) throw InvalidInput("need at least one alpha");
    for (double x : alphas)
      if (!(x > 0)) throw InvalidInput("alphas must be strictly positive");
  }

  int k() const noexcept { return static_cast<int>(alphas.size()); }
  /// A = α_1 + ... + α_k
  double total() const {
    double a = 0;
    for (double x : alphas) a += x;
    return a;
  }
  FloatParams theta_at(double n) const {
    std::vector<double> t;
    for (double x : alphas) t.push_back(x * std::pow(n, beta));
    return FloatParams(std::move(t));
  }
};

enum class Normalization { PowerLog, Linear };

/// K_n^(l) / norm(n) -> limit in probability.
struct RegimePrediction {
  double limit;
  Normalization normalization;

  /// n^β log n for PowerLog, n for Linear.
  double norm(double n, double beta) const {
    return normalization == Normalization::PowerLog ? std::pow(n, beta) * std::log(n) : n;
  }
};

/// β < 1: α_l (1 - β) against n^β log n; β = 1: α_l log((1+A)/A) against n;
/// β > 1: α_l / A against n.
inline RegimePrediction regime_prediction(const RegimeSpec& spec, int l) {
  const double alpha = spec.alphas.at(static_cast<std::size_t>(l));
  const double a = spec.total();
  if (spec.beta < 1) return {alpha * (1 - spec.beta), Normalization::PowerLog};
  if (spec.beta == 1) return {alpha * std::log((1 + a) / a), Normalization::Linear};
  return {alpha / a, Normalization::Linear};
}

enum class CltRegime { ConstantTheta, Moderate, Fast };

inline CltRegime clt_regime_for(double beta) {
  if (!(beta >= 0)) throw InvalidInput("beta must be >= 0");
  if (beta == 0) return CltRegime::ConstantTheta;
  return beta <= 1.5 ? CltRegime::Moderate : CltRegime::Fast;
}

/// (K_n^(l) - center_l) / sqrt(variance_l) is asymptotically standard normal.
struct CltScaling {
  CltRegime regime;
  std::vector<double> center;
  std::vector<double> variance;
};

/// ConstantTheta: θ_l log n for both.
/// Moderate: Δ_l = θ_l log(1 + n/w), σ_l^2 = Δ_l - n θ_l^2 / (w (w + n)).
/// Fast: n θ_l / w and n (θ_l/w)(1 - θ_l/w); needs k >= 2.
inline CltScaling clt_scaling(int n, const FloatParams& theta, CltRegime regime) {
  if (n < 1) throw InvalidInput("clt_scaling needs n >= 1");
  const double w = theta.w();
  const double dn = n;
  CltScaling out{regime, {}, {}};
  if (regime == CltRegime::Fast && theta.k() == 1)
    throw UnsupportedRegime("with a single class K_n/n has no normal fluctuations when beta > 3/2");
  for (int l = 0; l < theta.k(); ++l) {
    const double t = theta[l];
    switch (regime) {
      case CltRegime::ConstantTheta:
        out.center.push_back(t * std::log(dn));
        out.variance.push_back(t * std::log(dn));
        break;
      case CltRegime::Moderate: {
        const double delta = t * std::log1p(dn / w);
        out.center.push_back(delta);
        out.variance.push_back(delta - dn * t * t / (w * (w + dn)));
        break;
      }
      case CltRegime::Fast:
        out.center.push_back(dn * t / w);
        out.variance.push_back(dn * (t / w) * (1 - t / w));
        break;
    }
  }
  return out;
}

/// One draw of (K_n^(1), ..., K_n^(k)): draw i (0-based) founds a new allele of
/// class l with probability θ_l / (w + i), independently over i.
inline std::vector<int> simulate_k_counts(int n, const FloatParams& theta, Rng& rng) {
  const int k = theta.k();
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  const double w = theta.w();
  for (int i = 0; i < n; ++i) {
    double u = uniform01(rng) * (w + i);
    if (u >= w) continue;
    int l = 0;
    while (l + 1 < k && u >= theta[l]) u -= theta[l++];
    ++counts[static_cast<std::size_t>(l)];
  }
  return counts;
}

}  // namespace esf
