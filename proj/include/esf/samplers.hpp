#pragma once

// Monte Carlo generators for the refined Ewens measure: the generalized Hoppe
// urn, the death-process rates of the coalescent with killing, and the multiple
// Poisson-Dirichlet paintbox together with its exact sampling kernel.

#include "esf/core.hpp"
#include "esf/measure.hpp"
#include "esf/partitions.hpp"
#include "esf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <unordered_map>
#include <vector>

namespace esf {

// ---------------------------------------------------------------------------
// Generalized Hoppe urn
// ---------------------------------------------------------------------------

/// Urn with one black object of mass θ_l per class plus unit-mass coloured
/// objects. Drawing black of class l adds a new colour of that class; drawing a
/// coloured object adds one more of the same colour.
class HoppeUrn {
 public:
  explicit HoppeUrn(FloatParams theta) : theta_(std::move(theta)) {
    cumulative_.reserve(static_cast<std::size_t>(theta_.k()));
    double acc = 0;
    for (double t : theta_.thetas()) cumulative_.push_back(acc += t);
  }

  /// Adds one object; returns its colour id.
  int step(Rng& rng) {
    const double total = theta_.w() + static_cast<double>(element_colour_.size());
    const double u = uniform01(rng) * total;
    int colour;
    if (u < theta_.w()) {
      auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      if (it == cumulative_.end()) --it;
      colour = static_cast<int>(colour_class_.size());
      colour_class_.push_back(static_cast<int>(it - cumulative_.begin()));
      colour_count_.push_back(0);
    } else {
      // u - w is uniform on [0, #objects): pick an existing object and copy its colour.
      auto index = static_cast<std::size_t>(u - theta_.w());
      index = std::min(index, element_colour_.size() - 1);
      colour = element_colour_[index];
    }
    ++colour_count_[static_cast<std::size_t>(colour)];
    element_colour_.push_back(colour);
    return colour;
  }

  int size() const noexcept { return static_cast<int>(element_colour_.size()); }
  int colours() const noexcept { return static_cast<int>(colour_class_.size()); }
  int colour_class(int c) const { return colour_class_.at(static_cast<std::size_t>(c)); }
  int colour_count(int c) const { return colour_count_.at(static_cast<std::size_t>(c)); }

  MultiplePartition multiple_partition() const {
    std::vector<std::vector<int>> rows(static_cast<std::size_t>(theta_.k()));
    for (std::size_t c = 0; c < colour_class_.size(); ++c)
      rows[static_cast<std::size_t>(colour_class_[c])].push_back(colour_count_[c]);
    std::vector<YoungDiagram> comps;
    comps.reserve(rows.size());
    for (auto& r : rows) {
      std::sort(r.begin(), r.end(), std::greater<>());
      comps.emplace_back(std::move(r));
    }
    return MultiplePartition(std::move(comps));
  }

  /// Elements are the draw indices 0..n-1; one block per colour.
  LabeledSetPartition set_partition() const {
    std::vector<LabeledSetPartition::Block> blocks(colour_class_.size());
    for (std::size_t c = 0; c < colour_class_.size(); ++c) blocks[c].label = colour_class_[c];
    for (std::size_t e = 0; e < element_colour_.size(); ++e)
      blocks[static_cast<std::size_t>(element_colour_[e])].elements.push_back(static_cast<int>(e));
    return LabeledSetPartition(size(), std::move(blocks));
  }

 private:
  FloatParams theta_;
  std::vector<double> cumulative_;
  std::vector<int> element_colour_;
  std::vector<int> colour_class_;
  std::vector<int> colour_count_;
};

struct UrnSample {
  MultiplePartition partition;
  LabeledSetPartition set_partition;
};

inline UrnSample hoppe_urn_sample(int n, const FloatParams& theta, Rng& rng) {
  if (n < 1) throw InvalidInput("urn sample size must be >= 1");
  HoppeUrn urn(theta);
  for (int i = 0; i < n; ++i) urn.step(rng);
  return {urn.multiple_partition(), urn.set_partition()};
}

inline UrnSample hoppe_urn_sample(int n, const FloatParams& theta, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return hoppe_urn_sample(n, theta, rng);
}

/// Multiple partition only; skips building the set partition.
inline MultiplePartition hoppe_urn_partition(int n, const FloatParams& theta, Rng& rng) {
  if (n < 1) throw InvalidInput("urn sample size must be >= 1");
  HoppeUrn urn(theta);
  for (int i = 0; i < n; ++i) urn.step(rng);
  return urn.multiple_partition();
}

// ---------------------------------------------------------------------------
// Coalescent with killing
// ---------------------------------------------------------------------------

/// Event probabilities when j lineages remain. Sums to 1.
template <class T>
struct CoalescentRates {
  T coalesce;
  std::vector<T> mutate;
};

template <class T>
CoalescentRates<T> coalescent_rates(int j, const MutationParams<T>& theta) {
  if (j < 1) throw InvalidInput("coalescent rates need j >= 1");
  const T denom = T(j - 1) + theta.w();
  CoalescentRates<T> r{T(T(j - 1) / denom), {}};
  r.mutate.reserve(static_cast<std::size_t>(theta.k()));
  for (const T& t : theta.thetas()) r.mutate.push_back(T(t / denom));
  return r;
}

// ---------------------------------------------------------------------------
// Multiple Poisson-Dirichlet
// ---------------------------------------------------------------------------

/// A point of the ranked simplex: class weights δ_l and, per class, the ranked
/// frequencies (already scaled by δ_l) plus the untracked tail mass.
struct FrequencyRanked {
  std::vector<std::vector<double>> frequencies;
  std::vector<double> weights;
  std::vector<double> remainders;
  double epsilon = 0;

  int k() const noexcept { return static_cast<int>(weights.size()); }
};

inline constexpr double kDefaultTruncation = 1e-8;

/// δ ~ Dirichlet(θ) from normalised gammas; each class gets PD(θ_l) by
/// stick-breaking with V = 1 - U^{1/θ_l}, stopped once the unbroken mass is
/// below ε, then sorted descending and scaled by δ_l.
inline FrequencyRanked pd_sample(const FloatParams& theta, double epsilon, Rng& rng) {
  if (!(epsilon > 0 && epsilon < 1)) throw InvalidInput("truncation tolerance must lie in (0, 1)");
  const auto k = static_cast<std::size_t>(theta.k());
  FrequencyRanked f;
  f.epsilon = epsilon;
  f.weights.resize(k);
  f.frequencies.resize(k);
  f.remainders.resize(k);

  if (k == 1) {
    f.weights[0] = 1.0;
  } else {
    double total = 0;
    for (std::size_t l = 0; l < k; ++l) {
      std::gamma_distribution<double> gamma(theta[static_cast<int>(l)], 1.0);
      f.weights[l] = gamma(rng);
      total += f.weights[l];
    }
    for (double& d : f.weights) d /= total;
  }

  for (std::size_t l = 0; l < k; ++l) {
    const double inv_theta = 1.0 / theta[static_cast<int>(l)];
    auto& x = f.frequencies[l];
    double residual = 1.0;
    while (residual >= epsilon) {
      const double u = 1.0 - uniform01(rng);  // (0, 1]
      const double v = 1.0 - std::pow(u, inv_theta);
      x.push_back(residual * v);
      residual -= residual * v;
    }
    std::sort(x.begin(), x.end(), std::greater<>());
    for (double& xi : x) xi *= f.weights[l];
    f.remainders[l] = residual * f.weights[l];
  }
  return f;
}

inline FrequencyRanked pd_sample(const FloatParams& theta, double epsilon, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return pd_sample(theta, epsilon, rng);
}

/// n i.i.d. draws from the frequencies; equal draws form one allele. Tail mass
/// yields a fresh singleton allele whose class is chosen in proportion to the
/// class remainders.
inline MultiplePartition paintbox_sample(int n, const FrequencyRanked& f, Rng& rng) {
  if (n < 1) throw InvalidInput("paintbox sample size must be >= 1");
  const auto k = static_cast<std::size_t>(f.k());
  std::vector<double> cumulative;
  std::vector<int> atom_class;
  double acc = 0;
  for (std::size_t l = 0; l < k; ++l)
    for (double x : f.frequencies[l]) {
      cumulative.push_back(acc += x);
      atom_class.push_back(static_cast<int>(l));
    }
  const std::size_t atoms = cumulative.size();
  for (std::size_t l = 0; l < k; ++l) cumulative.push_back(acc += f.remainders[l]);

  std::unordered_map<std::size_t, int> hits;
  std::vector<std::vector<int>> rows(k);
  for (int i = 0; i < n; ++i) {
    const double u = uniform01(rng) * acc;
    auto pos = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    if (pos >= cumulative.size()) pos = cumulative.size() - 1;
    if (pos < atoms)
      ++hits[pos];
    else
      rows[pos - atoms].push_back(1);
  }
  for (auto [atom, count] : hits) rows[static_cast<std::size_t>(atom_class[atom])].push_back(count);
  std::vector<YoungDiagram> comps;
  comps.reserve(k);
  for (auto& r : rows) {
    std::sort(r.begin(), r.end(), std::greater<>());
    comps.emplace_back(std::move(r));
  }
  return MultiplePartition(std::move(comps));
}

inline MultiplePartition paintbox_sample(int n, const FrequencyRanked& f, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return paintbox_sample(n, f, rng);
}

// ---------------------------------------------------------------------------
// Paintbox kernel
// ---------------------------------------------------------------------------

namespace detail {

/// Set partitions of {0..r-1} as restricted growth strings.
inline void for_each_set_partition(int r, const std::function<void(std::span<const int>, int)>& fn) {
  std::vector<int> rgs(static_cast<std::size_t>(r), 0);
  std::function<void(int, int)> grow = [&](int i, int blocks) {
    if (i == r) {
      fn(rgs, blocks);
      return;
    }
    for (int b = 0; b <= blocks; ++b) {
      rgs[static_cast<std::size_t>(i)] = b;
      grow(i + 1, std::max(blocks, b + 1));
    }
  };
  grow(0, 0);
}

}  // namespace detail

/// Monomial symmetric function m_λ as a signed combination of power-sum
/// products: m_λ = (1/prod_j m_j!) sum_π prod_B (-1)^{|B|-1} (|B|-1)! p_{λ_B},
/// where π runs over set partitions of the rows and λ_B is the row total of block B.
class MonomialExpansion {
 public:
  explicit MonomialExpansion(const YoungDiagram& lambda) {
    const auto rows = lambda.rows();
    const int r = lambda.length();
    std::map<std::vector<int>, double> merged;
    detail::for_each_set_partition(r, [&](std::span<const int> rgs, int blocks) {
      std::vector<int> sums(static_cast<std::size_t>(blocks), 0);
      std::vector<int> sizes(static_cast<std::size_t>(blocks), 0);
      for (int i = 0; i < r; ++i) {
        sums[static_cast<std::size_t>(rgs[static_cast<std::size_t>(i)])] += rows[static_cast<std::size_t>(i)];
        ++sizes[static_cast<std::size_t>(rgs[static_cast<std::size_t>(i)])];
      }
      double coef = 1;
      for (int s : sizes) coef *= ((s - 1) % 2 ? -1.0 : 1.0) * std::tgamma(s);
      std::sort(sums.begin(), sums.end());
      merged[sums] += coef;
    });
    double symmetry = 1;
    for (int m : lambda.multiplicities()) symmetry *= std::tgamma(m + 1.0);
    for (auto& [sums, coef] : merged)
      if (coef != 0) terms_.push_back({sums, coef / symmetry});
  }

  /// power_sums[s] = sum_i x_i^s for s = 0..|λ|.
  double evaluate(std::span<const double> power_sums) const {
    double total = 0;
    for (const auto& t : terms_) {
      double prod = t.coefficient;
      for (int s : t.block_sums) prod *= power_sums[static_cast<std::size_t>(s)];
      total += prod;
    }
    return total;
  }

 private:
  struct Term {
    std::vector<int> block_sums;
    double coefficient;
  };
  std::vector<Term> terms_;
};

inline std::vector<double> power_sums(std::span<const double> x, int max_degree) {
  std::vector<double> p(static_cast<std::size_t>(max_degree) + 1, 0.0);
  p[0] = static_cast<double>(x.size());
  for (double xi : x) {
    double power = 1;
    for (int s = 1; s <= max_degree; ++s) p[static_cast<std::size_t>(s)] += (power *= xi);
  }
  return p;
}

/// m_λ(x): sum over distinct monomials x_{i_1}^{λ_1} x_{i_2}^{λ_2} ... with distinct indices.
inline double monomial_symmetric(const YoungDiagram& lambda, std::span<const double> x) {
  return MonomialExpansion(lambda).evaluate(power_sums(x, lambda.size()));
}

/// Probability that the paintbox with frequencies f produces Λ:
/// K(Λ; f) = n! / prod_{l,j} (j!)^{a_j^(l)} * prod_l m_{λ^(l)}(x^(l)).
/// Tail mass is ignored, so K undercounts by at most O(n ε).
class PaintboxKernel {
 public:
  PaintboxKernel(int n, int k) : n_(n), k_(k), support_(enumerate_multipartitions(n, k)) {
    for (int m = 0; m <= n; ++m)
      for (auto& lambda : partitions_of(m)) {
        index_.emplace(lambda, expansions_.size());
        expansions_.emplace_back(lambda);
      }
    for (const auto& p : support_) {
      double c = std::tgamma(n + 1.0);
      std::vector<std::size_t> idx;
      for (int l = 0; l < k; ++l) {
        auto mult = p[l].multiplicities();
        for (std::size_t j = 1; j < mult.size(); ++j)
          c /= std::pow(std::tgamma(static_cast<double>(j) + 1.0), mult[j]);
        idx.push_back(index_.at(p[l]));
      }
      prefactor_.push_back(c);
      component_index_.push_back(std::move(idx));
    }
  }

  std::span<const MultiplePartition> support() const noexcept { return support_; }

  /// K(Λ; f) for every Λ in support(), in the same order.
  std::vector<double> evaluate(const FrequencyRanked& f) const {
    if (f.k() != k_) throw InvalidInput("frequency class count does not match kernel");
    std::vector<std::vector<double>> monomials(static_cast<std::size_t>(k_));
    for (int l = 0; l < k_; ++l) {
      auto p = power_sums(f.frequencies[static_cast<std::size_t>(l)], n_);
      auto& out = monomials[static_cast<std::size_t>(l)];
      out.reserve(expansions_.size());
      for (const auto& e : expansions_) out.push_back(e.evaluate(p));
    }
    std::vector<double> k_values(support_.size());
    for (std::size_t i = 0; i < support_.size(); ++i) {
      double v = prefactor_[i];
      for (int l = 0; l < k_; ++l)
        v *= monomials[static_cast<std::size_t>(l)][component_index_[i][static_cast<std::size_t>(l)]];
      k_values[i] = v;
    }
    return k_values;
  }

 private:
  int n_;
  int k_;
  std::vector<MultiplePartition> support_;
  std::vector<MonomialExpansion> expansions_;
  std::map<YoungDiagram, std::size_t> index_;
  std::vector<double> prefactor_;
  std::vector<std::vector<std::size_t>> component_index_;
};

}  // namespace esf
