#pragma once

// Forward Wright-Fisher model with k mutation classes under the infinite
// alleles assumption, and the exact ancestral quantities of the finite model:
// the probability that p genes have m distinct parental lines one generation
// back, and the generator of the limiting pure-death process.

#include "esf/core.hpp"
#include "esf/measure.hpp"
#include "esf/partitions.hpp"
#include "esf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace esf {

/// Allele identifier: class label in the top 8 bits, per-class serial below.
using AlleleId = std::uint64_t;

inline constexpr int kAlleleClassShift = 56;

constexpr AlleleId make_allele(int label, std::uint64_t serial) noexcept {
  return (static_cast<AlleleId>(label) << kAlleleClassShift) | serial;
}
constexpr int allele_class(AlleleId a) noexcept { return static_cast<int>(a >> kAlleleClassShift); }
constexpr std::uint64_t allele_serial(AlleleId a) noexcept {
  return a & ((AlleleId{1} << kAlleleClassShift) - 1);
}

/// 2N genes. Fresh alleles of class l receive serials 0, 1, 2, ... so no id is reused.
class Population {
 public:
  /// Monomorphic start: every gene carries allele 0 of class `founder_class`.
  Population(int genes, int k, int founder_class = 0)
      : genes_(static_cast<std::size_t>(genes), make_allele(founder_class, 0)), next_serial_(static_cast<std::size_t>(k), 0) {
    if (genes < 1) throw InvalidInput("population needs at least one gene");
    if (k < 1 || k > 255) throw InvalidInput("class count must lie in 1..255");
    if (founder_class < 0 || founder_class >= k) throw InvalidInput("founder class out of range");
    next_serial_[static_cast<std::size_t>(founder_class)] = 1;
  }

  int size() const noexcept { return static_cast<int>(genes_.size()); }
  int k() const noexcept { return static_cast<int>(next_serial_.size()); }
  std::uint64_t generation() const noexcept { return generation_; }
  const std::vector<AlleleId>& genes() const noexcept { return genes_; }
  std::uint64_t next_serial(int l) const { return next_serial_.at(static_cast<std::size_t>(l)); }

  AlleleId fresh(int l) { return make_allele(l, next_serial_[static_cast<std::size_t>(l)]++); }

  /// Replaces the gene vector with the next generation.
  void commit(std::vector<AlleleId>& next) {
    genes_.swap(next);
    ++generation_;
  }

 private:
  std::vector<AlleleId> genes_;
  std::vector<std::uint64_t> next_serial_;
  std::uint64_t generation_ = 0;
};

/// Per-generation mutation probabilities μ_l, with sum < 1.
class MutationRates {
 public:
  explicit MutationRates(std::vector<double> mu) : mu_(std::move(mu)) {
    if (mu_.empty()) throw InvalidInput("need at least one mutation probability");
    for (double m : mu_) {
      if (!(m >= 0)) throw InvalidInput("mutation probabilities must be nonnegative");
      cumulative_.push_back(total_ += m);
    }
    if (!(total_ < 1)) throw InvalidInput("mutation probabilities must sum to less than 1");
    log_stay_ = std::log1p(-total_);
  }

  /// μ_l = θ_l / (4N) for a population of 2N genes.
  static MutationRates from_theta(const FloatParams& theta, int genes) {
    std::vector<double> mu;
    for (double t : theta.thetas()) mu.push_back(t / (2.0 * genes));
    return MutationRates(std::move(mu));
  }

  int k() const noexcept { return static_cast<int>(mu_.size()); }
  double total() const noexcept { return total_; }
  double operator[](int l) const { return mu_.at(static_cast<std::size_t>(l)); }

  /// Class of a mutation event, chosen in proportion to μ_l.
  int draw_class(Rng& rng) const {
    const double u = uniform01(rng) * total_;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<int>(it - cumulative_.begin());
  }

  /// Number of non-mutating children before the next mutant (geometric).
  std::uint64_t gap(Rng& rng) const {
    if (total_ == 0) return UINT64_MAX;
    const double u = 1.0 - uniform01(rng);  // (0, 1]
    const double g = std::floor(std::log(u) / log_stay_);
    return g >= 1.8e19 ? UINT64_MAX : static_cast<std::uint64_t>(g);
  }

 private:
  std::vector<double> mu_;
  std::vector<double> cumulative_;
  double total_ = 0;
  double log_stay_ = 0;
};

/// Reusable state for repeated generations: mutation positions are found by
/// geometric skips so non-mutating children cost one parent draw each.
class WrightFisher {
 public:
  WrightFisher(Population population, MutationRates mu) : pop_(std::move(population)), mu_(std::move(mu)) {
    if (mu_.k() != pop_.k()) throw InvalidInput("mutation rate count does not match population classes");
    buffer_.resize(static_cast<std::size_t>(pop_.size()));
  }

  /// One generation: each child picks a uniform parent; with probability μ_l it
  /// instead carries a fresh allele of class l.
  void step(Rng& rng) {
    if (!primed_) prime(rng);
    const auto genes = static_cast<std::uint64_t>(pop_.size());
    const auto& parents = pop_.genes();
    for (std::uint64_t i = 0; i < genes; ++i) buffer_[i] = parents[uniform_index(rng, genes)];
    // Skip-ahead over children; the skip carries across generations because
    // mutation indicators are i.i.d. over all children ever produced.
    while (pending_ < genes) {
      buffer_[pending_] = pop_.fresh(mu_.draw_class(rng));
      const std::uint64_t g = mu_.gap(rng);
      pending_ = g >= UINT64_MAX - pending_ - 1 ? UINT64_MAX : pending_ + g + 1;
    }
    pending_ = pending_ == UINT64_MAX ? UINT64_MAX : pending_ - genes;
    pop_.commit(buffer_);
    buffer_.resize(static_cast<std::size_t>(genes));
  }

  void advance(std::uint64_t generations, Rng& rng) {
    for (std::uint64_t t = 0; t < generations; ++t) step(rng);
  }

  const Population& population() const noexcept { return pop_; }

 private:
  void prime(Rng& rng) {
    pending_ = mu_.gap(rng);
    primed_ = true;
  }

  Population pop_;
  MutationRates mu_;
  std::vector<AlleleId> buffer_;
  std::uint64_t pending_ = 0;
  bool primed_ = false;
};

/// A single generation from `pop`, returned as a new population.
inline Population wf_step(const Population& pop, const MutationRates& mu, Rng& rng) {
  if (mu.k() != pop.k()) throw InvalidInput("mutation rate count does not match population classes");
  Population next = pop;
  const auto genes = static_cast<std::uint64_t>(pop.size());
  std::vector<AlleleId> children(genes);
  for (std::uint64_t i = 0; i < genes; ++i) {
    const AlleleId parent = pop.genes()[uniform_index(rng, genes)];
    const double u = uniform01(rng);
    children[i] = u < mu.total() ? next.fresh(mu.draw_class(rng)) : parent;
  }
  next.commit(children);
  return next;
}

/// Uniform sample of n genes without replacement, grouped by allele.
inline MultiplePartition sample_composition(const Population& pop, int n, Rng& rng) {
  if (n < 1) throw InvalidInput("sample size must be >= 1");
  if (n > pop.size()) throw InvalidInput("sample size exceeds population size 2N = " + std::to_string(pop.size()));
  const auto genes = static_cast<std::uint64_t>(pop.size());
  std::vector<std::uint64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(n));
  if (static_cast<std::uint64_t>(n) * 4 <= genes) {
    std::unordered_set<std::uint64_t> seen;
    while (chosen.size() < static_cast<std::size_t>(n)) {
      const std::uint64_t i = uniform_index(rng, genes);
      if (seen.insert(i).second) chosen.push_back(i);
    }
  } else {
    std::vector<std::uint64_t> idx(genes);
    for (std::uint64_t i = 0; i < genes; ++i) idx[i] = i;
    for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(n); ++i)
      std::swap(idx[i], idx[i + uniform_index(rng, genes - i)]);
    chosen.assign(idx.begin(), idx.begin() + n);
  }
  std::unordered_map<AlleleId, int> counts;
  for (auto i : chosen) ++counts[pop.genes()[i]];
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(pop.k()));
  for (auto [allele, c] : counts) rows[static_cast<std::size_t>(allele_class(allele))].push_back(c);
  std::vector<YoungDiagram> comps;
  for (auto& r : rows) {
    std::sort(r.begin(), r.end(), std::greater<>());
    comps.emplace_back(std::move(r));
  }
  return MultiplePartition(std::move(comps));
}

/// Stirling numbers of the second kind S(i, j), 0 <= j <= i <= n.
inline std::vector<std::vector<BigInt>> stirling_second_table(int n) {
  if (n < 0) throw InvalidInput("stirling table needs n >= 0");
  std::vector<std::vector<BigInt>> s(static_cast<std::size_t>(n) + 1);
  s[0] = {BigInt(1)};
  for (int i = 0; i < n; ++i) {
    auto& next = s[static_cast<std::size_t>(i) + 1];
    const auto& cur = s[static_cast<std::size_t>(i)];
    next.assign(static_cast<std::size_t>(i) + 2, BigInt(0));
    for (int j = 0; j <= i; ++j) {
      next[static_cast<std::size_t>(j)] += BigInt(j) * cur[static_cast<std::size_t>(j)];
      next[static_cast<std::size_t>(j) + 1] += cur[static_cast<std::size_t>(j)];
    }
  }
  return s;
}

inline BigInt stirling_second(int n, int m) {
  if (n < 0 || m < 0) throw InvalidInput("stirling numbers need nonnegative arguments");
  if (m > n) return BigInt(0);
  return stirling_second_table(n)[static_cast<std::size_t>(n)][static_cast<std::size_t>(m)];
}

/// Without mutation: P^0(p, m) = S(p, m) (2N)(2N-1)...(2N-m+1) / (2N)^p, P^0(p, 0) = [p == 0].
inline Rational neutral_transition_prob(int p, int m, int genes) {
  if (m < 0 || p < m) throw InvalidInput("need 0 <= m <= p");
  if (m == 0) return Rational(p == 0 ? 1 : 0);
  BigInt falling(1);
  for (int i = 0; i < m; ++i) falling *= genes - i;
  BigInt power(1);
  for (int i = 0; i < p; ++i) power *= genes;
  return make_rational(BigInt(stirling_second(p, m) * falling), power);
}

/// Probability that p genes trace back to m distinct non-mutant parental lines
/// one generation earlier, in a population of `genes` = 2N genes:
/// P(p, m) = sum_{j=0}^{p-m} C(p, j) (1 - Σμ)^{p-j} (Σμ)^j P^0(p - j, m).
inline Rational transition_prob(int p, int m, int genes, const std::vector<Rational>& mu) {
  if (m < 0 || p < m) throw InvalidInput("need 0 <= m <= p");
  if (p > genes) throw InvalidInput("need p <= 2N");
  Rational total(0);
  for (const auto& x : mu) {
    if (x < 0) throw InvalidInput("mutation probabilities must be nonnegative");
    total += x;
  }
  if (total >= 1) throw InvalidInput("mutation probabilities must sum to less than 1");
  const Rational stay = 1 - total;
  Rational sum(0);
  BigInt binom(1);
  for (int j = 0; j <= p - m; ++j) {
    if (j > 0) binom = binom * (p - j + 1) / j;
    sum += Rational(binom) * int_power(stay, p - j) * int_power(total, j) * neutral_transition_prob(p - j, m, genes);
  }
  return sum;
}

/// Generator of the lineage-counting death process on {0..n}, time in units of N
/// generations: q_{j,j-1} = [j(j-1) + w j] / 4 = -q_{j,j}.
template <class T>
std::vector<std::vector<T>> ancestral_generator(int n, const MutationParams<T>& theta) {
  if (n < 0) throw InvalidInput("n must be >= 0");
  std::vector<std::vector<T>> q(static_cast<std::size_t>(n) + 1, std::vector<T>(static_cast<std::size_t>(n) + 1, T(0)));
  for (int j = 1; j <= n; ++j) {
    const T rate = (T(j * (j - 1)) + theta.w() * T(j)) / T(4);
    q[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] = -rate;
    q[static_cast<std::size_t>(j)][static_cast<std::size_t>(j - 1)] = rate;
  }
  return q;
}

}  // namespace esf
