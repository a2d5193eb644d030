#pragma once

// The refined Ewens measure on multiple partitions.
//
// Every evaluator is a template over the scalar kind T. With T = Rational the
// result is exact (this is the backend used by every oracle); with T = double
// the direct product is fine for small n, and the *_log_pmf variants work in
// log space for large n where (w)_n overflows.

#include "esf/core.hpp"
#include "esf/partitions.hpp"

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace esf {

/// Class-wise scaled mutation rates θ_0..θ_{k-1}, all strictly positive.
template <class T>
class MutationParams {
 public:
  explicit MutationParams(std::vector<T> thetas) : thetas_(std::move(thetas)) {
    if (thetas_.empty()) throw InvalidInput("need at least one mutation parameter");
    w_ = T(0);
    for (const T& t : thetas_) {
      if (!(t > 0)) throw InvalidInput("mutation parameters must be strictly positive");
      w_ += t;
    }
  }
  MutationParams(std::initializer_list<T> thetas) : MutationParams(std::vector<T>(thetas)) {}

  int k() const noexcept { return static_cast<int>(thetas_.size()); }
  const T& operator[](int l) const { return thetas_.at(static_cast<std::size_t>(l)); }
  std::span<const T> thetas() const noexcept { return thetas_; }
  /// w = θ_0 + ... + θ_{k-1}
  const T& w() const noexcept { return w_; }

  MutationParams<double> to_double() const {
    std::vector<double> d;
    d.reserve(thetas_.size());
    for (const T& t : thetas_) d.push_back(esf::to_double(t));
    return MutationParams<double>(std::move(d));
  }

 private:
  std::vector<T> thetas_;
  T w_;
};

using ExactParams = MutationParams<Rational>;
using FloatParams = MutationParams<double>;

/// Rising factorial x(x+1)...(x+n-1); 1 when n == 0.
template <class T>
T pochhammer(const T& x, int n) {
  if (n < 0) throw InvalidInput("pochhammer needs n >= 0");
  T r(1);
  for (int i = 0; i < n; ++i) r *= x + T(i);
  return r;
}

/// log (x)_n for x > 0.
inline double log_pochhammer(double x, int n) { return std::lgamma(x + n) - std::lgamma(x); }

template <class T>
T factorial(int n) {
  T r(1);
  for (int i = 2; i <= n; ++i) r *= T(i);
  return r;
}

template <class T>
T int_power(T x, int e) {
  T r(1);
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

namespace detail {

template <class T>
void require_k(const MultiplePartition& p, const MutationParams<T>& theta) {
  if (p.k() != theta.k())
    throw InvalidInput("dimension mismatch: partition has k=" + std::to_string(p.k()) +
                       " components but " + std::to_string(theta.k()) + " mutation parameters were given");
}

}  // namespace detail

/// n!/(w)_n * prod_{l,j} (θ_l/j)^{a_j^(l)} / a_j^(l)!
template <class T>
T refined_esf_pmf(const MultiplePartition& p, const MutationParams<T>& theta) {
  detail::require_k(p, theta);
  const int n = p.size();
  T r = factorial<T>(n) / pochhammer(theta.w(), n);
  for (int l = 0; l < p.k(); ++l) {
    auto mult = p[l].multiplicities();
    for (std::size_t j = 1; j < mult.size(); ++j) {
      if (mult[j] == 0) continue;
      r *= int_power(T(theta[l] / T(static_cast<int>(j))), mult[j]) / factorial<T>(mult[j]);
    }
  }
  return r;
}

/// log of refined_esf_pmf, evaluated entirely in log space.
inline double refined_esf_log_pmf(const MultiplePartition& p, const FloatParams& theta) {
  detail::require_k(p, theta);
  const int n = p.size();
  double r = std::lgamma(n + 1.0) - log_pochhammer(theta.w(), n);
  for (int l = 0; l < p.k(); ++l) {
    auto mult = p[l].multiplicities();
    const double log_theta = std::log(theta[l]);
    for (std::size_t j = 1; j < mult.size(); ++j) {
      if (mult[j] == 0) continue;
      r += mult[j] * (log_theta - std::log(static_cast<double>(j))) - std::lgamma(mult[j] + 1.0);
    }
  }
  return r;
}

/// Ewens measure on Y_n: n!/prod_j j^{m_j} m_j! * θ^{l(λ)}/(θ)_n
template <class T>
T classical_ewens_pmf(const YoungDiagram& lambda, const T& theta) {
  if (!(theta > 0)) throw InvalidInput("Ewens parameter must be positive");
  const int n = lambda.size();
  T r = factorial<T>(n) * int_power(theta, lambda.length()) / pochhammer(theta, n);
  auto mult = lambda.multiplicities();
  for (std::size_t j = 1; j < mult.size(); ++j)
    if (mult[j] > 0) r /= int_power(T(static_cast<int>(j)), mult[j]) * factorial<T>(mult[j]);
  return r;
}

inline double classical_ewens_log_pmf(const YoungDiagram& lambda, double theta) {
  if (!(theta > 0)) throw InvalidInput("Ewens parameter must be positive");
  const int n = lambda.size();
  double r = std::lgamma(n + 1.0) + lambda.length() * std::log(theta) - log_pochhammer(theta, n);
  auto mult = lambda.multiplicities();
  for (std::size_t j = 1; j < mult.size(); ++j)
    if (mult[j] > 0) r -= mult[j] * std::log(static_cast<double>(j)) + std::lgamma(mult[j] + 1.0);
  return r;
}

/// Same value as refined_esf_pmf, through the factorisation into class weights,
/// a multinomial coefficient and per-class classical Ewens measures.
template <class T>
T refined_esf_pmf_factorized(const MultiplePartition& p, const MutationParams<T>& theta) {
  detail::require_k(p, theta);
  const int n = p.size();
  T r = factorial<T>(n) / pochhammer(theta.w(), n);
  for (int l = 0; l < p.k(); ++l) {
    const int m = p[l].size();
    r *= pochhammer(theta[l], m) / factorial<T>(m);
    r *= classical_ewens_pmf(p[l], theta[l]);
  }
  return r;
}

/// One outcome of removing a uniformly chosen box (sub-sampling n -> n-1).
struct Transition {
  MultiplePartition child;
  Rational probability;
};

/// Law of the multiple partition of a uniform sub-sample of size n-1.
/// Removing a box from a row of length L in component l has probability m_L(λ^(l)) L / n.
inline std::vector<Transition> downward_transition(const MultiplePartition& p) {
  const int n = p.size();
  if (n == 0) throw NoTransition("the empty multiple partition has no downward transition");
  std::vector<Transition> out;
  for (int l = 0; l < p.k(); ++l) {
    const auto rows = p[l].rows();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      // Only the last row of each run of equal lengths, so the result stays decreasing.
      if (i + 1 < rows.size() && rows[i + 1] == rows[i]) continue;
      const int length = rows[i];
      std::vector<int> shortened(rows.begin(), rows.end());
      if (length == 1)
        shortened.erase(shortened.begin() + static_cast<std::ptrdiff_t>(i));
      else
        --shortened[i];
      std::vector<YoungDiagram> comps(p.components().begin(), p.components().end());
      comps[static_cast<std::size_t>(l)] = YoungDiagram(std::move(shortened));
      out.push_back({MultiplePartition(std::move(comps)), make_rational(p[l].multiplicity(length) * length, n)});
    }
  }
  return out;
}

/// Outcome of an exact identity sweep.
struct CheckReport {
  bool ok = true;
  std::size_t checked = 0;
  std::vector<std::string> violations;

  void record(bool pass, const std::string& what) {
    ++checked;
    if (!pass) {
      ok = false;
      violations.push_back(what);
    }
  }
};

/// Sum of the measure over all of Y_n^(k).
template <class T>
T total_mass(int n, const MutationParams<T>& theta) {
  T sum(0);
  for_each_multipartition(n, theta.k(), [&](const MultiplePartition& p) { sum += refined_esf_pmf(p, theta); });
  return sum;
}

/// M_{n-1}(μ) == sum_p T(p -> μ) M_n(p) for every μ in Y_{n-1}^(k), exactly.
inline CheckReport check_consistency(int n, const ExactParams& theta) {
  if (n < 1) throw InvalidInput("consistency check needs n >= 1");
  std::map<MultiplePartition, Rational> pushed;
  for_each_multipartition(n, theta.k(), [&](const MultiplePartition& p) {
    const Rational mass = refined_esf_pmf(p, theta);
    for (auto& t : downward_transition(p)) pushed[t.child] += t.probability * mass;
  });
  CheckReport report;
  for_each_multipartition(n - 1, theta.k(), [&](const MultiplePartition& mu) {
    auto it = pushed.find(mu);
    const Rational lhs = refined_esf_pmf(mu, theta);
    const Rational rhs = it == pushed.end() ? Rational(0) : it->second;
    report.record(lhs == rhs, to_string(mu));
  });
  return report;
}

/// For each λ ⊢ n: sum over p with union(p) = λ of M_n(p) equals the Ewens measure at w.
inline CheckReport union_marginal_check(int n, const ExactParams& theta) {
  std::map<YoungDiagram, Rational> marginal;
  for_each_multipartition(n, theta.k(),
                          [&](const MultiplePartition& p) { marginal[union_of(p)] += refined_esf_pmf(p, theta); });
  CheckReport report;
  for (const auto& lambda : partitions_of(n))
    report.record(marginal[lambda] == classical_ewens_pmf(lambda, theta.w()), to_string(lambda));
  return report;
}

/// n! sum_{m_1+...+m_k=n} prod_l (θ_l)_{m_l}/m_l! == (w)_n
inline bool vandermonde_check(int n, const ExactParams& theta) {
  Rational sum(0);
  for_each_composition(n, theta.k(), [&](std::span<const int> m) {
    Rational term(1);
    for (int l = 0; l < theta.k(); ++l) term *= pochhammer(theta[l], m[l]) / factorial<Rational>(m[l]);
    sum += term;
  });
  return factorial<Rational>(n) * sum == pochhammer(theta.w(), n);
}

/// Law of the class-labelled set partition generated by the urn:
/// prod_B θ_{label(B)} (|B|-1)! / (w)_n
template <class T>
T labeled_set_partition_pmf(const LabeledSetPartition& s, const MutationParams<T>& theta) {
  T r(1);
  for (const auto& b : s.blocks()) {
    if (b.label >= theta.k()) throw InvalidInput("set-partition label out of range");
    r *= theta[b.label] * factorial<T>(static_cast<int>(b.elements.size()) - 1);
  }
  return r / pochhammer(theta.w(), s.n());
}

}  // namespace esf
