#pragma once

// Finite groups as multiplication tables, the wreath product G ≀ S(n), its
// cycle-type map onto multiple partitions indexed by conjugacy classes, the
// central measure with class weights t_l, and the Chinese restaurant process
// that samples from it.
//
// Conventions: group elements and positions are 0-based; s is stored in
// one-line notation (s[i] is the image of i). A cycle (i_1 ... i_r) means
// s(i_1) = i_2, and its cycle-product is g_{i_r} ... g_{i_1}.

#include "esf/core.hpp"
#include "esf/measure.hpp"
#include "esf/partitions.hpp"
#include "esf/rng.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace esf {

class GroupTable {
 public:
  /// table[a][b] = a·b. Group axioms are checked exhaustively.
  explicit GroupTable(std::vector<std::vector<int>> table) : table_(std::move(table)) {
    const int order = static_cast<int>(table_.size());
    if (order == 0) throw InvalidInput("group table is empty");
    for (const auto& row : table_) {
      if (static_cast<int>(row.size()) != order) throw InvalidInput("group table is not square");
      for (int v : row)
        if (v < 0 || v >= order) throw InvalidInput("group table entry out of range");
    }
    identity_ = -1;
    for (int e = 0; e < order && identity_ < 0; ++e) {
      bool ok = true;
      for (int a = 0; a < order && ok; ++a) ok = mul(e, a) == a && mul(a, e) == a;
      if (ok) identity_ = e;
    }
    if (identity_ < 0) throw InvalidInput("group table has no identity");
    inverse_.assign(static_cast<std::size_t>(order), -1);
    for (int a = 0; a < order; ++a) {
      for (int b = 0; b < order; ++b)
        if (mul(a, b) == identity_ && mul(b, a) == identity_) inverse_[static_cast<std::size_t>(a)] = b;
      if (inverse_[static_cast<std::size_t>(a)] < 0) throw InvalidInput("group element without inverse");
    }
    for (int a = 0; a < order; ++a)
      for (int b = 0; b < order; ++b)
        for (int c = 0; c < order; ++c)
          if (mul(mul(a, b), c) != mul(a, mul(b, c))) throw InvalidInput("group table is not associative");

    // Conjugacy classes, ordered by their smallest element.
    class_of_.assign(static_cast<std::size_t>(order), -1);
    for (int a = 0; a < order; ++a) {
      if (class_of_[static_cast<std::size_t>(a)] >= 0) continue;
      const int id = static_cast<int>(classes_.size());
      classes_.emplace_back();
      for (int g = 0; g < order; ++g) {
        const int c = mul(mul(g, a), inverse(g));
        if (class_of_[static_cast<std::size_t>(c)] < 0) {
          class_of_[static_cast<std::size_t>(c)] = id;
          classes_.back().push_back(c);
        }
      }
      std::sort(classes_.back().begin(), classes_.back().end());
    }
  }

  static GroupTable trivial() { return cyclic(1); }

  static GroupTable cyclic(int m) {
    if (m < 1) throw InvalidInput("cyclic group order must be >= 1");
    std::vector<std::vector<int>> t(static_cast<std::size_t>(m), std::vector<int>(static_cast<std::size_t>(m)));
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) t[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = (a + b) % m;
    return GroupTable(std::move(t));
  }

  /// S(3) with elements the permutations of {0,1,2} in lexicographic order
  /// and product (a·b)(i) = a(b(i)).
  static GroupTable symmetric3() {
    std::vector<std::array<int, 3>> perms;
    std::array<int, 3> p{0, 1, 2};
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    std::vector<std::vector<int>> t(6, std::vector<int>(6));
    for (std::size_t a = 0; a < 6; ++a)
      for (std::size_t b = 0; b < 6; ++b) {
        std::array<int, 3> c{};
        for (std::size_t i = 0; i < 3; ++i) c[i] = perms[a][static_cast<std::size_t>(perms[b][i])];
        t[a][b] = static_cast<int>(std::find(perms.begin(), perms.end(), c) - perms.begin());
      }
    return GroupTable(std::move(t));
  }

  int order() const noexcept { return static_cast<int>(table_.size()); }
  int identity() const noexcept { return identity_; }
  int mul(int a, int b) const { return table_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; }
  int inverse(int a) const { return inverse_[static_cast<std::size_t>(a)]; }
  int class_count() const noexcept { return static_cast<int>(classes_.size()); }
  int class_of(int a) const { return class_of_[static_cast<std::size_t>(a)]; }
  const std::vector<int>& class_members(int c) const { return classes_.at(static_cast<std::size_t>(c)); }
  int class_size(int c) const { return static_cast<int>(class_members(c).size()); }
  const std::vector<std::vector<int>>& table() const noexcept { return table_; }

 private:
  std::vector<std::vector<int>> table_;
  int identity_ = 0;
  std::vector<int> inverse_;
  std::vector<int> class_of_;
  std::vector<std::vector<int>> classes_;
};

/// x = ((g_0..g_{n-1}), s)
struct WreathElement {
  std::vector<int> g;
  std::vector<int> s;

  int n() const noexcept { return static_cast<int>(s.size()); }
  friend bool operator==(const WreathElement&, const WreathElement&) = default;
  friend auto operator<=>(const WreathElement&, const WreathElement&) = default;
};

inline void validate(const WreathElement& x, const GroupTable& group) {
  const std::size_t n = x.s.size();
  if (x.g.size() != n) throw InvalidInput("wreath element: g and s differ in length");
  std::vector<char> seen(n, 0);
  for (int v : x.s) {
    if (v < 0 || static_cast<std::size_t>(v) >= n || seen[static_cast<std::size_t>(v)])
      throw InvalidInput("wreath element: s is not a permutation");
    seen[static_cast<std::size_t>(v)] = 1;
  }
  for (int v : x.g)
    if (v < 0 || v >= group.order()) throw InvalidInput("wreath element: group index out of range");
}

/// (g, s)(h, t) = ((g_i h_{s^{-1}(i)})_i, s∘t)
inline WreathElement multiply(const WreathElement& x, const WreathElement& y, const GroupTable& group) {
  const std::size_t n = x.s.size();
  if (y.s.size() != n) throw InvalidInput("wreath elements of different size");
  WreathElement z{std::vector<int>(n), std::vector<int>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    z.s[i] = x.s[static_cast<std::size_t>(y.s[i])];
    z.g[static_cast<std::size_t>(x.s[i])] = group.mul(x.g[static_cast<std::size_t>(x.s[i])], y.g[i]);
  }
  return z;
}

/// (g, s)^{-1} = ((g_{s(i)}^{-1})_i, s^{-1})
inline WreathElement inverse(const WreathElement& x, const GroupTable& group) {
  const std::size_t n = x.s.size();
  WreathElement z{std::vector<int>(n), std::vector<int>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    z.s[static_cast<std::size_t>(x.s[i])] = static_cast<int>(i);
    z.g[i] = group.inverse(x.g[static_cast<std::size_t>(x.s[i])]);
  }
  return z;
}

/// y x y^{-1}
inline WreathElement conjugate(const WreathElement& x, const WreathElement& y, const GroupTable& group) {
  return multiply(multiply(y, x, group), inverse(y, group), group);
}

inline WreathElement wreath_identity(int n, const GroupTable& group) {
  WreathElement x{std::vector<int>(static_cast<std::size_t>(n), group.identity()),
                  std::vector<int>(static_cast<std::size_t>(n))};
  std::iota(x.s.begin(), x.s.end(), 0);
  return x;
}

struct CycleType {
  MultiplePartition partition;
  /// [x]_{c_l}: number of cycles whose cycle-product lies in class l.
  std::vector<int> class_counts;
};

inline CycleType cycle_type(const WreathElement& x, const GroupTable& group) {
  validate(x, group);
  const std::size_t n = x.s.size();
  const auto k = static_cast<std::size_t>(group.class_count());
  std::vector<std::vector<int>> rows(k);
  std::vector<char> visited(n, 0);
  for (std::size_t start = 0; start < n; ++start) {
    if (visited[start]) continue;
    int product = group.identity();
    int length = 0;
    std::size_t i = start;
    do {
      visited[i] = 1;
      product = group.mul(x.g[i], product);  // left-multiply: g_{i_r} ... g_{i_1}
      ++length;
      i = static_cast<std::size_t>(x.s[i]);
    } while (i != start);
    rows[static_cast<std::size_t>(group.class_of(product))].push_back(length);
  }
  CycleType out{MultiplePartition::empty(static_cast<int>(k)), std::vector<int>(k)};
  std::vector<YoungDiagram> comps;
  for (std::size_t l = 0; l < k; ++l) {
    out.class_counts[l] = static_cast<int>(rows[l].size());
    std::sort(rows[l].begin(), rows[l].end(), std::greater<>());
    comps.emplace_back(std::move(rows[l]));
  }
  out.partition = MultiplePartition(std::move(comps));
  return out;
}

/// Per-class weights t_l > 0, one per conjugacy class.
template <class T>
class WreathParams {
 public:
  WreathParams(std::vector<T> t, const GroupTable& group) : t_(std::move(t)), order_(group.order()) {
    if (static_cast<int>(t_.size()) != group.class_count())
      throw InvalidInput("need one weight per conjugacy class (" + std::to_string(group.class_count()) + ")");
    for (const T& v : t_)
      if (!(v > 0)) throw InvalidInput("class weights must be strictly positive");
    std::vector<T> th;
    for (int l = 0; l < group.class_count(); ++l)
      th.push_back(T(t_[static_cast<std::size_t>(l)] * T(group.class_size(l)) / T(order_)));
    theta_.emplace(std::move(th));
  }

  const std::vector<T>& t() const noexcept { return t_; }
  const T& t(int l) const { return t_.at(static_cast<std::size_t>(l)); }
  /// θ_l = t_l |c_l| / |G|
  const MutationParams<T>& theta() const { return *theta_; }

 private:
  std::vector<T> t_;
  int order_;
  std::optional<MutationParams<T>> theta_;
};

/// prod_l t_l^{[x]_{c_l}} / (|G|^n (θ_1 + ... + θ_k)_n)
template <class T>
T pewens_pmf(const WreathElement& x, const GroupTable& group, const WreathParams<T>& params) {
  const auto ct = cycle_type(x, group);
  T r(1);
  for (int l = 0; l < group.class_count(); ++l) r *= int_power(params.t(l), ct.class_counts[static_cast<std::size_t>(l)]);
  return r / (int_power(T(group.order()), x.n()) * pochhammer(params.theta().w(), x.n()));
}

/// All |G|^n n! elements of G ≀ S(n).
inline void for_each_wreath_element(int n, const GroupTable& group, const std::function<void(const WreathElement&)>& fn) {
  if (n < 0) throw InvalidInput("n must be >= 0");
  WreathElement x = wreath_identity(n, group);
  do {
    std::fill(x.g.begin(), x.g.end(), 0);
    while (true) {
      fn(x);
      std::size_t i = 0;
      while (i < x.g.size() && ++x.g[i] == group.order()) x.g[i++] = 0;
      if (i == x.g.size()) break;
    }
  } while (std::next_permutation(x.s.begin(), x.s.end()));
}

/// Chinese restaurant process on G ≀ S(j), j = 0..n-1. With weights
/// W = sum_l |c_l| t_l + j|G|, element j either
///  - follows position p < j in its cycle with group entry h, for each (p, h)
///    with weight 1; then s'(p) = j, s'(j) = s(p), g'_j = h, g'_p = h^{-1} g_p,
///    which leaves every cycle-product unchanged; or
///  - opens a fixed point with entry g ∈ c_l, for each such g with weight t_l.
class WreathCrp {
 public:
  WreathCrp(const GroupTable& group, const WreathParams<double>& params) : group_(group), params_(params) {
    double acc = 0;
    for (int l = 0; l < group.class_count(); ++l) {
      acc += params.t(l) * group.class_size(l);
      new_cycle_cumulative_.push_back(acc);
    }
  }

  void step(Rng& rng) {
    const auto j = static_cast<std::uint64_t>(x_.s.size());
    const auto order = static_cast<std::uint64_t>(group_.order());
    const double open = new_cycle_cumulative_.back();
    const double u = uniform01(rng) * (open + static_cast<double>(j * order));
    if (u < static_cast<double>(j * order)) {
      const std::uint64_t idx = std::min(static_cast<std::uint64_t>(u), j * order - 1);
      const auto p = static_cast<std::size_t>(idx / order);
      const int h = static_cast<int>(idx % order);
      x_.s.push_back(x_.s[p]);
      x_.s[p] = static_cast<int>(j);
      x_.g.push_back(h);
      x_.g[p] = group_.mul(group_.inverse(h), x_.g[p]);
    } else {
      const double v = u - static_cast<double>(j * order);
      auto it = std::upper_bound(new_cycle_cumulative_.begin(), new_cycle_cumulative_.end(), v);
      if (it == new_cycle_cumulative_.end()) --it;
      const int l = static_cast<int>(it - new_cycle_cumulative_.begin());
      const double before = l == 0 ? 0.0 : new_cycle_cumulative_[static_cast<std::size_t>(l - 1)];
      const auto& members = group_.class_members(l);
      auto m = static_cast<std::size_t>((v - before) / params_.t(l));
      m = std::min(m, members.size() - 1);
      x_.s.push_back(static_cast<int>(j));
      x_.g.push_back(members[m]);
    }
  }

  const WreathElement& state() const noexcept { return x_; }

 private:
  const GroupTable& group_;
  const WreathParams<double>& params_;
  std::vector<double> new_cycle_cumulative_;
  WreathElement x_;
};

inline WreathElement crp_wreath_sample(int n, const GroupTable& group, const WreathParams<double>& params, Rng& rng) {
  if (n < 1) throw InvalidInput("CRP sample size must be >= 1");
  WreathCrp crp(group, params);
  for (int i = 0; i < n; ++i) crp.step(rng);
  return crp.state();
}

inline WreathElement crp_wreath_sample(int n, const GroupTable& group, const WreathParams<double>& params,
                                       std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return crp_wreath_sample(n, group, params, rng);
}

/// {"g":[...],"s":[...]}
inline std::string to_json_string(const WreathElement& x) {
  auto list = [](const std::vector<int>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
    return out + "]";
  };
  return "{\"g\":" + list(x.g) + ",\"s\":" + list(x.s) + "}";
}

}  // namespace esf
