#pragma once

// Young diagrams, multiple partitions, allele-count matrices and class-labelled
// set partitions, with the exhaustive enumerators used by the exact oracles.
//
// Conventions: class labels l and set-partition elements are 0-based; row
// lengths j are 1-based (a row of length j is an allele seen j times).

#include "esf/core.hpp"

#include <algorithm>
#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace esf {

/// Weakly decreasing sequence of positive row lengths. The empty diagram is valid.
class YoungDiagram {
 public:
  YoungDiagram() = default;

  explicit YoungDiagram(std::vector<int> rows) : rows_(std::move(rows)) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (rows_[i] < 1) throw InvalidInput("Young diagram rows must be positive");
      if (i > 0 && rows_[i] > rows_[i - 1]) throw InvalidInput("Young diagram rows must be weakly decreasing");
      size_ += rows_[i];
    }
  }

  YoungDiagram(std::initializer_list<int> rows) : YoungDiagram(std::vector<int>(rows)) {}

  /// Builds the diagram with mult[j] rows of length j (mult[0] is ignored).
  static YoungDiagram from_multiplicities(std::span<const int> mult) {
    std::vector<int> rows;
    for (std::size_t j = mult.size(); j-- > 1;) {
      if (mult[j] < 0) throw InvalidInput("negative multiplicity");
      rows.insert(rows.end(), static_cast<std::size_t>(mult[j]), static_cast<int>(j));
    }
    return YoungDiagram(std::move(rows));
  }

  std::span<const int> rows() const noexcept { return rows_; }
  int size() const noexcept { return size_; }
  int length() const noexcept { return static_cast<int>(rows_.size()); }
  bool empty() const noexcept { return rows_.empty(); }
  int largest_row() const noexcept { return rows_.empty() ? 0 : rows_.front(); }

  /// m_j: number of rows equal to j.
  int multiplicity(int j) const {
    auto [lo, hi] = std::equal_range(rows_.begin(), rows_.end(), j, std::greater<>{});
    return static_cast<int>(hi - lo);
  }

  /// Vector indexed by row length, of size largest_row()+1; entry 0 is 0.
  std::vector<int> multiplicities() const {
    std::vector<int> m(static_cast<std::size_t>(largest_row()) + 1, 0);
    for (int r : rows_) ++m[static_cast<std::size_t>(r)];
    return m;
  }

  auto operator<=>(const YoungDiagram&) const = default;

 private:
  std::vector<int> rows_;
  int size_ = 0;
};

/// Ordered k-tuple of Young diagrams (k >= 1); n is the total box count.
class MultiplePartition {
 public:
  explicit MultiplePartition(std::vector<YoungDiagram> components) : components_(std::move(components)) {
    if (components_.empty()) throw InvalidInput("a multiple partition needs at least one component");
    for (const auto& c : components_) n_ += c.size();
  }

  /// The empty multiple partition with k components.
  static MultiplePartition empty(int k) {
    if (k < 1) throw InvalidInput("k must be positive");
    return MultiplePartition(std::vector<YoungDiagram>(static_cast<std::size_t>(k)));
  }

  int size() const noexcept { return n_; }
  int k() const noexcept { return static_cast<int>(components_.size()); }
  const YoungDiagram& operator[](int l) const { return components_.at(static_cast<std::size_t>(l)); }
  std::span<const YoungDiagram> components() const noexcept { return components_; }

  auto operator<=>(const MultiplePartition&) const = default;

 private:
  std::vector<YoungDiagram> components_;
  int n_ = 0;
};

/// n x k grid a_j^(l), j = 1..n, l = 0..k-1, with sum_{l,j} j a_j^(l) == n.
class AlleleCountMatrix {
 public:
  AlleleCountMatrix(int n, int k, std::vector<int> entries) : n_(n), k_(k), entries_(std::move(entries)) {
    if (n < 0 || k < 1) throw InvalidInput("allele-count matrix needs n >= 0 and k >= 1");
    if (entries_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(k))
      throw InvalidInput("allele-count matrix has wrong number of entries");
    long total = 0;
    for (int j = 1; j <= n; ++j)
      for (int l = 0; l < k; ++l) {
        int a = at(j, l);
        if (a < 0) throw InvalidInput("allele counts must be non-negative");
        total += static_cast<long>(j) * a;
      }
    if (total != n) throw InvalidInput("allele-count matrix violates sum_j j*a_j == n");
  }

  /// Builds the matrix entry-wise from fill(j, l); validated like the main constructor.
  static AlleleCountMatrix from_function(int n, int k, const std::function<int(int, int)>& fill) {
    std::vector<int> e(static_cast<std::size_t>(n) * static_cast<std::size_t>(k));
    for (int j = 1; j <= n; ++j)
      for (int l = 0; l < k; ++l) e[index(j, l, k)] = fill(j, l);
    return AlleleCountMatrix(n, k, std::move(e));
  }

  int n() const noexcept { return n_; }
  int k() const noexcept { return k_; }
  int at(int j, int l) const { return entries_[index(j, l, k_)]; }

  bool operator==(const AlleleCountMatrix&) const = default;

 private:
  static std::size_t index(int j, int l, int k) {
    return static_cast<std::size_t>(j - 1) * static_cast<std::size_t>(k) + static_cast<std::size_t>(l);
  }

  int n_;
  int k_;
  std::vector<int> entries_;
};

/// Partition of {0..n-1} into blocks, each carrying a class label.
/// Stored canonically: elements sorted within blocks, blocks ordered by least element.
class LabeledSetPartition {
 public:
  struct Block {
    int label;
    std::vector<int> elements;
    auto operator<=>(const Block&) const = default;
  };

  LabeledSetPartition(int n, std::vector<Block> blocks) : n_(n), blocks_(std::move(blocks)) {
    if (n < 0) throw InvalidInput("negative set size");
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    int covered = 0;
    for (auto& b : blocks_) {
      if (b.elements.empty()) throw InvalidInput("set-partition blocks must be non-empty");
      if (b.label < 0) throw InvalidInput("negative class label");
      std::sort(b.elements.begin(), b.elements.end());
      for (int e : b.elements) {
        if (e < 0 || e >= n) throw InvalidInput("set-partition element out of range");
        if (seen[static_cast<std::size_t>(e)]) throw InvalidInput("set-partition blocks overlap");
        seen[static_cast<std::size_t>(e)] = 1;
        ++covered;
      }
    }
    if (covered != n) throw InvalidInput("set-partition blocks do not cover {0..n-1}");
    std::sort(blocks_.begin(), blocks_.end(),
              [](const Block& a, const Block& b) { return a.elements.front() < b.elements.front(); });
  }

  int n() const noexcept { return n_; }
  std::span<const Block> blocks() const noexcept { return blocks_; }

  auto operator<=>(const LabeledSetPartition&) const = default;

 private:
  int n_;
  std::vector<Block> blocks_;
};

// ---------------------------------------------------------------------------
// Conversions

inline MultiplePartition matrix_to_multipartition(const AlleleCountMatrix& m) {
  std::vector<YoungDiagram> comps;
  comps.reserve(static_cast<std::size_t>(m.k()));
  for (int l = 0; l < m.k(); ++l) {
    std::vector<int> mult(static_cast<std::size_t>(m.n()) + 1, 0);
    for (int j = 1; j <= m.n(); ++j) mult[static_cast<std::size_t>(j)] = m.at(j, l);
    comps.push_back(YoungDiagram::from_multiplicities(mult));
  }
  return MultiplePartition(std::move(comps));
}

inline AlleleCountMatrix multipartition_to_matrix(const MultiplePartition& p) {
  const int n = p.size();
  const int k = p.k();
  std::vector<int> e(static_cast<std::size_t>(n) * static_cast<std::size_t>(k), 0);
  for (int l = 0; l < k; ++l)
    for (int r : p[l].rows())
      ++e[static_cast<std::size_t>(r - 1) * static_cast<std::size_t>(k) + static_cast<std::size_t>(l)];
  return AlleleCountMatrix(n, k, std::move(e));
}

/// Combines the rows of all components into one diagram.
inline YoungDiagram union_of(const MultiplePartition& p) {
  std::vector<int> rows;
  rows.reserve(static_cast<std::size_t>(p.size()));
  for (const auto& c : p.components()) rows.insert(rows.end(), c.rows().begin(), c.rows().end());
  std::sort(rows.begin(), rows.end(), std::greater<>{});
  return YoungDiagram(std::move(rows));
}

/// Component l gets one row of length |B| per block B with label l.
inline MultiplePartition set_partition_to_multipartition(const LabeledSetPartition& s, int k) {
  if (k < 1) throw InvalidInput("k must be positive");
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(k));
  for (const auto& b : s.blocks()) {
    if (b.label >= k) throw InvalidInput("set-partition label out of range");
    rows[static_cast<std::size_t>(b.label)].push_back(static_cast<int>(b.elements.size()));
  }
  std::vector<YoungDiagram> comps;
  comps.reserve(rows.size());
  for (auto& r : rows) {
    std::sort(r.begin(), r.end(), std::greater<>{});
    comps.emplace_back(std::move(r));
  }
  return MultiplePartition(std::move(comps));
}

// ---------------------------------------------------------------------------
// Enumeration

namespace detail {

inline void partitions_rec(int remaining, int max_part, std::vector<int>& cur,
                           const std::function<void(const std::vector<int>&)>& fn) {
  if (remaining == 0) {
    fn(cur);
    return;
  }
  for (int part = std::min(remaining, max_part); part >= 1; --part) {
    cur.push_back(part);
    partitions_rec(remaining - part, part, cur, fn);
    cur.pop_back();
  }
}

}  // namespace detail

/// Integer partitions of m in reverse-lexicographic order: (m), (m-1,1), ..., (1^m).
inline std::vector<YoungDiagram> partitions_of(int m) {
  if (m < 0) throw InvalidInput("cannot partition a negative integer");
  std::vector<YoungDiagram> out;
  std::vector<int> cur;
  detail::partitions_rec(m, m, cur, [&](const std::vector<int>& rows) { out.emplace_back(rows); });
  return out;
}

/// Visits every element of Y_n^(k) once, in canonical order: component-size
/// compositions (|λ^(1)|, ..., |λ^(k)|) in decreasing lexicographic order, and
/// within a composition each component in reverse-lexicographic row order.
inline void for_each_multipartition(int n, int k, const std::function<void(const MultiplePartition&)>& fn) {
  if (n < 0 || k < 1) throw InvalidInput("enumeration needs n >= 0 and k >= 1");
  std::vector<std::vector<YoungDiagram>> cache(static_cast<std::size_t>(n) + 1);
  for (int m = 0; m <= n; ++m) cache[static_cast<std::size_t>(m)] = partitions_of(m);

  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  std::vector<YoungDiagram> comps(static_cast<std::size_t>(k));

  std::function<void(int)> fill_components = [&](int l) {
    if (l == k) {
      fn(MultiplePartition(comps));
      return;
    }
    for (const auto& d : cache[static_cast<std::size_t>(sizes[static_cast<std::size_t>(l)])]) {
      comps[static_cast<std::size_t>(l)] = d;
      fill_components(l + 1);
    }
  };
  std::function<void(int, int)> compose = [&](int l, int remaining) {
    if (l == k - 1) {
      sizes[static_cast<std::size_t>(l)] = remaining;
      fill_components(0);
      return;
    }
    for (int s = remaining; s >= 0; --s) {
      sizes[static_cast<std::size_t>(l)] = s;
      compose(l + 1, remaining - s);
    }
  };
  compose(0, n);
}

inline std::vector<MultiplePartition> enumerate_multipartitions(int n, int k) {
  std::vector<MultiplePartition> out;
  for_each_multipartition(n, k, [&](const MultiplePartition& p) { out.push_back(p); });
  return out;
}

/// All labelled set partitions of {0..n-1} with labels in 0..k-1 (restricted
/// growth strings times labelings). Oracle scale only: the count is sum_b S(n,b) k^b.
inline void for_each_labeled_set_partition(int n, int k, const std::function<void(const LabeledSetPartition&)>& fn) {
  if (n < 0 || k < 1) throw InvalidInput("enumeration needs n >= 0 and k >= 1");
  std::vector<int> block_of(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> grow = [&](int i, int blocks) {
    if (i == n) {
      std::vector<int> labels(static_cast<std::size_t>(blocks), 0);
      while (true) {
        std::vector<LabeledSetPartition::Block> bs(static_cast<std::size_t>(blocks));
        for (int b = 0; b < blocks; ++b) bs[static_cast<std::size_t>(b)].label = labels[static_cast<std::size_t>(b)];
        for (int e = 0; e < n; ++e) bs[static_cast<std::size_t>(block_of[static_cast<std::size_t>(e)])].elements.push_back(e);
        fn(LabeledSetPartition(n, std::move(bs)));
        int pos = 0;
        while (pos < blocks && ++labels[static_cast<std::size_t>(pos)] == k) labels[static_cast<std::size_t>(pos++)] = 0;
        if (pos == blocks) break;
      }
      return;
    }
    for (int b = 0; b <= blocks; ++b) {
      block_of[static_cast<std::size_t>(i)] = b;
      grow(i + 1, b == blocks ? blocks + 1 : blocks);
    }
  };
  grow(0, 0);
}

/// Weak compositions m_1 + ... + m_k = n (m_i >= 0), first component largest first.
inline void for_each_composition(int n, int k, const std::function<void(std::span<const int>)>& fn) {
  if (n < 0 || k < 1) throw InvalidInput("compositions need n >= 0 and k >= 1");
  std::vector<int> parts(static_cast<std::size_t>(k), 0);
  std::function<void(int, int)> rec = [&](int i, int remaining) {
    if (i == k - 1) {
      parts[static_cast<std::size_t>(i)] = remaining;
      fn(parts);
      return;
    }
    for (int s = remaining; s >= 0; --s) {
      parts[static_cast<std::size_t>(i)] = s;
      rec(i + 1, remaining - s);
    }
  };
  rec(0, n);
}

// ---------------------------------------------------------------------------
// Text form: nested lists such as [[2,1],[1]] (valid JSON).

inline std::string to_string(const YoungDiagram& d) {
  std::string s = "[";
  for (std::size_t i = 0; i < d.rows().size(); ++i) {
    if (i) s += ',';
    s += std::to_string(d.rows()[i]);
  }
  return s + "]";
}

inline std::string to_string(const MultiplePartition& p) {
  std::string s = "[";
  for (int l = 0; l < p.k(); ++l) {
    if (l) s += ',';
    s += to_string(p[l]);
  }
  return s + "]";
}

/// Parse failure carrying the 0-based character offset of the problem.
class ParseError : public InvalidInput {
 public:
  ParseError(const std::string& what, std::size_t position)
      : InvalidInput("parse error at position " + std::to_string(position) + ": " + what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

inline MultiplePartition parse_multipartition(std::string_view text) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' || text[pos] == '\r')) ++pos;
  };
  auto expect = [&](char c) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c)
      throw ParseError(std::string("expected '") + c + "'", pos);
    ++pos;
  };
  auto peek = [&]() -> char {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  };

  std::vector<YoungDiagram> comps;
  expect('[');
  if (peek() == ']') throw ParseError("a multiple partition needs at least one component", pos);
  while (true) {
    expect('[');
    std::vector<int> rows;
    if (peek() != ']') {
      while (true) {
        skip_ws();
        std::size_t start = pos;
        long value = 0;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
          value = value * 10 + (text[pos] - '0');
          if (value > 1'000'000) throw ParseError("row length too large", start);
          ++pos;
        }
        if (pos == start) throw ParseError("expected a positive integer", start);
        if (value < 1) throw ParseError("row lengths must be positive", start);
        if (!rows.empty() && value > rows.back()) throw ParseError("rows must be weakly decreasing", start);
        rows.push_back(static_cast<int>(value));
        if (peek() == ',') {
          ++pos;
          continue;
        }
        break;
      }
    }
    expect(']');
    comps.emplace_back(std::move(rows));
    if (peek() == ',') {
      ++pos;
      continue;
    }
    break;
  }
  expect(']');
  skip_ws();
  if (pos != text.size()) throw ParseError("trailing characters", pos);
  return MultiplePartition(std::move(comps));
}

}  // namespace esf
