#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "error.hpp"
#include "jh_space.hpp"
#include "matrix.hpp"
#include "scalar.hpp"
#include "sigma.hpp"
#include "tree.hpp"

namespace jhlab {

/// Finite sum  sum c(phi, psi) e_phi (x) e_psi  in the injective tensor
/// product, keyed by (left node, right node).  Zero entries are not stored.
template <Scalar S>
class TensorElement {
 public:
  using key_type = std::pair<Node, Node>;
  using map_type = std::map<key_type, S>;

  TensorElement() = default;

  static TensorElement elementary(const Node& left, const Node& right, const S& c = S(1)) {
    TensorElement t;
    t.add(left, right, c);
    return t;
  }

  TensorElement& add(const Node& left, const Node& right, const S& value) {
    if (value == S(0)) return *this;
    auto [it, inserted] = entries_.try_emplace(key_type{left, right}, value);
    if (!inserted) {
      it->second += value;
      if (it->second == S(0)) entries_.erase(it);
    }
    return *this;
  }

  S operator()(const Node& left, const Node& right) const {
    auto it = entries_.find(key_type{left, right});
    return it == entries_.end() ? S(0) : it->second;
  }

  const map_type& entries() const noexcept { return entries_; }
  bool is_zero() const noexcept { return entries_.empty(); }

  std::set<Node> left_support() const {
    std::set<Node> out;
    for (const auto& [k, v] : entries_) out.insert(k.first);
    return out;
  }
  std::set<Node> right_support() const {
    std::set<Node> out;
    for (const auto& [k, v] : entries_) out.insert(k.second);
    return out;
  }

  std::size_t left_depth() const {
    std::size_t d = 0;
    for (const auto& [k, v] : entries_) d = std::max(d, k.first.length());
    return d;
  }
  std::size_t right_depth() const {
    std::size_t d = 0;
    for (const auto& [k, v] : entries_) d = std::max(d, k.second.length());
    return d;
  }

  TensorElement& operator+=(const TensorElement& o) {
    for (const auto& [k, v] : o.entries_) add(k.first, k.second, v);
    return *this;
  }
  TensorElement& operator-=(const TensorElement& o) {
    for (const auto& [k, v] : o.entries_) add(k.first, k.second, S(-v));
    return *this;
  }
  TensorElement& operator*=(const S& c) {
    if (c == S(0)) {
      entries_.clear();
      return *this;
    }
    for (auto& [k, v] : entries_) v *= c;
    return *this;
  }

  friend TensorElement operator+(TensorElement a, const TensorElement& b) { return a += b; }
  friend TensorElement operator-(TensorElement a, const TensorElement& b) { return a -= b; }
  friend TensorElement operator*(const S& c, TensorElement a) { return a *= c; }
  friend bool operator==(const TensorElement&, const TensorElement&) = default;

 private:
  map_type entries_;
};

namespace detail {

inline void require_depth(const Functional& f, std::size_t depth) {
  if (f.kind() == Functional::Kind::branch && f.as_branch().depth() < depth)
    throw Error(ErrorKind::truncation, "branch of depth " + std::to_string(f.as_branch().depth()) +
                                           " is too shallow for support depth " + std::to_string(depth));
}

}  // namespace detail

/// W f = sum_psi (sum_phi c(phi, psi) f(e_phi)) e_psi.
template <Scalar S>
TreeVector<S> apply_left(const TensorElement<S>& w, const Functional& f) {
  detail::require_depth(f, w.left_depth());
  TreeVector<S> out;
  for (const auto& [key, c] : w.entries()) {
    int s = f.on_unit(key.first);
    if (s == 1)
      out.add(key.second, c);
    else if (s == -1)
      out.add(key.second, S(-c));
  }
  return out;
}

/// <W f, g> = sum c(phi, psi) f(e_phi) g(e_psi).
template <Scalar S>
S pair(const TensorElement<S>& w, const Functional& f, const Functional& g) {
  detail::require_depth(f, w.left_depth());
  detail::require_depth(g, w.right_depth());
  S total(0);
  for (const auto& [key, c] : w.entries()) {
    const int s = f.on_unit(key.first) * g.on_unit(key.second);
    if (s == 1)
      total += c;
    else if (s == -1)
      total -= c;
  }
  return total;
}

template <Scalar S>
Matrix<S> pairing_matrix(const TensorElement<S>& w, std::span<const Functional> fs, std::span<const Functional> gs) {
  if (fs.empty() || fs.size() != gs.size())
    throw Error(ErrorKind::invalid_input, "pairing matrix needs two nonempty functional lists of equal length");
  Matrix<S> out(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (std::size_t j = 0; j < gs.size(); ++j) out(i + 1, j + 1) = pair(w, fs[i], gs[j]);
  return out;
}

struct EpsBoundOptions {
  /// Cap on the number of candidate functional families per side (0 = all).
  std::size_t search_width = 0;
  /// Heuristic settings for blocks too large for exact sigma.
  std::size_t restarts = 32;
  std::uint64_t seed = 1;
  /// Skip the lower-bound search (lo stays 0).
  bool upper_only = false;
};

template <Scalar S>
struct EpsNormBounds {
  S lo{};
  S hi{};
  bool coarse = false;  // some block fell back to sum |c|
  bool exact() const { return lo == hi; }
};

namespace detail {

template <Scalar S>
S sigma_lower(const Matrix<S>& m, const EpsBoundOptions& opt) {
  return m.size() <= kSigmaExactBound ? sigma_exact(m) : sigma_heuristic(m, opt.restarts, opt.seed);
}

/// Embeds a rows x cols coefficient table in a square matrix (zero padding
/// leaves sigma unchanged).
template <Scalar S>
Matrix<S> padded(const std::vector<std::vector<S>>& table, std::size_t rows, std::size_t cols) {
  Matrix<S> out(std::max<std::size_t>({rows, cols, 1}));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out(i + 1, j + 1) = table[i][j];
  return out;
}

/// Admissible families of segments used for the lower bound.  For each
/// level m of the support:
///   - singleton segments at the support nodes of level m;
///   - m-d segments from each distinct level-m ancestor of the support down
///     the zero-extended branch through its first support descendant
///     (d = support depth), i.e. tails of branches through the support.
/// Any sign combination of one family is again a signed admissible family,
/// hence of dual norm <= 1.
inline std::vector<std::vector<Segment>> candidate_families(const std::set<Node>& support, std::size_t search_width) {
  std::size_t depth = 0;
  for (const Node& n : support) depth = std::max(depth, n.length());
  std::vector<std::vector<Segment>> families;
  auto push_unique = [&](std::vector<Segment> fam) {
    if (fam.empty()) return;
    if (std::find(families.begin(), families.end(), fam) == families.end()) families.push_back(std::move(fam));
  };
  for (std::size_t m = depth + 1; m-- > 0;) {
    std::vector<Segment> nodes;
    for (const Node& n : support)
      if (n.length() == m) nodes.push_back(Segment::singleton(n));
    push_unique(std::move(nodes));

    std::map<Node, Node> first_below;  // level-m ancestor -> first support descendant
    for (const Node& n : support)
      if (n.length() >= m) first_below.try_emplace(n.prefix(m), n);
    std::vector<Segment> tails;
    for (const auto& [start, below] : first_below) tails.emplace_back(start, below.zero_extended(depth));
    push_unique(std::move(tails));
  }
  if (search_width > 0 && families.size() > search_width) families.resize(search_width);
  return families;
}

/// Splits entries into groups that share no row node and no column node.
template <class Entry>
std::vector<std::vector<const Entry*>> components(const std::vector<const Entry*>& members) {
  std::vector<std::size_t> parent(members.size());
  for (std::size_t k = 0; k < parent.size(); ++k) parent[k] = k;
  auto find = [&](std::size_t k) {
    while (parent[k] != k) k = parent[k] = parent[parent[k]];
    return k;
  };
  std::map<Node, std::size_t> first_row, first_col;
  for (std::size_t k = 0; k < members.size(); ++k) {
    auto [rit, rnew] = first_row.try_emplace(members[k]->first.first, k);
    if (!rnew) parent[find(k)] = find(rit->second);
    auto [cit, cnew] = first_col.try_emplace(members[k]->first.second, k);
    if (!cnew) parent[find(k)] = find(cit->second);
  }
  std::map<std::size_t, std::vector<const Entry*>> by_root;
  for (std::size_t k = 0; k < members.size(); ++k) by_root[find(k)].push_back(members[k]);
  std::vector<std::vector<const Entry*>> out;
  for (auto& [root, group] : by_root) out.push_back(std::move(group));
  return out;
}

inline std::vector<Functional> as_functionals(const std::vector<Segment>& family) {
  std::vector<Functional> out;
  out.reserve(family.size());
  for (const Segment& s : family) out.push_back(Functional::signed_family({SignedSegment{1, s}}));
  return out;
}

}  // namespace detail

/// Two-sided bounds on the injective norm of W.
///
/// lo: max of sigma([<W f_i, g_j>]) over pairs of candidate admissible
/// families {f_i}, {g_j}.  Each sign combination sum a_i f_i is a signed
/// admissible family, so every value is attained by functionals in the dual
/// unit ball.
///
/// hi: entries are grouped by (left level, right level).  Distinct nodes of
/// one level span an isometric copy of l^1(k), so each group's norm is
/// exactly sigma of its coefficient table, which splits over connected
/// components; the triangle inequality sums the groups.  Components too
/// large for exact sigma contribute sum |c| instead and set `coarse`.
template <Scalar S>
EpsNormBounds<S> eps_norm_bounds(const TensorElement<S>& w, const EpsBoundOptions& opt = {}) {
  EpsNormBounds<S> out{S(0), S(0), false};
  if (w.is_zero()) return out;

  const auto left_families =
      opt.upper_only ? std::vector<std::vector<Segment>>{} : detail::candidate_families(w.left_support(), opt.search_width);
  const auto right_families =
      opt.upper_only ? std::vector<std::vector<Segment>>{} : detail::candidate_families(w.right_support(), opt.search_width);
  for (const auto& lf : left_families) {
    const auto fs = detail::as_functionals(lf);
    for (const auto& rf : right_families) {
      const auto gs = detail::as_functionals(rf);
      std::vector<std::vector<S>> table(fs.size(), std::vector<S>(gs.size(), S(0)));
      for (std::size_t i = 0; i < fs.size(); ++i)
        for (std::size_t j = 0; j < gs.size(); ++j) table[i][j] = pair(w, fs[i], gs[j]);
      S v = detail::sigma_lower(detail::padded(table, fs.size(), gs.size()), opt);
      if (out.lo < v) out.lo = v;
    }
  }

  // Group entries by (left level, right level), then split each group into
  // connected components of its row/column incidence graph: sigma of a
  // block-diagonal table is the sum over its blocks.
  using Entry = typename TensorElement<S>::map_type::value_type;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<const Entry*>> groups;
  for (const auto& entry : w.entries())
    groups[{entry.first.first.length(), entry.first.second.length()}].push_back(&entry);
  for (const auto& [levels, members] : groups) {
    for (const auto& component : detail::components(members)) {
      std::map<Node, std::size_t> rows, cols;
      for (const Entry* e : component) {
        rows.try_emplace(e->first.first, rows.size());
        cols.try_emplace(e->first.second, cols.size());
      }
      if (std::max(rows.size(), cols.size()) > kSigmaExactBound) {
        for (const Entry* e : component) out.hi += abs_value(e->second);
        out.coarse = true;
        continue;
      }
      std::vector<std::vector<S>> table(rows.size(), std::vector<S>(cols.size(), S(0)));
      for (const Entry* e : component) table[rows[e->first.first]][cols[e->first.second]] = e->second;
      out.hi += sigma_exact(detail::padded(table, rows.size(), cols.size()));
    }
  }
  return out;
}

}  // namespace jhlab
