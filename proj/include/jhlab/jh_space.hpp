#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "error.hpp"
#include "scalar.hpp"
#include "tree.hpp"

namespace jhlab {

/// Finitely supported x : T -> S.  Zero entries are never stored.
template <Scalar S>
class TreeVector {
 public:
  using map_type = std::map<Node, S>;

  TreeVector() = default;

  static TreeVector unit(const Node& n) {
    TreeVector v;
    v.entries_.emplace(n, S(1));
    return v;
  }

  /// x(n) += value
  TreeVector& add(const Node& n, const S& value) {
    if (value == S(0)) return *this;
    auto [it, inserted] = entries_.try_emplace(n, value);
    if (!inserted) {
      it->second += value;
      if (it->second == S(0)) entries_.erase(it);
    }
    return *this;
  }

  TreeVector& set(const Node& n, const S& value) {
    if (value == S(0))
      entries_.erase(n);
    else
      entries_[n] = value;
    return *this;
  }

  S operator[](const Node& n) const {
    auto it = entries_.find(n);
    return it == entries_.end() ? S(0) : it->second;
  }

  const map_type& entries() const noexcept { return entries_; }
  std::size_t nonzeros() const noexcept { return entries_.size(); }
  bool is_zero() const noexcept { return entries_.empty(); }

  std::size_t support_depth() const {
    std::size_t d = 0;
    for (const auto& [n, v] : entries_) d = std::max(d, n.length());
    return d;
  }

  TreeVector& operator+=(const TreeVector& o) {
    for (const auto& [n, v] : o.entries_) add(n, v);
    return *this;
  }
  TreeVector& operator-=(const TreeVector& o) {
    for (const auto& [n, v] : o.entries_) add(n, S(-v));
    return *this;
  }
  TreeVector& operator*=(const S& c) {
    if (c == S(0)) {
      entries_.clear();
      return *this;
    }
    for (auto& [n, v] : entries_) v *= c;
    return *this;
  }

  friend TreeVector operator+(TreeVector a, const TreeVector& b) { return a += b; }
  friend TreeVector operator-(TreeVector a, const TreeVector& b) { return a -= b; }
  friend TreeVector operator*(const S& c, TreeVector a) { return a *= c; }
  friend TreeVector operator-(TreeVector a) { return a *= S(-1); }
  friend bool operator==(const TreeVector&, const TreeVector&) = default;

 private:
  map_type entries_;
};

struct SignedSegment {
  int sign = 1;  // +1 or -1
  Segment segment;
};

/// A norm-at-most-one functional on JH: a node functional, a (truncated)
/// branch functional, or x -> sum_i sign_i * (S_i x) over an admissible
/// family {S_i}.
class Functional {
 public:
  enum class Kind { node, branch, signed_family };

  static Functional node(Node n) { return Functional(std::move(n)); }
  static Functional branch(Branch b) { return Functional(std::move(b)); }

  static Functional signed_family(std::vector<SignedSegment> family) {
    std::vector<Segment> segments;
    segments.reserve(family.size());
    for (const auto& s : family) {
      if (s.sign != 1 && s.sign != -1) throw Error(ErrorKind::invalid_input, "segment sign must be +1 or -1");
      segments.push_back(s.segment);
    }
    if (!is_admissible(segments)) throw Error(ErrorKind::invalid_input, "signed family is not admissible");
    return Functional(std::move(family));
  }

  Kind kind() const noexcept { return static_cast<Kind>(data_.index()); }

  const Node& as_node() const { return std::get<Node>(data_); }
  const Branch& as_branch() const { return std::get<Branch>(data_); }
  const std::vector<SignedSegment>& as_family() const { return std::get<std::vector<SignedSegment>>(data_); }

  /// f(e_n), in {-1, 0, 1}.
  int on_unit(const Node& n) const {
    switch (kind()) {
      case Kind::node:
        return as_node() == n ? 1 : 0;
      case Kind::branch:
        return as_branch().contains(n) ? 1 : 0;
      case Kind::signed_family:
        for (const auto& s : as_family())
          if (s.segment.contains(n)) return s.sign;  // disjoint: at most one hit
        return 0;
    }
    return 0;
  }

 private:
  explicit Functional(Node n) : data_(std::move(n)) {}
  explicit Functional(Branch b) : data_(std::move(b)) {}
  explicit Functional(std::vector<SignedSegment> f) : data_(std::move(f)) {}

  std::variant<Node, Branch, std::vector<SignedSegment>> data_;
};

template <Scalar S>
S evaluate(const Functional& f, const TreeVector<S>& x) {
  if (f.kind() == Functional::Kind::branch && f.as_branch().depth() < x.support_depth())
    throw Error(ErrorKind::truncation, "branch of depth " + std::to_string(f.as_branch().depth()) +
                                           " cannot evaluate a vector of support depth " +
                                           std::to_string(x.support_depth()));
  S total(0);
  for (const auto& [n, v] : x.entries()) {
    int c = f.on_unit(n);
    if (c == 1)
      total += v;
    else if (c == -1)
      total -= v;
  }
  return total;
}

namespace detail {

/// All ancestors (inclusive) of every support node.  Path sums leaving this
/// set are constant, so the norm search never needs to look outside it.
template <Scalar S>
std::set<Node> support_closure(const TreeVector<S>& x) {
  std::set<Node> closure;
  for (const auto& [n, v] : x.entries())
    for (std::size_t len = 0; len <= n.length(); ++len) closure.insert(n.prefix(len));
  return closure;
}

/// best[n] = max over level-n descendants psi of `node` of |sum_{node..psi} x|,
/// accumulated into `best` with `acc` the path sum through `node`.
template <Scalar S>
void best_path_sums(const TreeVector<S>& x, const std::set<Node>& closure, const Node& node, const S& acc,
                    std::vector<S>& best) {
  const std::size_t depth = best.size() - 1;
  const std::size_t len = node.length();
  const S mag = abs_value(acc);
  if (best[len] < mag) best[len] = mag;
  if (len == depth) return;
  bool exits = false;
  for (int b = 0; b < 2; ++b) {
    Node c = node.child(b);
    if (closure.count(c))
      best_path_sums(x, closure, c, S(acc + x[c]), best);
    else
      exits = true;
  }
  if (exits)
    for (std::size_t n = len + 1; n <= depth; ++n)
      if (best[n] < mag) best[n] = mag;
}

}  // namespace detail

/// Exact JH norm.
///
/// For fixed (m, n) an admissible family holds at most one m-n segment per
/// level-m node, and segments with distinct level-m starts are disjoint.  The
/// sup over families therefore splits into an independent choice per start:
///
///   value(m, n) = sum over level-m phi of max_{psi >= phi, |psi| = n} |S(phi, psi) x|
///
/// and the norm is max over 0 <= m <= n <= support_depth(x).
template <Scalar S>
S jh_norm(const TreeVector<S>& x) {
  if (x.is_zero()) return S(0);
  const std::size_t depth = x.support_depth();
  const std::set<Node> closure = detail::support_closure(x);

  std::vector<std::vector<const Node*>> by_level(depth + 1);
  for (const Node& n : closure) by_level[n.length()].push_back(&n);

  S norm(0);
  for (std::size_t m = 0; m <= depth; ++m) {
    std::vector<S> value(depth + 1, S(0));
    for (const Node* phi : by_level[m]) {
      std::vector<S> best(depth + 1, S(0));
      detail::best_path_sums(x, closure, *phi, x[*phi], best);
      for (std::size_t n = m; n <= depth; ++n) value[n] += best[n];
    }
    for (std::size_t n = m; n <= depth; ++n)
      if (norm < value[n]) norm = value[n];
  }
  return norm;
}

/// Exhaustive oracle for jh_norm: for every (m, n) with n <= support depth,
/// list every m-n segment of the full tree that meets the support (others sum
/// to zero and never change a family's value), then enumerate every family
/// of pairwise disjoint segments by explicit chain intersection.
template <Scalar S>
S jh_norm_bruteforce(const TreeVector<S>& x, std::size_t max_depth = 4) {
  const std::size_t depth = x.support_depth();
  if (depth > max_depth)
    throw Error(ErrorKind::oracle_too_large, "support depth " + std::to_string(depth) + " exceeds oracle bound " +
                                                 std::to_string(max_depth));
  if (x.is_zero()) return S(0);

  S best(0);
  for (std::size_t m = 0; m <= depth; ++m) {
    for (std::size_t n = m; n <= depth; ++n) {
      std::vector<Segment> segments;
      std::vector<S> sums;
      for (const Node& end : descendants_at_level(Node::root(), n)) {
        Segment seg(end.prefix(m), end);
        S sum(0);
        bool touches = false;
        for (const Node& member : seg.members()) {
          auto it = x.entries().find(member);
          if (it != x.entries().end()) {
            sum += it->second;
            touches = true;
          }
        }
        if (!touches) continue;
        segments.push_back(seg);
        sums.push_back(abs_value(sum));
      }

      std::vector<std::size_t> chosen;
      auto recurse = [&](auto&& self, std::size_t next, const S& acc) -> void {
        if (best < acc) best = acc;
        for (std::size_t i = next; i < segments.size(); ++i) {
          bool ok = true;
          for (std::size_t c : chosen)
            if (!segments_disjoint(segments[c], segments[i])) {
              ok = false;
              break;
            }
          if (!ok) continue;
          chosen.push_back(i);
          self(self, i + 1, S(acc + sums[i]));
          chosen.pop_back();
        }
      };
      recurse(recurse, 0, S(0));
    }
  }
  return best;
}

/// P_n: keep entries at levels >= n.
template <Scalar S>
TreeVector<S> project_tail(std::size_t n, const TreeVector<S>& x) {
  TreeVector<S> out;
  for (const auto& [node, v] : x.entries())
    if (node.length() >= n) out.set(node, v);
  return out;
}

/// Max |f(x)| over candidates; each candidate has dual norm <= 1, so this is
/// a lower bound on jh_norm(x).
template <Scalar S>
S dual_certificate_lower_bound(const TreeVector<S>& x, std::span<const Functional> candidates) {
  S best(0);
  for (const Functional& f : candidates) {
    S v = abs_value(evaluate(f, x));
    if (best < v) best = v;
  }
  return best;
}

}  // namespace jhlab
