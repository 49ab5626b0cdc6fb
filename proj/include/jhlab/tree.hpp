#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace jhlab {

/// A node of the dyadic tree: a finite 0/1 path, stored as a string of
/// '0'/'1' characters.  The empty string is the root.
///
/// Node deliberately has no `<=`: the tree order is partial and lives in
/// node_leq().  `operator<` is the lexicographic order, used only for
/// canonical enumeration and as a map key.
class Node {
 public:
  Node() = default;

  explicit Node(std::string_view bits) : bits_(bits) {
    for (char c : bits_)
      if (c != '0' && c != '1')
        throw Error(ErrorKind::invalid_input, "node '" + bits_ + "' contains a character other than 0/1");
  }

  static Node root() { return Node(); }

  std::size_t length() const noexcept { return bits_.size(); }
  bool is_root() const noexcept { return bits_.empty(); }
  const std::string& str() const noexcept { return bits_; }

  /// Bit at 0-based position `pos` (0 or 1).
  int bit(std::size_t pos) const { return bits_.at(pos) == '1' ? 1 : 0; }

  Node child(int b) const {
    Node c = *this;
    c.bits_.push_back(b ? '1' : '0');
    return c;
  }

  /// Ancestor of length `len`; `len` must not exceed length().
  Node prefix(std::size_t len) const {
    if (len > bits_.size())
      throw Error(ErrorKind::invalid_level, "prefix length " + std::to_string(len) + " exceeds node length " +
                                                std::to_string(bits_.size()));
    Node p;
    p.bits_ = bits_.substr(0, len);
    return p;
  }

  Node extended(std::string_view more) const { return Node(bits_ + std::string(more)); }

  /// Extends with zeros up to length `len` (no-op if already that long).
  Node zero_extended(std::size_t len) const {
    Node e = *this;
    if (e.bits_.size() < len) e.bits_.append(len - e.bits_.size(), '0');
    return e;
  }

  friend bool operator==(const Node&, const Node&) = default;
  friend bool operator<(const Node& a, const Node& b) { return a.bits_ < b.bits_; }

 private:
  std::string bits_;
};

/// Tree order: a <= b iff a is a prefix of b.
inline bool node_leq(const Node& a, const Node& b) {
  return a.length() <= b.length() && b.str().compare(0, a.length(), a.str()) == 0;
}

inline bool incomparable(const Node& a, const Node& b) { return !node_leq(a, b) && !node_leq(b, a); }

/// All 2^(level - |root|) descendants of `root` at `level`, lexicographic.
inline std::vector<Node> descendants_at_level(const Node& root, std::size_t level) {
  if (level < root.length())
    throw Error(ErrorKind::invalid_level, "level " + std::to_string(level) + " is above node '" + root.str() + "'");
  const std::size_t width = level - root.length();
  if (width >= 8 * sizeof(std::size_t) - 1) throw Error(ErrorKind::invalid_level, "level too deep to enumerate");
  std::vector<Node> out;
  out.reserve(std::size_t{1} << width);
  for (std::size_t code = 0; code < (std::size_t{1} << width); ++code) {
    std::string tail(width, '0');
    for (std::size_t b = 0; b < width; ++b)
      if (code >> (width - 1 - b) & 1) tail[b] = '1';
    out.push_back(root.extended(tail));
  }
  return out;
}

/// S(start, end) = { xi : start <= xi <= end }.
class Segment {
 public:
  Segment(Node start, Node end) : start_(std::move(start)), end_(std::move(end)) {
    if (!node_leq(start_, end_))
      throw Error(ErrorKind::invalid_input, "segment end '" + end_.str() + "' is not a descendant of '" + start_.str() + "'");
  }

  static Segment singleton(const Node& n) { return Segment(n, n); }

  /// Parses "start..end".
  static Segment parse(std::string_view text) {
    auto dots = text.find("..");
    if (dots == std::string_view::npos) throw Error(ErrorKind::invalid_input, "segment '" + std::string(text) + "' lacks '..'");
    return Segment(Node(text.substr(0, dots)), Node(text.substr(dots + 2)));
  }

  const Node& start() const noexcept { return start_; }
  const Node& end() const noexcept { return end_; }
  std::size_t start_level() const noexcept { return start_.length(); }
  std::size_t end_level() const noexcept { return end_.length(); }

  bool contains(const Node& n) const { return node_leq(start_, n) && node_leq(n, end_); }

  /// The chain start, ..., end (|end| - |start| + 1 nodes, shallowest first).
  std::vector<Node> members() const {
    std::vector<Node> out;
    for (std::size_t len = start_.length(); len <= end_.length(); ++len) out.push_back(end_.prefix(len));
    return out;
  }

  std::string to_string() const { return start_.str() + ".." + end_.str(); }

  friend bool operator==(const Segment&, const Segment&) = default;

 private:
  Node start_;
  Node end_;
};

/// A branch truncated at a finite depth D: one node per level 0..D.
class Branch {
 public:
  explicit Branch(std::string_view bits) : path_(bits) {}
  explicit Branch(Node path) : path_(std::move(path)) {}

  /// The branch through `n` that continues with zeros down to `depth`.
  static Branch zeros_after(const Node& n, std::size_t depth) {
    if (depth < n.length())
      throw Error(ErrorKind::invalid_level, "branch depth " + std::to_string(depth) + " is above node '" + n.str() + "'");
    return Branch(n.zero_extended(depth));
  }

  std::size_t depth() const noexcept { return path_.length(); }
  const Node& leaf() const noexcept { return path_; }

  Node node_at(std::size_t level) const { return path_.prefix(level); }

  /// Nodes deeper than the truncation cannot be decided; callers must check
  /// depth() first.
  bool contains(const Node& n) const {
    if (n.length() > depth())
      throw Error(ErrorKind::truncation, "node '" + n.str() + "' lies below branch truncation depth " + std::to_string(depth()));
    return node_leq(n, path_);
  }

  friend bool operator==(const Branch&, const Branch&) = default;

 private:
  Node path_;
};

/// Pairwise disjoint and all of one m-n type.  The empty family qualifies.
inline bool is_admissible(std::span<const Segment> family) {
  if (family.empty()) return true;
  const std::size_t m = family.front().start_level();
  const std::size_t n = family.front().end_level();
  for (const Segment& s : family)
    if (s.start_level() != m || s.end_level() != n) return false;
  // Two m-n chains intersect iff they share some node; with equal start
  // levels that happens iff they share the start node.
  for (std::size_t a = 0; a < family.size(); ++a)
    for (std::size_t b = a + 1; b < family.size(); ++b)
      if (family[a].start() == family[b].start()) return false;
  return true;
}

/// Explicit chain-intersection test, independent of the level argument in
/// is_admissible().
inline bool segments_disjoint(const Segment& a, const Segment& b) {
  for (const Node& n : a.members())
    if (b.contains(n)) return false;
  return true;
}

}  // namespace jhlab

template <>
struct std::hash<jhlab::Node> {
  std::size_t operator()(const jhlab::Node& n) const noexcept { return std::hash<std::string>{}(n.str()); }
};
