#include <jhlab/tree.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace jhlab;
using jhlab::testing::all_nodes;

TEST(Node, LengthAndRoot) {
  EXPECT_EQ(Node("").length(), 0u);
  EXPECT_TRUE(Node().is_root());
  EXPECT_EQ(Node("0110").length(), 4u);
  EXPECT_THROW(Node("012"), Error);
}

TEST(Node, Leq) {
  EXPECT_TRUE(node_leq(Node(""), Node("01")));
  EXPECT_TRUE(node_leq(Node("01"), Node("010")));
  EXPECT_FALSE(node_leq(Node("0"), Node("1")));
  EXPECT_FALSE(node_leq(Node("010"), Node("01")));
}

TEST(Node, Incomparable) {
  EXPECT_TRUE(incomparable(Node("0"), Node("1")));
  EXPECT_FALSE(incomparable(Node("0"), Node("01")));
  EXPECT_FALSE(incomparable(Node(""), Node("")));
}

TEST(Node, LeqIsAPartialOrder) {
  const auto nodes = all_nodes(5);
  for (const Node& a : nodes) {
    EXPECT_TRUE(node_leq(a, a));
    for (const Node& b : nodes) {
      if (node_leq(a, b) && node_leq(b, a)) EXPECT_EQ(a, b);
      if (!node_leq(a, b)) continue;
      for (const Node& c : nodes)
        if (node_leq(b, c)) EXPECT_TRUE(node_leq(a, c)) << a.str() << " " << b.str() << " " << c.str();
    }
  }
}

TEST(Node, DescendantsAtLevel) {
  EXPECT_EQ(descendants_at_level(Node("1"), 2), (std::vector<Node>{Node("10"), Node("11")}));
  EXPECT_EQ(descendants_at_level(Node(""), 0), (std::vector<Node>{Node("")}));
  EXPECT_EQ(descendants_at_level(Node("01"), 4),
            (std::vector<Node>{Node("0100"), Node("0101"), Node("0110"), Node("0111")}));
  try {
    descendants_at_level(Node("011"), 2);
    FAIL() << "expected invalid-level";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_level);
  }
}

TEST(Segment, MembersAndText) {
  Segment s(Node("0"), Node("011"));
  EXPECT_EQ(s.members(), (std::vector<Node>{Node("0"), Node("01"), Node("011")}));
  EXPECT_TRUE(s.contains(Node("01")));
  EXPECT_FALSE(s.contains(Node("010")));
  EXPECT_FALSE(s.contains(Node("")));
  EXPECT_EQ(s.to_string(), "0..011");
  EXPECT_EQ(Segment::parse("..10"), Segment(Node(""), Node("10")));
  EXPECT_THROW(Segment(Node("0"), Node("1")), Error);
  EXPECT_THROW(Segment::parse("01"), Error);
}

TEST(Segment, Admissible) {
  using V = std::vector<Segment>;
  EXPECT_TRUE(is_admissible(V{}));
  EXPECT_TRUE(is_admissible(V{Segment::singleton(Node("0")), Segment::singleton(Node("1"))}));
  EXPECT_FALSE(is_admissible(V{Segment(Node(""), Node("0")), Segment(Node(""), Node("1"))}));
  EXPECT_TRUE(is_admissible(V{Segment(Node("0"), Node("00")), Segment(Node("1"), Node("11"))}));
  // mixed lengths
  EXPECT_FALSE(is_admissible(V{Segment(Node("0"), Node("00")), Segment(Node("1"), Node("1"))}));
}

// Two m-n segments intersect exactly when their start nodes coincide; checked
// against explicit chain intersection over every pair up to depth 5.
TEST(Segment, SameLevelDisjointnessIsDecidedByStarts) {
  const std::size_t depth = 5;
  for (std::size_t m = 0; m <= depth; ++m)
    for (std::size_t n = m; n <= depth; ++n) {
      std::vector<Segment> segs;
      for (const Node& end : descendants_at_level(Node::root(), n)) segs.emplace_back(end.prefix(m), end);
      for (std::size_t a = 0; a < segs.size(); ++a)
        for (std::size_t b = a + 1; b < segs.size(); ++b) {
          const bool disjoint = segments_disjoint(segs[a], segs[b]);
          EXPECT_EQ(disjoint, segs[a].start() != segs[b].start());
          const std::vector<Segment> pair{segs[a], segs[b]};
          EXPECT_EQ(is_admissible(pair), disjoint);
        }
    }
}

TEST(Branch, OneNodePerLevel) {
  Branch b = Branch::zeros_after(Node("101"), 6);
  EXPECT_EQ(b.depth(), 6u);
  EXPECT_EQ(b.leaf(), Node("101000"));
  std::size_t hits = 0;
  for (const Node& n : all_nodes(6)) hits += b.contains(n) ? 1 : 0;
  EXPECT_EQ(hits, 7u);
  for (std::size_t level = 0; level <= 6; ++level) EXPECT_EQ(b.node_at(level).length(), level);
  EXPECT_THROW(b.contains(Node("1010000")), Error);
}
