#include <jhlab/sigma.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"

using namespace jhlab;
using jhlab::testing::grid_sigma;
using jhlab::testing::naive_sigma;
using jhlab::testing::random_matrix;
using Q = Rational;
using M = Matrix<Q>;

TEST(SigmaExact, Examples) {
  EXPECT_EQ(sigma_exact(M::identity(2)), Q(2));
  EXPECT_EQ(sigma_exact(M{{Q(1), Q(1)}, {Q(1), Q(-1)}}), Q(2));
  for (std::size_t n = 1; n <= 9; ++n) {
    M ones(n);
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 1; j <= n; ++j) ones(i, j) = 1;
    EXPECT_EQ(sigma_exact(ones), Q(n * n));
  }
  EXPECT_EQ(sigma_exact(M(3)), Q(0));
}

TEST(SigmaExact, MatchesNaiveDoubleEnumeration) {
  std::mt19937_64 rng(10);
  for (std::size_t n = 1; n <= 4; ++n)
    for (int t = 0; t < 100; ++t) {
      M m = random_matrix(n, rng);
      ASSERT_EQ(sigma_exact(m), naive_sigma(m));
    }
}

TEST(SigmaExact, DoubleAgreesWithRational) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 30; ++t) {
    M m = random_matrix(7, rng);
    EXPECT_NEAR(sigma_exact(matrix_cast<double>(m)), to_double(sigma_exact(m)), 1e-9);
  }
}

TEST(SigmaExact, HugeEntriesFallBackToRationalArithmetic) {
  M m{{Q(Integer(1) << 200), Q(1)}, {Q(1) / 7, Q(-(Integer(1) << 190))}};
  EXPECT_EQ(sigma_exact(m), naive_sigma(m));
}

// Vertices of the cube are enough: the grid optimum never beats the
// sign-vector value, and the grid includes the vertices.
TEST(SigmaExact, VerticesAttainTheCubeSupremum) {
  std::mt19937_64 rng(12);
  for (std::size_t n = 1; n <= 2; ++n)
    for (int t = 0; t < 10; ++t) {
      M m = random_matrix(n, rng);
      EXPECT_EQ(grid_sigma(m, 3), sigma_exact(m));
    }
}

TEST(SigmaExact, Invariances) {
  std::mt19937_64 rng(13);
  for (std::size_t n = 1; n <= 6; ++n)
    for (int t = 0; t < 5; ++t) {
      M m = random_matrix(n, rng);
      const Q s = sigma_exact(m);
      std::vector<std::size_t> rows(n), cols(n);
      std::iota(rows.begin(), rows.end(), 1);
      std::iota(cols.begin(), cols.end(), 1);
      std::shuffle(rows.begin(), rows.end(), rng);
      std::shuffle(cols.begin(), cols.end(), rng);
      M rp(n), cp(n), neg_row = m, neg_col = m;
      const std::size_t flip = 1 + rng() % n;
      for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 1; j <= n; ++j) {
          rp(i, j) = m(rows[i - 1], j);
          cp(i, j) = m(i, cols[j - 1]);
        }
      for (std::size_t k = 1; k <= n; ++k) {
        neg_row(flip, k) = -neg_row(flip, k);
        neg_col(k, flip) = -neg_col(k, flip);
      }
      EXPECT_EQ(sigma_exact(rp), s);
      EXPECT_EQ(sigma_exact(cp), s);
      EXPECT_EQ(sigma_exact(transpose(m)), s);
      EXPECT_EQ(sigma_exact(neg_row), s);
      EXPECT_EQ(sigma_exact(neg_col), s);
    }
}

TEST(SigmaExact, AboveBoundAsksForHeuristic) {
  try {
    sigma_exact(M(5), 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::use_heuristic);
  }
  EXPECT_THROW(sigma_exact(Matrix<double>(27)), Error);
}

TEST(SigmaHeuristic, Examples) {
  EXPECT_EQ(sigma_heuristic(M::identity(2), 4, 1), Q(2));
  EXPECT_EQ(sigma_heuristic(M{{Q(1), Q(1)}, {Q(1), Q(-1)}}, 4, 1), Q(2));
  EXPECT_THROW(sigma_heuristic(M::identity(2), 0, 1), Error);
}

TEST(SigmaHeuristic, IsACertifiedLowerBound) {
  std::mt19937_64 rng(14);
  for (std::size_t n = 1; n <= 10; ++n)
    for (int t = 0; t < 10; ++t) {
      M m = random_matrix(n, rng);
      EXPECT_LE(sigma_heuristic(m, 3, t), sigma_exact(m));
    }
}

TEST(SigmaHeuristic, UsuallyFindsTheOptimum) {
  std::mt19937_64 rng(15);
  std::uniform_int_distribution<std::size_t> dim(2, 12);
  int hits = 0;
  for (int t = 0; t < 100; ++t) {
    M m = random_matrix(dim(rng), rng);
    if (sigma_heuristic(m, 64, 1) == sigma_exact(m)) ++hits;
  }
  EXPECT_GE(hits, 95);
}

TEST(SigmaHeuristic, DeterministicForAFixedSeed) {
  std::mt19937_64 rng(16);
  const Matrix<double> m = matrix_cast<double>(random_matrix(30, rng));
  EXPECT_EQ(sigma_heuristic(m, 16, 42), sigma_heuristic(m, 16, 42));
}

TEST(SigmaAtSigns, BoundedBySigma) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 30; ++t) {
    M m = random_matrix(5, rng);
    std::vector<int> a(5);
    for (int& s : a) s = (rng() & 1) ? 1 : -1;
    EXPECT_LE(sigma_at_signs(m, std::span<const int>(a)), sigma_exact(m));
  }
  std::vector<int> ones{1, 1};
  EXPECT_EQ(sigma_at_signs(M::identity(2), std::span<const int>(ones)), Q(2));
  EXPECT_THROW(sigma_at_signs(M::identity(3), std::span<const int>(ones)), Error);
}
