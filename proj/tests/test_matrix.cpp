#include <jhlab/matrix.hpp>
#include <jhlab/sigma.hpp>

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace jhlab;
using jhlab::testing::random_matrix;
using Q = Rational;
using M = Matrix<Q>;

namespace {

M sym(std::size_t n, std::mt19937_64& rng) { return random_matrix(n, rng); }

}  // namespace

TEST(Matrix, RejectsEmptyAndRagged) {
  EXPECT_THROW(M(0), Error);
  EXPECT_THROW((M{{Q(1), Q(2)}, {Q(3)}}), Error);
}

TEST(TransformE, Examples) {
  M m{{Q(1), Q(2)}, {Q(3), Q(4)}};
  EXPECT_EQ(transform_E(m), (M{{Q(1), Q(2)}, {Q(3), Q(-4)}}));
  EXPECT_EQ(sigma_exact(transform_E(M::identity(2))), Q(2));
}

TEST(TransformE, SignsFollowMinIndexParity) {
  M ones(6);
  for (std::size_t i = 1; i <= 6; ++i)
    for (std::size_t j = 1; j <= 6; ++j) ones(i, j) = 1;
  const M e = transform_E(ones);
  for (std::size_t i = 1; i <= 6; ++i)
    for (std::size_t j = 1; j <= 6; ++j) {
      const std::size_t k = std::min(i, j);
      EXPECT_EQ(e(i, j), (k == 1 || k == 3 || k == 5) ? Q(1) : Q(-1));
    }
}

TEST(TransformE, IsAnInvolution) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    M m = sym(5, rng);
    EXPECT_EQ(transform_E(transform_E(m)), m);
  }
}

TEST(KpSignPattern, Examples) {
  EXPECT_EQ(kp_sign_pattern<Q>(2), (M{{Q(1), Q(1)}, {Q(1), Q(-1)}}));
  EXPECT_EQ(kp_sign_pattern<Q>(3), (M{{Q(1), Q(1), Q(1)}, {Q(1), Q(1), Q(-1)}, {Q(1), Q(-1), Q(-1)}}));
  for (std::size_t n = 1; n <= 12; ++n) {
    const M eps = kp_sign_pattern<Q>(n);
    for (std::size_t j = 1; j <= n; ++j) EXPECT_EQ(eps(1, j), Q(1));
    for (const Q& v : eps.row_major()) EXPECT_TRUE(v == 1 || v == -1);
  }
  // n = 2 coincides with the E pattern.
  M ones{{Q(1), Q(1)}, {Q(1), Q(1)}};
  EXPECT_EQ(kp_sign_pattern<Q>(2), transform_E(ones));
}

TEST(MainTriangle, Examples) {
  M m{{Q(1), Q(2)}, {Q(3), Q(4)}};
  EXPECT_EQ(main_triangle_projection(m), (M{{Q(1), Q(2)}, {Q(3), Q(0)}}));
}

TEST(MainTriangle, IdempotentAndHalfSumIdentity) {
  std::mt19937_64 rng(2);
  for (std::size_t n = 1; n <= 6; ++n)
    for (int t = 0; t < 10; ++t) {
      M m = sym(n, rng);
      const M p = main_triangle_projection(m);
      EXPECT_EQ(main_triangle_projection(p), p);
      M half(n);
      const M em = hadamard(kp_sign_pattern<Q>(n), m);
      for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 1; j <= n; ++j) half(i, j) = (m(i, j) + em(i, j)) / 2;
      EXPECT_EQ(half, p);
    }
}

TEST(Permutation, Examples) {
  EXPECT_EQ(lemma1_permutation(5).values(), (std::vector<std::size_t>{1, 3, 5, 4, 2}));
  EXPECT_EQ(lemma1_permutation(4).values(), (std::vector<std::size_t>{1, 3, 4, 2}));
  EXPECT_EQ(lemma1_permutation(1).values(), (std::vector<std::size_t>{1}));
  EXPECT_THROW(SignPermutation({1, 1, 2}), Error);
  EXPECT_THROW(SignPermutation({0, 1}), Error);
  const SignPermutation p = lemma1_permutation(7);
  for (std::size_t i = 1; i <= 7; ++i) EXPECT_EQ(p.inverse()(p(i)), i);
}

// Direct check of the defining equivalence, not through the library helper.
TEST(Permutation, IdentityHoldsUpTo128) {
  for (std::size_t n = 1; n <= 128; ++n) {
    ASSERT_TRUE(lemma1_identity_check(n)) << n;
    const SignPermutation p = lemma1_permutation(n);
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t k = std::min(p(i), p(j));
        ASSERT_EQ(k % 2 == 1, i + j <= n + 1) << n << " " << i << " " << j;
      }
  }
}

TEST(Conjugate, IdentityPermutationIsANoOp) {
  std::mt19937_64 rng(3);
  M m = sym(4, rng);
  EXPECT_EQ(conjugate_by_permutation(m, SignPermutation::identity(4)), m);
  EXPECT_THROW(conjugate_by_permutation(m, SignPermutation::identity(3)), Error);
}

TEST(Conjugate, EntryFormula) {
  std::mt19937_64 rng(4);
  M n = sym(5, rng);
  const SignPermutation p = lemma1_permutation(5);
  const M c = conjugate_by_permutation(n, p);
  for (std::size_t i = 1; i <= 5; ++i)
    for (std::size_t j = 1; j <= 5; ++j) EXPECT_EQ(c(p(i), p(j)), n(i, j));
}

TEST(Conjugate, SigmaInvariantAndEpsChain) {
  std::mt19937_64 rng(5);
  for (std::size_t n = 1; n <= 8; ++n)
    for (int t = 0; t < 8; ++t) {
      M nm = sym(n, rng);
      const SignPermutation p = lemma1_permutation(n);
      const M c = conjugate_by_permutation(nm, p);
      EXPECT_EQ(sigma_exact(c), sigma_exact(nm));
      EXPECT_EQ(sigma_exact(transform_E(c)), sigma_exact(hadamard(kp_sign_pattern<Q>(n), nm)));
    }
}

TEST(MatrixCast, RationalToDouble) {
  M m{{Q(1) / 3, Q(-2)}, {Q(0), Q(5) / 4}};
  const Matrix<double> d = matrix_cast<double>(m);
  EXPECT_DOUBLE_EQ(d(1, 1), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(d(2, 2), 1.25);
}
