#include <jhlab/extremal.hpp>

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace jhlab;
using jhlab::testing::naive_sigma;
using jhlab::testing::random_matrix;
using Q = Rational;
using M = Matrix<Q>;

TEST(CandidateHilbert, Examples) {
  EXPECT_EQ(candidate_hilbert<Q>(2), (M{{Q(0), Q(-1)}, {Q(1), Q(0)}}));
  EXPECT_EQ(candidate_hilbert<Q>(3)(1, 3), Q(-1) / 2);
  const M h = candidate_hilbert<Q>(5);
  for (std::size_t i = 1; i <= 5; ++i)
    for (std::size_t j = 1; j <= 5; ++j) {
      EXPECT_EQ(h(i, j), -h(j, i));
      if (i != j) EXPECT_EQ(h(i, j), Q(1) / Q(static_cast<long long>(i) - static_cast<long long>(j)));
    }
}

TEST(CandidateFamily, LookupByName) {
  EXPECT_EQ(candidate_family<Q>("hilbert")(4), candidate_hilbert<Q>(4));
  EXPECT_EQ(candidate_family<Q>("hankel")(4), candidate_hankel<Q>(4));
  try {
    candidate_family<Q>("nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_input);
  }
}

TEST(NormalizeSigma, Examples) {
  // sigma([[0,-1],[1,0]]) = 2 by enumeration.
  const auto norm = normalize_sigma(candidate_hilbert<Q>(2));
  EXPECT_EQ(norm.sigma_before, Q(2));
  EXPECT_EQ(norm.exactness, Exactness::exact);
  EXPECT_EQ(norm.matrix, (M{{Q(0), Q(-1) / 2}, {Q(1) / 2, Q(0)}}));
  EXPECT_EQ(naive_sigma(norm.matrix), Q(1));
  EXPECT_EQ(normalize_sigma(M::identity(2)).matrix, (M{{Q(1) / 2, Q(0)}, {Q(0), Q(1) / 2}}));
  EXPECT_THROW(normalize_sigma(M(3)), Error);
}

TEST(NormalizeSigma, RandomMatricesHaveUnitSigma) {
  std::mt19937_64 rng(20);
  for (int t = 0; t < 20; ++t) {
    M m = random_matrix(4, rng);
    if (m.is_zero()) continue;
    EXPECT_EQ(naive_sigma(normalize_sigma(m).matrix), Q(1));
  }
}

TEST(NormalizeSigma, ExactModeRefusesLargeSizes) {
  try {
    normalize_sigma(candidate_hilbert<double>(30), SweepMode::exact);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::use_heuristic);
  }
  const auto h = normalize_sigma(candidate_hilbert<double>(30), SweepMode::automatic, {8, 3});
  EXPECT_EQ(h.exactness, Exactness::heuristic_lower_bound);
}

TEST(GrowthSweep, SizeTwo) {
  const std::vector<std::size_t> sizes{2};
  const auto recs = growth_sweep<Q>("hilbert", sizes, SweepMode::exact);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].exactness, Exactness::exact);
  EXPECT_EQ(recs[0].sigma_M, Q(1));
  // Independent recomputation of the pipeline with the naive oracle.
  M n = candidate_hilbert<Q>(2);
  n *= Q(1) / naive_sigma(n);
  const M m = conjugate_by_permutation(n, lemma1_permutation(2));
  EXPECT_EQ(recs[0].sigma_EM, naive_sigma(transform_E(m)));
  ASSERT_TRUE(recs[0].measured_ratio.has_value());
  EXPECT_GT(*recs[0].measured_ratio, 0.0);
}

TEST(GrowthSweep, SizeOneHasNoRatio) {
  const std::vector<std::size_t> sizes{1};
  const auto recs = growth_sweep<Q>("hilbert", sizes, SweepMode::exact);
  EXPECT_FALSE(recs[0].measured_ratio.has_value());
  EXPECT_EQ(recs[0].sigma_EM, Q(0));
}

TEST(GrowthSweep, HilbertGrowsOverSmallSizes) {
  const std::vector<std::size_t> sizes{4, 8, 16};
  const auto recs = growth_sweep<Q>("hilbert", sizes, SweepMode::exact);
  ASSERT_EQ(recs.size(), 3u);
  for (const auto& r : recs) {
    EXPECT_EQ(r.sigma_M, Q(1));
    EXPECT_GT(*r.measured_ratio, 0.0);
  }
  EXPECT_LT(recs[0].sigma_EM, recs[1].sigma_EM);
  EXPECT_LT(recs[1].sigma_EM, recs[2].sigma_EM);
  EXPECT_GT(fit_log_slope(std::span<const GrowthRecord<Q>>(recs)), 0.0);
}

TEST(GrowthSweep, RecordsDominateHeuristicAndSignVectors) {
  const std::vector<std::size_t> sizes{3, 5, 7};
  const auto recs = growth_sweep<Q>("hankel", sizes, SweepMode::exact);
  std::mt19937_64 rng(21);
  for (const auto& r : recs) {
    const M m = lemma2_matrix(normalize_sigma(candidate_hankel<Q>(r.n)).matrix);
    const M em = transform_E(m);
    EXPECT_GE(r.sigma_EM, sigma_heuristic(em, 4, 9));
    std::vector<int> a(r.n);
    for (int& s : a) s = (rng() & 1) ? 1 : -1;
    EXPECT_GE(r.sigma_EM, sigma_at_signs(em, std::span<const int>(a)));
    EXPECT_EQ(sigma_exact(m), sigma_exact(normalize_sigma(candidate_hankel<Q>(r.n)).matrix));
  }
}

TEST(GrowthSweep, FloatingModeNormalizesNearOne) {
  const std::vector<std::size_t> sizes{6, 9};
  for (const auto& r : growth_sweep<double>("hilbert", sizes, SweepMode::exact)) EXPECT_NEAR(r.sigma_M, 1.0, 1e-12);
}

TEST(GrowthSweep, RejectsBadSizes) {
  EXPECT_THROW(growth_sweep<Q>("hilbert", std::vector<std::size_t>{}, SweepMode::exact), Error);
  EXPECT_THROW(growth_sweep<Q>("hilbert", std::vector<std::size_t>{4, 4}, SweepMode::exact), Error);
  EXPECT_THROW(growth_sweep<Q>("hilbert", std::vector<std::size_t>{0}, SweepMode::exact), Error);
}

TEST(FitLogSlope, RejectsMixedExactness) {
  std::vector<GrowthRecord<double>> recs(2);
  recs[0].n = 4;
  recs[1].n = 8;
  recs[1].exactness = Exactness::heuristic_lower_bound;
  EXPECT_THROW(fit_log_slope(std::span<const GrowthRecord<double>>(recs)), Error);
  recs[1].exactness = Exactness::exact;
  recs[0].sigma_EM = 1.0;
  recs[1].sigma_EM = 1.0 + std::log(2.0);
  EXPECT_NEAR(fit_log_slope(std::span<const GrowthRecord<double>>(recs)), 1.0, 1e-12);
}
