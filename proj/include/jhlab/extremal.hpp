#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "matrix.hpp"
#include "scalar.hpp"
#include "sigma.hpp"

namespace jhlab {

enum class Exactness { exact, heuristic_lower_bound };

constexpr std::string_view to_string(Exactness e) {
  return e == Exactness::exact ? "exact" : "heuristic-lower-bound";
}

/// How a sweep evaluates sigma: always exact, always heuristic, or exact up to
/// kSigmaExactBound and heuristic above it.
enum class SweepMode { exact, heuristic, automatic };

struct HeuristicOptions {
  std::size_t restarts = 64;
  std::uint64_t seed = 1;
};

/// N(i,j) = 1/(i-j) off the diagonal, 0 on it.
template <Scalar S>
Matrix<S> candidate_hilbert(std::size_t n) {
  Matrix<S> m(n);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j)
      if (i != j) m(i, j) = scalar_traits<S>::from_ratio(1, static_cast<long long>(i) - static_cast<long long>(j));
  return m;
}

/// N(i,j) = 1/(n+1-i-j) off the anti-diagonal, 0 on it.  The Hilbert kernel
/// reflected so that its singular line is the edge of the i + j <= n + 1
/// triangle.
template <Scalar S>
Matrix<S> candidate_hankel(std::size_t n) {
  Matrix<S> m(n);
  const long long top = static_cast<long long>(n) + 1;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j) {
      long long d = top - static_cast<long long>(i) - static_cast<long long>(j);
      if (d != 0) m(i, j) = scalar_traits<S>::from_ratio(1, d);
    }
  return m;
}

template <Scalar S>
using CandidateFamily = std::function<Matrix<S>(std::size_t)>;

/// Built-in families by name.  Unknown names are an input error.
template <Scalar S>
CandidateFamily<S> candidate_family(std::string_view name) {
  if (name == "hilbert") return candidate_hilbert<S>;
  if (name == "hankel") return candidate_hankel<S>;
  throw Error(ErrorKind::invalid_input, "unknown candidate family '" + std::string(name) + "'");
}

template <Scalar S>
struct NormalizedMatrix {
  Matrix<S> matrix;
  S sigma_before;  // the divisor
  Exactness exactness;
};

template <Scalar S>
S sigma_by_mode(const Matrix<S>& m, Exactness how, const HeuristicOptions& h) {
  return how == Exactness::exact ? sigma_exact(m) : sigma_heuristic(m, h.restarts, h.seed);
}

inline Exactness resolve_mode(SweepMode mode, std::size_t n) {
  switch (mode) {
    case SweepMode::exact:
      if (n > kSigmaExactBound)
        throw Error(ErrorKind::use_heuristic, "n = " + std::to_string(n) + " is beyond exact enumeration");
      return Exactness::exact;
    case SweepMode::heuristic:
      return Exactness::heuristic_lower_bound;
    case SweepMode::automatic:
      return n <= kSigmaExactBound ? Exactness::exact : Exactness::heuristic_lower_bound;
  }
  return Exactness::exact;
}

/// N / sigma(N).  With a heuristic divisor (a lower bound) the result is only
/// approximately normalized, and flagged so.
template <Scalar S>
NormalizedMatrix<S> normalize_sigma(const Matrix<S>& n_mat, SweepMode mode = SweepMode::automatic,
                                    const HeuristicOptions& h = {}) {
  if (n_mat.is_zero()) throw Error(ErrorKind::invalid_input, "cannot normalize the zero matrix");
  const Exactness how = resolve_mode(mode, n_mat.size());
  S s = sigma_by_mode(n_mat, how, h);
  Matrix<S> out = n_mat;
  out *= S(S(1) / s);
  return {std::move(out), std::move(s), how};
}

template <Scalar S>
struct GrowthRecord {
  std::size_t n = 0;
  S sigma_M{};
  S sigma_EM{};
  Exactness exactness = Exactness::exact;
  std::optional<double> measured_ratio;  // sigma_EM / ln n; absent for n = 1
};

/// M_n = conjugate(N_n / sigma(N_n), lemma-1 permutation), the matrix whose
/// E-transform exhibits triangle-truncation growth.
template <Scalar S>
Matrix<S> lemma2_matrix(const Matrix<S>& normalized) {
  return conjugate_by_permutation(normalized, lemma1_permutation(normalized.size()));
}

template <Scalar S>
std::vector<GrowthRecord<S>> growth_sweep(const CandidateFamily<S>& family, std::span<const std::size_t> sizes,
                                          SweepMode mode, const HeuristicOptions& h = {}) {
  if (sizes.empty()) throw Error(ErrorKind::invalid_input, "growth sweep needs at least one size");
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] == 0) throw Error(ErrorKind::invalid_input, "sizes must be positive");
    if (k > 0 && sizes[k] <= sizes[k - 1]) throw Error(ErrorKind::invalid_input, "sizes must be strictly ascending");
  }
  std::vector<GrowthRecord<S>> records;
  for (std::size_t n : sizes) {
    const Exactness how = resolve_mode(mode, n);
    Matrix<S> candidate = family(n);
    if (candidate.is_zero()) {
      // Nothing to normalize (the Hilbert kernel at n = 1): a zero row.
      GrowthRecord<S> rec;
      rec.n = n;
      rec.exactness = how;
      rec.sigma_M = S(0);
      rec.sigma_EM = S(0);
      records.push_back(std::move(rec));
      continue;
    }
    auto normalized = normalize_sigma(candidate, how == Exactness::exact ? SweepMode::exact : SweepMode::heuristic, h);
    Matrix<S> m = lemma2_matrix(normalized.matrix);
    GrowthRecord<S> rec;
    rec.n = n;
    rec.exactness = how;
    rec.sigma_M = sigma_by_mode(m, how, h);
    rec.sigma_EM = sigma_by_mode(transform_E(m), how, h);
    if (n >= 2) rec.measured_ratio = to_double(rec.sigma_EM) / std::log(static_cast<double>(n));
    records.push_back(std::move(rec));
  }
  return records;
}

template <Scalar S>
std::vector<GrowthRecord<S>> growth_sweep(std::string_view family, std::span<const std::size_t> sizes, SweepMode mode,
                                          const HeuristicOptions& h = {}) {
  return growth_sweep<S>(candidate_family<S>(family), sizes, mode, h);
}

/// Least-squares slope of sigma_EM against ln n.  Records of different
/// exactness compare bounds of different kinds and are rejected.
template <Scalar S>
double fit_log_slope(std::span<const GrowthRecord<S>> records) {
  if (records.size() < 2) throw Error(ErrorKind::invalid_input, "slope fit needs at least two records");
  for (const auto& r : records)
    if (r.exactness != records.front().exactness)
      throw Error(ErrorKind::invalid_input, "cannot fit a slope across exact and heuristic records");
  double sx = 0, sy = 0;
  for (const auto& r : records) {
    sx += std::log(static_cast<double>(r.n));
    sy += to_double(r.sigma_EM);
  }
  const double k = static_cast<double>(records.size());
  const double mx = sx / k, my = sy / k;
  double sxy = 0, sxx = 0;
  for (const auto& r : records) {
    const double dx = std::log(static_cast<double>(r.n)) - mx;
    sxy += dx * (to_double(r.sigma_EM) - my);
    sxx += dx * dx;
  }
  if (sxx == 0) throw Error(ErrorKind::invalid_input, "slope fit needs at least two distinct sizes");
  return sxy / sxx;
}

}  // namespace jhlab
