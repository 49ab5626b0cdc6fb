#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "error.hpp"
#include "matrix.hpp"
#include "scalar.hpp"

namespace jhlab {

/*
 * sigma(M) = || M : l^inf(n) -> l^1(n) ||
 *          = sup { sum_{i,j} a_i b_j M(i,j) : |a_i|, |b_j| <= 1 }.
 *
 * For fixed a the objective is linear in b, so the sup over b is attained at
 * b_j = sign(sum_i a_i M(i,j)), leaving  a -> sum_j |sum_i a_i M(i,j)|.
 * That function is convex in a, so its max over the cube [-1,1]^n is attained
 * at a vertex.  Both routines below therefore work over sign vectors only.
 * The objective is also even in a, so a_1 = +1 is fixed throughout.
 */

inline constexpr std::size_t kSigmaExactBound = 26;

namespace detail {

inline __int128 magnitude(__int128 v) { return v < 0 ? -v : v; }
inline double magnitude(double v) { return v < 0 ? -v : v; }
inline Rational magnitude(const Rational& v) { return v < 0 ? Rational(-v) : v; }

inline __int128 to_int128(const Integer& v) {
  Integer a = v < 0 ? Integer(-v) : v;
  const auto lo = static_cast<std::uint64_t>(a & Integer(UINT64_MAX));
  const auto hi = static_cast<std::uint64_t>(a >> 64);
  const auto u = (static_cast<unsigned __int128>(hi) << 64) | lo;
  return v < 0 ? -static_cast<__int128>(u) : static_cast<__int128>(u);
}

inline Integer from_int128(__int128 v) {
  const bool negative = v < 0;
  const unsigned __int128 u = negative ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  Integer r = static_cast<std::uint64_t>(u >> 64);
  r <<= 64;
  r += static_cast<std::uint64_t>(u);
  return negative ? Integer(-r) : r;
}

/// M = unit * values with integer values, when every partial sum the sigma
/// kernels form (at most 2 n^2 max|value|) stays well inside int128.
struct IntegerForm {
  std::vector<__int128> values;
  Rational unit;
};

inline std::optional<IntegerForm> integer_form(const Matrix<Rational>& m) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  Integer num_gcd = 0;
  Integer den_lcm = 1;
  for (const Rational& v : m.row_major()) {
    if (v == 0) continue;
    num_gcd = boost::multiprecision::gcd(num_gcd, Integer(boost::multiprecision::abs(numerator(v))));
    den_lcm = boost::multiprecision::lcm(den_lcm, Integer(denominator(v)));
  }
  IntegerForm form;
  if (num_gcd == 0) {
    form.values.assign(m.row_major().size(), 0);
    form.unit = 1;
    return form;
  }
  form.unit = Rational(num_gcd, den_lcm);
  const std::size_t n = m.size();
  const std::size_t headroom = std::bit_width(2 * n * n);
  form.values.reserve(m.row_major().size());
  for (const Rational& v : m.row_major()) {
    Rational q = v / form.unit;
    Integer iv = numerator(q);  // denominator(q) == 1 by construction
    if (iv != 0 && boost::multiprecision::msb(boost::multiprecision::abs(iv)) + headroom >= 120) return std::nullopt;
    form.values.push_back(to_int128(iv));
  }
  return form;
}

template <class A>
A column_objective(std::span<const A> col) {
  A s(0);
  for (const A& c : col) s += magnitude(c);
  return s;
}

/// Max of sum_j |col_j| over sign vectors with a_1 = +1 and the top
/// `fixed_bits` rows pinned by `chunk`; the remaining rows are visited in
/// Gray-code order so each step flips one row and updates the column sums.
template <class A>
A gray_sigma_chunk(const std::vector<A>& m, const std::vector<A>& doubled, std::size_t n, std::size_t fixed_bits,
                   std::uint64_t chunk) {
  std::vector<int> a(n, 1);
  for (std::size_t b = 0; b < fixed_bits; ++b)
    if (chunk >> b & 1) a[n - 1 - b] = -1;
  std::vector<A> col(n, A(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (a[i] > 0)
        col[j] += m[i * n + j];
      else
        col[j] -= m[i * n + j];
    }
  A best = column_objective<A>(col);
  const std::size_t free_rows = n - 1 - fixed_bits;
  const std::uint64_t steps = std::uint64_t{1} << free_rows;
  for (std::uint64_t t = 1; t < steps; ++t) {
    const std::size_t r = 1 + static_cast<std::size_t>(std::countr_zero(t));
    a[r] = -a[r];
    const A* row = &doubled[r * n];
    if (a[r] > 0)
      for (std::size_t j = 0; j < n; ++j) col[j] += row[j];
    else
      for (std::size_t j = 0; j < n; ++j) col[j] -= row[j];
    A v = column_objective<A>(col);
    if (best < v) best = v;
  }
  return best;
}

template <class A>
A gray_sigma(const std::vector<A>& m, std::size_t n) {
  std::vector<A> doubled(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) doubled[k] = m[k] + m[k];

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t fixed_bits = std::min<std::size_t>(std::bit_width(hw) - 1, n - 1);
  if (fixed_bits == 0) return gray_sigma_chunk(m, doubled, n, 0, 0);

  const std::uint64_t chunks = std::uint64_t{1} << fixed_bits;
  std::vector<A> results(chunks, A(0));
  {
    std::vector<std::jthread> workers;
    for (std::uint64_t c = 0; c < chunks; ++c)
      workers.emplace_back([&, c] { results[c] = gray_sigma_chunk(m, doubled, n, fixed_bits, c); });
  }
  return *std::max_element(results.begin(), results.end());
}

/// Alternating maximisation from one start: b = sign(a^T M), a = sign(M b),
/// until a is stable.  Zero sums resolve to +1.  At a fixed point, single
/// row flips that raise sum_j |(a^T M)_j| are tried before giving up.
/// Returns sum_j |(a^T M)_j|.
template <class A>
A alternating_max(const std::vector<A>& m, std::size_t n, std::vector<int> a) {
  std::vector<A> col(n), row(n);
  std::vector<int> b(n);
  auto columns = [&] {
    std::fill(col.begin(), col.end(), A(0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (a[i] > 0)
          col[j] += m[i * n + j];
        else
          col[j] -= m[i * n + j];
      }
  };
  const std::size_t max_rounds = 10 * n + 100;
  for (std::size_t round = 0; round < max_rounds; ++round) {
    columns();
    for (std::size_t j = 0; j < n; ++j) b[j] = col[j] < A(0) ? -1 : 1;
    std::fill(row.begin(), row.end(), A(0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (b[j] > 0)
          row[i] += m[i * n + j];
        else
          row[i] -= m[i * n + j];
      }
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int s = row[i] < A(0) ? -1 : 1;
      if (s != a[i]) {
        a[i] = s;
        changed = true;
      }
    }
    if (changed) continue;
    // One-flip search: b re-optimises implicitly through the absolute values.
    columns();
    const A current = column_objective<A>(col);
    std::size_t best_row = n;
    A best = current;
    std::vector<A> trial(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const A twice = m[i * n + j] + m[i * n + j];
        trial[j] = a[i] > 0 ? A(col[j] - twice) : A(col[j] + twice);
      }
      A v = column_objective<A>(std::span<const A>(trial));
      if (best < v) {
        best = v;
        best_row = i;
      }
    }
    if (best_row == n) break;
    a[best_row] = -a[best_row];
  }
  columns();
  return column_objective<A>(col);
}

template <class A>
A heuristic_sigma(const std::vector<A>& m, std::size_t n, std::size_t restarts, std::uint64_t seed) {
  auto run = [&](std::size_t restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart)};
    std::mt19937_64 rng(seq);
    std::vector<int> a(n);
    for (int& s : a) s = (rng() >> 63) ? -1 : 1;
    return alternating_max(m, n, std::move(a));
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers_count = std::min<std::size_t>(hw, restarts);
  std::vector<A> best(workers_count, A(0));
  if (workers_count <= 1) {
    for (std::size_t r = 0; r < restarts; ++r) {
      A v = run(r);
      if (best[0] < v) best[0] = v;
    }
  } else {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < workers_count; ++w)
      workers.emplace_back([&, w] {
        for (std::size_t r = w; r < restarts; r += workers_count) {
          A v = run(r);
          if (best[w] < v) best[w] = v;
        }
      });
  }
  return *std::max_element(best.begin(), best.end());
}

}  // namespace detail

/// Exact sigma by Gray-code enumeration of 2^(n-1) sign vectors.  Rational
/// matrices are rescaled to int128 when the magnitudes allow it, otherwise
/// the enumeration runs in exact rational arithmetic.
template <Scalar S>
S sigma_exact(const Matrix<S>& m, std::size_t bound = kSigmaExactBound) {
  const std::size_t n = m.size();
  if (n > bound)
    throw Error(ErrorKind::use_heuristic, "dimension " + std::to_string(n) + " exceeds exact-enumeration bound " +
                                              std::to_string(bound));
  if constexpr (std::is_same_v<S, Rational>) {
    if (auto form = detail::integer_form(m)) {
      __int128 v = detail::gray_sigma(form->values, n);
      return Rational(detail::from_int128(v)) * form->unit;
    }
  }
  return detail::gray_sigma(m.row_major(), n);
}

/// Certified lower bound on sigma from `restarts` seeded alternating
/// maximisations.  Deterministic for a fixed seed regardless of threading.
template <Scalar S>
S sigma_heuristic(const Matrix<S>& m, std::size_t restarts, std::uint64_t seed) {
  if (restarts == 0) throw Error(ErrorKind::invalid_input, "heuristic needs at least one restart");
  const std::size_t n = m.size();
  if constexpr (std::is_same_v<S, Rational>) {
    if (auto form = detail::integer_form(m)) {
      __int128 v = detail::heuristic_sigma(form->values, n, restarts, seed);
      return Rational(detail::from_int128(v)) * form->unit;
    }
  }
  return detail::heuristic_sigma(m.row_major(), n, restarts, seed);
}

/// sum_j |sum_i a_i M(i,j)| for one sign vector (a_i in {-1, +1}, 0-based span).
template <Scalar S>
S sigma_at_signs(const Matrix<S>& m, std::span<const int> signs) {
  if (signs.size() != m.size()) throw Error(ErrorKind::invalid_input, "sign vector length differs from matrix size");
  S total(0);
  for (std::size_t j = 1; j <= m.size(); ++j) {
    S col(0);
    for (std::size_t i = 1; i <= m.size(); ++i) {
      if (signs[i - 1] > 0)
        col += m(i, j);
      else
        col -= m(i, j);
    }
    total += abs_value(col);
  }
  return total;
}

}  // namespace jhlab
