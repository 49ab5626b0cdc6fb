#pragma once

// Test-only reference computations.  Nothing here calls into the code paths
// it is used to check.

#include <jhlab/jhlab.hpp>

#include <cstdint>
#include <random>
#include <vector>

namespace jhlab::testing {

/// sigma by enumerating every (a, b) in {-1,1}^n x {-1,1}^n, no symmetry
/// reductions and no incremental updates.
template <Scalar S>
S naive_sigma(const Matrix<S>& m) {
  const std::size_t n = m.size();
  S best(0);
  bool first = true;
  for (std::uint64_t am = 0; am < (std::uint64_t{1} << n); ++am)
    for (std::uint64_t bm = 0; bm < (std::uint64_t{1} << n); ++bm) {
      S v(0);
      for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 1; j <= n; ++j) {
          const bool neg = ((am >> (i - 1)) & 1) != ((bm >> (j - 1)) & 1);
          if (neg)
            v -= m(i, j);
          else
            v += m(i, j);
        }
      if (first || best < v) best = v;
      first = false;
    }
  return best;
}

/// sup of sum a_i b_j M(i,j) over the grid {-1, -1+1/steps, ..., 1}^n for both
/// a and b: the cube formula evaluated directly (n <= 2 keeps it small).
template <Scalar S>
S grid_sigma(const Matrix<S>& m, int steps) {
  const std::size_t n = m.size();
  const int points = 2 * steps + 1;
  std::size_t total = 1;
  for (std::size_t k = 0; k < 2 * n; ++k) total *= static_cast<std::size_t>(points);
  S best(0);
  std::vector<S> coord(2 * n);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t k = 0; k < 2 * n; ++k) {
      coord[k] = scalar_traits<S>::from_ratio(static_cast<long long>(c % points) - steps, steps);
      c /= points;
    }
    S v(0);
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 1; j <= n; ++j) v += coord[i - 1] * coord[n + j - 1] * m(i, j);
    if (best < v) best = v;
  }
  return best;
}

inline Rational random_rational(std::mt19937_64& rng, int max_num = 9, int max_den = 6) {
  std::uniform_int_distribution<int> num(-max_num, max_num), den(1, max_den);
  return scalar_traits<Rational>::from_ratio(num(rng), den(rng));
}

inline Rational random_nonzero_rational(std::mt19937_64& rng) {
  Rational r = 0;
  while (r == 0) r = random_rational(rng);
  return r;
}

inline Matrix<Rational> random_matrix(std::size_t n, std::mt19937_64& rng) {
  Matrix<Rational> m(n);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j) m(i, j) = random_rational(rng);
  return m;
}

inline Node random_node(std::mt19937_64& rng, std::size_t max_depth) {
  std::uniform_int_distribution<std::size_t> len(0, max_depth);
  std::string bits(len(rng), '0');
  for (char& c : bits) c = (rng() & 1) ? '1' : '0';
  return Node(bits);
}

inline TreeVector<Rational> random_tree_vector(std::mt19937_64& rng, std::size_t max_depth = 4, std::size_t max_nonzeros = 8) {
  std::uniform_int_distribution<std::size_t> count(1, max_nonzeros);
  TreeVector<Rational> x;
  const std::size_t k = count(rng);
  for (std::size_t t = 0; t < k; ++t) x.set(random_node(rng, max_depth), random_nonzero_rational(rng));
  return x;
}

/// Every node of depth <= d, lexicographic within each level.
inline std::vector<Node> all_nodes(std::size_t d) {
  std::vector<Node> out;
  for (std::size_t len = 0; len <= d; ++len)
    for (const Node& n : descendants_at_level(Node::root(), len)) out.push_back(n);
  return out;
}

}  // namespace jhlab::testing
