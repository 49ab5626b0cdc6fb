#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "scalar.hpp"

namespace jhlab {

/// Dense square matrix.  All public indices are 1-based, matching
/// (-1)^{min(i,j)+1} and i + j <= n + 1 as written; storage is row-major.
template <Scalar S>
class Matrix {
 public:
  explicit Matrix(std::size_t n) : n_(n), data_(n * n, S(0)) {
    if (n == 0) throw Error(ErrorKind::invalid_input, "matrix dimension must be at least 1");
  }

  Matrix(std::size_t n, std::vector<S> row_major) : n_(n), data_(std::move(row_major)) {
    if (n == 0) throw Error(ErrorKind::invalid_input, "matrix dimension must be at least 1");
    if (data_.size() != n * n)
      throw Error(ErrorKind::invalid_input, "expected " + std::to_string(n * n) + " entries, got " +
                                                std::to_string(data_.size()));
  }

  Matrix(std::initializer_list<std::initializer_list<S>> rows) : n_(rows.size()) {
    if (n_ == 0) throw Error(ErrorKind::invalid_input, "matrix dimension must be at least 1");
    data_.reserve(n_ * n_);
    for (const auto& row : rows) {
      if (row.size() != n_) throw Error(ErrorKind::invalid_input, "matrix is not square");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 1; i <= n; ++i) m(i, i) = S(1);
    return m;
  }

  std::size_t size() const noexcept { return n_; }

  S& operator()(std::size_t i, std::size_t j) { return data_[(i - 1) * n_ + (j - 1)]; }
  const S& operator()(std::size_t i, std::size_t j) const { return data_[(i - 1) * n_ + (j - 1)]; }

  const std::vector<S>& row_major() const noexcept { return data_; }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const S& v) { return v == S(0); });
  }

  Matrix& operator*=(const S& c) {
    for (auto& v : data_) v *= c;
    return *this;
  }
  friend Matrix operator*(const S& c, Matrix m) { return m *= c; }
  friend Matrix operator-(Matrix m) { return m *= S(-1); }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t n_;
  std::vector<S> data_;
};

/// A permutation of {1..n}, stored as (pi(1), ..., pi(n)).
class SignPermutation {
 public:
  explicit SignPermutation(std::vector<std::size_t> values) : values_(std::move(values)) {
    std::vector<bool> seen(values_.size() + 1, false);
    for (std::size_t v : values_) {
      if (v < 1 || v > values_.size() || seen[v])
        throw Error(ErrorKind::invalid_input, "sequence is not a permutation of 1..n");
      seen[v] = true;
    }
  }

  static SignPermutation identity(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{1});
    return SignPermutation(std::move(v));
  }

  std::size_t size() const noexcept { return values_.size(); }
  std::size_t operator()(std::size_t i) const { return values_.at(i - 1); }
  const std::vector<std::size_t>& values() const noexcept { return values_; }

  SignPermutation inverse() const {
    std::vector<std::size_t> inv(values_.size());
    for (std::size_t i = 1; i <= values_.size(); ++i) inv[values_[i - 1] - 1] = i;
    return SignPermutation(std::move(inv));
  }

  friend bool operator==(const SignPermutation&, const SignPermutation&) = default;

 private:
  std::vector<std::size_t> values_;
};

/// (-1)^{min(i,j)+1}: +1 when min(i,j) is odd.
inline int alternating_sign(std::size_t i, std::size_t j) { return std::min(i, j) % 2 == 1 ? 1 : -1; }

/// +1 on the main (anti-diagonal) triangle i + j <= n + 1, -1 below it.
inline int triangle_sign(std::size_t i, std::size_t j, std::size_t n) { return i + j <= n + 1 ? 1 : -1; }

template <Scalar S>
Matrix<S> transform_E(const Matrix<S>& m) {
  Matrix<S> out = m;
  for (std::size_t i = 1; i <= m.size(); ++i)
    for (std::size_t j = 1; j <= m.size(); ++j)
      if (alternating_sign(i, j) < 0) out(i, j) = S(-m(i, j));
  return out;
}

template <Scalar S>
Matrix<S> kp_sign_pattern(std::size_t n) {
  Matrix<S> eps(n);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j) eps(i, j) = S(triangle_sign(i, j, n));
  return eps;
}

template <Scalar S>
Matrix<S> main_triangle_projection(const Matrix<S>& m) {
  Matrix<S> out = m;
  const std::size_t n = m.size();
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j)
      if (i + j > n + 1) out(i, j) = S(0);
  return out;
}

template <Scalar S>
Matrix<S> hadamard(const Matrix<S>& a, const Matrix<S>& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::invalid_input, "entrywise product of matrices of different size");
  Matrix<S> out(a.size());
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= a.size(); ++j) out(i, j) = a(i, j) * b(i, j);
  return out;
}

template <Scalar S>
Matrix<S> transpose(const Matrix<S>& m) {
  Matrix<S> out(m.size());
  for (std::size_t i = 1; i <= m.size(); ++i)
    for (std::size_t j = 1; j <= m.size(); ++j) out(j, i) = m(i, j);
  return out;
}

/// Odd integers of 1..n ascending, then even integers descending.
inline SignPermutation lemma1_permutation(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::invalid_input, "permutation dimension must be at least 1");
  std::vector<std::size_t> seq;
  seq.reserve(n);
  for (std::size_t k = 1; k <= n; k += 2) seq.push_back(k);
  for (std::size_t k = (n % 2 == 0 ? n : n - 1); k >= 2; k -= 2) seq.push_back(k);
  return SignPermutation(std::move(seq));
}

/// Checks (-1)^{min(pi(i),pi(j))+1} = 1  <=>  i + j <= n + 1 for all i, j.
inline bool lemma1_identity_check(std::size_t n) {
  const SignPermutation pi = lemma1_permutation(n);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j)
      if ((alternating_sign(pi(i), pi(j)) == 1) != (i + j <= n + 1)) return false;
  return true;
}

/// M(i,j) = N(p^{-1}(i), p^{-1}(j)).
template <Scalar S>
Matrix<S> conjugate_by_permutation(const Matrix<S>& n_mat, const SignPermutation& p) {
  if (p.size() != n_mat.size())
    throw Error(ErrorKind::invalid_input, "permutation of size " + std::to_string(p.size()) +
                                              " applied to matrix of size " + std::to_string(n_mat.size()));
  const SignPermutation inv = p.inverse();
  Matrix<S> out(n_mat.size());
  for (std::size_t i = 1; i <= n_mat.size(); ++i)
    for (std::size_t j = 1; j <= n_mat.size(); ++j) out(i, j) = n_mat(inv(i), inv(j));
  return out;
}

template <Scalar To, Scalar From>
Matrix<To> matrix_cast(const Matrix<From>& m) {
  std::vector<To> data;
  data.reserve(m.row_major().size());
  for (const From& v : m.row_major()) {
    if constexpr (std::is_same_v<To, From>)
      data.push_back(v);
    else
      data.push_back(static_cast<To>(to_double(v)));
  }
  return Matrix<To>(m.size(), std::move(data));
}

}  // namespace jhlab
