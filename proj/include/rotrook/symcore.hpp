#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rotrook {

/// Invalid arguments: bad dimensions, out-of-range indices, non-finite input.
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical breakdown the caller has to know about (singular pivot,
/// Cholesky failure on a matrix that should have been positive definite).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using DenseVector = std::vector<double>;

/// Offset of entry {i,j} in row-major upper-triangle packed storage.
/// The pair is canonicalized so the smaller index is the row.
std::size_t packed_index(std::size_t i, std::size_t j, std::size_t n);

/// Unchecked variant for inner loops; requires i <= j < n.
constexpr std::size_t packed_offset(std::size_t i, std::size_t j,
                                    std::size_t n) noexcept {
  return i * n - (i * (i - 1)) / 2 + (j - i);
}

/// Symmetric n x n matrix stored as its upper triangle, row by row.
class PackedSymMatrix {
public:
  PackedSymMatrix() = default;
  explicit PackedSymMatrix(std::size_t n);
  PackedSymMatrix(std::size_t n, std::vector<double> data);

  static PackedSymMatrix identity(std::size_t n);
  /// Builds from a full row-major n x n array; only the upper triangle is read.
  static PackedSymMatrix from_dense(std::size_t n, std::span<const double> full);

  std::size_t size() const noexcept { return n_; }

  double get(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, double v);

  /// Unchecked access, i <= j required.
  double& upper(std::size_t i, std::size_t j) noexcept {
    return data_[packed_offset(i, j, n_)];
  }
  const double& upper(std::size_t i, std::size_t j) const noexcept {
    return data_[packed_offset(i, j, n_)];
  }
  /// Unchecked access with index canonicalization.
  double at_sym(std::size_t i, std::size_t j) const noexcept {
    return i <= j ? upper(i, j) : upper(j, i);
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  /// Largest |a_ij| over the whole matrix (0 for an empty matrix).
  double max_abs() const noexcept;
  /// Full-matrix Frobenius norm (off-diagonal entries counted twice).
  double frobenius_norm() const noexcept;
  bool all_finite() const noexcept;

  /// Full row-major copy, handy for tests and oracles.
  std::vector<double> to_dense() const;

  friend bool operator==(const PackedSymMatrix&, const PackedSymMatrix&) = default;

private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

DenseVector sym_matvec(const PackedSymMatrix& a, std::span<const double> x);

/// ||A - B||_F over the full matrices.
double frobenius_diff(const PackedSymMatrix& a, const PackedSymMatrix& b);

double norm2(std::span<const double> v) noexcept;

}  // namespace rotrook
