#include "rotrook/symcore.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace rotrook {

std::size_t packed_index(std::size_t i, std::size_t j, std::size_t n) {
  if (i >= n || j >= n) {
    throw UsageError("packed_index: index (" + std::to_string(i) + "," +
                     std::to_string(j) + ") out of range for n=" +
                     std::to_string(n));
  }
  if (i > j) std::swap(i, j);
  return packed_offset(i, j, n);
}

PackedSymMatrix::PackedSymMatrix(std::size_t n)
    : n_(n), data_(n * (n + 1) / 2, 0.0) {}

PackedSymMatrix::PackedSymMatrix(std::size_t n, std::vector<double> data)
    : n_(n), data_(std::move(data)) {
  if (data_.size() != n * (n + 1) / 2) {
    throw UsageError("PackedSymMatrix: data length " +
                     std::to_string(data_.size()) + " does not match n=" +
                     std::to_string(n));
  }
}

PackedSymMatrix PackedSymMatrix::identity(std::size_t n) {
  PackedSymMatrix a(n);
  for (std::size_t i = 0; i < n; ++i) a.upper(i, i) = 1.0;
  return a;
}

PackedSymMatrix PackedSymMatrix::from_dense(std::size_t n,
                                            std::span<const double> full) {
  if (full.size() != n * n) {
    throw UsageError("from_dense: expected " + std::to_string(n * n) +
                     " entries, got " + std::to_string(full.size()));
  }
  PackedSymMatrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a.upper(i, j) = full[i * n + j];
  return a;
}

double PackedSymMatrix::get(std::size_t i, std::size_t j) const {
  return data_[packed_index(i, j, n_)];
}

void PackedSymMatrix::set(std::size_t i, std::size_t j, double v) {
  data_[packed_index(i, j, n_)] = v;
}

double PackedSymMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double PackedSymMatrix::frobenius_norm() const noexcept {
  double diag = 0.0, off = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double d = upper(i, i);
    diag += d * d;
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double v = upper(i, j);
      off += v * v;
    }
  }
  return std::sqrt(diag + 2.0 * off);
}

bool PackedSymMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::vector<double> PackedSymMatrix::to_dense() const {
  std::vector<double> full(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i; j < n_; ++j)
      full[i * n_ + j] = full[j * n_ + i] = upper(i, j);
  return full;
}

DenseVector sym_matvec(const PackedSymMatrix& a, std::span<const double> x) {
  const std::size_t n = a.size();
  if (x.size() != n) {
    throw UsageError("sym_matvec: vector length " + std::to_string(x.size()) +
                     " does not match n=" + std::to_string(n));
  }
  DenseVector y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = y[i] + a.upper(i, i) * x[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = a.upper(i, j);
      acc += v * x[j];
      y[j] += v * x[i];
    }
    y[i] = acc;
  }
  return y;
}

double frobenius_diff(const PackedSymMatrix& a, const PackedSymMatrix& b) {
  if (a.size() != b.size()) {
    throw UsageError("frobenius_diff: dimension mismatch (" +
                     std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  const std::size_t n = a.size();
  double diag = 0.0, off = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a.upper(i, i) - b.upper(i, i);
    diag += d * d;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double e = a.upper(i, j) - b.upper(i, j);
      off += e * e;
    }
  }
  return std::sqrt(diag + 2.0 * off);
}

double norm2(std::span<const double> v) noexcept {
  // Scaled accumulation so tiny or huge entries do not underflow/overflow.
  double scale = 0.0, ssq = 1.0;
  for (double x : v) {
    if (x == 0.0) continue;
    const double ax = std::abs(x);
    if (scale < ax) {
      ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
      scale = ax;
    } else {
      ssq += (ax / scale) * (ax / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

}  // namespace rotrook
