#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "rotrook/symcore.hpp"

namespace rotrook {

/// MT19937 stream with the uniform and Gaussian draws the generators use.
class Rng {
public:
  explicit Rng(std::uint32_t seed = 5489u) : seed_(seed), engine_(seed) {}

  std::uint32_t seed() const noexcept { return seed_; }
  std::uint32_t next_u32() { return static_cast<std::uint32_t>(engine_()); }

  /// (x + 0.5) / 2^32: never exactly 0 or 1.
  double uniform01() { return (static_cast<double>(next_u32()) + 0.5) * 0x1p-32; }
  /// Uniform on (-1, 1).
  double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

  /// Standard normal via the basic Box-Muller transform; draws come in
  /// cos/sin pairs.
  double gaussian();
  /// Standard normal conditioned on [-1, 1] by rejection.
  double gaussian_unit();
  /// +1 or -1 with equal probability.
  double sign() { return (next_u32() & 1u) ? 1.0 : -1.0; }

private:
  std::uint32_t seed_;
  std::mt19937 engine_;
  std::optional<double> spare_;
};

/// The (cos, sin) pair of the basic Box-Muller transform.
std::pair<double, double> box_muller(double u1, double u2) noexcept;

PackedSymMatrix uniform_sym(Rng& rng, std::size_t n);
DenseVector uniform_vector(Rng& rng, std::size_t n);

/// Row-major dense n x n matrix.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> values;
  double operator()(std::size_t i, std::size_t j) const noexcept { return values[i * n + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return values[i * n + j]; }
};

/// Haar-distributed orthogonal matrix from Householder reflectors of Gaussian
/// vectors and a random sign diagonal.
DenseMatrix stewart_orthogonal(Rng& rng, std::size_t n);

struct GeneratedProblem {
  PackedSymMatrix a;
  DenseVector x_exact;
  DenseVector b;
  std::size_t rank = 0;
  std::optional<double> cond;  // set by the spectral generators
  DenseVector eigenvalues;     // planted spectrum, when known
};

/// A = U D U^t, |d| uniform in [1/cond, 1] with the extremes pinned;
/// b = U z, x = U D^-1 z. Assembled in double-double, rounded once.
GeneratedProblem spectral_conditioned(Rng& rng, std::size_t n, double cond);

/// A = U D U^t with r nonzero eigenvalues drawn from the unit-truncated
/// Gaussian; b = U z, x = U D^+ z (the minimum-norm least-squares solution).
GeneratedProblem spectral_rank_deficient(Rng& rng, std::size_t n, std::size_t r);

/// Uniform [-1, 1] matrix and solution, b = A x in double-double.
GeneratedProblem uniform_problem(Rng& rng, std::size_t n);

}  // namespace rotrook
