#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rotrook/rotfact.hpp"
#include "rotrook/symcore.hpp"

namespace rotrook {

/// M^t v: the step-k swap pair, then the step-k rotation, for k = 0, 1, ...
DenseVector apply_Mt(const RotatedFactorization& f, std::span<const double> v);

/// M v, the inverse replay of apply_Mt.
DenseVector apply_M(const RotatedFactorization& f, std::span<const double> v);

/// Factorization whose L21^t block (rows [0, r), columns [r, n)) has been
/// overwritten by K = (L11^t)^-1 L21^t. The fundamental null basis of
/// L D L^t is N = [-K; I_{n-r}], so A M N = 0.
class NullAugmentedFactorization {
public:
  const RotatedFactorization& factors() const noexcept { return f_; }
  std::size_t size() const noexcept { return f_.n; }
  std::size_t rank() const noexcept { return f_.rank; }
  std::size_t nullity() const noexcept { return f_.n - f_.rank; }

  /// K_ij, i < rank, j < nullity.
  double k(std::size_t i, std::size_t j) const noexcept {
    return f_.packed.upper(i, f_.rank + j);
  }
  /// Row-major n x (n-r) copy of N.
  std::vector<double> null_basis() const;

private:
  friend NullAugmentedFactorization compute_null_basis(RotatedFactorization f);
  explicit NullAugmentedFactorization(RotatedFactorization f) : f_(std::move(f)) {}

  RotatedFactorization f_;
};

NullAugmentedFactorization compute_null_basis(RotatedFactorization f);

/// Cholesky solve of G y = rhs; G must be symmetric positive definite.
/// Throws NumericalError on a non-positive pivot.
DenseVector spd_solve(PackedSymMatrix g, std::span<const double> rhs);

enum class RankBranch {
  low,   ///< 2r <= n: systems of order r with I + K K^t
  high,  ///< 2r > n: systems of order n-r with I + K^t K
};

struct SolveReport {
  DenseVector x;
  std::size_t rank = 0;
  /// ||b - A x||_2 with A the factored operator M L D L^t M^t.
  double residual_norm = 0.0;
  RankBranch branch = RankBranch::low;
};

struct SolveOptions {
  /// Overrides the 2r <= n branch selection.
  std::optional<RankBranch> force_branch;
};

/// Minimum-norm least-squares solution of A x = b.
SolveReport solve_min_norm_lsq(const NullAugmentedFactorization& f,
                               std::span<const double> b,
                               const SolveOptions& options = {});

/// y = M L D L^t M^t x using the null-augmented storage.
DenseVector apply_factored(const NullAugmentedFactorization& f,
                           std::span<const double> x);

}  // namespace rotrook
