#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rotrook/symcore.hpp"

namespace rotrook {

/// A = M L D L^t M^t with M the product of the per-step permutation pairs and
/// Jacobi rotations.
///
/// `packed` is the input matrix overwritten in place: diagonal positions hold
/// d_0..d_{rank-1} followed by zeros, and the strict upper triangle holds L^t
/// (entry (i,j), i < j, is L_ji; the unit diagonal is implicit). Rows below
/// `rank` are zero.
///
/// `piv[2k]`, `piv[2k+1]` are the indices swapped (in that order) into
/// positions k and k+1 at step k. The second swap is a no-op when it names
/// position k itself, which is how the last step and the steps past the rank
/// are recorded. `tan[k]` is the tangent of the step-k rotation (0: none).
struct RotatedFactorization {
  std::size_t n = 0;
  std::size_t rank = 0;
  double tolerance = 0.0;
  PackedSymMatrix packed;
  std::vector<std::size_t> piv;
  std::vector<double> tan;

  /// Fresh state for stepping through the factorization by hand.
  static RotatedFactorization start(PackedSymMatrix a, double tolerance);

  double d(std::size_t k) const noexcept { return packed.upper(k, k); }
  /// L_ij for i > j (0 above the diagonal, 1 on it).
  double l(std::size_t i, std::size_t j) const noexcept;
};

struct PivotChoice {
  double max = 0.0;
  std::size_t rmax = 0;
  std::size_t cmax = 0;
  /// Row scanned before the pivot row when the pivot is diagonal; its
  /// entries are no larger than `max`. Empty only on the last active row.
  std::optional<std::size_t> previous;
  bool deficient = false;
};

/// Largest intermediate element relative to the largest input element.
struct GrowthTrace {
  double max_initial = 0.0;
  double max_intermediate = 0.0;
  double rho = 1.0;

  void observe(double abs_value) noexcept {
    if (abs_value > max_intermediate) max_intermediate = abs_value;
  }
  void finish() noexcept {
    rho = max_initial > 0.0 ? max_intermediate / max_initial : 1.0;
  }
};

/// Plane rotation that diagonalizes a 2x2 symmetric block
/// [[a11, a12], [a12, a22]], placing the eigenvalue of larger magnitude at
/// (1,1). Applied as R A R^t with R = [[c, -s], [s, c]].
struct JacobiRotation {
  double t = 0.0;
  double c = 1.0;
  double s = 0.0;
  double b11 = 0.0;
  double b22 = 0.0;
};

/// Default rank tolerance: n * u * max|a_ij|, u = 2^-53.
double default_tolerance(const PackedSymMatrix& a) noexcept;

/// Modified rook search over the active block [k, n).
PivotChoice rook_pivot_search(const PackedSymMatrix& a, std::size_t k,
                              double tolerance);

/// Symmetric interchange of rows/columns p and q of the full matrix.
void sym_swap(PackedSymMatrix& a, std::size_t p, std::size_t q) noexcept;

/// Moves the chosen pivot to (k,k) (diagonal pivot) or (k,k+1) (off-diagonal
/// pivot) and records the swaps in f.piv.
void place_pivot(RotatedFactorization& f, std::size_t k, const PivotChoice& choice);

JacobiRotation compute_rotation(double a11, double a12, double a22) noexcept;

/// (c, s) for a stored tangent, safe for very large |t|.
void rotation_cs(double t, double& c, double& s) noexcept;

/// Rotates rows/columns k and k+1 of the whole stored matrix, including the
/// already computed L^t entries above row k, and records the tangent.
void apply_rotation(RotatedFactorization& f, std::size_t k,
                    const JacobiRotation& rot, GrowthTrace* trace = nullptr);

/// One symmetric Gaussian step with pivot d_k = a_kk: multipliers replace the
/// pivot row, the trailing block becomes the Schur complement.
void eliminate_step(RotatedFactorization& f, std::size_t k,
                    GrowthTrace* trace = nullptr);

struct FactorizeResult {
  RotatedFactorization factors;
  GrowthTrace growth;
};

/// Full rotated-rook factorization. A negative tolerance selects
/// default_tolerance(a). Throws UsageError on non-finite input.
FactorizeResult factorize(PackedSymMatrix a, double tolerance = -1.0);

/// M L D L^t M^t in working precision.
PackedSymMatrix reconstruct(const RotatedFactorization& f);

/// L D L^t only (no M), in working precision.
PackedSymMatrix ldlt_product(const RotatedFactorization& f);

/// 2.8 n^(3 ln(n) / 4).
double growth_bound_analytic(std::size_t n);

/// s_1 (1 + 2 s_2) ... (1 + 2 s_n), with each s_k > 0 the root of
/// s (1 + 2 s)^(k-1) = k^(k/2) / (k-1)^((k-1)/2).
double growth_bound_tight(std::size_t n);

/// The root s_k above (k >= 2).
double growth_bound_root(std::size_t k);

}  // namespace rotrook
