#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rotrook/symcore.hpp"

namespace rotrook {

/// A = P L D L^t P^t with D block diagonal (1x1 and 2x2 blocks).
///
/// Storage mirrors the LAPACK lower-triangular layout transposed into the
/// packed upper triangle: D blocks on the diagonal (a 2x2 block at k also
/// uses (k, k+1)), and L_ik for i below the block at (k, i). Swaps are
/// applied to the whole matrix, so P is just the ordered swap sequence.
///
/// piv follows the LAPACK sign convention: piv[k] = p >= 0 for a 1x1 block
/// preceded by the swap k <-> p, and piv[k] = piv[k+1] = -(p+1) for a 2x2
/// block preceded by the swap k+1 <-> p.
struct BkFactorization {
  std::size_t n = 0;
  PackedSymMatrix packed;
  std::vector<std::ptrdiff_t> piv;
  std::size_t nblocks = 0;

  bool block_2x2(std::size_t k) const noexcept { return piv[k] < 0; }
  /// Swap partner of the block starting at k.
  std::size_t swap_target(std::size_t k) const noexcept {
    return piv[k] < 0 ? static_cast<std::size_t>(-piv[k] - 1)
                      : static_cast<std::size_t>(piv[k]);
  }
};

/// Bunch-Kaufman partial pivoting, alpha = (1 + sqrt(17)) / 8.
/// Throws NumericalError when a pivot column is exactly zero.
BkFactorization bk_factorize(PackedSymMatrix a);

DenseVector bk_solve(const BkFactorization& f, std::span<const double> b);

PackedSymMatrix bk_reconstruct(const BkFactorization& f);

}  // namespace rotrook
