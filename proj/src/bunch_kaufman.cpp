#include "rotrook/bunch_kaufman.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "rotrook/rotfact.hpp"

namespace rotrook {

BkFactorization bk_factorize(PackedSymMatrix a) {
  if (a.size() == 0) throw UsageError("bk_factorize: empty matrix");
  if (!a.all_finite()) throw UsageError("bk_factorize: non-finite matrix entry");

  const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
  const std::size_t n = a.size();
  BkFactorization f;
  f.n = n;
  f.piv.assign(n, 0);

  std::size_t k = 0;
  while (k < n) {
    std::size_t kstep = 1;
    std::size_t kp = k;
    const double absakk = std::abs(a.upper(k, k));

    std::size_t imax = k;
    double colmax = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(a.upper(k, i));
      if (v > colmax) {
        colmax = v;
        imax = i;
      }
    }
    if (std::max(absakk, colmax) == 0.0) {
      throw NumericalError("bk_factorize: singular matrix (zero pivot column at step " +
                           std::to_string(k) + ")");
    }

    if (absakk < alpha * colmax) {
      double rowmax = 0.0;
      for (std::size_t j = k; j < n; ++j)
        if (j != imax) rowmax = std::max(rowmax, std::abs(a.at_sym(imax, j)));
      if (absakk >= alpha * colmax * (colmax / rowmax)) {
        kp = k;
      } else if (std::abs(a.upper(imax, imax)) >= alpha * rowmax) {
        kp = imax;
      } else {
        kp = imax;
        kstep = 2;
      }
    }

    const std::size_t kk = k + kstep - 1;
    if (kp != kk) sym_swap(a, kk, kp);

    if (kstep == 1) {
      const double d = a.upper(k, k);
      if (k + 1 < n) {
        double* w = &a.upper(k, k + 1);
        const std::size_t m = n - k - 1;
        for (std::size_t ii = 0; ii < m; ++ii) {
          const double wi = w[ii];
          if (wi == 0.0) continue;
          const double li = wi / d;
          double* row = &a.upper(k + 1 + ii, k + 1 + ii);
          for (std::size_t jj = ii; jj < m; ++jj) row[jj - ii] -= li * w[jj];
        }
        for (std::size_t ii = 0; ii < m; ++ii) w[ii] /= d;
      }
      f.piv[k] = static_cast<std::ptrdiff_t>(kp);
    } else {
      if (k + 2 < n) {
        double d21 = a.upper(k, k + 1);
        const double d11 = a.upper(k + 1, k + 1) / d21;
        const double d22 = a.upper(k, k) / d21;
        const double t = 1.0 / (d11 * d22 - 1.0);
        d21 = t / d21;
        double* ck = &a.upper(k, k + 2);       // column k of L below the block
        double* ck1 = &a.upper(k + 1, k + 2);  // column k+1
        const std::size_t m = n - k - 2;
        for (std::size_t jj = 0; jj < m; ++jj) {
          const double wk = d21 * (d11 * ck[jj] - ck1[jj]);
          const double wkp1 = d21 * (d22 * ck1[jj] - ck[jj]);
          double* row = &a.upper(k + 2 + jj, k + 2 + jj);
          for (std::size_t ii = jj; ii < m; ++ii)
            row[ii - jj] -= ck[ii] * wk + ck1[ii] * wkp1;
          ck[jj] = wk;
          ck1[jj] = wkp1;
        }
      }
      const auto code = -static_cast<std::ptrdiff_t>(kp) - 1;
      f.piv[k] = code;
      f.piv[k + 1] = code;
    }
    ++f.nblocks;
    k += kstep;
  }
  f.packed = std::move(a);
  return f;
}

namespace {

void apply_swaps_forward(const BkFactorization& f, DenseVector& v) {
  for (std::size_t k = 0; k < f.n;) {
    if (f.block_2x2(k)) {
      std::swap(v[k + 1], v[f.swap_target(k)]);
      k += 2;
    } else {
      std::swap(v[k], v[f.swap_target(k)]);
      k += 1;
    }
  }
}

void apply_swaps_backward(const BkFactorization& f, DenseVector& v) {
  for (std::size_t k = f.n; k-- > 0;) {
    if (f.block_2x2(k)) {
      // k is the second row of the block
      std::swap(v[k], v[f.swap_target(k)]);
      --k;
    } else {
      std::swap(v[k], v[f.swap_target(k)]);
    }
  }
}

}  // namespace

DenseVector bk_solve(const BkFactorization& f, std::span<const double> b) {
  const std::size_t n = f.n;
  if (b.size() != n) {
    throw UsageError("bk_solve: right-hand side length " + std::to_string(b.size()) +
                     " does not match n=" + std::to_string(n));
  }
  const auto& a = f.packed;
  DenseVector y(b.begin(), b.end());
  apply_swaps_forward(f, y);

  // L y = P^t b
  for (std::size_t k = 0; k < n;) {
    if (f.block_2x2(k)) {
      for (std::size_t i = k + 2; i < n; ++i)
        y[i] -= a.upper(k, i) * y[k] + a.upper(k + 1, i) * y[k + 1];
      k += 2;
    } else {
      for (std::size_t i = k + 1; i < n; ++i) y[i] -= a.upper(k, i) * y[k];
      k += 1;
    }
  }
  // D
  for (std::size_t k = 0; k < n;) {
    if (f.block_2x2(k)) {
      const double d21 = a.upper(k, k + 1);
      const double d11 = a.upper(k + 1, k + 1) / d21;
      const double d22 = a.upper(k, k) / d21;
      const double t = 1.0 / (d11 * d22 - 1.0);
      const double bk = y[k] / d21, bk1 = y[k + 1] / d21;
      y[k] = t * (d11 * bk - bk1);
      y[k + 1] = t * (d22 * bk1 - bk);
      k += 2;
    } else {
      y[k] /= a.upper(k, k);
      k += 1;
    }
  }
  // L^t x = y, blocks in reverse
  for (std::size_t k = n; k-- > 0;) {
    // Walking down from n-1, a 2x2 block is always met at its second row.
    if (f.block_2x2(k)) {
      const std::size_t s = k - 1;
      double acc0 = 0.0, acc1 = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) {
        acc0 += a.upper(s, i) * y[i];
        acc1 += a.upper(k, i) * y[i];
      }
      y[s] -= acc0;
      y[k] -= acc1;
      k = s;
    } else {
      double acc = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) acc += a.upper(k, i) * y[i];
      y[k] -= acc;
    }
  }
  apply_swaps_backward(f, y);
  return y;
}

PackedSymMatrix bk_reconstruct(const BkFactorization& f) {
  const std::size_t n = f.n;
  const auto& a = f.packed;
  PackedSymMatrix s(n);
  std::vector<double> c0(n), c1(n);
  for (std::size_t k = 0; k < n;) {
    if (f.block_2x2(k)) {
      const double e11 = a.upper(k, k), e12 = a.upper(k, k + 1),
                   e22 = a.upper(k + 1, k + 1);
      std::fill(c0.begin(), c0.end(), 0.0);
      std::fill(c1.begin(), c1.end(), 0.0);
      c0[k] = 1.0;
      c1[k + 1] = 1.0;
      for (std::size_t i = k + 2; i < n; ++i) {
        c0[i] = a.upper(k, i);
        c1[i] = a.upper(k + 1, i);
      }
      for (std::size_t i = k; i < n; ++i) {
        const double u = e11 * c0[i] + e12 * c1[i];
        const double v = e12 * c0[i] + e22 * c1[i];
        for (std::size_t j = i; j < n; ++j) s.upper(i, j) += u * c0[j] + v * c1[j];
      }
      k += 2;
    } else {
      const double d = a.upper(k, k);
      c0[k] = 1.0;
      for (std::size_t i = k + 1; i < n; ++i) c0[i] = a.upper(k, i);
      for (std::size_t i = k; i < n; ++i) {
        const double u = d * c0[i];
        for (std::size_t j = i; j < n; ++j) s.upper(i, j) += u * c0[j];
      }
      k += 1;
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    if (f.block_2x2(k)) {
      sym_swap(s, k, f.swap_target(k));
      --k;
    } else {
      sym_swap(s, k, f.swap_target(k));
    }
  }
  return s;
}

}  // namespace rotrook
