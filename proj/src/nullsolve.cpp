#include "rotrook/nullsolve.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace rotrook {
namespace {

void check_length(std::size_t got, std::size_t n, const char* what) {
  if (got != n) {
    throw UsageError(std::string(what) + ": vector length " + std::to_string(got) +
                     " does not match n=" + std::to_string(n));
  }
}

// In-place Cholesky G = U^t U on packed upper storage.
void cholesky_factor(PackedSymMatrix& g) {
  const std::size_t m = g.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double d = g.upper(i, i);
    if (!(d > 0.0)) {
      throw NumericalError("spd_solve: non-positive pivot " + std::to_string(d) +
                           " at row " + std::to_string(i));
    }
    const double u = std::sqrt(d);
    double* row = &g.upper(i, i);
    row[0] = u;
    for (std::size_t j = 1; j < m - i; ++j) row[j] /= u;
    for (std::size_t p = i + 1; p < m; ++p) {
      const double up = row[p - i];
      if (up == 0.0) continue;
      double* target = &g.upper(p, p);
      for (std::size_t q = p; q < m; ++q) target[q - p] -= up * row[q - i];
    }
  }
}

// Solves U^t U y = rhs in place.
void cholesky_solve(const PackedSymMatrix& u, std::span<double> y) {
  const std::size_t m = u.size();
  for (std::size_t i = 0; i < m; ++i) {
    y[i] /= u.upper(i, i);
    const double yi = y[i];
    const double* row = &u.upper(i, i);
    for (std::size_t j = i + 1; j < m; ++j) y[j] -= row[j - i] * yi;
  }
  for (std::size_t i = m; i-- > 0;) {
    const double* row = &u.upper(i, i);
    double acc = y[i];
    for (std::size_t j = i + 1; j < m; ++j) acc -= row[j - i] * y[j];
    y[i] = acc / row[0];
  }
}

// I + K K^t (order r) or I + K^t K (order n-r), already Cholesky-factored.
PackedSymMatrix reduced_system(const NullAugmentedFactorization& f, RankBranch branch) {
  const auto& p = f.factors().packed;
  const std::size_t r = f.rank(), nr = f.nullity();
  if (branch == RankBranch::low) {
    PackedSymMatrix g(r);
    for (std::size_t i = 0; i < r; ++i) {
      const double* ki = nr ? &p.upper(i, r) : nullptr;
      for (std::size_t j = i; j < r; ++j) {
        const double* kj = nr ? &p.upper(j, r) : nullptr;
        double acc = i == j ? 1.0 : 0.0;
        for (std::size_t c = 0; c < nr; ++c) acc += ki[c] * kj[c];
        g.upper(i, j) = acc;
      }
    }
    cholesky_factor(g);
    return g;
  }
  PackedSymMatrix g = PackedSymMatrix::identity(nr);
  for (std::size_t i = 0; i < r && nr > 0; ++i) {
    const double* ki = &p.upper(i, r);
    for (std::size_t a = 0; a < nr; ++a) {
      const double ka = ki[a];
      if (ka == 0.0) continue;
      double* row = &g.upper(a, a);
      for (std::size_t b = a; b < nr; ++b) row[b - a] += ka * ki[b];
    }
  }
  cholesky_factor(g);
  return g;
}

// out1 (+)= sign * K v2 over the leading r entries.
void add_k_times(const NullAugmentedFactorization& f, std::span<const double> v2,
                 std::span<double> out1, double sign) {
  const auto& p = f.factors().packed;
  const std::size_t r = f.rank(), nr = f.nullity();
  if (nr == 0) return;
  for (std::size_t i = 0; i < r; ++i) {
    const double* ki = &p.upper(i, r);
    double acc = 0.0;
    for (std::size_t c = 0; c < nr; ++c) acc += ki[c] * v2[c];
    out1[i] += sign * acc;
  }
}

// out2 = K^t v1.
void k_transpose_times(const NullAugmentedFactorization& f, std::span<const double> v1,
                       std::span<double> out2) {
  const auto& p = f.factors().packed;
  const std::size_t r = f.rank(), nr = f.nullity();
  std::fill(out2.begin(), out2.end(), 0.0);
  if (nr == 0) return;
  for (std::size_t i = 0; i < r; ++i) {
    const double vi = v1[i];
    if (vi == 0.0) continue;
    const double* ki = &p.upper(i, r);
    for (std::size_t c = 0; c < nr; ++c) out2[c] += ki[c] * vi;
  }
}

// v <- L11^-1 v (unit lower, stored transposed above the diagonal).
void solve_l11(const PackedSymMatrix& p, std::size_t r, std::span<double> v) {
  for (std::size_t m = 0; m < r; ++m) {
    const double vm = v[m];
    if (vm == 0.0) continue;
    const double* row = &p.upper(m, m);
    for (std::size_t i = m + 1; i < r; ++i) v[i] -= row[i - m] * vm;
  }
}

// v <- (L11^t)^-1 v.
void solve_l11t(const PackedSymMatrix& p, std::size_t r, std::span<double> v) {
  for (std::size_t i = r; i-- > 0;) {
    const double* row = &p.upper(i, i);
    double acc = v[i];
    for (std::size_t m = i + 1; m < r; ++m) acc -= row[m - i] * v[m];
    v[i] = acc;
  }
}

}  // namespace

DenseVector apply_Mt(const RotatedFactorization& f, std::span<const double> v) {
  check_length(v.size(), f.n, "apply_Mt");
  const std::size_t n = f.n;
  DenseVector y(v.begin(), v.end());
  for (std::size_t k = 0; k < n; ++k) {
    std::swap(y[k], y[f.piv[2 * k]]);
    if (k + 1 < n) {
      std::swap(y[k + 1], y[f.piv[2 * k + 1]]);
      if (f.tan[k] != 0.0) {
        double c, s;
        rotation_cs(f.tan[k], c, s);
        const double a = y[k], b = y[k + 1];
        y[k] = c * a - s * b;
        y[k + 1] = s * a + c * b;
      }
    }
  }
  return y;
}

DenseVector apply_M(const RotatedFactorization& f, std::span<const double> v) {
  check_length(v.size(), f.n, "apply_M");
  const std::size_t n = f.n;
  DenseVector y(v.begin(), v.end());
  for (std::size_t k = n; k-- > 0;) {
    if (k + 1 < n) {
      if (f.tan[k] != 0.0) {
        double c, s;
        rotation_cs(f.tan[k], c, s);
        const double a = y[k], b = y[k + 1];
        y[k] = c * a + s * b;
        y[k + 1] = c * b - s * a;
      }
      std::swap(y[k + 1], y[f.piv[2 * k + 1]]);
    }
    std::swap(y[k], y[f.piv[2 * k]]);
  }
  return y;
}

std::vector<double> NullAugmentedFactorization::null_basis() const {
  const std::size_t n = size(), r = rank(), nr = nullity();
  std::vector<double> basis(n * nr, 0.0);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < nr; ++j) basis[i * nr + j] = -k(i, j);
  for (std::size_t j = 0; j < nr; ++j) basis[(r + j) * nr + j] = 1.0;
  return basis;
}

NullAugmentedFactorization compute_null_basis(RotatedFactorization f) {
  const std::size_t n = f.n, r = f.rank;
  auto& p = f.packed;
  if (r < n && r > 0) {
    const std::size_t nr = n - r;
    // Row-oriented back substitution: row i of K = row i of L21^t minus
    // sum over m > i of L11^t_im * row m of K.
    for (std::size_t i = r - 1; i-- > 0;) {
      double* ki = &p.upper(i, r);
      const double* lrow = &p.upper(i, i);
      for (std::size_t m = i + 1; m < r; ++m) {
        const double lim = lrow[m - i];
        if (lim == 0.0) continue;
        const double* km = &p.upper(m, r);
        for (std::size_t c = 0; c < nr; ++c) ki[c] -= lim * km[c];
      }
    }
  }
  return NullAugmentedFactorization(std::move(f));
}

DenseVector spd_solve(PackedSymMatrix g, std::span<const double> rhs) {
  check_length(rhs.size(), g.size(), "spd_solve");
  cholesky_factor(g);
  DenseVector y(rhs.begin(), rhs.end());
  cholesky_solve(g, y);
  return y;
}

SolveReport solve_min_norm_lsq(const NullAugmentedFactorization& f,
                               std::span<const double> b,
                               const SolveOptions& options) {
  const std::size_t n = f.size(), r = f.rank(), nr = f.nullity();
  check_length(b.size(), n, "solve_min_norm_lsq");

  SolveReport report;
  report.rank = r;
  report.branch = options.force_branch.value_or(2 * r <= n ? RankBranch::low
                                                           : RankBranch::high);
  if (r == 0) {
    report.x.assign(n, 0.0);
    report.residual_norm = norm2(b);
    return report;
  }

  const auto& p = f.factors().packed;
  DenseVector w = apply_Mt(f.factors(), b);
  std::span<double> w1(w.data(), r), w2(w.data() + r, nr);

  const PackedSymMatrix g = reduced_system(f, report.branch);
  DenseVector scratch(nr);

  // Least-squares part: w1 <- z1.
  if (report.branch == RankBranch::low) {
    add_k_times(f, w2, w1, 1.0);  // c1 - N1 c2
    cholesky_solve(g, w1);        // L11 z1
  } else if (nr > 0) {
    k_transpose_times(f, w1, scratch);
    for (std::size_t j = 0; j < nr; ++j) w2[j] = scratch[j] - w2[j];
    cholesky_solve(g, w2);        // alpha
    add_k_times(f, w2, w1, -1.0);  // u1 = c1 + N1 alpha
  }
  solve_l11(p, r, w1);

  // Minimum-norm part.
  for (std::size_t i = 0; i < r; ++i) w1[i] /= p.upper(i, i);
  solve_l11t(p, r, w1);
  if (report.branch == RankBranch::low) {
    cholesky_solve(g, w1);  // w_min1
    k_transpose_times(f, w1, w2);
  } else if (nr > 0) {
    k_transpose_times(f, w1, w2);
    cholesky_solve(g, w2);  // beta
    add_k_times(f, w2, w1, -1.0);
  }

  report.x = apply_M(f.factors(), w);
  const DenseVector ax = apply_factored(f, report.x);
  DenseVector res(n);
  for (std::size_t i = 0; i < n; ++i) res[i] = b[i] - ax[i];
  report.residual_norm = norm2(res);
  return report;
}

DenseVector apply_factored(const NullAugmentedFactorization& f,
                           std::span<const double> x) {
  const std::size_t n = f.size(), r = f.rank(), nr = f.nullity();
  check_length(x.size(), n, "apply_factored");
  const auto& p = f.factors().packed;

  DenseVector w = apply_Mt(f.factors(), x);
  std::span<double> w1(w.data(), r), w2(w.data() + r, nr);
  add_k_times(f, w2, w1, 1.0);
  // q = D11 L11^t (w1 + K w2)
  for (std::size_t i = 0; i < r; ++i) {
    const double* row = &p.upper(i, i);
    double acc = w1[i];
    for (std::size_t m = i + 1; m < r; ++m) acc += row[m - i] * w1[m];
    w1[i] = acc * row[0];
  }
  // y1 = L11 q, y2 = L21 q = K^t y1
  for (std::size_t m = r; m-- > 0;) {
    const double qm = w1[m];
    if (qm == 0.0) continue;
    const double* row = &p.upper(m, m);
    for (std::size_t i = m + 1; i < r; ++i) w1[i] += row[i - m] * qm;
  }
  k_transpose_times(f, w1, w2);
  return apply_M(f.factors(), w);
}

}  // namespace rotrook
