#include "rotrook/rotfact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#ifdef __SSE2__
#include <emmintrin.h>
#endif

namespace rotrook {

RotatedFactorization RotatedFactorization::start(PackedSymMatrix a,
                                                 double tolerance) {
  RotatedFactorization f;
  f.n = a.size();
  f.rank = 0;
  f.tolerance = tolerance;
  f.packed = std::move(a);
  f.piv.resize(2 * f.n);
  for (std::size_t k = 0; k < f.n; ++k) {
    f.piv[2 * k] = k;
    f.piv[2 * k + 1] = k + 1 < f.n ? k + 1 : k;
  }
  f.tan.assign(f.n, 0.0);
  return f;
}

double RotatedFactorization::l(std::size_t i, std::size_t j) const noexcept {
  if (i == j) return 1.0;
  if (i < j) return 0.0;
  return packed.upper(j, i);
}

double default_tolerance(const PackedSymMatrix& a) noexcept {
  constexpr double unit_roundoff = std::numeric_limits<double>::epsilon() / 2;
  return static_cast<double>(a.size()) * unit_roundoff * a.max_abs();
}

// ---------------------------------------------------------------------------
// Pivot search

namespace {

struct SearchState {
  double max = 0.0;
  std::size_t rmax = 0, cmax = 0;
  bool walk = false;  // last improvement was off-diagonal
};

// Scans row `row` of the active block [k, n), both triangles.
void scan_row(const PackedSymMatrix& a, std::size_t row, std::size_t k,
              SearchState& st) {
  const std::size_t n = a.size();
  for (std::size_t j = k; j < n; ++j) {
    const double v = std::abs(a.at_sym(row, j));
    if (v > st.max) {
      st.max = v;
      st.rmax = row;
      st.cmax = j;
      st.walk = (row != j);
    }
  }
}

}  // namespace

PivotChoice rook_pivot_search(const PackedSymMatrix& a, std::size_t k,
                              double tolerance) {
  const std::size_t n = a.size();
  if (k >= n) throw UsageError("rook_pivot_search: step out of range");

  SearchState st;
  PivotChoice out;

  // Full pivoting over the upper triangle until a row with a significant
  // entry turns up. Earlier rows are all below tolerance, so the upper part
  // of the stopping row is effectively the whole row.
  std::size_t row = k;
  for (; row < n; ++row) {
    for (std::size_t j = row; j < n; ++j) {
      const double v = std::abs(a.upper(row, j));
      if (v > st.max) {
        st.max = v;
        st.rmax = row;
        st.cmax = j;
        st.walk = (row != j);
      }
    }
    if (st.max > tolerance) break;
  }
  if (st.max <= tolerance) {
    out.max = st.max;
    out.deficient = true;
    return out;
  }

  std::optional<std::size_t> previous;
  if (!st.walk) {
    if (st.rmax > k) {
      previous = st.rmax - 1;
    } else if (k + 1 < n) {
      // Diagonal pivot in the first active row: the partner row k+1 must not
      // hold anything larger.
      previous = k + 1;
      scan_row(a, k + 1, k, st);
      row = k + 1;
      if (!st.walk && st.rmax == k + 1) previous = k;
    }
  }

  while (st.walk) {
    st.walk = false;
    const std::size_t before = row;
    row = st.cmax;
    const std::size_t r0 = st.rmax, c0 = st.cmax;
    scan_row(a, row, k, st);
    if (st.rmax == r0 && st.cmax == c0) break;  // rook-complete
    if (!st.walk) previous = before;           // diagonal winner
  }

  out.max = st.max;
  out.rmax = st.rmax;
  out.cmax = st.cmax;
  if (st.rmax == st.cmax) out.previous = previous;
  return out;
}

// ---------------------------------------------------------------------------
// Permutations and rotations

void sym_swap(PackedSymMatrix& a, std::size_t p, std::size_t q) noexcept {
  if (p == q) return;
  if (p > q) std::swap(p, q);
  const std::size_t n = a.size();
  std::swap(a.upper(p, p), a.upper(q, q));
  for (std::size_t i = 0; i < p; ++i) std::swap(a.upper(i, p), a.upper(i, q));
  for (std::size_t i = p + 1; i < q; ++i)
    std::swap(a.upper(p, i), a.upper(i, q));
  for (std::size_t i = q + 1; i < n; ++i)
    std::swap(a.upper(p, i), a.upper(q, i));
}

void place_pivot(RotatedFactorization& f, std::size_t k,
                 const PivotChoice& choice) {
  if (choice.deficient) throw UsageError("place_pivot: deficient pivot choice");
  auto& a = f.packed;
  const std::size_t n = f.n;

  std::size_t first = choice.rmax;
  std::optional<std::size_t> second;
  if (choice.rmax != choice.cmax) {
    std::size_t i = std::min(choice.rmax, choice.cmax);
    std::size_t j = std::max(choice.rmax, choice.cmax);
    if (std::abs(a.upper(j, j)) > std::abs(a.upper(i, i))) std::swap(i, j);
    first = i;
    second = j;
  } else if (k + 1 < n) {
    second = choice.previous;
  }

  sym_swap(a, k, first);
  f.piv[2 * k] = first;
  f.piv[2 * k + 1] = k + 1 < n ? k + 1 : k;
  if (second && k + 1 < n) {
    // The element that sat at k now lives where `first` was.
    const std::size_t target = *second == k ? first : *second;
    sym_swap(a, k + 1, target);
    f.piv[2 * k + 1] = target;
  }
}

void rotation_cs(double t, double& c, double& s) noexcept {
  if (std::abs(t) <= 1.0) {
    c = 1.0 / std::sqrt(1.0 + t * t);
    s = t * c;
  } else {
    const double r = 1.0 / t;
    const double h = std::sqrt(1.0 + r * r);
    s = std::copysign(1.0 / h, t);
    c = std::abs(r) / h;
  }
}

JacobiRotation compute_rotation(double a11, double a12, double a22) noexcept {
  JacobiRotation rot;
  if (a12 == 0.0) {
    rot.b11 = a11;
    rot.b22 = a22;
    return rot;
  }
  // Smaller root of t^2 + 2 tau t - 1 = 0; the other root is -1/t and swaps
  // the two eigenvalues.
  const double tau = (a22 - a11) / (2.0 * a12);
  double t;
  if (std::abs(tau) > 1e150) {
    t = 0.5 / tau;
  } else {
    t = std::copysign(1.0, tau) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  }
  double e1 = a11 - t * a12;
  double e2 = a22 + t * a12;
  const double m1 = std::abs(e1), m2 = std::abs(e2);
  if (m2 > m1 || (m2 == m1 && e2 > e1)) {
    t = -1.0 / t;
    std::swap(e1, e2);
  }
  rot.t = t;
  rotation_cs(t, rot.c, rot.s);
  rot.b11 = e1;
  rot.b22 = e2;
  return rot;
}

void apply_rotation(RotatedFactorization& f, std::size_t k,
                    const JacobiRotation& rot, GrowthTrace* trace) {
  const std::size_t n = f.n;
  if (k + 1 >= n) throw UsageError("apply_rotation: no partner row");
  f.tan[k] = rot.t;
  if (rot.t == 0.0) return;

  auto& a = f.packed;
  const double c = rot.c, s = rot.s;
  // Rows above k hold L^t; rotating their columns k, k+1 rotates rows k, k+1
  // of L.
  for (std::size_t i = 0; i < k; ++i) {
    double& x = a.upper(i, k);
    double& y = a.upper(i, k + 1);
    const double xv = x, yv = y;
    x = c * xv - s * yv;
    y = s * xv + c * yv;
  }
  double local = 0.0;
  double* rk = &a.upper(k, k + 2 < n ? k + 2 : k);
  double* rk1 = &a.upper(k + 1, k + 2 < n ? k + 2 : k + 1);
  for (std::size_t j = k + 2; j < n; ++j) {
    const double xv = *rk, yv = *rk1;
    const double nx = c * xv - s * yv;
    const double ny = s * xv + c * yv;
    *rk++ = nx;
    *rk1++ = ny;
    local = std::max(local, std::max(std::abs(nx), std::abs(ny)));
  }
  a.upper(k, k) = rot.b11;
  a.upper(k, k + 1) = 0.0;
  a.upper(k + 1, k + 1) = rot.b22;
  if (trace) {
    trace->observe(local);
    trace->observe(std::abs(rot.b11));
    trace->observe(std::abs(rot.b22));
  }
}

namespace {

// row[j] -= li * w[j] for j < len; returns max |row[j]| after the update.
double axpy_max(double* row, const double* w, double li, std::size_t len) noexcept {
  std::size_t j = 0;
  double m = 0.0;
#ifdef __SSE2__
  const __m128d sign = _mm_set1_pd(-0.0);
  const __m128d vl = _mm_set1_pd(li);
  __m128d m0 = _mm_setzero_pd(), m1 = _mm_setzero_pd();
  for (; j + 4 <= len; j += 4) {
    const __m128d r0 = _mm_sub_pd(_mm_loadu_pd(row + j), _mm_mul_pd(vl, _mm_loadu_pd(w + j)));
    const __m128d r1 =
        _mm_sub_pd(_mm_loadu_pd(row + j + 2), _mm_mul_pd(vl, _mm_loadu_pd(w + j + 2)));
    _mm_storeu_pd(row + j, r0);
    _mm_storeu_pd(row + j + 2, r1);
    m0 = _mm_max_pd(m0, _mm_andnot_pd(sign, r0));
    m1 = _mm_max_pd(m1, _mm_andnot_pd(sign, r1));
  }
  alignas(16) double lanes[2];
  _mm_store_pd(lanes, _mm_max_pd(m0, m1));
  m = std::max(lanes[0], lanes[1]);
#endif
  for (; j < len; ++j) {
    row[j] -= li * w[j];
    m = std::max(m, std::abs(row[j]));
  }
  return m;
}

double max_abs(const double* p, std::size_t len) noexcept {
  double m = 0.0;
  for (std::size_t j = 0; j < len; ++j) m = std::max(m, std::abs(p[j]));
  return m;
}

}  // namespace

void eliminate_step(RotatedFactorization& f, std::size_t k, GrowthTrace* trace) {
  auto& a = f.packed;
  const std::size_t n = f.n;
  const double d = a.upper(k, k);
  if (d == 0.0) throw NumericalError("eliminate_step: zero pivot");
  if (k + 1 == n) return;

  double* w = &a.upper(k, k + 1);  // pivot row, becomes the multipliers
  const std::size_t m = n - k - 1;
  double local = 0.0;
  for (std::size_t ii = 0; ii < m; ++ii) {
    const double wi = w[ii];
    if (wi == 0.0) {
      if (trace) {
        local = std::max(local, max_abs(&a.upper(k + 1 + ii, k + 1 + ii), m - ii));
      }
      continue;
    }
    const double li = wi / d;
    double* row = &a.upper(k + 1 + ii, k + 1 + ii);
    if (trace) {
      local = std::max(local, axpy_max(row, w + ii, li, m - ii));
    } else {
      for (std::size_t jj = ii; jj < m; ++jj) row[jj - ii] -= li * w[jj];
    }
  }
  for (std::size_t ii = 0; ii < m; ++ii) w[ii] /= d;
  if (trace) trace->observe(local);
}

FactorizeResult factorize(PackedSymMatrix a, double tolerance) {
  if (a.size() == 0) throw UsageError("factorize: empty matrix");
  if (!a.all_finite()) throw UsageError("factorize: non-finite matrix entry");
  if (tolerance < 0.0) tolerance = default_tolerance(a);

  FactorizeResult out;
  out.growth.max_initial = a.max_abs();
  out.growth.max_intermediate = out.growth.max_initial;

  auto& f = out.factors;
  f = RotatedFactorization::start(std::move(a), tolerance);
  const std::size_t n = f.n;

  std::size_t k = 0;
  for (; k < n; ++k) {
    const PivotChoice choice = rook_pivot_search(f.packed, k, tolerance);
    if (choice.deficient) break;
    place_pivot(f, k, choice);
    if (k + 1 < n && f.packed.upper(k, k + 1) != 0.0) {
      const JacobiRotation rot =
          compute_rotation(f.packed.upper(k, k), f.packed.upper(k, k + 1),
                           f.packed.upper(k + 1, k + 1));
      apply_rotation(f, k, rot, &out.growth);
    }
    eliminate_step(f, k, &out.growth);
  }
  f.rank = k;
  // Drop the remnant below the detected rank.
  for (std::size_t i = k; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) f.packed.upper(i, j) = 0.0;

  out.growth.finish();
  return out;
}

// ---------------------------------------------------------------------------
// Reconstruction

PackedSymMatrix ldlt_product(const RotatedFactorization& f) {
  const std::size_t n = f.n, r = f.rank;
  const auto& a = f.packed;
  PackedSymMatrix s(n);
  // S = sum_m d_m l_m l_m^t over the rank-r columns of L.
  std::vector<double> col(n);
  for (std::size_t m = 0; m < r; ++m) {
    const double d = a.upper(m, m);
    col[m] = 1.0;
    for (std::size_t i = m + 1; i < n; ++i) col[i] = a.upper(m, i);
    for (std::size_t i = m; i < n; ++i) {
      const double di = d * col[i];
      if (di == 0.0) continue;
      double* row = &s.upper(i, i);
      for (std::size_t j = i; j < n; ++j) row[j - i] += di * col[j];
    }
  }
  return s;
}

namespace {

// S <- G S G^t with G = [[c, s], [-s, c]] on indices k, k+1.
void rotate_back(PackedSymMatrix& a, std::size_t k, double c, double s) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i == k || i == k + 1) continue;
    const double x = a.at_sym(i, k), y = a.at_sym(i, k + 1);
    const double nx = c * x + s * y;
    const double ny = -s * x + c * y;
    (i < k ? a.upper(i, k) : a.upper(k, i)) = nx;
    (i < k + 1 ? a.upper(i, k + 1) : a.upper(k + 1, i)) = ny;
  }
  const double a11 = a.upper(k, k), a12 = a.upper(k, k + 1),
               a22 = a.upper(k + 1, k + 1);
  a.upper(k, k) = c * c * a11 + 2.0 * c * s * a12 + s * s * a22;
  a.upper(k + 1, k + 1) = s * s * a11 - 2.0 * c * s * a12 + c * c * a22;
  a.upper(k, k + 1) = (c * c - s * s) * a12 + c * s * (a22 - a11);
}

}  // namespace

PackedSymMatrix reconstruct(const RotatedFactorization& f) {
  PackedSymMatrix s = ldlt_product(f);
  const std::size_t n = f.n;
  for (std::size_t k = n; k-- > 0;) {
    if (k + 1 < n && f.tan[k] != 0.0) {
      double c, sn;
      rotation_cs(f.tan[k], c, sn);
      rotate_back(s, k, c, sn);
    }
    if (k + 1 < n) sym_swap(s, k + 1, f.piv[2 * k + 1]);
    sym_swap(s, k, f.piv[2 * k]);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Growth bounds

double growth_bound_analytic(std::size_t n) {
  if (n == 0) throw UsageError("growth_bound_analytic: n must be positive");
  const double dn = static_cast<double>(n);
  return 2.8 * std::pow(dn, 3.0 * std::log(dn) / 4.0);
}

double growth_bound_root(std::size_t k) {
  if (k < 2) throw UsageError("growth_bound_root: k must be at least 2");
  const double dk = static_cast<double>(k);
  const double rhs = 0.5 * dk * std::log(dk) - 0.5 * (dk - 1.0) * std::log(dk - 1.0);
  // g(s) = ln s + (k-1) ln(1+2s) - rhs is strictly increasing on s > 0.
  auto g = [&](double s) { return std::log(s) + (dk - 1.0) * std::log1p(2.0 * s) - rhs; };
  double lo = 1e-300, hi = 1.0;
  while (g(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 2000 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = lo > 0.0 && hi / lo > 4.0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double growth_bound_tight(std::size_t n) {
  if (n == 0) throw UsageError("growth_bound_tight: n must be positive");
  double log_rho = 0.0;  // s_1 = 1
  for (std::size_t k = 2; k <= n; ++k) log_rho += std::log1p(2.0 * growth_bound_root(k));
  return std::exp(log_rho);
}

}  // namespace rotrook
