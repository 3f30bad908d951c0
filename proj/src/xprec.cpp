#include "rotrook/xprec.hpp"

#include <string>
#include <utility>
#include <vector>

#include "rotrook/bunch_kaufman.hpp"
#include "rotrook/rotfact.hpp"

namespace rotrook {

XScalar x_sqrt(XScalar a) noexcept {
  if (a.hi() <= 0.0) return XScalar(a.hi() == 0.0 ? 0.0 : std::sqrt(a.hi()));
  const double q = std::sqrt(a.hi());
  double p, e;
  two_prod(q, q, p, e);
  const XScalar r = a - XScalar::from_pair(p, e);
  return XScalar::from_pair(q, r.hi() / (2.0 * q));
}

DenseVector xp_matvec(const PackedSymMatrix& a, std::span<const double> x) {
  const std::size_t n = a.size();
  if (x.size() != n) {
    throw UsageError("xp_matvec: vector length " + std::to_string(x.size()) +
                     " does not match n=" + std::to_string(n));
  }
  DenseVector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    XScalar acc;
    for (std::size_t j = 0; j < n; ++j) acc = x_fma(a.at_sym(i, j), x[j], acc);
    y[i] = acc.to_double();
  }
  return y;
}

namespace {

// Packed symmetric storage of double-double entries.
class XPacked {
public:
  explicit XPacked(std::size_t n) : n_(n), data_(n * (n + 1) / 2) {}
  std::size_t size() const noexcept { return n_; }
  XScalar& upper(std::size_t i, std::size_t j) noexcept {
    return data_[packed_offset(i, j, n_)];
  }
  XScalar& at_sym(std::size_t i, std::size_t j) noexcept {
    return i <= j ? upper(i, j) : upper(j, i);
  }

  void swap(std::size_t p, std::size_t q) noexcept {
    if (p == q) return;
    if (p > q) std::swap(p, q);
    std::swap(upper(p, p), upper(q, q));
    for (std::size_t i = 0; i < p; ++i) std::swap(upper(i, p), upper(i, q));
    for (std::size_t i = p + 1; i < q; ++i) std::swap(upper(p, i), upper(i, q));
    for (std::size_t i = q + 1; i < n_; ++i) std::swap(upper(p, i), upper(q, i));
  }

  // S <- G S G^t with G = [[c, s], [-s, c]] on indices k, k+1.
  void rotate(std::size_t k, XScalar c, XScalar s) noexcept {
    for (std::size_t i = 0; i < n_; ++i) {
      if (i == k || i == k + 1) continue;
      XScalar& x = at_sym(i, k);
      XScalar& y = at_sym(i, k + 1);
      const XScalar nx = c * x + s * y;
      const XScalar ny = c * y - s * x;
      x = nx;
      y = ny;
    }
    const XScalar a11 = upper(k, k), a12 = upper(k, k + 1), a22 = upper(k + 1, k + 1);
    const XScalar cc = c * c, ss = s * s, cs = c * s;
    const XScalar two_cs_a12 = XScalar(2.0) * cs * a12;
    upper(k, k) = cc * a11 + two_cs_a12 + ss * a22;
    upper(k + 1, k + 1) = ss * a11 - two_cs_a12 + cc * a22;
    upper(k, k + 1) = (cc - ss) * a12 + cs * (a22 - a11);
  }

  // sum_m u_m v_m^t + v_m u_m^t style accumulation helper: S_ij += x_i * y_j
  void add_outer(std::size_t from, std::span<const XScalar> x,
                 std::span<const double> y) noexcept {
    for (std::size_t i = from; i < n_; ++i) {
      const XScalar xi = x[i];
      if (xi.hi() == 0.0) continue;
      XScalar* row = &upper(i, i);
      for (std::size_t j = i; j < n_; ++j) {
        if (y[j] == 0.0) continue;
        row[j - i] += xi * XScalar(y[j]);
      }
    }
  }

  double frobenius_diff(const PackedSymMatrix& a) noexcept {
    double diag = 0.0, off = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i; j < n_; ++j) {
        const double e = (XScalar(a.upper(i, j)) - upper(i, j)).to_double();
        (i == j ? diag : off) += e * e;
      }
    return std::sqrt(diag + 2.0 * off);
  }

private:
  std::size_t n_;
  std::vector<XScalar> data_;
};

void check_dims(const PackedSymMatrix& a, std::size_t n) {
  if (a.size() != n) {
    throw UsageError("xp_reconstruct_error: dimension mismatch (" +
                     std::to_string(a.size()) + " vs " + std::to_string(n) + ")");
  }
}

}  // namespace

double xp_reconstruct_error(const PackedSymMatrix& a, const RotatedFactorization& f) {
  check_dims(a, f.n);
  const std::size_t n = f.n;
  const auto& p = f.packed;
  XPacked s(n);

  std::vector<double> col(n, 0.0);
  std::vector<XScalar> scaled(n);
  for (std::size_t m = 0; m < f.rank; ++m) {
    const double d = p.upper(m, m);
    col[m] = 1.0;
    for (std::size_t i = m + 1; i < n; ++i) col[i] = p.upper(m, i);
    for (std::size_t i = m; i < n; ++i) {
      double hi, lo;
      two_prod(d, col[i], hi, lo);
      scaled[i] = XScalar::from_pair(hi, lo);
    }
    s.add_outer(m, scaled, col);
    col[m] = 0.0;
  }

  for (std::size_t k = n; k-- > 0;) {
    if (k + 1 < n && f.tan[k] != 0.0) {
      const XScalar t(f.tan[k]);
      const XScalar c = XScalar(1.0) / x_sqrt(XScalar(1.0) + t * t);
      s.rotate(k, c, t * c);
    }
    if (k + 1 < n) s.swap(k + 1, f.piv[2 * k + 1]);
    s.swap(k, f.piv[2 * k]);
  }
  return s.frobenius_diff(a);
}

double xp_reconstruct_error(const PackedSymMatrix& a, const BkFactorization& f) {
  check_dims(a, f.n);
  const std::size_t n = f.n;
  const auto& p = f.packed;
  XPacked s(n);

  std::vector<double> c0(n, 0.0), c1(n, 0.0);
  std::vector<XScalar> u(n), v(n);
  for (std::size_t k = 0; k < n;) {
    std::fill(c0.begin(), c0.end(), 0.0);
    std::fill(c1.begin(), c1.end(), 0.0);
    if (f.block_2x2(k)) {
      const XScalar e11(p.upper(k, k)), e12(p.upper(k, k + 1)), e22(p.upper(k + 1, k + 1));
      c0[k] = 1.0;
      c1[k + 1] = 1.0;
      for (std::size_t i = k + 2; i < n; ++i) {
        c0[i] = p.upper(k, i);
        c1[i] = p.upper(k + 1, i);
      }
      for (std::size_t i = k; i < n; ++i) {
        u[i] = e11 * XScalar(c0[i]) + e12 * XScalar(c1[i]);
        v[i] = e12 * XScalar(c0[i]) + e22 * XScalar(c1[i]);
      }
      s.add_outer(k, u, c0);
      s.add_outer(k, v, c1);
      k += 2;
    } else {
      const double d = p.upper(k, k);
      c0[k] = 1.0;
      for (std::size_t i = k + 1; i < n; ++i) c0[i] = p.upper(k, i);
      for (std::size_t i = k; i < n; ++i) {
        double hi, lo;
        two_prod(d, c0[i], hi, lo);
        u[i] = XScalar::from_pair(hi, lo);
      }
      s.add_outer(k, u, c0);
      k += 1;
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    s.swap(k, f.swap_target(k));
    if (f.block_2x2(k)) --k;
  }
  return s.frobenius_diff(a);
}

}  // namespace rotrook
