#include "rotrook/matgen.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rotrook/xprec.hpp"

namespace rotrook {

std::pair<double, double> box_muller(double u1, double u2) noexcept {
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

double Rng::gaussian() {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  double u1 = uniform01();
  while (u1 == 0.0) u1 = uniform01();
  const double u2 = uniform01();
  const auto [z0, z1] = box_muller(u1, u2);
  spare_ = z1;
  return z0;
}

double Rng::gaussian_unit() {
  for (;;) {
    const double z = gaussian();
    if (std::abs(z) <= 1.0) return z;
  }
}

PackedSymMatrix uniform_sym(Rng& rng, std::size_t n) {
  if (n == 0) throw UsageError("uniform_sym: n must be positive");
  PackedSymMatrix a(n);
  for (double& v : a.data()) v = rng.uniform_pm1();
  return a;
}

DenseVector uniform_vector(Rng& rng, std::size_t n) {
  DenseVector v(n);
  for (double& x : v) x = rng.uniform_pm1();
  return v;
}

DenseMatrix stewart_orthogonal(Rng& rng, std::size_t n) {
  if (n == 0) throw UsageError("stewart_orthogonal: n must be positive");
  DenseMatrix h{n, std::vector<double>(n * n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) h(i, i) = 1.0;
  std::vector<double> signs(n), x(n), hx(n);

  for (std::size_t k = 0; k + 1 < n; ++k) {
    const std::size_t m = n - k;
    double norm2sq = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      x[i] = rng.gaussian();
      norm2sq += x[i] * x[i];
    }
    const double x0 = x[0];
    signs[k] = x0 != 0.0 ? std::copysign(1.0, x0) : 1.0;
    x[0] += signs[k] * std::sqrt(norm2sq);
    // Scale so the reflector is I - x x^t.
    const double scale = std::sqrt((norm2sq - x0 * x0 + x[0] * x[0]) / 2.0);
    for (std::size_t i = 0; i < m; ++i) x[i] /= scale;
    // H[:, k:] -= (H[:, k:] x) x^t
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) acc += h(i, k + j) * x[j];
      hx[i] = acc;
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) h(i, k + j) -= hx[i] * x[j];
  }
  // H is the Q of a Householder QR of a Gaussian matrix whose R has diagonal
  // -sign * norm; flipping columns to make that diagonal positive gives the
  // Haar distribution. The last diagonal entry carries a free random sign.
  for (std::size_t k = 0; k + 1 < n; ++k) signs[k] = -signs[k];
  signs[n - 1] = rng.sign();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) *= signs[j];
  return h;
}

namespace {

// A = U diag(d) U^t, b = U z, x = U (pinv(d) z), all accumulated in
// double-double and rounded once.
GeneratedProblem assemble_spectral(const DenseMatrix& u, const DenseVector& d,
                                   const DenseVector& z) {
  const std::size_t n = u.n;
  GeneratedProblem p;
  p.a = PackedSymMatrix(n);
  p.b.assign(n, 0.0);
  p.x_exact.assign(n, 0.0);

  // V = U diag(d), kept exactly as hi/lo pairs.
  std::vector<XScalar> v(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t m = 0; m < n; ++m) {
      double hi, lo;
      two_prod(u(i, m), d[m], hi, lo);
      v[i * n + m] = XScalar::from_pair(hi, lo);
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      XScalar acc;
      for (std::size_t m = 0; m < n; ++m) {
        if (d[m] == 0.0) continue;
        acc += v[i * n + m] * XScalar(u(j, m));
      }
      p.a.upper(i, j) = acc.to_double();
    }

  std::vector<XScalar> w(n);
  for (std::size_t m = 0; m < n; ++m)
    w[m] = d[m] != 0.0 ? XScalar(z[m]) / XScalar(d[m]) : XScalar(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    XScalar bi, xi;
    for (std::size_t m = 0; m < n; ++m) {
      bi = x_fma(u(i, m), z[m], bi);
      xi += XScalar(u(i, m)) * w[m];
    }
    p.b[i] = bi.to_double();
    p.x_exact[i] = xi.to_double();
  }
  p.eigenvalues = d;
  return p;
}

}  // namespace

GeneratedProblem spectral_conditioned(Rng& rng, std::size_t n, double cond) {
  if (n == 0) throw UsageError("spectral_conditioned: n must be positive");
  if (!(cond >= 1.0) || !std::isfinite(cond))
    throw UsageError("spectral_conditioned: condition number must be >= 1");

  const DenseMatrix u = stewart_orthogonal(rng, n);
  DenseVector d(n);
  const double lo = 1.0 / cond;
  for (std::size_t i = 0; i < n; ++i) {
    double mag;
    if (i == 0 || n == 1) {
      mag = 1.0;
    } else if (i == 1) {
      mag = lo;
    } else {
      mag = lo + (1.0 - lo) * rng.uniform01();
    }
    d[i] = rng.sign() * mag;
  }
  DenseVector z(n);
  for (double& v : z) v = rng.gaussian_unit();

  GeneratedProblem p = assemble_spectral(u, d, z);
  p.rank = n;
  p.cond = n == 1 ? 1.0 : cond;
  return p;
}

GeneratedProblem spectral_rank_deficient(Rng& rng, std::size_t n, std::size_t r) {
  if (n == 0) throw UsageError("spectral_rank_deficient: n must be positive");
  if (r > n) {
    throw UsageError("spectral_rank_deficient: rank " + std::to_string(r) +
                     " exceeds n=" + std::to_string(n));
  }
  const DenseMatrix u = stewart_orthogonal(rng, n);
  DenseVector d(n, 0.0);
  double dmin = 0.0, dmax = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    double v = 0.0;
    while (v == 0.0) v = rng.gaussian_unit();
    d[i] = v;
    const double a = std::abs(v);
    dmax = std::max(dmax, a);
    dmin = i == 0 ? a : std::min(dmin, a);
  }
  DenseVector z(n);
  for (double& v : z) v = rng.gaussian_unit();

  GeneratedProblem p = assemble_spectral(u, d, z);
  p.rank = r;
  p.cond = r > 0 ? dmax / dmin : 1.0;
  return p;
}

GeneratedProblem uniform_problem(Rng& rng, std::size_t n) {
  GeneratedProblem p;
  p.a = uniform_sym(rng, n);
  p.x_exact = uniform_vector(rng, n);
  p.b = xp_matvec(p.a, p.x_exact);
  p.rank = n;
  return p;
}

}  // namespace rotrook
