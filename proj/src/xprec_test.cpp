#include "rotrook/xprec.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rotrook/bunch_kaufman.hpp"
#include "rotrook/matgen.hpp"
#include "rotrook/rotfact.hpp"

namespace rotrook {
namespace {

// __float128 carries 113 significand bits, enough to check 106-bit results.
using quad = __float128;

quad q(XScalar x) { return static_cast<quad>(x.hi()) + static_cast<quad>(x.lo()); }

double rel(quad got, quad want) {
  const quad d = got - want;
  const quad m = want < 0 ? -want : want;
  return static_cast<double>((d < 0 ? -d : d) / m);
}

quad quad_sqrt(quad a) {
  quad r = std::sqrt(static_cast<double>(a));
  for (int i = 0; i < 3; ++i) r = 0.5 * (r + a / r);
  return r;
}

TEST(TwoSum, IsExact) {
  double s, e;
  two_sum(1.0, 0x1p-60, s, e);
  EXPECT_EQ(s, 1.0);
  EXPECT_EQ(e, 0x1p-60);
  two_prod(1.0 + 0x1p-52, 1.0 - 0x1p-52, s, e);
  EXPECT_EQ(s, 1.0);
  EXPECT_EQ(e, -0x1p-104);
}

TEST(XScalar, AddKeepsBothParts) {
  const XScalar r = x_add(XScalar(1.0), XScalar(0x1p-60));
  EXPECT_EQ(r.hi(), 1.0);
  EXPECT_EQ(r.lo(), 0x1p-60);
}

TEST(XScalar, MulCapturesTheTinyTerm) {
  const XScalar a = XScalar::from_pair(1.0, 0x1p-53);
  const XScalar r = x_mul(a, XScalar(1.0 - 0x1p-53));
  EXPECT_EQ(r.hi(), 1.0);
  EXPECT_EQ(r.lo(), -0x1p-106);
}

TEST(XScalar, AddNegationIsZero) {
  const XScalar a = XScalar::from_pair(3.0, 1e-20);
  const XScalar z = x_add(a, -a);
  EXPECT_EQ(z.hi(), 0.0);
  EXPECT_EQ(z.lo(), 0.0);
}

TEST(XScalar, RandomOperationsAgainstQuad) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> ex(-30, 30);
  auto draw = [&] {
    const double hi = std::ldexp(u(gen), ex(gen));
    return XScalar::from_pair(hi, hi * 0x1p-54 * u(gen));
  };
  double worst_add = 0, worst_mul = 0, worst_div = 0, worst_sqrt = 0, worst_fma = 0;
  for (int i = 0; i < 100000; ++i) {
    const XScalar a = draw(), b = draw();
    const quad qa = q(a), qb = q(b);
    if (qa + qb != 0) worst_add = std::max(worst_add, rel(q(a + b), qa + qb));
    worst_mul = std::max(worst_mul, rel(q(a * b), qa * qb));
    worst_div = std::max(worst_div, rel(q(a / b), qa / qb));
    const XScalar aa = a.hi() < 0 ? -a : a;
    worst_sqrt = std::max(worst_sqrt, rel(q(x_sqrt(aa)), quad_sqrt(q(aa))));
    const double x = u(gen), y = u(gen);
    const quad exact = static_cast<quad>(x) * y + qb;
    if (exact != 0) worst_fma = std::max(worst_fma, rel(q(x_fma(x, y, b)), exact));
  }
  // Sums and fma get a looser relative bound.
  EXPECT_LT(worst_mul, 0x1p-100);
  EXPECT_LT(worst_div, 0x1p-100);
  EXPECT_LT(worst_sqrt, 0x1p-100);
  EXPECT_LT(worst_add, 0x1p-90);
  EXPECT_LT(worst_fma, 0x1p-90);
}

TEST(XScalar, SqrtOfPerfectSquares) {
  EXPECT_EQ(x_sqrt(XScalar(4.0)).to_double(), 2.0);
  EXPECT_EQ(x_sqrt(XScalar(0.0)).to_double(), 0.0);
  const XScalar two = x_sqrt(XScalar(2.0));
  EXPECT_LT(rel(q(two * two), 2), 0x1p-102);
}

TEST(XpMatvec, Identity) {
  const DenseVector x{1.5, -2, 1e-300};
  EXPECT_EQ(xp_matvec(PackedSymMatrix::identity(3), x), x);
}

TEST(XpMatvec, CancellationBelowWorkingPrecision) {
  // (1 + 2^-52)^2 - (1 + 2^-51) = 2^-104, invisible in plain double.
  PackedSymMatrix a(2);
  a.set(0, 0, 1.0 + 0x1p-52);
  a.set(0, 1, -1.0);
  a.set(1, 1, 0.0);
  const DenseVector x{1.0 + 0x1p-52, 1.0 + 0x1p-51};
  EXPECT_EQ(xp_matvec(a, x)[0], 0x1p-104);
  EXPECT_EQ(sym_matvec(a, x)[0], 0.0);
}

TEST(XpMatvec, OppositeRowsCancel) {
  // x2 is the double closest above 1; row sums are +-2^-52 exactly.
  PackedSymMatrix a(2, {1, -1, 1});
  const DenseVector x{1.0, 1.0 + 0x1p-52};
  const DenseVector y = xp_matvec(a, x);
  EXPECT_EQ(y[0], -0x1p-52);
  EXPECT_EQ(y[1], 0x1p-52);
}

TEST(XpMatvec, AgreesWithWorkingPrecision) {
  Rng rng(3);
  const std::size_t n = 60;
  const PackedSymMatrix a = uniform_sym(rng, n);
  const DenseVector x = uniform_vector(rng, n);
  const DenseVector y = xp_matvec(a, x), z = sym_matvec(a, x);
  const double bound = n * 0x1p-53 * a.frobenius_norm() * norm2(x);
  for (std::size_t i = 0; i < n; ++i) EXPECT_LE(std::abs(y[i] - z[i]), bound);
  EXPECT_THROW(xp_matvec(a, DenseVector(3)), UsageError);
}

// Replays M L D L^t M^t in quad precision as an independent oracle.
double quad_reconstruct_error(const PackedSymMatrix& a, const RotatedFactorization& f) {
  const std::size_t n = f.n;
  std::vector<quad> s(n * n, 0);
  auto at = [&](std::size_t i, std::size_t j) -> quad& { return s[i * n + j]; };
  for (std::size_t m = 0; m < f.rank; ++m) {
    std::vector<quad> l(n, 0);
    l[m] = 1;
    for (std::size_t i = m + 1; i < n; ++i) l[i] = f.packed.upper(m, i);
    const quad d = f.packed.upper(m, m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) at(i, j) += l[i] * d * l[j];
  }
  auto swap_sym = [&](std::size_t p, std::size_t r) {
    if (p == r) return;
    for (std::size_t j = 0; j < n; ++j) std::swap(at(p, j), at(r, j));
    for (std::size_t i = 0; i < n; ++i) std::swap(at(i, p), at(i, r));
  };
  for (std::size_t k = n; k-- > 0;) {
    if (k + 1 < n && f.tan[k] != 0.0) {
      const quad t = f.tan[k];
      const quad c = 1 / quad_sqrt(1 + t * t), sn = t * c;
      // S <- G S G^t, G = [[c, s], [-s, c]]
      for (std::size_t j = 0; j < n; ++j) {
        const quad x = at(k, j), y = at(k + 1, j);
        at(k, j) = c * x + sn * y;
        at(k + 1, j) = -sn * x + c * y;
      }
      for (std::size_t i = 0; i < n; ++i) {
        const quad x = at(i, k), y = at(i, k + 1);
        at(i, k) = c * x + sn * y;
        at(i, k + 1) = -sn * x + c * y;
      }
    }
    if (k + 1 < n) swap_sym(k + 1, f.piv[2 * k + 1]);
    swap_sym(k, f.piv[2 * k]);
  }
  quad sum = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const quad e = static_cast<quad>(a.at_sym(i, j)) - at(i, j);
      sum += e * e;
    }
  return std::sqrt(static_cast<double>(sum));
}

TEST(XpReconstruct, ExactCases) {
  const auto id = PackedSymMatrix::identity(4);
  EXPECT_EQ(xp_reconstruct_error(id, factorize(id).factors), 0.0);
  EXPECT_EQ(xp_reconstruct_error(id, bk_factorize(id)), 0.0);
  const PackedSymMatrix ex(2, {0, 1, 0});
  EXPECT_LE(xp_reconstruct_error(ex, factorize(ex).factors), 1e-16);
  EXPECT_EQ(xp_reconstruct_error(ex, bk_factorize(ex)), 0.0);
}

TEST(XpReconstruct, MatchesQuadReplay) {
  Rng rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 5 + 4 * static_cast<std::size_t>(trial);
    const PackedSymMatrix a = uniform_sym(rng, n);
    const auto f = factorize(a).factors;
    const double xp = xp_reconstruct_error(a, f);
    const double oracle = quad_reconstruct_error(a, f);
    EXPECT_NEAR(xp, oracle, 1e-6 * oracle) << n;
    // The working-precision replay adds its own rounding on top.
    EXPECT_NEAR(frobenius_diff(reconstruct(f), a), xp, 10 * xp);
  }
}

TEST(XpReconstruct, BunchKaufmanAgreesWithDoubleReplay) {
  Rng rng(15);
  const PackedSymMatrix a = uniform_sym(rng, 40);
  const BkFactorization f = bk_factorize(a);
  const double xp = xp_reconstruct_error(a, f);
  EXPECT_GT(xp, 0.0);
  EXPECT_LT(xp, 1e-13);
  EXPECT_NEAR(frobenius_diff(bk_reconstruct(f), a), xp, 10 * xp);
}

TEST(XpReconstruct, DimensionMismatch) {
  const auto f = factorize(PackedSymMatrix::identity(3)).factors;
  EXPECT_THROW(xp_reconstruct_error(PackedSymMatrix::identity(2), f), UsageError);
}

}  // namespace
}  // namespace rotrook
