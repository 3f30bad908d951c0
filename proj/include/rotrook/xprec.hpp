#pragma once

#include <cmath>
#include <span>

#include "rotrook/symcore.hpp"

namespace rotrook {

struct RotatedFactorization;
struct BkFactorization;

// Error-free transformations.

/// s + e == a + b exactly, s = fl(a + b).
inline void two_sum(double a, double b, double& s, double& e) noexcept {
  s = a + b;
  const double bb = s - a;
  e = (a - (s - bb)) + (b - bb);
}

/// Requires |a| >= |b| (or a == 0).
inline void quick_two_sum(double a, double b, double& s, double& e) noexcept {
  s = a + b;
  e = b - (s - a);
}

/// p + e == a * b exactly, p = fl(a * b).
inline void two_prod(double a, double b, double& p, double& e) noexcept {
  p = a * b;
  e = std::fma(a, b, -p);
}

/// Double-double scalar: the unevaluated sum hi + lo with hi = fl(hi + lo).
class XScalar {
public:
  constexpr XScalar() noexcept = default;
  constexpr XScalar(double v) noexcept : hi_(v), lo_(0.0) {}  // NOLINT
  /// Renormalizes an arbitrary pair.
  static XScalar from_pair(double hi, double lo) noexcept {
    XScalar r;
    quick_two_sum(hi, lo, r.hi_, r.lo_);
    return r;
  }

  constexpr double hi() const noexcept { return hi_; }
  constexpr double lo() const noexcept { return lo_; }
  constexpr double to_double() const noexcept { return hi_ + lo_; }

  friend XScalar operator-(XScalar a) noexcept {
    XScalar r;
    r.hi_ = -a.hi_;
    r.lo_ = -a.lo_;
    return r;
  }

  friend XScalar operator+(XScalar a, XScalar b) noexcept {
    double s, e, t, f;
    two_sum(a.hi_, b.hi_, s, e);
    two_sum(a.lo_, b.lo_, t, f);
    e += t;
    quick_two_sum(s, e, s, e);
    e += f;
    return from_pair(s, e);
  }
  friend XScalar operator-(XScalar a, XScalar b) noexcept { return a + (-b); }

  friend XScalar operator*(XScalar a, XScalar b) noexcept {
    double p, e;
    two_prod(a.hi_, b.hi_, p, e);
    e += a.hi_ * b.lo_ + a.lo_ * b.hi_;
    return from_pair(p, e);
  }

  friend XScalar operator/(XScalar a, XScalar b) noexcept {
    // Long division: two quotient digits plus a correction.
    const double q1 = a.hi_ / b.hi_;
    XScalar r = a - b * XScalar(q1);
    const double q2 = r.hi_ / b.hi_;
    r = r - b * XScalar(q2);
    const double q3 = r.hi_ / b.hi_;
    return from_pair(q1, q2) + XScalar(q3);
  }

  XScalar& operator+=(XScalar b) noexcept { return *this = *this + b; }
  XScalar& operator-=(XScalar b) noexcept { return *this = *this - b; }
  XScalar& operator*=(XScalar b) noexcept { return *this = *this * b; }

  friend bool operator==(XScalar a, XScalar b) noexcept {
    return a.hi_ == b.hi_ && a.lo_ == b.lo_;
  }

private:
  double hi_ = 0.0;
  double lo_ = 0.0;
};

inline XScalar x_add(XScalar a, XScalar b) noexcept { return a + b; }
inline XScalar x_mul(XScalar a, XScalar b) noexcept { return a * b; }

/// a*b + c with the product formed exactly.
inline XScalar x_fma(double a, double b, XScalar c) noexcept {
  double p, e;
  two_prod(a, b, p, e);
  return XScalar::from_pair(p, e) + c;
}

/// Square root: one Newton step on the working-precision root.
XScalar x_sqrt(XScalar a) noexcept;

/// A x accumulated in double-double, rounded on output.
DenseVector xp_matvec(const PackedSymMatrix& a, std::span<const double> x);

/// ||A - M L D L^t M^t||_F with the product replayed in double-double.
double xp_reconstruct_error(const PackedSymMatrix& a, const RotatedFactorization& f);

/// ||A - P L D L^t P^t||_F for the Bunch-Kaufman baseline.
double xp_reconstruct_error(const PackedSymMatrix& a, const BkFactorization& f);

}  // namespace rotrook
