#pragma once

// Midpoint-radius real intervals. The radius is kept at a short fixed
// precision and every radius operation rounds upward, so the true value
// always lies in [mid - rad, mid + rad].

#include "hecke/real.hpp"

namespace hecke {

class Ball {
 public:
  explicit Ball(Precision prec = kDefaultPrecision);
  Ball(Real mid, Real rad);

  static Ball exact(const Real& value);
  static Ball from_integer(const mpz_class& v, Precision prec);
  static Ball from_rational(const mpq_class& v, Precision prec);
  // 2cos(k*pi/n) enclosed at the given precision.
  static Ball two_cos_pi(long k, long n, Precision prec);

  [[nodiscard]] const Real& mid() const { return mid_; }
  [[nodiscard]] const Real& rad() const { return rad_; }
  [[nodiscard]] Precision precision() const { return mid_.precision(); }

  [[nodiscard]] bool contains_zero() const;
  // +1 / -1 when the ball excludes zero, 0 otherwise.
  [[nodiscard]] int certified_sign() const;
  [[nodiscard]] bool contains(const Real& x) const;
  [[nodiscard]] Real upper_abs() const;  // an upper bound for |x|
  [[nodiscard]] Real lower() const;
  [[nodiscard]] Real upper() const;

  friend Ball operator-(const Ball& x);
  friend Ball operator+(const Ball& a, const Ball& b);
  friend Ball operator-(const Ball& a, const Ball& b);
  friend Ball operator*(const Ball& a, const Ball& b);
  friend Ball operator*(const Ball& a, long b);
  Ball& operator+=(const Ball& b) { return *this = *this + b; }
  Ball& operator*=(const Ball& b) { return *this = *this * b; }

 private:
  static constexpr Precision kRadPrec = 64;
  // Adds |mid| * 2^(1 - prec) to account for rounding of the midpoint.
  void add_rounding_error();

  Real mid_;
  Real rad_;
};

Ball sqrt(const Ball& x);  // requires x > 0

}  // namespace hecke
