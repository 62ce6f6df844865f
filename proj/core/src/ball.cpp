#include "hecke/ball.hpp"

#include <stdexcept>

namespace hecke {
namespace {

Real rad_zero() { return Real(64); }

Real abs_up(const Real& x) {
  Real r(64);
  mpfr_abs(r.get(), x.get(), MPFR_RNDU);
  return r;
}

Real add_up(const Real& a, const Real& b) {
  Real r(64);
  mpfr_add(r.get(), a.get(), b.get(), MPFR_RNDU);
  return r;
}

Real mul_up(const Real& a, const Real& b) {
  Real r(64);
  mpfr_mul(r.get(), a.get(), b.get(), MPFR_RNDU);
  return r;
}

}  // namespace

Ball::Ball(Precision prec) : mid_(prec), rad_(rad_zero()) {}

Ball::Ball(Real mid, Real rad) : mid_(std::move(mid)), rad_(rad.with_precision(kRadPrec)) {
  if (rad_.sign() < 0) throw std::invalid_argument("negative ball radius");
}

Ball Ball::exact(const Real& value) { return Ball(value, rad_zero()); }

Ball Ball::from_integer(const mpz_class& v, Precision prec) {
  Ball b(Real::from_integer(v, prec), rad_zero());
  b.add_rounding_error();
  return b;
}

Ball Ball::from_rational(const mpq_class& v, Precision prec) {
  Ball b(Real::from_rational(v, prec), rad_zero());
  b.add_rounding_error();
  return b;
}

Ball Ball::two_cos_pi(long k, long n, Precision prec) {
  Real x = Real::pi(prec + 16) * k / n;
  Real c = cos(x).with_precision(prec) * 2L;
  // pi, the product, the cosine and the final rounding each contribute
  // at most a few ulps; 2^(3 - prec) relative to 2 is generous.
  Ball b(c, rad_zero());
  b.rad_ = ldexp(Real(1L, kRadPrec), 3 - static_cast<long>(prec));
  return b;
}

void Ball::add_rounding_error() {
  if (mid_.is_zero()) return;
  Real e = abs_up(mid_);
  mpfr_mul_2si(e.get(), e.get(), 1 - static_cast<long>(mid_.precision()), MPFR_RNDU);
  rad_ = add_up(rad_, e);
}

bool Ball::contains_zero() const { return mpfr_cmpabs(mid_.get(), rad_.get()) <= 0; }

int Ball::certified_sign() const {
  if (contains_zero()) return 0;
  return mid_.sign();
}

bool Ball::contains(const Real& x) const {
  Real d = abs(x - mid_);
  return d <= rad_;
}

Real Ball::upper_abs() const { return add_up(abs_up(mid_), rad_); }

Real Ball::lower() const {
  Real r(mid_.precision());
  mpfr_sub(r.get(), mid_.get(), rad_.get(), MPFR_RNDD);
  return r;
}

Real Ball::upper() const {
  Real r(mid_.precision());
  mpfr_add(r.get(), mid_.get(), rad_.get(), MPFR_RNDU);
  return r;
}

Ball operator-(const Ball& x) { return Ball(-x.mid_, x.rad_); }

Ball operator+(const Ball& a, const Ball& b) {
  Ball r(a.mid_ + b.mid_, add_up(a.rad_, b.rad_));
  r.add_rounding_error();
  return r;
}

Ball operator-(const Ball& a, const Ball& b) {
  Ball r(a.mid_ - b.mid_, add_up(a.rad_, b.rad_));
  r.add_rounding_error();
  return r;
}

Ball operator*(const Ball& a, const Ball& b) {
  // |ab - AB| <= |A| rb + |B| ra + ra rb
  Real rad = add_up(add_up(mul_up(abs_up(a.mid_), b.rad_), mul_up(abs_up(b.mid_), a.rad_)),
                    mul_up(a.rad_, b.rad_));
  Ball r(a.mid_ * b.mid_, rad);
  r.add_rounding_error();
  return r;
}

Ball operator*(const Ball& a, long b) {
  Ball r(a.mid_ * b, mul_up(a.rad_, abs_up(Real(b, 64))));
  r.add_rounding_error();
  return r;
}

Ball sqrt(const Ball& x) {
  if (x.lower().sign() <= 0) throw std::domain_error("sqrt of a ball not certified positive");
  // |sqrt(y) - sqrt(m)| <= r / (sqrt(m - r) + sqrt(m))
  Real lo = sqrt(x.lower());
  Real m = sqrt(x.mid());
  Real den(64);
  mpfr_add(den.get(), lo.get(), m.get(), MPFR_RNDD);
  Real rad(64);
  mpfr_div(rad.get(), x.rad().get(), den.get(), MPFR_RNDU);
  Ball r(m, rad);
  Ball out = r + Ball(Real(x.precision()), Real(64));
  return out;
}

}  // namespace hecke
