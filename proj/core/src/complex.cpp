#include "hecke/complex.hpp"

namespace hecke {

Complex& Complex::operator+=(const Complex& o) {
  re += o.re;
  im += o.im;
  return *this;
}

Complex& Complex::operator-=(const Complex& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

Complex& Complex::operator*=(const Complex& o) {
  *this = *this * o;
  return *this;
}

Complex& Complex::operator/=(const Complex& o) {
  *this = *this / o;
  return *this;
}

Complex operator-(const Complex& z) { return {-z.re, -z.im}; }
Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }

Complex operator*(const Complex& a, const Complex& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

Complex operator/(const Complex& a, const Complex& b) {
  // Smith's scaling keeps the intermediate products in range.
  if (abs(b.re) >= abs(b.im)) {
    const Real r = b.im / b.re;
    const Real den = b.re + b.im * r;
    return {(a.re + a.im * r) / den, (a.im - a.re * r) / den};
  }
  const Real r = b.re / b.im;
  const Real den = b.re * r + b.im;
  return {(a.re * r + a.im) / den, (a.im * r - a.re) / den};
}

Complex operator+(const Complex& a, const Real& b) { return {a.re + b, a.im}; }
Complex operator-(const Complex& a, const Real& b) { return {a.re - b, a.im}; }
Complex operator-(const Real& a, const Complex& b) { return {a - b.re, -b.im}; }
Complex operator*(const Complex& a, const Real& b) { return {a.re * b, a.im * b}; }
Complex operator*(const Real& a, const Complex& b) { return {a * b.re, a * b.im}; }
Complex operator/(const Complex& a, const Real& b) { return {a.re / b, a.im / b}; }
Complex operator/(const Real& a, const Complex& b) { return Complex(a) / b; }
Complex operator+(const Complex& a, long b) { return {a.re + b, a.im}; }
Complex operator-(long a, const Complex& b) { return {a - b.re, -b.im}; }
Complex operator*(const Complex& a, long b) { return {a.re * b, a.im * b}; }
Complex operator/(const Complex& a, long b) { return {a.re / b, a.im / b}; }

Complex conj(const Complex& z) { return {z.re, -z.im}; }

Real abs(const Complex& z) {
  Real r(z.precision());
  mpfr_hypot(r.get(), z.re.get(), z.im.get(), MPFR_RNDN);
  return r;
}

Real norm(const Complex& z) { return z.re * z.re + z.im * z.im; }

Real arg(const Complex& z) { return atan2(z.im, z.re); }

Complex log(const Complex& z) { return {log(abs(z)), arg(z)}; }

Complex exp(const Complex& z) {
  const Real m = exp(z.re);
  return {m * cos(z.im), m * sin(z.im)};
}

Complex sqrt(const Complex& z) {
  if (z.is_zero()) return Complex(z.precision());
  const Real m = abs(z);
  Real u = sqrt((m + abs(z.re)) / 2L);
  if (z.re.sign() >= 0) {
    return {u, z.im / (u * 2L)};
  }
  Real v = z.im.sign() < 0 || (z.im.is_zero() && mpfr_signbit(z.im.get())) ? -u : u;
  return {abs(z.im) / (u * 2L), v};
}

Complex pow(const Complex& z, const Real& e) {
  if (z.is_zero()) {
    if (e.sign() > 0) return Complex(z.precision());
  }
  return exp(log(z) * e);
}

Complex pow(const Complex& z, long n) {
  if (n < 0) return Complex(Real(1L, z.precision())) / pow(z, -n);
  Complex result(Real(1L, z.precision()));
  Complex base = z;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

Complex expi(const Real& theta) { return {cos(theta), sin(theta)}; }

Complex polar(const Real& r, const Real& theta) { return {r * cos(theta), r * sin(theta)}; }

}  // namespace hecke
