#pragma once

#include <complex>

#include "hecke/real.hpp"

namespace hecke {

// Which side of a branch cut a point on the cut is taken from.
enum class Side { None, Upper, Lower };

struct Complex {
  Real re;
  Real im;

  explicit Complex(Precision prec = kDefaultPrecision) : re(prec), im(prec) {}
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  explicit Complex(const Real& r) : re(r), im(r.precision()) {}
  Complex(double r, double i, Precision prec) : re(r, prec), im(i, prec) {}

  [[nodiscard]] Precision precision() const { return std::max(re.precision(), im.precision()); }
  [[nodiscard]] Complex with_precision(Precision prec) const {
    return {re.with_precision(prec), im.with_precision(prec)};
  }
  [[nodiscard]] std::complex<double> to_std() const { return {re.to_double(), im.to_double()}; }
  [[nodiscard]] bool is_zero() const { return re.is_zero() && im.is_zero(); }

  Complex& operator+=(const Complex& o);
  Complex& operator-=(const Complex& o);
  Complex& operator*=(const Complex& o);
  Complex& operator/=(const Complex& o);
};

Complex operator-(const Complex& z);
Complex operator+(const Complex& a, const Complex& b);
Complex operator-(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Complex& b);
Complex operator/(const Complex& a, const Complex& b);
Complex operator+(const Complex& a, const Real& b);
Complex operator-(const Complex& a, const Real& b);
Complex operator-(const Real& a, const Complex& b);
Complex operator*(const Complex& a, const Real& b);
Complex operator*(const Real& a, const Complex& b);
Complex operator/(const Complex& a, const Real& b);
Complex operator/(const Real& a, const Complex& b);
Complex operator+(const Complex& a, long b);
Complex operator-(long a, const Complex& b);
Complex operator*(const Complex& a, long b);
Complex operator/(const Complex& a, long b);

Complex conj(const Complex& z);
Real abs(const Complex& z);
Real norm(const Complex& z);  // |z|^2
// Principal argument in (-pi, pi]. A negative real with a signed-zero
// imaginary part follows the sign of that zero, so -x - 0i gives -pi.
Real arg(const Complex& z);
Complex log(const Complex& z);
Complex exp(const Complex& z);
Complex sqrt(const Complex& z);
Complex pow(const Complex& z, const Real& e);
Complex pow(const Complex& z, long n);
Complex expi(const Real& theta);  // e^{i theta}
Complex polar(const Real& r, const Real& theta);

}  // namespace hecke
