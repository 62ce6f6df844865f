#pragma once

// Arbitrary-precision real numbers backed by MPFR.
//
// Every value carries its own precision. Binary operations produce a result
// at the larger of the operand precisions, so no process-global precision
// state exists and values can be used from several threads at once.

#include <gmpxx.h>
#include <mpfr.h>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace hecke {

using Precision = mpfr_prec_t;

inline constexpr Precision kDefaultPrecision = 128;

class Real {
 public:
  explicit Real(Precision prec = kDefaultPrecision);
  Real(long value, Precision prec);
  Real(int value, Precision prec) : Real(static_cast<long>(value), prec) {}
  Real(double value, Precision prec);

  static Real from_integer(const mpz_class& value, Precision prec);
  static Real from_rational(const mpq_class& value, Precision prec);
  // Parses a decimal string; throws std::invalid_argument on malformed input.
  static Real from_decimal(std::string_view text, Precision prec);
  static Real pi(Precision prec);
  // m * 2^exp exactly (precision is raised if m needs more bits).
  static Real from_mantissa_exponent(const mpz_class& m, long exp, Precision prec);

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  [[nodiscard]] Precision precision() const { return mpfr_get_prec(value_); }
  // Rounds to a new precision.
  [[nodiscard]] Real with_precision(Precision prec) const;

  [[nodiscard]] mpfr_srcptr get() const { return value_; }
  [[nodiscard]] mpfr_ptr get() { return value_; }

  [[nodiscard]] double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
  [[nodiscard]] int sign() const { return mpfr_sgn(value_); }
  [[nodiscard]] bool is_zero() const { return mpfr_zero_p(value_) != 0; }
  [[nodiscard]] bool is_finite() const { return mpfr_number_p(value_) != 0; }
  // Nearest integer (ties away from zero).
  [[nodiscard]] mpz_class round_to_integer() const;
  // Exact decomposition value = m * 2^exp. Zero yields m = 0, exp = 0.
  void to_mantissa_exponent(mpz_class& m, long& exp) const;
  [[nodiscard]] std::string to_string(int digits = 20) const;

  Real& operator+=(const Real& rhs);
  Real& operator-=(const Real& rhs);
  Real& operator*=(const Real& rhs);
  Real& operator/=(const Real& rhs);
  Real& operator*=(long rhs);
  Real& operator/=(long rhs);

  friend Real operator-(const Real& x);
  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  friend Real operator/(const Real& a, const Real& b);
  friend Real operator+(const Real& a, long b);
  friend Real operator-(const Real& a, long b);
  friend Real operator-(long a, const Real& b);
  friend Real operator*(const Real& a, long b);
  friend Real operator*(long a, const Real& b) { return b * a; }
  friend Real operator/(const Real& a, long b);
  friend Real operator/(long a, const Real& b);

  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.value_, b.value_) != 0; }
  friend std::partial_ordering operator<=>(const Real& a, const Real& b);
  friend bool operator==(const Real& a, long b) { return mpfr_cmp_si(a.value_, b) == 0; }
  friend std::partial_ordering operator<=>(const Real& a, long b);

 private:
  mpfr_t value_;
};

Real abs(const Real& x);
Real sqrt(const Real& x);
Real exp(const Real& x);
Real log(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
Real tan(const Real& x);
Real atan2(const Real& y, const Real& x);
Real acos(const Real& x);
Real cosh(const Real& x);
Real acosh(const Real& x);
Real tanh(const Real& x);
Real atanh(const Real& x);
Real pow(const Real& x, const Real& y);
Real pow(const Real& x, long n);
Real tgamma(const Real& x);
Real ldexp(const Real& x, long e);
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);

// 2^(-bits) at the given precision.
Real epsilon_for(Precision bits);

// Hex serialization used by the ledger: "[-]0x<hex>p<exp>@<prec>". Exact.
std::string to_hex_string(const Real& x);
// Inverse of to_hex_string; throws std::invalid_argument on malformed input.
Real from_hex_string(std::string_view text);

}  // namespace hecke
