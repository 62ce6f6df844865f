#include "hecke/real.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>
#include <utility>

namespace hecke {
namespace {

constexpr mpfr_rnd_t kRnd = MPFR_RNDN;

Precision max_prec(const Real& a, const Real& b) { return std::max(a.precision(), b.precision()); }

template <typename Fn>
Real unary(const Real& x, Fn fn) {
  Real r(x.precision());
  fn(r.get(), x.get(), kRnd);
  return r;
}

}  // namespace

Real::Real(Precision prec) {
  mpfr_init2(value_, prec);
  mpfr_set_zero(value_, 1);
}

Real::Real(long value, Precision prec) {
  mpfr_init2(value_, prec);
  mpfr_set_si(value_, value, kRnd);
}

Real::Real(double value, Precision prec) {
  mpfr_init2(value_, prec);
  mpfr_set_d(value_, value, kRnd);
}

Real Real::from_integer(const mpz_class& value, Precision prec) {
  Real r(prec);
  mpfr_set_z(r.value_, value.get_mpz_t(), kRnd);
  return r;
}

Real Real::from_rational(const mpq_class& value, Precision prec) {
  Real r(prec);
  mpfr_set_q(r.value_, value.get_mpq_t(), kRnd);
  return r;
}

Real Real::from_decimal(std::string_view text, Precision prec) {
  Real r(prec);
  std::string buf(text);
  if (buf.empty() || mpfr_set_str(r.value_, buf.c_str(), 10, kRnd) != 0) {
    throw std::invalid_argument("malformed decimal real: " + buf);
  }
  return r;
}

Real Real::pi(Precision prec) {
  Real r(prec);
  mpfr_const_pi(r.value_, kRnd);
  return r;
}

Real Real::from_mantissa_exponent(const mpz_class& m, long exp, Precision prec) {
  const auto bits = static_cast<Precision>(mpz_sizeinbase(m.get_mpz_t(), 2));
  Real r(std::max(prec, bits));
  mpfr_set_z_2exp(r.value_, m.get_mpz_t(), exp, kRnd);
  return r;
}

Real::Real(const Real& other) {
  mpfr_init2(value_, other.precision());
  mpfr_set(value_, other.value_, kRnd);
}

Real::Real(Real&& other) noexcept {
  mpfr_init2(value_, MPFR_PREC_MIN);
  mpfr_swap(value_, other.value_);
}

Real& Real::operator=(const Real& other) {
  if (this != &other) {
    mpfr_set_prec(value_, other.precision());
    mpfr_set(value_, other.value_, kRnd);
  }
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  mpfr_swap(value_, other.value_);
  return *this;
}

Real::~Real() { mpfr_clear(value_); }

Real Real::with_precision(Precision prec) const {
  Real r(prec);
  mpfr_set(r.value_, value_, kRnd);
  return r;
}

mpz_class Real::round_to_integer() const {
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), value_, MPFR_RNDNA);
  return z;
}

void Real::to_mantissa_exponent(mpz_class& m, long& exp) const {
  if (is_zero()) {
    m = 0;
    exp = 0;
    return;
  }
  exp = mpfr_get_z_2exp(m.get_mpz_t(), value_);
  // Strip trailing zero bits so the representation is canonical.
  const auto tz = mpz_scan1(m.get_mpz_t(), 0);
  if (tz > 0) {
    mpz_fdiv_q_2exp(m.get_mpz_t(), m.get_mpz_t(), tz);
    exp += static_cast<long>(tz);
  }
}

std::string Real::to_string(int digits) const {
  char* out = nullptr;
  mpfr_asprintf(&out, "%.*Rg", digits, value_);
  std::string s(out);
  mpfr_free_str(out);
  return s;
}

Real& Real::operator+=(const Real& rhs) {
  if (rhs.precision() > precision()) mpfr_prec_round(value_, rhs.precision(), kRnd);
  mpfr_add(value_, value_, rhs.value_, kRnd);
  return *this;
}

Real& Real::operator-=(const Real& rhs) {
  if (rhs.precision() > precision()) mpfr_prec_round(value_, rhs.precision(), kRnd);
  mpfr_sub(value_, value_, rhs.value_, kRnd);
  return *this;
}

Real& Real::operator*=(const Real& rhs) {
  if (rhs.precision() > precision()) mpfr_prec_round(value_, rhs.precision(), kRnd);
  mpfr_mul(value_, value_, rhs.value_, kRnd);
  return *this;
}

Real& Real::operator/=(const Real& rhs) {
  if (rhs.precision() > precision()) mpfr_prec_round(value_, rhs.precision(), kRnd);
  mpfr_div(value_, value_, rhs.value_, kRnd);
  return *this;
}

Real& Real::operator*=(long rhs) {
  mpfr_mul_si(value_, value_, rhs, kRnd);
  return *this;
}

Real& Real::operator/=(long rhs) {
  mpfr_div_si(value_, value_, rhs, kRnd);
  return *this;
}

Real operator-(const Real& x) { return unary(x, mpfr_neg); }

Real operator+(const Real& a, const Real& b) {
  Real r(max_prec(a, b));
  mpfr_add(r.value_, a.value_, b.value_, kRnd);
  return r;
}

Real operator-(const Real& a, const Real& b) {
  Real r(max_prec(a, b));
  mpfr_sub(r.value_, a.value_, b.value_, kRnd);
  return r;
}

Real operator*(const Real& a, const Real& b) {
  Real r(max_prec(a, b));
  mpfr_mul(r.value_, a.value_, b.value_, kRnd);
  return r;
}

Real operator/(const Real& a, const Real& b) {
  Real r(max_prec(a, b));
  mpfr_div(r.value_, a.value_, b.value_, kRnd);
  return r;
}

Real operator+(const Real& a, long b) {
  Real r(a.precision());
  mpfr_add_si(r.value_, a.value_, b, kRnd);
  return r;
}

Real operator-(const Real& a, long b) {
  Real r(a.precision());
  mpfr_sub_si(r.value_, a.value_, b, kRnd);
  return r;
}

Real operator-(long a, const Real& b) {
  Real r(b.precision());
  mpfr_si_sub(r.value_, a, b.value_, kRnd);
  return r;
}

Real operator*(const Real& a, long b) {
  Real r(a.precision());
  mpfr_mul_si(r.value_, a.value_, b, kRnd);
  return r;
}

Real operator/(const Real& a, long b) {
  Real r(a.precision());
  mpfr_div_si(r.value_, a.value_, b, kRnd);
  return r;
}

Real operator/(long a, const Real& b) {
  Real r(b.precision());
  mpfr_si_div(r.value_, a, b.value_, kRnd);
  return r;
}

std::partial_ordering operator<=>(const Real& a, const Real& b) {
  if (mpfr_unordered_p(a.value_, b.value_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.value_, b.value_);
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

std::partial_ordering operator<=>(const Real& a, long b) {
  if (mpfr_nan_p(a.value_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp_si(a.value_, b);
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

Real abs(const Real& x) { return unary(x, mpfr_abs); }
Real sqrt(const Real& x) { return unary(x, mpfr_sqrt); }
Real exp(const Real& x) { return unary(x, mpfr_exp); }
Real log(const Real& x) { return unary(x, mpfr_log); }
Real sin(const Real& x) { return unary(x, mpfr_sin); }
Real cos(const Real& x) { return unary(x, mpfr_cos); }
Real tan(const Real& x) { return unary(x, mpfr_tan); }
Real acos(const Real& x) { return unary(x, mpfr_acos); }
Real cosh(const Real& x) { return unary(x, mpfr_cosh); }
Real acosh(const Real& x) { return unary(x, mpfr_acosh); }
Real tanh(const Real& x) { return unary(x, mpfr_tanh); }
Real atanh(const Real& x) { return unary(x, mpfr_atanh); }
Real tgamma(const Real& x) { return unary(x, mpfr_gamma); }

Real atan2(const Real& y, const Real& x) {
  Real r(max_prec(y, x));
  mpfr_atan2(r.get(), y.get(), x.get(), kRnd);
  return r;
}

Real pow(const Real& x, const Real& y) {
  Real r(max_prec(x, y));
  mpfr_pow(r.get(), x.get(), y.get(), kRnd);
  return r;
}

Real pow(const Real& x, long n) {
  Real r(x.precision());
  mpfr_pow_si(r.get(), x.get(), n, kRnd);
  return r;
}

Real ldexp(const Real& x, long e) {
  Real r(x.precision());
  mpfr_mul_2si(r.get(), x.get(), e, kRnd);
  return r;
}

Real max(const Real& a, const Real& b) { return a < b ? b : a; }
Real min(const Real& a, const Real& b) { return b < a ? b : a; }

Real epsilon_for(Precision bits) {
  Real r(1L, 64);
  mpfr_mul_2si(r.get(), r.get(), -static_cast<long>(bits), kRnd);
  return r;
}

std::string to_hex_string(const Real& x) {
  mpz_class m;
  long e = 0;
  x.to_mantissa_exponent(m, e);
  std::string out;
  if (sgn(m) < 0) {
    out += '-';
    m = -m;
  }
  out += "0x";
  out += m.get_str(16);
  out += 'p';
  out += std::to_string(e);
  out += '@';
  out += std::to_string(x.precision());
  return out;
}

Real from_hex_string(std::string_view text) {
  auto fail = [&] { return std::invalid_argument("malformed hex real: " + std::string(text)); };
  bool negative = false;
  std::string_view s = text;
  if (!s.empty() && s.front() == '-') {
    negative = true;
    s.remove_prefix(1);
  }
  if (s.substr(0, 2) != "0x") throw fail();
  s.remove_prefix(2);
  const auto p = s.find('p');
  const auto at = s.find('@');
  if (p == std::string_view::npos || at == std::string_view::npos || at < p || p == 0) throw fail();
  mpz_class m;
  if (m.set_str(std::string(s.substr(0, p)), 16) != 0) throw fail();
  long e = 0;
  long prec = 0;
  const auto exp_part = s.substr(p + 1, at - p - 1);
  const auto prec_part = s.substr(at + 1);
  if (std::from_chars(exp_part.data(), exp_part.data() + exp_part.size(), e).ec != std::errc{} ||
      std::from_chars(prec_part.data(), prec_part.data() + prec_part.size(), prec).ec != std::errc{} ||
      prec < MPFR_PREC_MIN) {
    throw fail();
  }
  if (negative) m = -m;
  Real r = Real::from_mantissa_exponent(m, e, static_cast<Precision>(prec));
  if (r.precision() != prec) throw fail();
  return r;
}

}  // namespace hecke
