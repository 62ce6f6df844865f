#pragma once

// Exact arithmetic in L = Q(cos pi/21) and its ring of integers Z[t],
// t = 2cos(pi/21). Elements are coefficient vectors in the power basis
// 1, t, ..., t^5, always reduced modulo the minimal polynomial of t.

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hecke/ball.hpp"

namespace hecke {

inline constexpr int kDegree = 6;

// Embedding labels in k-order; sigma_k(t) = 2cos(k pi/21).
inline constexpr std::array<int, kDegree> kLabels{1, 5, 11, 13, 17, 19};
// Labels in the order visited by the Galois generator t -> C_11(t).
inline constexpr std::array<int, kDegree> kGaloisCycle{1, 11, 5, 13, 17, 19};

// Position of label k in k-order; throws std::invalid_argument for bad k.
int label_index(int k);
// The label k' with sigma_k(sigma(x)) = sigma_k'(x), i.e. 11k reduced mod +-42.
int next_label(int k);

struct MinimalPolynomial {
  std::array<mpz_class, kDegree + 1> coeffs;  // c_0 .. c_6, c_6 = 1
  mpz_class discriminant;
};

// Derived once via the Chebyshev substitution into the 42nd cyclotomic
// polynomial and self-checked (discriminant and numeric roots). Throws
// std::logic_error if the self-check fails.
const MinimalPolynomial& minimal_polynomial();
// A fresh, unchecked derivation.
MinimalPolynomial derive_minimal_polynomial();
// (-1)^{n(n-1)/2} Res(p, p') / lc(p) via a Sylvester determinant.
mpz_class polynomial_discriminant(const std::vector<mpz_class>& p);

template <typename Coeff>
class BasicElement {
 public:
  using Coeffs = std::array<Coeff, kDegree>;

  BasicElement() { coeffs_.fill(Coeff(0)); }
  BasicElement(long constant) : BasicElement() { coeffs_[0] = constant; }  // NOLINT
  explicit BasicElement(const Coeff& constant) : BasicElement() { coeffs_[0] = constant; }
  explicit BasicElement(const Coeffs& c) : coeffs_(c) {}
  BasicElement(std::initializer_list<long> c) : BasicElement() {
    if (c.size() > kDegree) throw std::invalid_argument("too many coefficients");
    int i = 0;
    for (long v : c) coeffs_[i++] = v;
  }

  static BasicElement t() { return BasicElement{0, 1}; }
  // Reduces an arbitrary-length coefficient vector modulo m.
  static BasicElement reduce(std::vector<Coeff> c);

  [[nodiscard]] const Coeff& operator[](int i) const { return coeffs_[i]; }
  [[nodiscard]] Coeff& operator[](int i) { return coeffs_[i]; }
  [[nodiscard]] const Coeffs& coeffs() const { return coeffs_; }
  [[nodiscard]] bool is_zero() const;
  [[nodiscard]] bool is_rational() const;
  [[nodiscard]] std::string to_string() const;

  BasicElement& operator+=(const BasicElement& o);
  BasicElement& operator-=(const BasicElement& o);
  BasicElement& operator*=(const BasicElement& o) { return *this = *this * o; }

  friend BasicElement operator+(BasicElement a, const BasicElement& b) { return a += b; }
  friend BasicElement operator-(BasicElement a, const BasicElement& b) { return a -= b; }
  friend BasicElement operator-(const BasicElement& a) { return BasicElement() - a; }
  friend BasicElement operator*(const BasicElement& a, const BasicElement& b) {
    std::vector<Coeff> prod(2 * kDegree - 1, Coeff(0));
    for (int i = 0; i < kDegree; ++i) {
      if (a.coeffs_[i] == 0) continue;
      for (int j = 0; j < kDegree; ++j) prod[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
    return reduce(std::move(prod));
  }
  friend BasicElement operator*(const Coeff& s, BasicElement a) {
    for (auto& c : a.coeffs_) c *= s;
    return a;
  }
  friend bool operator==(const BasicElement& a, const BasicElement& b) { return a.coeffs_ == b.coeffs_; }
  friend bool operator<(const BasicElement& a, const BasicElement& b) { return a.coeffs_ < b.coeffs_; }

 private:
  Coeffs coeffs_;
};

using FieldElement = BasicElement<mpq_class>;
using IntegralElement = BasicElement<mpz_class>;

template <typename Coeff>
BasicElement<Coeff> pow(BasicElement<Coeff> x, unsigned long n) {
  BasicElement<Coeff> r(1L);
  while (n > 0) {
    if (n & 1UL) r *= x;
    n >>= 1;
    if (n > 0) x *= x;
  }
  return r;
}

FieldElement to_field(const IntegralElement& x);
// Nullopt when some coefficient is not an integer.
std::optional<IntegralElement> to_integral(const FieldElement& x);
// Least common denominator of the coefficients.
mpz_class denominator(const FieldElement& x);

// Throws std::domain_error for zero.
FieldElement invert(const FieldElement& x);

// Applies the generator sigma (t -> C_11(t)) `power` times; power is taken mod 6.
FieldElement galois_apply(const FieldElement& x, int power);
IntegralElement galois_apply(const IntegralElement& x, int power);

using RationalMatrix6 = std::array<std::array<mpq_class, kDegree>, kDegree>;
// Column j holds the coordinates of x * t^j.
RationalMatrix6 multiplication_matrix(const FieldElement& x);
mpq_class determinant(RationalMatrix6 m);

struct NormTrace {
  mpq_class norm;
  mpq_class trace;
};
// Norm as the determinant of multiplication by x, trace as its trace.
NormTrace norm_trace(const FieldElement& x);
// Norm and trace as product and sum of the six Galois conjugates.
NormTrace norm_trace_via_conjugates(const FieldElement& x);
inline mpq_class norm(const FieldElement& x) { return norm_trace(x).norm; }
inline mpq_class trace(const FieldElement& x) { return norm_trace(x).trace; }
mpz_class norm(const IntegralElement& x);

struct EmbeddingValue {
  int k = 1;
  Ball value;
  Precision precision = kDefaultPrecision;
};

// Interval enclosure of sigma_k(x) computed at working precision `prec`.
Ball embed_ball(const FieldElement& x, int k, Precision prec);
Ball embed_ball(const IntegralElement& x, int k, Precision prec);
// sigma_k(x) with |value - exact| < 2^(1-prec) |exact| for x != 0.
EmbeddingValue embed(const FieldElement& x, int k, Precision prec);
double embed_double(const IntegralElement& x, int k);

class UndecidableSign : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr Precision kSignPrecisionCap = 1 << 14;

// Sign of sigma_k(x), decided exactly for x = 0 and otherwise by an
// enclosure excluding 0, doubling the precision up to `cap`.
int certified_sign(const FieldElement& x, int k, Precision start = 128, Precision cap = kSignPrecisionCap);
// Signs in k-order.
std::array<int, kDegree> sign_pattern(const FieldElement& x, Precision start = 128);
bool is_totally_positive(const FieldElement& x);

struct PrimeIdealData {
  long ell = 0;
  long root = 0;  // image of t in Z/ell
  IntegralElement generator;
  bool totally_positive = false;
};

long residue_mod_prime(const IntegralElement& x, long ell, long root);
inline long residue_mod_prime(const IntegralElement& x, const PrimeIdealData& p) {
  return residue_mod_prime(x, p.ell, p.root);
}
std::vector<long> roots_mod_ell(long ell);
bool is_prime(long n);
// Validates the invariants (m(r) = 0 mod ell, |N(pi)| = ell, residue of pi
// is 0) and fills the totally-positive flag. Throws std::invalid_argument.
PrimeIdealData make_prime_ideal(long ell, long root, const IntegralElement& generator);

// All x in Z[t] with sigma_k(x)^2 <= squared_bounds[k-order index],
// each exactly once, sorted lexicographically by coefficients.
std::vector<IntegralElement> enumerate_box(const std::array<mpq_class, kDegree>& squared_bounds);
std::vector<IntegralElement> enumerate_box(const std::array<double, kDegree>& bounds);
std::vector<IntegralElement> enumerate_box(const mpq_class& squared_bound);

// r in Z[t] with r^2 = s and sigma_1(r) >= 0, if one exists.
std::optional<IntegralElement> integral_sqrt(const IntegralElement& s);
std::optional<FieldElement> field_sqrt(const FieldElement& s);

struct TotallyPositiveAssociate {
  IntegralElement element;
  IntegralElement unit;
};
// Searches units u with |sigma_k(u)| <= height making u*pi totally
// positive. Nullopt means none at this height, not that none exists.
std::optional<TotallyPositiveAssociate> find_totally_positive_associate(const IntegralElement& pi,
                                                                         double height);

// (n!/n^n) sqrt|disc|.
Real minkowski_bound(Precision prec);

template <typename E>
struct Mat2 {
  E a, b, c, d;

  static Mat2 identity() { return {E(1L), E(0L), E(0L), E(1L)}; }
  [[nodiscard]] E det() const { return a * d - b * c; }
  [[nodiscard]] E trace() const { return a + d; }
  [[nodiscard]] Mat2 adjugate() const { return {d, -b, -c, a}; }
  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend Mat2 operator-(const Mat2& x) { return {-x.a, -x.b, -x.c, -x.d}; }
  friend bool operator==(const Mat2& x, const Mat2& y) {
    return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
  }
};

using IntegralMatrix = Mat2<IntegralElement>;

template <typename E>
Mat2<E> pow(Mat2<E> m, unsigned long n) {
  Mat2<E> r = Mat2<E>::identity();
  while (n > 0) {
    if (n & 1UL) r = r * m;
    n >>= 1;
    if (n > 0) m = m * m;
  }
  return r;
}

// B = ((0, -1), (1, t)).
IntegralMatrix generator_b();

}  // namespace hecke
