#include "hecke/field.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <numeric>
#include <sstream>

namespace hecke {
namespace {

using IntPoly = std::vector<mpz_class>;

void trim(IntPoly& p) {
  while (p.size() > 1 && p.back() == 0) p.pop_back();
}

IntPoly poly_mul(const IntPoly& a, const IntPoly& b) {
  IntPoly r(a.size() + b.size() - 1, mpz_class(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  trim(r);
  return r;
}

// Exact division by a monic polynomial; throws if the remainder is nonzero.
IntPoly poly_div_exact(IntPoly num, const IntPoly& den) {
  const size_t dn = den.size() - 1;
  if (num.size() < den.size()) throw std::logic_error("polynomial division underflow");
  IntPoly q(num.size() - dn, mpz_class(0));
  for (size_t i = num.size(); i-- > dn;) {
    const mpz_class coef = num[i];
    q[i - dn] = coef;
    for (size_t j = 0; j <= dn; ++j) num[i - dn + j] -= coef * den[j];
  }
  for (const auto& c : num)
    if (c != 0) throw std::logic_error("polynomial division not exact");
  trim(q);
  return q;
}

IntPoly cyclotomic(long n) {
  IntPoly p(n + 1, mpz_class(0));
  p[0] = -1;
  p[n] = 1;
  for (long d = 1; d < n; ++d)
    if (n % d == 0) p = poly_div_exact(p, cyclotomic(d));
  return p;
}

mpz_class det_bareiss(std::vector<std::vector<mpz_class>> a) {
  const size_t n = a.size();
  int sign = 1;
  mpz_class prev = 1;
  for (size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      size_t p = k + 1;
      while (p < n && a[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(a[k], a[p]);
      sign = -sign;
    }
    for (size_t i = k + 1; i < n; ++i) {
      for (size_t j = k + 1; j < n; ++j) {
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
      }
    }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

const std::array<mpz_class, kDegree + 1>& m_coeffs() {
  static const std::array<mpz_class, kDegree + 1> c = minimal_polynomial().coeffs;
  return c;
}

// galois_table()[p][j] = sigma^p(t^j).
const std::array<std::array<IntegralElement, kDegree>, kDegree>& galois_table() {
  static const auto table = [] {
    std::array<std::array<IntegralElement, kDegree>, kDegree> tab;
    // Chebyshev: C_0 = 2, C_1 = y, C_{j+1} = y C_j - C_{j-1}; C_11(t) = 2cos(11 pi/21).
    IntegralElement prev(2L);
    IntegralElement cur = IntegralElement::t();
    for (int j = 1; j < 11; ++j) {
      IntegralElement next = IntegralElement::t() * cur - prev;
      prev = cur;
      cur = next;
    }
    const IntegralElement sigma_t = cur;
    IntegralElement image = IntegralElement::t();  // sigma^p(t)
    for (int p = 0; p < kDegree; ++p) {
      IntegralElement power(1L);
      for (int j = 0; j < kDegree; ++j) {
        tab[p][j] = power;
        power *= image;
      }
      // sigma^{p+1}(t) = sigma^p(sigma(t)) = sum_j sigma_t[j] sigma^p(t^j)
      IntegralElement next;
      for (int j = 0; j < kDegree; ++j) next += sigma_t[j] * tab[p][j];
      image = next;
    }
    return tab;
  }();
  return table;
}

template <typename Coeff>
BasicElement<Coeff> apply_galois(const BasicElement<Coeff>& x, int power) {
  const int p = ((power % kDegree) + kDegree) % kDegree;
  if (p == 0) return x;
  const auto& tab = galois_table()[p];
  BasicElement<Coeff> r;
  for (int j = 0; j < kDegree; ++j) {
    if (x[j] == 0) continue;
    for (int i = 0; i < kDegree; ++i) r[i] += x[j] * Coeff(tab[j][i]);
  }
  return r;
}

const std::array<std::array<double, kDegree>, kDegree>& double_embedding_matrix() {
  static const auto e = [] {
    std::array<std::array<double, kDegree>, kDegree> m{};
    for (int i = 0; i < kDegree; ++i) {
      const double tk = 2.0 * std::cos(kLabels[i] * M_PI / 21.0);
      double p = 1.0;
      for (int j = 0; j < kDegree; ++j) {
        m[i][j] = p;
        p *= tk;
      }
    }
    return m;
  }();
  return e;
}

using RealMatrix = std::array<std::array<Real, kDegree>, kDegree>;

RealMatrix embedding_matrix_inverse(Precision prec) {
  RealMatrix a;
  RealMatrix inv;
  for (int i = 0; i < kDegree; ++i) {
    const Real tk = Ball::two_cos_pi(kLabels[i], 21, prec).mid();
    Real p(1L, prec);
    for (int j = 0; j < kDegree; ++j) {
      a[i][j] = p;
      p *= tk;
      inv[i][j] = Real(i == j ? 1L : 0L, prec);
    }
  }
  for (int col = 0; col < kDegree; ++col) {
    int piv = col;
    for (int r = col + 1; r < kDegree; ++r)
      if (abs(a[r][col]) > abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(inv[col], inv[piv]);
    const Real d = a[col][col];
    for (int j = 0; j < kDegree; ++j) {
      a[col][j] /= d;
      inv[col][j] /= d;
    }
    for (int r = 0; r < kDegree; ++r) {
      if (r == col) continue;
      const Real f = a[r][col];
      if (f.is_zero()) continue;
      for (int j = 0; j < kDegree; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

const RealMatrix& cached_inverse(Precision prec) {
  thread_local Precision cached_prec = 0;
  thread_local RealMatrix cached;
  if (cached_prec != prec) {
    cached = embedding_matrix_inverse(prec);
    cached_prec = prec;
  }
  return cached;
}

template <typename Coeff>
Ball horner(const BasicElement<Coeff>& x, int k, Precision prec) {
  const Ball tk = Ball::two_cos_pi(k, 21, prec);
  auto coeff_ball = [&](int j) {
    if constexpr (std::is_same_v<Coeff, mpz_class>) {
      return Ball::from_integer(x[j], prec);
    } else {
      return Ball::from_rational(x[j], prec);
    }
  };
  Ball acc = coeff_ball(kDegree - 1);
  for (int j = kDegree - 2; j >= 0; --j) acc = acc * tk + coeff_ball(j);
  return acc;
}

}  // namespace

int label_index(int k) {
  for (int i = 0; i < kDegree; ++i)
    if (kLabels[i] == k) return i;
  throw std::invalid_argument("embedding label must be one of 1,5,11,13,17,19; got " + std::to_string(k));
}

int next_label(int k) {
  label_index(k);
  int r = (11 * k) % 42;
  if (r > 21) r = 42 - r;
  return r;
}

mpz_class polynomial_discriminant(const std::vector<mpz_class>& p) {
  const size_t n = p.size() - 1;
  if (n < 1) throw std::invalid_argument("discriminant of a constant");
  std::vector<mpz_class> dp(n);
  for (size_t i = 1; i <= n; ++i) dp[i - 1] = p[i] * static_cast<long>(i);
  const size_t m = n - 1;
  const size_t size = n + m;
  std::vector<std::vector<mpz_class>> s(size, std::vector<mpz_class>(size, mpz_class(0)));
  // Rows hold coefficients from the leading term down.
  for (size_t r = 0; r < m; ++r)
    for (size_t i = 0; i <= n; ++i) s[r][r + i] = p[n - i];
  for (size_t r = 0; r < n; ++r)
    for (size_t i = 0; i <= m; ++i) s[m + r][r + i] = dp[m - i];
  mpz_class res = det_bareiss(std::move(s));
  if ((n * (n - 1) / 2) % 2 == 1) res = -res;
  return res / p[n];
}

MinimalPolynomial derive_minimal_polynomial() {
  const IntPoly phi = cyclotomic(42);  // degree 12, palindromic
  // x^-6 Phi(x) = a_6 + sum_j a_{6+j} (x^j + x^-j) and x^j + x^-j = C_j(y).
  std::vector<IntPoly> cheb{IntPoly{2}, IntPoly{0, 1}};
  for (int j = 1; j < kDegree; ++j) {
    IntPoly next = poly_mul(IntPoly{0, 1}, cheb[j]);
    const IntPoly& prev = cheb[j - 1];
    for (size_t i = 0; i < prev.size(); ++i) next[i] -= prev[i];
    trim(next);
    cheb.push_back(next);
  }
  IntPoly m(kDegree + 1, mpz_class(0));
  m[0] = phi[6];
  for (int j = 1; j <= kDegree; ++j)
    for (size_t i = 0; i < cheb[j].size(); ++i) m[i] += phi[6 + j] * cheb[j][i];
  MinimalPolynomial out;
  for (int i = 0; i <= kDegree; ++i) out.coeffs[i] = m[i];
  out.discriminant = polynomial_discriminant(m);
  return out;
}

const MinimalPolynomial& minimal_polynomial() {
  static const MinimalPolynomial mp = [] {
    MinimalPolynomial m = derive_minimal_polynomial();
    if (m.coeffs[kDegree] != 1) throw std::logic_error("minimal polynomial is not monic");
    if (m.discriminant != 453789) throw std::logic_error("minimal polynomial discriminant is not 3^3 7^5");
    for (int k : kLabels) {
      const Ball t = Ball::two_cos_pi(k, 21, 200);
      Ball acc = Ball::from_integer(m.coeffs[kDegree], 200);
      for (int j = kDegree - 1; j >= 0; --j) acc = acc * t + Ball::from_integer(m.coeffs[j], 200);
      if (!acc.contains_zero() || acc.upper_abs() > Real(1e-40, 64))
        throw std::logic_error("2cos(k pi/21) is not a root of the minimal polynomial");
    }
    return m;
  }();
  return mp;
}

template <typename Coeff>
BasicElement<Coeff> BasicElement<Coeff>::reduce(std::vector<Coeff> c) {
  const auto& m = m_coeffs();
  for (size_t i = c.size(); i-- > static_cast<size_t>(kDegree);) {
    if (c[i] == 0) continue;
    const Coeff lead = c[i];
    for (int j = 0; j < kDegree; ++j) c[i - kDegree + j] -= lead * Coeff(m[j]);
    c[i] = 0;
  }
  BasicElement r;
  for (int j = 0; j < kDegree && j < static_cast<int>(c.size()); ++j) r.coeffs_[j] = c[j];
  return r;
}

template <typename Coeff>
bool BasicElement<Coeff>::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Coeff& c) { return c == 0; });
}

template <typename Coeff>
bool BasicElement<Coeff>::is_rational() const {
  return std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](const Coeff& c) { return c == 0; });
}

template <typename Coeff>
std::string BasicElement<Coeff>::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (int j = kDegree - 1; j >= 0; --j) {
    const Coeff& c = coeffs_[j];
    if (c == 0) continue;
    Coeff mag = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    if (j == 0 || mag != 1) os << mag.get_str();
    if (j >= 1) os << "t";
    if (j >= 2) os << "^" << j;
  }
  if (first) os << "0";
  return os.str();
}

template <typename Coeff>
BasicElement<Coeff>& BasicElement<Coeff>::operator+=(const BasicElement& o) {
  for (int i = 0; i < kDegree; ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

template <typename Coeff>
BasicElement<Coeff>& BasicElement<Coeff>::operator-=(const BasicElement& o) {
  for (int i = 0; i < kDegree; ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

template class BasicElement<mpq_class>;
template class BasicElement<mpz_class>;

FieldElement to_field(const IntegralElement& x) {
  FieldElement r;
  for (int i = 0; i < kDegree; ++i) r[i] = mpq_class(x[i]);
  return r;
}

std::optional<IntegralElement> to_integral(const FieldElement& x) {
  IntegralElement r;
  for (int i = 0; i < kDegree; ++i) {
    if (x[i].get_den() != 1) return std::nullopt;
    r[i] = x[i].get_num();
  }
  return r;
}

mpz_class denominator(const FieldElement& x) {
  mpz_class d = 1;
  for (int i = 0; i < kDegree; ++i) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), x[i].get_den_mpz_t());
  return d;
}

RationalMatrix6 multiplication_matrix(const FieldElement& x) {
  RationalMatrix6 m;
  FieldElement col = x;
  for (int j = 0; j < kDegree; ++j) {
    for (int i = 0; i < kDegree; ++i) m[i][j] = col[i];
    col *= FieldElement::t();
  }
  return m;
}

mpq_class determinant(RationalMatrix6 m) {
  mpq_class det = 1;
  for (int col = 0; col < kDegree; ++col) {
    int piv = col;
    while (piv < kDegree && m[piv][col] == 0) ++piv;
    if (piv == kDegree) return 0;
    if (piv != col) {
      std::swap(m[piv], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (int r = col + 1; r < kDegree; ++r) {
      if (m[r][col] == 0) continue;
      const mpq_class f = m[r][col] / m[col][col];
      for (int j = col; j < kDegree; ++j) m[r][j] -= f * m[col][j];
    }
  }
  return det;
}

FieldElement invert(const FieldElement& x) {
  if (x.is_zero()) throw std::domain_error("inverse of zero in L");
  // Solve M_x y = e_0.
  RationalMatrix6 m = multiplication_matrix(x);
  std::array<mpq_class, kDegree> rhs;
  rhs.fill(0);
  rhs[0] = 1;
  for (int col = 0; col < kDegree; ++col) {
    int piv = col;
    while (m[piv][col] == 0) ++piv;
    std::swap(m[piv], m[col]);
    std::swap(rhs[piv], rhs[col]);
    for (int r = 0; r < kDegree; ++r) {
      if (r == col || m[r][col] == 0) continue;
      const mpq_class f = m[r][col] / m[col][col];
      for (int j = col; j < kDegree; ++j) m[r][j] -= f * m[col][j];
      rhs[r] -= f * rhs[col];
    }
  }
  FieldElement y;
  for (int i = 0; i < kDegree; ++i) y[i] = rhs[i] / m[i][i];
  return y;
}

FieldElement galois_apply(const FieldElement& x, int power) { return apply_galois(x, power); }
IntegralElement galois_apply(const IntegralElement& x, int power) { return apply_galois(x, power); }

NormTrace norm_trace(const FieldElement& x) {
  const RationalMatrix6 m = multiplication_matrix(x);
  mpq_class tr = 0;
  for (int i = 0; i < kDegree; ++i) tr += m[i][i];
  return {determinant(m), tr};
}

NormTrace norm_trace_via_conjugates(const FieldElement& x) {
  FieldElement prod(1L);
  FieldElement sum;
  for (int p = 0; p < kDegree; ++p) {
    const FieldElement c = galois_apply(x, p);
    prod *= c;
    sum += c;
  }
  if (!prod.is_rational() || !sum.is_rational())
    throw std::logic_error("product of conjugates is not rational");
  return {prod[0], sum[0]};
}

mpz_class norm(const IntegralElement& x) {
  const mpq_class n = norm(to_field(x));
  return n.get_num();
}

Ball embed_ball(const FieldElement& x, int k, Precision prec) {
  label_index(k);
  return horner(x, k, prec);
}

Ball embed_ball(const IntegralElement& x, int k, Precision prec) {
  label_index(k);
  return horner(x, k, prec);
}

EmbeddingValue embed(const FieldElement& x, int k, Precision prec) {
  label_index(k);
  if (x.is_zero()) return {k, Ball(prec), prec};
  for (Precision work = prec + 16;; work *= 2) {
    Ball b = embed_ball(x, k, work);
    Real limit = ldexp(abs(b.mid()), -static_cast<long>(prec));
    if (!b.contains_zero() && b.rad() <= limit) {
      Real mid = b.mid().with_precision(prec);
      Real rad(64);
      Real diff = abs(mid - b.mid());
      mpfr_add(rad.get(), b.rad().get(), diff.get(), MPFR_RNDU);
      return {k, Ball(mid, rad), prec};
    }
    if (work > kSignPrecisionCap * 4) throw UndecidableSign("embedding precision cap exceeded");
  }
}

double embed_double(const IntegralElement& x, int k) {
  const auto& e = double_embedding_matrix()[label_index(k)];
  double v = 0;
  for (int j = 0; j < kDegree; ++j) v += e[j] * x[j].get_d();
  return v;
}

int certified_sign(const FieldElement& x, int k, Precision start, Precision cap) {
  if (x.is_zero()) return 0;
  for (Precision prec = start; prec <= cap; prec *= 2) {
    const int s = embed_ball(x, k, prec).certified_sign();
    if (s != 0) return s;
  }
  throw UndecidableSign("sign of sigma_" + std::to_string(k) + "(" + x.to_string() +
                        ") undecided at precision cap");
}

std::array<int, kDegree> sign_pattern(const FieldElement& x, Precision start) {
  std::array<int, kDegree> s{};
  for (int i = 0; i < kDegree; ++i) s[i] = certified_sign(x, kLabels[i], start);
  return s;
}

bool is_totally_positive(const FieldElement& x) {
  const auto s = sign_pattern(x);
  return std::all_of(s.begin(), s.end(), [](int v) { return v > 0; });
}

long residue_mod_prime(const IntegralElement& x, long ell, long root) {
  mpz_class acc = 0;
  for (int j = kDegree - 1; j >= 0; --j) {
    acc = acc * root + x[j];
    acc %= ell;
  }
  if (acc < 0) acc += ell;
  return acc.get_si();
}

bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<long> roots_mod_ell(long ell) {
  if (!is_prime(ell)) throw std::invalid_argument("roots_mod_ell needs a prime");
  const auto& m = m_coeffs();
  std::vector<long> roots;
  for (long r = 0; r < ell; ++r) {
    mpz_class acc = 0;
    for (int j = kDegree; j >= 0; --j) acc = (acc * r + m[j]) % ell;
    if (acc == 0) roots.push_back(r);
  }
  return roots;
}

PrimeIdealData make_prime_ideal(long ell, long root, const IntegralElement& generator) {
  if (!is_prime(ell)) throw std::invalid_argument("ell is not prime");
  const auto roots = roots_mod_ell(ell);
  if (std::find(roots.begin(), roots.end(), ((root % ell) + ell) % ell) == roots.end())
    throw std::invalid_argument("m(root) is not 0 mod ell");
  const mpz_class n = norm(generator);
  if (abs(n) != ell) throw std::invalid_argument("generator norm is not +-ell");
  if (residue_mod_prime(generator, ell, root) != 0)
    throw std::invalid_argument("generator does not lie in (ell, t - root)");
  PrimeIdealData p;
  p.ell = ell;
  p.root = ((root % ell) + ell) % ell;
  p.generator = generator;
  p.totally_positive = is_totally_positive(to_field(generator));
  return p;
}

std::vector<IntegralElement> enumerate_box(const std::array<mpq_class, kDegree>& squared_bounds) {
  const auto& e = double_embedding_matrix();
  std::array<double, kDegree> w{};
  for (int k = 0; k < kDegree; ++k) {
    if (squared_bounds[k] <= 0) throw std::invalid_argument("enumerate_box bounds must be positive");
    w[k] = 1.0 / squared_bounds[k].get_d();
  }
  // Gram matrix of sum_k w_k sigma_k(x)^2, then the Fincke-Pohst decomposition.
  double q[kDegree][kDegree];
  for (int i = 0; i < kDegree; ++i)
    for (int j = 0; j < kDegree; ++j) {
      double s = 0;
      for (int k = 0; k < kDegree; ++k) s += w[k] * e[k][i] * e[k][j];
      q[i][j] = s;
    }
  for (int i = 0; i < kDegree; ++i) {
    for (int j = i + 1; j < kDegree; ++j) {
      q[j][i] = q[i][j];
      q[i][j] /= q[i][i];
    }
    for (int k = i + 1; k < kDegree; ++k)
      for (int l = k; l < kDegree; ++l) q[k][l] -= q[k][i] * q[i][l];
  }
  const double radius = kDegree * (1.0 + 1e-9) + 1e-12;

  std::vector<IntegralElement> out;
  std::array<long, kDegree> x{};
  auto accept = [&] {
    IntegralElement el;
    for (int j = 0; j < kDegree; ++j) el[j] = x[j];
    for (int k = 0; k < kDegree; ++k) {
      double v = 0;
      for (int j = 0; j < kDegree; ++j) v += e[k][j] * static_cast<double>(x[j]);
      const double b2 = squared_bounds[k].get_d();
      const double gap = b2 - v * v;
      const double slack = 1e-9 * (b2 + v * v + 1.0);
      if (gap > slack) continue;
      if (gap < -slack) return;
      const FieldElement y = to_field(el * el) - FieldElement(squared_bounds[k]);
      if (certified_sign(y, kLabels[k]) > 0) return;
    }
    out.push_back(std::move(el));
  };
  std::function<void(int, double)> rec = [&](int i, double rem) {
    double center = 0;
    for (int j = i + 1; j < kDegree; ++j) center -= q[i][j] * static_cast<double>(x[j]);
    const double r = std::sqrt(std::max(0.0, rem / q[i][i]));
    const long lo = static_cast<long>(std::ceil(center - r - 1e-9));
    const long hi = static_cast<long>(std::floor(center + r + 1e-9));
    for (long v = lo; v <= hi; ++v) {
      const double diff = static_cast<double>(v) - center;
      const double next = rem - q[i][i] * diff * diff;
      if (next < -1e-9) continue;
      x[i] = v;
      if (i == 0) {
        accept();
      } else {
        rec(i - 1, next);
      }
    }
    x[i] = 0;
  };
  rec(kDegree - 1, radius);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<IntegralElement> enumerate_box(const std::array<double, kDegree>& bounds) {
  std::array<mpq_class, kDegree> sq;
  for (int k = 0; k < kDegree; ++k) {
    const mpq_class b(bounds[k]);
    sq[k] = b * b;
  }
  return enumerate_box(sq);
}

std::vector<IntegralElement> enumerate_box(const mpq_class& squared_bound) {
  std::array<mpq_class, kDegree> sq;
  sq.fill(squared_bound);
  return enumerate_box(sq);
}

std::optional<IntegralElement> integral_sqrt(const IntegralElement& s) {
  if (s.is_zero()) return IntegralElement();
  const FieldElement fs = to_field(s);
  for (int k : kLabels)
    if (certified_sign(fs, k) < 0) return std::nullopt;
  const mpz_class n = norm(s);
  if (mpz_perfect_square_p(n.get_mpz_t()) == 0) return std::nullopt;

  size_t bits = 1;
  for (int j = 0; j < kDegree; ++j) bits = std::max(bits, mpz_sizeinbase(s[j].get_mpz_t(), 2));
  const Precision prec = 96 + static_cast<Precision>(bits);
  const RealMatrix& inv = cached_inverse(prec);
  std::array<Real, kDegree> roots;
  for (int i = 0; i < kDegree; ++i) roots[i] = sqrt(embed_ball(s, kLabels[i], prec).mid());

  for (unsigned pattern = 0; pattern < (1U << (kDegree - 1)); ++pattern) {
    std::array<Real, kDegree> v;
    for (int i = 0; i < kDegree; ++i) {
      const bool neg = i > 0 && ((pattern >> (i - 1)) & 1U);
      v[i] = neg ? -roots[i] : roots[i];
    }
    IntegralElement cand;
    bool near = true;
    for (int j = 0; j < kDegree && near; ++j) {
      Real c(prec);
      for (int i = 0; i < kDegree; ++i) c += inv[j][i] * v[i];
      cand[j] = c.round_to_integer();
      if (abs(c - Real::from_integer(cand[j], prec)) > Real(0.25, 64)) near = false;
    }
    if (near && cand * cand == s) return cand;
  }
  return std::nullopt;
}

std::optional<FieldElement> field_sqrt(const FieldElement& s) {
  const mpz_class den = denominator(s);
  const FieldElement scaled = mpq_class(den * den) * s;
  const auto r = integral_sqrt(*to_integral(scaled));
  if (!r) return std::nullopt;
  return mpq_class(1, den) * to_field(*r);
}

std::optional<TotallyPositiveAssociate> find_totally_positive_associate(const IntegralElement& pi,
                                                                         double height) {
  const FieldElement fpi = to_field(pi);
  if (fpi.is_zero()) return std::nullopt;
  const auto target = sign_pattern(fpi);
  if (std::all_of(target.begin(), target.end(), [](int v) { return v > 0; })) {
    return TotallyPositiveAssociate{pi, IntegralElement(1L)};
  }
  if (!(height > 0)) return std::nullopt;
  const mpq_class h(height);
  auto candidates = enumerate_box(h * h);
  std::vector<std::pair<double, IntegralElement>> units;
  for (auto& u : candidates) {
    const mpz_class n = norm(u);
    if (n != 1 && n != -1) continue;
    double size = 0;
    for (int k : kLabels) size = std::max(size, std::abs(embed_double(u, k)));
    units.emplace_back(size, std::move(u));
  }
  std::stable_sort(units.begin(), units.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [size, u] : units) {
    if (sign_pattern(to_field(u)) != target) continue;
    const IntegralElement assoc = u * pi;
    if (is_totally_positive(to_field(assoc))) return TotallyPositiveAssociate{assoc, u};
  }
  return std::nullopt;
}

Real minkowski_bound(Precision prec) {
  const mpz_class disc = abs(minimal_polynomial().discriminant);
  return Real(720L, prec) / Real(46656L, prec) * sqrt(Real::from_integer(disc, prec));
}

IntegralMatrix generator_b() { return {IntegralElement(0L), IntegralElement(-1L), IntegralElement(1L), IntegralElement::t()}; }

}  // namespace hecke
