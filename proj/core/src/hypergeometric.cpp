#include "hecke/hypergeometric.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace hecke {
namespace {

constexpr Precision kGuardBits = 32;
constexpr double kTransformRadius = 0.8;

bool is_nonpositive_integer(const mpq_class& x) { return x.get_den() == 1 && x <= 0; }
bool is_integer(const mpq_class& x) { return x.get_den() == 1; }

Real rat(const mpq_class& x, Precision prec) { return Real::from_rational(x, prec); }

// z^e on the principal branch, with a point on the negative real axis taken
// from the given side.
Complex cpow(const Complex& z, const mpq_class& e, Precision prec, Side side) {
  if (z.is_zero()) {
    if (e > 0) return Complex(prec);
    if (e == 0) return Complex(Real(1L, prec));
    throw std::domain_error("hyp2f1: zero raised to a negative power");
  }
  Real theta = arg(z);
  if (z.im.is_zero() && z.re.sign() < 0) {
    if (side == Side::None) throw std::domain_error("hyp2f1: power on the branch cut without a side");
    theta = side == Side::Lower ? -Real::pi(prec) : Real::pi(prec);
  }
  const Real mod = log(abs(z));
  const Real er = rat(e, prec);
  return polar(exp(er * mod), er * theta);
}

Side flip(Side s) {
  if (s == Side::Upper) return Side::Lower;
  if (s == Side::Lower) return Side::Upper;
  return Side::None;
}

// Gamma products: prod Gamma(num) / prod Gamma(den). A pole in the
// denominator makes the ratio vanish; a pole in the numerator is an error.
std::optional<Real> gamma_ratio(const std::vector<mpq_class>& num, const std::vector<mpq_class>& den, Precision prec) {
  for (const auto& x : den)
    if (is_nonpositive_integer(x)) return Real(prec);
  Real r(1L, prec);
  for (const auto& x : num) {
    if (is_nonpositive_integer(x)) return std::nullopt;
    r *= tgamma(rat(x, prec));
  }
  for (const auto& x : den) r /= tgamma(rat(x, prec));
  return r;
}

struct Term {
  Real coeff;
  Complex prefactor;
  HypergeometricParams params;
  Complex zeta;
};

struct Transform {
  std::string name;
  Complex zeta;
  std::function<std::optional<std::vector<Term>>()> build;
};

HypResult combine(const std::vector<Term>& terms, const std::string& name, Precision prec, long max_terms) {
  HypResult out{Complex(prec), Real(prec), name};
  Real magnitude(prec);
  for (const auto& t : terms) {
    if (t.coeff.is_zero()) continue;
    HypResult s = hyp2f1_series(t.params, t.zeta, prec, max_terms);
    const Complex part = (t.coeff * t.prefactor) * s.value;
    out.value += part;
    const Real scale = abs(t.coeff) * abs(t.prefactor);
    out.error += scale * s.error;
    magnitude += abs(part);
  }
  out.error += ldexp(magnitude, 8 - static_cast<long>(prec));
  return out;
}

std::vector<Transform> transforms(const HypergeometricParams& p, const Complex& w, Side side, Precision prec) {
  const mpq_class &a = p.a, &b = p.b, &c = p.c;
  const Complex one(Real(1L, prec));
  const Complex omw = one - w;
  std::vector<Transform> out;

  out.push_back({"series", w, [=]() -> std::optional<std::vector<Term>> {
                   return std::vector<Term>{{Real(1L, prec), one, p, w}};
                 }});

  // A&S 15.3.4
  out.push_back({"pfaff", w / (w - one), [=]() -> std::optional<std::vector<Term>> {
                   const Complex z = w / (w - one);
                   return std::vector<Term>{{Real(1L, prec), cpow(omw, -a, prec, flip(side)), {a, c - b, c}, z}};
                 }});

  // A&S 15.3.6
  out.push_back({"one_minus_w", omw, [=]() -> std::optional<std::vector<Term>> {
                   const mpq_class s = c - a - b;
                   if (is_integer(s)) return std::nullopt;
                   auto g1 = gamma_ratio({c, s}, {c - a, c - b}, prec);
                   auto g2 = gamma_ratio({c, -s}, {a, b}, prec);
                   if (!g1 || !g2) return std::nullopt;
                   return std::vector<Term>{{*g1, one, {a, b, a + b - c + 1}, omw},
                                            {*g2, cpow(omw, s, prec, flip(side)), {c - a, c - b, s + 1}, omw}};
                 }});

  // A&S 15.3.7
  out.push_back({"inverse", one / w, [=]() -> std::optional<std::vector<Term>> {
                   if (is_integer(a - b) || w.is_zero()) return std::nullopt;
                   auto g1 = gamma_ratio({c, b - a}, {b, c - a}, prec);
                   auto g2 = gamma_ratio({c, a - b}, {a, c - b}, prec);
                   if (!g1 || !g2) return std::nullopt;
                   const Complex mw = -w;
                   const Complex z = one / w;
                   return std::vector<Term>{{*g1, cpow(mw, -a, prec, flip(side)), {a, 1 - c + a, 1 - b + a}, z},
                                            {*g2, cpow(mw, -b, prec, flip(side)), {b, 1 - c + b, 1 - a + b}, z}};
                 }});

  // A&S 15.3.8
  out.push_back({"inverse_one_minus_w", one / omw, [=]() -> std::optional<std::vector<Term>> {
                   if (is_integer(a - b) || omw.is_zero()) return std::nullopt;
                   auto g1 = gamma_ratio({c, b - a}, {b, c - a}, prec);
                   auto g2 = gamma_ratio({c, a - b}, {a, c - b}, prec);
                   if (!g1 || !g2) return std::nullopt;
                   const Complex z = one / omw;
                   return std::vector<Term>{{*g1, cpow(omw, -a, prec, flip(side)), {a, c - b, a - b + 1}, z},
                                            {*g2, cpow(omw, -b, prec, flip(side)), {b, c - a, b - a + 1}, z}};
                 }});

  // A&S 15.3.9
  out.push_back({"one_minus_inverse", one - one / w, [=]() -> std::optional<std::vector<Term>> {
                   const mpq_class s = c - a - b;
                   if (is_integer(s) || w.is_zero()) return std::nullopt;
                   auto g1 = gamma_ratio({c, s}, {c - a, c - b}, prec);
                   auto g2 = gamma_ratio({c, -s}, {a, b}, prec);
                   if (!g1 || !g2) return std::nullopt;
                   const Complex z = one - one / w;
                   const Complex t2 = cpow(omw, s, prec, flip(side)) * cpow(w, a - c, prec, side);
                   return std::vector<Term>{{*g1, cpow(w, -a, prec, side), {a, a - c + 1, a + b - c + 1}, z},
                                            {*g2, t2, {c - a, 1 - a, c - a - b + 1}, z}};
                 }});
  return out;
}

HypResult evaluate(const HypergeometricParams& p, const Complex& w, Side side, Precision prec, long max_terms);

// Taylor re-expansion of the hypergeometric ODE about a point where the
// transformations converge well.
HypResult ode_continuation(const HypergeometricParams& p, const Complex& w, Side side, Precision prec, long max_terms) {
  const Real half = Real(1L, prec) / 2;
  const Real im0 = Real(6L, prec) / 10;
  const Complex w0(half, w.im.sign() < 0 ? -im0 : im0);
  const HypResult f0 = evaluate(p, w0, side, prec, max_terms);
  const HypResult f1 = evaluate({p.a + 1, p.b + 1, p.c + 1}, w0, side, prec, max_terms);
  const Real ab = rat(p.a * p.b, prec);
  const Real apb1 = rat(p.a + p.b + 1, prec);
  const Complex one(Real(1L, prec));
  const Complex P0 = w0 * (one - w0);
  const Complex P1 = one - w0 * 2L;
  const Complex Q0 = Complex(rat(p.c, prec)) - w0 * apb1;
  const Real Q1 = -apb1;

  const Complex h = w - w0;
  Complex u_prev = f0.value;
  Complex u_cur = f1.value * (ab / rat(p.c, prec));
  Complex hp = h;
  Complex sum = u_prev + u_cur * h;
  Real magnitude = abs(u_prev) + abs(u_cur * h);
  const Real threshold = ldexp(Real(1L, prec), -static_cast<long>(prec) - 8);
  int small = 0;
  for (long n = 0; n < max_terms; ++n) {
    const Real nr(n, prec);
    const Complex lhs1 = P1 * (nr * (nr + 1L)) + Q0 * (nr + 1L);
    const Real lhs0 = -(nr * (nr - 1L)) + Q1 * nr - ab;
    const Complex u_next = -(lhs1 * u_cur + u_prev * lhs0) / (P0 * ((nr + 1L) * (nr + 2L)));
    hp *= h;
    const Complex term = u_next * hp;
    sum += term;
    const Real at = abs(term);
    magnitude += at;
    if (at <= threshold * abs(sum)) {
      if (++small >= 4) {
        HypResult out{sum, Real(prec), "ode"};
        out.error = ldexp(magnitude, 10 - static_cast<long>(prec)) + f0.error * 4L + f1.error * abs(h) * 4L;
        return out;
      }
    } else {
      small = 0;
    }
    u_prev = u_cur;
    u_cur = u_next;
  }
  throw std::runtime_error("hyp2f1: ODE continuation did not converge");
}

HypResult evaluate(const HypergeometricParams& p, const Complex& w, Side side, Precision prec, long max_terms) {
  const auto candidates = transforms(p, w, side, prec);
  std::vector<std::pair<double, size_t>> order;
  for (size_t i = 0; i < candidates.size(); ++i) order.emplace_back(abs(candidates[i].zeta).to_double(), i);
  std::sort(order.begin(), order.end());
  for (const auto& [mod, i] : order) {
    if (mod > kTransformRadius) break;
    const auto terms = candidates[i].build();
    if (!terms) continue;
    return combine(*terms, candidates[i].name, prec, max_terms);
  }
  if (!w.im.is_zero()) return ode_continuation(p, w, side, prec, max_terms);
  for (const auto& [mod, i] : order) {
    if (mod >= 0.97) break;
    if (const auto terms = candidates[i].build()) return combine(*terms, candidates[i].name, prec, max_terms);
  }
  throw std::domain_error("hyp2f1: no applicable transformation");
}

}  // namespace

HypergeometricParams HypergeometricParams::triangle_14_21_42() {
  return from_angles(mpq_class(1, 14), mpq_class(1, 21), mpq_class(1, 42));
}

HypergeometricParams HypergeometricParams::from_angles(const mpq_class& alpha, const mpq_class& beta,
                                                       const mpq_class& gamma) {
  HypergeometricParams p{(1 - alpha - beta + gamma) / 2, (1 - alpha - beta - gamma) / 2, 1 - alpha};
  p.a.canonicalize();
  p.b.canonicalize();
  p.c.canonicalize();
  return p;
}

PrecisionContext::PrecisionContext() : tolerance(ldexp(Real(1L, 64), -64)) {}

PrecisionContext::PrecisionContext(Precision prec, const Real& tol, long terms, bool check)
    : precision(prec), tolerance(tol), max_terms(terms), cross_check(check) {
  if (prec < 16) throw std::invalid_argument("precision must be at least 16 bits");
  if (terms < 1) throw std::invalid_argument("max_terms must be positive");
  if (tol < ldexp(Real(1L, 64), 6 - static_cast<long>(prec)))
    throw std::invalid_argument("tolerance below 2^(6 - precision) cannot be met");
}

PrecisionContext PrecisionContext::with_precision(Precision prec) {
  return {prec, ldexp(Real(1L, 64), -static_cast<long>(prec / 2)), 200000, false};
}

PrecisionContext PrecisionContext::doubled() const {
  PrecisionContext c = *this;
  c.precision = precision * 2;
  return c;
}

HypResult hyp2f1_series(const HypergeometricParams& p, const Complex& w, Precision prec, long max_terms) {
  if (is_nonpositive_integer(p.c)) {
    const bool terminates_first = (is_nonpositive_integer(p.a) && p.a > p.c) || (is_nonpositive_integer(p.b) && p.b > p.c);
    if (!terminates_first) throw std::domain_error("hyp2f1: c is a non-positive integer");
  }
  const bool terminating = is_nonpositive_integer(p.a) || is_nonpositive_integer(p.b);
  if (!terminating && !(abs(w) < Real(1L, prec))) throw std::domain_error("hyp2f1_series: |w| >= 1");
  const Real a = rat(p.a, prec), b = rat(p.b, prec), c = rat(p.c, prec);
  const double aa = std::abs(p.a.get_d()), bb = std::abs(p.b.get_d()), cc = std::abs(p.c.get_d());
  const double wm = abs(w).to_double();
  Complex term(Real(1L, prec));
  Complex sum = term;
  Real magnitude(1L, prec);
  const Real eps = ldexp(Real(1L, prec), -static_cast<long>(prec) - 4);
  for (long n = 0; n < max_terms; ++n) {
    const Real nr(n, prec);
    const Real num = (a + nr) * (b + nr);
    if (num.is_zero()) return {sum, ldexp(magnitude, 4 - static_cast<long>(prec)), "series"};
    term *= w * (num / ((c + nr) * (nr + 1L)));
    sum += term;
    const Real at = abs(term);
    magnitude += at;
    const double m = static_cast<double>(n + 1);
    if (m > cc) {
      // |t_{j+1}/t_j| <= q for all j > n.
      const double q = wm * (1 + aa / m) * (1 + bb / m) / (1 - cc / m) * (1 + 1e-12);
      if (q < 1) {
        const Real tail = at * Real(q / (1 - q), 64);
        if (tail <= eps * abs(sum) || at.is_zero()) {
          return {sum, tail + ldexp(magnitude, 4 - static_cast<long>(prec)) * Real(static_cast<long>(n + 2), 64),
                  "series"};
        }
      }
    }
  }
  throw std::runtime_error("hyp2f1_series: max_terms exhausted");
}

HypResult hyp2f1_one_minus(const HypergeometricParams& p, const Complex& x, const PrecisionContext& ctx, Side side) {
  const Precision prec = ctx.precision + kGuardBits;
  const Complex xx = x.with_precision(prec);
  const mpq_class s = p.c - p.a - p.b;
  const bool on_cut = xx.im.is_zero() && xx.re.sign() < 0;
  if (!on_cut) side = Side::None;
  if (abs(xx).to_double() > kTransformRadius || is_integer(s) || xx.is_zero()) {
    const Complex w = Complex(Real(1L, prec)) - xx;
    return hyp2f1(p, w, ctx, flip(side));
  }
  auto g1 = gamma_ratio({p.c, s}, {p.c - p.a, p.c - p.b}, prec);
  auto g2 = gamma_ratio({p.c, -s}, {p.a, p.b}, prec);
  if (!g1 || !g2) return hyp2f1(p, Complex(Real(1L, prec)) - xx, ctx, flip(side));
  const Complex one(Real(1L, prec));
  const std::vector<Term> terms{{*g1, one, {p.a, p.b, p.a + p.b - p.c + 1}, xx},
                                {*g2, cpow(xx, s, prec, side), {p.c - p.a, p.c - p.b, s + 1}, xx}};
  HypResult out = combine(terms, "one_minus_w", prec, ctx.max_terms);
  out.value = out.value.with_precision(ctx.precision);
  out.error = out.error.with_precision(64);
  return out;
}

Real gauss_sum(const HypergeometricParams& p, Precision prec) {
  if (p.c - p.a - p.b <= 0) throw std::domain_error("gauss_sum: needs c - a - b > 0");
  auto g = gamma_ratio({p.c, p.c - p.a - p.b}, {p.c - p.a, p.c - p.b}, prec);
  if (!g) throw std::domain_error("gauss_sum: c is a non-positive integer");
  return *g;
}

HypResult hyp2f1(const HypergeometricParams& p, const Complex& w, const PrecisionContext& ctx, Side side) {
  if (is_nonpositive_integer(p.c)) throw std::domain_error("hyp2f1: c is a non-positive integer");
  const Precision prec = ctx.precision + kGuardBits;
  const Complex z = w.with_precision(prec);
  const bool on_cut = z.im.is_zero() && z.re > Real(1L, prec);
  if (!on_cut) side = Side::None;
  if (on_cut && side == Side::None) throw std::domain_error("hyp2f1: w on [1, inf) needs a side");
  const bool terminating = is_nonpositive_integer(p.a) || is_nonpositive_integer(p.b);

  HypResult out{Complex(prec), Real(prec), ""};
  if (z.im.is_zero() && z.re == Real(1L, prec) && !terminating) {
    out = HypResult{Complex(gauss_sum(p, prec)), ldexp(Real(1L, prec), -static_cast<long>(prec) + 8), "gauss"};
  } else if (terminating) {
    out = hyp2f1_series(p, z, prec, ctx.max_terms);
  } else {
    out = evaluate(p, z, side, prec, ctx.max_terms);
  }
  if (ctx.cross_check && out.method != "series" && out.method != "gauss") {
    PrecisionContext twice = ctx.doubled();
    twice.cross_check = false;
    const HypResult hi = hyp2f1(p, w, twice, side);
    out.error = max(out.error, abs(hi.value.with_precision(prec) - out.value));
  }
  out.value = out.value.with_precision(ctx.precision);
  out.error = out.error.with_precision(64);
  return out;
}

}  // namespace hecke
