#include "hecke/cm_field.hpp"

#include <algorithm>
#include <thread>

namespace hecke {

bool is_squarefree(long d) {
  if (d <= 0) return false;
  for (long p = 2; p * p <= d; ++p)
    if (d % (p * p) == 0) return false;
  return true;
}

MElement::MElement(FieldElement a_, FieldElement b_, long d_) : a(std::move(a_)), b(std::move(b_)), d(d_) {
  if (!is_squarefree(d)) throw std::invalid_argument("d must be a positive squarefree integer");
}

MElement operator*(const MElement& x, const MElement& y) {
  if (x.d != y.d) throw std::invalid_argument("mixing different quadratic extensions");
  return {x.a * y.a - mpq_class(x.d) * (x.b * y.b), x.a * y.b + x.b * y.a, x.d};
}

MNormTrace m_norm_trace(const MElement& alpha) {
  return {alpha.a * alpha.a + mpq_class(alpha.d) * (alpha.b * alpha.b), mpq_class(2) * alpha.a};
}

int SignVector::plus_count() const {
  return static_cast<int>(std::count(s.begin(), s.end(), 1));
}

SignVector SignVector::negated() const {
  SignVector r;
  for (int i = 0; i < kDegree; ++i) r.s[i] = -s[i];
  return r;
}

std::string SignVector::to_string() const {
  std::string out;
  for (int v : s) out += v > 0 ? '+' : '-';
  return out;
}

SignVector SignVector::parse(const std::string& text) {
  if (text.size() != kDegree) throw std::invalid_argument("sign vector must have six entries");
  SignVector r;
  for (int i = 0; i < kDegree; ++i) {
    if (text[i] == '+') {
      r.s[i] = 1;
    } else if (text[i] == '-') {
      r.s[i] = -1;
    } else {
      throw std::invalid_argument("sign vector entries must be '+' or '-'");
    }
  }
  return r;
}

unsigned SignVector::plus_mask() const {
  unsigned m = 0;
  for (int i = 0; i < kDegree; ++i)
    if (s[i] > 0) m |= 1U << i;
  return m;
}

SignVector sign_vector(const FieldElement& b) {
  if (b.is_zero()) throw std::domain_error("sign vector of zero");
  return SignVector{sign_pattern(b)};
}

bool weil_signature_check(const SignVector& s) { return s.plus_count() == 3; }

std::optional<FieldElement> trace_constraint_check(const FieldElement& c, long ell, long d) {
  if (!is_squarefree(d)) throw std::invalid_argument("d must be a positive squarefree integer");
  const FieldElement target = mpq_class(1, 4 * d) * (FieldElement(4 * ell) - c * c);
  return field_sqrt(target);
}

namespace {

bool within_coeff_bound(const FieldElement& x, long coeff_bound) {
  for (long j = std::max(coeff_bound, 0L); j < kDegree; ++j)
    if (x[static_cast<int>(j)] != 0) return false;
  return true;
}

std::optional<NormSolution> try_b(const IntegralElement& b, long d, long ell, long coeff_bound) {
  const FieldElement fb = to_field(b);
  if (b.is_zero() || !within_coeff_bound(fb, coeff_bound)) return std::nullopt;
  if (certified_sign(fb, 1) <= 0) return std::nullopt;
  const IntegralElement rest = IntegralElement(ell) - IntegralElement(d) * b * b;
  const auto a = integral_sqrt(rest);
  if (!a) return std::nullopt;
  const FieldElement fa = to_field(*a);
  if (!within_coeff_bound(fa, coeff_bound)) return std::nullopt;
  NormSolution sol;
  sol.alpha = MElement(fa, fb, d);
  sol.ell = ell;
  sol.sign_vector = sign_vector(fb);
  sol.weil_ok = weil_signature_check(sol.sign_vector);
  sol.trace = mpq_class(2) * fa;
  sol.discriminant_witness = trace_constraint_check(sol.trace, ell, d);
  return sol;
}

}  // namespace

std::vector<NormSolution> solve_norm_equation(long d, long ell, long coeff_bound, unsigned workers) {
  if (!is_squarefree(d)) throw std::invalid_argument("d must be a positive squarefree integer");
  if (ell < 2) throw std::invalid_argument("ell must be a prime");
  if (coeff_bound < 1) throw std::invalid_argument("coeff_bound must be at least 1");
  // |sigma_k(b)|^2 <= ell/d follows from a^2 + d b^2 = ell with a, b real.
  const auto candidates = enumerate_box(mpq_class(ell, d));
  workers = std::max(1U, workers);
  std::vector<std::vector<NormSolution>> parts(workers);
  auto run = [&](unsigned w) {
    for (size_t i = w; i < candidates.size(); i += workers) {
      if (auto sol = try_b(candidates[i], d, ell, coeff_bound)) parts[w].push_back(std::move(*sol));
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  std::vector<NormSolution> out;
  for (auto& p : parts)
    for (auto& s : p) out.push_back(std::move(s));
  std::sort(out.begin(), out.end(), [](const NormSolution& x, const NormSolution& y) {
    if (!(x.alpha.a == y.alpha.a)) return x.alpha.a < y.alpha.a;
    return x.alpha.b < y.alpha.b;
  });
  return out;
}

long quadratic_conductor(long d) {
  if (!is_squarefree(d)) throw std::invalid_argument("d must be a positive squarefree integer");
  const long D = -d;
  const bool one_mod_four = ((D % 4) + 4) % 4 == 1;
  return one_mod_four ? d : 4 * d;
}

bool conductor_subfield_check(long d) { return 42 % quadratic_conductor(d) == 0; }

FaltingsBound faltings_bound(long g, long rad) {
  if (g < 1 || rad < 1) throw std::invalid_argument("faltings_bound needs g >= 1 and rad >= 1");
  FaltingsBound out;
  mpz_class a;
  mpz_class b;
  mpz_ui_pow_ui(a.get_mpz_t(), static_cast<unsigned long>(3 * g), static_cast<unsigned long>(25 * g * g));
  mpz_ui_pow_ui(b.get_mpz_t(), static_cast<unsigned long>(rad), static_cast<unsigned long>(5 * g));
  out.value = a * b;
  const Precision prec = 64;
  const Real lg = log(Real::from_integer(out.value, static_cast<Precision>(mpz_sizeinbase(out.value.get_mpz_t(), 2) + prec)));
  out.log10 = (lg / log(Real(10L, prec))).to_double();
  return out;
}

}  // namespace hecke
