#pragma once

// Arithmetic in M = L(sqrt(-d)), the relative norm equation a^2 + d b^2 = l,
// sign vectors of b, the trace constraint, conductor checks and the
// explicit Faltings-height bound.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hecke/field.hpp"

namespace hecke {

bool is_squarefree(long d);

struct MElement {
  FieldElement a;
  FieldElement b;
  long d = 1;

  MElement() = default;
  MElement(FieldElement a_, FieldElement b_, long d_);

  [[nodiscard]] MElement conjugate() const { return {a, -b, d}; }
  friend MElement operator*(const MElement& x, const MElement& y);
  friend bool operator==(const MElement& x, const MElement& y) {
    return x.d == y.d && x.a == y.a && x.b == y.b;
  }
};

struct MNormTrace {
  FieldElement norm;
  FieldElement trace;
};
MNormTrace m_norm_trace(const MElement& alpha);

// Signs of sigma_k(b) in k-order (1, 5, 11, 13, 17, 19).
struct SignVector {
  std::array<int, kDegree> s{};

  [[nodiscard]] int plus_count() const;
  [[nodiscard]] SignVector negated() const;
  // Six characters, '+' or '-'.
  [[nodiscard]] std::string to_string() const;
  static SignVector parse(const std::string& text);
  // Bit i set iff the i-th entry in k-order is positive.
  [[nodiscard]] unsigned plus_mask() const;
  friend bool operator==(const SignVector&, const SignVector&) = default;
};

// Throws std::domain_error for b = 0 and UndecidableSign at the precision cap.
SignVector sign_vector(const FieldElement& b);
bool weil_signature_check(const SignVector& s);

// b in L with c^2 - 4l = -4d b^2 and sigma_1(b) >= 0, if it exists.
std::optional<FieldElement> trace_constraint_check(const FieldElement& c, long ell, long d);

struct NormSolution {
  MElement alpha;
  long ell = 0;
  SignVector sign_vector;
  bool weil_ok = false;
  FieldElement trace;
  std::optional<FieldElement> discriminant_witness;
};

// All (a, b) in Z[t]^2 with a^2 + d b^2 = ell and b != 0, one per
// (+-a, +-b) orbit, normalised to sigma_1(b) > 0 and sigma_1(a) >= 0.
// coeff_bound limits how many leading power-basis coefficients of a and b
// may be nonzero: 1 means rational, 6 or more means no restriction.
// Sorted by (a, b) coefficients regardless of the worker count.
std::vector<NormSolution> solve_norm_equation(long d, long ell, long coeff_bound = 8, unsigned workers = 1);

// Conductor of Q(sqrt(-d)): |D| with D = -d if -d = 1 mod 4, else D = -4d.
long quadratic_conductor(long d);
// True iff the conductor divides 42, i.e. Q(sqrt(-d)) lies in Q(zeta_42).
bool conductor_subfield_check(long d);

struct FaltingsBound {
  mpz_class value;
  double log10 = 0;
};
// (3g)^((5g)^2) * rad^(5g).
FaltingsBound faltings_bound(long g, long rad);

}  // namespace hecke
