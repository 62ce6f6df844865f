#pragma once

// Gauss hypergeometric function F(a, b; c; w) for rational parameters at
// arbitrary precision.

#include <gmpxx.h>

#include <string>

#include "hecke/complex.hpp"

namespace hecke {

struct HypergeometricParams {
  mpq_class a;
  mpq_class b;
  mpq_class c;

  // (19/42, 3/7, 13/14): the (14, 21, 42) triangle.
  static HypergeometricParams triangle_14_21_42();
  // Parameters whose Schwarz map has vertex angles alpha pi at 0, beta pi
  // at 1 and gamma pi at infinity.
  static HypergeometricParams from_angles(const mpq_class& alpha, const mpq_class& beta, const mpq_class& gamma);
  friend bool operator==(const HypergeometricParams&, const HypergeometricParams&) = default;
};

struct PrecisionContext {
  Precision precision = kDefaultPrecision;
  Real tolerance;
  long max_terms = 200000;
  // Re-evaluate continuations at doubled precision and fold the
  // disagreement into the reported error.
  bool cross_check = false;

  PrecisionContext();
  // Throws std::invalid_argument unless tolerance >= 2^(6 - precision).
  PrecisionContext(Precision prec, const Real& tol, long terms = 200000, bool check = false);
  // tolerance = 2^(-prec/2)
  static PrecisionContext with_precision(Precision prec);
  [[nodiscard]] PrecisionContext doubled() const;
};

struct HypResult {
  Complex value;
  Real error;  // rigorous for the plain series tail, heuristic otherwise
  std::string method;
};

// Throws std::domain_error for w on [1, inf) without a side, for c a
// non-positive integer, and when no transformation applies.
HypResult hyp2f1(const HypergeometricParams& p, const Complex& w, const PrecisionContext& ctx,
                 Side side = Side::None);

// F(a, b; c; 1 - x) computed from x without forming 1 - x, for points
// close to w = 1. The side refers to x on the negative real axis.
HypResult hyp2f1_one_minus(const HypergeometricParams& p, const Complex& x, const PrecisionContext& ctx,
                           Side side = Side::None);

// Direct power series; requires |w| < 1.
HypResult hyp2f1_series(const HypergeometricParams& p, const Complex& w, Precision prec, long max_terms);

// Gamma(c) Gamma(c-a-b) / (Gamma(c-a) Gamma(c-b)); requires c - a - b > 0.
Real gauss_sum(const HypergeometricParams& p, Precision prec);

}  // namespace hecke
