#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <functional>
#include <random>
#include <set>

#include "hecke/field.hpp"

using namespace hecke;
using big = boost::multiprecision::cpp_bin_float_50;

namespace {

big oracle_t(int k) {
  return 2 * cos(big(k) * boost::math::constants::pi<big>() / 21);
}

big oracle_embed(const IntegralElement& x, int k) {
  const big t = oracle_t(k);
  big r = 0, p = 1;
  for (int i = 0; i < kDegree; ++i) {
    r += big(x[i].get_str()) * p;
    p *= t;
  }
  return r;
}

IntegralElement random_element(std::mt19937_64& rng, long bound) {
  std::uniform_int_distribution<long> u(-bound, bound);
  IntegralElement x;
  for (int i = 0; i < kDegree; ++i) x[i] = u(rng);
  return x;
}

}  // namespace

TEST_CASE("minimal polynomial matches the product over cos(k pi / 21)") {
  // prod (y - 2cos(k pi/21)) over k in kLabels, expanded numerically.
  std::vector<big> c{1};
  for (int k : kLabels) {
    std::vector<big> next(c.size() + 1, big(0));
    for (size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= c[i] * oracle_t(k);
    }
    c = next;
  }
  const auto& m = minimal_polynomial();
  for (int i = 0; i <= kDegree; ++i) {
    CHECK(abs(c[i] - big(m.coeffs[i].get_str())) < big("1e-40"));
  }
  CHECK(m.coeffs[6] == 1);
  CHECK(m.coeffs[0] == 1);
  CHECK(m.coeffs[4] == -6);
}

TEST_CASE("discriminant against the product of squared root differences") {
  big prod = 1;
  for (int i = 0; i < kDegree; ++i)
    for (int j = i + 1; j < kDegree; ++j) {
      const big diff = oracle_t(kLabels[i]) - oracle_t(kLabels[j]);
      prod *= diff * diff;
    }
  CHECK(abs(prod - 453789) < big("1e-30"));
  CHECK(minimal_polynomial().discriminant == 453789);
  CHECK(derive_minimal_polynomial().discriminant == 453789);
  CHECK(polynomial_discriminant({mpz_class(-1), mpz_class(0), mpz_class(1)}) == 4);
}

TEST_CASE("norms of the named elements") {
  CHECK(norm(IntegralElement{-3, 1, -1, 0, 1}) == 43);
  CHECK(norm(IntegralElement{-1, 0, 1}) == 7);
  CHECK(norm(IntegralElement{-1, -1, -2, -1}) == -27);
  CHECK(norm(IntegralElement{-2, 0, 1, -1}) == 1681);
}

TEST_CASE("norm and trace agree with the embedding oracle") {
  std::mt19937_64 rng(1);
  for (int n = 0; n < 40; ++n) {
    const IntegralElement x = random_element(rng, 5);
    big prod = 1, sum = 0;
    for (int k : kLabels) {
      const big v = oracle_embed(x, k);
      prod *= v;
      sum += v;
    }
    const NormTrace nt = norm_trace(to_field(x));
    CHECK(abs(prod - big(nt.norm.get_str())) < big("1e-25") * (abs(prod) + 1));
    CHECK(abs(sum - big(nt.trace.get_str())) < big("1e-30"));
    const NormTrace conj = norm_trace_via_conjugates(to_field(x));
    CHECK(conj.norm == nt.norm);
    CHECK(conj.trace == nt.trace);
  }
}

TEST_CASE("ring axioms and multiplicativity of the norm") {
  std::mt19937_64 rng(2);
  for (int n = 0; n < 50; ++n) {
    const IntegralElement x = random_element(rng, 4), y = random_element(rng, 4), z = random_element(rng, 4);
    CHECK(x * (y + z) == x * y + x * z);
    CHECK((x * y) * z == x * (y * z));
    CHECK(x * y == y * x);
    CHECK(norm(x * y) == norm(x) * norm(y));
    if (!x.is_zero()) {
      const FieldElement inv = invert(to_field(x));
      CHECK(inv * to_field(x) == FieldElement(1L));
    }
  }
  CHECK_THROWS_AS(invert(FieldElement()), std::domain_error);
}

TEST_CASE("embeddings are ring homomorphisms and match the oracle") {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 20; ++n) {
    const IntegralElement x = random_element(rng, 6), y = random_element(rng, 6);
    for (int k : kLabels) {
      const EmbeddingValue ex = embed(to_field(x), k, 200);
      const big want = oracle_embed(x, k);
      CHECK(abs(big(ex.value.mid().to_string(45)) - want) < big("1e-35") * (abs(want) + 1));
      const Ball prod = embed_ball(x, k, 200) * embed_ball(y, k, 200);
      const Ball direct = embed_ball(x * y, k, 200);
      CHECK(abs(prod.mid() - direct.mid()).to_double() <= (prod.rad() + direct.rad()).to_double() + 1e-50);
    }
  }
}

TEST_CASE("Galois action permutes the embeddings") {
  std::mt19937_64 rng(4);
  for (int n = 0; n < 10; ++n) {
    const IntegralElement x = random_element(rng, 5);
    const IntegralElement sx = galois_apply(x, 1);
    for (int k : kLabels) {
      CHECK(abs(oracle_embed(sx, k) - oracle_embed(x, next_label(k))) < big("1e-30"));
    }
    CHECK(galois_apply(x, 6) == x);
    CHECK(norm(sx) == norm(x));
  }
  std::set<int> seen;
  int k = 1;
  for (int i = 0; i < kDegree; ++i, k = next_label(k)) seen.insert(k);
  CHECK(seen.size() == 6);
}

TEST_CASE("residues and roots mod ell") {
  const auto roots = roots_mod_ell(43);
  CHECK(roots == std::vector<long>{5, 10, 20, 30, 31, 32});
  for (long r = 0; r < 43; ++r) {
    long v = 0;
    for (int j = kDegree; j >= 0; --j) v = (v * r + minimal_polynomial().coeffs[j].get_si()) % 43;
    const bool is_root = (v + 43) % 43 == 0;
    CHECK(is_root == (std::find(roots.begin(), roots.end(), r) != roots.end()));
  }
  CHECK(roots_mod_ell(47).empty());
  CHECK(roots_mod_ell(41).size() == 6);
  CHECK(roots_mod_ell(29).empty());
  CHECK(is_prime(43));
  CHECK_FALSE(is_prime(44));
  CHECK_FALSE(is_prime(1));
}

TEST_CASE("prime ideal data") {
  const IntegralElement pi{-3, 1, -1, 0, 1};
  const auto roots = roots_mod_ell(43);
  bool found = false;
  for (long r : roots) {
    if (residue_mod_prime(pi, 43, r) != 0) continue;
    const PrimeIdealData p = make_prime_ideal(43, r, pi);
    CHECK(p.ell == 43);
    found = true;
  }
  CHECK(found);
  CHECK_THROWS_AS(make_prime_ideal(43, 5, IntegralElement{2}), std::invalid_argument);
}

TEST_CASE("box enumeration agrees with brute force") {
  const auto box = enumerate_box(mpq_class(9, 4));
  std::set<IntegralElement> got(box.begin(), box.end());
  CHECK(got.size() == box.size());
  CHECK(std::is_sorted(box.begin(), box.end()));
  // Coefficient bounds from 1.5 times the row sums of |V^-1|, V the Vandermonde
  // matrix of the embeddings of t.
  const std::array<long, kDegree> lim{2, 9, 4, 7, 1, 1};
  long count = 0;
  std::array<long, kDegree> c{};
  std::function<void(int)> rec = [&](int i) {
    if (i == kDegree) {
      IntegralElement x;
      for (int j = 0; j < kDegree; ++j) x[j] = c[j];
      bool in = true;
      for (int k : kLabels) {
        const double v = embed_double(x, k);
        in = in && v * v <= 2.25;
      }
      if (in) {
        ++count;
        CHECK(got.count(x) == 1);
      }
      return;
    }
    for (c[i] = -lim[i]; c[i] <= lim[i]; ++c[i]) rec(i + 1);
  };
  rec(0);
  CHECK(count == static_cast<long>(box.size()));
}

TEST_CASE("square roots") {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 20; ++n) {
    const IntegralElement x = random_element(rng, 3);
    const auto r = integral_sqrt(x * x);
    REQUIRE(r.has_value());
    CHECK((*r) * (*r) == x * x);
    CHECK(embed_double(*r, 1) >= 0);
  }
  CHECK_FALSE(integral_sqrt(IntegralElement{2}).has_value());
  CHECK_FALSE(field_sqrt(FieldElement{-1}).has_value());
  const auto half = field_sqrt(FieldElement(mpq_class(9, 4)));
  REQUIRE(half.has_value());
  CHECK(*half == FieldElement(mpq_class(3, 2)));
}

TEST_CASE("certified signs and total positivity") {
  const IntegralElement pi{3, 5, 3, -5, -1, 1};
  CHECK(norm(pi) == 43);
  CHECK(is_totally_positive(to_field(pi)));
  const auto signs = sign_pattern(FieldElement{1, 2});
  CHECK(signs == std::array<int, kDegree>{1, 1, 1, -1, -1, -1});
  CHECK(certified_sign(FieldElement(), 1) == 0);
}

TEST_CASE("Minkowski bound and B") {
  CHECK(minkowski_bound(128).to_double() == doctest::Approx(720.0 / 46656.0 * std::sqrt(453789.0)).epsilon(1e-12));
  const IntegralMatrix b = generator_b();
  CHECK(pow(b, 21) == -IntegralMatrix::identity());
  CHECK(pow(b, 42) == IntegralMatrix::identity());
  for (unsigned n = 1; n < 21; ++n) CHECK_FALSE(pow(b, n) == -IntegralMatrix::identity());
  CHECK(b.det() == IntegralElement(1L));
}
