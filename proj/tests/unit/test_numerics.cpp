#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <random>

#include "hecke/hypergeometric.hpp"
#include "hecke/triangle.hpp"

using namespace hecke;
using big = boost::multiprecision::cpp_bin_float_50;

namespace {

constexpr Precision kPrec = 128;

Complex cx(const char* re, const char* im, Precision prec = kPrec) {
  return {Real::from_decimal(re, prec), Real::from_decimal(im, prec)};
}

double dist(const Complex& a, const Complex& b) { return abs(a - b).to_double(); }

const PrecisionContext& ctx() {
  static const PrecisionContext c = PrecisionContext::with_precision(kPrec);
  return c;
}

const SchwarzTriangle& t1() {
  static const SchwarzTriangle t(TriangleData::standard(), ctx());
  return t;
}

}  // namespace

TEST_CASE("Real hex serialisation is exact") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 200; ++i) {
    const Precision p = 64 + static_cast<Precision>(rng() % 400);
    const Real x = Real(u(rng), p) / Real(u(rng), p) + Real::pi(p);
    const Real y = from_hex_string(to_hex_string(x));
    CHECK(y == x);
    CHECK(y.precision() == x.precision());
  }
  CHECK(from_hex_string(to_hex_string(Real(0L, 80))) == Real(0L, 80));
  CHECK_THROWS_AS(from_hex_string("0x1p3"), std::invalid_argument);
  CHECK_THROWS_AS(Real::from_decimal("1.2.3", 64), std::invalid_argument);
}

TEST_CASE("Real arithmetic carries the larger precision") {
  const Real a(1L, 64), b(1L, 200);
  CHECK((a + b).precision() == 200);
  CHECK(sqrt(Real(2L, 300)).precision() == 300);
  mpz_class m;
  long e = 0;
  Real::pi(100).to_mantissa_exponent(m, e);
  CHECK(Real::from_mantissa_exponent(m, e, 100) == Real::pi(100));
}

TEST_CASE("hypergeometric values against mpmath") {
  const HypergeometricParams p = HypergeometricParams::triangle_14_21_42();
  CHECK(p == HypergeometricParams::from_angles(mpq_class(1, 14), mpq_class(1, 21), mpq_class(1, 42)));
  struct Case {
    const char *wr, *wi, *fr, *fi;
  };
  const Case cases[] = {
      {"0.3", "0", "1.075414747363705728473671567201354464435", "0"},
      {"-0.7", "0.2", "0.8901339170786471757226688486001299267282", "0.02332050080903808286193244463296893565603"},
      {"0.5", "0.5", "1.069265672394730736176321397102218989758", "0.1685881164223234614948761462550069883013"},
      {"0.95", "0.01", "1.656511541186885905531364789579872575445", "0.04384032675513599598386250568805087298229"},
      {"2.5", "0.3", "0.8223689485614817717614157794639182477912", "0.6302460733327555561263961539103582327838"},
      {"-6", "1", "0.6308140394696308540468952369748406166855", "0.02334612947074279827057518739195985238512"},
      {"0.6", "-0.8", "1.014215186454555361284846751442687949235", "-0.2349869956063739058363011770257740945044"},
  };
  for (const auto& c : cases) {
    const HypResult r = hyp2f1(p, cx(c.wr, c.wi), ctx());
    CAPTURE(c.wr);
    CAPTURE(c.wi);
    CAPTURE(r.method);
    CHECK(dist(r.value, cx(c.fr, c.fi)) < 1e-30);
  }
  const HypergeometricParams q{mpq_class(1, 3), mpq_class(1, 5), mpq_class(7, 6)};
  const HypResult r = hyp2f1(q, cx("-3", "0.5"), ctx());
  CHECK(dist(r.value, cx("0.9068199072978786738757292931381540604443", "0.009415741323931829295540440702736192621308")) <
        1e-30);
}

TEST_CASE("Gauss summation against an independent gamma") {
  const HypergeometricParams p = HypergeometricParams::triangle_14_21_42();
  const HypResult at1 = hyp2f1(p, Complex(Real(1L, kPrec)), ctx());
  auto g = [](int n, int d) { return boost::math::tgamma(big(n) / d); };
  // c = 13/14, c - a - b = 1/21, c - a = 10/21, c - b = 1/2.
  const big oracle = g(13, 14) * g(1, 21) / (g(10, 21) * g(1, 2));
  CHECK(abs(big(at1.value.re.to_string(45)) - oracle) < big("1e-25"));
  CHECK(abs(big(gauss_sum(p, 200).to_string(45)) - big("6.498168666243877825828793016121101149583")) < big("1e-38"));
  CHECK(at1.value.im.is_zero());
}

TEST_CASE("series and continuation agree inside the disc") {
  const HypergeometricParams p = HypergeometricParams::triangle_14_21_42();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (int i = 0; i < 20; ++i) {
    const Complex w(u(rng), u(rng), kPrec);
    if (abs(w).to_double() > 0.92) continue;
    const HypResult a = hyp2f1(p, w, ctx());
    const HypResult s = hyp2f1_series(p, w, kPrec + 32, 200000);
    CHECK(dist(a.value, s.value) < 1e-30);
  }
}

TEST_CASE("near w = 1 the one-minus form keeps precision") {
  const HypergeometricParams p = HypergeometricParams::triangle_14_21_42();
  const Complex x = cx("1e-30", "1e-31");
  const HypResult a = hyp2f1_one_minus(p, x, ctx());
  const HypResult b = hyp2f1(p, Complex(Real(1L, 300)) - x.with_precision(300), ctx().doubled().doubled());
  CHECK(dist(a.value, b.value) < 1e-25);
}

TEST_CASE("image triangle angles") {
  const auto ang = image_angles(t1());
  CHECK(abs(ang[0] - Real::from_rational(mpq_class(1, 14), kPrec)).to_double() < 1e-10);
  CHECK(abs(ang[1] - Real::from_rational(mpq_class(1, 21), kPrec)).to_double() < 1e-10);
  CHECK(abs(ang[2] - Real::from_rational(mpq_class(1, 42), kPrec)).to_double() < 1e-10);
  for (int k : {5, 11}) {
    for (const auto& td : candidate_triangles(k)) {
      const SchwarzTriangle tk(td, ctx());
      const auto a = image_angles(tk);
      for (int i = 0; i < 3; ++i) {
        const mpq_class want = td.angles[static_cast<size_t>(i)];
        CHECK(abs(a[i] - Real::from_rational(want, kPrec)).to_double() < 1e-10);
      }
    }
  }
}

TEST_CASE("vertices and the B fixed point") {
  const auto& v = t1().vertices();
  CHECK(dist(t1().map(Complex(Real(0L, kPrec))), v[0]) < 1e-30);
  CHECK(dist(t1().map(Complex(Real(1L, kPrec))), v[1]) < 1e-30);
  // The fixed point of B is the vertex with angle pi/42.
  const Complex fb = elliptic_fixed_point(generator_b(), 1, kPrec);
  bool at_vertex = false;
  for (const auto& x : v) at_vertex = at_vertex || dist(x, fb) < 1e-25;
  CHECK(at_vertex);
  CHECK(t1().contains(t1().interior_point()));
}

TEST_CASE("inverse round trip on 100 samples") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> xs(-3.0, 4.0), ys(0.01, 3.0);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const Complex w(xs(rng), ys(rng), kPrec);
    const Complex z = t1().map(w);
    CHECK(t1().contains(z));
    worst = std::max(worst, (abs(t1().inverse(z) - w) / (abs(w) + 1L)).to_double());
  }
  CHECK(worst < 1e-20);
}

TEST_CASE("reduction lands in the triangle and unreduces") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> xs(-2.0, 2.0), ys(0.05, 2.0);
  for (int i = 0; i < 40; ++i) {
    const Complex z(xs(rng), ys(rng), kPrec);
    const Reduction r = reduce_to_fundamental(t1(), z);
    CHECK(t1().contains(r.z0));
    CHECK(dist(unreduce(t1(), r.z0, r.word), z) < 1e-25);
    for (int e = 0; e < 3; ++e) CHECK(dist(t1().reflect(e, t1().reflect(e, z)), z) < 1e-25);
  }
  CHECK_THROWS_AS(reduce_to_fundamental(t1(), Complex(0.1, -1.0, kPrec)), std::domain_error);
}

TEST_CASE("B functional equation for k = 1") {
  const ComponentMaps maps(EmbeddingConfig{}, ctx(), true);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> xs(-1.0, 1.0), ys(0.25, 1.75);
  for (int i = 0; i < 10; ++i) {
    const Complex z(xs(rng), ys(rng), kPrec);
    CHECK(b_equation_residual(maps, 1, z).to_double() < 1e-20);
    CHECK(dist(maps.via_triangles(1, z), z) < 1e-20);
  }
}

TEST_CASE("config serialisation and validation") {
  EmbeddingConfig cfg;
  cfg.id = "test";
  for (int k : {5, 13}) cfg.triangles.push_back(candidate_triangles(k).front());
  CHECK_FALSE(cfg.validated());
  CHECK_THROWS_AS(ComponentMaps(cfg, ctx()), UnvalidatedConfig);
  const EmbeddingConfig v = validate_config(cfg, ctx(), 4, 7);
  CHECK(v.validated());
  CHECK(v.validation->components.size() == 3);
  const EmbeddingConfig back = parse_config(serialize_config(v));
  CHECK(back.digest() == v.digest());
  CHECK(back.validated());
  CHECK(serialize_config(back) == serialize_config(v));
  const ComponentMaps maps(back, ctx());
  CHECK(maps.has(5));
  CHECK_FALSE(maps.has(11));

  EmbeddingConfig changed = back;
  changed.triangles[1].angles[0] += mpq_class(1, 14);
  CHECK_FALSE(changed.validated());
}

TEST_CASE("a non-conjugate triangle fails validation") {
  EmbeddingConfig cfg;
  TriangleData wrong = TriangleData::standard();
  wrong.k = 5;
  cfg.triangles.push_back(wrong);
  const EmbeddingConfig v = validate_config(cfg, ctx(), 3, 1);
  CHECK_FALSE(v.validated());
  for (const auto& c : v.validation->components)
    if (c.k == 5) CHECK_FALSE(c.passed);
}

TEST_CASE("candidate triangles") {
  for (int k : kLabels) {
    const auto c = candidate_triangles(k);
    CHECK_FALSE(c.empty());
    for (const auto& t : c) {
      CHECK(t.k == k);
      CHECK(t.angles[0] + t.angles[1] + t.angles[2] < 1);
      CHECK_NOTHROW(t.validate());
    }
  }
  CHECK(candidate_triangles(1).front() == TriangleData::standard());
  TriangleData bad = TriangleData::standard();
  bad.angles = {mpq_class(1, 2), mpq_class(1, 3), mpq_class(1, 6)};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("the shipped configs are validated") {
  for (const char* name : {"embedding_k1.json", "embedding_candidates.json"}) {
    const EmbeddingConfig cfg = load_config(std::filesystem::path(HECKE_DATA_DIR) / name);
    CAPTURE(name);
    CHECK(cfg.validated());
  }
}
