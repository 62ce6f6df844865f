// One line per acceptance criterion; exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hecke/cm_field.hpp"
#include "hecke/cm_types.hpp"
#include "hecke/hecke_search.hpp"
#include "hecke/hypergeometric.hpp"
#include "hecke/triangle.hpp"
#include "hecke_app/commands.hpp"
#include "hecke_app/ledger.hpp"

using namespace hecke;
using namespace hecke::app;
namespace fs = std::filesystem;

namespace {

class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failed_.push_back(what);
  }
  [[nodiscard]] const std::vector<std::string>& failed() const { return failed_; }

 private:
  std::vector<std::string> failed_;
};

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<void(Checks&)> body;
};

IntegralElement ie(std::initializer_list<long> c) { return IntegralElement(c); }

void exact_field(Checks& c) {
  c.expect(norm(ie({-3, 1, -1, 0, 1})) == 43, "N(t^4-t^2+t-3) = 43");
  c.expect(norm(ie({-1, 0, 1})) == 7, "N(t^2-1) = 7");
  c.expect(norm(ie({-1, -1, -2, -1})) == -27, "N(-t^3-2t^2-t-1) = -27");
  c.expect(minimal_polynomial().discriminant == 453789 && 453789 == 27 * 16807, "disc = 453789 = 3^3 7^5");
  const double mb = minkowski_bound(128).to_double();
  c.expect(std::abs(mb - 10.40) <= 0.01, "Minkowski bound 10.40");
  c.expect(std::abs(mb - 720.0 / 46656.0 * std::sqrt(453789.0)) < 1e-12, "Minkowski formula");
  c.expect(pow(generator_b(), 21) == -IntegralMatrix::identity(), "B^21 = -I");
  mpz_class m5 = 0;
  for (int j = kDegree; j >= 0; --j) m5 = m5 * 5 + minimal_polynomial().coeffs[j];
  c.expect(m5 % 43 == 0, "m(5) = 0 mod 43");
  const auto roots = roots_mod_ell(43);
  c.expect(roots.size() == 6 && std::find(roots.begin(), roots.end(), 5) != roots.end(), "6 roots mod 43 incl. 5");
}

void combinatorics(Checks& c) {
  for (long d : {3L, 7L}) {
    const auto types = enumerate_cm_types(d);
    const auto weil = weil_compatible_filter(types);
    long weil_pairs = 0, self = 0;
    for (const auto& phi : weil)
      weil_pairs += std::find(weil.begin(), weil.end(), phi.conjugate()) != weil.end();
    for (const auto& phi : types) self += phi == phi.conjugate();
    const std::string tag = "d=" + std::to_string(d) + " ";
    c.expect(types.size() == 64, tag + "64 types");
    c.expect(weil.size() == 20, tag + "20 Weil-compatible");
    c.expect(weil_pairs / 2 == 10, tag + "10 Weil pairs");
    c.expect(types.size() / 2 == 32, tag + "32 pairs");
    c.expect(self == 0, tag + "no self-conjugate type");
    const GaloisGroupM g(d);
    bool commutes = true;
    for (const auto& sa : all_sign_assignments())
      for (int p = 0; p < kDegree; ++p)
        commutes = commutes && cm_type_from_sign_assignment(galois_act(sa, p), d) ==
                                   g.act(g.lift_of_sigma(p), cm_type_from_sign_assignment(sa, d));
    c.expect(commutes, tag + "bijection commutes with Galois");
  }
  auto sizes = galois_orbits_sign_assignments().sizes();
  std::sort(sizes.begin(), sizes.end());
  c.expect(sizes == std::vector<size_t>{2, 6, 6, 6}, "orbit sizes {6,2,6,6}");
}

void norm_solver(Checks& c) {
  auto find = [](const std::vector<NormSolution>& s, long a, long b) -> const NormSolution* {
    for (const auto& x : s)
      if (x.alpha.a == FieldElement(a) && x.alpha.b == FieldElement(b)) return &x;
    return nullptr;
  };
  const auto s3 = solve_norm_equation(3, 43);
  const auto s7 = solve_norm_equation(7, 43);
  const NormSolution* a = find(s3, 4, 3);
  const NormSolution* b = find(s7, 6, 1);
  c.expect(a && a->trace == FieldElement(8L) && a->trace * a->trace - FieldElement(172L) == FieldElement(-108L),
           "d=3: (4,3), trace 8, disc -108");
  c.expect(b && b->trace == FieldElement(12L) && b->trace * b->trace - FieldElement(172L) == FieldElement(-28L),
           "d=7: (6,1), trace 12, disc -28");
  for (const auto* set : {&s3, &s7})
    for (const auto& s : *set)
      if (s.alpha.b.is_rational()) c.expect(!s.weil_ok, "rational b has weil_ok = false");
  c.expect(sign_vector(FieldElement{1, 2}).to_string() == "+++---", "sign_vector(1+2t) = +++---");
  for (int k : {1, 5}) {
    const Real s = embed_real(ie({1, 2}), k, 128);
    const double v = 43 - 3 * (s * s).to_double();
    c.expect(std::abs(v - (k == 1 ? -30.7 : -3.4)) <= 0.1, "43 - 3 sigma_" + std::to_string(k) + "(1+2t)^2");
  }
}

void hecke_layer(Checks& c) {
  const PrimeIdealData p = default_prime_ideal(43);
  const auto reps = enumerate_cosets(p);
  c.expect(reps.size() == 44, "44 coset representatives");
  bool distinct = true;
  for (size_t i = 0; i < reps.size(); ++i)
    for (size_t j = i + 1; j < reps.size(); ++j) distinct = distinct && !cosets_equivalent(reps[i], reps[j], p);
  c.expect(distinct, "pairwise inequivalent");
  const SweepAccounting acc = sweep_accounting(p);
  c.expect(acc.formal_systems == 2816 && acc.cosets * acc.branch_choices == 2816, "2816 formal systems");
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<long> u(-6, 6);
  long false_rejections = 0;
  for (long d : {3L, 7L}) {
    for (int n = 0; n < 500; ++n) {
      IntegralElement x, y;
      for (int i = 0; i < kDegree; ++i) x[i] = u(rng), y[i] = u(rng);
      const HeckeMatrix m(IntegralMatrix{x, IntegralElement(-d) * y, y, x});
      false_rejections += !prescreen_mod_ell(m, p);
    }
  }
  c.expect(false_rejections == 0, "prescreen: no false rejections on synthetic solvable systems");
  long control_fail = 0;
  for (long n = 1; n < 43; ++n)
    control_fail += !prescreen_mod_ell(HeckeMatrix(IntegralMatrix{0L, IntegralElement(-n), 1L, 0L}), p);
  c.expect(control_fail == 21, "prescreen rejects the 21 non-residue controls");
}

void numerics(Checks& c) {
  const Precision prec = 128;
  const auto ctx = PrecisionContext::with_precision(prec);
  const HypergeometricParams hp = HypergeometricParams::triangle_14_21_42();
  const HypResult f1 = hyp2f1(hp, Complex(Real(1L, prec)), ctx);
  auto g = [&](const mpq_class& q) { return tgamma(Real::from_rational(q, prec + 64)); };
  const Real ratio = g(hp.c) * g(hp.c - hp.a - hp.b) / (g(hp.c - hp.a) * g(hp.c - hp.b));
  c.expect(abs(f1.value.re - ratio).to_double() < 1e-25, "F(19/42,3/7;13/14;1) = Gamma ratio");

  const SchwarzTriangle t(TriangleData::standard(), ctx);
  const auto ang = image_angles(t);
  const mpq_class want[3] = {mpq_class(1, 14), mpq_class(1, 21), mpq_class(1, 42)};
  for (int i = 0; i < 3; ++i)
    c.expect(abs(ang[i] - Real::from_rational(want[i], prec)).to_double() < 1e-10,
             "image angle pi*" + want[i].get_str());

  std::mt19937_64 rng(100);
  std::uniform_real_distribution<double> xs(-3.0, 4.0), ys(0.01, 3.0);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const Complex w(xs(rng), ys(rng), prec);
    worst = std::max(worst, (abs(t.inverse(t.map(w)) - w) / (abs(w) + 1L)).to_double());
  }
  c.expect(worst < 1e-20, "inverse round trip on 100 samples");

  const EmbeddingConfig k1 = validate_config(EmbeddingConfig{}, ctx, 10, 42);
  c.expect(k1.validated(), "k=1 config validates");
  const ComponentMaps maps(k1, ctx);
  std::mt19937_64 rng2(10);
  std::uniform_real_distribution<double> bx(-1.0, 1.0), by(0.25, 1.75);
  double bres = 0;
  for (int i = 0; i < 10; ++i)
    bres = std::max(bres, b_equation_residual(maps, 1, Complex(bx(rng2), by(rng2), prec)).to_double());
  c.expect(bres < 1e-20, "B-equation residual for k=1 at 10 seeded points");
}

void end_to_end(Checks& c) {
  const fs::path dir = fs::temp_directory_path() / ("hecke_acceptance_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  std::ostringstream so, se;
  SearchOptions o;
  o.cfg.ell = 43;
  o.cfg.d = 3;
  o.cfg.height = 3.0;
  o.cfg.workers = 4;
  o.output = dir / "full.jsonl";
  c.expect(cmd_search(o, so, se) == kExitOk, "search --prime 43 --d 3 completes");
  const LedgerContents full = read_ledger(o.output);
  c.expect(full.summary && full.summary->completed, "ledger has a completed summary");
  c.expect(!full.certificates.empty(), "certificates emitted");
  c.expect(full.summary && full.summary->certificate_digest == certificate_digest(full.certificates),
           "summary digest matches certificates");

  const PrimeIdealData p = default_prime_ideal(43);
  const ComponentMaps maps2(EmbeddingConfig{}, PrecisionContext::with_precision(256), true);
  long ok = 0;
  for (const auto& cert : full.certificates) ok += verify_certificate(cert, p, &maps2, 256, 1e-20).verified;
  c.expect(ok == static_cast<long>(full.certificates.size()), "every certificate verifies at doubled precision");

  if (!full.certificates.empty()) {
    const CandidateCertificate& base = full.certificates.front();
    auto fails_with = [&](CandidateCertificate x, const std::string& check) {
      const auto rep = verify_certificate(x, p, &maps2, 256, 1e-20);
      c.expect(!rep.verified && rep.failing_check == check, "noise control names '" + check + "'");
    };
    CandidateCertificate n1 = base;
    n1.fixed_tuple[1].re += Real(1e-3, 128);
    fails_with(n1, "fixed tuple");
    CandidateCertificate n2 = base;
    n2.z0.im += Real(1e-12, 128);
    fails_with(n2, "z0");
    CandidateCertificate n3 = base;
    n3.residuals.push_back({5, Real(1e-3, 64)});
    fails_with(n3, "component match");
    if (base.witness_b) {
      CandidateCertificate n4 = base;
      *n4.witness_b = *n4.witness_b + FieldElement(mpq_class(1, 1000));
      fails_with(n4, "trace constraint");
    }
  }

  SearchOptions part = o;
  part.output = dir / "part.jsonl";
  part.cfg.batch_size = 50;
  part.stop_after_batches = 3;
  cmd_search(part, so, se);
  part.stop_after_batches = -1;
  part.resume = true;
  part.cfg.workers = 2;
  c.expect(cmd_search(part, so, se) == kExitOk, "resumed run completes");
  const LedgerContents resumed = read_ledger(part.output);
  bool same = resumed.certificates.size() == full.certificates.size();
  for (size_t i = 0; same && i < full.certificates.size(); ++i)
    same = same_certificate(resumed.certificates[i], full.certificates[i]);
  c.expect(same, "resumed run reproduces the certificate set");
  c.expect(resumed.summary && full.summary && resumed.summary->counters == full.summary->counters,
           "resumed run reproduces the summary counters");
  fs::remove_all(dir);
}

void height_bound(Checks& c) {
  const FaltingsBound fb = faltings_bound(6, 42);
  mpz_class a, b;
  mpz_ui_pow_ui(a.get_mpz_t(), 18, 900);
  mpz_ui_pow_ui(b.get_mpz_t(), 42, 30);
  c.expect(fb.value == a * b, "faltings_bound(6,42) = 18^900 42^30");
  c.expect(std::abs(fb.log10 - 1178.4) <= 0.1, "log10 = 1178.4");
  c.expect(conductor_subfield_check(3) && conductor_subfield_check(7), "d=3,7 inside Q(zeta_42)");
  c.expect(!conductor_subfield_check(1), "d=1 outside Q(zeta_42)");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "exact-field facts", 5, exact_field},
      {2, "CM-type combinatorics", 1, combinatorics},
      {3, "norm solver", 60, norm_solver},
      {4, "Hecke layer", 10, hecke_layer},
      {5, "numerics at 128 bits", 120, numerics},
      {6, "end-to-end search at H = 3", 600, end_to_end},
      {7, "height bound", 1, height_bound},
  };
  bool all = true;
  for (const auto& cr : criteria) {
    Checks checks;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.body(checks);
    } catch (const std::exception& e) {
      checks.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= cr.limit_seconds) checks.expect(false, "runtime limit exceeded");
    const bool pass = checks.failed().empty();
    all = all && pass;
    std::cout << "criterion " << cr.id << " (" << cr.name << "): " << (pass ? "PASS" : "FAIL") << "  ["
              << std::fixed << std::setprecision(2) << secs << " s, limit " << std::setprecision(0)
              << cr.limit_seconds << " s]";
    for (const auto& f : checks.failed()) std::cout << "  failed: " << f << ";";
    std::cout << std::endl;
  }
  return all ? 0 : 1;
}
