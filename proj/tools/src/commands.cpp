#include "hecke_app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <ostream>
#include <random>
#include <sstream>

#include "hecke/cm_field.hpp"
#include "hecke/cm_types.hpp"
#include "hecke/hypergeometric.hpp"
#include "hecke/triangle.hpp"
#include "hecke_app/ledger.hpp"

namespace hecke::app {

namespace {

std::string fmt(double x, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

std::string join_sizes(const std::vector<size_t>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

EmbeddingConfig load_config_or_throw(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw EnvironmentError("config file " + path.string() + " does not exist");
  try {
    return load_config(path);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("bad config: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad config: ") + e.what());
  }
}

const NormSolution* find_rational(const std::vector<NormSolution>& sols, long a, long b) {
  for (const auto& s : sols)
    if (s.alpha.a == FieldElement(a) && s.alpha.b == FieldElement(b)) return &s;
  return nullptr;
}

void field_section(ReportDocument& doc, Precision prec) {
  auto& s = doc.section("exact field");
  auto check_norm = [&](const std::string& name, const IntegralElement& x, long expected) {
    const mpz_class n = norm(x);
    add_check(s, name, n == expected, n.get_str());
  };
  check_norm("N(π₁)=43", IntegralElement{-3, 1, -1, 0, 1}, 43);
  check_norm("N(t²−1)=7", IntegralElement{-1, 0, 1}, 7);
  check_norm("N(−t³−2t²−t−1)=−27", IntegralElement{-1, -1, -2, -1}, -27);
  check_norm("N(−t³+t²−2)=1681=41²", IntegralElement{-2, 0, 1, -1}, 1681);
  const mpz_class disc = minimal_polynomial().discriminant;
  add_check(s, "disc(m)=453789=3³·7⁵", disc == 453789 && disc == 27 * 16807, disc.get_str());
  const double mink = minkowski_bound(prec).to_double();
  add_check(s, "Minkowski bound 10.40", std::abs(mink - 10.40) <= 0.01, fmt(mink, 8));
  const IntegralMatrix b21 = pow(generator_b(), 21);
  add_check(s, "B²¹=−I", b21 == -IntegralMatrix::identity());
  const auto& m = minimal_polynomial().coeffs;
  mpz_class m5 = 0;
  for (int j = kDegree; j >= 0; --j) m5 = m5 * 5 + m[j];
  add_check(s, "m(5)≡0 mod 43", m5 % 43 == 0, "m(5) = " + m5.get_str());
  const auto roots = roots_mod_ell(43);
  std::string rs;
  for (long r : roots) rs += (rs.empty() ? "" : ",") + std::to_string(r);
  add_check(s, "6 roots of m mod 43 including 5",
            roots.size() == 6 && std::find(roots.begin(), roots.end(), 5) != roots.end(), rs);
}

void cm_section(ReportDocument& doc) {
  auto& s = doc.section("CM types");
  for (long d : {3L, 7L}) {
    const auto types = enumerate_cm_types(d);
    const auto weil = weil_compatible_filter(types);
    long weil_pairs = 0, self_conj = 0;
    for (const auto& phi : weil)
      if (std::find(weil.begin(), weil.end(), phi.conjugate()) != weil.end()) ++weil_pairs;
    for (const auto& phi : types)
      if (phi == phi.conjugate()) ++self_conj;
    const std::string tag = "d=" + std::to_string(d) + ": ";
    add_check(s, tag + "64 CM types", types.size() == 64, std::to_string(types.size()));
    add_check(s, tag + "20 Weil-compatible", weil.size() == 20, std::to_string(weil.size()));
    add_check(s, tag + "10 Weil conjugate pairs", weil_pairs / 2 == 10, std::to_string(weil_pairs / 2));
    add_check(s, tag + "32 conjugate pairs", types.size() / 2 == 32, std::to_string(types.size() / 2));
    add_check(s, tag + "0 self-conjugate", self_conj == 0, std::to_string(self_conj));
    const GaloisGroupM g(d);
    bool commutes = true;
    for (const auto& sa : all_sign_assignments()) {
      for (int power = 0; power < kDegree; ++power) {
        const CMType lhs = cm_type_from_sign_assignment(galois_act(sa, power), d);
        const CMType rhs = g.act(g.lift_of_sigma(power), cm_type_from_sign_assignment(sa, d));
        if (!(lhs == rhs)) commutes = false;
      }
    }
    add_check(s, tag + "assignment/type bijection is Galois-equivariant", commutes);
  }
  auto sizes = galois_orbits_sign_assignments().sizes();
  auto sorted = sizes;
  std::sort(sorted.begin(), sorted.end());
  add_check(s, "orbits 6,2,6,6", sorted == std::vector<size_t>{2, 6, 6, 6}, join_sizes(sizes));
}

void norm_section(ReportDocument& doc) {
  auto& s = doc.section("norm equation");
  const auto s3 = solve_norm_equation(3, 43, 1);
  const auto s7 = solve_norm_equation(7, 43, 1);
  const NormSolution* a = find_rational(s3, 4, 3);
  const NormSolution* b = find_rational(s7, 6, 1);
  auto disc_of = [](const NormSolution& sol) { return sol.trace * sol.trace - FieldElement(4 * 43L); };
  add_check(s, "d=3: (4,3) with trace 8, disc −108",
            a && a->trace == FieldElement(8L) && disc_of(*a) == FieldElement(-108L));
  add_check(s, "d=7: (6,1) with trace 12, disc −28",
            b && b->trace == FieldElement(12L) && disc_of(*b) == FieldElement(-28L));
  bool rational_fail = true;
  for (const auto* set : {&s3, &s7})
    for (const auto& sol : *set)
      if (sol.alpha.b.is_rational() && sol.weil_ok) rational_fail = false;
  add_check(s, "rational b ⇒ weil_ok=false", rational_fail,
            std::to_string(s3.size()) + " + " + std::to_string(s7.size()) + " solutions");
  const FieldElement x{1, 2};
  const SignVector sv = sign_vector(x);
  add_check(s, "sign_vector(1+2t)=+++---", sv.to_string() == "+++---", sv.to_string());
  for (int k : {1, 5}) {
    const double e = embed_double(IntegralElement{1, 2}, k);
    const double v = 43 - 3 * e * e;
    const double expect = k == 1 ? -30.7 : -3.4;
    add_check(s, "43−3σ_" + std::to_string(k) + "(1+2t)²≈" + fmt(expect, 3), std::abs(v - expect) <= 0.1, fmt(v, 6));
  }
}

void hecke_section(ReportDocument& doc) {
  auto& s = doc.section("Hecke layer");
  const PrimeIdealData p = default_prime_ideal(43);
  const auto reps = enumerate_cosets(p);
  add_check(s, "44 coset representatives", reps.size() == 44, std::to_string(reps.size()));
  bool distinct = true;
  for (size_t i = 0; i < reps.size(); ++i)
    for (size_t j = i + 1; j < reps.size(); ++j)
      if (cosets_equivalent(reps[i], reps[j], p)) distinct = false;
  add_check(s, "pairwise inequivalent", distinct);
  const auto acc = sweep_accounting(p);
  add_check(s, "2816 formal systems", acc.formal_systems == 2816, std::to_string(acc.formal_systems));
  add_value(s, "solvable systems (one root in H per elliptic embedding)", std::to_string(acc.solvable_systems));
  add_value(s, "prescreen pass rate over canonical reps",
            std::to_string(acc.prescreen_pass) + "/" + std::to_string(acc.cosets));
  add_value(s, "prime generator", p.generator.to_string());
}

void numerics_section(ReportDocument& doc, Precision prec) {
  auto& s = doc.section("numerics");
  const auto ctx = PrecisionContext::with_precision(prec);
  const HypergeometricParams hp = HypergeometricParams::triangle_14_21_42();
  const Real one(1L, prec);
  const HypResult f1 = hyp2f1(hp, Complex(one), ctx);
  auto g = [&](const mpq_class& q) { return tgamma(Real::from_rational(q, prec + 32)); };
  const Real ratio = g(hp.c) * g(hp.c - hp.a - hp.b) / (g(hp.c - hp.a) * g(hp.c - hp.b));
  const double gerr = abs(f1.value.re - ratio).to_double();
  add_check(s, "F(19/42,3/7;13/14;1)=Γ-ratio", gerr < 1e-25, "error " + fmt(gerr, 3));
  const Complex w9(Real(0.9, prec), Real(0.0, prec));
  const HypResult cont = hyp2f1(hp, w9, ctx);
  const HypResult series = hyp2f1_series(hp, w9, prec + 32, 100000);
  const double serr = abs(cont.value - series.value).to_double();
  add_check(s, "F at 0.9: " + cont.method + " against direct series", serr < 1e-25, "error " + fmt(serr, 3));

  const SchwarzTriangle t1(TriangleData::standard(), ctx);
  const auto ang = image_angles(t1);
  const std::array<mpq_class, 3> want{mpq_class(1, 14), mpq_class(1, 21), mpq_class(1, 42)};
  double aerr = 0;
  for (int i = 0; i < 3; ++i) aerr = std::max(aerr, abs(ang[i] - Real::from_rational(want[i], prec)).to_double());
  add_check(s, "image angles π/14, π/21, π/42", aerr < 1e-10, "max error " + fmt(aerr, 3));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> xs(-1.0, 2.0), ys(0.05, 2.0);
  double rerr = 0;
  for (int i = 0; i < 100; ++i) {
    const Complex w(xs(rng), ys(rng), prec);
    const Complex back = t1.inverse(t1.map(w));
    rerr = std::max(rerr, (abs(back - w) / (abs(w) + 1L)).to_double());
  }
  add_check(s, "inverse round trip (100 points)", rerr < 1e-20, "max error " + fmt(rerr, 3));

  const ComponentMaps maps(EmbeddingConfig{}, ctx, true);
  std::mt19937_64 rng2(11);
  std::uniform_real_distribution<double> bx(-1.0, 1.0), by(0.25, 1.75);
  double berr = 0;
  for (int i = 0; i < 10; ++i) berr = std::max(berr, b_equation_residual(maps, 1, Complex(bx(rng2), by(rng2), prec)).to_double());
  add_check(s, "B-equation residual k=1 (10 points)", berr < 1e-20, "max " + fmt(berr, 3));
}

void height_section(ReportDocument& doc) {
  auto& s = doc.section("height bound");
  const FaltingsBound fb = faltings_bound(6, 42);
  mpz_class expect, f42;
  mpz_ui_pow_ui(expect.get_mpz_t(), 18, 900);
  mpz_ui_pow_ui(f42.get_mpz_t(), 42, 30);
  expect *= f42;
  add_check(s, "faltings_bound(6,42)=18⁹⁰⁰·42³⁰", fb.value == expect,
            std::to_string(mpz_sizeinbase(fb.value.get_mpz_t(), 10)) + " digits");
  add_check(s, "log10 ≈ 1178.4", std::abs(fb.log10 - 1178.4) <= 0.1, fmt(fb.log10, 7));
  add_check(s, "d=3 inside Q(ζ₄₂)", conductor_subfield_check(3));
  add_check(s, "d=7 inside Q(ζ₄₂)", conductor_subfield_check(7));
  add_check(s, "d=1 outside Q(ζ₄₂)", !conductor_subfield_check(1));
}

std::string counters_text(const SearchCounters& c) {
  std::ostringstream os;
  os << "enumerated " << c.enumerated << ", prescreen pass " << c.prescreen_pass << ", prescreen fail "
     << c.prescreen_fail << ", rejected " << c.rejected << ", matches " << c.matches << ", duplicates "
     << c.duplicates << ", certificates " << c.certificates << ", with witness " << c.witnesses << ", weil_ok "
     << c.weil_ok;
  return os.str();
}

bool same_run(const RunManifest& a, const RunManifest& b) {
  const SearchConfig &x = a.config, &y = b.config;
  return x.ell == y.ell && x.d == y.d && x.height == y.height && x.precision == y.precision &&
         x.tolerance == y.tolerance && x.config_id == y.config_id && x.max_alphas == y.max_alphas &&
         a.generator == b.generator && a.config_digest == b.config_digest && a.verify == b.verify;
}

}  // namespace

Precision default_precision() {
  const char* env = std::getenv("HECKE_PRECISION");
  if (!env || !*env) return kDefaultPrecision;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 64 || v > 65536) throw UsageError("HECKE_PRECISION must be an integer in [64, 65536]");
  return static_cast<Precision>(v);
}

ReportDocument build_verify_report(Precision prec) {
  ReportDocument doc;
  doc.title = "hecke verify";
  field_section(doc, prec);
  cm_section(doc);
  norm_section(doc);
  hecke_section(doc);
  numerics_section(doc, prec);
  height_section(doc);
  return doc;
}

int cmd_verify(std::ostream& out, bool json, Precision prec) {
  const ReportDocument doc = build_verify_report(prec);
  out << (json ? doc.to_json() + "\n" : doc.to_text());
  return doc.all_passed() ? kExitOk : kExitCheckFailed;
}

int cmd_search(const SearchOptions& opt, std::ostream& out, std::ostream& err) {
  SearchConfig cfg = opt.cfg;
  if (is_prime(cfg.ell) && cfg.ell % 42 != 1)
    err << "warning: " << cfg.ell << " ≢ 1 (mod 42); it does not split completely in L(sqrt(-d))\n";
  try {
    check_search_config(cfg);
  } catch (const PipelineRefusal& e) {
    err << "refused: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  EmbeddingConfig embedding;
  bool validated = false;
  if (opt.config_path) {
    embedding = load_config_or_throw(*opt.config_path);
    validated = embedding.validated();
  } else {
    embedding = validate_config(embedding, PrecisionContext::with_precision(cfg.precision), opt.validation_samples,
                                opt.seed);
    validated = embedding.validated();
  }
  if (!validated && !opt.waive_validation) {
    err << "refused: embedding config '" << embedding.id
        << "' has no passing validation record (use --waive-config-validation to override)\n";
    return kExitCheckFailed;
  }
  cfg.config_id = embedding.id;

  const PrimeIdealData p = default_prime_ideal(cfg.ell);
  const ComponentMaps maps(embedding, PrecisionContext::with_precision(cfg.precision), true);
  std::optional<ComponentMaps> maps2;
  if (opt.verify) maps2.emplace(embedding, PrecisionContext::with_precision(2 * cfg.precision), true);

  RunManifest manifest;
  manifest.config = cfg;
  manifest.generator = p.generator.to_string();
  manifest.root = p.root;
  manifest.config_path = opt.config_path ? opt.config_path->string() : "";
  manifest.config_digest = embedding.digest();
  manifest.config_validated = validated;
  manifest.validation_waived = opt.waive_validation;
  manifest.seed = opt.seed;
  manifest.verify = opt.verify;
  manifest.started_at = utc_timestamp();

  SearchState state;
  long verified = 0;
  std::vector<CandidateCertificate> all;
  std::unique_ptr<LedgerWriter> writer;
  if (opt.resume && std::filesystem::exists(opt.output)) {
    LedgerContents prev;
    try {
      prev = read_ledger(opt.output);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("cannot resume: ") + e.what());
    }
    if (!same_run(prev.manifest, manifest))
      throw UsageError("cannot resume: the ledger was written with a different configuration");
    writer = std::make_unique<LedgerWriter>(opt.output, false);
    for (const auto& line : prev.resumable_lines) writer->write(line);
    if (prev.checkpoint) {
      state.cursor = prev.checkpoint->cursor;
      state.counters = prev.checkpoint->counters;
      verified = prev.checkpoint->verified;
    }
    for (const auto& c : prev.resumable_certificates) state.seen_keys.insert(c.dedup_key());
    all = prev.resumable_certificates;
    writer->write(serialize_resume(state.cursor, utc_timestamp()));
    out << "resuming at cursor " << state.cursor << "\n";
  } else {
    try {
      writer = std::make_unique<LedgerWriter>(opt.output, false);
    } catch (const std::runtime_error& e) {
      throw EnvironmentError(e.what());
    }
    writer->write(serialize_manifest(manifest));
  }

  long batches = 0;
  long failed = 0;
  const SearchResult result = search_mode_b(cfg, p, maps, std::move(state), [&](const SearchBatch& batch) {
    for (auto cert : batch.certificates) {
      if (opt.verify) {
        const auto rep = verify_certificate(cert, p, &*maps2, 2 * cfg.precision, cfg.tolerance);
        cert.status = rep.verified ? "verified" : "failed: " + rep.failing_check;
        if (rep.verified) ++verified;
        else ++failed;
      }
      writer->write(serialize_certificate(cert));
      all.push_back(std::move(cert));
    }
    writer->write(serialize_checkpoint({batch.end, batch.counters, verified}));
    ++batches;
    return opt.stop_after_batches < 0 || batches < opt.stop_after_batches;
  });

  out << "prime " << p.ell << ", generator " << p.generator.to_string() << ", root " << p.root << "\n";
  out << "alphas " << result.total << " at height " << cfg.height << "\n";
  out << counters_text(result.state.counters) << "\n";
  if (result.caveat) out << "caveat: " << *result.caveat << "\n";
  if (!result.completed) {
    out << "stopped at cursor " << result.state.cursor << " of " << result.total << "\n";
    return kExitOk;
  }
  Summary summary;
  summary.total = result.total;
  summary.cursor = result.state.cursor;
  summary.counters = result.state.counters;
  summary.verified = verified;
  summary.completed = true;
  summary.certificate_digest = certificate_digest(all);
  summary.caveat = result.caveat;
  writer->write(serialize_summary(summary));
  writer->write(serialize_closed(utc_timestamp()));
  out << "certificates " << all.size() << ", verified " << verified << ", digest " << summary.certificate_digest
      << "\n";
  out << "ledger " << opt.output.string() << "\n";
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

int cmd_cmtypes(long d, bool json, std::ostream& out) {
  if (!is_squarefree(d)) throw UsageError("d must be a positive squarefree integer");
  const auto types = enumerate_cm_types(d);
  const auto weil = weil_compatible_filter(types);
  long pairs = 0;
  for (const auto& phi : weil)
    if (std::find(weil.begin(), weil.end(), phi.conjugate()) != weil.end()) ++pairs;
  pairs /= 2;
  const auto orbits = galois_orbits_cm_types(d, true);
  const GaloisGroupM g(d);
  long trivial = 0;
  for (const auto& phi : weil) trivial += stabilizer(phi).reflex_equals_m;
  if (json) {
    nlohmann::json j = {{"d", d},
                        {"types", types.size()},
                        {"weil_compatible", weil.size()},
                        {"weil_pairs", pairs},
                        {"galois", g.descriptor()},
                        {"weil_orbit_sizes", orbits.sizes()},
                        {"reflex_equals_m", trivial}};
    j["weil_types"] = nlohmann::json::array();
    for (const auto& phi : weil)
      j["weil_types"].push_back({{"type", phi.to_string()}, {"class", weil_class(sign_assignment_from_cm_type(phi))}});
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  out << types.size() << " types, " << weil.size() << " Weil-compatible, " << pairs << " pairs\n";
  out << "Galois group: " << g.descriptor() << "\n";
  out << "Weil orbit sizes: " << join_sizes(orbits.sizes()) << "\n";
  out << "Weil types with trivial stabiliser (reflex field = M): " << trivial << "\n";
  for (const auto& phi : weil)
    out << "  " << phi.to_string() << "  class " << weil_class(sign_assignment_from_cm_type(phi))
        << (stabilizer(phi).reflex_equals_m ? "" : "  (nontrivial stabiliser)") << "\n";
  return kExitOk;
}

int cmd_norms(long d, long ell, long coeff_bound, unsigned workers, bool json, std::ostream& out) {
  if (!is_squarefree(d)) throw UsageError("d must be a positive squarefree integer");
  if (!is_prime(ell)) throw UsageError(std::to_string(ell) + " is not prime");
  if (coeff_bound < 1) throw UsageError("coeff-bound must be at least 1");
  const auto sols = solve_norm_equation(d, ell, coeff_bound, workers);
  if (json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : sols)
      arr.push_back({{"a", s.alpha.a.to_string()},
                     {"b", s.alpha.b.to_string()},
                     {"trace", s.trace.to_string()},
                     {"sign_vector", s.sign_vector.to_string()},
                     {"weil_ok", s.weil_ok},
                     {"discriminant_witness", s.discriminant_witness ? s.discriminant_witness->to_string() : ""}});
    out << nlohmann::json{{"d", d}, {"ell", ell}, {"coeff_bound", coeff_bound}, {"solutions", arr}}.dump(2) << "\n";
    return kExitOk;
  }
  out << sols.size() << " solutions of a^2 + " << d << " b^2 = " << ell << " (coeff-bound " << coeff_bound << ")\n";
  for (const auto& s : sols) {
    const FieldElement disc = s.trace * s.trace - FieldElement(4 * ell);
    out << "  a = " << s.alpha.a.to_string() << ", b = " << s.alpha.b.to_string() << ", trace "
        << s.trace.to_string() << ", disc " << disc.to_string() << ", signs " << s.sign_vector.to_string()
        << ", weil_ok=" << (s.weil_ok ? "true" : "false") << "\n";
  }
  return kExitOk;
}

int cmd_prescreen(long ell, double height, bool json, std::ostream& out) {
  PrimeIdealData p;
  try {
    p = default_prime_ideal(ell);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto acc = sweep_accounting(p);
  long alpha_total = 0, alpha_pass = 0;
  if (height > 0) {
    const auto e = enumerate_alpha(p, height);
    alpha_total = static_cast<long>(e.matrices.size());
    for (const auto& m : e.matrices) alpha_pass += prescreen_mod_ell(m, p);
  }
  if (json) {
    nlohmann::json reps = nlohmann::json::array();
    for (const auto& r : enumerate_cosets(p)) {
      const auto d = prescreen_detail(r.matrix, p);
      reps.push_back({{"label", r.label_string()}, {"pass", d.pass}, {"legendre", d.legendre}});
    }
    out << nlohmann::json{{"ell", ell},
                          {"generator", p.generator.to_string()},
                          {"cosets", acc.cosets},
                          {"formal_systems", acc.formal_systems},
                          {"solvable_systems", acc.solvable_systems},
                          {"linear_systems", acc.linear_systems},
                          {"prescreen_pass", acc.prescreen_pass},
                          {"height", height},
                          {"alphas", alpha_total},
                          {"alpha_prescreen_pass", alpha_pass},
                          {"reps", reps}}
               .dump(2)
        << "\n";
    return kExitOk;
  }
  out << "prime " << ell << ", generator " << p.generator.to_string() << ", root " << p.root << "\n";
  out << acc.cosets << " cosets x " << acc.branch_choices << " branch choices = " << acc.formal_systems
      << " formal systems\n";
  out << "canonical reps: " << acc.linear_systems << " linear (c = 0), " << acc.solvable_systems
      << " solvable with a root in H at every embedding\n";
  out << "prescreen pass rate over canonical reps: " << acc.prescreen_pass << "/" << acc.cosets << "\n";
  if (height > 0)
    out << "prescreen pass rate over elliptic alphas at height " << height << ": " << alpha_pass << "/" << alpha_total
        << "\n";
  return kExitOk;
}

int cmd_validate_config(const ValidateOptions& opt, std::ostream& out) {
  EmbeddingConfig cfg = opt.config_path ? load_config_or_throw(*opt.config_path) : EmbeddingConfig{};
  const EmbeddingConfig done =
      validate_config(cfg, PrecisionContext::with_precision(opt.precision), opt.samples, opt.seed, opt.tolerance);
  const auto& rec = *done.validation;
  bool ok = true;
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : rec.components) {
    ok = ok && c.passed;
    comps.push_back({{"k", c.k},
                     {"passed", c.passed},
                     {"max_residual", c.max_residual},
                     {"relation_residual", c.relation_residual}});
  }
  if (opt.json) {
    out << nlohmann::json{{"config", done.id}, {"digest", rec.digest}, {"components", comps}}.dump(2) << "\n";
  } else {
    out << "config " << done.id << " (digest " << rec.digest << "), " << opt.samples << " samples, seed " << opt.seed
        << ", precision " << opt.precision << "\n";
    for (int k : kLabels) {
      const auto it = std::find_if(rec.components.begin(), rec.components.end(),
                                   [k](const ComponentValidation& c) { return c.k == k; });
      if (it == rec.components.end()) {
        out << "  k=" << k << ": absent\n";
        continue;
      }
      out << "  k=" << k << ": " << (it->passed ? "pass" : "FAIL") << "  B-residual max " << fmt(it->max_residual, 3)
          << ", relation residual " << fmt(it->relation_residual, 3) << "\n";
    }
  }
  if (opt.output) save_config(done, *opt.output);
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_candidates(const ValidateOptions& opt, bool validate, std::ostream& out) {
  EmbeddingConfig cfg;
  cfg.id = "candidates";
  for (int k : kLabels) {
    if (k == 1) continue;
    const auto cands = candidate_triangles(k);
    out << "k=" << k << ": " << cands.size() << " candidate(s)\n";
    for (const auto& t : cands)
      out << "  (" << t.angles[0].get_str() << ", " << t.angles[1].get_str() << ", " << t.angles[2].get_str() << ") "
          << (t.reversed ? "reversed" : "standard") << "\n";
    if (!cands.empty()) cfg.triangles.push_back(cands.front());
  }
  if (!validate) {
    if (opt.output) save_config(cfg, *opt.output);
    return kExitOk;
  }
  const EmbeddingConfig done =
      validate_config(cfg, PrecisionContext::with_precision(opt.precision), opt.samples, opt.seed, opt.tolerance);
  bool ok = true;
  for (const auto& c : done.validation->components) {
    ok = ok && c.passed;
    out << "  k=" << c.k << ": " << (c.passed ? "pass" : "FAIL") << "  B-residual max " << fmt(c.max_residual, 3)
        << ", relation residual " << fmt(c.relation_residual, 3) << "\n";
  }
  if (opt.output) save_config(done, *opt.output);
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_recheck(const std::filesystem::path& ledger, const std::optional<std::filesystem::path>& config_path,
                bool json, std::ostream& out) {
  if (!std::filesystem::exists(ledger)) throw EnvironmentError("ledger " + ledger.string() + " does not exist");
  LedgerContents contents;
  try {
    contents = read_ledger(ledger);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const RunManifest& m = contents.manifest;
  const PrimeIdealData p = default_prime_ideal(m.config.ell);
  if (p.generator.to_string() != m.generator) throw UsageError("ledger generator differs from the default prime");
  EmbeddingConfig cfg;
  if (config_path) cfg = load_config_or_throw(*config_path);
  else if (!m.config_path.empty()) cfg = load_config_or_throw(m.config_path);
  const Precision prec = 2 * m.config.precision;
  const ComponentMaps maps(cfg, PrecisionContext::with_precision(prec), true);
  long ok = 0;
  std::map<std::string, long> failures;
  for (const auto& c : contents.certificates) {
    const auto rep = verify_certificate(c, p, &maps, prec, m.config.tolerance);
    if (rep.verified) ++ok;
    else ++failures[rep.failing_check];
  }
  const long n = static_cast<long>(contents.certificates.size());
  if (json) {
    out << nlohmann::json{{"certificates", n}, {"verified", ok}, {"failures", failures}, {"precision", prec}}.dump(2)
        << "\n";
  } else {
    out << ok << "/" << n << " certificates verified at " << prec << " bits\n";
    for (const auto& [check, count] : failures) out << "  failed '" << check << "': " << count << "\n";
  }
  return ok == n ? kExitOk : kExitCheckFailed;
}

int cmd_reconstruct(const std::filesystem::path& ledger, long limit, std::ostream& out) {
  if (!std::filesystem::exists(ledger)) throw EnvironmentError("ledger " + ledger.string() + " does not exist");
  const LedgerContents contents = read_ledger(ledger);
  long tried = 0, found = 0;
  for (const auto& c : contents.certificates) {
    if (limit >= 0 && tried >= limit) break;
    ++tried;
    const auto r = reconstruct_alpha(c.fixed_tuple, c.alpha.det);
    const HeckeMatrix neg(-c.alpha.entries);
    const bool hit = std::any_of(r.matches.begin(), r.matches.end(),
                                 [&](const HeckeMatrix& m) { return m == c.alpha || m == neg; });
    found += hit;
    out << "  #" << c.index << ": lattice rank " << r.basis.size() << ", " << r.matches.size() << " det matches, "
        << (hit ? "alpha recovered" : "alpha NOT recovered") << "\n";
  }
  out << found << "/" << tried << " recovered\n";
  return found == tried ? kExitOk : kExitCheckFailed;
}

}  // namespace hecke::app
