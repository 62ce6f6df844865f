#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <set>
#include <sstream>

#include "hecke_app/commands.hpp"
#include "hecke_app/ledger.hpp"

using namespace hecke;
using namespace hecke::app;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path = fs::temp_directory_path() / ("hecke_test_" + std::to_string(rng()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

IntegralElement random_integral(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> u(-1000000, 1000000);
  IntegralElement x;
  for (int i = 0; i < kDegree; ++i) x[i] = u(rng);
  if (rng() % 7 == 0) x[0] = mpz_class("123456789012345678901234567890") * (rng() % 2 ? 1 : -1);
  return x;
}

FieldElement random_field(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> u(-50, 50), v(1, 30);
  FieldElement x;
  for (int i = 0; i < kDegree; ++i) x[i] = mpq_class(u(rng), v(rng));
  for (int i = 0; i < kDegree; ++i) x[i].canonicalize();
  return x;
}

Real random_real(std::mt19937_64& rng, Precision prec) {
  std::uniform_real_distribution<double> u(-10, 10);
  Real x = Real(u(rng), prec) / Real(u(rng) + 11, prec);
  if (rng() % 5 == 0) x = ldexp(x, static_cast<long>(rng() % 2000) - 1000);
  if (rng() % 11 == 0) x = Real(0L, prec);
  return x;
}

CandidateCertificate synthetic(std::mt19937_64& rng) {
  CandidateCertificate c;
  c.ell = 43 + static_cast<long>(rng() % 100);
  c.root = static_cast<long>(rng() % 43);
  c.index = static_cast<long>(rng() % 100000);
  c.coset_label = rng() % 10 == 0 ? "inf" : std::to_string(rng() % 43);
  c.alpha = HeckeMatrix(IntegralMatrix{random_integral(rng), random_integral(rng), random_integral(rng),
                                       random_integral(rng)});
  c.precision = 64 + static_cast<Precision>(rng() % 300);
  for (auto& w : c.fixed_tuple) w = Complex(random_real(rng, c.precision), random_real(rng, c.precision));
  c.z0 = c.fixed_tuple[0];
  c.z0_reduced = Complex(random_real(rng, c.precision + 16), random_real(rng, c.precision + 16));
  c.word_even = rng() % 2;
  c.dedup_ambiguous = rng() % 3 == 0;
  c.trace = c.alpha.trace();
  c.d = rng() % 2 ? 3 : 7;
  if (rng() % 4) {
    c.witness_a = random_field(rng);
    c.witness_b = random_field(rng);
    c.rational_trace_constraint = rng() % 2;
    SignVector s;
    for (auto& x : s.s) x = rng() % 2 ? 1 : -1;
    c.sign_vector = s;
    c.weil_ok = s.plus_count() == 3;
    c.cm_class = c.weil_ok ? "weil:1,2,3" : "non-weil";
  }
  const long nres = static_cast<long>(rng() % 4);
  for (long i = 0; i < nres; ++i) c.residuals.push_back({kLabels[static_cast<size_t>(i + 1)], random_real(rng, 64)});
  c.config_id = rng() % 2 ? "k1-only" : "candidates";
  c.status = rng() % 2 ? "verified" : "failed: fixed tuple";
  return c;
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

SearchOptions small_search(const fs::path& out) {
  SearchOptions o;
  o.cfg.height = 3.0;
  o.cfg.batch_size = 40;
  o.cfg.workers = 2;
  o.output = out;
  return o;
}

}  // namespace

TEST_CASE("ledger certificate round trip for 1000 synthetic certificates") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const CandidateCertificate c = synthetic(rng);
    const std::string line = serialize_certificate(c);
    CHECK(line.find('\n') == std::string::npos);
    CHECK(record_type(line) == "certificate");
    const CandidateCertificate back = parse_certificate(line);
    CHECK(same_certificate(c, back));
    CHECK(serialize_certificate(back) == line);
  }
}

TEST_CASE("manifest round trip") {
  RunManifest m;
  m.config.height = 3.5;
  m.config.d = 7;
  m.config.tolerance = 1e-25;
  m.config.max_alphas = 100;
  m.generator = "t^5 - t^4";
  m.root = 5;
  m.config_path = "data/x.json";
  m.config_digest = "abc";
  m.config_validated = true;
  m.seed = 99;
  m.started_at = utc_timestamp();
  const RunManifest back = parse_manifest(serialize_manifest(m));
  CHECK(serialize_manifest(back) == serialize_manifest(m));
  CHECK(back.config.height == 3.5);
  CHECK(back.config.tolerance == 1e-25);
  CHECK(back.seed == 99);
  const auto j = nlohmann::json::parse(serialize_manifest(m));
  CHECK(j["schema"] == kLedgerSchema);
  CHECK_THROWS_AS(record_type("{not json"), std::invalid_argument);
}

TEST_CASE("search writes a well-formed ledger") {
  TempDir tmp;
  const fs::path out = tmp.path / "ledger.jsonl";
  std::ostringstream so, se;
  CHECK(cmd_search(small_search(out), so, se) == kExitOk);
  const auto lines = lines_of(out);
  REQUIRE(lines.size() > 3);
  CHECK(record_type(lines.front()) == "manifest");
  long manifests = 0, certs = 0;
  for (const auto& l : lines) {
    const std::string t = record_type(l);
    manifests += t == "manifest";
    certs += t == "certificate";
    CHECK(nlohmann::json::parse(l).is_object());
  }
  CHECK(manifests == 1);
  CHECK(certs == 314);
  CHECK(record_type(lines[lines.size() - 2]) == "summary");
  CHECK(record_type(lines.back()) == "closed");
  const LedgerContents c = read_ledger(out);
  REQUIRE(c.summary.has_value());
  CHECK(c.summary->completed);
  CHECK(c.summary->verified == 314);
  CHECK(c.summary->certificate_digest == certificate_digest(c.certificates));
  for (const auto& cert : c.certificates) CHECK(cert.status == "verified");

  std::ostringstream rc;
  CHECK(cmd_recheck(out, std::nullopt, false, rc) == kExitOk);
  CHECK(rc.str().find("314/314") != std::string::npos);
}

TEST_CASE("interrupted and resumed runs reproduce the uninterrupted certificate set") {
  TempDir tmp;
  std::ostringstream so, se;
  const fs::path full = tmp.path / "full.jsonl";
  REQUIRE(cmd_search(small_search(full), so, se) == kExitOk);
  const LedgerContents ref = read_ledger(full);

  for (long stop : {1L, 4L, 9L}) {
    CAPTURE(stop);
    const fs::path part = tmp.path / ("part" + std::to_string(stop) + ".jsonl");
    SearchOptions o = small_search(part);
    o.stop_after_batches = stop;
    REQUIRE(cmd_search(o, so, se) == kExitOk);
    const LedgerContents mid = read_ledger(part);
    CHECK_FALSE(mid.summary.has_value());
    CHECK(mid.checkpoint->cursor == stop * 40);

    // A torn trailing line from a crash is discarded on resume.
    std::ofstream(part, std::ios::app) << "{\"type\":\"certificate\",\"ell\":4";
    o.stop_after_batches = -1;
    o.resume = true;
    o.cfg.workers = 3;
    REQUIRE(cmd_search(o, so, se) == kExitOk);
    const LedgerContents done = read_ledger(part);
    REQUIRE(done.summary.has_value());
    CHECK(done.resumes == 1);
    CHECK(done.summary->certificate_digest == ref.summary->certificate_digest);
    CHECK(done.summary->counters == ref.summary->counters);
    REQUIRE(done.certificates.size() == ref.certificates.size());
    for (size_t i = 0; i < ref.certificates.size(); ++i)
      CHECK(same_certificate(done.certificates[i], ref.certificates[i]));
  }

  SearchOptions again = small_search(full);
  again.resume = true;
  REQUIRE(cmd_search(again, so, se) == kExitOk);
  const LedgerContents twice = read_ledger(full);
  CHECK(twice.certificates.size() == ref.certificates.size());
  CHECK(twice.summary->certificate_digest == ref.summary->certificate_digest);
  CHECK(twice.summary->counters == ref.summary->counters);
}

TEST_CASE("resume refuses a different configuration") {
  TempDir tmp;
  const fs::path out = tmp.path / "l.jsonl";
  std::ostringstream so, se;
  SearchOptions o = small_search(out);
  o.stop_after_batches = 1;
  REQUIRE(cmd_search(o, so, se) == kExitOk);
  o.resume = true;
  o.cfg.d = 7;
  CHECK_THROWS_AS(cmd_search(o, so, se), UsageError);
}

TEST_CASE("search flag errors and refusals") {
  TempDir tmp;
  std::ostringstream so, se;
  SearchOptions o = small_search(tmp.path / "x.jsonl");
  o.cfg.ell = 44;
  CHECK_THROWS_AS(cmd_search(o, so, se), UsageError);
  o.cfg.ell = 47;
  CHECK(cmd_search(o, so, se) == kExitCheckFailed);
  CHECK(se.str().find("47") != std::string::npos);
  CHECK_FALSE(fs::exists(tmp.path / "x.jsonl"));

  o.cfg.ell = 43;
  o.config_path = tmp.path / "missing.json";
  CHECK_THROWS_AS(cmd_search(o, so, se), EnvironmentError);

  EmbeddingConfig unvalidated;
  unvalidated.id = "raw";
  save_config(unvalidated, tmp.path / "raw.json");
  o.config_path = tmp.path / "raw.json";
  std::ostringstream e2;
  CHECK(cmd_search(o, so, e2) == kExitCheckFailed);
  CHECK(e2.str().find("waive") != std::string::npos);
  o.waive_validation = true;
  o.cfg.max_alphas = 20;
  CHECK(cmd_search(o, so, e2) == kExitOk);
  CHECK(read_ledger(o.output).manifest.validation_waived);
}

TEST_CASE("verify is side-effect free and its renderings agree") {
  TempDir tmp;
  const fs::path old = fs::current_path();
  fs::current_path(tmp.path);
  std::ostringstream text, json;
  const int rc_text = cmd_verify(text, false, 128);
  const int rc_json = cmd_verify(json, true, 128);
  fs::current_path(old);
  CHECK(fs::is_empty(tmp.path));
  CHECK(rc_text == kExitOk);
  CHECK(rc_json == kExitOk);
  CHECK(text.str().find("N(π₁)=43: pass") != std::string::npos);
  CHECK(text.str().find("orbits 6,2,6,6: pass") != std::string::npos);
  const auto j = nlohmann::json::parse(json.str());
  CHECK(j["passed"] == true);
  long items = 0;
  for (const auto& s : j["sections"])
    for (const auto& i : s["items"]) {
      ++items;
      const std::string name = i["name"];
      if (i["passed"].is_boolean())
        CHECK(text.str().find(name + ": " + (i["passed"].get<bool>() ? "pass" : "FAIL")) != std::string::npos);
      else
        CHECK(text.str().find(name + ": " + i["measured"].get<std::string>()) != std::string::npos);
    }
  CHECK(items > 30);
}

TEST_CASE("report failures are named") {
  ReportDocument doc;
  doc.title = "t";
  add_check(doc.section("a"), "good", true);
  add_check(doc.section("a"), "bad", false, "1", "2");
  add_value(doc.section("b"), "info", "7");
  CHECK_FALSE(doc.all_passed());
  CHECK(doc.failures() == std::vector<std::string>{"a: bad"});
  CHECK(doc.to_text().find("bad: FAIL  (1; expected 2)") != std::string::npos);
}

TEST_CASE("thin subcommands") {
  std::ostringstream ct;
  CHECK(cmd_cmtypes(3, false, ct) == kExitOk);
  CHECK(ct.str().find("64 types, 20 Weil-compatible, 10 pairs") != std::string::npos);
  CHECK_THROWS_AS(cmd_cmtypes(12, false, ct), UsageError);

  std::ostringstream nm;
  CHECK(cmd_norms(3, 43, 1, 1, false, nm) == kExitOk);
  CHECK(nm.str().find("a = 4, b = 3") != std::string::npos);
  CHECK(nm.str().find("weil_ok=true") == std::string::npos);
  std::ostringstream nj;
  CHECK(cmd_norms(7, 43, 1, 1, true, nj) == kExitOk);
  const auto j = nlohmann::json::parse(nj.str());
  REQUIRE(j["solutions"].size() == 1);
  CHECK(j["solutions"][0]["weil_ok"] == false);

  std::ostringstream ps;
  CHECK(cmd_prescreen(43, 2.5, false, ps) == kExitOk);
  CHECK(ps.str().find("2816 formal systems") != std::string::npos);
  CHECK_THROWS_AS(cmd_prescreen(47, 0, false, ps), UsageError);

  std::ostringstream vc;
  ValidateOptions vo;
  vo.samples = 3;
  CHECK(cmd_validate_config(vo, vc) == kExitOk);
  CHECK(vc.str().find("k=1: pass") != std::string::npos);
  CHECK(vc.str().find("k=5: absent") != std::string::npos);
}

TEST_CASE("reconstruct over a ledger") {
  TempDir tmp;
  const fs::path out = tmp.path / "l.jsonl";
  std::ostringstream so, se;
  SearchOptions o = small_search(out);
  o.cfg.max_alphas = 40;
  REQUIRE(cmd_search(o, so, se) == kExitOk);
  std::ostringstream rc;
  CHECK(cmd_reconstruct(out, 4, rc) == kExitOk);
  CHECK(rc.str().find("4/4 recovered") != std::string::npos);
  CHECK_THROWS_AS(cmd_reconstruct(tmp.path / "none.jsonl", 1, rc), EnvironmentError);
}

TEST_CASE("precision from the environment") {
  setenv("HECKE_PRECISION", "256", 1);
  CHECK(default_precision() == 256);
  setenv("HECKE_PRECISION", "abc", 1);
  CHECK_THROWS_AS(default_precision(), UsageError);
  unsetenv("HECKE_PRECISION");
  CHECK(default_precision() == kDefaultPrecision);
}
