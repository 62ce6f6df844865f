#include "hecke_app/ledger.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

namespace hecke::app {

using nlohmann::json;

namespace {

json integral_json(const IntegralElement& x) {
  json a = json::array();
  for (int i = 0; i < kDegree; ++i) {
    if (x[i].fits_slong_p()) a.push_back(x[i].get_si());
    else a.push_back(x[i].get_str());
  }
  return a;
}

IntegralElement integral_from(const json& j) {
  if (!j.is_array() || j.size() != kDegree) throw std::invalid_argument("expected six integer coefficients");
  IntegralElement x;
  for (int i = 0; i < kDegree; ++i) {
    if (j[i].is_number_integer()) x[i] = static_cast<long>(j[i].get<std::int64_t>());
    else x[i] = mpz_class(j[i].get<std::string>());
  }
  return x;
}

json field_json(const FieldElement& x) {
  json a = json::array();
  for (int i = 0; i < kDegree; ++i) a.push_back(x[i].get_str());
  return a;
}

FieldElement field_from(const json& j) {
  if (!j.is_array() || j.size() != kDegree) throw std::invalid_argument("expected six rational coefficients");
  FieldElement x;
  for (int i = 0; i < kDegree; ++i) {
    x[i] = mpq_class(j[i].get<std::string>());
    x[i].canonicalize();
  }
  return x;
}

json complex_json(const Complex& z) { return json::array({to_hex_string(z.re), to_hex_string(z.im)}); }

Complex complex_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected a pair of hex floats");
  return {from_hex_string(j[0].get<std::string>()), from_hex_string(j[1].get<std::string>())};
}

json counters_json(const SearchCounters& c) {
  return {{"enumerated", c.enumerated}, {"prescreen_pass", c.prescreen_pass}, {"prescreen_fail", c.prescreen_fail},
          {"rejected", c.rejected},     {"matches", c.matches},               {"duplicates", c.duplicates},
          {"certificates", c.certificates}, {"witnesses", c.witnesses},     {"weil_ok", c.weil_ok}};
}

SearchCounters counters_from(const json& j) {
  SearchCounters c;
  c.enumerated = j.at("enumerated").get<long>();
  c.prescreen_pass = j.at("prescreen_pass").get<long>();
  c.prescreen_fail = j.at("prescreen_fail").get<long>();
  c.rejected = j.at("rejected").get<long>();
  c.matches = j.at("matches").get<long>();
  c.duplicates = j.at("duplicates").get<long>();
  c.certificates = j.at("certificates").get<long>();
  c.witnesses = j.at("witnesses").get<long>();
  c.weil_ok = j.at("weil_ok").get<long>();
  return c;
}

json parse_line(const std::string& line) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed ledger line: ") + e.what());
  }
}

}  // namespace

std::string serialize_manifest(const RunManifest& m) {
  const SearchConfig& c = m.config;
  json j = {{"type", "manifest"},
            {"schema", kLedgerSchema},
            {"tool_version", m.tool_version},
            {"subcommand", m.subcommand},
            {"config",
             {{"ell", c.ell},
              {"d", c.d},
              {"height", c.height},
              {"precision", c.precision},
              {"tolerance", c.tolerance},
              {"config_id", c.config_id},
              {"workers", c.workers},
              {"batch_size", c.batch_size},
              {"max_alphas", c.max_alphas}}},
            {"generator", m.generator},
            {"root", m.root},
            {"config_path", m.config_path},
            {"config_digest", m.config_digest},
            {"config_validated", m.config_validated},
            {"validation_waived", m.validation_waived},
            {"seed", m.seed},
            {"verify", m.verify},
            {"started_at", m.started_at}};
  return j.dump();
}

RunManifest parse_manifest(const std::string& line) {
  const json j = parse_line(line);
  if (j.value("type", "") != "manifest") throw std::invalid_argument("first ledger line is not a manifest");
  if (j.value("schema", "") != kLedgerSchema) throw std::invalid_argument("unsupported ledger schema");
  try {
    RunManifest m;
    m.tool_version = j.at("tool_version").get<std::string>();
    m.subcommand = j.at("subcommand").get<std::string>();
    const json& c = j.at("config");
    m.config.ell = c.at("ell").get<long>();
    m.config.d = c.at("d").get<long>();
    m.config.height = c.at("height").get<double>();
    m.config.precision = c.at("precision").get<Precision>();
    m.config.tolerance = c.at("tolerance").get<double>();
    m.config.config_id = c.at("config_id").get<std::string>();
    m.config.workers = c.at("workers").get<unsigned>();
    m.config.batch_size = c.at("batch_size").get<long>();
    m.config.max_alphas = c.at("max_alphas").get<long>();
    m.generator = j.at("generator").get<std::string>();
    m.root = j.at("root").get<long>();
    m.config_path = j.at("config_path").get<std::string>();
    m.config_digest = j.at("config_digest").get<std::string>();
    m.config_validated = j.at("config_validated").get<bool>();
    m.validation_waived = j.at("validation_waived").get<bool>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.verify = j.at("verify").get<bool>();
    m.started_at = j.at("started_at").get<std::string>();
    return m;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed manifest: ") + e.what());
  }
}

std::string serialize_certificate(const CandidateCertificate& c) {
  json tuple = json::array();
  for (const auto& w : c.fixed_tuple) tuple.push_back(complex_json(w));
  json residuals = json::array();
  for (const auto& r : c.residuals) residuals.push_back({{"k", r.k}, {"value", to_hex_string(r.residual)}});
  json witness = nullptr;
  if (c.witness_b) witness = {{"a", field_json(*c.witness_a)}, {"b", field_json(*c.witness_b)}, {"d", c.d}};
  const auto& e = c.alpha.entries;
  json j = {{"type", "certificate"},
            {"ell", c.ell},
            {"root", c.root},
            {"index", c.index},
            {"coset", c.coset_label},
            {"alpha",
             {{"a", integral_json(e.a)}, {"b", integral_json(e.b)}, {"c", integral_json(e.c)}, {"d", integral_json(e.d)}}},
            {"det", integral_json(c.alpha.det)},
            {"precision", c.precision},
            {"fixed_tuple", tuple},
            {"z0", complex_json(c.z0)},
            {"z0_reduced", complex_json(c.z0_reduced)},
            {"word_even", c.word_even},
            {"dedup_ambiguous", c.dedup_ambiguous},
            {"trace", integral_json(c.trace)},
            {"d", c.d},
            {"witness", witness},
            {"rational_trace_constraint", c.rational_trace_constraint},
            {"sign_vector", c.sign_vector ? json(c.sign_vector->to_string()) : json(nullptr)},
            {"weil_ok", c.weil_ok},
            {"cm_class", c.cm_class},
            {"residuals", residuals},
            {"config_id", c.config_id},
            {"status", c.status}};
  return j.dump();
}

CandidateCertificate parse_certificate(const std::string& line) {
  const json j = parse_line(line);
  if (j.value("type", "") != "certificate") throw std::invalid_argument("not a certificate record");
  try {
    CandidateCertificate c;
    c.ell = j.at("ell").get<long>();
    c.root = j.at("root").get<long>();
    c.index = j.at("index").get<long>();
    c.coset_label = j.at("coset").get<std::string>();
    const json& a = j.at("alpha");
    c.alpha = HeckeMatrix(
        {integral_from(a.at("a")), integral_from(a.at("b")), integral_from(a.at("c")), integral_from(a.at("d"))});
    if (!(integral_from(j.at("det")) == c.alpha.det)) throw std::invalid_argument("recorded det disagrees with entries");
    c.precision = j.at("precision").get<Precision>();
    const json& tuple = j.at("fixed_tuple");
    if (!tuple.is_array() || tuple.size() != kDegree) throw std::invalid_argument("fixed tuple needs six entries");
    for (int i = 0; i < kDegree; ++i) c.fixed_tuple[i] = complex_from(tuple[i]);
    c.z0 = complex_from(j.at("z0"));
    c.z0_reduced = complex_from(j.at("z0_reduced"));
    c.word_even = j.at("word_even").get<bool>();
    c.dedup_ambiguous = j.at("dedup_ambiguous").get<bool>();
    c.trace = integral_from(j.at("trace"));
    c.d = j.at("d").get<long>();
    const json& w = j.at("witness");
    if (!w.is_null()) {
      c.witness_a = field_from(w.at("a"));
      c.witness_b = field_from(w.at("b"));
    }
    c.rational_trace_constraint = j.at("rational_trace_constraint").get<bool>();
    const json& sv = j.at("sign_vector");
    if (!sv.is_null()) c.sign_vector = SignVector::parse(sv.get<std::string>());
    c.weil_ok = j.at("weil_ok").get<bool>();
    c.cm_class = j.at("cm_class").get<std::string>();
    for (const auto& r : j.at("residuals")) c.residuals.push_back({r.at("k").get<int>(), from_hex_string(r.at("value").get<std::string>())});
    c.config_id = j.at("config_id").get<std::string>();
    c.status = j.at("status").get<std::string>();
    return c;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed certificate: ") + e.what());
  }
}

std::string serialize_checkpoint(const Checkpoint& c) {
  return json{{"type", "checkpoint"}, {"cursor", c.cursor}, {"counters", counters_json(c.counters)}, {"verified", c.verified}}
      .dump();
}

std::string serialize_summary(const Summary& s) {
  json j = {{"type", "summary"},
            {"total", s.total},
            {"cursor", s.cursor},
            {"counters", counters_json(s.counters)},
            {"verified", s.verified},
            {"completed", s.completed},
            {"certificate_digest", s.certificate_digest},
            {"caveat", s.caveat ? json(*s.caveat) : json(nullptr)}};
  return j.dump();
}

std::string serialize_resume(long cursor, const std::string& at) {
  return json{{"type", "resume"}, {"cursor", cursor}, {"at", at}}.dump();
}

std::string serialize_closed(const std::string& at) { return json{{"type", "closed"}, {"ended_at", at}}.dump(); }

std::string record_type(const std::string& line) { return parse_line(line).value("type", ""); }

LedgerContents read_ledger(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read ledger " + path.string());
  LedgerContents out;
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) lines.push_back(line);
  if (!lines.empty()) {
    if (!json::accept(lines.back())) {
      lines.pop_back();
      out.torn_tail = true;
    }
  }
  bool first = true;
  std::vector<CandidateCertificate> pending;
  for (const auto& line : lines) {
    if (first) {
      out.manifest = parse_manifest(line);
      out.resumable_lines.push_back(line);
      first = false;
      continue;
    }
    const json j = parse_line(line);
    const std::string type = j.value("type", "");
    if (type == "certificate") {
      out.certificates.push_back(parse_certificate(line));
      pending.push_back(out.certificates.back());
    } else if (type == "checkpoint") {
      Checkpoint c;
      c.cursor = j.at("cursor").get<long>();
      c.counters = counters_from(j.at("counters"));
      c.verified = j.at("verified").get<long>();
      out.checkpoint = c;
      out.resumable_certificates.insert(out.resumable_certificates.end(), pending.begin(), pending.end());
      pending.clear();
    } else if (type == "summary") {
      Summary s;
      s.total = j.at("total").get<long>();
      s.cursor = j.at("cursor").get<long>();
      s.counters = counters_from(j.at("counters"));
      s.verified = j.at("verified").get<long>();
      s.completed = j.at("completed").get<bool>();
      s.certificate_digest = j.at("certificate_digest").get<std::string>();
      if (!j.at("caveat").is_null()) s.caveat = j.at("caveat").get<std::string>();
      out.summary = s;
    } else if (type == "resume") {
      ++out.resumes;
    } else if (type == "manifest") {
      throw std::invalid_argument("ledger has more than one manifest");
    } else if (type != "closed") {
      throw std::invalid_argument("unknown ledger record type '" + type + "'");
    }
    if (type != "summary" && type != "closed") out.resumable_lines.push_back(line);
  }
  if (first) throw std::invalid_argument("ledger is empty");
  // Drop trailing lines after the last checkpoint.
  size_t keep = 1;
  for (size_t i = 1; i < out.resumable_lines.size(); ++i)
    if (record_type(out.resumable_lines[i]) == "checkpoint") keep = i + 1;
  out.resumable_lines.resize(keep);
  return out;
}

std::string certificate_digest(const std::vector<CandidateCertificate>& certs) {
  std::vector<std::string> keys;
  keys.reserve(certs.size());
  for (const auto& c : certs) keys.push_back(c.dedup_key() + "#" + c.alpha.to_string());
  std::sort(keys.begin(), keys.end());
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& k : keys) {
    for (unsigned char ch : k) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

LedgerWriter::LedgerWriter(const std::filesystem::path& path, bool append)
    : out_(path, append ? std::ios::app : std::ios::trunc) {
  if (!out_) throw std::runtime_error("cannot open ledger " + path.string() + " for writing");
}

void LedgerWriter::write(const std::string& line) {
  out_ << line << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("ledger write failed");
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace hecke::app
