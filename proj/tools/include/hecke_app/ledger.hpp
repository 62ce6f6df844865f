#pragma once

// Line-delimited search ledger: one manifest, then certificate, checkpoint
// and resume records, then a summary and a closing record.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "hecke/hecke_search.hpp"

namespace hecke::app {

inline constexpr const char* kLedgerSchema = "hecke-ledger/1";
inline constexpr const char* kToolVersion = "0.3.0";

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string subcommand = "search";
  SearchConfig config;
  std::string generator;  // the prime generator pi, exact
  long root = 0;
  std::string config_path;  // empty for the built-in k = 1 config
  std::string config_digest;
  bool config_validated = false;
  bool validation_waived = false;
  std::uint64_t seed = 0;
  bool verify = true;
  std::string started_at;
};

struct Checkpoint {
  long cursor = 0;
  SearchCounters counters;
  long verified = 0;
};

struct Summary {
  long total = 0;
  long cursor = 0;
  SearchCounters counters;
  long verified = 0;
  bool completed = false;
  std::string certificate_digest;
  std::optional<std::string> caveat;
};

std::string serialize_manifest(const RunManifest& m);
RunManifest parse_manifest(const std::string& line);
// The certificate record carries every field exactly: integers as integer
// arrays, rationals as "p/q" strings, floats as hex strings.
std::string serialize_certificate(const CandidateCertificate& c);
CandidateCertificate parse_certificate(const std::string& line);
std::string serialize_checkpoint(const Checkpoint& c);
std::string serialize_summary(const Summary& s);
std::string serialize_resume(long cursor, const std::string& at);
std::string serialize_closed(const std::string& at);

// Record type of a line ("manifest", "certificate", ...). Throws
// std::invalid_argument on malformed JSON.
std::string record_type(const std::string& line);

struct LedgerContents {
  RunManifest manifest;
  std::vector<CandidateCertificate> certificates;
  std::optional<Checkpoint> checkpoint;  // the last one
  std::optional<Summary> summary;
  long resumes = 0;
  // A final line that is not valid JSON (an interrupted write) is dropped.
  bool torn_tail = false;
  // Lines up to and including the last checkpoint (the manifest alone if
  // there is none); a resumed run continues from there.
  std::vector<std::string> resumable_lines;
  std::vector<CandidateCertificate> resumable_certificates;
};

// Throws std::runtime_error when the file cannot be read and
// std::invalid_argument when it is not a well-formed ledger.
LedgerContents read_ledger(const std::filesystem::path& path);

// FNV-1a over the sorted dedup keys and matrices of the certificates.
std::string certificate_digest(const std::vector<CandidateCertificate>& certs);

// The only mutation point of a ledger file. Each line is flushed.
class LedgerWriter {
 public:
  // Truncates unless append is set. Throws std::runtime_error on failure.
  LedgerWriter(const std::filesystem::path& path, bool append);
  void write(const std::string& line);

 private:
  std::ofstream out_;
};

std::string utc_timestamp();

}  // namespace hecke::app
