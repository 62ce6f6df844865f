#pragma once

// Subcommands of the hecke tool. Each returns an exit code:
// 0 success, 1 check failure or refusal, 2 usage error, 3 environment.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "hecke/hecke_search.hpp"
#include "hecke_app/report.hpp"

namespace hecke::app {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitUsage = 2, kExitEnvironment = 3 };

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EnvironmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// HECKE_PRECISION if set (UsageError when malformed), else 128.
Precision default_precision();

// The cross-module fact suite. Pure: writes nothing to disk.
ReportDocument build_verify_report(Precision prec);
int cmd_verify(std::ostream& out, bool json, Precision prec);

struct SearchOptions {
  SearchConfig cfg;
  std::optional<std::filesystem::path> config_path;  // built-in k = 1 config when empty
  std::filesystem::path output = "hecke_ledger.jsonl";
  bool resume = false;
  bool waive_validation = false;
  bool verify = true;
  std::uint64_t seed = 42;
  long validation_samples = 10;
  // Stop after this many batches (testing interrupted runs); negative = all.
  long stop_after_batches = -1;
};
int cmd_search(const SearchOptions& opt, std::ostream& out, std::ostream& err);

int cmd_cmtypes(long d, bool json, std::ostream& out);
int cmd_norms(long d, long ell, long coeff_bound, unsigned workers, bool json, std::ostream& out);
// Prescreen statistics over the canonical coset reps and, for height > 0,
// over enumerate_alpha.
int cmd_prescreen(long ell, double height, bool json, std::ostream& out);

struct ValidateOptions {
  std::optional<std::filesystem::path> config_path;
  std::optional<std::filesystem::path> output;
  Precision precision = kDefaultPrecision;
  long samples = 10;
  std::uint64_t seed = 42;
  double tolerance = 1e-20;
  bool json = false;
};
int cmd_validate_config(const ValidateOptions& opt, std::ostream& out);

// Candidate conjugate triangles for each k, optionally validated and
// written out as a config.
int cmd_candidates(const ValidateOptions& opt, bool validate, std::ostream& out);

// Re-verifies every certificate of a ledger at doubled precision.
int cmd_recheck(const std::filesystem::path& ledger, const std::optional<std::filesystem::path>& config_path,
                bool json, std::ostream& out);

// Mode A over the certificates of a ledger: rebuilds each alpha from its
// fixed tuple by lattice reduction.
int cmd_reconstruct(const std::filesystem::path& ledger, long limit, std::ostream& out);

}  // namespace hecke::app
