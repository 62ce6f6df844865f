#include <CLI11.hpp>

#include <iostream>

#include "hecke_app/commands.hpp"
#include "hecke_app/ledger.hpp"

using namespace hecke;
using namespace hecke::app;

namespace {

std::optional<std::filesystem::path> opt_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::filesystem::path(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hecke-correspondence search over Q(cos pi/21)"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  bool json = false;
  long precision = 0;
  app.add_flag("--json", json, "machine-readable output");
  app.add_option("--precision", precision, "working precision in bits (default HECKE_PRECISION or 128)")
      ->check(CLI::Range(64L, 65536L));

  auto* verify = app.add_subcommand("verify", "cross-module fact suite");

  SearchOptions so;
  std::string search_config, output = "hecke_ledger.jsonl";
  auto* search = app.add_subcommand("search", "matrix-first Hecke search with a resumable ledger");
  search->add_option("--prime", so.cfg.ell, "rational prime ell");
  search->add_option("--d", so.cfg.d, "d in {3, 7}");
  search->add_option("--height", so.cfg.height, "entry height bound H");
  search->add_option("--tolerance", so.cfg.tolerance, "match tolerance")->check(CLI::PositiveNumber);
  search->add_option("--config", search_config, "embedding config (default: built-in k = 1)");
  search->add_option("--output", output, "ledger path");
  search->add_flag("--resume", so.resume, "continue from the last checkpoint of --output");
  search->add_option("--workers", so.cfg.workers, "worker threads")->check(CLI::Range(1U, 256U));
  search->add_option("--batch-size", so.cfg.batch_size, "alphas per checkpoint")->check(CLI::Range(1L, 1000000L));
  search->add_option("--max-alphas", so.cfg.max_alphas, "stop the enumeration after this many alphas");
  search->add_option("--seed", so.seed, "validation seed for the built-in config");
  search->add_option("--stop-after-batches", so.stop_after_batches, "interrupt after this many batches");
  search->add_flag("--waive-config-validation", so.waive_validation, "run with an unvalidated config");
  search->add_flag("!--no-verify", so.verify, "skip doubled-precision verification");

  long ct_d = 3;
  auto* cmtypes = app.add_subcommand("cmtypes", "CM types, Weil compatibility and Galois orbits");
  cmtypes->add_option("--d", ct_d, "squarefree d");

  long n_d = 3, n_ell = 43, n_bound = 1;
  unsigned n_workers = 1;
  auto* norms = app.add_subcommand("norms", "solutions of a^2 + d b^2 = ell");
  norms->add_option("--d", n_d, "squarefree d");
  norms->add_option("--prime", n_ell, "rational prime ell");
  norms->add_option("--coeff-bound", n_bound, "number of leading power-basis coefficients allowed");
  norms->add_option("--workers", n_workers, "worker threads")->check(CLI::Range(1U, 256U));

  long p_ell = 43;
  double p_height = 0;
  auto* prescreen = app.add_subcommand("prescreen", "coset accounting and the mod-ell prescreen");
  prescreen->add_option("--prime", p_ell, "rational prime ell");
  prescreen->add_option("--height", p_height, "also screen the alphas of this height");

  ValidateOptions vo;
  std::string v_config, v_output;
  auto add_validation = [&](CLI::App* sub) {
    sub->add_option("--output", v_output, "write the config with its validation record");
    sub->add_option("--samples", vo.samples, "sample points per component")->check(CLI::Range(1L, 100000L));
    sub->add_option("--seed", vo.seed, "sampling seed");
    sub->add_option("--tolerance", vo.tolerance, "residual tolerance")->check(CLI::PositiveNumber);
  };
  auto* validate = app.add_subcommand("validate-config", "check the B-equation for each configured component");
  validate->add_option("--config", v_config, "embedding config (default: built-in k = 1)");
  add_validation(validate);

  bool c_validate = false;
  auto* candidates = app.add_subcommand("candidates", "conjugate triangle candidates for each k");
  candidates->add_flag("--validate", c_validate, "validate the first candidate of each k");
  add_validation(candidates);

  std::string r_ledger, r_config;
  auto* recheck = app.add_subcommand("recheck", "re-verify a ledger at doubled precision");
  recheck->add_option("ledger", r_ledger, "ledger path")->required();
  recheck->add_option("--config", r_config, "embedding config (default: the one named in the ledger)");

  std::string a_ledger;
  long a_limit = -1;
  auto* reconstruct = app.add_subcommand("reconstruct", "recover alphas from their fixed tuples by LLL");
  reconstruct->add_option("ledger", a_ledger, "ledger path")->required();
  reconstruct->add_option("--limit", a_limit, "certificates to process");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    const Precision prec = precision > 0 ? precision : default_precision();
    std::ostream& out = std::cout;
    if (*verify) return cmd_verify(out, json, prec);
    if (*search) {
      so.cfg.precision = prec;
      so.config_path = opt_path(search_config);
      so.output = output;
      return cmd_search(so, out, std::cerr);
    }
    if (*cmtypes) return cmd_cmtypes(ct_d, json, out);
    if (*norms) return cmd_norms(n_d, n_ell, n_bound, n_workers, json, out);
    if (*prescreen) return cmd_prescreen(p_ell, p_height, json, out);
    vo.precision = prec;
    vo.json = json;
    vo.output = opt_path(v_output);
    if (*validate) {
      vo.config_path = opt_path(v_config);
      return cmd_validate_config(vo, out);
    }
    if (*candidates) return cmd_candidates(vo, c_validate, out);
    if (*recheck) return cmd_recheck(r_ledger, opt_path(r_config), json, out);
    if (*reconstruct) return cmd_reconstruct(a_ledger, a_limit, out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const EnvironmentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEnvironment;
  } catch (const PipelineRefusal& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const UnvalidatedConfig& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEnvironment;
  }
  return kExitUsage;
}
