#pragma once

// Hecke cosets for a degree-one prime of L, fixed-point systems of matrices
// with prime determinant, the mod-ell prescreen, the matrix-first search
// (mode B), certificates and their verification, and a lattice-based
// point-first reconstruction (mode A).

#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hecke/cm_field.hpp"
#include "hecke/complex.hpp"
#include "hecke/field.hpp"
#include "hecke/triangle.hpp"

namespace hecke {

struct HeckeMatrix {
  IntegralMatrix entries;
  IntegralElement det;

  HeckeMatrix() : entries(IntegralMatrix::identity()), det(1L) {}
  explicit HeckeMatrix(IntegralMatrix m) : entries(std::move(m)), det(entries.det()) {}

  [[nodiscard]] IntegralElement trace() const { return entries.trace(); }
  [[nodiscard]] bool consistent() const { return entries.det() == det; }
  [[nodiscard]] std::string to_string() const;
  friend bool operator==(const HeckeMatrix& x, const HeckeMatrix& y) { return x.entries == y.entries; }
};

// The default prime over ell: the smallest root r of m mod ell and a
// generator of (ell, t - r), replaced by a totally positive associate when
// one exists. Throws std::invalid_argument if ell is not prime or does not
// split completely, std::runtime_error if no generator is found.
PrimeIdealData default_prime_ideal(long ell);

// x / y when it lies in Z[t].
std::optional<IntegralElement> divide_exact(const IntegralElement& x, const IntegralElement& y);

struct CosetRep {
  std::optional<long> label;  // nullopt is the label infinity
  HeckeMatrix matrix;

  [[nodiscard]] bool infinite() const { return !label.has_value(); }
  [[nodiscard]] std::string label_string() const;
};

// ((pi, j), (0, 1)) for j = 0..ell-1 and ((0, -1), (pi, 0)). They represent
// the classes of det-pi matrices modulo right multiplication by SL2(O_L).
std::vector<CosetRep> enumerate_cosets(const PrimeIdealData& p);
// The rep gamma with gamma^-1 alpha in SL2(O_L), read off from residues.
// Throws std::invalid_argument unless det alpha is an associate of pi.
std::optional<long> coset_label(const HeckeMatrix& alpha, const PrimeIdealData& p);
std::string coset_label_string(const std::optional<long>& label);
// gamma^-1 alpha integral with determinant 1, checked exactly.
bool in_coset(const HeckeMatrix& alpha, const CosetRep& rep);
// Two reps are equivalent iff they share a residue label.
bool cosets_equivalent(const CosetRep& x, const CosetRep& y, const PrimeIdealData& p);

struct FixedPointSystem {
  HeckeMatrix source;
  // Embeddings of (c, d - a, -b) per k-order index.
  std::array<std::array<EmbeddingValue, 3>, kDegree> coefficients;
  // Embeddings of tr^2 - 4 det.
  std::array<Ball, kDegree> discriminants;
  std::array<bool, kDegree> elliptic{};
  bool linear = false;  // c = 0 exactly
};

FixedPointSystem build_fixed_point_system(const HeckeMatrix& m, Precision prec);
// Flag k iff sigma_k(tr)^2 < 4 sigma_k(det), decided exactly.
std::array<bool, kDegree> ellipticity_filter(const HeckeMatrix& m);
bool totally_elliptic(const HeckeMatrix& m);

struct FixedTuple {
  bool ok = false;
  std::string rejection;
  std::array<Complex, kDegree> w;
};
// w_k = the fixed point of sigma_k(m) in H, in k-order. A non-elliptic
// embedding or c = 0 gives a structured rejection.
FixedTuple fixed_tuple(const HeckeMatrix& m, Precision prec);

struct PrescreenDetail {
  bool pass = true;
  std::vector<long> roots;     // the residue roots of m mod ell
  std::vector<long> residues;  // tr^2 - 4 det at each root
  std::vector<int> legendre;   // 0, 1 or -1
};
// Passes iff tr^2 - 4 det is 0 or a quadratic residue at every root of m
// mod ell. Sound for fixed points in L(sqrt(-d)) whenever -d is a square
// mod ell, which holds for ell = 1 mod 42 and d in {3, 7}.
bool prescreen_mod_ell(const HeckeMatrix& m, const PrimeIdealData& p);
PrescreenDetail prescreen_detail(const HeckeMatrix& m, const PrimeIdealData& p);
int legendre_symbol(long a, long ell);

struct SweepAccounting {
  long cosets = 0;
  long branch_choices = 64;      // 2^6 root choices per coset system
  long formal_systems = 0;       // cosets * branch_choices
  long linear_systems = 0;       // canonical reps with c = 0
  long elliptic_embeddings = 0;  // summed over the canonical reps
  long solvable_systems = 0;     // branch choices with a root in H at every k
  long prescreen_pass = 0;
};
// Accounting over the canonical coset representatives.
SweepAccounting sweep_accounting(const PrimeIdealData& p);

struct AlphaEnumeration {
  std::vector<HeckeMatrix> matrices;
  long box_size = 0;
  long trace_count = 0;
  // Set when the generator is not totally positive: no matrix can then be
  // elliptic at every embedding with a fixed point in H^6.
  std::optional<std::string> caveat;
};

// All alpha over Z[t] with det alpha = pi, every entry satisfying
// |sigma_k(x)| <= height for all k, elliptic at all six embeddings, one of
// each pair {alpha, -alpha} (the one whose c has positive leading
// coefficient). The order is deterministic.
AlphaEnumeration enumerate_alpha(const PrimeIdealData& p, double height);

struct SearchConfig {
  long ell = 43;
  long d = 3;
  double height = 2.5;
  Precision precision = kDefaultPrecision;
  double tolerance = 1e-20;
  std::string config_id = "k1-only";
  long resume_cursor = 0;
  unsigned workers = 1;
  long batch_size = 64;
  long max_alphas = -1;  // negative means no limit
};

// Throws std::invalid_argument for malformed values and PipelineRefusal
// when ell does not split completely in L(sqrt(-d)).
void check_search_config(const SearchConfig& cfg);

class PipelineRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ComponentResidual {
  int k = 1;
  Real residual;
};

struct CandidateCertificate {
  long ell = 0;
  long root = 0;
  long index = 0;  // position in the alpha enumeration
  std::string coset_label;
  HeckeMatrix alpha;
  Precision precision = kDefaultPrecision;
  std::array<Complex, kDegree> fixed_tuple;
  Complex z0;          // = w_1
  Complex z0_reduced;  // representative in the fundamental triangle
  bool word_even = true;
  bool dedup_ambiguous = false;
  IntegralElement trace;
  long d = 3;
  // a = c/2 and b with a^2 + d b^2 = det alpha, when b exists in L.
  std::optional<FieldElement> witness_a;
  std::optional<FieldElement> witness_b;
  // The constraint c^2 - 4 ell = -4 d b^2 with the rational prime ell.
  bool rational_trace_constraint = false;
  std::optional<SignVector> sign_vector;
  bool weil_ok = false;
  std::string cm_class = "none";
  std::vector<ComponentResidual> residuals;  // matched components, k >= 2
  std::string config_id;
  std::string status = "unverified";

  [[nodiscard]] std::string dedup_key() const;
};

// Same exact data and bit-identical floats (including precisions).
bool same_certificate(const CandidateCertificate& x, const CandidateCertificate& y);

// Throws std::logic_error for weil_ok with a rational b.
void check_weil_guard(const CandidateCertificate& cert);

// Fills the exact trace, witness, sign vector, Weil and CM-type fields.
void assemble_arithmetic(CandidateCertificate& cert);

struct SearchCounters {
  long enumerated = 0;
  long prescreen_pass = 0;
  long prescreen_fail = 0;
  long rejected = 0;  // fixed tuple or reduction failed
  long matches = 0;
  long duplicates = 0;
  long certificates = 0;
  long witnesses = 0;
  long weil_ok = 0;

  SearchCounters& operator+=(const SearchCounters& o);
  friend bool operator==(const SearchCounters&, const SearchCounters&) = default;
};

struct SearchBatch {
  long begin = 0;
  long end = 0;  // cursor after this batch
  std::vector<CandidateCertificate> certificates;  // after dedup
  SearchCounters counters;                         // running totals
};

struct SearchState {
  long cursor = 0;
  SearchCounters counters;
  std::set<std::string> seen_keys;
};

struct SearchResult {
  long total = 0;  // size of the alpha enumeration
  SearchState state;
  std::optional<std::string> caveat;
  bool completed = false;
};

// Runs mode B from state.cursor. Batches are evaluated by cfg.workers
// threads and handed to on_batch in enumeration order; a false return
// stops the run after that batch.
SearchResult search_mode_b(const SearchConfig& cfg, const PrimeIdealData& p, const ComponentMaps& maps,
                           SearchState state, const std::function<bool(const SearchBatch&)>& on_batch);

// Evaluates one alpha. Nullopt when it is skipped; counters record why.
std::optional<CandidateCertificate> evaluate_alpha(const HeckeMatrix& alpha, long index, const SearchConfig& cfg,
                                                   const PrimeIdealData& p, const ComponentMaps& maps,
                                                   SearchCounters& counters);

struct VerificationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerificationReport {
  bool verified = false;
  std::string failing_check;  // first failing check, empty when verified
  std::vector<VerificationCheck> checks;
};

// Recomputes every exact quantity and every numerical one at `precision`
// (normally twice the certificate precision). maps must provide the
// certificate's matched components; it may be null for certificates
// without any.
VerificationReport verify_certificate(const CandidateCertificate& cert, const PrimeIdealData& p,
                                      const ComponentMaps* maps, Precision precision, double tolerance);

// Mode A: the integral relation lattice of a fixed tuple. Basis vectors are
// matrices x over Z[t] with sigma_k(x) fixing w_k for all k, LLL reduced.
struct ReconstructionResult {
  std::vector<IntegralMatrix> basis;
  // Every non-scalar lattice element with det equal to the target, found by
  // enumerating the positive definite form Tr det.
  std::vector<HeckeMatrix> matches;
};
ReconstructionResult reconstruct_alpha(const std::array<Complex, kDegree>& w, const IntegralElement& det_target);

// LLL with delta = 0.99 on integer row vectors.
std::vector<std::vector<mpz_class>> lll_reduce(std::vector<std::vector<mpz_class>> basis, double delta = 0.99);

}  // namespace hecke
