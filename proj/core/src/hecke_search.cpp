#include "hecke/hecke_search.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "hecke/cm_types.hpp"

namespace hecke {

namespace {

__extension__ typedef __int128 i128;
using Small = std::array<std::int64_t, kDegree>;

struct SmallHash {
  size_t operator()(const Small& x) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto v : x) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ULL;
    }
    return static_cast<size_t>(h);
  }
};

Small to_small(const IntegralElement& x) {
  Small s{};
  for (int i = 0; i < kDegree; ++i) {
    if (!x[i].fits_slong_p()) throw std::overflow_error("coefficient exceeds 64 bits");
    s[i] = x[i].get_si();
  }
  return s;
}

IntegralElement from_small(const Small& s) {
  IntegralElement x;
  for (int i = 0; i < kDegree; ++i) x[i] = static_cast<long>(s[i]);
  return x;
}

const std::array<std::int64_t, kDegree + 1>& small_m() {
  static const auto m = [] {
    std::array<std::int64_t, kDegree + 1> out{};
    for (int i = 0; i <= kDegree; ++i) out[i] = minimal_polynomial().coeffs[i].get_si();
    return out;
  }();
  return m;
}

constexpr i128 kSmallLimit = static_cast<i128>(1) << 62;

Small small_mul(const Small& a, const Small& b) {
  const auto& m = small_m();
  std::array<i128, 2 * kDegree - 1> p{};
  for (int i = 0; i < kDegree; ++i) {
    if (a[i] == 0) continue;
    for (int j = 0; j < kDegree; ++j) p[i + j] += static_cast<i128>(a[i]) * b[j];
  }
  for (int i = 2 * kDegree - 2; i >= kDegree; --i) {
    const i128 c = p[i];
    if (c == 0) continue;
    for (int j = 0; j < kDegree; ++j) p[i - kDegree + j] -= c * m[j];
  }
  Small out{};
  for (int i = 0; i < kDegree; ++i) {
    if (p[i] >= kSmallLimit || p[i] <= -kSmallLimit) throw std::overflow_error("small product overflow");
    out[i] = static_cast<std::int64_t>(p[i]);
  }
  return out;
}

Small small_sub(const Small& a, const Small& b) {
  Small out{};
  for (int i = 0; i < kDegree; ++i) out[i] = a[i] - b[i];
  return out;
}

bool small_zero(const Small& a) {
  return std::all_of(a.begin(), a.end(), [](std::int64_t v) { return v == 0; });
}

bool leading_positive(const IntegralElement& x) {
  for (int i = kDegree - 1; i >= 0; --i)
    if (x[i] != 0) return x[i] > 0;
  return false;
}

long mod_pow(long base, long e, long mod) {
  i128 r = 1, b = ((base % mod) + mod) % mod;
  while (e > 0) {
    if (e & 1) r = r * b % mod;
    b = b * b % mod;
    e >>= 1;
  }
  return static_cast<long>(r);
}

long mod_inverse(long a, long ell) { return mod_pow(a, ell - 2, ell); }

const std::vector<long>& cached_roots(long ell) {
  static std::mutex mu;
  static std::map<long, std::vector<long>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(ell);
  if (it == cache.end()) it = cache.emplace(ell, roots_mod_ell(ell)).first;
  return it->second;
}

double max_embedding(const IntegralElement& x) {
  double m = 0;
  for (int k : kLabels) m = std::max(m, std::abs(embed_double(x, k)));
  return m;
}

std::string hex_quantized(const Real& x, long bits) {
  const Real scaled = ldexp(x, bits);
  return scaled.round_to_integer().get_str(16);
}

}  // namespace

std::string HeckeMatrix::to_string() const {
  return "[[" + entries.a.to_string() + ", " + entries.b.to_string() + "], [" + entries.c.to_string() + ", " +
         entries.d.to_string() + "]]";
}

std::optional<IntegralElement> divide_exact(const IntegralElement& x, const IntegralElement& y) {
  if (y.is_zero()) throw std::domain_error("division by zero");
  const mpz_class n = norm(y);
  const auto adj = to_integral(mpq_class(n) * invert(to_field(y)));
  if (!adj) throw std::logic_error("adjugate of an integral element is not integral");
  IntegralElement q = x * *adj;
  for (int i = 0; i < kDegree; ++i) {
    if (!mpz_divisible_p(q[i].get_mpz_t(), n.get_mpz_t())) return std::nullopt;
    q[i] /= n;
  }
  return q;
}

namespace {

PrimeIdealData compute_default_prime_ideal(long ell, const std::vector<long>& roots) {
  const long root = roots.front();
  std::optional<IntegralElement> best;
  std::optional<IntegralElement> best_positive;
  double best_size = 0, best_positive_size = 0;
  for (double h : {2.0, 3.0, 4.0, 6.0}) {
    for (const auto& x : enumerate_box(mpq_class(h) * mpq_class(h))) {
      const mpz_class n = norm(x);
      if (n != ell && n != -ell) continue;
      if (residue_mod_prime(x, ell, root) != 0) continue;
      const double size = max_embedding(x);
      if (!best || size < best_size) {
        best = x;
        best_size = size;
      }
      if (is_totally_positive(to_field(x)) && (!best_positive || size < best_positive_size)) {
        best_positive = x;
        best_positive_size = size;
      }
    }
    if (best_positive) return make_prime_ideal(ell, root, *best_positive);
    if (best) break;
  }
  if (!best) throw std::runtime_error("no generator of the prime over " + std::to_string(ell) + " found");
  if (const auto tp = find_totally_positive_associate(*best, 8.0)) return make_prime_ideal(ell, root, tp->element);
  return make_prime_ideal(ell, root, *best);
}

}  // namespace

PrimeIdealData default_prime_ideal(long ell) {
  if (!is_prime(ell)) throw std::invalid_argument(std::to_string(ell) + " is not prime");
  const auto roots = roots_mod_ell(ell);
  if (roots.size() != static_cast<size_t>(kDegree))
    throw std::invalid_argument(std::to_string(ell) + " does not split completely in L");
  static std::mutex mu;
  static std::map<long, PrimeIdealData> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(ell); it != cache.end()) return it->second;
  }
  PrimeIdealData p = compute_default_prime_ideal(ell, roots);
  std::lock_guard lock(mu);
  return cache.emplace(ell, std::move(p)).first->second;
}

std::string CosetRep::label_string() const { return coset_label_string(label); }

std::string coset_label_string(const std::optional<long>& label) {
  return label ? std::to_string(*label) : std::string("inf");
}

std::vector<CosetRep> enumerate_cosets(const PrimeIdealData& p) {
  std::vector<CosetRep> reps;
  reps.reserve(static_cast<size_t>(p.ell) + 1);
  const IntegralElement& pi = p.generator;
  for (long j = 0; j < p.ell; ++j)
    reps.push_back({j, HeckeMatrix({pi, IntegralElement(j), IntegralElement(0L), IntegralElement(1L)})});
  reps.push_back({std::nullopt, HeckeMatrix({IntegralElement(0L), IntegralElement(-1L), pi, IntegralElement(0L)})});
  return reps;
}

std::optional<long> coset_label(const HeckeMatrix& alpha, const PrimeIdealData& p) {
  const auto u = divide_exact(alpha.det, p.generator);
  if (!u || abs(norm(*u)) != 1) throw std::invalid_argument("det is not an associate of the prime generator");
  const long ra = residue_mod_prime(alpha.entries.a, p);
  const long rb = residue_mod_prime(alpha.entries.b, p);
  const long rc = residue_mod_prime(alpha.entries.c, p);
  const long rd = residue_mod_prime(alpha.entries.d, p);
  if (rc != 0) return static_cast<long>(static_cast<i128>(ra) * mod_inverse(rc, p.ell) % p.ell);
  if (rd != 0) return static_cast<long>(static_cast<i128>(rb) * mod_inverse(rd, p.ell) % p.ell);
  return std::nullopt;
}

bool in_coset(const HeckeMatrix& alpha, const CosetRep& rep) {
  const IntegralElement& det = rep.matrix.det;
  const IntegralMatrix prod = rep.matrix.entries.adjugate() * alpha.entries;
  const auto a = divide_exact(prod.a, det), b = divide_exact(prod.b, det);
  const auto c = divide_exact(prod.c, det), d = divide_exact(prod.d, det);
  if (!a || !b || !c || !d) return false;
  return (*a * *d - *b * *c) == IntegralElement(1L);
}

bool cosets_equivalent(const CosetRep& x, const CosetRep& y, const PrimeIdealData& p) {
  return coset_label(x.matrix, p) == coset_label(y.matrix, p);
}

std::array<bool, kDegree> ellipticity_filter(const HeckeMatrix& m) {
  const IntegralElement tr = m.trace();
  const FieldElement disc = to_field(tr * tr - IntegralElement(4L) * m.det);
  std::array<bool, kDegree> out{};
  for (int i = 0; i < kDegree; ++i) out[i] = certified_sign(disc, kLabels[i]) < 0;
  return out;
}

bool totally_elliptic(const HeckeMatrix& m) {
  const auto f = ellipticity_filter(m);
  return std::all_of(f.begin(), f.end(), [](bool b) { return b; });
}

FixedPointSystem build_fixed_point_system(const HeckeMatrix& m, Precision prec) {
  FixedPointSystem sys;
  sys.source = m;
  const auto& e = m.entries;
  const FieldElement c = to_field(e.c), dma = to_field(e.d - e.a), mb = to_field(-e.b);
  const IntegralElement tr = m.trace();
  const IntegralElement disc = tr * tr - IntegralElement(4L) * m.det;
  for (int i = 0; i < kDegree; ++i) {
    const int k = kLabels[i];
    sys.coefficients[i] = {embed(c, k, prec), embed(dma, k, prec), embed(mb, k, prec)};
    sys.discriminants[i] = embed_ball(disc, k, prec);
  }
  sys.elliptic = ellipticity_filter(m);
  sys.linear = e.c.is_zero();
  return sys;
}

FixedTuple fixed_tuple(const HeckeMatrix& m, Precision prec) {
  FixedTuple out;
  for (auto& w : out.w) w = Complex(prec);
  if (m.entries.c.is_zero()) {
    out.rejection = "linear: c = 0";
    return out;
  }
  const auto ell = ellipticity_filter(m);
  for (int i = 0; i < kDegree; ++i) {
    if (!ell[i]) {
      out.rejection = "not elliptic at k=" + std::to_string(kLabels[i]);
      return out;
    }
  }
  for (int i = 0; i < kDegree; ++i) out.w[i] = elliptic_fixed_point(m.entries, kLabels[i], prec);
  out.ok = true;
  return out;
}

int legendre_symbol(long a, long ell) {
  a %= ell;
  if (a < 0) a += ell;
  if (a == 0) return 0;
  return mod_pow(a, (ell - 1) / 2, ell) == 1 ? 1 : -1;
}

PrescreenDetail prescreen_detail(const HeckeMatrix& m, const PrimeIdealData& p) {
  PrescreenDetail out;
  out.roots = cached_roots(p.ell);
  const IntegralElement tr = m.trace();
  const IntegralElement disc = tr * tr - IntegralElement(4L) * m.det;
  for (long r : out.roots) {
    const long res = residue_mod_prime(disc, p.ell, r);
    const int ls = legendre_symbol(res, p.ell);
    out.residues.push_back(res);
    out.legendre.push_back(ls);
    if (ls < 0) out.pass = false;
  }
  return out;
}

bool prescreen_mod_ell(const HeckeMatrix& m, const PrimeIdealData& p) { return prescreen_detail(m, p).pass; }

SweepAccounting sweep_accounting(const PrimeIdealData& p) {
  SweepAccounting acc;
  const auto reps = enumerate_cosets(p);
  acc.cosets = static_cast<long>(reps.size());
  acc.formal_systems = acc.cosets * acc.branch_choices;
  for (const auto& rep : reps) {
    const auto f = ellipticity_filter(rep.matrix);
    const long n = std::count(f.begin(), f.end(), true);
    acc.elliptic_embeddings += n;
    if (rep.matrix.entries.c.is_zero()) ++acc.linear_systems;
    else if (n == kDegree) ++acc.solvable_systems;  // exactly one root in H per embedding
    if (prescreen_mod_ell(rep.matrix, p)) ++acc.prescreen_pass;
  }
  return acc;
}

AlphaEnumeration enumerate_alpha(const PrimeIdealData& p, double height) {
  AlphaEnumeration out;
  if (!(height > 0)) return out;
  const FieldElement fpi = to_field(p.generator);
  if (!is_totally_positive(fpi)) {
    out.caveat = "generator is not totally positive; no alpha with det pi is elliptic at every embedding";
    return out;
  }
  const mpq_class h(height);
  const auto box = enumerate_box(h * h);
  out.box_size = static_cast<long>(box.size());

  std::array<mpq_class, kDegree> tb;
  for (int i = 0; i < kDegree; ++i) tb[i] = mpq_class(4.0 * embed_double(p.generator, kLabels[i]) + 1e-9);
  std::vector<Small> traces;
  for (const auto& s : enumerate_box(tb)) {
    if (is_totally_positive(to_field(IntegralElement(4L) * p.generator - s * s))) traces.push_back(to_small(s));
  }
  out.trace_count = static_cast<long>(traces.size());

  std::vector<Small> small_box;
  std::unordered_set<Small, SmallHash> members;
  for (const auto& x : box) {
    small_box.push_back(to_small(x));
    members.insert(small_box.back());
  }
  const Small pi = to_small(p.generator);

  for (size_t ci = 0; ci < box.size(); ++ci) {
    const IntegralElement& c = box[ci];
    if (c.is_zero() || !leading_positive(c)) continue;
    const mpz_class nc_big = norm(c);
    if (!nc_big.fits_slong_p()) continue;
    const std::int64_t nc = nc_big.get_si();
    const auto adj_opt = to_integral(mpq_class(nc_big) * invert(to_field(c)));
    const Small adj = to_small(*adj_opt);
    for (const Small& a : small_box) {
      for (const Small& s : traces) {
        const Small d = small_sub(s, a);
        if (!members.count(d)) continue;
        const Small num = small_mul(small_sub(small_mul(a, d), pi), adj);
        bool divisible = true;
        Small b{};
        for (int i = 0; i < kDegree && divisible; ++i) {
          if (num[i] % nc != 0) divisible = false;
          else b[i] = num[i] / nc;
        }
        if (!divisible || !members.count(b)) continue;
        HeckeMatrix alpha({from_small(a), from_small(b), c, from_small(d)});
        if (alpha.det != p.generator) throw std::logic_error("enumerate_alpha produced a wrong determinant");
        out.matrices.push_back(std::move(alpha));
      }
    }
  }
  return out;
}

void check_search_config(const SearchConfig& cfg) {
  if (!is_prime(cfg.ell)) throw std::invalid_argument("--prime " + std::to_string(cfg.ell) + " is not prime");
  if (cfg.d != 3 && cfg.d != 7) throw std::invalid_argument("d must be 3 or 7");
  if (!(cfg.height > 0)) throw std::invalid_argument("height bound must be positive");
  if (cfg.precision < 64) throw std::invalid_argument("precision must be at least 64 bits");
  if (!(cfg.tolerance > 0)) throw std::invalid_argument("tolerance must be positive");
  if (cfg.workers < 1 || cfg.batch_size < 1) throw std::invalid_argument("workers and batch size must be positive");
  if (cfg.ell % 42 != 1)
    throw PipelineRefusal(std::to_string(cfg.ell) +
                          " is not 1 mod 42, so it does not split completely in L(sqrt(-d)); "
                          "the default pipeline refuses it");
}

std::string CandidateCertificate::dedup_key() const {
  const long bits = static_cast<long>(precision) / 2;
  std::string key = hex_quantized(z0_reduced.re, bits) + "," + hex_quantized(z0_reduced.im, bits);
  // On an edge the parity of the reduction word is not well defined.
  key += dedup_ambiguous ? "|a|" : (word_even ? "|e|" : "|o|");
  for (int i = 0; i < kDegree; ++i) key += trace[i].get_str() + (i + 1 < kDegree ? "," : "");
  return key;
}

namespace {

bool same_real(const Real& x, const Real& y) { return to_hex_string(x) == to_hex_string(y); }
bool same_complex(const Complex& x, const Complex& y) { return same_real(x.re, y.re) && same_real(x.im, y.im); }

}  // namespace

bool same_certificate(const CandidateCertificate& x, const CandidateCertificate& y) {
  if (x.ell != y.ell || x.root != y.root || x.index != y.index || x.coset_label != y.coset_label) return false;
  if (!(x.alpha == y.alpha) || !(x.alpha.det == y.alpha.det) || x.precision != y.precision) return false;
  for (int i = 0; i < kDegree; ++i)
    if (!same_complex(x.fixed_tuple[i], y.fixed_tuple[i])) return false;
  if (!same_complex(x.z0, y.z0) || !same_complex(x.z0_reduced, y.z0_reduced)) return false;
  if (x.word_even != y.word_even || x.dedup_ambiguous != y.dedup_ambiguous) return false;
  if (!(x.trace == y.trace) || x.d != y.d || x.witness_a != y.witness_a || x.witness_b != y.witness_b) return false;
  if (x.rational_trace_constraint != y.rational_trace_constraint || x.sign_vector != y.sign_vector) return false;
  if (x.weil_ok != y.weil_ok || x.cm_class != y.cm_class || x.config_id != y.config_id || x.status != y.status)
    return false;
  if (x.residuals.size() != y.residuals.size()) return false;
  for (size_t i = 0; i < x.residuals.size(); ++i) {
    if (x.residuals[i].k != y.residuals[i].k || !same_real(x.residuals[i].residual, y.residuals[i].residual))
      return false;
  }
  return true;
}

void check_weil_guard(const CandidateCertificate& cert) {
  if (cert.weil_ok && cert.witness_b && cert.witness_b->is_rational())
    throw std::logic_error("weil_ok with a rational b contradicts the constant sign of a rational");
}

namespace {

struct Arithmetic {
  IntegralElement trace;
  std::optional<FieldElement> a, b;
  bool rational_constraint = false;
  std::optional<SignVector> sv;
  bool weil_ok = false;
  std::string cm_class = "none";
};

Arithmetic compute_arithmetic(const HeckeMatrix& alpha, long ell, long d) {
  Arithmetic out;
  out.trace = alpha.trace();
  const FieldElement c = to_field(out.trace);
  const FieldElement disc = c * c - FieldElement(4L) * to_field(alpha.det);
  out.b = field_sqrt(mpq_class(-1, 4 * d) * disc);
  if (out.b) out.a = mpq_class(1, 2) * c;
  out.rational_constraint = trace_constraint_check(c, ell, d).has_value();
  if (out.b && !out.b->is_zero()) {
    out.sv = sign_vector(*out.b);
    out.weil_ok = weil_signature_check(*out.sv);
    out.cm_class = out.weil_ok ? "weil:" + weil_class(SignAssignment{out.sv->plus_mask()}) : "non-weil";
  }
  return out;
}

}  // namespace

void assemble_arithmetic(CandidateCertificate& cert) {
  const Arithmetic ar = compute_arithmetic(cert.alpha, cert.ell, cert.d);
  cert.trace = ar.trace;
  cert.witness_a = ar.a;
  cert.witness_b = ar.b;
  cert.rational_trace_constraint = ar.rational_constraint;
  cert.sign_vector = ar.sv;
  cert.weil_ok = ar.weil_ok;
  cert.cm_class = ar.cm_class;
  check_weil_guard(cert);
}

SearchCounters& SearchCounters::operator+=(const SearchCounters& o) {
  enumerated += o.enumerated;
  prescreen_pass += o.prescreen_pass;
  prescreen_fail += o.prescreen_fail;
  rejected += o.rejected;
  matches += o.matches;
  duplicates += o.duplicates;
  certificates += o.certificates;
  witnesses += o.witnesses;
  weil_ok += o.weil_ok;
  return *this;
}

std::optional<CandidateCertificate> evaluate_alpha(const HeckeMatrix& alpha, long index, const SearchConfig& cfg,
                                                   const PrimeIdealData& p, const ComponentMaps& maps,
                                                   SearchCounters& counters) {
  ++counters.enumerated;
  if (!prescreen_mod_ell(alpha, p)) {
    ++counters.prescreen_fail;
    return std::nullopt;
  }
  ++counters.prescreen_pass;
  const FixedTuple ft = fixed_tuple(alpha, cfg.precision);
  if (!ft.ok) {
    ++counters.rejected;
    return std::nullopt;
  }
  CandidateCertificate cert;
  cert.ell = p.ell;
  cert.root = p.root;
  cert.index = index;
  cert.coset_label = coset_label_string(coset_label(alpha, p));
  cert.alpha = alpha;
  cert.precision = cfg.precision;
  cert.fixed_tuple = ft.w;
  cert.z0 = ft.w[0];
  cert.d = cfg.d;
  cert.config_id = maps.config().id;
  try {
    const SchwarzTriangle& t1 = maps.triangle(1);
    const Reduction red = reduce_to_fundamental(t1, cert.z0);
    cert.z0_reduced = red.z0.with_precision(cfg.precision);
    cert.word_even = red.word.orientation_preserving();
    const Real near = ldexp(Real(1L, 64), -static_cast<long>(cfg.precision) / 4);
    for (int e = 0; e < 3; ++e)
      if (abs(t1.edge_excess(e, red.z0)) < near) cert.dedup_ambiguous = true;
    for (int k : maps.components()) {
      if (k == 1) continue;
      const int i = label_index(k);
      Real r = abs(maps(k, cert.z0) - ft.w[i]);
      const bool ok = r.to_double() < cfg.tolerance;
      cert.residuals.push_back({k, r.with_precision(64)});
      if (!ok) return std::nullopt;
    }
  } catch (const std::runtime_error&) {
    ++counters.rejected;
    return std::nullopt;
  } catch (const std::domain_error&) {
    ++counters.rejected;
    return std::nullopt;
  }
  ++counters.matches;
  assemble_arithmetic(cert);
  if (cert.witness_b) ++counters.witnesses;
  if (cert.weil_ok) ++counters.weil_ok;
  return cert;
}

SearchResult search_mode_b(const SearchConfig& cfg, const PrimeIdealData& p, const ComponentMaps& maps,
                           SearchState state, const std::function<bool(const SearchBatch&)>& on_batch) {
  check_search_config(cfg);
  if (p.ell != cfg.ell) throw std::invalid_argument("prime ideal does not lie over the configured prime");
  const AlphaEnumeration alphas = enumerate_alpha(p, cfg.height);
  SearchResult result;
  result.caveat = alphas.caveat;
  long total = static_cast<long>(alphas.matrices.size());
  if (cfg.max_alphas >= 0) total = std::min(total, cfg.max_alphas);
  result.total = total;

  struct Slot {
    long begin = 0, end = 0;
    std::vector<CandidateCertificate> found;
    SearchCounters counters;
  };

  while (state.cursor < total) {
    std::vector<Slot> slots;
    for (unsigned w = 0; w < cfg.workers && state.cursor + static_cast<long>(w) * cfg.batch_size < total; ++w) {
      Slot s;
      s.begin = state.cursor + static_cast<long>(w) * cfg.batch_size;
      s.end = std::min(total, s.begin + cfg.batch_size);
      slots.push_back(std::move(s));
    }
    auto run = [&](Slot& s) {
      for (long i = s.begin; i < s.end; ++i) {
        auto cert = evaluate_alpha(alphas.matrices[static_cast<size_t>(i)], i, cfg, p, maps, s.counters);
        if (cert) s.found.push_back(std::move(*cert));
      }
    };
    if (slots.size() == 1) {
      run(slots[0]);
    } else {
      std::vector<std::thread> threads;
      for (auto& s : slots) threads.emplace_back(run, std::ref(s));
      for (auto& t : threads) t.join();
    }
    for (auto& s : slots) {
      SearchBatch batch;
      batch.begin = s.begin;
      batch.end = s.end;
      for (auto& cert : s.found) {
        if (!state.seen_keys.insert(cert.dedup_key()).second) {
          ++s.counters.duplicates;
          continue;
        }
        ++s.counters.certificates;
        batch.certificates.push_back(std::move(cert));
      }
      state.counters += s.counters;
      state.cursor = s.end;
      batch.counters = state.counters;
      if (!on_batch(batch)) {
        result.state = std::move(state);
        return result;
      }
    }
  }
  result.state = std::move(state);
  result.completed = true;
  return result;
}

VerificationReport verify_certificate(const CandidateCertificate& cert, const PrimeIdealData& p,
                                      const ComponentMaps* maps, Precision precision, double tolerance) {
  VerificationReport rep;
  auto add = [&](const std::string& name, bool ok, std::string detail = {}) {
    rep.checks.push_back({name, ok, std::move(detail)});
  };
  const HeckeMatrix& alpha = cert.alpha;

  add("prime", cert.ell == p.ell && cert.root == p.root);
  add("determinant", alpha.consistent() && alpha.det == p.generator, "det = " + alpha.det.to_string());

  bool label_ok = false;
  try {
    const auto label = coset_label(alpha, p);
    const auto reps = enumerate_cosets(p);
    const CosetRep& rep_j = label ? reps[static_cast<size_t>(*label)] : reps.back();
    label_ok = coset_label_string(label) == cert.coset_label && in_coset(alpha, rep_j);
  } catch (const std::invalid_argument&) {
    label_ok = false;
  }
  add("coset label", label_ok, cert.coset_label);

  const bool elliptic = totally_elliptic(alpha);
  add("ellipticity", elliptic);

  bool tuple_ok = false;
  std::string tuple_detail;
  if (elliptic) {
    const FixedTuple ft = fixed_tuple(alpha, precision);
    tuple_ok = ft.ok;
    const Real scale = ldexp(Real(1L, 64), 24 - static_cast<long>(cert.precision));
    for (int i = 0; i < kDegree && tuple_ok; ++i) {
      const Real err = abs(cert.fixed_tuple[i] - ft.w[i]);
      if (err > scale * (abs(ft.w[i]) + 1L)) {
        tuple_ok = false;
        tuple_detail = "k=" + std::to_string(kLabels[i]) + " off by " + err.to_string(6);
      }
    }
  }
  add("fixed tuple", tuple_ok, tuple_detail);
  add("z0", same_complex(cert.z0.with_precision(cert.precision), cert.fixed_tuple[0].with_precision(cert.precision)));

  if (maps) {
    bool red_ok = false;
    try {
      const Reduction red = reduce_to_fundamental(maps->triangle(1), cert.z0);
      const Real scale = ldexp(Real(1L, 64), 32 - static_cast<long>(cert.precision));
      red_ok = abs(red.z0 - cert.z0_reduced) < scale * (abs(red.z0) + 1L) &&
               (cert.dedup_ambiguous || red.word.orientation_preserving() == cert.word_even);
    } catch (const std::exception&) {
      red_ok = false;
    }
    add("reduction", red_ok);
  }

  bool match_ok = true;
  std::string match_detail;
  for (const auto& r : cert.residuals) {
    if (!(r.residual.to_double() < tolerance)) {
      match_ok = false;
      match_detail = "recorded residual at k=" + std::to_string(r.k);
      break;
    }
    if (!maps || !maps->has(r.k)) {
      match_ok = false;
      match_detail = "no component map for k=" + std::to_string(r.k);
      break;
    }
    try {
      const Real again = abs((*maps)(r.k, cert.z0) - cert.fixed_tuple[static_cast<size_t>(label_index(r.k))]);
      if (!(again.to_double() < tolerance)) {
        match_ok = false;
        match_detail = "k=" + std::to_string(r.k) + " residual " + again.to_string(6);
        break;
      }
    } catch (const std::exception& e) {
      match_ok = false;
      match_detail = e.what();
      break;
    }
  }
  add("component match", match_ok, match_detail);

  add("trace", cert.trace == alpha.trace());

  const Arithmetic ar = compute_arithmetic(alpha, cert.ell, cert.d);
  bool constraint_ok = ar.b.has_value() == cert.witness_b.has_value() &&
                       ar.rational_constraint == cert.rational_trace_constraint;
  if (constraint_ok && cert.witness_b) {
    const FieldElement c = to_field(cert.trace);
    const FieldElement lhs = c * c - FieldElement(4L) * to_field(alpha.det);
    const FieldElement rhs = mpq_class(-4 * cert.d) * (*cert.witness_b * *cert.witness_b);
    constraint_ok = lhs == rhs;
  }
  add("trace constraint", constraint_ok);

  bool witness_ok = cert.witness_a.has_value() == cert.witness_b.has_value();
  if (witness_ok && cert.witness_b) {
    witness_ok = *cert.witness_a == mpq_class(1, 2) * to_field(cert.trace) &&
                 (*cert.witness_a * *cert.witness_a + FieldElement(cert.d) * (*cert.witness_b * *cert.witness_b)) ==
                     to_field(alpha.det);
  }
  add("norm witness", witness_ok);

  bool sign_ok = cert.sign_vector.has_value() == cert.witness_b.has_value();
  if (sign_ok && cert.witness_b) sign_ok = sign_vector(*cert.witness_b) == *cert.sign_vector;
  add("sign vector", sign_ok);

  bool weil_ok = sign_ok && cert.weil_ok == (cert.sign_vector && weil_signature_check(*cert.sign_vector)) &&
                 cert.cm_class == ar.cm_class;
  try {
    check_weil_guard(cert);
  } catch (const std::logic_error&) {
    weil_ok = false;
  }
  add("weil", weil_ok);

  rep.verified = true;
  for (const auto& c : rep.checks) {
    if (!c.passed) {
      rep.verified = false;
      rep.failing_check = c.name;
      break;
    }
  }
  return rep;
}

std::vector<std::vector<mpz_class>> lll_reduce(std::vector<std::vector<mpz_class>> b, double delta) {
  const size_t n = b.size();
  if (n < 2) return b;
  const mpq_class dq(delta);
  const mpz_class dp = dq.get_num(), dd = dq.get_den();
  auto dot = [](const std::vector<mpz_class>& x, const std::vector<mpz_class>& y) {
    mpz_class s = 0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
  };
  // Integral LLL: dn[i + 1] are the Gram determinants, lam the scaled mu.
  std::vector<mpz_class> dn(n + 1, 0);
  std::vector<std::vector<mpz_class>> lam(n, std::vector<mpz_class>(n, 0));
  dn[0] = 1;
  dn[1] = dot(b[0], b[0]);
  size_t k = 1, kmax = 0;
  auto red = [&](size_t kk, size_t l) {
    mpz_class two = 2 * lam[kk][l];
    if (abs(two) <= dn[l + 1]) return;
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), mpz_class(2 * lam[kk][l] + dn[l + 1]).get_mpz_t(), mpz_class(2 * dn[l + 1]).get_mpz_t());
    for (size_t i = 0; i < b[kk].size(); ++i) b[kk][i] -= q * b[l][i];
    lam[kk][l] -= q * dn[l + 1];
    for (size_t i = 0; i < l; ++i) lam[kk][i] -= q * lam[l][i];
  };
  auto swap = [&](size_t kk) {
    std::swap(b[kk], b[kk - 1]);
    for (size_t j = 0; j + 1 < kk; ++j) std::swap(lam[kk][j], lam[kk - 1][j]);
    const mpz_class l = lam[kk][kk - 1];
    const mpz_class bb = (dn[kk - 1] * dn[kk + 1] + l * l) / dn[kk];
    for (size_t i = kk + 1; i <= kmax; ++i) {
      const mpz_class t = lam[i][kk];
      lam[i][kk] = (dn[kk + 1] * lam[i][kk - 1] - l * t) / dn[kk];
      lam[i][kk - 1] = (bb * t + l * lam[i][kk]) / dn[kk + 1];
    }
    dn[kk] = bb;
  };
  while (k < n) {
    if (k > kmax) {
      kmax = k;
      for (size_t j = 0; j <= k; ++j) {
        mpz_class u = dot(b[k], b[j]);
        for (size_t i = 0; i < j; ++i) u = (dn[i + 1] * u - lam[k][i] * lam[j][i]) / dn[i];
        if (j < k) lam[k][j] = u;
        else dn[k + 1] = u;
      }
      if (dn[k + 1] == 0) throw std::invalid_argument("lll_reduce: vectors are linearly dependent");
    }
    red(k, k - 1);
    if (dd * dn[k + 1] * dn[k - 1] < dp * dn[k] * dn[k] - dd * lam[k][k - 1] * lam[k][k - 1]) {
      swap(k);
      if (k > 1) --k;
    } else {
      for (size_t l = k - 1; l-- > 0;) red(k, l);
      ++k;
    }
  }
  return b;
}

ReconstructionResult reconstruct_alpha(const std::array<Complex, kDegree>& w, const IntegralElement& det_target) {
  Precision prec = w[0].precision();
  for (const auto& x : w) prec = std::min(prec, x.precision());
  const long scale_bits = static_cast<long>(prec) - 32;
  constexpr int kUnknowns = 4 * kDegree;
  constexpr int kForms = 2 * kDegree;
  std::vector<std::vector<mpz_class>> basis(kUnknowns, std::vector<mpz_class>(kUnknowns + kForms, 0));
  // Unknown order: a_0..a_5, b_0..b_5, c_0..c_5, d_0..d_5.
  for (int u = 0; u < kUnknowns; ++u) {
    basis[u][u] = 1;
    const int entry = u / kDegree, power = u % kDegree;
    for (int i = 0; i < kDegree; ++i) {
      const Real tp = pow(embed_real(IntegralElement::t(), kLabels[i], prec), static_cast<long>(power));
      Complex form(prec);
      switch (entry) {
        case 0: form = -(w[i] * tp); break;
        case 1: form = Complex(-tp); break;
        case 2: form = w[i] * w[i] * tp; break;
        default: form = w[i] * tp; break;
      }
      basis[u][kUnknowns + 2 * i] = ldexp(form.re, scale_bits).round_to_integer();
      basis[u][kUnknowns + 2 * i + 1] = ldexp(form.im, scale_bits).round_to_integer();
    }
  }
  const auto reduced = lll_reduce(std::move(basis));

  ReconstructionResult out;
  std::vector<std::array<Small, 4>> kernel;
  for (const auto& v : reduced) {
    mpz_class size = 0, residual = 0;
    for (int u = 0; u < kUnknowns; ++u) size = std::max(size, mpz_class(abs(v[u])));
    for (int f = 0; f < kForms; ++f) residual = std::max(residual, mpz_class(abs(v[kUnknowns + f])));
    if (residual > size * kUnknowns + 1 || size > mpz_class(1) << 20) continue;
    IntegralMatrix m;
    std::array<IntegralElement*, 4> entries{&m.a, &m.b, &m.c, &m.d};
    for (int u = 0; u < kUnknowns; ++u) (*entries[u / kDegree])[u % kDegree] = v[u];
    out.basis.push_back(m);
    kernel.push_back({to_small(m.a), to_small(m.b), to_small(m.c), to_small(m.d)});
  }

  // Tr det is a positive definite form on the kernel: every non-scalar
  // element acts on each w_k elliptically. Enumerate Tr det <= Tr target.
  const size_t nk = kernel.size();
  if (nk == 0) return out;
  std::vector<IntegralMatrix> kmat = out.basis;
  auto trace_of = [](const IntegralElement& x) { return trace(to_field(x)); };
  std::vector<std::vector<double>> gram(nk, std::vector<double>(nk, 0.0));
  for (size_t i = 0; i < nk; ++i) {
    for (size_t j = i; j < nk; ++j) {
      const IntegralMatrix& x = kmat[i];
      const IntegralMatrix& y = kmat[j];
      const mpq_class v = trace_of(x.a * y.d + y.a * x.d - x.b * y.c - y.b * x.c) / 2;
      gram[i][j] = gram[j][i] = v.get_d();
    }
  }
  const double bound = trace_of(det_target).get_d() + 0.5;
  // Cholesky in the form Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2.
  std::vector<std::vector<double>> q = gram;
  for (size_t i = 0; i < nk; ++i) {
    for (size_t j = i + 1; j < nk; ++j) {
      q[j][i] = q[i][j];
      q[i][j] /= q[i][i];
    }
    for (size_t k = i + 1; k < nk; ++k)
      for (size_t l = k; l < nk; ++l) q[k][l] -= q[k][i] * q[i][l];
  }
  for (size_t i = 0; i < nk; ++i)
    if (!(q[i][i] > 0)) return out;
  const Small target = to_small(det_target);
  std::set<std::array<Small, 4>> found;
  std::vector<long> x(nk, 0);
  std::function<void(size_t, double)> descend = [&](size_t i, double budget) {
    double centre = 0;
    for (size_t j = i + 1; j < nk; ++j) centre -= q[i][j] * static_cast<double>(x[j]);
    const double span = std::sqrt(std::max(0.0, budget / q[i][i])) + 1e-9;
    for (long v = static_cast<long>(std::ceil(centre - span)); v <= static_cast<long>(std::floor(centre + span)); ++v) {
      x[i] = v;
      const double rest = budget - q[i][i] * (v - centre) * (v - centre);
      if (rest < -1e-9) continue;
      if (i > 0) {
        descend(i - 1, rest);
        continue;
      }
      std::array<Small, 4> m{};
      for (size_t j = 0; j < nk; ++j) {
        if (x[j] == 0) continue;
        for (int e = 0; e < 4; ++e)
          for (int c = 0; c < kDegree; ++c) m[e][c] += x[j] * kernel[j][e][c];
      }
      const bool scalar = small_zero(m[1]) && small_zero(m[2]) && m[0] == m[3];
      if (!scalar && small_sub(small_mul(m[0], m[3]), small_mul(m[1], m[2])) == target) found.insert(m);
    }
    x[i] = 0;
  };
  descend(nk - 1, bound);
  for (const auto& m : found)
    out.matches.push_back(HeckeMatrix({from_small(m[0]), from_small(m[1]), from_small(m[2]), from_small(m[3])}));
  return out;
}

}  // namespace hecke
