#include "hecke/cm_types.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace hecke {
namespace {

int legendre(long a, long p) {
  long r = ((a % p) + p) % p;
  if (r == 0) return 0;
  long acc = 1;
  long base = r;
  long e = (p - 1) / 2;
  while (e > 0) {
    if (e & 1) acc = acc * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return acc == 1 ? 1 : -1;
}

int reduce_label(long a) {
  long r = ((a % 42) + 42) % 42;
  return static_cast<int>(r > 21 ? 42 - r : r);
}

int cycle_position(int k) {
  for (int i = 0; i < kDegree; ++i)
    if (kGaloisCycle[i] == k) return i;
  throw std::invalid_argument("bad label");
}

}  // namespace

std::string CMType::to_string() const {
  std::string s;
  for (int i = 0; i < kDegree; ++i) s += ((mask >> i) & 1U) ? '+' : '-';
  return s;
}

SignAssignment SignAssignment::from_labels(const std::vector<int>& plus_labels) {
  if (plus_labels.size() != 3) throw std::invalid_argument("a sign assignment has exactly three plus labels");
  unsigned m = 0;
  for (int k : plus_labels) m |= 1U << label_index(k);
  if (__builtin_popcount(m) != 3) throw std::invalid_argument("repeated label in sign assignment");
  return {m};
}

std::vector<int> SignAssignment::plus_labels() const {
  std::vector<int> out;
  for (int i = 0; i < kDegree; ++i)
    if ((plus_mask >> i) & 1U) out.push_back(kLabels[i]);
  return out;
}

std::vector<int> SignAssignment::minus_labels() const { return complement().plus_labels(); }

std::vector<SignAssignment> all_sign_assignments() {
  std::vector<SignAssignment> out;
  for (unsigned m = 0; m <= kFullMask; ++m)
    if (__builtin_popcount(m) == 3) out.push_back({m});
  return out;
}

unsigned rotate_mask(unsigned mask, int power) {
  const int p = ((power % kDegree) + kDegree) % kDegree;
  unsigned out = 0;
  for (int i = 0; i < kDegree; ++i) {
    if (!((mask >> i) & 1U)) continue;
    int k = kLabels[i];
    for (int j = 0; j < p; ++j) k = next_label(k);
    out |= 1U << label_index(k);
  }
  return out;
}

SignAssignment galois_act(const SignAssignment& sa, int power) { return {rotate_mask(sa.plus_mask, power)}; }

GaloisGroupM::GaloisGroupM(long d) : d_(d), cyclotomic_(d == 3 || d == 7) {
  if (d <= 0) throw std::invalid_argument("d must be positive");
  if (cyclotomic_) {
    for (int a = 1; a < 42; ++a)
      if (std::gcd(a, 42) == 1) units_.push_back(a);
  }
}

std::string GaloisGroupM::name(int g) const {
  if (cyclotomic_) return std::to_string(units_.at(g)) + " mod 42";
  return "(sigma^" + std::to_string(g % 6) + ", " + (g / 6 ? "conj" : "id") + ")";
}

int GaloisGroupM::complex_conjugation() const {
  if (cyclotomic_) return static_cast<int>(std::find(units_.begin(), units_.end(), 41) - units_.begin());
  return 6;
}

CMType GaloisGroupM::act(int g, const CMType& phi) const {
  if (g < 0 || g >= order()) throw std::out_of_range("Galois element index");
  if (!cyclotomic_) {
    unsigned m = rotate_mask(phi.mask, g % 6);
    if (g / 6) m ^= kFullMask;
    return {m, phi.d};
  }
  // Embedding labels a in (Z/42)^x; the one over sigma_k sending sqrt(-d)
  // to +i sqrt(d) is the a = +-k with (a/d) = +1.
  const long u = units_[g];
  unsigned out = 0;
  for (int i = 0; i < kDegree; ++i) {
    const int k = kLabels[i];
    const long a_plus = legendre(k, d_) == 1 ? k : 42 - k;
    const long a = ((phi.mask >> i) & 1U) ? a_plus : 42 - a_plus;
    const long image = u * a % 42;
    if (legendre(image, d_) == 1) out |= 1U << label_index(reduce_label(image));
  }
  return {out, phi.d};
}

int GaloisGroupM::lift_of_sigma(int power) const {
  const int p = ((power % kDegree) + kDegree) % kDegree;
  if (!cyclotomic_) return p;
  long g = 1;
  for (int i = 0; i < p; ++i) g = g * 11 % 42;
  if (legendre(g, d_) != 1) g = 42 - g;
  return static_cast<int>(std::find(units_.begin(), units_.end(), g) - units_.begin());
}

std::string GaloisGroupM::descriptor() const {
  if (cyclotomic_) return "(Z/42)^x acting on embedding labels by multiplication (d=" + std::to_string(d_) + ")";
  return "Z/6 x Z/2 acting factorwise (d=" + std::to_string(d_) + ")";
}

std::vector<CMType> enumerate_cm_types(long d) {
  std::vector<CMType> out;
  for (unsigned m = 0; m <= kFullMask; ++m) out.push_back({m, d});
  return out;
}

std::vector<CMType> weil_compatible_filter(const std::vector<CMType>& types) {
  std::vector<CMType> out;
  std::copy_if(types.begin(), types.end(), std::back_inserter(out), [](const CMType& t) { return t.plus_count() == 3; });
  return out;
}

std::vector<size_t> OrbitReport::sizes() const {
  std::vector<size_t> s;
  for (const auto& o : orbits) s.push_back(o.size());
  return s;
}

size_t OrbitReport::total() const {
  size_t n = 0;
  for (const auto& o : orbits) n += o.size();
  return n;
}

namespace {

template <typename Act>
OrbitReport partition(const std::vector<unsigned>& objects, int group_order, Act act, std::string action) {
  OrbitReport report;
  report.action = std::move(action);
  std::set<unsigned> seen;
  for (unsigned x : objects) {
    if (seen.count(x)) continue;
    std::set<unsigned> orbit;
    for (int g = 0; g < group_order; ++g) orbit.insert(act(g, x));
    Orbit o;
    o.members.assign(orbit.begin(), orbit.end());
    o.representative = o.members.front();
    seen.insert(orbit.begin(), orbit.end());
    report.orbits.push_back(std::move(o));
  }
  std::sort(report.orbits.begin(), report.orbits.end(),
            [](const Orbit& a, const Orbit& b) { return a.representative < b.representative; });
  return report;
}

}  // namespace

OrbitReport galois_orbits_sign_assignments() {
  std::vector<unsigned> objs;
  for (const auto& sa : all_sign_assignments()) objs.push_back(sa.plus_mask);
  return partition(objs, kDegree, [](int g, unsigned m) { return rotate_mask(m, g); },
                   "Z/6 generated by the 6-cycle (1 11 5 13 17 19) on labels");
}

OrbitReport galois_orbits_cm_types(long d, bool weil_only) {
  const GaloisGroupM group(d);
  std::vector<unsigned> objs;
  for (const auto& t : enumerate_cm_types(d))
    if (!weil_only || t.plus_count() == 3) objs.push_back(t.mask);
  return partition(objs, group.order(), [&](int g, unsigned m) { return group.act(g, CMType{m, d}).mask; },
                   group.descriptor());
}

CMType cm_type_from_sign_assignment(const SignAssignment& sa, long d) {
  if (__builtin_popcount(sa.plus_mask) != 3) throw std::invalid_argument("not a sign assignment");
  return {sa.plus_mask, d};
}

SignAssignment sign_assignment_from_cm_type(const CMType& phi) {
  if (phi.plus_count() != 3) throw std::invalid_argument("CM type is not Weil-compatible");
  return {phi.mask};
}

Stabilizer stabilizer(const CMType& phi) {
  const GaloisGroupM group(phi.d);
  Stabilizer s;
  for (int g = 0; g < group.order(); ++g) {
    if (group.act(g, phi) == phi) {
      s.elements.push_back(g);
      s.names.push_back(group.name(g));
    }
  }
  s.reflex_equals_m = s.elements.size() == 1;
  return s;
}

std::string weil_class(const SignAssignment& sa) {
  if (__builtin_popcount(sa.plus_mask) != 3) throw std::invalid_argument("not a sign assignment");
  std::vector<int> pos;
  for (int i = 0; i < kDegree; ++i)
    if ((sa.plus_mask >> i) & 1U) pos.push_back(cycle_position(kLabels[i]));
  std::sort(pos.begin(), pos.end());
  std::vector<int> gaps{pos[1] - pos[0], pos[2] - pos[1], pos[0] + kDegree - pos[2]};
  std::vector<int> best = gaps;
  for (int r = 1; r < 3; ++r) {
    std::rotate(gaps.begin(), gaps.begin() + 1, gaps.end());
    best = std::min(best, gaps);
  }
  return std::to_string(best[0]) + "," + std::to_string(best[1]) + "," + std::to_string(best[2]);
}

}  // namespace hecke
