#pragma once

// CM types of M = L(sqrt(-d)), Weil compatibility, Galois orbits of sign
// assignments, stabilisers and the reflex criterion.
//
// A CM type is encoded as 6 bits in k-order (1, 5, 11, 13, 17, 19); bit i
// set means the embedding over sigma_k sending sqrt(-d) to +i sqrt(d) is in
// the type, unset means its conjugate is.

#include <string>
#include <vector>

#include "hecke/field.hpp"

namespace hecke {

inline constexpr unsigned kFullMask = (1U << kDegree) - 1;

struct CMType {
  unsigned mask = 0;
  long d = 3;

  [[nodiscard]] CMType conjugate() const { return {mask ^ kFullMask, d}; }
  [[nodiscard]] int plus_count() const { return __builtin_popcount(mask); }
  [[nodiscard]] bool contains_plus(int k) const { return (mask >> label_index(k)) & 1U; }
  // '+' or '-' per label in k-order.
  [[nodiscard]] std::string to_string() const;
  friend bool operator==(const CMType&, const CMType&) = default;
};

// I+ as a 3-element set of labels, encoded like CMType::mask.
struct SignAssignment {
  unsigned plus_mask = 0;

  static SignAssignment from_labels(const std::vector<int>& plus_labels);
  [[nodiscard]] std::vector<int> plus_labels() const;
  [[nodiscard]] std::vector<int> minus_labels() const;
  [[nodiscard]] SignAssignment complement() const { return {plus_mask ^ kFullMask}; }
  friend bool operator==(const SignAssignment&, const SignAssignment&) = default;
};

std::vector<SignAssignment> all_sign_assignments();
// sigma^power acting on labels, k -> 11k reduced.
SignAssignment galois_act(const SignAssignment& sa, int power);
unsigned rotate_mask(unsigned mask, int power);

// Gal(M/Q). For d in {3, 7} it is (Z/42)^x acting on embedding labels by
// multiplication; otherwise Z/6 x Z/2 acting factorwise.
class GaloisGroupM {
 public:
  explicit GaloisGroupM(long d);

  [[nodiscard]] bool cyclotomic() const { return cyclotomic_; }
  [[nodiscard]] long d() const { return d_; }
  [[nodiscard]] int order() const { return 12; }
  [[nodiscard]] std::string name(int g) const;
  [[nodiscard]] int identity() const { return 0; }
  [[nodiscard]] int complex_conjugation() const;
  [[nodiscard]] CMType act(int g, const CMType& phi) const;
  // The element restricting to sigma^power on L and fixing sqrt(-d).
  [[nodiscard]] int lift_of_sigma(int power) const;
  [[nodiscard]] std::string descriptor() const;

 private:
  long d_;
  bool cyclotomic_;
  std::vector<int> units_;  // used when cyclotomic
};

std::vector<CMType> enumerate_cm_types(long d);
std::vector<CMType> weil_compatible_filter(const std::vector<CMType>& types);

struct Orbit {
  unsigned representative = 0;  // smallest mask in the orbit
  std::vector<unsigned> members;
  [[nodiscard]] size_t size() const { return members.size(); }
};

struct OrbitReport {
  std::vector<Orbit> orbits;  // sorted by representative
  std::string action;
  [[nodiscard]] std::vector<size_t> sizes() const;
  [[nodiscard]] size_t total() const;
};

OrbitReport galois_orbits_sign_assignments();
OrbitReport galois_orbits_cm_types(long d, bool weil_only);

CMType cm_type_from_sign_assignment(const SignAssignment& sa, long d);
SignAssignment sign_assignment_from_cm_type(const CMType& phi);

struct Stabilizer {
  std::vector<int> elements;
  std::vector<std::string> names;
  bool reflex_equals_m = false;  // M* = M iff the stabiliser is trivial
};
Stabilizer stabilizer(const CMType& phi);

// Orbit label of a Weil sign assignment: the gaps between consecutive
// plus positions along the Galois cycle, rotated to be lexicographically
// smallest ("2,2,2" alternating, "1,1,4" consecutive, "1,2,3", "1,3,2").
std::string weil_class(const SignAssignment& sa);

}  // namespace hecke
