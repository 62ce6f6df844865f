#pragma once

// Schwarz triangle maps, their inverses, reduction to the fundamental
// triangle and the per-embedding component maps f_k built from them.

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hecke/complex.hpp"
#include "hecke/field.hpp"
#include "hecke/hypergeometric.hpp"

namespace hecke {

// Vertex angles are rational multiples of pi: angles[0] at v0 (image of
// w = 0), angles[1] at v1 (w = 1), angles[2] at v_inf (w = infinity).
// Edge 0 joins v0 and v1, edge 1 joins v1 and v_inf, edge 2 joins v0 and
// v_inf. A reversed triangle is the mirror image; its Schwarz map is
// anti-holomorphic.
struct TriangleData {
  int k = 1;
  std::array<mpq_class, 3> angles{mpq_class(1, 14), mpq_class(1, 21), mpq_class(1, 42)};
  bool reversed = false;
  std::string placement = "b-fixed-point";

  static TriangleData standard();
  [[nodiscard]] HypergeometricParams params() const;
  // Throws std::invalid_argument for non-hyperbolic or malformed data.
  void validate() const;
  friend bool operator==(const TriangleData&, const TriangleData&) = default;
};

// Triangles T_k whose angles are Galois conjugates of the standard ones:
// a/14, b/21, c/42 with a = +-k mod 14, b in {k, 21 - k}, c = +-k mod 42
// and angle sum below 1. b = 21 - k gives a reversed triangle.
std::vector<TriangleData> candidate_triangles(int k);

Real embed_real(const IntegralElement& x, int k, Precision prec);
// sigma_k(g) acting on the upper half-plane.
Complex apply_embedded(const IntegralMatrix& g, int k, const Complex& z);
// Fixed point in H of sigma_k(g); throws std::domain_error unless elliptic.
Complex elliptic_fixed_point(const IntegralMatrix& g, int k, Precision prec);

// A point of the closed upper half-plane in one of three charts: w = x
// (chart 0), w = 1 - x (chart 1) or w = 1/x (chart 2). Chart 1 keeps full
// relative precision for points very close to w = 1.
struct SchwarzPoint {
  int chart = 0;
  Complex x;
  [[nodiscard]] Complex w() const;
};

class SchwarzTriangle {
 public:
  SchwarzTriangle(TriangleData data, PrecisionContext ctx);

  [[nodiscard]] const TriangleData& data() const { return data_; }
  [[nodiscard]] const PrecisionContext& context() const { return ctx_; }
  [[nodiscard]] Precision precision() const { return ctx_.precision; }

  // s(w) for w in the closed upper half-plane; real w is taken from above.
  [[nodiscard]] Complex map(const Complex& w) const;
  [[nodiscard]] Complex map(const SchwarzPoint& pt) const;
  // ds/dw, or ds/d(conj w) for a reversed triangle.
  [[nodiscard]] Complex map_with_derivative(const Complex& w, Complex& derivative) const;
  // w with s(w) = z, for z in the closed triangle. Returns 0 and 1 at v0 and
  // v1; throws std::domain_error at v_inf and std::runtime_error if Newton
  // fails to converge.
  [[nodiscard]] Complex inverse(const Complex& z) const;
  [[nodiscard]] SchwarzPoint inverse_point(const Complex& z) const;

  [[nodiscard]] const std::array<Complex, 3>& vertices() const { return vertices_; }
  [[nodiscard]] const Complex& interior_point() const { return interior_; }
  // sinh of the signed hyperbolic distance to the edge geodesic, positive
  // on the side away from the triangle.
  [[nodiscard]] Real edge_excess(int edge, const Complex& z) const;
  [[nodiscard]] Complex reflect(int edge, const Complex& z) const;
  [[nodiscard]] bool contains(const Complex& z) const;
  [[nodiscard]] const Real& kappa() const { return kappa_; }

 private:
  struct Geodesic {
    bool vertical = false;
    Real x;  // centre on the real axis, or abscissa of the vertical line
    Real radius;
    int outside_sign = 1;
  };
  struct Seed {
    std::complex<double> w;
    std::complex<double> u;
  };

  // kappa eta at the point; derivative is with respect to w.
  [[nodiscard]] Complex disk_eta(const SchwarzPoint& pt, Complex* derivative) const;
  [[nodiscard]] Complex placement(const Complex& u) const;
  [[nodiscard]] Complex placement_derivative(const Complex& u) const;
  [[nodiscard]] Complex placement_inverse(const Complex& z) const;
  [[nodiscard]] Real raw_excess(const Geodesic& g, const Complex& z) const;
  void build_seeds() const;

  TriangleData data_;
  PrecisionContext ctx_;
  PrecisionContext work_;
  HypergeometricParams p1_;
  HypergeometricParams p2_;
  Real kappa_;
  Real r1_;
  Complex rotation_;  // e^{i phi}
  Complex fixed_;     // p, image of v1
  std::array<Complex, 3> disk_vertices_;
  std::array<Complex, 3> vertices_;
  std::array<Geodesic, 3> edges_;
  Complex interior_;
  Real slack_;
  mutable std::once_flag seeds_once_;
  mutable std::vector<Seed> seeds_;
};

// Angles of the image triangle, in units of pi, measured from map images of
// points on the three real intervals next to each vertex.
std::array<Real, 3> image_angles(const SchwarzTriangle& tri, double eps = 1e-3);

struct ReflectionWord {
  // Edge indices in the order the reflections were applied.
  std::vector<int> letters;
  [[nodiscard]] size_t length() const { return letters.size(); }
  [[nodiscard]] bool orientation_preserving() const { return letters.size() % 2 == 0; }
  [[nodiscard]] std::string to_string() const;
  friend bool operator==(const ReflectionWord&, const ReflectionWord&) = default;
};

struct Reduction {
  Complex z0;
  ReflectionWord word;
};

inline constexpr long kMaxReflections = 10000;

// z0 = R_{w_n} ... R_{w_1} z lies in the closed triangle.
Reduction reduce_to_fundamental(const SchwarzTriangle& tri, const Complex& z, long max_reflections = kMaxReflections);
// Applies the word in reverse, recovering z from z0.
Complex unreduce(const SchwarzTriangle& tri, const Complex& z0, const ReflectionWord& word);

struct ComponentValidation {
  int k = 1;
  long samples = 0;
  double max_residual = 0;  // B-equation
  double mean_residual = 0;
  // max |(R_i R_j)^m zeta - zeta| over the vertex relations of T_1 applied
  // with the reflections of T_k; nonzero means f_k is not well defined.
  double relation_residual = 0;
  bool passed = false;
};

struct ValidationRecord {
  Precision precision = kDefaultPrecision;
  std::uint64_t seed = 0;
  double tolerance = 1e-20;
  std::string digest;  // digest of the triangles it was computed for
  std::vector<ComponentValidation> components;
};

struct EmbeddingConfig {
  std::string id = "k1-only";
  std::vector<TriangleData> triangles{TriangleData::standard()};
  std::optional<ValidationRecord> validation;

  [[nodiscard]] const TriangleData* find(int k) const;
  [[nodiscard]] std::vector<int> components() const;
  // Digest over the triangle data only.
  [[nodiscard]] std::string digest() const;
  // True iff a validation record exists for the current triangles and every
  // component passed.
  [[nodiscard]] bool validated() const;
};

EmbeddingConfig parse_config(const std::string& json_text);
std::string serialize_config(const EmbeddingConfig& cfg);
EmbeddingConfig load_config(const std::filesystem::path& path);
void save_config(const EmbeddingConfig& cfg, const std::filesystem::path& path);

// Thrown when a component map is requested from an unvalidated config.
class UnvalidatedConfig : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ComponentMaps {
 public:
  // Throws UnvalidatedConfig unless cfg.validated() or waive is set.
  ComponentMaps(EmbeddingConfig cfg, PrecisionContext ctx, bool waive_validation = false);

  [[nodiscard]] const EmbeddingConfig& config() const { return cfg_; }
  [[nodiscard]] bool has(int k) const { return tris_.count(k) != 0; }
  [[nodiscard]] std::vector<int> components() const { return cfg_.components(); }
  [[nodiscard]] const SchwarzTriangle& triangle(int k) const;
  // f_k(z). f_1 is the identity.
  [[nodiscard]] Complex operator()(int k, const Complex& z) const;
  // Reduce in T_1, invert s_1, apply s_k, unreduce with the reflections of
  // T_k. For k = 1 this reproduces z numerically.
  [[nodiscard]] Complex via_triangles(int k, const Complex& z) const;

 private:
  EmbeddingConfig cfg_;
  PrecisionContext ctx_;
  std::map<int, std::unique_ptr<SchwarzTriangle>> tris_;
};

// |f_k(B z) - sigma_k(B) f_k(z)| at z, through the triangle pipeline.
Real b_equation_residual(const ComponentMaps& maps, int k, const Complex& z);

// Vertex-relation residual at zeta for triangle tk (see ComponentValidation).
Real relation_residual(const SchwarzTriangle& tk, const Complex& zeta);

// Checks the B-equation and the vertex relations at seeded sample points for
// every configured component and returns cfg with a fresh validation record.
// A component passes iff both residuals stay below tolerance.
EmbeddingConfig validate_config(const EmbeddingConfig& cfg, const PrecisionContext& ctx, long samples,
                                std::uint64_t seed, double tolerance = 1e-20);

}  // namespace hecke
