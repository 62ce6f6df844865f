#include "hecke/triangle.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hecke {
namespace {

constexpr Precision kWorkGuard = 16;
constexpr int kNewtonIterations = 200;

Complex cpow_side(const Complex& z, const Real& e, Side side) {
  const Precision prec = z.precision();
  if (z.is_zero()) {
    if (e.sign() > 0) return Complex(prec);
    throw std::domain_error("power of zero");
  }
  Real theta = arg(z);
  if (z.im.is_zero() && z.re.sign() < 0 && side == Side::Lower) theta = -Real::pi(prec);
  if (z.im.is_zero() && z.re.sign() < 0 && side == Side::Upper) theta = Real::pi(prec);
  return polar(exp(e * log(abs(z))), e * theta);
}

Real rat(const mpq_class& x, Precision prec) { return Real::from_rational(x, prec); }

Real cos_pi(const mpq_class& x, Precision prec) { return cos(rat(x, prec) * Real::pi(prec)); }
Real sin_pi(const mpq_class& x, Precision prec) { return sin(rat(x, prec) * Real::pi(prec)); }

// Euclidean radius in the disk of the side opposite the angle gamma.
Real disk_side(const mpq_class& alpha, const mpq_class& beta, const mpq_class& gamma, Precision prec) {
  const Real ch = (cos_pi(alpha, prec) * cos_pi(beta, prec) + cos_pi(gamma, prec)) /
                  (sin_pi(alpha, prec) * sin_pi(beta, prec));
  return tanh(acosh(ch) / 2L);
}

// Disk automorphism sending v to 0.
Complex to_origin(const Complex& v, const Complex& u) { return (u - v) / (Complex(Real(1L, u.precision())) - conj(v) * u); }

Real hyperbolic_gap(const Complex& a, const Complex& b) {
  return abs(a - b) / abs(Complex(Real(1L, a.precision())) - conj(b) * a);
}

std::string rational_string(const mpq_class& q) { return q.get_str(); }

mpq_class parse_rational(const std::string& s) {
  mpq_class q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
  if (q.get_den() == 0) throw std::invalid_argument("bad rational: " + s);
  q.canonicalize();
  return q;
}

bool is_label(int k) { return std::find(kLabels.begin(), kLabels.end(), k) != kLabels.end(); }

}  // namespace

TriangleData TriangleData::standard() { return {}; }

HypergeometricParams TriangleData::params() const {
  return HypergeometricParams::from_angles(angles[0], angles[1], angles[2]);
}

void TriangleData::validate() const {
  if (!is_label(k)) throw std::invalid_argument("triangle label k must be one of 1, 5, 11, 13, 17, 19");
  mpq_class sum = 0;
  for (const auto& a : angles) {
    if (a <= 0 || a >= 1) throw std::invalid_argument("triangle angles must lie strictly between 0 and pi");
    sum += a;
  }
  if (sum >= 1) throw std::invalid_argument("triangle is not hyperbolic (angle sum >= pi)");
  if (placement != "b-fixed-point") throw std::invalid_argument("unknown placement rule: " + placement);
}

std::vector<TriangleData> candidate_triangles(int k) {
  if (!is_label(k)) throw std::invalid_argument("k must be one of 1, 5, 11, 13, 17, 19");
  std::vector<long> as{k % 14, 14 - k % 14};
  std::vector<long> bs{k, 21 - k};
  std::vector<long> cs{k, 42 - k};
  std::vector<TriangleData> out;
  for (long a : as)
    for (long b : bs)
      for (long c : cs) {
        TriangleData t;
        t.k = k;
        t.angles = {mpq_class(a, 14), mpq_class(b, 21), mpq_class(c, 42)};
        for (auto& x : t.angles) x.canonicalize();
        t.reversed = b != k;
        if (t.angles[0] + t.angles[1] + t.angles[2] >= 1) continue;
        if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
      }
  return out;
}

Real embed_real(const IntegralElement& x, int k, Precision prec) { return embed_ball(x, k, prec).mid(); }

Complex apply_embedded(const IntegralMatrix& g, int k, const Complex& z) {
  const Precision prec = z.precision();
  const Real a = embed_real(g.a, k, prec), b = embed_real(g.b, k, prec);
  const Real c = embed_real(g.c, k, prec), d = embed_real(g.d, k, prec);
  return (z * a + b) / (z * c + d);
}

Complex elliptic_fixed_point(const IntegralMatrix& g, int k, Precision prec) {
  const Real a = embed_real(g.a, k, prec), d = embed_real(g.d, k, prec), c = embed_real(g.c, k, prec);
  const Real det = embed_real(g.det(), k, prec);
  const Real disc = det * 4L - (a + d) * (a + d);
  if (c.is_zero() || disc.sign() <= 0) throw std::domain_error("matrix is not elliptic under this embedding");
  Real im = sqrt(disc) / (c * 2L);
  return {(a - d) / (c * 2L), abs(im)};
}

SchwarzTriangle::SchwarzTriangle(TriangleData data, PrecisionContext ctx)
    : data_(std::move(data)),
      ctx_(std::move(ctx)),
      work_(ctx_.precision + kWorkGuard, ctx_.tolerance, ctx_.max_terms, false),
      p1_(data_.params()),
      p2_{p1_.a - p1_.c + 1, p1_.b - p1_.c + 1, 2 - p1_.c},
      kappa_(work_.precision),
      r1_(work_.precision),
      rotation_(work_.precision),
      fixed_(work_.precision),
      disk_vertices_{Complex(work_.precision), Complex(work_.precision), Complex(work_.precision)},
      vertices_{Complex(work_.precision), Complex(work_.precision), Complex(work_.precision)},
      interior_(work_.precision),
      slack_(ldexp(Real(1L, 64), -static_cast<long>(ctx_.precision) + 24)) {
  data_.validate();
  const Precision prec = work_.precision;
  const auto& [alpha, beta, gamma] = data_.angles;
  r1_ = disk_side(alpha, beta, gamma, prec);
  const Real rinf = disk_side(alpha, gamma, beta, prec);
  const Real eta1 = gauss_sum(p2_, prec) / gauss_sum(p1_, prec);
  if (eta1.sign() <= 0) throw std::runtime_error("Schwarz map normalisation failed");
  kappa_ = r1_ / eta1;

  fixed_ = elliptic_fixed_point(generator_b(), data_.k, prec);
  const Complex one(Real(1L, prec));
  const Complex q = (one - fixed_) / (one - conj(fixed_));
  rotation_ = -q / abs(q);

  disk_vertices_ = {Complex(prec), Complex(r1_), polar(rinf, rat(alpha, prec) * Real::pi(prec))};
  for (int i = 0; i < 3; ++i) {
    const Complex u = data_.reversed ? conj(disk_vertices_[i]) : disk_vertices_[i];
    vertices_[i] = placement(u);
  }
  vertices_[1] = fixed_;
  Complex centroid = (disk_vertices_[0] + disk_vertices_[1] + disk_vertices_[2]) / 3L;
  interior_ = placement(data_.reversed ? conj(centroid) : centroid);

  const std::array<std::pair<int, int>, 3> ends{{{0, 1}, {1, 2}, {0, 2}}};
  for (int e = 0; e < 3; ++e) {
    const Complex& z1 = vertices_[ends[e].first];
    const Complex& z2 = vertices_[ends[e].second];
    Geodesic g;
    const Real dx = z1.re - z2.re;
    if (abs(dx) <= ldexp(abs(z1) + abs(z2), 20 - static_cast<long>(prec))) {
      g.vertical = true;
      g.x = (z1.re + z2.re) / 2L;
      g.radius = Real(prec);
    } else {
      g.x = (norm(z1) - norm(z2)) / (dx * 2L);
      g.radius = abs(z1 - Complex(g.x));
    }
    edges_[e] = g;
    edges_[e].outside_sign = raw_excess(g, interior_).sign() > 0 ? -1 : 1;
  }
}

Complex SchwarzPoint::w() const {
  const Complex one(Real(1L, x.precision()));
  if (chart == 1) return one - x;
  if (chart == 2) return one / x;
  return x;
}

Complex SchwarzTriangle::disk_eta(const SchwarzPoint& pt, Complex* derivative) const {
  const Precision prec = work_.precision;
  const Complex one(Real(1L, prec));
  const Complex x = pt.x.with_precision(prec);
  const Complex z = pt.chart == 1 ? one - x : pt.chart == 2 ? one / x : x;
  const bool real = pt.chart == 1 ? x.im.is_zero() : z.im.is_zero();
  const Side side = real ? Side::Upper : Side::None;
  Complex f1(prec), f2(prec), omw(prec);
  Side omw_side = Side::None;
  if (pt.chart == 1) {
    omw_side = real ? Side::Lower : Side::None;
    f1 = hyp2f1_one_minus(p1_, x, work_, omw_side).value;
    f2 = hyp2f1_one_minus(p2_, x, work_, omw_side).value;
    omw = x;
  } else {
    f1 = hyp2f1(p1_, z, work_, side).value;
    f2 = hyp2f1(p2_, z, work_, side).value;
    omw = one - z;
    omw_side = real ? Side::Lower : Side::None;
  }
  const Real one_minus_c = rat(1 - p1_.c, prec);
  const Complex eta = cpow_side(z, one_minus_c, side) * f2 / f1;
  if (derivative) {
    const Complex wr = cpow_side(z, rat(-p1_.c, prec), side) *
                       cpow_side(omw, rat(p1_.c - p1_.a - p1_.b - 1, prec), omw_side) * one_minus_c;
    *derivative = wr / (f1 * f1) * kappa_;
  }
  return eta * kappa_;
}

Complex SchwarzTriangle::placement(const Complex& u) const {
  const Complex one(Real(1L, u.precision()));
  const Complex u1 = (u - Complex(r1_)) / (one - u * r1_);
  const Complex u2 = rotation_ * u1;
  return (fixed_ - conj(fixed_) * u2) / (one - u2);
}

Complex SchwarzTriangle::placement_derivative(const Complex& u) const {
  const Complex one(Real(1L, u.precision()));
  const Complex den1 = one - u * r1_;
  const Complex u1 = (u - Complex(r1_)) / den1;
  const Complex u2 = rotation_ * u1;
  const Complex den2 = one - u2;
  const Real r1sq = r1_ * r1_;
  return (fixed_ - conj(fixed_)) / (den2 * den2) * rotation_ * ((Real(1L, u.precision()) - r1sq) / (den1 * den1));
}

Complex SchwarzTriangle::placement_inverse(const Complex& z) const {
  const Precision prec = work_.precision;
  const Complex zz = z.with_precision(prec);
  const Complex one(Real(1L, prec));
  const Complex u2 = (zz - fixed_) / (zz - conj(fixed_));
  const Complex u1 = u2 / rotation_;
  return (u1 + Complex(r1_)) / (one + u1 * r1_);
}

Complex SchwarzTriangle::map(const Complex& w) const {
  if (w.im.sign() < 0) throw std::domain_error("Schwarz map is defined on the closed upper half-plane");
  return map(SchwarzPoint{0, w});
}

Complex SchwarzTriangle::map(const SchwarzPoint& pt) const {
  if (pt.chart < 0 || pt.chart > 2) throw std::invalid_argument("bad chart");
  if (pt.chart == 2 && pt.x.is_zero()) return vertices_[2].with_precision(ctx_.precision);
  const Complex u = disk_eta(pt, nullptr);
  return placement(data_.reversed ? conj(u) : u).with_precision(ctx_.precision);
}

Complex SchwarzTriangle::map_with_derivative(const Complex& w, Complex& derivative) const {
  if (w.im.sign() < 0) throw std::domain_error("Schwarz map is defined on the closed upper half-plane");
  Complex du(work_.precision);
  Complex u = disk_eta(SchwarzPoint{0, w}, &du);
  if (data_.reversed) {
    u = conj(u);
    du = conj(du);
  }
  derivative = (placement_derivative(u) * du).with_precision(ctx_.precision);
  return placement(u).with_precision(ctx_.precision);
}

void SchwarzTriangle::build_seeds() const {
  const PrecisionContext low(64, ldexp(Real(1L, 64), -40), ctx_.max_terms, false);
  SchwarzTriangle coarse(data_, low);
  std::vector<std::complex<double>> ws;
  for (int i = -12; i <= 16; ++i)
    for (double y : {0.02, 0.06, 0.15, 0.3, 0.5, 0.8, 1.2, 1.8, 2.6, 4.0}) ws.emplace_back(0.25 * i, y);
  for (double r : {1e-6, 1e-4, 1e-3, 0.01, 0.03, 0.08, 0.15})
    for (int j = 1; j < 12; ++j) {
      const std::complex<double> e = std::polar(r, M_PI * j / 12.0);
      ws.push_back(e);
      ws.push_back(1.0 + e);
    }
  for (double r : {6.0, 12.0, 30.0, 100.0, 1e3, 1e4, 1e6})
    for (int j = 1; j < 12; ++j) ws.push_back(std::polar(r, M_PI * j / 12.0));
  seeds_.reserve(ws.size());
  for (const auto& w : ws) {
    const Complex u = coarse.disk_eta(SchwarzPoint{0, Complex(w.real(), w.imag(), 64)}, nullptr);
    seeds_.push_back({w, u.to_std()});
  }
}

Complex SchwarzTriangle::inverse(const Complex& z) const { return inverse_point(z).w(); }

SchwarzPoint SchwarzTriangle::inverse_point(const Complex& z) const {
  const Precision prec = work_.precision;
  if (!(z.im.sign() > 0)) throw std::domain_error("schwarz_inverse needs a point of the upper half-plane");
  Complex target = placement_inverse(z);
  if (data_.reversed) target = conj(target);

  const Real at_vertex = ldexp(Real(1L, prec), -static_cast<long>(ctx_.precision) * 7 / 8);
  int j = 0;
  Real best = hyperbolic_gap(target, disk_vertices_[0]);
  for (int i = 1; i < 3; ++i) {
    const Real g = hyperbolic_gap(target, disk_vertices_[i]);
    if (g < best) {
      best = g;
      j = i;
    }
  }
  if (best < at_vertex) {
    if (j == 2) throw std::domain_error("schwarz_inverse: the vertex at infinity has no finite preimage");
    return SchwarzPoint{j, Complex(ctx_.precision)};
  }

  // Straighten the corner at v_j: rot * m_j(u) lies in a sector bisected by
  // the positive axis, and the power 1/angle opens it to a half-plane.
  const Complex& vj = disk_vertices_[j];
  const Complex d1 = to_origin(vj, disk_vertices_[(j + 1) % 3]);
  const Complex d2 = to_origin(vj, disk_vertices_[(j + 2) % 3]);
  const Complex bis = d1 / abs(d1) + d2 / abs(d2);
  const Complex rot = conj(bis / abs(bis));
  const Real expo = Real(1L, prec) / rat(data_.angles[j], prec);
  const Complex gt = cpow_side(rot * to_origin(vj, target), expo, Side::None);

  std::call_once(seeds_once_, [this] { build_seeds(); });
  const std::complex<double> td = target.to_std();
  double best_seed = 1e300;
  std::complex<double> w0;
  for (const auto& s : seeds_) {
    const double gap = std::abs(s.u - td) / std::abs(1.0 - std::conj(td) * s.u);
    const bool chart_ok = j == 2 ? std::abs(s.w) > 1.5 : std::abs(s.w) < 50;
    if (chart_ok && gap < best_seed) {
      best_seed = gap;
      w0 = s.w;
    }
  }

  // Newton in the chart attached to the nearest vertex.
  const Complex one(Real(1L, prec));
  const std::complex<double> x0 = j == 0 ? w0 : j == 1 ? 1.0 - w0 : 1.0 / w0;
  SchwarzPoint pt{j, Complex(x0.real(), x0.imag(), prec)};
  // Iterates that leave H are reflected back; reflection never moves a
  // point farther from a solution in the closed upper half-plane.
  auto fold = [&](Complex x) {
    const int s = x.im.sign();
    if ((j == 0 && s < 0) || (j != 0 && s > 0)) x = conj(x);
    return x;
  };
  pt.x = fold(pt.x);

  auto residual = [&](const Complex& x, Complex* dGdx) {
    const SchwarzPoint at{j, x};
    Complex du(prec);
    const Complex u = disk_eta(at, dGdx ? &du : nullptr);
    const Complex m = to_origin(vj, u);
    const Complex gu = cpow_side(rot * m, expo, Side::None);
    if (dGdx) {
      const Complex den = one - conj(vj) * u;
      const Complex dm = Complex(Real(1L, prec) - norm(vj)) / (den * den);
      Complex d = gu / m * expo * dm * du;
      if (j == 1) d = -d;
      if (j == 2) {
        const Complex w = at.w();
        d = -d * w * w;
      }
      *dGdx = d;
    }
    return gu - gt;
  };

  const Real step_tol = ldexp(Real(1L, prec), -static_cast<long>(ctx_.precision) - 4);
  const Real accept = ldexp(abs(z) + 1L, 24 - static_cast<long>(ctx_.precision));
  Complex deriv(prec);
  Complex G = residual(pt.x, &deriv);
  Real gnorm = abs(G);
  int polished = 0;
  for (int it = 0; it < kNewtonIterations; ++it) {
    const Complex step = G / deriv;
    Complex trial = step;
    bool accepted = false;
    for (int half = 0; half < 60; ++half) {
      const Complex candidate = fold(pt.x - trial);
      Complex cd(prec);
      const Complex cg = residual(candidate, &cd);
      const Real cn = abs(cg);
      if (cn < gnorm || cn.is_zero() || abs(trial) <= step_tol * abs(pt.x)) {
        pt.x = candidate;
        G = cg;
        deriv = cd;
        gnorm = cn;
        accepted = true;
        break;
      }
      trial = trial / 2L;
    }
    // One more step after the residual first settles polishes the last bits.
    const bool settled = gnorm <= ldexp(abs(gt), 40 - static_cast<long>(prec)) && polished++ > 0;
    if (!accepted || settled || abs(step) <= step_tol * abs(pt.x) || gnorm.is_zero()) {
      if (abs(map(pt) - z.with_precision(ctx_.precision)) <= accept) {
        pt.x = pt.x.with_precision(ctx_.precision);
        return pt;
      }
      if (!accepted) break;
    }
  }
  throw std::runtime_error("schwarz_inverse: Newton iteration did not converge");
}

Real SchwarzTriangle::raw_excess(const Geodesic& g, const Complex& z) const {
  if (g.vertical) return (z.re - g.x) / z.im;
  const Complex d = z - Complex(g.x);
  return (norm(d) - g.radius * g.radius) / (g.radius * z.im * 2L);
}

Real SchwarzTriangle::edge_excess(int edge, const Complex& z) const {
  if (edge < 0 || edge > 2) throw std::out_of_range("edge index");
  const Real v = raw_excess(edges_[edge], z.with_precision(work_.precision));
  return edges_[edge].outside_sign > 0 ? v : -v;
}

Complex SchwarzTriangle::reflect(int edge, const Complex& z) const {
  if (edge < 0 || edge > 2) throw std::out_of_range("edge index");
  const Geodesic& g = edges_[edge];
  const Complex zz = z.with_precision(work_.precision);
  if (g.vertical) return Complex(g.x * 2L - zz.re, zz.im);
  return Complex(g.x) + Complex(g.radius * g.radius) / conj(zz - Complex(g.x));
}

bool SchwarzTriangle::contains(const Complex& z) const {
  for (int e = 0; e < 3; ++e)
    if (edge_excess(e, z) > slack_) return false;
  return true;
}

std::string ReflectionWord::to_string() const {
  std::string s;
  for (int l : letters) s += static_cast<char>('0' + l);
  return s;
}

std::array<Real, 3> image_angles(const SchwarzTriangle& tri, double eps) {
  const Precision prec = tri.precision();
  const Real e(eps, prec);
  const Real zero(0L, prec);
  auto at = [&](const Complex& v, const Real& w1, const Real& w2) {
    const Complex p1 = (tri.map(Complex(w1, zero)) - v) / (tri.map(Complex(w1, zero)) - conj(v));
    const Complex p2 = (tri.map(Complex(w2, zero)) - v) / (tri.map(Complex(w2, zero)) - conj(v));
    return abs(arg(p1 / p2)) / Real::pi(prec);
  };
  const auto& v = tri.vertices();
  return {at(v[0], e, -e), at(v[1], 1L - e, e + 1L), at(v[2], 1L / e, -(1L / e))};
}

Reduction reduce_to_fundamental(const SchwarzTriangle& tri, const Complex& z, long max_reflections) {
  if (!(z.im.sign() > 0)) throw std::domain_error("reduce_to_fundamental needs a point of the upper half-plane");
  const Real slack = ldexp(Real(1L, 64), -static_cast<long>(tri.precision()) + 24);
  Reduction r{z.with_precision(tri.precision() + kWorkGuard), {}};
  for (long n = 0;; ++n) {
    int pick = -1;
    Real nearest(tri.precision());
    for (int e = 0; e < 3; ++e) {
      const Real ex = tri.edge_excess(e, r.z0);
      if (ex > slack && (pick < 0 || ex < nearest)) {
        pick = e;
        nearest = ex;
      }
    }
    if (pick < 0) break;
    if (n >= max_reflections) throw std::runtime_error("reduce_to_fundamental: reflection budget exhausted");
    r.z0 = tri.reflect(pick, r.z0);
    r.word.letters.push_back(pick);
  }
  return r;
}

Complex unreduce(const SchwarzTriangle& tri, const Complex& z0, const ReflectionWord& word) {
  Complex z = z0.with_precision(tri.precision() + kWorkGuard);
  for (auto it = word.letters.rbegin(); it != word.letters.rend(); ++it) z = tri.reflect(*it, z);
  return z;
}

const TriangleData* EmbeddingConfig::find(int k) const {
  for (const auto& t : triangles)
    if (t.k == k) return &t;
  return nullptr;
}

std::vector<int> EmbeddingConfig::components() const {
  std::vector<int> ks;
  for (const auto& t : triangles) ks.push_back(t.k);
  std::sort(ks.begin(), ks.end(), [](int a, int b) { return label_index(a) < label_index(b); });
  return ks;
}

namespace {

nlohmann::json triangle_json(const TriangleData& t) {
  return {{"k", t.k},
          {"angles", {rational_string(t.angles[0]), rational_string(t.angles[1]), rational_string(t.angles[2])}},
          {"orientation", t.reversed ? "reversed" : "standard"},
          {"placement", t.placement}};
}

TriangleData triangle_from_json(const nlohmann::json& j) {
  TriangleData t;
  t.k = j.at("k").get<int>();
  const auto& a = j.at("angles");
  if (!a.is_array() || a.size() != 3) throw std::invalid_argument("angles must be a list of three rationals");
  for (int i = 0; i < 3; ++i) t.angles[i] = parse_rational(a[i].get<std::string>());
  const std::string o = j.value("orientation", "standard");
  if (o != "standard" && o != "reversed") throw std::invalid_argument("orientation must be standard or reversed");
  t.reversed = o == "reversed";
  t.placement = j.value("placement", "b-fixed-point");
  t.validate();
  return t;
}

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace

std::string EmbeddingConfig::digest() const {
  nlohmann::json arr = nlohmann::json::array();
  for (int k : components()) arr.push_back(triangle_json(*find(k)));
  return fnv1a(arr.dump());
}

bool EmbeddingConfig::validated() const {
  if (!validation || validation->digest != digest()) return false;
  for (int k : components()) {
    const auto it = std::find_if(validation->components.begin(), validation->components.end(),
                                 [k](const ComponentValidation& c) { return c.k == k; });
    if (it == validation->components.end() || !it->passed) return false;
  }
  return true;
}

EmbeddingConfig parse_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("schema", "") != "hecke-embedding-config/1")
      throw std::invalid_argument("unsupported config schema");
    EmbeddingConfig cfg;
    cfg.id = j.value("id", "unnamed");
    cfg.triangles.clear();
    for (const auto& t : j.at("triangles")) {
      TriangleData td = triangle_from_json(t);
      if (cfg.find(td.k)) throw std::invalid_argument("duplicate triangle for k=" + std::to_string(td.k));
      cfg.triangles.push_back(std::move(td));
    }
    const TriangleData* t1 = cfg.find(1);
    if (!t1 || !(*t1 == TriangleData::standard()))
      throw std::invalid_argument("config must contain the standard (1/14, 1/21, 1/42) triangle for k=1");
    if (j.contains("validation") && !j["validation"].is_null()) {
      const auto& v = j["validation"];
      ValidationRecord rec;
      rec.precision = v.at("precision").get<long>();
      rec.seed = v.at("seed").get<std::uint64_t>();
      rec.tolerance = v.at("tolerance").get<double>();
      rec.digest = v.at("digest").get<std::string>();
      for (const auto& c : v.at("components")) {
        ComponentValidation cv;
        cv.k = c.at("k").get<int>();
        cv.samples = c.at("samples").get<long>();
        cv.max_residual = c.at("max_residual").get<double>();
        cv.mean_residual = c.at("mean_residual").get<double>();
        cv.relation_residual = c.value("relation_residual", 0.0);
        cv.passed = c.at("passed").get<bool>();
        rec.components.push_back(cv);
      }
      cfg.validation = std::move(rec);
    }
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed config: ") + e.what());
  }
}

std::string serialize_config(const EmbeddingConfig& cfg) {
  nlohmann::json j;
  j["schema"] = "hecke-embedding-config/1";
  j["id"] = cfg.id;
  j["triangles"] = nlohmann::json::array();
  for (int k : cfg.components()) j["triangles"].push_back(triangle_json(*cfg.find(k)));
  if (cfg.validation) {
    const auto& v = *cfg.validation;
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : v.components)
      comps.push_back({{"k", c.k},
                       {"samples", c.samples},
                       {"max_residual", c.max_residual},
                       {"mean_residual", c.mean_residual},
                       {"relation_residual", c.relation_residual},
                       {"passed", c.passed}});
    j["validation"] = {{"precision", v.precision},
                       {"seed", v.seed},
                       {"tolerance", v.tolerance},
                       {"digest", v.digest},
                       {"components", comps}};
  } else {
    j["validation"] = nullptr;
  }
  return j.dump(2) + "\n";
}

EmbeddingConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void save_config(const EmbeddingConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config " + path.string());
  out << serialize_config(cfg);
}

ComponentMaps::ComponentMaps(EmbeddingConfig cfg, PrecisionContext ctx, bool waive_validation)
    : cfg_(std::move(cfg)), ctx_(std::move(ctx)) {
  if (!waive_validation && !cfg_.validated())
    throw UnvalidatedConfig("embedding config '" + cfg_.id + "' has not passed validation");
  for (const auto& t : cfg_.triangles) tris_.emplace(t.k, std::make_unique<SchwarzTriangle>(t, ctx_));
}

const SchwarzTriangle& ComponentMaps::triangle(int k) const {
  const auto it = tris_.find(k);
  if (it == tris_.end()) throw std::out_of_range("no triangle configured for k=" + std::to_string(k));
  return *it->second;
}

Complex ComponentMaps::operator()(int k, const Complex& z) const {
  if (k == 1) return z;
  return via_triangles(k, z);
}

Complex ComponentMaps::via_triangles(int k, const Complex& z) const {
  const SchwarzTriangle& t1 = triangle(1);
  const SchwarzTriangle& tk = triangle(k);
  const Reduction red = reduce_to_fundamental(t1, z);
  const Precision prec = ctx_.precision;
  const Real near = ldexp(Real(1L, 64), -static_cast<long>(prec) * 7 / 8);
  Complex image(prec);
  bool at_vertex = false;
  for (int i = 0; i < 3; ++i) {
    if (abs(red.z0 - t1.vertices()[i]) < near * (abs(red.z0) + 1L)) {
      image = tk.vertices()[i];
      at_vertex = true;
      break;
    }
  }
  if (!at_vertex) image = tk.map(t1.inverse_point(red.z0));
  return unreduce(tk, image, red.word).with_precision(prec);
}

Real b_equation_residual(const ComponentMaps& maps, int k, const Complex& z) {
  const IntegralMatrix b = generator_b();
  const Complex bz = apply_embedded(b, 1, z);
  const Complex lhs = maps.via_triangles(k, bz);
  const Complex rhs = apply_embedded(b, k, maps.via_triangles(k, z));
  return abs(lhs - rhs);
}

Real relation_residual(const SchwarzTriangle& tk, const Complex& zeta) {
  // Edge pairs meeting at v0, v1, v_inf and the orders of the rotations of T_1.
  static constexpr std::array<std::array<int, 3>, 3> kRelations{{{0, 2, 14}, {0, 1, 21}, {1, 2, 42}}};
  Real worst(tk.precision());
  for (const auto& [e1, e2, order] : kRelations) {
    Complex z = zeta;
    for (int i = 0; i < order; ++i) z = tk.reflect(e1, tk.reflect(e2, z));
    worst = max(worst, abs(z - zeta));
  }
  return worst;
}

EmbeddingConfig validate_config(const EmbeddingConfig& cfg, const PrecisionContext& ctx, long samples,
                                std::uint64_t seed, double tolerance) {
  if (samples < 1) throw std::invalid_argument("validation needs at least one sample");
  const ComponentMaps maps(cfg, ctx, true);
  ValidationRecord rec;
  rec.precision = ctx.precision;
  rec.seed = seed;
  rec.tolerance = tolerance;
  rec.digest = cfg.digest();
  for (int k : cfg.components()) {
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(k)));
    std::uniform_real_distribution<double> xs(-1.0, 1.0);
    std::uniform_real_distribution<double> ys(0.25, 1.75);
    ComponentValidation cv;
    cv.k = k;
    cv.samples = samples;
    double total = 0;
    for (long i = 0; i < samples; ++i) {
      const Complex z(xs(rng), ys(rng), ctx.precision);
      const double r = b_equation_residual(maps, k, z).to_double();
      cv.max_residual = std::max(cv.max_residual, r);
      total += r;
      const double rel = relation_residual(maps.triangle(k), maps.via_triangles(k, z)).to_double();
      cv.relation_residual = std::max(cv.relation_residual, rel);
    }
    cv.mean_residual = total / static_cast<double>(samples);
    cv.passed = cv.max_residual < tolerance && cv.relation_residual < tolerance;
    rec.components.push_back(cv);
  }
  EmbeddingConfig out = cfg;
  out.validation = std::move(rec);
  return out;
}

}  // namespace hecke
