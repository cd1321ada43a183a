#include "currents/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "currents/errors.hpp"

namespace currents {

void Isometry::renormalize() {
  double dt = det();
  if (dt <= 0)
    raise(ErrorKind::Internal, "isometry determinant became non-positive");
  double s = 1.0 / std::sqrt(dt);
  a *= s;
  b *= s;
  c *= s;
  d *= s;
}

std::complex<double> Isometry::apply(std::complex<double> z) const {
  return (a * z + b) / (c * z + d);
}

double Isometry::apply_boundary(double x) const {
  if (std::isinf(x)) {
    if (c == 0) return kBoundaryInfinity;
    return a / c;
  }
  double den = c * x + d;
  if (den == 0) return kBoundaryInfinity;
  return (a * x + b) / den;
}

Isometry operator*(const Isometry& m, const Isometry& n) {
  Isometry r{m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
             m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
  r.renormalize();
  return r;
}

bool is_plus_minus_identity(const Isometry& m, double tol) {
  return matrices_close(m, Isometry::identity(), tol);
}

double translation_length(const Isometry& m, double tol) {
  double t = std::abs(m.trace());
  if (t <= 2 + tol)
    raise(ErrorKind::NotHyperbolic,
          "isometry is not hyperbolic (|trace| = " + std::to_string(t) + ")");
  return 2 * std::acosh(t / 2);
}

std::pair<double, double> axis_endpoints(const Isometry& m, double tol) {
  double tr = m.trace();
  if (std::abs(tr) <= 2 + tol)
    raise(ErrorKind::NotHyperbolic, "no axis: |trace| <= 2");
  double scale = std::max({std::abs(m.a), std::abs(m.b), std::abs(m.c),
                           std::abs(m.d)});
  if (std::abs(m.c) < 1e-14 * scale) {
    // Fixed points are infinity and b/(d-a).
    double other = m.b / (m.d - m.a);
    bool inf_attracting = std::abs(m.a) > std::abs(m.d);
    return inf_attracting ? std::make_pair(other, kBoundaryInfinity)
                          : std::make_pair(kBoundaryInfinity, other);
  }
  double disc = std::sqrt(tr * tr - 4);
  // Eigenvalue of largest modulus, computed without cancellation.
  double lam_big = (tr >= 0) ? (tr + disc) / 2 : (tr - disc) / 2;
  double lam_small = 1.0 / lam_big;
  double attracting = (lam_big - m.d) / m.c;
  double repelling = (lam_small - m.d) / m.c;
  return {repelling, attracting};
}

double hyperbolic_distance(std::complex<double> z, std::complex<double> w) {
  double n = std::norm(z - w);
  double arg = 1 + n / (2 * z.imag() * w.imag());
  return std::acosh(std::max(1.0, arg));
}

namespace {

// Boundary point in projective coordinates (x = p/q, infinity = (1,0)).
struct BPt {
  double p, q;
};

BPt bpt(double x) {
  if (std::isinf(x)) return {1, 0};
  return {x, 1};
}

double wedge(const BPt& u, const BPt& v) { return u.p * v.q - u.q * v.p; }

// Determinant-one matrix sending u -> 0 and v -> infinity.
Isometry axis_to_vertical(double u, double v) {
  if (std::isinf(u) && std::isinf(v))
    raise(ErrorKind::Internal, "degenerate axis endpoints");
  Isometry m;
  if (std::isinf(v)) {
    m = {1, -u, 0, 1};
  } else if (std::isinf(u)) {
    m = {0, 1, -1, v};
  } else if (u < v) {
    double s = 1.0 / std::sqrt(v - u);
    m = {s, -u * s, -s, v * s};
  } else {
    double s = 1.0 / std::sqrt(u - v);
    m = {s, -u * s, s, -v * s};
  }
  return m;
}

}  // namespace

double inversive_product(double a, double b, double c, double d) {
  BPt A = bpt(a), B = bpt(b), C = bpt(c), D = bpt(d);
  double num = std::abs(wedge(A, C) * wedge(B, D) + wedge(A, D) * wedge(B, C));
  double den = std::abs(wedge(A, B)) * std::abs(wedge(C, D));
  if (den == 0) raise(ErrorKind::DegenerateLinking, "coincident axis endpoints");
  return num / den;
}

double distance_to_geodesic(std::complex<double> z, double u, double v) {
  Isometry m = axis_to_vertical(u, v);
  std::complex<double> w = m.apply(z);
  return std::asinh(std::abs(w.real()) / w.imag());
}

Isometry frame_for_axis(double u, double v, std::complex<double> anchor) {
  Isometry m0 = axis_to_vertical(u, v);
  std::complex<double> za = m0.apply(anchor);
  double y0 = std::abs(za);
  Isometry scale = Isometry::translation_along_vertical(-std::log(y0));
  return scale * m0;
}

Isometry HyperbolicStructure::holonomy(const GroupWord& w) const {
  Isometry m = Isometry::identity();
  for (Letter l : w.letters) {
    const Isometry& g = generator(std::abs(static_cast<int>(l)));
    m = (l > 0) ? m * g : m * g.inverse();
  }
  return m;
}

double HyperbolicStructure::length_of(const GroupWord& w) const {
  return translation_length(holonomy(w), tolerance);
}

std::vector<ConjugacyClass> standard_pants_classes(
    const SurfacePresentation& p) {
  if (p.genus != 2)
    raise(ErrorKind::UnsupportedGenus,
          "standard pants decomposition is fixed for genus 2");
  return {class_of("x1", p), class_of("x2", p),
          class_of("x1 y1 X1 Y1", p)};
}

namespace {

// Ideal endpoints of the geodesic through interior points p, q, ordered so
// the second endpoint lies on q's side.
std::pair<double, double> geodesic_endpoints_through(std::complex<double> p,
                                                     std::complex<double> q) {
  double dx = q.real() - p.real();
  double scale = std::max(std::abs(p.real()), std::abs(q.real())) + 1.0;
  if (std::abs(dx) < 1e-13 * scale) {
    // Vertical line.
    return (q.imag() > p.imag())
               ? std::make_pair(p.real(), kBoundaryInfinity)
               : std::make_pair(kBoundaryInfinity, p.real());
  }
  double m = (std::norm(q) - std::norm(p)) / (2 * dx);
  double r = std::abs(p - m);
  return (dx > 0) ? std::make_pair(m - r, m + r)
                  : std::make_pair(m + r, m - r);
}

// Frame taking p to i and q to a point above i on the imaginary axis.
Isometry frame_through_points(std::complex<double> p, std::complex<double> q) {
  auto [u, v] = geodesic_endpoints_through(p, q);
  return frame_for_axis(u, v, p);
}

// The unique orientation-preserving isometry with p1 -> p2, q1 -> q2
// (requires d(p1,q1) = d(p2,q2)).
Isometry isometry_taking(std::complex<double> p1, std::complex<double> q1,
                         std::complex<double> p2, std::complex<double> q2) {
  Isometry f1 = frame_through_points(p1, q1);
  Isometry f2 = frame_through_points(p2, q2);
  return f2.inverse() * f1;
}

}  // namespace

HyperbolicStructure regular_polygon_structure(int genus) {
  SurfacePresentation pres(genus);
  const int n = 4 * genus;
  const double alpha = M_PI / n;
  // Circumradius R of the regular n-gon with vertex angle 2pi/n:
  // cosh R = cot(alpha)^2 with alpha = pi/n.
  double cosh_rv = 1.0 / std::pow(std::tan(alpha), 2);
  double r_disk = std::sqrt((cosh_rv - 1) / (cosh_rv + 1));

  // Vertices in the disk, then mapped to the upper half-plane by the Cayley
  // transform w -> i(1+w)/(1-w); the disk center goes to i.
  std::vector<std::complex<double>> verts;
  for (int k = 0; k < n; ++k) {
    double th = 2 * M_PI * k / n;
    std::complex<double> w = r_disk * std::complex<double>(std::cos(th),
                                                           std::sin(th));
    verts.push_back(std::complex<double>(0, 1) * (1.0 + w) / (1.0 - w));
  }

  HyperbolicStructure s(pres);
  s.gen_images.resize(static_cast<std::size_t>(2 * genus));
  // Generator g labels the side where g(F) is the neighboring tile; it maps
  // the side labeled g^{-1} onto it with the gluing reversal
  // (V_q, V_{q+1}) -> (V_{p+1}, V_p).
  for (int id = 1; id <= 2 * genus; ++id) {
    int p = -1, q = -1;
    for (int k = 0; k < n; ++k) {
      if (pres.relator.letters[static_cast<std::size_t>(k)] == id) p = k;
      if (pres.relator.letters[static_cast<std::size_t>(k)] == -id) q = k;
    }
    Isometry g = isometry_taking(verts[static_cast<std::size_t>(q)],
                                 verts[static_cast<std::size_t>((q + 1) % n)],
                                 verts[static_cast<std::size_t>((p + 1) % n)],
                                 verts[static_cast<std::size_t>(p)]);
    s.gen_images[static_cast<std::size_t>(id - 1)] = g;
  }
  std::ostringstream lbl;
  lbl << "regular:g=" << genus;
  s.label = lbl.str();

  Isometry rel = s.holonomy(pres.relator);
  if (!is_plus_minus_identity(rel, 1e-8))
    raise(ErrorKind::Internal, "polygon side pairing violates the relator");
  return s;
}

namespace {

struct TorusPiece {
  Isometry A, B;
};

// One-holed torus group with handle curve length la (axis on the imaginary
// axis), twist tau along it, and boundary length lb. The commutator [A,B]
// has trace -2 cosh(lb/2) for every tau.
TorusPiece one_holed_torus(double la, double tau, double lb) {
  double cosh_s =
      (2 * std::cosh(lb / 2) + 1 + std::cosh(la)) / (std::cosh(la) - 1);
  double s = std::acosh(cosh_s);
  Isometry A = Isometry::translation_along_vertical(la);
  double ch = std::cosh(s / 2), sh = std::sinh(s / 2);
  Isometry S{ch, sh, sh, ch};
  Isometry B = Isometry::translation_along_vertical(tau) * S.inverse();
  return {A, B};
}

Isometry commutator(const Isometry& a, const Isometry& b) {
  return a * b * a.inverse() * b.inverse();
}

}  // namespace

HyperbolicStructure fn_structure(const FNCoordinates& coords) {
  for (double l : coords.lengths)
    if (!(l > 0))
      raise(ErrorKind::DegenerateCoordinates,
            "pants curve lengths must be positive");
  SurfacePresentation pres(2);

  const double l1 = coords.lengths[0], l2 = coords.lengths[1],
               l3 = coords.lengths[2];
  TorusPiece t1 = one_holed_torus(l1, coords.twists[0], l3);
  TorusPiece t2 = one_holed_torus(l2, coords.twists[1], l3);

  Isometry k1 = commutator(t1.A, t1.B);
  Isometry k2 = commutator(t2.A, t2.B);

  // Conjugate the second piece so that [x2,y2] = [x1,y1]^{-1}; the relator
  // then holds by construction. The twist about the separating curve is a
  // translation along its axis inserted into the conjugator.
  auto [r1, a1] = axis_endpoints(k1.inverse(), 1e-12);
  auto [r2, a2] = axis_endpoints(k2, 1e-12);
  std::complex<double> base = HyperbolicStructure::basepoint();
  Isometry f1 = frame_for_axis(r1, a1, base);
  Isometry f2 = frame_for_axis(r2, a2, base);
  Isometry g = f1.inverse() *
               Isometry::translation_along_vertical(coords.twists[2]) * f2;

  HyperbolicStructure s(pres);
  s.gen_images.resize(4);
  s.gen_images[0] = t1.A;
  s.gen_images[1] = t1.B;
  s.gen_images[2] = g * t2.A * g.inverse();
  s.gen_images[3] = g * t2.B * g.inverse();

  std::ostringstream lbl;
  lbl.precision(12);
  lbl << "fn:l=" << l1 << ',' << l2 << ',' << l3 << ";t=" << coords.twists[0]
      << ',' << coords.twists[1] << ',' << coords.twists[2];
  s.label = lbl.str();

  Isometry rel = s.holonomy(pres.relator);
  if (!is_plus_minus_identity(rel, 1e-8))
    raise(ErrorKind::Internal, "fn gluing violates the relator");
  return s;
}

ValidationReport validate_structure(const HyperbolicStructure& s, int depth) {
  if (depth < 1) raise(ErrorKind::SchemaError, "depth must be >= 1");
  ValidationReport rep;

  Isometry rel = s.holonomy(s.presentation.relator);
  auto dist_to_id = [](const Isometry& m) {
    double d1 = std::max({std::abs(m.a - 1), std::abs(m.b), std::abs(m.c),
                          std::abs(m.d - 1)});
    double d2 = std::max({std::abs(m.a + 1), std::abs(m.b), std::abs(m.c),
                          std::abs(m.d + 1)});
    return std::min(d1, d2);
  };
  rep.relator_defect = dist_to_id(rel);
  if (rep.relator_defect > s.tolerance * 10) {
    rep.ok = false;
    rep.failures.push_back("relator image is not +-identity (defect " +
                           std::to_string(rep.relator_defect) + ")");
  }

  double min_margin = std::numeric_limits<double>::infinity();
  auto classes = enumerate_conjugacy_classes(s.presentation, depth);
  for (const auto& c : classes) {
    double t = std::abs(s.holonomy(c.canonical).trace());
    min_margin = std::min(min_margin, t - 2);
    if (t <= 2 + s.tolerance) {
      rep.ok = false;
      rep.failures.push_back("non-hyperbolic class " +
                             format_word(c.canonical) + " (|trace| = " +
                             std::to_string(t) + ")");
    }
  }
  rep.min_trace_margin = min_margin;
  return rep;
}

}  // namespace currents
