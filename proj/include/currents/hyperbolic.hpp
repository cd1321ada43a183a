#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "currents/words.hpp"

namespace currents {

// Orientation-preserving isometry of the upper half-plane as a real 2x2
// matrix of determinant 1, identified with its negative.
struct Isometry {
  double a = 1, b = 0, c = 0, d = 1;

  static Isometry identity() { return {}; }
  static Isometry translation_along_vertical(double len) {
    double e = std::exp(len / 2);
    return {e, 0, 0, 1 / e};
  }

  double trace() const { return a + d; }
  double det() const { return a * d - b * c; }

  Isometry inverse() const { return {d, -b, -c, a}; }

  // Renormalizes the determinant to 1 (matrices drift under long products).
  void renormalize();

  // Moebius action on interior points.
  std::complex<double> apply(std::complex<double> z) const;

  // Moebius action on boundary points (real axis plus infinity).
  double apply_boundary(double x) const;

  friend Isometry operator*(const Isometry& m, const Isometry& n);
};

constexpr double kBoundaryInfinity = std::numeric_limits<double>::infinity();

inline bool matrices_close(const Isometry& m, const Isometry& n, double tol) {
  auto diff = [](const Isometry& u, const Isometry& v) {
    return std::max(std::max(std::abs(u.a - v.a), std::abs(u.b - v.b)),
                    std::max(std::abs(u.c - v.c), std::abs(u.d - v.d)));
  };
  Isometry neg{-n.a, -n.b, -n.c, -n.d};
  return diff(m, n) <= tol || diff(m, neg) <= tol;
}

bool is_plus_minus_identity(const Isometry& m, double tol);

// 2*arccosh(|tr|/2). Throws NotHyperbolic if |tr| <= 2 + tol.
double translation_length(const Isometry& m, double tol = 1e-9);

// Fixed points on the boundary, ordered (repelling, attracting).
std::pair<double, double> axis_endpoints(const Isometry& m, double tol = 1e-9);

// Hyperbolic distance between interior points.
double hyperbolic_distance(std::complex<double> z, std::complex<double> w);

// Distance from z to the geodesic with the given ideal endpoints.
double distance_to_geodesic(std::complex<double> z, double u, double v);

// Inversive product of two geodesics given by ideal endpoint pairs:
// < 1 when they cross (value = cos of the crossing angle), = 1 when
// asymptotic, > 1 when disjoint (value = cosh of the distance).
double inversive_product(double a, double b, double c, double d);

// The isometry sending the geodesic (u, v) to (0, infinity) and the foot of
// the point `anchor` on that geodesic to i.
Isometry frame_for_axis(double u, double v, std::complex<double> anchor);

// Point X in Teichmueller space as a holonomy representation.
struct HyperbolicStructure {
  SurfacePresentation presentation;
  std::vector<Isometry> gen_images;  // indexed by generator id - 1
  double tolerance = 1e-9;
  std::string label;

  explicit HyperbolicStructure(SurfacePresentation p)
      : presentation(std::move(p)) {}

  const Isometry& generator(int id) const {
    return gen_images[static_cast<std::size_t>(id - 1)];
  }

  Isometry holonomy(const GroupWord& w) const;
  double length_of(const GroupWord& w) const;
  double length_of(const ConjugacyClass& c) const {
    return length_of(c.canonical);
  }

  // Basepoint for all distance/enumeration heuristics.
  static std::complex<double> basepoint() { return {0.0, 1.0}; }
};

struct FNCoordinates {
  // Pants curves are, in order: x1, x2, and the separating commutator curve.
  std::array<double, 3> lengths{};
  std::array<double, 3> twists{};
};

std::vector<ConjugacyClass> standard_pants_classes(
    const SurfacePresentation& p);

// Holonomy of the regular hyperbolic 4g-gon with vertex angle 2pi/4g and the
// side pairing realizing the commutator relator.
HyperbolicStructure regular_polygon_structure(int genus);

// Genus-2 structure from Fenchel-Nielsen coordinates on the standard pants
// decomposition {x1, x2, [x1,y1]}. Twists are in length units; positive
// twist translates toward the attracting end of the pants curve axis.
HyperbolicStructure fn_structure(const FNCoordinates& coords);

struct ValidationReport {
  bool ok = true;
  double relator_defect = 0;    // distance of relator image from +-identity
  double min_trace_margin = 0;  // min over checked classes of |tr| - 2
  std::vector<std::string> failures;
};

// Checks relator image and hyperbolicity of every class of word length
// <= depth. Failures are reported, not thrown.
ValidationReport validate_structure(const HyperbolicStructure& s, int depth);

}  // namespace currents
