// Geometric cube classifiers: flatness numbers, half-space and two-plane
// approximation tests, the level-set topology test with its compatibility
// condition, cube types, the augmented skeleton set, and local symmetry.
#pragma once

#include "ura/corona.hpp"
#include "ura/whitney.hpp"

namespace ura {

struct PlaneFit {
  Vec normal;          // unit
  double offset = 0;   // plane {normal . x = offset}
  double deviation = 0;
};

// b-beta-infinity: r^-1 inf over the normal grid of the sup distance of the
// set inside B to the best plane with that normal (an upper bound on the
// true infimum, angular resolution recorded by the caller's grid choice).
struct BBetaReport {
  double value = 0;
  PlaneFit plane;
};
BBetaReport bbeta_infty(const BoundarySet& set, const Vec& center, double radius, int search_grid);

struct WhsaReport {
  bool pass = false;
  bool clipped = false;  // the eps^-2 ball exceeded the bounding box
  PlaneFit plane;
};
// eps-weak half-space approximation on B(x_Q, eps^-2 l(Q)).
WhsaReport whsa_test(const Lattice& lat, int cube_id, double eps, double K0, int search_grid);

struct BatppReport {
  bool pass = false;
  bool clipped = false;
  PlaneFit plane1, plane2;  // parallel pair (may coincide)
};
// bilateral eps-approximation by two parallel planes on B(x_Q, 10 l(Q)).
BatppReport batpp_test(const Lattice& lat, int cube_id, double eps, int search_grid);

// ---------------------------------------------------------------------------
// Level-set topology test

struct WtsParams {
  double A0 = 40;     // region confinement factor (times B_Q)
  double tau1 = 1e-3;  // level threshold; must be <= 1/10
  double p = 0.01;    // corkscrew radius factor
  double t = 0.2;     // corkscrew scale floor
  double tau = 0.1;   // coverage margin
  double alpha = 0;   // curve clearance; 0 picks sqrt(tau1)/4
};

struct LevelSetRegions {
  int cube_id = -1;
  double tau1 = 0;
  std::vector<long> U1, U2;    // components selected at threshold sqrt(tau1)
  std::vector<long> U1p, U2p;  // primed regions at threshold tau1
};

struct WtsReport {
  bool pass = false;
  bool cond_cover = false, cond_disjoint = false, cond_corkscrew = false, cond_curve = false;
  LevelSetRegions regions;
};

WtsReport wts_test(const Lattice& lat, int cube_id, const Domain& domain, const GridField& u,
                   const GridField& u_star, const WtsParams& params);

// Compatibility over a family of region-carrying cubes:
// U_i(P) cap 10 B_Q subset U_i'(Q) whenever 2^-a0 l(Q) <= l(P) <= l(Q).
struct CompatibilityViolation {
  int cube_P = -1, cube_Q = -1;
  int region = 0;  // 1 or 2
  long node = -1;
};
std::vector<CompatibilityViolation> compatibility_check(
    const Lattice& lat, const std::vector<LevelSetRegions>& family, int a0);

// ---------------------------------------------------------------------------
// Cube types

enum class CubeType { Type0 = 0, Type1 = 1, Type2 = 2, Type3 = 3 };

struct TypeParams {
  double kappa0 = 0.1;
  double theta0 = 0.05;
  double tau0 = 0.05;
  double eps0 = 0.1;
  int M_eff = 4;          // rescaled exponent of the oscillation threshold
  double alpha = 0.5;     // Hoelder exponent entering the ball radii
  double chain_eps = 0.25;  // chained-region dilation parameter
  double k0 = 1.0 / 64, K0 = 2.0, tau_whitney = 0.2;
};

struct TypeReport {
  CubeType type = CubeType::Type0;
  int type0_reason = 0;     // 1: tree boundary, 2: coefficient lipschitz
  bool triple_nonempty = false;
  double oscillation = -1;  // gradient oscillation over the chained region
  double threshold = 0;     // eps0^M_eff
  long witness = -1;        // Y_Q cell
};

TypeReport type_classify(const Lattice& lat, int cube_id,
                         const std::function<bool(int)>& in_tree, const CoefficientField& A,
                         const Domain& domain, const GridField& u, const GridField& u_star,
                         const WhitneyDecomposition& wd, const TypeParams& params);

// ---------------------------------------------------------------------------
// Augmented set and local symmetry

// E cup the rasterized boundaries of dyadic cubes of side in [b l(Q), 2b l(Q))
// meeting 10 B_Q, for each bad cube Q.
BoundarySet augmented_set(const BoundarySet& set, const Lattice& lat,
                          const std::vector<int>& bad_cubes, double b);

struct LocalSymmetryReport {
  double worst = 0;       // max dist(2x - y, E) / ell over tested pairs
  bool pass = false;
  double clipped_fraction = 0;  // reflected points that left the bounding box
  Vec worst_x, worst_y;
};
// Reflection closure at scale ell: pairs x, y from the set inside
// B(center, radius_2B); at least min_pairs pairs, exhaustive when cheap.
LocalSymmetryReport local_symmetry_test(const BoundarySet& set, const Vec& center,
                                        double radius_2B, double ell, double kappa, int min_pairs,
                                        std::uint64_t seed);

}  // namespace ura
