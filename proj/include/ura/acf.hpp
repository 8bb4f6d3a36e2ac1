// The two-phase monotonicity functional and its supporting cast: coefficient
// oscillation moduli, the product functional J and the ratio K_r, Dini-type
// integrals, spherical eigenvalue problems with their characteristic
// constants, and the growth/energy diagnostics built from them.
#pragma once

#include "ura/solver.hpp"

namespace ura {

// ---------------------------------------------------------------------------
// Disjointly supported nonnegative pair with a common zero.

struct SubharmonicPair {
  GridField u1, u2;
  Vec x;  // common zero

  // max nodewise product overlap, in units of |u1| |u2| scales (0 when the
  // supports are cleanly separated)
  double overlap() const;
};

SubharmonicPair make_halfplane_pair(const Grid& grid, int axis = 1);
// Homogeneous profiles rho^gamma sin(gamma (phi - base)) on complementary
// angular sectors (ambient 2); gamma_i = pi / opening_i.
SubharmonicPair make_cone_pair(const Grid& grid, double base1, double opening1, double base2,
                               double opening2);

// ---------------------------------------------------------------------------
// Oscillation modulus

struct OscillationModulus {
  std::vector<double> radii;   // ascending
  std::vector<double> values;  // nondecreasing

  double at(double r) const;  // right-continuous step lookup
  double integral_dr_over_r(double r1, double r2) const;  // trapezoid of w/r
};

// w(x,r) = sup_{B(x,r)} |A - A(x)| + sup |y-x| (|b|+|e|) + sup |y-x|^2 |d|.
// Requires A(x) = Id (apply a normalizing pullback first).
OscillationModulus oscillation_w(const CoefficientField& A, const Vec& x,
                                 const std::vector<double>& radii);

// ---------------------------------------------------------------------------
// The product functional

// (1/r^2 Int_B |grad u1|^2 / |y-x|^{n-1}) * (same for u2); singular weight
// integrated in polar form over the cell containing x.
double acf_J(const SubharmonicPair& pair, double r);

// max_i ( Int u_i^2/|y-x|^{n+1} )^{1/2} ( Int |grad u_i|^2/|y-x|^{n-1} )^{-1/2}
double acf_Kr(const SubharmonicPair& pair, double r);

struct DiniReport {
  double value = 0;
  bool diverged = false;
};
// C_{w0} = Int_0^{1/2} (w0(t) log(1/t))^2 dt/t by dyadic-refined quadrature.
DiniReport dini_constant(const std::function<double(double)>& w0);

struct MonotonicityReport {
  double lhs = 0;       // J(r1)
  double rhs = 0;       // J(r2) * exp(c Int w/r)
  double integral = 0;  // Int_{r1}^{r2} w/r dr
  bool pass = false;
};
// J(r1) <= J(r2) exp(c Int_{r1}^{r2} w(x,r)/r dr), both sides evaluated
// independently on the grid.
MonotonicityReport monotonicity_check(const SubharmonicPair& pair, const OscillationModulus& w,
                                      double r1, double r2, double c, double tol = 0.02);

// ---------------------------------------------------------------------------
// Spherical domains and characteristic constants

struct SphereMesh {
  std::vector<Vec> verts;                  // on the unit sphere
  std::vector<std::array<int, 3>> tris;
  std::vector<double> vertex_area;         // lumped mass
  double tri_area(int t) const;
};
// Octahedron-based subdivision; level k gives 8 * 4^k triangles and an exact
// equator ring.
SphereMesh make_octasphere(int level);

struct SphericalDomain {
  int ambient_dim = 2;
  // ambient 2: open arcs (start, end), end > start, on the unit circle
  std::vector<std::pair<double, double>> arcs;
  // ambient 3: vertex mask over a shared octasphere mesh
  std::shared_ptr<const SphereMesh> mesh;
  std::vector<std::uint8_t> inside;

  double measure() const;  // total arc length / spherical area
};

SphericalDomain arc_domain(double start, double end);
SphericalDomain cap_domain(int mesh_level, const Vec& axis, double polar_angle);
SphericalDomain mask_domain(std::shared_ptr<const SphereMesh> mesh,
                            const std::function<bool(const Vec&)>& pred);

struct CharacteristicConstant {
  double lambda = 0;
  double gamma = 0;
};
// Principal Dirichlet eigenvalue of the spherical Laplacian and the positive
// root of gamma (gamma + n - 1) = lambda.  Arcs are handled analytically,
// triangulated masks by a cotan Laplacian with inverse iteration.
CharacteristicConstant characteristic_constant(const SphericalDomain& sigma);

struct TwoPhaseReport {
  double gamma1 = 0, gamma2 = 0;
  double sum = 0;             // gamma1 + gamma2 (>= 2 for disjoint domains)
  double defect = 0;          // hemisphere area-fraction deviation of domain 1
  double defect_ratio = 0;    // (sum - 2) / defect^2 when defect > 0
};
TwoPhaseReport friedland_hayman_check(const SphericalDomain& s1, const SphericalDomain& s2);

// ---------------------------------------------------------------------------
// Energy and growth diagnostics

struct GradientEnergyReport {
  double energy = 0;  // Int_B(x,r) |grad u|^2 / |y-x|^{n-1}
  double sup2 = 0;    // sup over B(x,2r) of |u|, squared
  double ratio = 0;
  double worst_residual = 0;  // most positive (-div A grad u) on the support
};
// Subharmonicity is verified through the operator stencil residual on the
// support interior before the energy ratio is formed.
GradientEnergyReport gradient_energy_bound(const GridField& u, const CoefficientField& A,
                                           const Vec& x, double r);

struct GrowthReport {
  double rho = 0;      // fitted exponent of J
  double stderr_rho = 0;
  double worst_annulus_fraction = 1.0;
  double w_max = 0;    // modulus at the outer radius
  bool pass = false;
};
// Fits log J against log r over [r1, r2]; requires the common zero set to
// fill volume fraction eta of every annulus A(x, r, M r) along the sweep.
GrowthReport growth_lemma_check(const SubharmonicPair& pair, const OscillationModulus& w,
                                double r1, double r2, double M, double eta, int radius_count = 17);

}  // namespace ura
