// Boundary-behaviour functionals of grid solutions: truncated cones, square
// function, non-tangential maximal function, Carleson energies, the
// piecewise-constant approximability construction, and the weighted
// second-derivative energy over sawtooth regions.
#pragma once

#include "ura/solver.hpp"
#include "ura/whitney.hpp"

namespace ura {

struct Cone {
  Vec vertex;
  double aperture = 2.0;  // alpha >= 2
  double s = 0;           // lower truncation in delta
  double t = std::numeric_limits<double>::infinity();  // upper truncation

  bool contains(const Domain& dom, long cell) const {
    if (!dom.interior(cell)) return false;
    double d = dom.dist[cell];
    if (!(d >= s && d < t)) return false;
    return dist(dom.grid.center(cell), vertex) < aperture * d;
  }
};

// Truncated square function S_alpha u(x) = (sum over the cone of
// |grad u|^2 delta^{1-n} h^dim)^{1/2}.
double square_function(const GridField& u, const Domain& domain, const Vec& x, double aperture,
                       double s, double t);

struct NontangentialMax {
  double value = 0;
  bool empty_cone = false;
};
NontangentialMax nontangential_max(const GridField& u, const Domain& domain, const Vec& x,
                                   double aperture, double s = 0,
                                   double t = std::numeric_limits<double>::infinity());

// r^-n Int_{B cap Omega} |grad u|^2 delta dx / sup|u|^2; zero for constants.
double carleson_energy(const GridField& u, const Domain& domain, const Vec& center, double radius,
                       int n);

// Node count times cell volume of the cone region used by the overlap checks.
double cone_region_volume(const Domain& domain, const Cone& cone);

// max over a family of boundary data of |S u|_p(mu) / |N u|_p(mu), boundary
// integrals as mu-weighted cell sums over every `stride`-th set cell.
struct SOverNReport {
  double max_ratio = 0;
  std::vector<double> ratios;
};
SOverNReport s_over_n_ratio(const DiscreteOperator& op, const Domain& domain,
                            const BoundarySet& set,
                            const std::vector<std::vector<double>>& data_family, double p,
                            double aperture, int stride = 1);

// Piecewise-constant candidate approximant: the per-Whitney-cube average of u.
struct ApproximabilityReport {
  GridField phi;
  double cost = 0;       // r^-n * sum of face jumps times face area
  double sup_error = 0;  // max |u - phi| over B cap Omega
  bool success = false;  // sup_error < epsilon
};
ApproximabilityReport epsilon_approximability_cost(const GridField& u, const Domain& domain,
                                                   const WhitneyDecomposition& wd,
                                                   const Vec& center, double radius, double eps,
                                                   int n);

// Int over the sawtooth node set of |grad^2 u_star|^2 u dy, divided by mu_S.
// Nodes whose second-difference stencil leaves the interior are skipped.
double second_derivative_carleson(const GridField& u_star, const GridField& u,
                                  const std::vector<long>& sawtooth, const Domain& domain,
                                  double mu_S);

}  // namespace ura
