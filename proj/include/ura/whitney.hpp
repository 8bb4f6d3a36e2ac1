// Whitney decomposition of the grid domain and the per-cube Whitney regions
// with their connected components, plus the chain-dilated enlargements and
// sawtooth node sets the classifiers consume.
#pragma once

#include "ura/lattice.hpp"

namespace ura {

struct WhitneyCube {
  std::array<int, 3> lo{};  // cell coordinates of the lower corner
  int size = 1;             // cells per side
  double side = 0;          // physical side length
  double dist_to_set = 0;   // dist(I, E), measured at cell centers

  double diam(int dim) const { return side * std::sqrt(static_cast<double>(dim)); }
};

struct WhitneyDecomposition {
  Grid grid;
  std::vector<WhitneyCube> cubes;
  std::vector<std::int32_t> cube_of_cell;  // -1 where uncovered

  Box cube_box(const WhitneyCube& c, double inflate = 1.0) const;
};

// Dyadic splitting with the 8/80 normalization; covers all interior cells
// with dist >= 16h.  Throws DomainTooThin when no such cell exists.
WhitneyDecomposition whitney_decompose(const Domain& domain);

struct WhitneyRegion {
  int cube_id = -1;            // lattice cube Q
  double k0 = 0, K0 = 0, tau = 0;
  std::vector<int> member_cubes;           // indices into decomposition.cubes
  std::vector<long> nodes;                 // grid cells of the union of I*
  std::vector<std::vector<long>> components;  // connected node sets (face adjacency)
  bool empty = false;
};

// W_Q = Whitney cubes with k0 l(Q) <= l(I) <= K0 l(Q) and dist(I,Q) <= K0 l(Q);
// the region is the union of the (1+tau)-enlarged cubes.
WhitneyRegion whitney_region(const Lattice& lat, int cube_id, const Domain& domain,
                             const WhitneyDecomposition& wd, double k0, double K0, double tau);

// Chain-dilated enlargement of a component: `rounds` sweeps, each adding the
// cells within delta(z)/2 of the current set, restricted to the band
// band_lo <= delta <= band_hi.  Approximates the chained region from above.
std::vector<long> chain_dilate(const Domain& domain, const std::vector<long>& seed, int rounds,
                               double band_lo, double band_hi);

// Union of the Whitney-region nodes over a family of lattice cubes.
std::vector<long> sawtooth_nodes(const Lattice& lat, const std::vector<int>& cube_ids,
                                 const Domain& domain, const WhitneyDecomposition& wd, double k0,
                                 double K0, double tau);

}  // namespace ura
