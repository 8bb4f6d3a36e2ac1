// Dyadic cube tree over a boundary set: ambient dyadic boxes anchored at the
// bounding box, intersected with the occupied cells.  Per-generation families
// partition the set exactly; nesting and measure additivity are structural.
#pragma once

#include "ura/geometry.hpp"

namespace ura {

struct DyadicCube {
  int id = -1;
  int gen = 0;                  // generation j; side = root_side / 2^j
  std::array<int, 3> idx{};     // dyadic index within the generation
  std::vector<int> members;     // ordinals into set.cells
  double mu = 0;                // measure, exact sum of member weights
  double side = 0;              // side length l(Q)
  Vec center;                   // z_Q, a member cell center
  long center_cell = -1;
  double center_gap = 0;        // dist(z_Q, supp mu \ Q), capped at side
  bool center_flagged = false;  // gap below side/8 at this resolution
  double c1 = 0.125;            // ball constant for B_Q, reduced if needed
  int parent = -1;
  std::vector<int> children;

  double ball_radius() const { return c1 * side; }
};

struct Lattice {
  BoundarySet set;  // owned copy; cubes index into set.cells
  std::vector<DyadicCube> cubes;
  std::vector<std::vector<int>> generations;  // cube ids per generation
  double root_side = 0;
  Vec anchor;

  const DyadicCube& cube(int id) const { return cubes[id]; }
  int root() const { return generations.at(0).at(0); }
  int depth() const { return static_cast<int>(generations.size()) - 1; }

  // Cube measure of an arbitrary cell-ordinal subset is not needed; these
  // helpers cover the dilations the density ratios use.
  bool is_ancestor(int a, int q) const;  // a == q counts as ancestor

  void save_csv(const std::string& path) const;
  void save_binary(const std::string& path) const;
};

// Build `depth`+1 generations (0..depth).  Throws DepthExceedsResolution when
// the finest cubes would drop below 4 raster cells per side.
Lattice build_lattice(const BoundarySet& set, int depth);

// mu-mass of the two collars of width tau * l(Q) around the relative boundary
// of Q: inner {x in Q : dist(x, supp mu \ Q) <= tau l(Q)} plus outer
// {x not in Q : dist(x, Q) <= tau l(Q)}.
double small_boundary_mass(const Lattice& lat, int cube_id, double tau);

// lambda-dilation: set cells within (lambda - 1) l(Q) of Q's cells.
// lambda = 1 returns Q's own cells.  Returned as ordinals into set.cells.
std::vector<int> dilate(const Lattice& lat, int cube_id, double lambda);

// Sum of weights over cell ordinals.
double measure_of(const BoundarySet& set, const std::vector<int>& ordinals);

}  // namespace ura
