// Boundary-set fixtures and the domains they carve out of the grid:
// rasterized n-regular sets with per-cell surface weights, distance
// transforms, corkscrew points and Harnack chains.
#pragma once

#include <map>
#include <optional>
#include <unordered_map>

#include "ura/core.hpp"

namespace ura {

enum class BoundaryKind { hyperplane, lipschitz_graph, parallel_planes, four_corner_cantor, sphere };

BoundaryKind boundary_kind_from_string(const std::string& s);
std::string to_string(BoundaryKind k);

// Rasterized n-regular set E with surface measure mu carried on grid cells.
// n = ambient_dim - 1 throughout.
struct BoundarySet {
  int ambient_dim = 2;
  Grid grid;                 // raster grid; domains built from this set share it
  std::vector<long> cells;   // occupied cell ids, sorted ascending
  std::vector<double> weight;  // per-cell measure, units length^n
  Box bbox;
  std::string kind;
  double h = 0;

  int n() const { return ambient_dim - 1; }
  double total_measure() const;
  double diameter() const;  // diameter of the occupied cell-center cloud

  // Measure of E inside the closed ball B(x,r) (cell centers decide membership).
  double ball_measure(const Vec& x, double r) const;
  // Distance from p to the nearest occupied cell center.
  double dist_to_set(const Vec& p) const;
  long nearest_cell(const Vec& p) const;

  double weight_of(long cell) const;  // 0 when the cell is not occupied
  bool occupied(long cell) const;
  int ordinal_of(long cell) const;  // index into cells/weight, -1 if absent

  // Flat binary cell list (little-endian 64-bit: id, weight pairs) and CSV.
  void save_binary(const std::string& path) const;
  static BoundarySet load_binary(const std::string& path);
  void save_csv(const std::string& path) const;

  void rebuild_index();

 private:
  std::unordered_map<long, int> index_;
  // Coarse bucket grid over occupied cells for nearest-point queries.
  std::unordered_map<long, std::vector<int>> buckets_;
  double bucket_h_ = 0;
  std::array<int, 3> bucket_n_{1, 1, 1};
  long bucket_of(const Vec& p) const;
  friend struct BoundarySetTestAccess;
};

struct GeneratorParams {
  double slope = 0.3;        // lipschitz_graph: Lipschitz constant
  double wavelength = 0;     // lipschitz_graph: 0 = one period across the box
  double separation = 0.1;   // parallel_planes
  int depth = 3;             // four_corner_cantor
  double radius = 0.8;       // sphere
  Vec center;                // sphere center; hyperplane/graph anchor offset
  double offset = 0;         // hyperplane/planes: coordinate of the plane
  int axis = 1;              // normal axis for hyperplane/planes (y by default)
};

// Rasterize a fixture set onto a grid of spacing h over `box`.
// Throws ResolutionTooCoarse when h cannot resolve the generator's features.
BoundarySet generate_boundary(BoundaryKind kind, const GeneratorParams& params, const Box& box,
                              double h, int ambient_dim);

// Domain carved from the raster grid: cells are interior, boundary (set cells)
// or excluded.  dist is the exact Euclidean distance to the set's cell centers.
struct Domain {
  Grid grid;
  std::vector<std::uint8_t> state;  // values from CellState
  std::vector<double> dist;
  bool reflecting_walls = true;  // zero-flux box walls; otherwise absorbing

  enum CellState : std::uint8_t { Outside = 0, Interior = 1, Boundary = 2 };

  bool interior(long c) const { return state[c] == Interior; }
  bool boundary(long c) const { return state[c] == Boundary; }
  double delta(long c) const { return dist[c]; }  // delta_Omega at the cell center
  double delta_at(const Vec& p) const;            // nearest-cell lookup

  long interior_count() const;
};

// Build the domain of a boundary set.  When `component_of` is given, the
// interior is restricted to the face-connected component containing it.
Domain make_domain(const BoundarySet& set, std::optional<Vec> component_of = std::nullopt,
                   bool reflecting_walls = true);

// Smallest constant C0 with C0^{-1} r^n <= mu(B(x,r)) <= C0 r^n over sampled
// centers x in E and radii r in [r_min, r_max] (log-uniform).  Deterministic
// in the seed.
struct AdRegularityReport {
  double C0 = 1;
  double worst_hi = 0;  // sup mu(B)/r^n
  double worst_lo = 0;  // sup r^n/mu(B)
};
AdRegularityReport ad_regularity(const BoundarySet& set, int sample_count, std::uint64_t seed,
                                 double r_min = 0, double r_max = 0);

// Corkscrew point: argmax over grid cells of min(dist_to_set, r - |y-x|)
// inside B(x,r) cap Omega; reports the achieved constant c = value / r.
struct Corkscrew {
  Vec point;
  double c = 0;
  long cell = -1;
};
Corkscrew corkscrew_point(const BoundarySet& set, const Domain& domain, const Vec& x, double r);

struct HarnackChain {
  std::vector<Vec> centers;
  std::vector<double> radii;
  Vec x, y;
  // Largest C with C^{-1} diam(B_k) <= dist(B_k, boundary) <= C diam(B_k).
  double comparability = 0;
};

// Greedy chain of balls B(z, delta(z)/2) along a distance-ascending path.
// Failure (nullopt) only means no chain was found within max_len.
std::optional<HarnackChain> harnack_chain(const Domain& domain, const Vec& x, const Vec& y,
                                          int max_len);

}  // namespace ura
