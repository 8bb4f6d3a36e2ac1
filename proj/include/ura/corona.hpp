// Stopping-time decompositions driven by elliptic measure: high/low density
// stopping, the Top/Tree/Stop forest, packing constants, iterated low-density
// families, the mixed two-operator forest, and weak-A-infinity testing.
#pragma once

#include <unordered_map>

#include "ura/lattice.hpp"
#include "ura/solver.hpp"

namespace ura {

struct StoppingParams {
  double A = 10.0;       // high-density threshold (> 1)
  double delta = 0.1;    // low-density threshold (in (0,1))
  double eps_pole = 0.2;  // pole height factor
  int max_depth = -1;    // -1: lattice depth

  void validate() const {
    require(A > 1 && delta > 0 && delta < 1, Err::BadArgument, "need A > 1 > delta > 0");
    require(eps_pole > 0 && eps_pole < 1, Err::BadArgument, "eps_pole in (0,1)");
  }
};

// Pole for a cube: the cell within B(z_Q, l(Q)/2) whose distance to the set
// is closest to eps_pole * l(Q), ties broken by proximity to z_Q.
Vec cube_pole(const Lattice& lat, const Domain& domain, int cube_id, double eps_pole);

// Cached per-cube measures with a solve budget.
class MeasureCache {
 public:
  MeasureCache(std::function<EllipticMeasure(int)> producer, int budget = 500)
      : producer_(std::move(producer)), budget_(budget) {}

  const EllipticMeasure& for_cube(int cube_id);
  int solves_used() const { return used_; }

 private:
  std::function<EllipticMeasure(int)> producer_;
  std::unordered_map<int, EllipticMeasure> cache_;
  int budget_;
  int used_ = 0;
};

// Solver-backed producer: one adjoint (or direct, for the transpose operator)
// solve per distinct pole cell.
std::function<EllipticMeasure(int)> solver_measure_producer(const Lattice& lat,
                                                            const Domain& domain,
                                                            const DiscreteOperator& op,
                                                            double eps_pole, bool adjoint);

struct StoppingFamilies {
  std::vector<int> hd;  // maximal high-density cubes (2Q dilation)
  std::vector<int> ld;  // maximal low-density cubes (Q itself)
  double root_density_2R = 0;
  double root_density_R = 0;
};

// Maximal cubes below R with omega(2Q)/mu(2Q) >= A * omega(2R)/mu(2R) (high)
// or omega(Q)/mu(Q) <= delta * omega(R)/mu(R) (low); breadth-first scans.
StoppingFamilies hd_ld_stopping(const Lattice& lat, int root, const EllipticMeasure& omega,
                                const StoppingParams& params);

struct CoronaForest {
  std::vector<int> top;                  // root cubes, in construction order
  std::vector<std::vector<int>> trees;   // per-root tree cubes (root included)
  std::vector<std::vector<int>> stops;   // per-root Stop families
  std::vector<std::vector<int>> hd, ld;  // per-root stopping families
  std::vector<int> root_of;              // per-cube index into `top`, -1 above roots
  bool depth_exhausted = false;
  // density comparability span over tree cubes: omega(3Q) mu(R) / mu(Q)
  std::vector<double> density_lo, density_hi;
  std::size_t lattice_cubes = 0;  // fingerprint for mismatch checks

  double packing_constant_of_top(const Lattice& lat) const;
};

CoronaForest build_top(const Lattice& lat, MeasureCache& measures, const StoppingParams& params);

// sup over cubes S of sum_{R in family, R below S} mu(R)/mu(S), exact
// bottom-up pass.
double packing_constant(const std::vector<int>& family, const Lattice& lat);

struct LdIterates {
  std::vector<std::vector<int>> levels;  // LD^k families, k = 1..m
  double normalized_sum = 0;             // sum_k sum_Q mu(Q)/mu(R)
  double final_mass_ratio = 0;           // mu(B_L^m)/mu(R)
};
LdIterates ld_iterates(const Lattice& lat, int root, MeasureCache& measures, double delta,
                       int m, double eps_pole = 0.2);

// Intersected trees of two forests over the same lattice.
CoronaForest mixed_corona(const Lattice& lat, const CoronaForest& forest_L,
                          const CoronaForest& forest_Lstar);

struct WeakAinftyRow {
  Vec center;
  double radius = 0;
  Vec pole;
  double mu_ball = 0, omega_ball = 0;
  double worst_ratio = 0;  // max over tested E of omega(E)/omega(B)
  bool pass = true;        // no violator with mu(E) <= eps mu(B), omega(E) > eps' omega(B)
};

// Greedy worst-case subsets by descending omega-density per ball.
std::vector<WeakAinftyRow> weak_ainfty_check(const BoundarySet& set, const Domain& domain,
                                             const DiscreteOperator& op,
                                             const std::vector<std::pair<Vec, double>>& balls,
                                             double eps, double eps_prime, double c0 = 0.1);

// Same test against an externally supplied measure (synthetic fixtures).
WeakAinftyRow weak_ainfty_single(const BoundarySet& set, const EllipticMeasure& omega,
                                 const Vec& center, double radius, double eps, double eps_prime);

// CSV export: cube id, root id, role in {tree, hd, ld, top}.
void save_forest_csv(const CoronaForest& forest, const Lattice& lat, const std::string& path);

}  // namespace ura
