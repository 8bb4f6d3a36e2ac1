#include "ura/corona.hpp"

#include <algorithm>
#include <deque>
#include <fstream>

namespace ura {

Vec cube_pole(const Lattice& lat, const Domain& domain, int cube_id, double eps_pole) {
  const DyadicCube& q = lat.cube(cube_id);
  const Grid& g = domain.grid;
  double target = eps_pole * q.side;
  double reach = q.side / 2;
  int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
  for (int a = 0; a < g.dim; ++a) {
    lo[a] = std::max(0, static_cast<int>(std::floor((q.center[a] - reach - g.origin[a]) / g.h)));
    hi[a] = std::min(g.n[a] - 1,
                     static_cast<int>(std::floor((q.center[a] + reach - g.origin[a]) / g.h)));
  }
  long best = -1;
  double best_err = std::numeric_limits<double>::infinity();
  double best_prox = std::numeric_limits<double>::infinity();
  for (int k = lo[2]; k <= hi[2]; ++k)
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int i = lo[0]; i <= hi[0]; ++i) {
        long c = g.id(i, j, k);
        if (!domain.interior(c)) continue;
        Vec p = g.center(c);
        if (dist(p, q.center) > reach) continue;
        if (domain.dist[c] < 2 * g.h) continue;
        double err = std::abs(domain.dist[c] - target);
        double prox = dist(p, q.center);
        if (err < best_err - 1e-15 || (err < best_err + 1e-15 && prox < best_prox - 1e-15)) {
          best = c;
          best_err = err;
          best_prox = prox;
        }
      }
  require(best >= 0, Err::PoleTooClose, "no admissible pole cell near the cube");
  return g.center(best);
}

const EllipticMeasure& MeasureCache::for_cube(int cube_id) {
  auto it = cache_.find(cube_id);
  if (it != cache_.end()) return it->second;
  require(used_ < budget_, Err::SolveBudgetExceeded,
          "measure solve budget exhausted (" + std::to_string(budget_) + ")");
  ++used_;
  auto [ins, ok] = cache_.emplace(cube_id, producer_(cube_id));
  (void)ok;
  return ins->second;
}

std::function<EllipticMeasure(int)> solver_measure_producer(const Lattice& lat,
                                                            const Domain& domain,
                                                            const DiscreteOperator& op,
                                                            double eps_pole, bool adjoint) {
  // the lattice cells and the operator's boundary cells must agree
  require(op.boundary_cells.size() == lat.set.cells.size(), Err::MeasureMissing,
          "operator boundary does not match the lattice set");
  const Lattice* L = &lat;
  const Domain* D = &domain;
  const DiscreteOperator* O = &op;
  return [L, D, O, eps_pole, adjoint](int cube_id) {
    Vec pole = cube_pole(*L, *D, cube_id, eps_pole);
    return elliptic_measure(*O, *D, pole, adjoint);
  };
}

namespace {

double density(const Lattice& lat, const EllipticMeasure& om, const std::vector<int>& cells) {
  double mu = measure_of(lat.set, cells);
  if (mu <= 0) return 0;
  return om.of_cells(cells) / mu;
}

// Maximal cubes below `root` satisfying `select`, breadth-first.
std::vector<int> maximal_below(const Lattice& lat, int root,
                               const std::function<bool(int)>& select) {
  std::vector<int> out;
  std::deque<int> work(lat.cube(root).children.begin(), lat.cube(root).children.end());
  while (!work.empty()) {
    int q = work.front();
    work.pop_front();
    if (select(q)) {
      out.push_back(q);
      continue;  // maximal: descendants are shadowed
    }
    for (int c : lat.cube(q).children) work.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

StoppingFamilies hd_ld_stopping(const Lattice& lat, int root, const EllipticMeasure& omega,
                                const StoppingParams& params) {
  params.validate();
  require(!omega.omega.empty(), Err::MeasureMissing, "measure not supplied");
  StoppingFamilies out;
  out.root_density_2R = density(lat, omega, dilate(lat, root, 2.0));
  out.root_density_R = density(lat, omega, lat.cube(root).members);

  out.hd = maximal_below(lat, root, [&](int q) {
    return density(lat, omega, dilate(lat, q, 2.0)) >= params.A * out.root_density_2R;
  });
  out.ld = maximal_below(lat, root, [&](int q) {
    return density(lat, omega, lat.cube(q).members) <= params.delta * out.root_density_R;
  });
  return out;
}

CoronaForest build_top(const Lattice& lat, MeasureCache& measures, const StoppingParams& params) {
  params.validate();
  CoronaForest f;
  f.lattice_cubes = lat.cubes.size();
  f.root_of.assign(lat.cubes.size(), -1);
  int max_gen = lat.depth();
  if (params.max_depth >= 0) max_gen = std::min(max_gen, params.max_depth);

  std::deque<int> roots{lat.root()};
  while (!roots.empty()) {
    int R = roots.front();
    roots.pop_front();
    int root_idx = static_cast<int>(f.top.size());
    f.top.push_back(R);

    const EllipticMeasure& om = measures.for_cube(R);
    StoppingFamilies fam = hd_ld_stopping(lat, R, om, params);

    // Stop(R): maximal cubes of hd cup ld
    std::vector<int> all;
    all.insert(all.end(), fam.hd.begin(), fam.hd.end());
    all.insert(all.end(), fam.ld.begin(), fam.ld.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    std::vector<int> stop;
    for (int q : all) {
      bool shadowed = false;
      for (int s : all)
        if (s != q && lat.is_ancestor(s, q)) shadowed = true;
      if (!shadowed) stop.push_back(q);
    }

    // Tree(R): walk down from R, not entering stop cubes
    std::vector<int> tree;
    double dlo = std::numeric_limits<double>::infinity(), dhi = 0;
    std::deque<int> work{R};
    std::vector<char> is_stop(lat.cubes.size(), 0);
    for (int s : stop) is_stop[s] = 1;
    while (!work.empty()) {
      int q = work.front();
      work.pop_front();
      if (is_stop[q]) continue;
      tree.push_back(q);
      f.root_of[q] = root_idx;
      double comp = om.of_cells(dilate(lat, q, 3.0)) * lat.cube(R).mu / lat.cube(q).mu;
      dlo = std::min(dlo, comp);
      dhi = std::max(dhi, comp);
      if (lat.cube(q).gen < max_gen)
        for (int c : lat.cube(q).children) work.push_back(c);
    }
    for (int s : stop) {
      if (lat.cube(s).gen >= max_gen) f.depth_exhausted = true;
      roots.push_back(s);
    }
    std::sort(tree.begin(), tree.end());
    f.trees.push_back(std::move(tree));
    f.stops.push_back(std::move(stop));
    f.hd.push_back(std::move(fam.hd));
    f.ld.push_back(std::move(fam.ld));
    f.density_lo.push_back(dlo);
    f.density_hi.push_back(dhi);
  }

  // stop cubes themselves belong to the tree rooted at them; root_of was set
  // when they were processed as roots
  return f;
}

double packing_constant(const std::vector<int>& family, const Lattice& lat) {
  std::vector<char> in(lat.cubes.size(), 0);
  for (int q : family) {
    require(q >= 0 && q < static_cast<int>(lat.cubes.size()), Err::BadArgument,
            "family cube outside the lattice");
    in[q] = 1;
  }
  std::vector<double> sum(lat.cubes.size(), 0.0);
  for (int gen = lat.depth(); gen >= 0; --gen)
    for (int id : lat.generations[gen]) {
      double s = in[id] ? lat.cube(id).mu : 0.0;
      for (int c : lat.cube(id).children) s += sum[c];
      sum[id] = s;
    }
  double worst = 0;
  for (const DyadicCube& q : lat.cubes)
    if (q.mu > 0) worst = std::max(worst, sum[q.id] / q.mu);
  return worst;
}

double CoronaForest::packing_constant_of_top(const Lattice& lat) const {
  return packing_constant(top, lat);
}

LdIterates ld_iterates(const Lattice& lat, int root, MeasureCache& measures, double delta, int m,
                       double eps_pole) {
  require(m >= 1, Err::BadArgument, "m must be >= 1");
  StoppingParams params;
  params.delta = delta;
  params.eps_pole = eps_pole;
  LdIterates out;
  std::vector<int> current{root};
  double msum = 0;
  for (int k = 1; k <= m; ++k) {
    std::vector<int> next;
    for (int q : current) {
      const EllipticMeasure& om = measures.for_cube(q);
      double root_density = density(lat, om, lat.cube(q).members);
      auto lds = maximal_below(lat, q, [&](int p) {
        return density(lat, om, lat.cube(p).members) <= params.delta * root_density;
      });
      next.insert(next.end(), lds.begin(), lds.end());
    }
    std::sort(next.begin(), next.end());
    for (int q : next) msum += lat.cube(q).mu;
    out.levels.push_back(next);
    current = std::move(next);
    if (current.empty()) {
      // deeper levels stay empty; pad for shape
      for (int kk = k + 1; kk <= m; ++kk) out.levels.push_back({});
      break;
    }
  }
  out.normalized_sum = msum / lat.cube(root).mu;
  double final_mass = 0;
  if (!out.levels.empty())
    for (int q : out.levels.back()) final_mass += lat.cube(q).mu;
  out.final_mass_ratio = final_mass / lat.cube(root).mu;
  return out;
}

CoronaForest mixed_corona(const Lattice& lat, const CoronaForest& forest_L,
                          const CoronaForest& forest_Lstar) {
  require(forest_L.lattice_cubes == lat.cubes.size() &&
              forest_Lstar.lattice_cubes == lat.cubes.size(),
          Err::LatticeMismatch, "forests built over different lattices");

  CoronaForest f;
  f.lattice_cubes = lat.cubes.size();
  f.depth_exhausted = forest_L.depth_exhausted || forest_Lstar.depth_exhausted;

  // mixed roots: union of the two Top families
  std::vector<char> is_root(lat.cubes.size(), 0);
  for (int r : forest_L.top) is_root[r] = 1;
  for (int r : forest_Lstar.top) is_root[r] = 1;
  std::vector<int> tops;
  for (std::size_t q = 0; q < lat.cubes.size(); ++q)
    if (is_root[q]) tops.push_back(static_cast<int>(q));
  std::sort(tops.begin(), tops.end(), [&](int a, int b) {
    if (lat.cube(a).gen != lat.cube(b).gen) return lat.cube(a).gen < lat.cube(b).gen;
    return a < b;
  });
  std::vector<int> top_index(lat.cubes.size(), -1);
  for (std::size_t i = 0; i < tops.size(); ++i) top_index[tops[i]] = static_cast<int>(i);

  f.top = tops;
  f.trees.assign(tops.size(), {});
  f.stops.assign(tops.size(), {});
  f.hd.assign(tops.size(), {});
  f.ld.assign(tops.size(), {});
  f.density_lo.assign(tops.size(), 0.0);
  f.density_hi.assign(tops.size(), 0.0);
  f.root_of.assign(lat.cubes.size(), -1);

  // each cube belongs to the tree of its deepest root ancestor
  for (int gen = 0; gen <= lat.depth(); ++gen)
    for (int id : lat.generations[gen]) {
      int p = lat.cube(id).parent;
      if (p >= 0) f.root_of[id] = f.root_of[p];
      if (is_root[id]) f.root_of[id] = top_index[id];
      if (f.root_of[id] >= 0) f.trees[f.root_of[id]].push_back(id);
    }
  // stop families of the mixed forest: the roots directly below each tree
  for (std::size_t i = 0; i < tops.size(); ++i)
    for (int q : f.trees[i])
      for (int c : lat.cube(q).children)
        if (is_root[c]) f.stops[i].push_back(c);
  return f;
}

WeakAinftyRow weak_ainfty_single(const BoundarySet& set, const EllipticMeasure& omega,
                                 const Vec& center, double radius, double eps, double eps_prime) {
  WeakAinftyRow row;
  row.center = center;
  row.radius = radius;
  row.pole = omega.pole;

  struct CellInfo {
    double mu, om, dens;
  };
  std::vector<CellInfo> cells;
  for (std::size_t k = 0; k < set.cells.size(); ++k) {
    if (dist(set.grid.center(set.cells[k]), center) > radius) continue;
    double mu = set.weight[k];
    double om = omega.omega[k];
    cells.push_back({mu, om, om / std::max(mu, 1e-300)});
    row.mu_ball += mu;
    row.omega_ball += om;
  }
  std::sort(cells.begin(), cells.end(),
            [](const CellInfo& a, const CellInfo& b) { return a.dens > b.dens; });
  double mu_acc = 0, om_acc = 0;
  for (const CellInfo& ci : cells) {
    if (mu_acc + ci.mu > eps * row.mu_ball) break;
    mu_acc += ci.mu;
    om_acc += ci.om;
    if (row.omega_ball > 0)
      row.worst_ratio = std::max(row.worst_ratio, om_acc / row.omega_ball);
  }
  row.pass = row.worst_ratio <= eps_prime;
  return row;
}

std::vector<WeakAinftyRow> weak_ainfty_check(const BoundarySet& set, const Domain& domain,
                                             const DiscreteOperator& op,
                                             const std::vector<std::pair<Vec, double>>& balls,
                                             double eps, double eps_prime, double c0) {
  std::vector<WeakAinftyRow> rows;
  for (auto& [center, radius] : balls) {
    Corkscrew cs = corkscrew_point(set, domain, center, radius / 2);
    require(cs.c * (radius / 2) >= c0 * radius - 2 * domain.grid.h, Err::PoleTooClose,
            "no pole with the required clearance in the half ball");
    EllipticMeasure om = elliptic_measure(op, domain, cs.point);
    rows.push_back(weak_ainfty_single(set, om, center, radius, eps, eps_prime));
  }
  return rows;
}

void save_forest_csv(const CoronaForest& forest, const Lattice& lat, const std::string& path) {
  std::ofstream f(path);
  require(f.good(), Err::BadArgument, "cannot open " + path);
  f << "cube,root,role\r\n";
  auto emit = [&](int q, int root, const char* role) {
    f << q << ',' << (root >= 0 ? forest.top[root] : -1) << ',' << role << "\r\n";
  };
  for (std::size_t i = 0; i < forest.top.size(); ++i) emit(forest.top[i], static_cast<int>(i), "top");
  for (std::size_t i = 0; i < forest.trees.size(); ++i)
    for (int q : forest.trees[i]) emit(q, static_cast<int>(i), "tree");
  for (std::size_t i = 0; i < forest.hd.size(); ++i)
    for (int q : forest.hd[i]) emit(q, static_cast<int>(i), "hd");
  for (std::size_t i = 0; i < forest.ld.size(); ++i)
    for (int q : forest.ld[i]) emit(q, static_cast<int>(i), "ld");
  (void)lat;
}

}  // namespace ura
