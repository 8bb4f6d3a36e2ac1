#include "ura/lattice.hpp"

#include <algorithm>
#include <fstream>
#include <map>

namespace ura {

namespace {

// Distance from point p to the closed axis box [lo, hi].
double box_dist(const Vec& p, const Vec& lo, const Vec& hi, int dim) {
  double d2 = 0;
  for (int a = 0; a < dim; ++a) {
    double t = std::max({lo[a] - p[a], 0.0, p[a] - hi[a]});
    d2 += t * t;
  }
  return std::sqrt(d2);
}

}  // namespace

bool Lattice::is_ancestor(int a, int q) const {
  while (q >= 0) {
    if (q == a) return true;
    q = cubes[q].parent;
  }
  return false;
}

Lattice build_lattice(const BoundarySet& set, int depth) {
  require(depth >= 1, Err::BadArgument, "lattice depth must be >= 1");
  require(!set.cells.empty(), Err::EmptySet, "boundary set is empty");

  Lattice lat;
  lat.set = set;
  lat.anchor = set.bbox.lo;

  // Root side: the bounding-box max side; occupied cells always fit.
  lat.root_side = set.bbox.max_side(set.ambient_dim);
  require(lat.root_side / std::pow(2.0, depth) >= 4 * set.h - 1e-12, Err::DepthExceedsResolution,
          "finest generation drops below 4 cells");

  const int dim = set.ambient_dim;
  lat.generations.assign(depth + 1, {});

  // Assign cells to dyadic boxes generation by generation.
  std::vector<int> parent_of_cell(set.cells.size(), -1);
  for (int j = 0; j <= depth; ++j) {
    double side = lat.root_side / std::pow(2.0, j);
    std::map<std::array<int, 3>, std::vector<int>> groups;
    for (std::size_t k = 0; k < set.cells.size(); ++k) {
      Vec p = set.grid.center(set.cells[k]);
      std::array<int, 3> idx{0, 0, 0};
      for (int a = 0; a < dim; ++a) {
        int i = static_cast<int>(std::floor((p[a] - lat.anchor[a]) / side));
        idx[a] = std::min(i, (1 << j) - 1);  // clamp the far face
      }
      groups[idx].push_back(static_cast<int>(k));
    }
    for (auto& [idx, members] : groups) {
      DyadicCube q;
      q.id = static_cast<int>(lat.cubes.size());
      q.gen = j;
      q.idx = idx;
      q.side = side;
      q.members = members;
      for (int m : members) q.mu += set.weight[m];
      if (j > 0) {
        // Parent lookup through the first member's previous assignment.
        q.parent = parent_of_cell[members.front()];
        lat.cubes[q.parent].children.push_back(q.id);
      }
      lat.generations[j].push_back(q.id);
      lat.cubes.push_back(q);
    }
    for (int id : lat.generations[j])
      for (int m : lat.cubes[id].members) parent_of_cell[m] = id;
  }

  // Centers: member cell nearest the mu-centroid, then the gap to the
  // complement measured against the neighbours' cells.
  for (DyadicCube& q : lat.cubes) {
    Vec centroid;
    for (int m : q.members) {
      Vec p = set.grid.center(set.cells[m]);
      for (int a = 0; a < 3; ++a) centroid[a] += p[a] * set.weight[m];
    }
    for (int a = 0; a < 3; ++a) centroid[a] /= q.mu;
    double best = std::numeric_limits<double>::infinity();
    for (int m : q.members) {
      Vec p = set.grid.center(set.cells[m]);
      double d = dist(p, centroid);
      long cell = set.cells[m];
      if (d < best - 1e-15 || (d < best + 1e-15 && cell < q.center_cell)) {
        best = d;
        q.center = p;
        q.center_cell = cell;
      }
    }
  }
  // Gap to supp mu \ Q: scan the set cells not in Q within one cube side.
  std::vector<char> in_cube(set.cells.size(), 0);
  for (DyadicCube& q : lat.cubes) {
    for (int m : q.members) in_cube[m] = 1;
    double gap = q.side;  // complement beyond the neighbour shell is farther
    for (std::size_t k = 0; k < set.cells.size(); ++k) {
      if (in_cube[k]) continue;
      double d = dist(set.grid.center(set.cells[k]), q.center);
      if (d < gap) gap = d;
    }
    q.center_gap = gap;
    q.center_flagged = gap < q.side / 8;
    q.c1 = std::min(0.125, 0.95 * gap / q.side);
    if (q.c1 <= 0) q.c1 = 0.5 * set.h / q.side;  // degenerate: keep B_Q inside the cell
    for (int m : q.members) in_cube[m] = 0;
  }
  return lat;
}

double small_boundary_mass(const Lattice& lat, int cube_id, double tau) {
  require(tau > 0 && tau < 1, Err::BadArgument, "tau must be in (0,1)");
  const DyadicCube& q = lat.cubes[cube_id];
  const BoundarySet& set = lat.set;
  double reach = tau * q.side;

  std::vector<char> in_cube(set.cells.size(), 0);
  for (int m : q.members) in_cube[m] = 1;

  // Outer collar: non-members within reach of some member.
  // Inner collar: members within reach of some non-member.
  // Both scans prefilter with the member bounding box.
  Vec lo = set.grid.center(set.cells[q.members.front()]), hi = lo;
  for (int m : q.members) {
    Vec p = set.grid.center(set.cells[m]);
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  double inner = 0, outer = 0;
  for (std::size_t k = 0; k < set.cells.size(); ++k) {
    Vec p = set.grid.center(set.cells[k]);
    if (box_dist(p, lo, hi, set.ambient_dim) > reach + 1e-12) continue;
    if (in_cube[k]) continue;
    double d = std::numeric_limits<double>::infinity();
    for (int m : q.members) {
      d = std::min(d, dist(p, set.grid.center(set.cells[m])));
      if (d <= reach) break;
    }
    if (d <= reach + 1e-12) outer += set.weight[k];
  }
  for (int m : q.members) {
    Vec p = set.grid.center(set.cells[m]);
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < set.cells.size(); ++k) {
      if (in_cube[k]) continue;
      double dd = dist(p, set.grid.center(set.cells[k]));
      if (dd < d) d = dd;
      if (d <= reach) break;
    }
    if (d <= reach + 1e-12) inner += set.weight[m];
  }
  return inner + outer;
}

std::vector<int> dilate(const Lattice& lat, int cube_id, double lambda) {
  require(lambda >= 1, Err::BadArgument, "lambda must be >= 1");
  const DyadicCube& q = lat.cubes[cube_id];
  if (lambda == 1.0) return q.members;
  const BoundarySet& set = lat.set;
  double reach = (lambda - 1) * q.side;

  std::vector<char> in_cube(set.cells.size(), 0);
  for (int m : q.members) in_cube[m] = 1;
  Vec lo = set.grid.center(set.cells[q.members.front()]), hi = lo;
  for (int m : q.members) {
    Vec p = set.grid.center(set.cells[m]);
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  std::vector<int> out = q.members;
  for (std::size_t k = 0; k < set.cells.size(); ++k) {
    if (in_cube[k]) continue;
    Vec p = set.grid.center(set.cells[k]);
    if (box_dist(p, lo, hi, set.ambient_dim) > reach + 1e-12) continue;
    for (int m : q.members) {
      if (dist(p, set.grid.center(set.cells[m])) <= reach + 1e-12) {
        out.push_back(static_cast<int>(k));
        break;
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double measure_of(const BoundarySet& set, const std::vector<int>& ordinals) {
  double s = 0;
  for (int k : ordinals) s += set.weight[k];
  return s;
}

void Lattice::save_csv(const std::string& path) const {
  std::ofstream f(path);
  require(f.good(), Err::BadArgument, "cannot open " + path);
  f << "id,gen,cx,cy,cz,side,mu\r\n";
  for (const DyadicCube& q : cubes)
    f << q.id << ',' << q.gen << ',' << format_double(q.center[0]) << ','
      << format_double(q.center[1]) << ',' << format_double(q.center[2]) << ','
      << format_double(q.side) << ',' << format_double(q.mu) << "\r\n";
}

void Lattice::save_binary(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  require(f.good(), Err::BadArgument, "cannot open " + path);
  auto put32 = [&](std::int32_t v) { f.write(reinterpret_cast<char*>(&v), 4); };
  auto putd = [&](double v) { f.write(reinterpret_cast<char*>(&v), 8); };
  put32(static_cast<std::int32_t>(cubes.size()));
  for (const DyadicCube& q : cubes) {
    put32(q.id);
    put32(q.gen);
    put32(q.parent);
    putd(q.side);
    putd(q.mu);
    for (int a = 0; a < 3; ++a) putd(q.center[a]);
  }
}

}  // namespace ura
