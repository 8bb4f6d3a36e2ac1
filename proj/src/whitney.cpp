#include "ura/whitney.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace ura {

namespace {

// Strided minimum of the distance field over a cell box, with the Lipschitz
// slack that makes the result a certified lower bound.
double min_dist_over_box(const Domain& dom, const std::array<int, 3>& lo, int size,
                         double& slack_out) {
  const Grid& g = dom.grid;
  int stride = std::max(1, size / 8);
  double best = std::numeric_limits<double>::infinity();
  int zlo = (g.dim == 3) ? lo[2] : 0, zhi = (g.dim == 3) ? lo[2] + size - 1 : 0;
  for (int k = zlo; k <= zhi; k += stride)
    for (int j = lo[1]; j <= lo[1] + size - 1; j += stride)
      for (int i = lo[0]; i <= lo[0] + size - 1; i += stride) {
        int ci = std::min(std::max(i, 0), g.n[0] - 1);
        int cj = std::min(std::max(j, 0), g.n[1] - 1);
        int ck = std::min(std::max(k, 0), g.n[2] - 1);
        best = std::min(best, dom.dist[g.id(ci, cj, ck)]);
      }
  slack_out = stride * g.h * std::sqrt(static_cast<double>(g.dim));
  return best;
}

}  // namespace

Box WhitneyDecomposition::cube_box(const WhitneyCube& c, double inflate) const {
  Box b;
  double pad = (inflate - 1.0) * c.side / 2;
  for (int a = 0; a < 3; ++a) {
    b.lo[a] = grid.origin[a] + grid.h * c.lo[a] - pad;
    b.hi[a] = grid.origin[a] + grid.h * (c.lo[a] + c.size) + pad;
  }
  if (grid.dim == 2) {
    b.lo[2] = 0;
    b.hi[2] = 0;
  }
  return b;
}

WhitneyDecomposition whitney_decompose(const Domain& domain) {
  const Grid& g = domain.grid;
  bool any = false;
  for (long c = 0; c < g.ncells(); ++c)
    if (domain.interior(c) && domain.dist[c] >= 16 * g.h) {
      any = true;
      break;
    }
  require(any, Err::DomainTooThin, "no interior cell has dist >= 16h");

  WhitneyDecomposition wd;
  wd.grid = g;
  wd.cube_of_cell.assign(g.ncells(), -1);

  int root = 1;
  while (root < std::max({g.n[0], g.n[1], g.n[2]})) root *= 2;

  struct Item {
    std::array<int, 3> lo;
    int size;
  };
  std::deque<Item> work{{{0, 0, 0}, root}};
  double sqd = std::sqrt(static_cast<double>(g.dim));
  while (!work.empty()) {
    Item it = work.front();
    work.pop_front();
    // discard boxes fully outside the grid
    bool outside = false;
    for (int a = 0; a < g.dim; ++a)
      if (it.lo[a] >= g.n[a]) outside = true;
    if (outside) continue;
    bool inside = true;
    for (int a = 0; a < g.dim; ++a)
      if (it.lo[a] + it.size > g.n[a]) inside = false;

    double diam = it.size * g.h * sqd;
    bool admissible = false;
    if (inside) {
      if (it.size == 1) {
        long c = g.id(it.lo[0], it.lo[1], it.lo[2]);
        admissible = domain.interior(c) && domain.dist[c] >= 16 * g.h;
        if (!admissible) continue;  // uncovered floor cell
      } else {
        // 8I = the concentric box of 8x the side
        std::array<int, 3> lo8 = it.lo;
        for (int a = 0; a < g.dim; ++a) lo8[a] -= it.size * 7 / 2;
        double slack = 0;
        double d8 = min_dist_over_box(domain, lo8, it.size * 8, slack);
        admissible = 8 * diam <= d8 - slack;
        if (admissible) {
          // the box must also be free of boundary/excluded cells
          for (int k = (g.dim == 3 ? it.lo[2] : 0);
               admissible && k <= (g.dim == 3 ? it.lo[2] + it.size - 1 : 0); ++k)
            for (int j = it.lo[1]; admissible && j <= it.lo[1] + it.size - 1; ++j)
              for (int i = it.lo[0]; admissible && i <= it.lo[0] + it.size - 1; ++i)
                if (!domain.interior(g.id(i, j, k))) admissible = false;
        }
      }
    }
    if (admissible) {
      WhitneyCube c;
      c.lo = it.lo;
      c.size = it.size;
      c.side = it.size * g.h;
      double slack = 0;
      c.dist_to_set = min_dist_over_box(domain, it.lo, it.size, slack);
      std::int32_t id = static_cast<std::int32_t>(wd.cubes.size());
      wd.cubes.push_back(c);
      for (int k = (g.dim == 3 ? it.lo[2] : 0);
           k <= (g.dim == 3 ? it.lo[2] + it.size - 1 : 0); ++k)
        for (int j = it.lo[1]; j <= it.lo[1] + it.size - 1; ++j)
          for (int i = it.lo[0]; i <= it.lo[0] + it.size - 1; ++i)
            wd.cube_of_cell[g.id(i, j, k)] = id;
      continue;
    }
    if (it.size == 1) continue;
    int half = it.size / 2;
    for (int dz = 0; dz < (g.dim == 3 ? 2 : 1); ++dz)
      for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx)
          work.push_back({{it.lo[0] + dx * half, it.lo[1] + dy * half, it.lo[2] + dz * half}, half});
  }
  return wd;
}

WhitneyRegion whitney_region(const Lattice& lat, int cube_id, const Domain& domain,
                             const WhitneyDecomposition& wd, double k0, double K0, double tau) {
  require(k0 > 0 && k0 < 1 && K0 > 1, Err::BadArgument, "need 0 < k0 < 1 < K0");
  require(tau > 0 && tau < 0.5, Err::BadArgument, "need 0 < tau < 1/2");
  const DyadicCube& q = lat.cube(cube_id);
  const Grid& g = domain.grid;

  WhitneyRegion reg;
  reg.cube_id = cube_id;
  reg.k0 = k0;
  reg.K0 = K0;
  reg.tau = tau;

  // member cube bounding box of Q for the distance prefilter
  Vec qlo = lat.set.grid.center(lat.set.cells[q.members.front()]), qhi = qlo;
  for (int m : q.members) {
    Vec p = lat.set.grid.center(lat.set.cells[m]);
    for (int a = 0; a < 3; ++a) {
      qlo[a] = std::min(qlo[a], p[a]);
      qhi[a] = std::max(qhi[a], p[a]);
    }
  }
  auto dist_to_q = [&](const Box& b) {
    // distance between the box and Q's cells, exact with early exit
    double best = std::numeric_limits<double>::infinity();
    for (int m : q.members) {
      Vec p = lat.set.grid.center(lat.set.cells[m]);
      double d2 = 0;
      for (int a = 0; a < g.dim; ++a) {
        double t = std::max({b.lo[a] - p[a], 0.0, p[a] - b.hi[a]});
        d2 += t * t;
      }
      best = std::min(best, std::sqrt(d2));
      if (best == 0) break;
    }
    return best;
  };

  for (std::size_t i = 0; i < wd.cubes.size(); ++i) {
    const WhitneyCube& I = wd.cubes[i];
    if (I.side < k0 * q.side - 1e-12 || I.side > K0 * q.side + 1e-12) continue;
    if (dist_to_q(wd.cube_box(I)) > K0 * q.side + 1e-12) continue;
    reg.member_cubes.push_back(static_cast<int>(i));
  }
  if (reg.member_cubes.empty()) {
    reg.empty = true;
    return reg;
  }

  // nodes of the union of the enlarged cubes
  std::set<long> nodes;
  for (int i : reg.member_cubes) {
    Box b = wd.cube_box(wd.cubes[i], 1.0 + tau);
    int lo[3], hi[3];
    for (int a = 0; a < 3; ++a) {
      if (a >= g.dim) {
        lo[a] = 0;
        hi[a] = 0;
        continue;
      }
      lo[a] = std::max(0, static_cast<int>(std::floor((b.lo[a] - g.origin[a]) / g.h - 0.5)) + 1);
      hi[a] = std::min(g.n[a] - 1, static_cast<int>(std::floor((b.hi[a] - g.origin[a]) / g.h - 0.5)));
    }
    for (int k = lo[2]; k <= hi[2]; ++k)
      for (int j = lo[1]; j <= hi[1]; ++j)
        for (int i2 = lo[0]; i2 <= hi[0]; ++i2) {
          long c = g.id(i2, j, k);
          if (domain.interior(c)) nodes.insert(c);
        }
  }
  reg.nodes.assign(nodes.begin(), nodes.end());

  // connected components by face adjacency inside the node set
  std::set<long> rest(nodes);
  while (!rest.empty()) {
    long seed = *rest.begin();
    std::vector<long> comp;
    std::deque<long> queue{seed};
    rest.erase(seed);
    while (!queue.empty()) {
      long c = queue.front();
      queue.pop_front();
      comp.push_back(c);
      auto ijk = g.coords(c);
      for (int a = 0; a < g.dim; ++a)
        for (int s = -1; s <= 1; s += 2) {
          int t[3] = {ijk[0], ijk[1], ijk[2]};
          t[a] += s;
          if (!g.in_range(t[0], t[1], t[2])) continue;
          long nb = g.id(t[0], t[1], t[2]);
          auto it = rest.find(nb);
          if (it != rest.end()) {
            rest.erase(it);
            queue.push_back(nb);
          }
        }
    }
    std::sort(comp.begin(), comp.end());
    reg.components.push_back(std::move(comp));
  }
  // deterministic order: largest component first, ties by first node
  std::sort(reg.components.begin(), reg.components.end(),
            [](const std::vector<long>& a, const std::vector<long>& b) {
              if (a.size() != b.size()) return a.size() > b.size();
              return a.front() < b.front();
            });
  return reg;
}

std::vector<long> chain_dilate(const Domain& domain, const std::vector<long>& seed, int rounds,
                               double band_lo, double band_hi) {
  const Grid& g = domain.grid;
  std::set<long> current(seed.begin(), seed.end());
  std::vector<long> frontier(seed.begin(), seed.end());
  for (int r = 0; r < rounds && !frontier.empty(); ++r) {
    std::vector<long> next;
    for (long c : frontier) {
      double rad = domain.dist[c] / 2;
      if (!(domain.dist[c] >= band_lo && domain.dist[c] <= band_hi)) continue;
      auto ijk = g.coords(c);
      int R = std::max(1, static_cast<int>(std::floor(rad / g.h)));
      Vec pc = g.center(c);
      for (int dk = (g.dim == 3 ? -R : 0); dk <= (g.dim == 3 ? R : 0); ++dk)
        for (int dj = -R; dj <= R; ++dj)
          for (int di = -R; di <= R; ++di) {
            int i = ijk[0] + di, j = ijk[1] + dj, k = ijk[2] + dk;
            if (!g.in_range(i, j, k)) continue;
            long nb = g.id(i, j, k);
            if (!domain.interior(nb)) continue;
            if (dist(g.center(nb), pc) > rad) continue;
            if (!(domain.dist[nb] >= band_lo && domain.dist[nb] <= band_hi)) continue;
            if (current.insert(nb).second) next.push_back(nb);
          }
    }
    frontier = std::move(next);
  }
  return std::vector<long>(current.begin(), current.end());
}

std::vector<long> sawtooth_nodes(const Lattice& lat, const std::vector<int>& cube_ids,
                                 const Domain& domain, const WhitneyDecomposition& wd, double k0,
                                 double K0, double tau) {
  std::set<long> nodes;
  for (int id : cube_ids) {
    WhitneyRegion r = whitney_region(lat, id, domain, wd, k0, K0, tau);
    nodes.insert(r.nodes.begin(), r.nodes.end());
  }
  return std::vector<long>(nodes.begin(), nodes.end());
}

}  // namespace ura
