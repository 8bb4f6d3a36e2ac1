#include "ura/rectifiability.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "ura/edt.hpp"

namespace ura {

namespace {

// Normal directions: angle grid in 2D, Fibonacci sphere points in 3D.
std::vector<Vec> normal_grid(int count, int dim) {
  std::vector<Vec> out;
  out.reserve(count);
  if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      double th = M_PI * k / count;
      out.push_back(vec2(std::cos(th), std::sin(th)));
    }
  } else {
    double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      double z = 1.0 - 2.0 * (k + 0.5) / count;
      double r = std::sqrt(std::max(0.0, 1 - z * z));
      double th = golden * k;
      out.push_back(vec3(r * std::cos(th), r * std::sin(th), z));
    }
  }
  return out;
}

std::vector<int> cells_in_ball(const BoundarySet& set, const Vec& center, double radius) {
  std::vector<int> out;
  for (std::size_t k = 0; k < set.cells.size(); ++k)
    if (dist(set.grid.center(set.cells[k]), center) <= radius) out.push_back(static_cast<int>(k));
  return out;
}

// Sample points of the plane {nu . x = c} inside B(center, radius), spaced
// `step` apart, and report the worst distance to the set.
double plane_to_set_deviation(const BoundarySet& set, const Vec& nu, double c, const Vec& center,
                              double radius, double step) {
  // orthonormal frame of the plane
  Vec t1, t2;
  if (set.ambient_dim == 2) {
    t1 = vec2(-nu[1], nu[0]);
  } else {
    Vec pick = std::abs(nu[0]) < 0.9 ? vec3(1, 0, 0) : vec3(0, 1, 0);
    t1 = vec3(nu[1] * pick[2] - nu[2] * pick[1], nu[2] * pick[0] - nu[0] * pick[2],
              nu[0] * pick[1] - nu[1] * pick[0]);
    t1 = t1 * (1.0 / norm(t1));
    t2 = vec3(nu[1] * t1[2] - nu[2] * t1[1], nu[2] * t1[0] - nu[0] * t1[2],
              nu[0] * t1[1] - nu[1] * t1[0]);
  }
  Vec base = center + nu * (c - dot(nu, center));
  int m = std::max(1, static_cast<int>(std::ceil(radius / step)));
  double worst = 0;
  for (int i = -m; i <= m; ++i) {
    if (set.ambient_dim == 2) {
      Vec z = base + t1 * (i * step);
      if (dist(z, center) > radius) continue;
      if (!set.bbox.contains(z, 2)) continue;
      worst = std::max(worst, set.dist_to_set(z));
    } else {
      for (int j = -m; j <= m; ++j) {
        Vec z = base + t1 * (i * step) + t2 * (j * step);
        if (dist(z, center) > radius) continue;
        if (!set.bbox.contains(z, 3)) continue;
        worst = std::max(worst, set.dist_to_set(z));
      }
    }
  }
  return worst;
}

}  // namespace

BBetaReport bbeta_infty(const BoundarySet& set, const Vec& center, double radius,
                        int search_grid) {
  auto idx = cells_in_ball(set, center, radius);
  require(!idx.empty(), Err::EmptyIntersection, "ball does not meet the set");
  BBetaReport rep;
  rep.value = std::numeric_limits<double>::infinity();
  for (const Vec& nu : normal_grid(search_grid, set.ambient_dim)) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int k : idx) {
      double t = dot(nu, set.grid.center(set.cells[k]));
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    double dev = (hi - lo) / 2;
    if (dev < rep.value) {
      rep.value = dev;
      rep.plane = {nu, (hi + lo) / 2, dev};
    }
  }
  rep.value /= radius;
  rep.plane.deviation = rep.value;
  return rep;
}

WhsaReport whsa_test(const Lattice& lat, int cube_id, double eps, double K0, int search_grid) {
  const BoundarySet& set = lat.set;
  const DyadicCube& q = lat.cube(cube_id);
  WhsaReport rep;
  double Rb = q.side / (eps * eps);
  // clip to the bounding box
  double max_r = 0;
  for (int a = 0; a < set.ambient_dim; ++a)
    max_r = std::max(max_r, std::max(q.center[a] - set.bbox.lo[a], set.bbox.hi[a] - q.center[a]));
  if (Rb > max_r) {
    Rb = max_r;
    rep.clipped = true;
  }
  auto idx = cells_in_ball(set, q.center, Rb);
  double step = std::max(eps * q.side / 2, set.h);

  for (const Vec& nu0 : normal_grid(search_grid, set.ambient_dim)) {
    for (int orient = -1; orient <= 1; orient += 2) {
      Vec nu = nu0 * static_cast<double>(orient);
      // H = {nu . x > c} just misses the set inside the big ball
      double c = -std::numeric_limits<double>::infinity();
      for (int k : idx) c = std::max(c, dot(nu, set.grid.center(set.cells[k])));
      c += set.h / 2;
      // distance from Q to the plane
      double dq = std::numeric_limits<double>::infinity();
      for (int m : q.members)
        dq = std::min(dq, std::abs(dot(nu, set.grid.center(set.cells[m])) - c));
      if (dq > std::pow(K0, 1.5) * q.side) continue;
      // plane points near the set
      if (plane_to_set_deviation(set, nu, c, q.center, Rb, step) > eps * q.side) continue;
      rep.pass = true;
      rep.plane = {nu, c, 0};
      return rep;
    }
  }
  return rep;
}

BatppReport batpp_test(const Lattice& lat, int cube_id, double eps, int search_grid) {
  const BoundarySet& set = lat.set;
  const DyadicCube& q = lat.cube(cube_id);
  BatppReport rep;
  double Rb = 10 * q.side;
  double max_r = 0;
  for (int a = 0; a < set.ambient_dim; ++a)
    max_r = std::max(max_r, std::max(q.center[a] - set.bbox.lo[a], set.bbox.hi[a] - q.center[a]));
  if (Rb > max_r) {
    Rb = max_r;
    rep.clipped = true;
  }
  auto idx = cells_in_ball(set, q.center, Rb);
  require(!idx.empty(), Err::EmptyIntersection, "ball does not meet the set");
  double step = std::max(eps * q.side / 2, set.h);

  // cache positions once; per normal only flat passes and a histogram
  std::vector<Vec> pos;
  pos.reserve(idx.size());
  for (int k : idx) pos.push_back(set.grid.center(set.cells[k]));

  for (const Vec& nu : normal_grid(search_grid, set.ambient_dim)) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Vec& p : pos) {
      double t = dot(nu, p);
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    // two-interval cover on an occupancy histogram (bin width well below the
    // tolerance keeps the split exact enough)
    const int bins = 2048;
    double width = std::max(hi - lo, 1e-12);
    std::vector<std::uint8_t> occ(bins, 0);
    for (const Vec& p : pos) {
      int b2 = static_cast<int>((dot(nu, p) - lo) / width * (bins - 1));
      occ[std::clamp(b2, 0, bins - 1)] = 1;
    }
    std::vector<int> occupied;
    for (int b2 = 0; b2 < bins; ++b2)
      if (occ[b2]) occupied.push_back(b2);
    double binw = width / (bins - 1);
    double best = std::numeric_limits<double>::infinity();
    double c1 = 0, c2 = 0;
    for (std::size_t split = 1; split <= occupied.size(); ++split) {
      double d1 = (occupied[split - 1] - occupied[0]) * binw / 2;
      double d2 =
          (split == occupied.size()) ? 0.0 : (occupied.back() - occupied[split]) * binw / 2;
      double dev = std::max(d1, d2) + binw;  // half-bin slack on both ends
      if (dev < best) {
        best = dev;
        c1 = lo + (occupied[0] + occupied[split - 1]) * binw / 2;
        c2 = (split == occupied.size()) ? c1 : lo + (occupied[split] + occupied.back()) * binw / 2;
      }
    }
    if (best > eps * q.side) continue;  // set not near the two planes
    // both planes must stay near the set inside the ball
    if (plane_to_set_deviation(set, nu, c1, q.center, Rb, step) > eps * q.side) continue;
    if (c2 != c1 && plane_to_set_deviation(set, nu, c2, q.center, Rb, step) > eps * q.side)
      continue;
    rep.pass = true;
    rep.plane1 = {nu, c1, best};
    rep.plane2 = {nu, c2, best};
    return rep;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Level sets and WTS

namespace {

// Connected components (face adjacency) of a node set; returns sorted lists.
std::vector<std::vector<long>> components_of(const Grid& g, const std::set<long>& nodes) {
  std::vector<std::vector<long>> comps;
  std::set<long> rest(nodes);
  while (!rest.empty()) {
    long seed = *rest.begin();
    rest.erase(seed);
    std::vector<long> comp{seed};
    std::deque<long> work{seed};
    while (!work.empty()) {
      long c = work.front();
      work.pop_front();
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
            comp.push_back(nb);
            work.push_back(nb);
          }
        }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

// V^lambda(Q) for a field: interior nodes of A0 B_Q above the level.
std::set<long> level_set(const Lattice& lat, const DyadicCube& q, const Domain& dom,
                         const GridField& u, double level, double A0) {
  const Grid& g = dom.grid;
  double reach = A0 * q.ball_radius();
  std::set<long> out;
  int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
  for (int a = 0; a < g.dim; ++a) {
    lo[a] = std::max(0, static_cast<int>(std::floor((q.center[a] - reach - g.origin[a]) / g.h)));
    hi[a] = std::min(g.n[a] - 1,
                     static_cast<int>(std::floor((q.center[a] + reach - g.origin[a]) / g.h)));
  }
  for (int k = lo[2]; k <= hi[2]; ++k)
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int i = lo[0]; i <= hi[0]; ++i) {
        long c = g.id(i, j, k);
        if (!dom.interior(c)) continue;
        if (dist(g.center(c), q.center) > reach) continue;
        if (u[c] > level) out.insert(c);
      }
  (void)lat;
  return out;
}

// Components of V^{level} that meet V^{2 level} cap 20 B_Q.
std::vector<long> selected_union(const Lattice& lat, const DyadicCube& q, const Domain& dom,
                                 const GridField& u, double level, double A0) {
  auto v = level_set(lat, q, dom, u, level, A0);
  auto comps = components_of(dom.grid, v);
  double r20 = 20 * q.ball_radius();
  std::vector<long> out;
  for (auto& comp : comps) {
    bool keep = false;
    for (long c : comp) {
      if (u[c] > 2 * level && dist(dom.grid.center(c), q.center) <= r20) {
        keep = true;
        break;
      }
    }
    if (keep) out.insert(out.end(), comp.begin(), comp.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

WtsReport wts_test(const Lattice& lat, int cube_id, const Domain& domain, const GridField& u,
                   const GridField& u_star, const WtsParams& params) {
  require(params.tau1 > 0 && params.tau1 <= 0.1, Err::BadArgument, "tau1 must be in (0, 1/10]");
  require(u.grid.same_layout(domain.grid) && u_star.grid.same_layout(domain.grid),
          Err::SolutionMissing, "solutions missing or on the wrong grid");
  const DyadicCube& q = lat.cube(cube_id);
  const Grid& g = domain.grid;
  double ell = q.side;
  double rt = std::sqrt(params.tau1);

  WtsReport rep;
  rep.regions.cube_id = cube_id;
  rep.regions.tau1 = params.tau1;
  rep.regions.U1 = selected_union(lat, q, domain, u, rt * ell, params.A0);
  rep.regions.U2 = selected_union(lat, q, domain, u_star, rt * ell, params.A0);
  rep.regions.U1p = selected_union(lat, q, domain, u, params.tau1 * ell, params.A0);
  rep.regions.U2p = selected_union(lat, q, domain, u_star, params.tau1 * ell, params.A0);

  std::set<long> u1(rep.regions.U1.begin(), rep.regions.U1.end());
  std::set<long> u2(rep.regions.U2.begin(), rep.regions.U2.end());
  std::set<long> u1p(rep.regions.U1p.begin(), rep.regions.U1p.end());
  std::set<long> u2p(rep.regions.U2p.begin(), rep.regions.U2p.end());

  // (1) coverage of the far-from-set part of 10 B_Q
  rep.cond_cover = true;
  double r10 = 10 * q.ball_radius();
  int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
  for (int a = 0; a < g.dim; ++a) {
    lo[a] = std::max(0, static_cast<int>(std::floor((q.center[a] - r10 - g.origin[a]) / g.h)));
    hi[a] =
        std::min(g.n[a] - 1, static_cast<int>(std::floor((q.center[a] + r10 - g.origin[a]) / g.h)));
  }
  for (int k = lo[2]; k <= hi[2] && rep.cond_cover; ++k)
    for (int j = lo[1]; j <= hi[1] && rep.cond_cover; ++j)
      for (int i = lo[0]; i <= hi[0]; ++i) {
        long c = g.id(i, j, k);
        if (!domain.interior(c)) continue;
        if (dist(g.center(c), q.center) > r10) continue;
        if (domain.dist[c] <= params.tau * ell) continue;
        if (!u1.count(c) && !u2.count(c)) {
          rep.cond_cover = false;
          break;
        }
      }

  // (2) inclusions and disjointness
  rep.cond_disjoint = true;
  for (long c : rep.regions.U1)
    if (!u1p.count(c)) rep.cond_disjoint = false;
  for (long c : rep.regions.U2)
    if (!u2p.count(c)) rep.cond_disjoint = false;
  for (long c : rep.regions.U1p)
    if (u2p.count(c)) rep.cond_disjoint = false;

  // (3) corkscrew balls of radius p l(Q) inside U_i cap B(x, r)
  auto complement_edt = [&](const std::set<long>& nodes) {
    std::vector<std::uint8_t> seeds(g.ncells(), 1);
    for (long c : nodes) seeds[c] = 0;
    return distance_transform(g, seeds);
  };
  auto edt1 = complement_edt(u1), edt2 = complement_edt(u2);
  rep.cond_corkscrew = true;
  double pr = params.p * ell;
  for (std::size_t m = 0; m < lat.set.cells.size(); ++m) {
    Vec x = lat.set.grid.center(lat.set.cells[m]);
    if (dist(x, q.center) > r10) continue;
    for (double r = params.t * ell; r <= 10 * ell; r *= 2) {
      for (const auto* edt : {&edt1, &edt2}) {
        bool found = false;
        for (long c : (edt == &edt1 ? rep.regions.U1 : rep.regions.U2)) {
          if ((*edt)[c] >= pr && dist(g.center(c), x) <= r - pr) {
            found = true;
            break;
          }
        }
        if (!found) rep.cond_corkscrew = false;
      }
      if (!rep.cond_corkscrew) break;
    }
    if (!rep.cond_corkscrew) break;
  }

  // (4) in-region connectivity above the clearance threshold
  double alpha = params.alpha > 0 ? params.alpha : rt / 4;
  rep.cond_curve = true;
  for (const auto* region : {&rep.regions.U1, &rep.regions.U2}) {
    std::set<long> thick;
    for (long c : **(&region))
      if (domain.dist[c] >= alpha * ell) thick.insert(c);
    if (thick.empty()) {
      rep.cond_curve = false;
      continue;
    }
    auto comps = components_of(g, thick);
    if (comps.size() > 1) rep.cond_curve = false;
  }

  rep.pass = rep.cond_cover && rep.cond_disjoint && rep.cond_corkscrew && rep.cond_curve;
  return rep;
}

std::vector<CompatibilityViolation> compatibility_check(
    const Lattice& lat, const std::vector<LevelSetRegions>& family, int a0) {
  std::vector<CompatibilityViolation> out;
  for (const LevelSetRegions& rq : family) {
    const DyadicCube& q = lat.cube(rq.cube_id);
    double r10 = 10 * q.ball_radius();
    std::set<long> u1p(rq.U1p.begin(), rq.U1p.end());
    std::set<long> u2p(rq.U2p.begin(), rq.U2p.end());
    for (const LevelSetRegions& rp : family) {
      if (rp.cube_id == rq.cube_id) continue;
      const DyadicCube& p = lat.cube(rp.cube_id);
      if (p.side > q.side + 1e-12 || p.side < q.side * std::pow(2.0, -a0) - 1e-12) continue;
      for (int region = 1; region <= 2; ++region) {
        const auto& up = (region == 1) ? rp.U1 : rp.U2;
        const auto& uqp = (region == 1) ? u1p : u2p;
        for (long c : up) {
          // region nodes live on the raster grid shared with the domain
          if (dist(lat.set.grid.center(c), q.center) > r10) continue;
          if (!uqp.count(c)) out.push_back({rp.cube_id, rq.cube_id, region, c});
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cube types

TypeReport type_classify(const Lattice& lat, int cube_id,
                         const std::function<bool(int)>& in_tree, const CoefficientField& A,
                         const Domain& domain, const GridField& u, const GridField& u_star,
                         const WhitneyDecomposition& wd, const TypeParams& params) {
  require(u.grid.same_layout(domain.grid) && u_star.grid.same_layout(domain.grid),
          Err::SolutionMissing, "solutions missing or on the wrong grid");
  const DyadicCube& q = lat.cube(cube_id);
  const Grid& g = domain.grid;
  TypeReport rep;
  rep.threshold = std::pow(params.eps0, params.M_eff);

  // Type 0 (1): a nearby comparable-scale cube leaves the tree
  for (const DyadicCube& p : lat.cubes) {
    if (p.side < params.kappa0 * q.side - 1e-12 ||
        p.side > q.side / params.kappa0 + 1e-12)
      continue;
    double d = std::numeric_limits<double>::infinity();
    for (int mp : p.members) {
      Vec pp = lat.set.grid.center(lat.set.cells[mp]);
      for (int mq : q.members)
        d = std::min(d, dist(pp, lat.set.grid.center(lat.set.cells[mq])));
      if (d == 0) break;
    }
    if (d <= q.side / params.kappa0 && !in_tree(p.id)) {
      rep.type = CubeType::Type0;
      rep.type0_reason = 1;
      return rep;
    }
  }
  // Type 0 (2): coefficient Lipschitz quotient too large near the cube
  {
    double reach = q.ball_radius() / params.kappa0;
    double floor_delta = params.kappa0 * q.side;
    double worst = 0;
    int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    for (int a = 0; a < g.dim; ++a) {
      lo[a] = std::max(0, static_cast<int>(std::floor((q.center[a] - reach - g.origin[a]) / g.h)));
      hi[a] = std::min(g.n[a] - 1,
                       static_cast<int>(std::floor((q.center[a] + reach - g.origin[a]) / g.h)));
    }
    for (int k = lo[2]; k <= hi[2]; ++k)
      for (int j = lo[1]; j <= hi[1]; ++j)
        for (int i = lo[0]; i <= hi[0]; ++i) {
          long c = g.id(i, j, k);
          if (!domain.interior(c) || domain.dist[c] < floor_delta) continue;
          if (dist(g.center(c), q.center) > reach) continue;
          auto ijk = g.coords(c);
          for (int a = 0; a < g.dim; ++a)
            for (int s = -1; s <= 1; s += 2) {
              int t[3] = {ijk[0], ijk[1], ijk[2]};
              t[a] += s;
              if (!g.in_range(t[0], t[1], t[2])) continue;
              long nb = g.id(t[0], t[1], t[2]);
              if (!domain.interior(nb) || domain.dist[nb] < floor_delta) continue;
              for (int e = 0; e < 9; ++e)
                worst = std::max(worst, std::abs(A.a[9 * nb + e] - A.a[9 * c + e]) / g.h);
            }
        }
    if (worst > params.theta0 / q.side) {
      rep.type = CubeType::Type0;
      rep.type0_reason = 2;
      return rep;
    }
  }

  // triple intersection over 20 B_Q
  double r20 = 20 * q.ball_radius();
  double level = params.tau0 * q.side;
  long zq = -1;
  double best = -1;
  for (long c = 0; c < g.ncells(); ++c) {
    if (!domain.interior(c)) continue;
    if (dist(g.center(c), q.center) > r20) continue;
    if (u[c] > level && u_star[c] > level) {
      double v = std::min(u[c], u_star[c]);
      if (v > best) {
        best = v;
        zq = c;
      }
    }
  }
  if (zq < 0) {
    rep.type = CubeType::Type3;
    return rep;
  }
  rep.triple_nonempty = true;

  // witness Y_Q: in the component of {u_star > tau0 l/2} cap 20B_Q containing
  // Z_Q, the cell with the largest |grad u_star|
  std::set<long> half_level;
  for (long c = 0; c < g.ncells(); ++c) {
    if (!domain.interior(c)) continue;
    if (dist(g.center(c), q.center) > r20) continue;
    if (u_star[c] > level / 2) half_level.insert(c);
  }
  auto comps = components_of(g, half_level);
  std::vector<long> vcomp;
  for (auto& comp : comps)
    if (std::binary_search(comp.begin(), comp.end(), zq)) vcomp = comp;
  long yq = zq;
  double gbest = -1;
  for (long c : vcomp) {
    Vec gr = gradient(u_star, c);
    double gn = norm(gr);
    if (gn > gbest) {
      gbest = gn;
      yq = c;
    }
  }
  rep.witness = yq;

  // chained enlargement of the Whitney component through Y_Q
  WhitneyRegion reg =
      whitney_region(lat, cube_id, domain, wd, params.k0, params.K0, params.tau_whitney);
  std::vector<long> seed;
  for (auto& comp : reg.components)
    if (std::binary_search(comp.begin(), comp.end(), yq)) seed = comp;
  if (seed.empty() && !reg.components.empty()) seed = reg.components.front();
  if (seed.empty()) seed.push_back(yq);
  int rounds = std::max(1, static_cast<int>(std::ceil(1.0 / params.chain_eps)));
  double band_lo = std::pow(params.chain_eps, 3) * q.side;
  double band_hi = q.side / std::pow(params.chain_eps, 3);
  std::vector<long> chained = chain_dilate(domain, seed, rounds, band_lo, band_hi);

  // gradient oscillation over the balls B_X, X in the chained region
  Vec gy = gradient(u_star, yq);
  double osc = 0;
  double shrink = 1.0 - std::pow(params.eps0, 2.0 * params.M_eff / params.alpha);
  std::set<long> seen;
  for (long X : chained) {
    double rad = shrink * domain.dist[X];
    auto ijk = g.coords(X);
    int R = std::max(0, static_cast<int>(std::floor(rad / g.h)));
    Vec px = g.center(X);
    for (int dk = (g.dim == 3 ? -R : 0); dk <= (g.dim == 3 ? R : 0); ++dk)
      for (int dj = -R; dj <= R; ++dj)
        for (int di = -R; di <= R; ++di) {
          int i = ijk[0] + di, j = ijk[1] + dj, k = ijk[2] + dk;
          if (!g.in_range(i, j, k)) continue;
          long c = g.id(i, j, k);
          if (!domain.interior(c) || !seen.insert(c).second) continue;
          if (dist(g.center(c), px) > rad) continue;
          Vec gz = gradient(u_star, c);
          osc = std::max(osc, norm(gz - gy));
        }
  }
  rep.oscillation = osc;
  rep.type = (osc > rep.threshold) ? CubeType::Type1 : CubeType::Type2;
  return rep;
}

// ---------------------------------------------------------------------------
// Augmented set

BoundarySet augmented_set(const BoundarySet& set, const Lattice& lat,
                          const std::vector<int>& bad_cubes, double b) {
  require(b > 0 && b < 1, Err::BadArgument, "b must be in (0,1)");
  if (bad_cubes.empty()) return set;

  const Grid& g = set.grid;
  std::map<long, double> extra;
  double wcell = (set.ambient_dim == 2) ? g.h : g.h * g.h;

  for (int qid : bad_cubes) {
    const DyadicCube& q = lat.cube(qid);
    // dyadic side in [b l(Q), 2b l(Q))
    double s = q.side;
    while (s >= 2 * b * q.side) s /= 2;
    while (s < b * q.side) s *= 2;
    double r10 = 10 * q.ball_radius();
    // index range of skeleton cubes meeting 10 B_Q
    long ilo[3] = {0, 0, 0}, ihi[3] = {0, 0, 0};
    for (int a = 0; a < set.ambient_dim; ++a) {
      ilo[a] = static_cast<long>(std::floor((q.center[a] - r10 - g.origin[a]) / s)) - 1;
      ihi[a] = static_cast<long>(std::floor((q.center[a] + r10 - g.origin[a]) / s)) + 1;
    }
    auto add_line = [&](const Vec& from, int axis, double len) {
      // rasterize an axis-aligned segment into cell weights
      int steps = std::max(1, static_cast<int>(std::round(len / g.h)));
      for (int t = 0; t < steps; ++t) {
        Vec p = from;
        p[axis] += (t + 0.5) * g.h;
        long c = g.cell_of(p);
        if (c >= 0) extra[c] += wcell;
      }
    };
    require(set.ambient_dim == 2, Err::BadArgument,
            "augmented skeletons implemented in ambient 2");
    for (long iy = ilo[1]; iy <= ihi[1]; ++iy)
      for (long ix = ilo[0]; ix <= ihi[0]; ++ix) {
        Vec corner = vec2(g.origin[0] + ix * s, g.origin[1] + iy * s);
        Vec cc = vec2(corner[0] + s / 2, corner[1] + s / 2);
        double dd = dist(cc, q.center);
        if (dd > r10 + s) continue;
        // bottom and left edge of each skeleton cube; the sweep covers all
        add_line(corner, 0, s);
        add_line(corner, 1, s);
      }
  }

  BoundarySet out = set;
  out.kind = set.kind + "+skeleton";
  std::map<long, double> merged;
  for (std::size_t k = 0; k < set.cells.size(); ++k) merged[set.cells[k]] += set.weight[k];
  for (auto& [c, w] : extra) merged[c] += w;
  out.cells.clear();
  out.weight.clear();
  for (auto& [c, w] : merged) {
    out.cells.push_back(c);
    out.weight.push_back(w);
  }
  out.rebuild_index();
  return out;
}

LocalSymmetryReport local_symmetry_test(const BoundarySet& set, const Vec& center,
                                        double radius_2B, double ell, double kappa, int min_pairs,
                                        std::uint64_t seed) {
  require(kappa > 0, Err::BadArgument, "kappa must be positive");
  auto idx = cells_in_ball(set, center, radius_2B);
  require(!idx.empty(), Err::EmptyIntersection, "test ball misses the set");

  LocalSymmetryReport rep;
  long clipped = 0, tested = 0;
  auto test_pair = [&](int a, int b) {
    Vec x = set.grid.center(set.cells[idx[a]]);
    Vec y = set.grid.center(set.cells[idx[b]]);
    Vec refl = x * 2.0 - y;
    ++tested;
    if (!set.bbox.contains(refl, set.ambient_dim)) {
      ++clipped;
      return;
    }
    double d = set.dist_to_set(refl) / ell;
    if (d > rep.worst) {
      rep.worst = d;
      rep.worst_x = x;
      rep.worst_y = y;
    }
  };

  long n = static_cast<long>(idx.size());
  if (n * n <= 4 * static_cast<long>(min_pairs)) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (a != b) test_pair(a, b);
  } else {
    Rng rng(seed);
    for (int k = 0; k < min_pairs; ++k) {
      int a = static_cast<int>(rng.index(n));
      int b = static_cast<int>(rng.index(n));
      if (a == b) continue;
      test_pair(a, b);
    }
  }
  rep.clipped_fraction = tested > 0 ? static_cast<double>(clipped) / tested : 0.0;
  rep.pass = rep.worst <= kappa;
  return rep;
}

}  // namespace ura
