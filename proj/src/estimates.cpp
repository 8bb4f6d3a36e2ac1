#include "ura/estimates.hpp"

#include <algorithm>
#include <deque>

namespace ura {

namespace {

// Iterate cells of the bounding box of B(x,r) (whole grid when r infinite).
template <typename F>
void for_cells_near(const Grid& g, const Vec& x, double r, F&& f) {
  if (!std::isfinite(r)) {
    for (long c = 0; c < g.ncells(); ++c) f(c);
    return;
  }
  int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
  for (int a = 0; a < g.dim; ++a) {
    lo[a] = std::max(0, static_cast<int>(std::floor((x[a] - r - g.origin[a]) / g.h)));
    hi[a] = std::min(g.n[a] - 1, static_cast<int>(std::floor((x[a] + r - g.origin[a]) / g.h)));
  }
  for (int k = lo[2]; k <= hi[2]; ++k)
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int i = lo[0]; i <= hi[0]; ++i) f(g.id(i, j, k));
}

}  // namespace

double square_function(const GridField& u, const Domain& domain, const Vec& x, double aperture,
                       double s, double t) {
  require(aperture >= 2, Err::BadArgument, "aperture must be >= 2");
  const Grid& g = domain.grid;
  const int n = g.dim - 1;
  Cone cone{x, aperture, s, t};
  double acc = 0;
  const double vol = std::pow(g.h, g.dim);
  double reach = std::isfinite(t) ? aperture * t : std::numeric_limits<double>::infinity();
  for_cells_near(g, x, reach, [&](long c) {
    if (!cone.contains(domain, c)) return;
    Vec gr = gradient(u, c);
    acc += dot(gr, gr) * std::pow(domain.dist[c], 1 - n) * vol;
  });
  return std::sqrt(acc);
}

NontangentialMax nontangential_max(const GridField& u, const Domain& domain, const Vec& x,
                                   double aperture, double s, double t) {
  require(aperture >= 2, Err::BadArgument, "aperture must be >= 2");
  Cone cone{x, aperture, s, t};
  NontangentialMax r;
  bool any = false;
  double reach = std::isfinite(t) ? aperture * t : std::numeric_limits<double>::infinity();
  for_cells_near(domain.grid, x, reach, [&](long c) {
    if (!cone.contains(domain, c)) return;
    any = true;
    r.value = std::max(r.value, std::abs(u[c]));
  });
  r.empty_cone = !any;
  return r;
}

double carleson_energy(const GridField& u, const Domain& domain, const Vec& center, double radius,
                       int n) {
  const Grid& g = domain.grid;
  double umax = 0;
  for (long c = 0; c < g.ncells(); ++c)
    if (domain.interior(c)) umax = std::max(umax, std::abs(u[c]));
  if (umax == 0) return 0.0;
  double acc = 0;
  const double vol = std::pow(g.h, g.dim);
  for_cells_near(g, center, radius, [&](long c) {
    if (!domain.interior(c)) return;
    if (dist(g.center(c), center) > radius) return;
    Vec gr = gradient(u, c);
    acc += dot(gr, gr) * domain.dist[c] * vol;
  });
  return acc / (std::pow(radius, n) * umax * umax);
}

double cone_region_volume(const Domain& domain, const Cone& cone) {
  double count = 0;
  double reach = std::isfinite(cone.t) ? cone.aperture * cone.t
                                       : std::numeric_limits<double>::infinity();
  for_cells_near(domain.grid, cone.vertex, reach, [&](long c) {
    if (cone.contains(domain, c)) count += 1;
  });
  return count * std::pow(domain.grid.h, domain.grid.dim);
}

SOverNReport s_over_n_ratio(const DiscreteOperator& op, const Domain& domain,
                            const BoundarySet& set,
                            const std::vector<std::vector<double>>& data_family, double p,
                            double aperture, int stride) {
  require(p >= 2, Err::BadArgument, "p must be >= 2");
  require(!data_family.empty(), Err::BadArgument, "data family is empty");
  SOverNReport rep;
  const double s_cut = 2 * domain.grid.h;
  double t_cut = set.diameter();
  for (const auto& data : data_family) {
    auto sol = solve_dirichlet(op, data);
    double snorm = 0, nnorm = 0, wsum = 0;
    for (std::size_t k = 0; k < set.cells.size(); k += static_cast<std::size_t>(stride)) {
      Vec x = set.grid.center(set.cells[k]);
      double w = set.weight[k];
      double S = square_function(sol.u, domain, x, aperture, s_cut, t_cut);
      auto N = nontangential_max(sol.u, domain, x, aperture);
      snorm += std::pow(S, p) * w;
      nnorm += std::pow(N.value, p) * w;
      wsum += w;
    }
    (void)wsum;
    require(nnorm > 0, Err::ZeroDenominator, "nontangential maximal norm vanishes");
    double ratio = std::pow(snorm, 1 / p) / std::pow(nnorm, 1 / p);
    rep.ratios.push_back(ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
  }
  return rep;
}

ApproximabilityReport epsilon_approximability_cost(const GridField& u, const Domain& domain,
                                                   const WhitneyDecomposition& wd,
                                                   const Vec& center, double radius, double eps,
                                                   int n) {
  require(eps > 0, Err::BadArgument, "eps must be positive");
  const Grid& g = domain.grid;
  ApproximabilityReport rep;
  rep.phi = GridField(g, 0.0);

  // per-cube averages of u
  std::vector<double> avg(wd.cubes.size(), 0.0);
  std::vector<long> cnt(wd.cubes.size(), 0);
  for (long c = 0; c < g.ncells(); ++c) {
    int q = wd.cube_of_cell[c];
    if (q < 0) continue;
    avg[q] += u[c];
    cnt[q] += 1;
  }
  for (std::size_t q = 0; q < avg.size(); ++q)
    if (cnt[q] > 0) avg[q] /= static_cast<double>(cnt[q]);

  // assign phi; cells outside every Whitney cube inherit the value through a
  // face-adjacency sweep so the thin near-boundary layer is still covered
  std::vector<std::int32_t> owner(wd.cube_of_cell.begin(), wd.cube_of_cell.end());
  std::deque<long> frontier;
  for (long c = 0; c < g.ncells(); ++c)
    if (owner[c] >= 0) frontier.push_back(c);
  while (!frontier.empty()) {
    long c = frontier.front();
    frontier.pop_front();
    auto ijk = g.coords(c);
    for (int a = 0; a < g.dim; ++a)
      for (int s = -1; s <= 1; s += 2) {
        int t[3] = {ijk[0], ijk[1], ijk[2]};
        t[a] += s;
        if (!g.in_range(t[0], t[1], t[2])) continue;
        long nb = g.id(t[0], t[1], t[2]);
        if (owner[nb] >= 0 || !domain.interior(nb)) continue;
        owner[nb] = owner[c];
        frontier.push_back(nb);
      }
  }
  for (long c = 0; c < g.ncells(); ++c)
    if (owner[c] >= 0) rep.phi[c] = avg[owner[c]];

  // jump cost over faces between differently-owned cells inside the ball
  double face_area = std::pow(g.h, g.dim - 1);
  double cost = 0;
  for_cells_near(g, center, radius, [&](long c) {
    if (owner[c] < 0) return;
    if (dist(g.center(c), center) > radius) return;
    auto ijk = g.coords(c);
    for (int a = 0; a < g.dim; ++a) {
      int t[3] = {ijk[0], ijk[1], ijk[2]};
      t[a] += 1;
      if (!g.in_range(t[0], t[1], t[2])) continue;
      long nb = g.id(t[0], t[1], t[2]);
      if (owner[nb] < 0 || owner[nb] == owner[c]) continue;
      cost += std::abs(avg[owner[nb]] - avg[owner[c]]) * face_area;
    }
  });
  rep.cost = cost / std::pow(radius, n);

  // The sup is taken over the Whitney-covered part of the ball: below the
  // one-cell cube floor (dist < ~16h) no piecewise-constant candidate can
  // track u, the same near-set truncation the cone functionals use.
  double err = 0;
  for_cells_near(g, center, radius, [&](long c) {
    if (!domain.interior(c) || wd.cube_of_cell[c] < 0) return;
    if (dist(g.center(c), center) > radius) return;
    err = std::max(err, std::abs(u[c] - rep.phi[c]));
  });
  rep.sup_error = err;
  rep.success = err < eps;
  return rep;
}

double second_derivative_carleson(const GridField& u_star, const GridField& u,
                                  const std::vector<long>& sawtooth, const Domain& domain,
                                  double mu_S) {
  require(mu_S > 0, Err::BadArgument, "mu_S must be positive");
  const Grid& g = domain.grid;
  const double vol = std::pow(g.h, g.dim);
  double acc = 0;
  for (long c : sawtooth) {
    auto ijk = g.coords(c);
    // all stencil cells must be interior
    bool ok = domain.interior(c);
    for (int a = 0; ok && a < g.dim; ++a)
      for (int s = -1; ok && s <= 1; s += 2) {
        int t[3] = {ijk[0], ijk[1], ijk[2]};
        t[a] += s;
        ok = g.in_range(t[0], t[1], t[2]) && domain.interior(g.id(t[0], t[1], t[2]));
      }
    if (g.dim >= 2)
      for (int s1 = -1; ok && s1 <= 1; s1 += 2)
        for (int s2 = -1; ok && s2 <= 1; s2 += 2) {
          int t[3] = {ijk[0] + s1, ijk[1] + s2, ijk[2]};
          ok = g.in_range(t[0], t[1], t[2]) && domain.interior(g.id(t[0], t[1], t[2]));
        }
    if (!ok) continue;

    double h2 = g.h * g.h;
    double frob = 0;
    for (int a = 0; a < g.dim; ++a) {
      int tp[3] = {ijk[0], ijk[1], ijk[2]}, tm[3] = {ijk[0], ijk[1], ijk[2]};
      tp[a] += 1;
      tm[a] -= 1;
      double daa =
          (u_star[g.id(tp[0], tp[1], tp[2])] - 2 * u_star[c] + u_star[g.id(tm[0], tm[1], tm[2])]) /
          h2;
      frob += daa * daa;
    }
    for (int a = 0; a < g.dim; ++a)
      for (int b = a + 1; b < g.dim; ++b) {
        int pp[3] = {ijk[0], ijk[1], ijk[2]}, pm[3] = {ijk[0], ijk[1], ijk[2]};
        int mp[3] = {ijk[0], ijk[1], ijk[2]}, mm[3] = {ijk[0], ijk[1], ijk[2]};
        pp[a] += 1;
        pp[b] += 1;
        pm[a] += 1;
        pm[b] -= 1;
        mp[a] -= 1;
        mp[b] += 1;
        mm[a] -= 1;
        mm[b] -= 1;
        if (!g.in_range(pp[0], pp[1], pp[2]) || !g.in_range(pm[0], pm[1], pm[2]) ||
            !g.in_range(mp[0], mp[1], mp[2]) || !g.in_range(mm[0], mm[1], mm[2]))
          continue;
        double dab = (u_star[g.id(pp[0], pp[1], pp[2])] - u_star[g.id(pm[0], pm[1], pm[2])] -
                      u_star[g.id(mp[0], mp[1], mp[2])] + u_star[g.id(mm[0], mm[1], mm[2])]) /
                     (4 * h2);
        frob += 2 * dab * dab;
      }
    acc += frob * std::max(u[c], 0.0) * vol;
  }
  return acc / mu_S;
}

}  // namespace ura
