#include "ura/acf.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <map>
#include <numeric>

namespace ura {

// ---------------------------------------------------------------------------
// Pairs

double SubharmonicPair::overlap() const {
  double m1 = u1.max_abs(), m2 = u2.max_abs();
  if (m1 == 0 || m2 == 0) return 0;
  double worst = 0;
  for (long c = 0; c < u1.grid.ncells(); ++c)
    worst = std::max(worst, (u1[c] / m1) * (u2[c] / m2));
  return worst;
}

SubharmonicPair make_halfplane_pair(const Grid& grid, int axis) {
  SubharmonicPair p;
  p.u1 = GridField(grid, 0.0);
  p.u2 = GridField(grid, 0.0);
  p.x = Vec{};
  for (long c = 0; c < grid.ncells(); ++c) {
    double v = grid.center(c)[axis];
    p.u1[c] = std::max(v, 0.0);
    p.u2[c] = std::max(-v, 0.0);
  }
  return p;
}

SubharmonicPair make_cone_pair(const Grid& grid, double base1, double opening1, double base2,
                               double opening2) {
  require(grid.dim == 2, Err::BadArgument, "cone pairs are ambient-2 fixtures");
  auto profile = [](const Vec& p, double base, double opening) {
    double rho = std::hypot(p[0], p[1]);
    if (rho == 0) return 0.0;
    double gamma = M_PI / opening;
    double phi = std::atan2(p[1], p[0]) - base;
    phi = std::fmod(phi + 4 * M_PI, 2 * M_PI);
    if (phi <= 0 || phi >= opening) return 0.0;
    return std::pow(rho, gamma) * std::sin(gamma * phi);
  };
  SubharmonicPair p;
  p.u1 = GridField(grid, 0.0);
  p.u2 = GridField(grid, 0.0);
  p.x = Vec{};
  for (long c = 0; c < grid.ncells(); ++c) {
    Vec q = grid.center(c);
    p.u1[c] = profile(q, base1, opening1);
    p.u2[c] = profile(q, base2, opening2);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Oscillation modulus

double OscillationModulus::at(double r) const {
  if (radii.empty()) return 0;
  auto it = std::upper_bound(radii.begin(), radii.end(), r + 1e-15);
  if (it == radii.begin()) return values.front();
  return values[static_cast<std::size_t>(it - radii.begin()) - 1];
}

double OscillationModulus::integral_dr_over_r(double r1, double r2) const {
  require(r1 > 0 && r2 >= r1, Err::BadArgument, "bad integration range");
  // trapezoid over the union of the modulus grid and the endpoints
  std::vector<double> pts{r1, r2};
  for (double r : radii)
    if (r > r1 && r < r2) pts.push_back(r);
  std::sort(pts.begin(), pts.end());
  double acc = 0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    double fa = at(pts[k]) / pts[k], fb = at(pts[k + 1]) / pts[k + 1];
    acc += 0.5 * (fa + fb) * (pts[k + 1] - pts[k]);
  }
  return acc;
}

OscillationModulus oscillation_w(const CoefficientField& A, const Vec& x,
                                 const std::vector<double>& radii) {
  require(!radii.empty(), Err::BadArgument, "empty radius list");
  const Grid& g = A.grid;
  long cx = g.cell_of(x);
  require(cx >= 0, Err::BadArgument, "x outside the grid");
  Mat ax = A.at(cx);
  Mat id = Mat::identity(g.dim);
  // tolerate the cell-center offset: within one cell the field may move by
  // its local oscillation even when A(x) = Id holds exactly in the continuum
  double local_osc = 0;
  auto ijk = g.coords(cx);
  for (int a = 0; a < g.dim; ++a)
    for (int sgn = -1; sgn <= 1; sgn += 2) {
      int t[3] = {ijk[0], ijk[1], ijk[2]};
      t[a] += sgn;
      if (!g.in_range(t[0], t[1], t[2])) continue;
      local_osc = std::max(local_osc, mat_opnorm(A.at(g.id(t[0], t[1], t[2])) - ax, g.dim));
    }
  require(mat_opnorm(ax - id, g.dim) <= 1e-10 + 1.5 * local_osc, Err::NotNormalized,
          "A(x) != Id; apply the normalizing pullback first");

  OscillationModulus w;
  w.radii = radii;
  std::sort(w.radii.begin(), w.radii.end());
  double rmax = w.radii.back();

  // collect (rho, three sup terms) per cell, then prefix maxima
  std::vector<std::pair<double, std::array<double, 3>>> samples;
  for (long c = 0; c < g.ncells(); ++c) {
    double rho = dist(g.center(c), x);
    if (rho > rmax + g.h) continue;
    double t1 = mat_opnorm(A.at(c) - id, g.dim);
    double t2 = rho * (norm(A.b_at(c)) + norm(A.e_at(c)));
    double t3 = rho * rho * std::abs(A.d_at(c));
    samples.push_back({rho, {t1, t2, t3}});
  }
  std::sort(samples.begin(), samples.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  w.values.resize(w.radii.size());
  std::array<double, 3> run{0, 0, 0};
  std::size_t si = 0;
  for (std::size_t k = 0; k < w.radii.size(); ++k) {
    while (si < samples.size() && samples[si].first <= w.radii[k]) {
      for (int t = 0; t < 3; ++t) run[t] = std::max(run[t], samples[si].second[t]);
      ++si;
    }
    w.values[k] = run[0] + run[1] + run[2];
  }
  return w;
}

// ---------------------------------------------------------------------------
// J and K_r

namespace {

// Fraction of the cell with center p inside B(x,r), by subsampling cells that
// straddle the sphere; 0/1 otherwise.
double ball_fraction(const Grid& g, const Vec& p, const Vec& x, double r) {
  double rho = dist(p, x);
  double half_diag = 0.5 * g.h * std::sqrt(static_cast<double>(g.dim));
  if (rho <= r - half_diag) return 1.0;
  if (rho >= r + half_diag) return 0.0;
  int sub = 4;
  int inside = 0, total = 0;
  for (int k = 0; k < (g.dim == 3 ? sub : 1); ++k)
    for (int j = 0; j < sub; ++j)
      for (int i = 0; i < sub; ++i) {
        Vec q = p;
        q[0] += ((i + 0.5) / sub - 0.5) * g.h;
        q[1] += ((j + 0.5) / sub - 0.5) * g.h;
        if (g.dim == 3) q[2] += ((k + 0.5) / sub - 0.5) * g.h;
        ++total;
        inside += dist(q, x) <= r;
      }
  return static_cast<double>(inside) / total;
}

// Integral weight of |y-x|^{1-n} over the cell containing x (exact polar form
// over the volume-equivalent ball).
double center_cell_weight(const Grid& g) {
  if (g.dim == 2) return g.h * g.h;  // n = 1: no singular factor
  double req = g.h * std::pow(3.0 / (4 * M_PI), 1.0 / 3.0);
  return 2 * M_PI * req * req;
}

double gradient_energy_factor(const GridField& u, const Vec& x, double r) {
  const Grid& g = u.grid;
  const int n = g.dim - 1;
  const double vol = std::pow(g.h, g.dim);
  long cx = g.cell_of(x);
  double acc = 0;
  int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
  for (int a = 0; a < g.dim; ++a) {
    lo[a] = std::max(0, static_cast<int>(std::floor((x[a] - r - g.origin[a]) / g.h)) - 1);
    hi[a] = std::min(g.n[a] - 1, static_cast<int>(std::floor((x[a] + r - g.origin[a]) / g.h)) + 1);
  }
  for (int k = lo[2]; k <= hi[2]; ++k)
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int i = lo[0]; i <= hi[0]; ++i) {
        long c = g.id(i, j, k);
        Vec p = g.center(c);
        double frac = ball_fraction(g, p, x, r);
        if (frac == 0) continue;
        Vec gr = gradient(u, c);
        double g2 = dot(gr, gr);
        if (c == cx) {
          acc += g2 * center_cell_weight(g) * frac;
        } else {
          acc += g2 * std::pow(dist(p, x), 1 - n) * vol * frac;
        }
      }
  return acc / (r * r);
}

double value_energy_factor(const GridField& u, const Vec& x, double r) {
  const Grid& g = u.grid;
  const int n = g.dim - 1;
  const double vol = std::pow(g.h, g.dim);
  long cx = g.cell_of(x);
  double acc = 0;
  int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
  for (int a = 0; a < g.dim; ++a) {
    lo[a] = std::max(0, static_cast<int>(std::floor((x[a] - r - g.origin[a]) / g.h)) - 1);
    hi[a] = std::min(g.n[a] - 1, static_cast<int>(std::floor((x[a] + r - g.origin[a]) / g.h)) + 1);
  }
  for (int k = lo[2]; k <= hi[2]; ++k)
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int i = lo[0]; i <= hi[0]; ++i) {
        long c = g.id(i, j, k);
        if (c == cx) continue;  // u(x) = 0: the center cell carries no mass
        Vec p = g.center(c);
        double frac = ball_fraction(g, p, x, r);
        if (frac == 0) continue;
        acc += u[c] * u[c] * std::pow(dist(p, x), -n - 1) * vol * frac;
      }
  return acc;
}

}  // namespace

double acf_J(const SubharmonicPair& pair, double r) {
  const Grid& g = pair.u1.grid;
  require(r >= 4 * g.h, Err::RadiusTooSmall, "r must be at least 4h");
  double f1 = gradient_energy_factor(pair.u1, pair.x, r);
  double f2 = gradient_energy_factor(pair.u2, pair.x, r);
  return f1 * f2;
}

double acf_Kr(const SubharmonicPair& pair, double r) {
  const Grid& g = pair.u1.grid;
  require(r >= 4 * g.h, Err::RadiusTooSmall, "r must be at least 4h");
  double g1 = gradient_energy_factor(pair.u1, pair.x, r) * r * r;
  double g2 = gradient_energy_factor(pair.u2, pair.x, r) * r * r;
  require(g1 > 0 && g2 > 0, Err::DegeneratePair, "a gradient integral vanishes");
  double v1 = value_energy_factor(pair.u1, pair.x, r);
  double v2 = value_energy_factor(pair.u2, pair.x, r);
  return std::max(std::sqrt(v1 / g1), std::sqrt(v2 / g2));
}

DiniReport dini_constant(const std::function<double(double)>& w0) {
  // dyadic blocks [2^-k-1, 2^-k], Simpson on each; the tail must be Cauchy
  DiniReport rep;
  auto f = [&](double t) {
    double v = w0(t) * std::log(1 / t);
    return v * v / t;
  };
  auto simpson = [&](double a, double b) {
    int m = 32;
    double s = 0, step = (b - a) / m;
    for (int i = 0; i < m; ++i) {
      double x0 = a + i * step, x1 = x0 + step;
      s += (step / 6) * (f(x0) + 4 * f(0.5 * (x0 + x1)) + f(x1));
    }
    return s;
  };
  double total = 0;
  double prev_block = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 60; ++k) {
    double b = std::pow(2.0, -k), a = b / 2;
    double blk = simpson(a, b);
    total += blk;
    if (k >= 12) {
      // Cauchy test: dyadic contributions must decay
      if (blk > 0.9 * prev_block && blk > 1e-12 * std::max(total, 1.0)) {
        rep.diverged = true;
        rep.value = total;
        return rep;
      }
    }
    prev_block = blk;
    if (blk < 1e-14 * std::max(total, 1e-30)) break;
  }
  rep.value = total;
  return rep;
}

MonotonicityReport monotonicity_check(const SubharmonicPair& pair, const OscillationModulus& w,
                                      double r1, double r2, double c, double tol) {
  require(r1 < r2, Err::BadArgument, "need r1 < r2");
  MonotonicityReport rep;
  rep.lhs = acf_J(pair, r1);
  rep.integral = w.integral_dr_over_r(r1, r2);
  rep.rhs = acf_J(pair, r2) * std::exp(c * rep.integral);
  rep.pass = rep.lhs <= rep.rhs * (1 + tol);
  return rep;
}

// ---------------------------------------------------------------------------
// Spherical domains

double SphereMesh::tri_area(int t) const {
  const Vec &a = verts[tris[t][0]], &b = verts[tris[t][1]], &c = verts[tris[t][2]];
  Vec u = b - a, v = c - a;
  Vec cr = vec3(u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]);
  return 0.5 * norm(cr);
}

SphereMesh make_octasphere(int level) {
  SphereMesh m;
  m.verts = {vec3(1, 0, 0),  vec3(-1, 0, 0), vec3(0, 1, 0),
             vec3(0, -1, 0), vec3(0, 0, 1),  vec3(0, 0, -1)};
  m.tris = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4}, {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Vec p = (m.verts[a] + m.verts[b]) * 0.5;
      double nn = norm(p);
      p = p * (1.0 / nn);
      int id = static_cast<int>(m.verts.size());
      m.verts.push_back(p);
      midpoint[key] = id;
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(m.tris.size() * 4);
    for (auto& t : m.tris) {
      int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({ab, t[1], bc});
      next.push_back({ca, bc, t[2]});
      next.push_back({ab, bc, ca});
    }
    m.tris = std::move(next);
  }
  m.vertex_area.assign(m.verts.size(), 0.0);
  for (int t = 0; t < static_cast<int>(m.tris.size()); ++t) {
    double a3 = m.tri_area(t) / 3;
    for (int v : m.tris[t]) m.vertex_area[v] += a3;
  }
  return m;
}

double SphericalDomain::measure() const {
  if (ambient_dim == 2) {
    double s = 0;
    for (auto& [a, b] : arcs) s += b - a;
    return s;
  }
  double s = 0;
  for (std::size_t v = 0; v < inside.size(); ++v)
    if (inside[v]) s += mesh->vertex_area[v];
  return s;
}

SphericalDomain arc_domain(double start, double end) {
  require(end > start, Err::BadArgument, "empty arc");
  SphericalDomain s;
  s.ambient_dim = 2;
  s.arcs = {{start, end}};
  return s;
}

SphericalDomain cap_domain(int mesh_level, const Vec& axis, double polar_angle) {
  auto mesh = std::make_shared<SphereMesh>(make_octasphere(mesh_level));
  double nn = norm(axis);
  Vec ax = axis * (1.0 / nn);
  double cosang = std::cos(polar_angle);
  SphericalDomain s;
  s.ambient_dim = 3;
  s.mesh = mesh;
  s.inside.resize(mesh->verts.size());
  for (std::size_t v = 0; v < mesh->verts.size(); ++v)
    s.inside[v] = dot(mesh->verts[v], ax) > cosang + 1e-12;
  return s;
}

SphericalDomain mask_domain(std::shared_ptr<const SphereMesh> mesh,
                            const std::function<bool(const Vec&)>& pred) {
  SphericalDomain s;
  s.ambient_dim = 3;
  s.mesh = mesh;
  s.inside.resize(mesh->verts.size());
  for (std::size_t v = 0; v < mesh->verts.size(); ++v) s.inside[v] = pred(mesh->verts[v]);
  return s;
}

namespace {

double dirichlet_eigenvalue_3d(const SphericalDomain& sd) {
  const SphereMesh& m = *sd.mesh;
  std::vector<int> index(m.verts.size(), -1);
  int ni = 0;
  for (std::size_t v = 0; v < m.verts.size(); ++v)
    if (sd.inside[v]) index[v] = ni++;
  require(ni > 0, Err::EmptyDomain, "spherical domain has no interior vertex");
  require(ni < static_cast<int>(m.verts.size()), Err::FullSphere,
          "spherical domain leaves no Dirichlet boundary");

  // cotan weights; boundary vertices contribute to stiffness only
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(ni);
  for (std::size_t v = 0; v < m.verts.size(); ++v)
    if (index[v] >= 0) mass[index[v]] = m.vertex_area[v];
  std::map<std::pair<int, int>, double> wsum;
  for (auto& t : m.tris) {
    for (int e = 0; e < 3; ++e) {
      int i = t[e], j = t[(e + 1) % 3], k = t[(e + 2) % 3];
      Vec u = m.verts[i] - m.verts[k], v2 = m.verts[j] - m.verts[k];
      Vec cr = vec3(u[1] * v2[2] - u[2] * v2[1], u[2] * v2[0] - u[0] * v2[2],
                    u[0] * v2[1] - u[1] * v2[0]);
      double cot = dot(u, v2) / std::max(norm(cr), 1e-300);
      auto key = std::minmax(i, j);
      wsum[key] += 0.5 * cot;
    }
  }
  std::vector<double> diag(ni, 0.0);
  for (auto& [key, w] : wsum) {
    int i = key.first, j = key.second;
    if (index[i] >= 0) diag[index[i]] += w;
    if (index[j] >= 0) diag[index[j]] += w;
    if (index[i] >= 0 && index[j] >= 0) {
      trip.emplace_back(index[i], index[j], -w);
      trip.emplace_back(index[j], index[i], -w);
    }
  }
  for (int i = 0; i < ni; ++i) trip.emplace_back(i, i, diag[i] + 1e-12);
  Eigen::SparseMatrix<double> L(ni, ni);
  L.setFromTriplets(trip.begin(), trip.end());

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> fac(L);
  require(fac.info() == Eigen::Success, Err::SolveFailure, "stiffness factorization failed");
  Eigen::VectorXd x = Eigen::VectorXd::Ones(ni);
  double lam = 0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd y = fac.solve(mass.asDiagonal() * x);
    double nrm = std::sqrt((y.array().square() * mass.array()).sum());
    y /= nrm;
    double lam_new = (y.transpose() * (L * y)).value() /
                     (y.array().square() * mass.array()).sum();
    if (std::abs(lam_new - lam) <= 1e-12 * std::max(1.0, lam_new)) {
      lam = lam_new;
      break;
    }
    lam = lam_new;
    x = y;
  }
  return lam;
}

}  // namespace

CharacteristicConstant characteristic_constant(const SphericalDomain& sigma) {
  CharacteristicConstant cc;
  int n;
  if (sigma.ambient_dim == 2) {
    require(!sigma.arcs.empty(), Err::EmptyDomain, "no arcs");
    double total = sigma.measure();
    require(total < 2 * M_PI - 1e-12, Err::FullSphere, "arcs cover the whole circle");
    double lam = std::numeric_limits<double>::infinity();
    for (auto& [a, b] : sigma.arcs) {
      double theta = b - a;
      lam = std::min(lam, (M_PI / theta) * (M_PI / theta));
    }
    cc.lambda = lam;
    n = 1;
  } else {
    cc.lambda = dirichlet_eigenvalue_3d(sigma);
    n = 2;
  }
  cc.gamma = 0.5 * (-(n - 1) + std::sqrt((n - 1) * (n - 1) + 4 * cc.lambda));
  return cc;
}

TwoPhaseReport friedland_hayman_check(const SphericalDomain& s1, const SphericalDomain& s2) {
  // disjointness
  if (s1.ambient_dim == 2) {
    for (auto& [a1, b1] : s1.arcs)
      for (auto& [a2, b2] : s2.arcs)
        require(b1 <= a2 + 1e-12 || b2 <= a1 + 1e-12, Err::BadArgument, "arcs overlap");
  } else {
    require(s1.mesh == s2.mesh, Err::BadArgument, "domains on different meshes");
    for (std::size_t v = 0; v < s1.inside.size(); ++v)
      require(!(s1.inside[v] && s2.inside[v]), Err::BadArgument, "domains overlap");
  }
  TwoPhaseReport rep;
  rep.gamma1 = characteristic_constant(s1).gamma;
  rep.gamma2 = characteristic_constant(s2).gamma;
  rep.sum = rep.gamma1 + rep.gamma2;
  double sphere = (s1.ambient_dim == 2) ? 2 * M_PI : 4 * M_PI;
  rep.defect = std::abs(s1.measure() - sphere / 2) / sphere;
  if (rep.defect > 0) rep.defect_ratio = (rep.sum - 2) / (rep.defect * rep.defect);
  return rep;
}

// ---------------------------------------------------------------------------
// Energy and growth

GradientEnergyReport gradient_energy_bound(const GridField& u, const CoefficientField& A,
                                           const Vec& x, double r) {
  const Grid& g = u.grid;
  GradientEnergyReport rep;

  // stencil residual of -div(A grad u) where u > 0, one cell inside the
  // support edge; subharmonic means the residual stays <= 0 up to noise
  const double scale = u.max_abs() / (g.h * g.h);
  for (long c = 0; c < g.ncells(); ++c) {
    if (u[c] <= 0) continue;
    auto ijk = g.coords(c);
    bool interior_support = true;
    double lap = 0;
    for (int a = 0; a < g.dim && interior_support; ++a)
      for (int s = -1; s <= 1 && interior_support; s += 2) {
        int t[3] = {ijk[0], ijk[1], ijk[2]};
        t[a] += s;
        if (!g.in_range(t[0], t[1], t[2])) {
          interior_support = false;
          break;
        }
        long nb = g.id(t[0], t[1], t[2]);
        if (u[nb] <= 0) interior_support = false;
        Mat Af = (A.at(c) + A.at(nb)) * 0.5;
        lap += Af(a, a) * (u[nb] - u[c]) / (g.h * g.h);
      }
    if (!interior_support) continue;
    // off-diagonal legs via the full flux form (central)
    Mat Ac = A.at(c);
    for (int a = 0; a < g.dim; ++a)
      for (int b = 0; b < g.dim; ++b) {
        if (a == b || Ac(a, b) == 0) continue;
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
        lap += Ac(a, b) *
               (u[g.id(pp[0], pp[1], pp[2])] - u[g.id(pm[0], pm[1], pm[2])] -
                u[g.id(mp[0], mp[1], mp[2])] + u[g.id(mm[0], mm[1], mm[2])]) /
               (4 * g.h * g.h);
      }
    // -div(A grad u) <= 0 for subharmonic u: report the worst positive excess
    rep.worst_residual = std::max(rep.worst_residual, -lap / std::max(scale, 1e-300));
  }

  rep.energy = gradient_energy_factor(u, x, r) * r * r;
  double sup = 0;
  for (long c = 0; c < g.ncells(); ++c)
    if (dist(g.center(c), x) <= 2 * r) sup = std::max(sup, std::abs(u[c]));
  rep.sup2 = sup * sup;
  rep.ratio = rep.sup2 > 0 ? rep.energy / rep.sup2 : 0.0;
  return rep;
}

GrowthReport growth_lemma_check(const SubharmonicPair& pair, const OscillationModulus& w,
                                double r1, double r2, double M, double eta, int radius_count) {
  require(r2 > r1, Err::BadArgument, "degenerate radius range");
  require(M > 1 && eta > 0 && eta < 1, Err::BadArgument, "need M > 1, eta in (0,1)");
  const Grid& g = pair.u1.grid;
  GrowthReport rep;
  rep.w_max = w.at(r2);

  // zero-set volume fraction over the annuli A(x, r, M r)
  double worst = 1.0;
  double worst_r = r1;
  for (int k = 0; k < 8; ++k) {
    double r = r1 * std::pow(r2 / (M * r1), k / 7.0);
    if (r * M > r2 * M) break;
    long zero = 0, total = 0;
    for (long c = 0; c < g.ncells(); ++c) {
      double rho = dist(g.center(c), pair.x);
      if (rho < r || rho > M * r) continue;
      ++total;
      if (pair.u1[c] <= 0 && pair.u2[c] <= 0) ++zero;
    }
    if (total == 0) continue;
    double frac = static_cast<double>(zero) / total;
    if (frac < worst) {
      worst = frac;
      worst_r = r;
    }
  }
  rep.worst_annulus_fraction = worst;
  require(worst >= eta, Err::ZeroSetConditionFails,
          "zero-set fraction " + format_double(worst) + " below eta at r = " +
              format_double(worst_r));

  // least-squares fit of log J against log r
  std::vector<double> lx, ly;
  for (int k = 0; k < radius_count; ++k) {
    double r = r1 * std::pow(r2 / r1, static_cast<double>(k) / (radius_count - 1));
    double j = acf_J(pair, r);
    if (j <= 0) continue;
    lx.push_back(std::log(r));
    ly.push_back(std::log(j));
  }
  require(lx.size() >= 3, Err::BadArgument, "not enough radii for the fit");
  double n = static_cast<double>(lx.size());
  double sx = std::accumulate(lx.begin(), lx.end(), 0.0);
  double sy = std::accumulate(ly.begin(), ly.end(), 0.0);
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += lx[k] * lx[k];
    sxy += lx[k] * ly[k];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double intercept = (sy - slope * sx) / n;
  double sse = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    double e = ly[k] - slope * lx[k] - intercept;
    sse += e * e;
  }
  double var = sse / std::max(n - 2, 1.0);
  rep.rho = slope;
  rep.stderr_rho = std::sqrt(var / (sxx - sx * sx / n));
  rep.pass = slope - 2 * rep.stderr_rho > 0;
  return rep;
}

}  // namespace ura
