#include "ura/geometry.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <deque>
#include <fstream>
#include <queue>
#include <set>

#include "ura/edt.hpp"

namespace ura {

BoundaryKind boundary_kind_from_string(const std::string& s) {
  if (s == "hyperplane") return BoundaryKind::hyperplane;
  if (s == "lipschitz_graph") return BoundaryKind::lipschitz_graph;
  if (s == "parallel_planes") return BoundaryKind::parallel_planes;
  if (s == "four_corner_cantor") return BoundaryKind::four_corner_cantor;
  if (s == "sphere") return BoundaryKind::sphere;
  fail(Err::UnknownKind, "unknown boundary kind: " + s);
}

std::string to_string(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::hyperplane: return "hyperplane";
    case BoundaryKind::lipschitz_graph: return "lipschitz_graph";
    case BoundaryKind::parallel_planes: return "parallel_planes";
    case BoundaryKind::four_corner_cantor: return "four_corner_cantor";
    case BoundaryKind::sphere: return "sphere";
  }
  return "?";
}

double BoundarySet::total_measure() const {
  double s = 0;
  for (double w : weight) s += w;
  return s;
}

double BoundarySet::diameter() const {
  // Diameter of the bounding box of occupied centers; exact enough for
  // scale selection and cheap.
  if (cells.empty()) return 0;
  Vec lo = grid.center(cells.front()), hi = lo;
  for (long c : cells) {
    Vec p = grid.center(c);
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  return dist(lo, hi);
}

double BoundarySet::ball_measure(const Vec& x, double r) const {
  double s = 0;
  const double r2 = r * r;
  // Walk only the cells in the ball's index range along x.
  for (std::size_t k = 0; k < cells.size(); ++k) {
    Vec p = grid.center(cells[k]);
    double d2 = 0;
    for (int a = 0; a < ambient_dim; ++a) {
      double t = p[a] - x[a];
      d2 += t * t;
    }
    if (d2 <= r2) s += weight[k];
  }
  return s;
}

void BoundarySet::rebuild_index() {
  index_.clear();
  index_.reserve(cells.size() * 2);
  for (std::size_t k = 0; k < cells.size(); ++k) index_[cells[k]] = static_cast<int>(k);

  // Bucket grid roughly 32 cells per axis bucket.
  bucket_h_ = std::max(h * 32.0, 1e-12);
  for (int a = 0; a < 3; ++a) {
    double len = std::max(bbox.hi[a] - bbox.lo[a], h);
    bucket_n_[a] = std::max(1, static_cast<int>(std::ceil(len / bucket_h_)) + 1);
  }
  if (ambient_dim == 2) bucket_n_[2] = 1;
  buckets_.clear();
  for (std::size_t k = 0; k < cells.size(); ++k) {
    buckets_[bucket_of(grid.center(cells[k]))].push_back(static_cast<int>(k));
  }
}

long BoundarySet::bucket_of(const Vec& p) const {
  long b[3] = {0, 0, 0};
  for (int a = 0; a < ambient_dim; ++a) {
    long i = static_cast<long>(std::floor((p[a] - bbox.lo[a]) / bucket_h_));
    b[a] = std::clamp(i, 0L, static_cast<long>(bucket_n_[a] - 1));
  }
  return (b[2] * bucket_n_[1] + b[1]) * bucket_n_[0] + b[0];
}

double BoundarySet::dist_to_set(const Vec& p) const {
  long c = nearest_cell(p);
  return c < 0 ? std::numeric_limits<double>::infinity() : dist(p, grid.center(c));
}

long BoundarySet::nearest_cell(const Vec& p) const {
  require(!cells.empty(), Err::EmptySet, "boundary set is empty");
  long bi[3] = {0, 0, 0};
  for (int a = 0; a < ambient_dim; ++a) {
    long i = static_cast<long>(std::floor((p[a] - bbox.lo[a]) / bucket_h_));
    bi[a] = std::clamp(i, 0L, static_cast<long>(bucket_n_[a] - 1));
  }
  double best = std::numeric_limits<double>::infinity();
  long best_cell = -1;
  for (int ring = 0; ring < std::max({bucket_n_[0], bucket_n_[1], bucket_n_[2]}) + 1; ++ring) {
    // Scan the cube shell of buckets at L-inf distance `ring`.
    bool any_bucket = false;
    long lo[3], hi[3];
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::max(0L, bi[a] - ring);
      hi[a] = std::min(static_cast<long>(bucket_n_[a] - 1), bi[a] + ring);
    }
    for (long z = lo[2]; z <= hi[2]; ++z)
      for (long y = lo[1]; y <= hi[1]; ++y)
        for (long x = lo[0]; x <= hi[0]; ++x) {
          bool on_shell = (std::max({std::labs(x - bi[0]), std::labs(y - bi[1]),
                                     std::labs(z - bi[2])}) == ring);
          if (!on_shell) continue;
          auto it = buckets_.find((z * bucket_n_[1] + y) * bucket_n_[0] + x);
          if (it == buckets_.end()) continue;
          any_bucket = true;
          for (int k : it->second) {
            double d = dist(p, grid.center(cells[k]));
            if (d < best || (d == best && cells[k] < best_cell)) {
              best = d;
              best_cell = cells[k];
            }
          }
        }
    // Once something was found, one extra shell guarantees exactness.
    if (best_cell >= 0 && static_cast<double>(ring) * bucket_h_ > best + bucket_h_) break;
    (void)any_bucket;
  }
  return best_cell;
}

double BoundarySet::weight_of(long cell) const {
  auto it = index_.find(cell);
  return it == index_.end() ? 0.0 : weight[it->second];
}

bool BoundarySet::occupied(long cell) const { return index_.count(cell) > 0; }

int BoundarySet::ordinal_of(long cell) const {
  auto it = index_.find(cell);
  return it == index_.end() ? -1 : it->second;
}

void BoundarySet::save_binary(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  require(f.good(), Err::BadArgument, "cannot open " + path);
  auto put64 = [&](std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    f.write(reinterpret_cast<char*>(b), 8);
  };
  auto putd = [&](double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    put64(v);
  };
  put64(0x75726153455431ull);  // magic
  put64(static_cast<std::uint64_t>(ambient_dim));
  putd(h);
  for (int a = 0; a < 3; ++a) putd(bbox.lo[a]);
  for (int a = 0; a < 3; ++a) putd(bbox.hi[a]);
  put64(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    put64(static_cast<std::uint64_t>(cells[k]));
    putd(weight[k]);
  }
}

BoundarySet BoundarySet::load_binary(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), Err::BadArgument, "cannot open " + path);
  auto get64 = [&]() {
    unsigned char b[8];
    f.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  };
  auto getd = [&]() {
    std::uint64_t v = get64();
    double d;
    std::memcpy(&d, &v, 8);
    return d;
  };
  require(get64() == 0x75726153455431ull, Err::BadArgument, "bad set file magic");
  BoundarySet s;
  s.ambient_dim = static_cast<int>(get64());
  s.h = getd();
  for (int a = 0; a < 3; ++a) s.bbox.lo[a] = getd();
  for (int a = 0; a < 3; ++a) s.bbox.hi[a] = getd();
  s.grid = make_grid(s.bbox, s.h, s.ambient_dim);
  std::size_t m = get64();
  s.cells.resize(m);
  s.weight.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    s.cells[k] = static_cast<long>(get64());
    s.weight[k] = getd();
  }
  s.rebuild_index();
  return s;
}

void BoundarySet::save_csv(const std::string& path) const {
  std::ofstream f(path);
  require(f.good(), Err::BadArgument, "cannot open " + path);
  f << "cell,x,y,z,weight\r\n";
  for (std::size_t k = 0; k < cells.size(); ++k) {
    Vec p = grid.center(cells[k]);
    f << cells[k] << ',' << format_double(p[0]) << ',' << format_double(p[1]) << ','
      << format_double(p[2]) << ',' << format_double(weight[k]) << "\r\n";
  }
}

// ---------------------------------------------------------------------------
// Generators

namespace {

struct CellAccum {
  std::map<long, double> w;  // ordered for determinism
  void add(long cell, double v) {
    if (cell >= 0 && v != 0) w[cell] += v;
  }
};

BoundarySet finish(CellAccum& acc, const Grid& grid, const Box& box, BoundaryKind kind, double h,
                   int dim) {
  BoundarySet s;
  s.ambient_dim = dim;
  s.grid = grid;
  s.bbox = box;
  s.kind = to_string(kind);
  s.h = h;
  s.cells.reserve(acc.w.size());
  s.weight.reserve(acc.w.size());
  for (auto& [c, w] : acc.w) {
    s.cells.push_back(c);
    s.weight.push_back(w);
  }
  require(!s.cells.empty() && s.total_measure() > 0, Err::EmptySet, "generator produced no cells");
  s.rebuild_index();
  return s;
}

// Snap a plane offset onto the nearest cell-center coordinate along `axis`,
// keeping flat fixtures exactly on a raster row.
double snap_to_centers(const Grid& g, int axis, double c) {
  double rel = (c - g.origin[axis]) / g.h - 0.5;
  double snapped = std::clamp(std::round(rel), 0.0, static_cast<double>(g.n[axis] - 1));
  return g.origin[axis] + g.h * (snapped + 0.5);
}

// Rasterize the hyperplane {p[axis] = c} clipped to the box.  Weight per cell
// is exactly h^n (the plane passes through cell centers after snapping).
void raster_hyperplane(CellAccum& acc, const Grid& g, int axis, double c, int dim) {
  double cc = snap_to_centers(g, axis, c);
  int fixed = static_cast<int>(std::floor((cc - g.origin[axis]) / g.h));
  double wcell = (dim == 2) ? g.h : g.h * g.h;
  int idx[3];
  for (idx[2] = 0; idx[2] < (dim == 3 ? g.n[2] : 1); ++idx[2])
    for (idx[1] = 0; idx[1] < g.n[1]; ++idx[1])
      for (idx[0] = 0; idx[0] < g.n[0]; ++idx[0]) {
        if (idx[axis] != fixed) continue;
        acc.add(g.id(idx[0], idx[1], idx[2]), wcell);
      }
}

void raster_graph2(CellAccum& acc, const Grid& g, double slope, double wavelength, double y0) {
  // y = y0 + a sin(2 pi x / lambda), a chosen so sup|f'| equals `slope`.
  double lambda = wavelength > 0 ? wavelength : (g.box().hi[0] - g.box().lo[0]);
  double a = slope * lambda / (2 * M_PI);
  const int sub = 8;  // polygonal pieces per cell column
  for (int i = 0; i < g.n[0]; ++i) {
    double xl = g.origin[0] + g.h * i;
    for (int s = 0; s < sub; ++s) {
      double xa = xl + g.h * s / sub;
      double xb = xl + g.h * (s + 1) / sub;
      double ya = y0 + a * std::sin(2 * M_PI * xa / lambda);
      double yb = y0 + a * std::sin(2 * M_PI * xb / lambda);
      double len = std::hypot(xb - xa, yb - ya);
      Vec mid = vec2(0.5 * (xa + xb), 0.5 * (ya + yb));
      acc.add(g.cell_of(mid), len);
    }
  }
}

void raster_cantor(CellAccum& acc, const Grid& g, int depth, const Box& box) {
  // Four-corner construction with contraction 1/4 inside the unit square
  // anchored at box.lo; measure normalized to 1 overall.
  double side = std::pow(0.25, depth);
  long nsq = 1;
  for (int i = 0; i < depth; ++i) nsq *= 4;
  double per_square = 1.0 / static_cast<double>(nsq);
  std::vector<Vec> corners{vec2(0, 0)};
  for (int gen = 1; gen <= depth; ++gen) {
    double s = std::pow(0.25, gen);
    std::vector<Vec> next;
    next.reserve(corners.size() * 4);
    for (const Vec& c : corners) {
      double parent = 4 * s;
      next.push_back(c);
      next.push_back(vec2(c[0] + parent - s, c[1]));
      next.push_back(vec2(c[0], c[1] + parent - s));
      next.push_back(vec2(c[0] + parent - s, c[1] + parent - s));
    }
    corners = std::move(next);
  }
  int cells_per_side = std::max(1, static_cast<int>(std::round(side / g.h)));
  double wcell = per_square / (static_cast<double>(cells_per_side) * cells_per_side);
  for (const Vec& c : corners) {
    Vec lo = vec2(box.lo[0] + c[0], box.lo[1] + c[1]);
    for (int j = 0; j < cells_per_side; ++j)
      for (int i = 0; i < cells_per_side; ++i) {
        Vec p = vec2(lo[0] + (i + 0.5) * g.h, lo[1] + (j + 0.5) * g.h);
        acc.add(g.cell_of(p), wcell);
      }
  }
}

void raster_circle(CellAccum& acc, const Grid& g, const Vec& center, double radius) {
  // Polygonal arc length binned into crossed cells.
  int segments = std::max(64, static_cast<int>(std::ceil(2 * M_PI * radius / (g.h / 4))));
  for (int s = 0; s < segments; ++s) {
    double ta = 2 * M_PI * s / segments;
    double tb = 2 * M_PI * (s + 1) / segments;
    Vec pa = vec2(center[0] + radius * std::cos(ta), center[1] + radius * std::sin(ta));
    Vec pb = vec2(center[0] + radius * std::cos(tb), center[1] + radius * std::sin(tb));
    Vec mid = vec2(0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1]));
    acc.add(g.cell_of(mid), dist(pa, pb));
  }
}

void raster_sphere3(CellAccum& acc, const Grid& g, const Vec& center, double radius) {
  // Octahedron subdivision, triangle areas binned at centroids.
  struct Tri {
    Vec a, b, c;
  };
  std::vector<Tri> tris;
  const Vec vx = vec3(1, 0, 0), vy = vec3(0, 1, 0), vz = vec3(0, 0, 1);
  const Vec mvx = vec3(-1, 0, 0), mvy = vec3(0, -1, 0), mvz = vec3(0, 0, -1);
  for (const Vec& a : {vx, mvx})
    for (const Vec& b : {vy, mvy})
      for (const Vec& c : {vz, mvz}) tris.push_back({a, b, c});
  auto push_on_sphere = [&](Vec p) {
    double n = norm(p);
    return vec3(p[0] / n * radius + center[0], p[1] / n * radius + center[1],
                p[2] / n * radius + center[2]);
  };
  int levels = 0;
  double edge = radius * M_PI / 2;
  while (edge > g.h / 2 && levels < 12) {
    edge /= 2;
    ++levels;
  }
  std::deque<Tri> work(tris.begin(), tris.end());
  for (int l = 0; l < levels; ++l) {
    std::size_t m = work.size();
    for (std::size_t t = 0; t < m; ++t) {
      Tri tr = work.front();
      work.pop_front();
      Vec ab = (tr.a + tr.b) * 0.5, bc = (tr.b + tr.c) * 0.5, ca = (tr.c + tr.a) * 0.5;
      work.push_back({tr.a, ab, ca});
      work.push_back({ab, tr.b, bc});
      work.push_back({ca, bc, tr.c});
      work.push_back({ab, bc, ca});
    }
  }
  for (const Tri& t : work) {
    Vec a = push_on_sphere(t.a), b = push_on_sphere(t.b), c = push_on_sphere(t.c);
    Vec u = b - a, v = c - a;
    Vec cr = vec3(u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]);
    double area = 0.5 * norm(cr);
    Vec centroid = (a + b + c) * (1.0 / 3.0);
    acc.add(g.cell_of(centroid), area);
  }
}

}  // namespace

BoundarySet generate_boundary(BoundaryKind kind, const GeneratorParams& params, const Box& box,
                              double h, int ambient_dim) {
  require(h > 0, Err::BadArgument, "h must be positive");
  require(ambient_dim == 2 || ambient_dim == 3, Err::BadArgument, "ambient_dim must be 2 or 3");
  Grid g = make_grid(box, h, ambient_dim);
  CellAccum acc;
  switch (kind) {
    case BoundaryKind::hyperplane: {
      require(h <= box.max_side(ambient_dim) / 8, Err::ResolutionTooCoarse, "h too coarse for box");
      raster_hyperplane(acc, g, params.axis, params.offset, ambient_dim);
      break;
    }
    case BoundaryKind::lipschitz_graph: {
      require(ambient_dim == 2, Err::BadArgument, "lipschitz_graph implemented in ambient 2");
      require(params.slope >= 0, Err::BadArgument, "graph slope must be >= 0");
      double lambda = params.wavelength > 0 ? params.wavelength : box.side(0);
      double amp = params.slope * lambda / (2 * M_PI);
      require(amp == 0 || h <= amp / 8 || params.slope == 0, Err::ResolutionTooCoarse,
              "h too coarse for graph amplitude");
      raster_graph2(acc, g, params.slope, lambda, params.offset);
      break;
    }
    case BoundaryKind::parallel_planes: {
      require(params.separation > 0, Err::BadArgument, "separation must be positive");
      require(h <= params.separation / 8, Err::ResolutionTooCoarse, "h too coarse for separation");
      raster_hyperplane(acc, g, params.axis, params.offset - params.separation / 2, ambient_dim);
      raster_hyperplane(acc, g, params.axis, params.offset + params.separation / 2, ambient_dim);
      break;
    }
    case BoundaryKind::four_corner_cantor: {
      require(ambient_dim == 2, Err::BadArgument, "four_corner_cantor implemented in ambient 2");
      require(params.depth >= 1, Err::BadArgument, "cantor depth must be >= 1");
      double feature = std::pow(0.25, params.depth);
      require(h <= feature / 8 + 1e-15, Err::ResolutionTooCoarse, "h too coarse for cantor depth");
      raster_cantor(acc, g, params.depth, box);
      break;
    }
    case BoundaryKind::sphere: {
      require(params.radius > 0, Err::BadArgument, "radius must be positive");
      require(h <= params.radius / 8, Err::ResolutionTooCoarse, "h too coarse for radius");
      if (ambient_dim == 2)
        raster_circle(acc, g, params.center, params.radius);
      else
        raster_sphere3(acc, g, params.center, params.radius);
      break;
    }
  }
  return finish(acc, g, box, kind, h, ambient_dim);
}

// ---------------------------------------------------------------------------
// Domain

Domain make_domain(const BoundarySet& set, std::optional<Vec> component_of, bool reflecting_walls) {
  Domain d;
  d.grid = set.grid;
  d.reflecting_walls = reflecting_walls;
  const long nc = d.grid.ncells();
  d.state.assign(nc, Domain::Interior);
  std::vector<std::uint8_t> seeds(nc, 0);
  for (long c : set.cells) {
    d.state[c] = Domain::Boundary;
    seeds[c] = 1;
  }
  d.dist = distance_transform(d.grid, seeds);

  if (component_of) {
    long start = d.grid.cell_of(*component_of);
    require(start >= 0 && d.state[start] == Domain::Interior, Err::PointOutsideDomain,
            "component seed not an interior cell");
    std::vector<std::uint8_t> keep(nc, 0);
    std::deque<long> q{start};
    keep[start] = 1;
    const Grid& g = d.grid;
    while (!q.empty()) {
      long c = q.front();
      q.pop_front();
      auto ijk = g.coords(c);
      for (int a = 0; a < g.dim; ++a)
        for (int s = -1; s <= 1; s += 2) {
          int t[3] = {ijk[0], ijk[1], ijk[2]};
          t[a] += s;
          if (!g.in_range(t[0], t[1], t[2])) continue;
          long nb = g.id(t[0], t[1], t[2]);
          if (keep[nb] || d.state[nb] != Domain::Interior) continue;
          keep[nb] = 1;
          q.push_back(nb);
        }
    }
    for (long c = 0; c < nc; ++c)
      if (d.state[c] == Domain::Interior && !keep[c]) d.state[c] = Domain::Outside;
  }
  return d;
}

double Domain::delta_at(const Vec& p) const {
  long c = grid.cell_of(p);
  return c < 0 ? 0.0 : dist[c];
}

long Domain::interior_count() const {
  long k = 0;
  for (auto s : state) k += (s == Interior);
  return k;
}

// ---------------------------------------------------------------------------
// AD-regularity

AdRegularityReport ad_regularity(const BoundarySet& set, int sample_count, std::uint64_t seed,
                                 double r_min, double r_max) {
  require(sample_count >= 1, Err::BadArgument, "sample_count must be >= 1");
  require(!set.cells.empty(), Err::EmptySet, "boundary set is empty");
  const int n = set.n();
  double diam = set.diameter();
  if (r_max <= 0) r_max = diam;
  // Below ~16h the one-cell quantization of ball mass dominates the ratio.
  if (r_min <= 0) r_min = std::max(16 * set.h, diam / 4096);
  require(r_min < r_max, Err::BadArgument, "empty radius range");

  // Sample centers mu-weighted so dense parts are visited proportionally.
  std::vector<double> cum(set.cells.size());
  double tot = 0;
  for (std::size_t k = 0; k < set.cells.size(); ++k) {
    tot += set.weight[k];
    cum[k] = tot;
  }
  Rng rng(seed);
  AdRegularityReport rep;
  rep.worst_hi = 0;
  rep.worst_lo = 0;
  for (int s = 0; s < sample_count; ++s) {
    double u = rng.uniform(0, tot);
    std::size_t k = std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
    if (k >= set.cells.size()) k = set.cells.size() - 1;
    Vec x = set.grid.center(set.cells[k]);
    double r = r_min * std::pow(r_max / r_min, rng.uniform(0, 1));
    double m = set.ball_measure(x, r);
    if (m <= 0) continue;
    double rn = std::pow(r, n);
    rep.worst_hi = std::max(rep.worst_hi, m / rn);
    rep.worst_lo = std::max(rep.worst_lo, rn / m);
  }
  rep.C0 = std::max({1.0, rep.worst_hi, rep.worst_lo});
  return rep;
}

// ---------------------------------------------------------------------------
// Corkscrew

Corkscrew corkscrew_point(const BoundarySet& set, const Domain& domain, const Vec& x, double r) {
  require(r > 0 && r <= std::max(set.diameter(), 4 * set.h), Err::BadArgument,
          "corkscrew radius out of range");
  require(set.dist_to_set(x) <= set.h * 1.5 + 1e-12, Err::BadArgument,
          "corkscrew anchor must lie on the set");
  const Grid& g = domain.grid;
  // Scan the bounding box of B(x,r); ties broken by lexicographic cell order.
  int lo[3], hi[3];
  for (int a = 0; a < 3; ++a) {
    if (a >= g.dim) {
      lo[a] = 0;
      hi[a] = 0;
      continue;
    }
    lo[a] = std::max(0, static_cast<int>(std::floor((x[a] - r - g.origin[a]) / g.h)));
    hi[a] = std::min(g.n[a] - 1, static_cast<int>(std::floor((x[a] + r - g.origin[a]) / g.h)));
  }
  // The EDT is quantized, so the argmax is a plateau; break ties by
  // proximity to the anchor (then cell order) to land on the symmetric
  // optimum deterministically.
  double best = -1;
  double best_dx = std::numeric_limits<double>::infinity();
  long best_cell = -1;
  for (int k = lo[2]; k <= hi[2]; ++k)
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int i = lo[0]; i <= hi[0]; ++i) {
        long c = g.id(i, j, k);
        if (!domain.interior(c)) continue;
        Vec p = g.center(c);
        double dx = dist(p, x);
        double inside = r - dx;
        if (inside <= 0) continue;
        double v = std::min(domain.dist[c], inside);
        if (v > best + 1e-12 || (v > best - 1e-12 && dx < best_dx - 1e-12)) {
          best = v;
          best_dx = dx;
          best_cell = c;
        }
      }
  require(best_cell >= 0 && best >= 2 * g.h, Err::NoCorkscrew,
          "no corkscrew ball at this resolution");
  Corkscrew cs;
  cs.cell = best_cell;
  cs.point = g.center(best_cell);
  cs.c = best / r;
  return cs;
}

// ---------------------------------------------------------------------------
// Harnack chain

std::optional<HarnackChain> harnack_chain(const Domain& domain, const Vec& x, const Vec& y,
                                          int max_len) {
  require(max_len >= 1, Err::BadArgument, "max_len must be >= 1");
  const Grid& g = domain.grid;
  long cx = g.cell_of(x), cy = g.cell_of(y);
  require(cx >= 0 && domain.interior(cx) && domain.dist[cx] > 0, Err::PointOutsideDomain,
          "x is not interior");
  require(cy >= 0 && domain.interior(cy) && domain.dist[cy] > 0, Err::PointOutsideDomain,
          "y is not interior");

  HarnackChain chain;
  chain.x = x;
  chain.y = y;
  auto radius_at = [&](long c) { return domain.dist[c] / 2; };

  if (cx == cy || dist(x, y) < radius_at(cx)) {
    chain.centers = {g.center(cx)};
    chain.radii = {radius_at(cx)};
    chain.comparability = 2.0;
    return chain;
  }

  // Greedy ball hopping: from the current ball pick the interior cell whose
  // ball still overlaps ours and which minimizes the remaining effort
  // |p-y| - delta(p)/2, so the walk ascends the distance transform where that
  // buys larger hops.  A visited set plus the max_len cap bounds the search.
  const double kOverlapSlack = 0.98;  // strict overlap with a grid margin
  std::set<long> visited;
  long cur = cx;
  chain.centers.push_back(g.center(cur));
  chain.radii.push_back(radius_at(cur));
  visited.insert(cur);
  for (int step = 1; step < max_len; ++step) {
    double rad = radius_at(cur);
    Vec pc = g.center(cur);
    if (dist(pc, y) < kOverlapSlack * (rad + radius_at(cy))) {
      if (cy != cur) {
        chain.centers.push_back(g.center(cy));
        chain.radii.push_back(radius_at(cy));
      }
      chain.comparability = 2.0;
      return chain;
    }
    // Candidate centers may sit up to rad + delta(p)/2 away; delta grows at
    // most linearly with the hop, so a window of 3*rad covers every case
    // except jumps into much wider space, which later hops pick up anyway.
    int R = std::max(1, static_cast<int>(std::ceil(3 * rad / g.h)));
    auto ijk = g.coords(cur);
    long best = -1;
    double best_score = std::numeric_limits<double>::infinity();
    for (int dk = (g.dim == 3 ? -R : 0); dk <= (g.dim == 3 ? R : 0); ++dk)
      for (int dj = -R; dj <= R; ++dj)
        for (int di = -R; di <= R; ++di) {
          int i = ijk[0] + di, j = ijk[1] + dj, k = ijk[2] + dk;
          if (!g.in_range(i, j, k)) continue;
          long c = g.id(i, j, k);
          if (!domain.interior(c) || domain.dist[c] <= 0 || visited.count(c)) continue;
          Vec p = g.center(c);
          if (dist(p, pc) >= kOverlapSlack * (rad + radius_at(c))) continue;
          double score = dist(p, y) - radius_at(c);
          if (score < best_score - 1e-15) {
            best_score = score;
            best = c;
          }
        }
    if (best < 0) return std::nullopt;
    cur = best;
    visited.insert(cur);
    chain.centers.push_back(g.center(cur));
    chain.radii.push_back(radius_at(cur));
  }
  return std::nullopt;
}

}  // namespace ura
