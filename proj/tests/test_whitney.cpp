// Whitney decomposition and the cube-indexed regions.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "ura/whitney.hpp"

using namespace ura;

namespace {

struct Fixture {
  BoundarySet set;
  Domain dom;
};

Fixture half_plane(double w, double h) {
  GeneratorParams p;
  p.axis = 1;
  p.offset = h / 2;
  Box b;
  b.lo = vec2(-w, 0);
  b.hi = vec2(w, w);
  Fixture f{generate_boundary(BoundaryKind::hyperplane, p, b, h, 2), {}};
  f.dom = make_domain(f.set, vec2(0, w / 2));
  return f;
}

Fixture two_lines(double sep, double h) {
  GeneratorParams p;
  p.axis = 1;
  p.offset = 0;
  p.separation = sep;
  Box b;
  b.lo = vec2(-1, -1);
  b.hi = vec2(1, 1);
  Fixture f{generate_boundary(BoundaryKind::parallel_planes, p, b, h, 2), {}};
  f.dom = make_domain(f.set);
  return f;
}

}  // namespace

TEST_CASE("whitney cubes satisfy the 8/80 normalization") {
  Fixture f = half_plane(2.0, 1.0 / 128);
  auto wd = whitney_decompose(f.dom);
  CHECK(!wd.cubes.empty());
  double h = f.dom.grid.h;
  for (const WhitneyCube& c : wd.cubes) {
    double diam = c.diam(2);
    // dist(8I, set) >= 8 diam, measured with one strided-sampling slack
    std::array<int, 3> lo8 = c.lo;
    for (int a = 0; a < 2; ++a) lo8[a] -= c.size * 7 / 2;
    double worst = std::numeric_limits<double>::infinity();
    const Grid& g = f.dom.grid;
    for (int j = lo8[1]; j < lo8[1] + 8 * c.size; ++j)
      for (int i = lo8[0]; i < lo8[0] + 8 * c.size; ++i) {
        int ci = std::clamp(i, 0, g.n[0] - 1), cj = std::clamp(j, 0, g.n[1] - 1);
        worst = std::min(worst, f.dom.dist[g.id(ci, cj)]);
      }
    CHECK(8 * diam <= worst + 2.5 * h);
    CHECK(c.dist_to_set <= 80 * diam + 2.5 * h);
  }
}

TEST_CASE("interior coverage is exact and disjoint") {
  Fixture f = half_plane(1.0, 1.0 / 128);
  auto wd = whitney_decompose(f.dom);
  const Grid& g = f.dom.grid;
  for (long c = 0; c < g.ncells(); ++c) {
    if (f.dom.interior(c) && f.dom.dist[c] >= 16 * g.h) CHECK(wd.cube_of_cell[c] >= 0);
  }
  // neighbours have comparable sides
  for (long c = 0; c < g.ncells(); ++c) {
    if (wd.cube_of_cell[c] < 0) continue;
    auto ijk = g.coords(c);
    for (int a = 0; a < 2; ++a)
      for (int s = -1; s <= 1; s += 2) {
        int t[3] = {ijk[0], ijk[1], ijk[2]};
        t[a] += s;
        if (!g.in_range(t[0], t[1], t[2])) continue;
        long nb = g.id(t[0], t[1], t[2]);
        if (wd.cube_of_cell[nb] < 0) continue;
        double r = wd.cubes[wd.cube_of_cell[c]].side / wd.cubes[wd.cube_of_cell[nb]].side;
        CHECK(r <= 4.0 + 1e-12);
        CHECK(r >= 0.25 - 1e-12);
      }
  }
}

TEST_CASE("half-plane whitney counts double per scale") {
  Fixture f = half_plane(2.0, 1.0 / 256);
  auto wd = whitney_decompose(f.dom);
  // cubes meeting B(0,1), bucketed by side; counts grow geometrically
  std::map<double, int> counts;
  for (const WhitneyCube& c : wd.cubes) {
    Box b = wd.cube_box(c);
    Vec mid = vec2(0.5 * (b.lo[0] + b.hi[0]), 0.5 * (b.lo[1] + b.hi[1]));
    if (norm(mid) > 1.0) continue;
    counts[c.side] += 1;
  }
  // construction oracle: at height ~y the sides are ~y/16, so halving the
  // side doubles the count of cubes meeting a fixed ball
  std::vector<std::pair<double, int>> scales(counts.begin(), counts.end());
  int checked = 0;
  for (std::size_t i = 0; i + 1 < scales.size(); ++i) {
    if (scales[i + 1].second < 4) continue;
    double ratio = static_cast<double>(scales[i].second) / scales[i + 1].second;
    CHECK(ratio >= 1.3);
    CHECK(ratio <= 4.0);
    ++checked;
  }
  CHECK(checked >= 3);
}

TEST_CASE("set tucked in a corner yields a capped single-scale far tiling") {
  double h = 1.0 / 64;
  GeneratorParams p;
  p.axis = 1;
  p.offset = -1 + h / 2;
  Box b;
  b.lo = vec2(-1, -1);
  b.hi = vec2(1, 1);
  BoundarySet s = generate_boundary(BoundaryKind::hyperplane, p, b, h, 2);
  Domain dom = make_domain(s, vec2(0, 0));
  auto wd = whitney_decompose(dom);
  // far half of the box: all cubes share the maximal size
  std::set<int> far_sizes;
  for (const WhitneyCube& c : wd.cubes) {
    Box bb = wd.cube_box(c);
    if (bb.lo[1] > 0.5) far_sizes.insert(c.size);
  }
  CHECK(far_sizes.size() == 1);
}

TEST_CASE("domain too thin is rejected") {
  double h = 1.0 / 32;
  GeneratorParams p;
  p.axis = 1;
  p.offset = 0;
  p.separation = 0.3;  // only ~5h of clearance inside the slab at h=1/32
  Box bx;
  bx.lo = vec2(-1, -0.2);
  bx.hi = vec2(1, 0.2);
  BoundarySet s = generate_boundary(BoundaryKind::parallel_planes, p, bx, h, 2);
  Domain dom = make_domain(s, vec2(0, 0));
  CHECK_THROWS_AS(whitney_decompose(dom), Error);
}

TEST_CASE("whitney region of a half-plane interval is connected") {
  double h = 1.0 / 128;
  Fixture f = half_plane(2.0, h);
  auto wd = whitney_decompose(f.dom);
  BoundarySet s = f.set;
  Lattice lat = build_lattice(s, 4);
  int qid = lat.generations[3][4];
  auto reg = whitney_region(lat, qid, f.dom, wd, 1.0 / 64, 8.0, 0.2);
  REQUIRE(!reg.empty);
  CHECK(reg.components.size() == 1);
  // invariants of the member cubes
  for (int i : reg.member_cubes) {
    const WhitneyCube& I = wd.cubes[i];
    CHECK(I.side >= (1.0 / 64) * lat.cube(qid).side - 1e-12);
    CHECK(I.side <= 8.0 * lat.cube(qid).side + 1e-12);
  }
}

TEST_CASE("two parallel lines split the region into components") {
  double h = 1.0 / 256;
  Fixture f = two_lines(0.125, h);
  Lattice lat = build_lattice(f.set, 3);
  auto wd = whitney_decompose(f.dom);
  // a cube on one line at scale >> separation
  int qid = -1;
  for (int id : lat.generations[2]) {
    if (lat.cube(id).side >= 0.25) {
      qid = id;
      break;
    }
  }
  REQUIRE(qid >= 0);
  auto reg = whitney_region(lat, qid, f.dom, wd, 1.0 / 64, 8.0, 0.2);
  REQUIRE(!reg.empty);
  CHECK(reg.components.size() >= 2);

  // component stability: shrinking tau never merges components
  auto reg2 = whitney_region(lat, qid, f.dom, wd, 1.0 / 64, 8.0, 0.1);
  CHECK(reg2.components.size() >= reg.components.size());
}

TEST_CASE("parameter sanity for regions") {
  double h = 1.0 / 64;
  Fixture f = half_plane(1.0, h);
  Lattice lat = build_lattice(f.set, 2);
  auto wd = whitney_decompose(f.dom);
  CHECK_THROWS_AS(whitney_region(lat, lat.root(), f.dom, wd, 8.0, 0.5, 0.2), Error);
}

TEST_CASE("chain dilation grows monotonically and stays in the band") {
  double h = 1.0 / 64;
  Fixture f = half_plane(1.0, h);
  long seed_cell = f.dom.grid.cell_of(vec2(0, 0.25));
  std::vector<long> seed{seed_cell};
  auto once = chain_dilate(f.dom, seed, 1, 0.05, 0.8);
  auto twice = chain_dilate(f.dom, seed, 2, 0.05, 0.8);
  CHECK(once.size() >= 1);
  CHECK(twice.size() >= once.size());
  for (long c : twice) {
    CHECK(f.dom.dist[c] >= 0.05 - 1e-12);
    CHECK(f.dom.dist[c] <= 0.8 + 1e-12);
  }
}
