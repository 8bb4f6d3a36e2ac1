// Dyadic lattice construction, small-boundary collars, dilations.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "ura/lattice.hpp"

using namespace ura;

namespace {

BoundarySet unit_segment(double h) {
  GeneratorParams p;
  p.axis = 1;
  p.offset = 0.5;
  Box b;
  b.lo = vec2(0, 0);
  b.hi = vec2(1, 1);
  return generate_boundary(BoundaryKind::hyperplane, p, b, h, 2);
}

BoundarySet cantor_set(int depth) {
  GeneratorParams p;
  p.depth = depth;
  Box b;
  b.lo = vec2(0, 0);
  b.hi = vec2(1, 1);
  double side = std::pow(0.25, depth);
  return generate_boundary(BoundaryKind::four_corner_cantor, p, b, side / 8, 2);
}

}  // namespace

TEST_CASE("unit segment lattice has exact dyadic intervals") {
  BoundarySet s = unit_segment(1.0 / 256);
  Lattice lat = build_lattice(s, 4);
  for (int j = 0; j <= 4; ++j) {
    CHECK(lat.generations[j].size() == (1u << j));
    for (int id : lat.generations[j])
      CHECK(lat.cube(id).mu == doctest::Approx(std::pow(0.5, j)).epsilon(1e-12));
  }
}

TEST_CASE("partition and nesting hold exactly") {
  BoundarySet s = unit_segment(1.0 / 128);
  Lattice lat = build_lattice(s, 4);
  // (a): every generation partitions the cell ordinals
  for (int j = 0; j <= 4; ++j) {
    std::set<int> seen;
    for (int id : lat.generations[j])
      for (int m : lat.cube(id).members) {
        CHECK(seen.insert(m).second);
      }
    CHECK(seen.size() == s.cells.size());
  }
  // (b): each cube has exactly one ancestor in every coarser generation
  for (int j = 1; j <= 4; ++j)
    for (int id : lat.generations[j]) {
      int hops = 0;
      int a = lat.cube(id).parent;
      while (a >= 0) {
        ++hops;
        a = lat.cube(a).parent;
      }
      CHECK(hops == j);
    }
  // measure additivity to machine precision
  for (const DyadicCube& q : lat.cubes) {
    if (q.children.empty()) continue;
    double s2 = 0;
    for (int c : q.children) s2 += lat.cube(c).mu;
    CHECK(q.mu == doctest::Approx(s2).epsilon(1e-14));
  }
}

TEST_CASE("cantor lattice cubes follow the construction") {
  BoundarySet s = cantor_set(3);
  Lattice lat = build_lattice(s, 3);
  // generation 1 and 2 both realize the four depth-1 squares
  CHECK(lat.generations[1].size() == 4);
  CHECK(lat.generations[2].size() == 4);
  for (int id : lat.generations[2])
    CHECK(lat.cube(id).mu == doctest::Approx(0.25).epsilon(1e-12));
  // generation 3 splits each square into its four depth-2 children
  CHECK(lat.generations[3].size() == 16);
  for (int id : lat.generations[3])
    CHECK(lat.cube(id).mu == doctest::Approx(1.0 / 16).epsilon(1e-12));
}

TEST_CASE("sphere lattice in ambient 3 partitions cell-by-cell") {
  GeneratorParams p;
  p.radius = 0.6;
  p.center = vec3(0, 0, 0);
  Box b;
  b.lo = vec3(-1, -1, -1);
  b.hi = vec3(1, 1, 1);
  BoundarySet s = generate_boundary(BoundaryKind::sphere, p, b, 1.0 / 32, 3);
  Lattice lat = build_lattice(s, 2);
  for (int j = 0; j <= 2; ++j) {
    std::size_t total = 0;
    for (int id : lat.generations[j]) total += lat.cube(id).members.size();
    CHECK(total == s.cells.size());
  }
}

TEST_CASE("B_Q stays inside its cube") {
  BoundarySet s = cantor_set(3);
  Lattice lat = build_lattice(s, 3);
  for (const DyadicCube& q : lat.cubes) {
    std::set<int> mem(q.members.begin(), q.members.end());
    for (std::size_t k = 0; k < s.cells.size(); ++k) {
      if (dist(s.grid.center(s.cells[k]), q.center) <= q.ball_radius())
        CHECK(mem.count(static_cast<int>(k)) == 1);
    }
  }
}

TEST_CASE("depth beyond resolution is rejected") {
  BoundarySet s = unit_segment(1.0 / 64);
  CHECK_THROWS_AS(build_lattice(s, 6), Error);
}

TEST_CASE("small boundary mass of a dyadic interval") {
  double h = 1.0 / 256;
  BoundarySet s = unit_segment(h);
  Lattice lat = build_lattice(s, 3);
  // pick an interior generation-2 cube
  int qid = lat.generations[2][1];
  const DyadicCube& q = lat.cube(qid);
  double tau = 0.25;
  double mass = small_boundary_mass(lat, qid, tau);
  // two collars of width tau*l at each endpoint, from inside and outside
  CHECK(mass <= q.side + 5 * h);
  CHECK(mass == doctest::Approx(4 * tau * q.side).epsilon(0.05));
  // monotone in tau, down to zero
  double prev = mass;
  for (double t : {0.125, 0.0625, 0.03125}) {
    double m = small_boundary_mass(lat, qid, t);
    CHECK(m <= prev + 1e-12);
    prev = m;
  }
  // root cube has no exterior: only (empty) inner collar remains
  CHECK(small_boundary_mass(lat, lat.root(), 0.25) == 0.0);
}

TEST_CASE("dilation of an interior interval") {
  double h = 1.0 / 256;
  BoundarySet s = unit_segment(h);
  Lattice lat = build_lattice(s, 3);
  int qid = lat.generations[3][3];
  const DyadicCube& q = lat.cube(qid);

  CHECK(dilate(lat, qid, 1.0) == q.members);

  auto d3 = dilate(lat, qid, 3.0);
  double m3 = measure_of(lat.set, d3);
  CHECK(m3 == doctest::Approx(5 * q.side).epsilon(0.02));
}

TEST_CASE("dilation of an isolated cantor square stays put") {
  BoundarySet s = cantor_set(3);
  Lattice lat = build_lattice(s, 2);
  int qid = lat.generations[2][0];  // one depth-1 square, gap 1/2 to siblings
  auto d2 = dilate(lat, qid, 2.0);
  CHECK(d2 == lat.cube(qid).members);
}
