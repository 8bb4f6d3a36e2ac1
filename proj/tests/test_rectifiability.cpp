// Flatness classifiers, the level-set topology test, cube types, the
// augmented skeleton, local symmetry.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "ura/rectifiability.hpp"

using namespace ura;

namespace {

struct Fixture {
  BoundarySet set;
  Domain dom;
  Lattice lat;
};

Fixture line_fixture(double w, double h, int depth) {
  GeneratorParams p;
  p.axis = 1;
  p.offset = 0;
  Box b;
  b.lo = vec2(-w, -w);
  b.hi = vec2(w, w);
  Fixture f{generate_boundary(BoundaryKind::hyperplane, p, b, h, 2), {}, {}};
  f.dom = make_domain(f.set);
  f.lat = build_lattice(f.set, depth);
  return f;
}

Fixture two_lines_fixture(double sep, double w, double h, int depth) {
  GeneratorParams p;
  p.axis = 1;
  p.offset = 0;
  p.separation = sep;
  Box b;
  b.lo = vec2(-w, -w);
  b.hi = vec2(w, w);
  Fixture f{generate_boundary(BoundaryKind::parallel_planes, p, b, h, 2), {}, {}};
  f.dom = make_domain(f.set);
  f.lat = build_lattice(f.set, depth);
  return f;
}

Fixture cantor_fixture(int depth, int lat_depth) {
  GeneratorParams p;
  p.depth = depth;
  Box b;
  b.lo = vec2(0, 0);
  b.hi = vec2(1, 1);
  double side = std::pow(0.25, depth);
  Fixture f{generate_boundary(BoundaryKind::four_corner_cantor, p, b, side / 8, 2), {}, {}};
  f.lat = build_lattice(f.set, lat_depth);
  return f;
}

}  // namespace

TEST_CASE("bbeta of flat and curved sets") {
  Fixture f = line_fixture(1.0, 1.0 / 256, 3);
  auto flat = bbeta_infty(f.set, vec2(0.1, 0), 0.5, 720);
  CHECK(flat.value <= 1e-3);

  // circle: sagitta-type flatness, oracle = dense plane search
  GeneratorParams pc;
  pc.radius = 1.0;
  pc.center = vec2(0, 0);
  Box bc;
  bc.lo = vec2(-1.5, -1.5);
  bc.hi = vec2(1.5, 1.5);
  BoundarySet circle = generate_boundary(BoundaryKind::sphere, pc, bc, 1.0 / 512, 2);
  for (double r : {0.3, 0.5}) {
    auto rep = bbeta_infty(circle, vec2(1, 0), r, 720);
    auto oracle = bbeta_infty(circle, vec2(1, 0), r, 2880);
    CHECK(rep.value == doctest::Approx(oracle.value).epsilon(0.02));
    // best-line deviation of the arc: (1 - cos(2 asin(r/2)))/4 over r
    double phi = 2 * std::asin(r / 2);
    double expect = (1 - std::cos(phi)) / (4 * r);
    CHECK(rep.value == doctest::Approx(expect).epsilon(0.15));
  }

  // refinement monotonicity: adding far points cannot shrink the value
  auto small = bbeta_infty(circle, vec2(1, 0), 0.3, 720);
  auto large = bbeta_infty(circle, vec2(1, 0), 0.33, 720);
  CHECK(large.value * 0.33 >= small.value * 0.3 - 1e-12);

  CHECK_THROWS_AS(bbeta_infty(f.set, vec2(0, 5), 0.1, 32), Error);
}

TEST_CASE("bbeta of cantor cubes stays large") {
  Fixture f = cantor_fixture(4, 4);
  int qid = f.lat.generations[1][0];
  const DyadicCube& q = f.lat.cube(qid);
  auto rep = bbeta_infty(f.set, q.center, q.ball_radius() * 8, 720);
  CHECK(rep.value >= 0.05);
}

TEST_CASE("whsa on lines and cantor") {
  Fixture f = line_fixture(2.0, 1.0 / 256, 4);
  for (int gen = 1; gen <= 4; ++gen) {
    auto rep = whsa_test(f.lat, f.lat.generations[gen][1], 0.05, 8.0, 180);
    CHECK(rep.pass);
  }

  // two parallel lines: the plane through the far line works as long as the
  // big ball still sees a full neighbourhood of it
  Fixture tl = two_lines_fixture(0.25, 2.0, 1.0 / 256, 4);
  int qid = -1;
  for (int id : tl.lat.generations[4])
    if (std::abs(tl.lat.cube(id).center[0]) < 0.3 && tl.lat.cube(id).center[1] > 0) qid = id;
  REQUIRE(qid >= 0);
  auto rep = whsa_test(tl.lat, qid, 0.3, 8.0, 180);
  CHECK(rep.pass);

  Fixture ct = cantor_fixture(4, 4);
  auto crep = whsa_test(ct.lat, ct.lat.generations[2][1], 0.05, 8.0, 180);
  CHECK(!crep.pass);
}

TEST_CASE("batpp on lines, pairs, cantor") {
  Fixture f = line_fixture(2.0, 1.0 / 256, 4);
  auto one = batpp_test(f.lat, f.lat.generations[2][1], 0.05, 180);
  CHECK(one.pass);

  // two parallel lines at a between-scale cube: the two planes are the lines
  Fixture tl = two_lines_fixture(0.1, 2.0, 1.0 / 256, 3);
  int qid = -1;
  for (int id : tl.lat.generations[2])
    if (tl.lat.cube(id).side >= 10 * 0.1) qid = id;
  REQUIRE(qid >= 0);
  auto pair = batpp_test(tl.lat, qid, 0.1, 180);
  CHECK(pair.pass);
  CHECK(std::abs(pair.plane1.offset - pair.plane2.offset) >= 0.05);

  Fixture ct = cantor_fixture(4, 4);
  auto bad = batpp_test(ct.lat, ct.lat.generations[2][1], 0.01, 180);
  CHECK(!bad.pass);

  // a passing cube with coincident planes bounds bbeta by eps
  auto rep = bbeta_infty(f.set, f.lat.cube(f.lat.generations[2][1]).center,
                         10 * f.lat.cube(f.lat.generations[2][1]).side, 720);
  CHECK(one.plane1.offset == doctest::Approx(one.plane2.offset));
  CHECK(rep.value <= 0.05);
}

TEST_CASE("wts on the two-slab fixture") {
  // the corkscrew floor t*l(Q) must clear the separation, so the slabs are
  // thin relative to the tested cubes
  double sep = 0.04, h = 1.0 / 256;
  Fixture tl = two_lines_fixture(sep, 1.0, h, 3);
  auto op = assemble_operator(identity_coefficients(tl.dom.grid), tl.dom);

  // u: pole above the top line; u_star: pole below the bottom line
  GreenTable Gu = green_function(op, tl.dom, vec2(0, 0.6));
  GreenTable Gs = green_function(op, tl.dom, vec2(0, -0.6), true);
  double muR = tl.lat.cube(tl.lat.root()).mu;
  GridField u(tl.dom.grid, 0.0), us(tl.dom.grid, 0.0);
  for (long c = 0; c < tl.dom.grid.ncells(); ++c) {
    u[c] = muR * Gu.values[c];
    us[c] = muR * Gs.values[c];
  }

  // a between-scale cube: side well above the separation
  int qid = -1;
  for (int id : tl.lat.generations[2])
    if (tl.lat.cube(id).side >= 4 * sep && std::abs(tl.lat.cube(id).center[0]) < 0.3) qid = id;
  REQUIRE(qid >= 0);

  WtsParams params;
  params.t = 0.3;
  auto rep = wts_test(tl.lat, qid, tl.dom, u, us, params);
  CHECK(rep.cond_cover);
  CHECK(rep.cond_disjoint);
  CHECK(rep.cond_corkscrew);
  CHECK(rep.cond_curve);
  CHECK(rep.pass);
  // the slabs: U1 above the top line, U2 below the bottom line
  for (long c : rep.regions.U1) CHECK(tl.dom.grid.center(c)[1] > sep / 2);
  for (long c : rep.regions.U2) CHECK(tl.dom.grid.center(c)[1] < -sep / 2);

  // same-side pair must violate the disjointness condition
  auto same = wts_test(tl.lat, qid, tl.dom, u, u, params);
  CHECK(!same.cond_disjoint);
  CHECK(!same.pass);

  // tau1 guard
  WtsParams badp;
  badp.tau1 = 0.2;
  CHECK_THROWS_AS(wts_test(tl.lat, qid, tl.dom, u, us, badp), Error);

  // compatibility across nested passing cubes, plus a constructed violation
  std::vector<LevelSetRegions> family{rep.regions};
  for (int id : tl.lat.generations[3]) {
    const DyadicCube& p = tl.lat.cube(id);
    if (std::abs(p.center[0]) < 0.2 && p.side >= 2 * sep) {
      auto r2 = wts_test(tl.lat, id, tl.dom, u, us, params);
      if (r2.pass) family.push_back(r2.regions);
    }
  }
  REQUIRE(family.size() >= 2);
  CHECK(compatibility_check(tl.lat, family, 3).empty());
  CHECK(compatibility_check(tl.lat, {family[0]}, 3).empty());  // vacuous

  auto swapped = family;
  std::swap(swapped[1].U1, swapped[1].U2);
  std::swap(swapped[1].U1p, swapped[1].U2p);
  CHECK(!compatibility_check(tl.lat, swapped, 3).empty());

  // level-set inclusions: U_i between the two sandwich levels
  const DyadicCube& q = tl.lat.cube(qid);
  double rt = std::sqrt(params.tau1) * q.side;
  for (long c : rep.regions.U1) {
    CHECK(u[c] > rt);
    CHECK(dist(tl.dom.grid.center(c), q.center) <= params.A0 * q.ball_radius() + 1e-12);
  }
  // dist(V, E) > 0 with a measured constant
  double worst = 1e9;
  for (long c : rep.regions.U1) worst = std::min(worst, tl.dom.dist[c]);
  CHECK(worst > 0);
}

TEST_CASE("type classification") {
  double sep = 0.04, h = 1.0 / 256;
  Fixture tl = two_lines_fixture(sep, 1.0, h, 3);
  auto op = assemble_operator(identity_coefficients(tl.dom.grid), tl.dom);
  auto wd = whitney_decompose(tl.dom);
  GreenTable Gu = green_function(op, tl.dom, vec2(0, 0.6));
  GreenTable Gs = green_function(op, tl.dom, vec2(0, -0.6), true);
  double muR = tl.lat.cube(tl.lat.root()).mu;
  GridField u(tl.dom.grid, 0.0), us(tl.dom.grid, 0.0);
  for (long c = 0; c < tl.dom.grid.ncells(); ++c) {
    u[c] = muR * Gu.values[c];
    us[c] = muR * Gs.values[c];
  }
  CoefficientField A = identity_coefficients(tl.dom.grid);
  auto all_in = [](int) { return true; };

  int qid = -1;
  for (int id : tl.lat.generations[2])
    if (tl.lat.cube(id).side >= 4 * sep && std::abs(tl.lat.cube(id).center[0]) < 0.3) qid = id;
  REQUIRE(qid >= 0);
  TypeParams tp;
  auto rep = type_classify(tl.lat, qid, all_in, A, tl.dom, u, us, wd, tp);
  CHECK(rep.type == CubeType::Type3);

  // tree-boundary cube: a neighbour of comparable scale is outside the tree
  auto not_in = [&](int id) { return id != tl.lat.generations[2][0]; };
  auto r0 = type_classify(tl.lat, qid, not_in, A, tl.dom, u, us, wd, tp);
  CHECK(r0.type == CubeType::Type0);
  CHECK(r0.type0_reason == 1);

  // rough coefficients near the cube: reason 2
  CoefficientField rough = noise_coefficients(tl.dom.grid, 0.3, 11);
  auto r2 = type_classify(tl.lat, qid, all_in, rough, tl.dom, u, us, wd, tp);
  CHECK(r2.type == CubeType::Type0);
  CHECK(r2.type0_reason == 2);
}

TEST_CASE("flat line interior cube is type 2 at the desk calibration") {
  double h = 1.0 / 256;
  GeneratorParams p;
  p.axis = 1;
  p.offset = h / 2;
  Box b;
  b.lo = vec2(-2, 0);
  b.hi = vec2(2, 4);
  BoundarySet s = generate_boundary(BoundaryKind::hyperplane, p, b, h, 2);
  Domain dom = make_domain(s, vec2(0, 1));
  Lattice lat = build_lattice(s, 6);
  auto op = assemble_operator(identity_coefficients(dom.grid), dom);
  auto wd = whitney_decompose(dom);

  // normalized solutions from a pole high above the cube scale
  Vec pole = cube_pole(lat, dom, lat.root(), 0.5);
  GreenTable Gu = green_function(op, dom, pole);
  GreenTable Gs = green_function(op, dom, pole, true);
  double muR = lat.cube(lat.root()).mu;
  GridField u(dom.grid, 0.0), us(dom.grid, 0.0);
  for (long c = 0; c < dom.grid.ncells(); ++c) {
    u[c] = muR * Gu.values[c];
    us[c] = muR * Gs.values[c];
  }

  // the deep cube below the pole
  int qid = -1;
  for (int id : lat.generations[6]) {
    if (std::abs(lat.cube(id).center[0] - pole[0]) < lat.cube(id).side / 2) qid = id;
  }
  REQUIRE(qid >= 0);
  CoefficientField A = identity_coefficients(dom.grid);
  TypeParams tp;
  tp.eps0 = 0.5;  // desk rescaling of the oscillation threshold
  tp.M_eff = 4;
  auto rep = type_classify(lat, qid, [](int) { return true; }, A, dom, u, us, wd, tp);
  CHECK(rep.triple_nonempty);
  CHECK(rep.oscillation >= 0);
  CHECK(rep.oscillation <= rep.threshold);
  CHECK(rep.type == CubeType::Type2);
}

TEST_CASE("augmented set") {
  Fixture f = line_fixture(1.0, 1.0 / 256, 3);
  auto same = augmented_set(f.set, f.lat, {}, 0.125);
  CHECK(same.cells == f.set.cells);

  int qid = f.lat.generations[2][1];
  auto aug = augmented_set(f.set, f.lat, {qid}, 0.125);
  CHECK(aug.cells.size() > f.set.cells.size());

  // counting oracle: the skeleton squares tile a disk of radius 10 r(B_Q)
  const DyadicCube& q = f.lat.cube(qid);
  double s = q.side;
  while (s >= 2 * 0.125 * q.side) s /= 2;
  double r10 = 10 * q.ball_radius();
  double expect_squares = M_PI * (r10 + s) * (r10 + s) / (s * s);
  double added_measure = aug.total_measure() - f.set.total_measure();
  double per_square = 2 * s;  // two edges swept per lattice square
  CHECK(added_measure == doctest::Approx(expect_squares * per_square).epsilon(0.35));

  // regularity of the augmented set degrades by at most the skeleton's
  // scale ratio: the added grid block is dense below 10 B_Q at spacing b l(Q)
  auto base = ad_regularity(f.set, 300, 5);
  auto more = ad_regularity(aug, 300, 5);
  CHECK(more.C0 >= base.C0);
  CHECK(more.C0 <= (10 / 0.125) * base.C0);
}

TEST_CASE("local symmetry of flat, round, and fractal sets") {
  Fixture f = line_fixture(1.0, 1.0 / 256, 3);
  int qid = f.lat.generations[2][2];
  const DyadicCube& q = f.lat.cube(qid);
  auto rep = local_symmetry_test(f.set, q.center, 2 * q.ball_radius(), q.side, 0.1, 10000, 7);
  CHECK(rep.pass);
  CHECK(rep.worst <= 2 * f.set.h / q.side + 1e-9);

  // circle: reflections defect ~ l(Q)^2 / rho
  GeneratorParams pc;
  pc.radius = 1.0;
  pc.center = vec2(0, 0);
  Box bc;
  bc.lo = vec2(-1.5, -1.5);
  bc.hi = vec2(1.5, 1.5);
  BoundarySet circle = generate_boundary(BoundaryKind::sphere, pc, bc, 1.0 / 512, 2);
  // small scale passes
  auto ok = local_symmetry_test(circle, vec2(1, 0), 0.02, 0.08, 0.1, 10000, 7);
  CHECK(ok.pass);
  // large scale fails: kappa rho / 4 << l(Q)
  auto badp = local_symmetry_test(circle, vec2(1, 0), 0.45, 0.9, 0.1, 20000, 7);
  CHECK(!badp.pass);

  // cantor: a third of the mid-generation cubes already fail
  Fixture ct = cantor_fixture(4, 4);
  int fails = 0, total = 0;
  for (int gen = 1; gen <= 3; ++gen)
    for (int id : ct.lat.generations[gen]) {
      const DyadicCube& cq = ct.lat.cube(id);
      auto r = local_symmetry_test(ct.set, cq.center, 2 * cq.ball_radius(), cq.side, 0.1, 4000,
                                   13 + id);
      ++total;
      fails += !r.pass;
    }
  CHECK(total >= 20);
  CHECK(static_cast<double>(fails) / total >= 0.3);
}

TEST_CASE("packing of classifier failures orders graph below cantor") {
  // short-wavelength ripple: amplitude ~ L lambda / 2 pi confines the failing
  // scales to a thin band, so the failure packing stays bounded in depth
  GeneratorParams gp;
  gp.slope = 0.3;
  gp.wavelength = 0.1;
  gp.offset = 0;
  Box gb;
  gb.lo = vec2(-2, -2);
  gb.hi = vec2(2, 2);
  BoundarySet graph = generate_boundary(BoundaryKind::lipschitz_graph, gp, gb, 1.0 / 2048, 2);
  Lattice glat = build_lattice(graph, 5);
  std::vector<int> gfail;
  for (int gen = 1; gen <= 5; ++gen)
    for (int id : glat.generations[gen])
      if (!batpp_test(glat, id, 0.05, 90).pass) gfail.push_back(id);
  double gpack = packing_constant(gfail, glat);
  CHECK(gpack <= 5.0);

  // cantor: most scales fail, packing grows with depth
  Fixture c4 = cantor_fixture(4, 4);
  std::vector<int> cfail4;
  for (int gen = 1; gen <= 4; ++gen)
    for (int id : c4.lat.generations[gen])
      if (!batpp_test(c4.lat, id, 0.05, 90).pass) cfail4.push_back(id);
  double cpack4 = packing_constant(cfail4, c4.lat);

  Fixture c5 = cantor_fixture(5, 5);
  std::vector<int> cfail5;
  for (int gen = 1; gen <= 5; ++gen)
    for (int id : c5.lat.generations[gen])
      if (!batpp_test(c5.lat, id, 0.05, 90).pass) cfail5.push_back(id);
  double cpack5 = packing_constant(cfail5, c5.lat);

  CHECK(cpack4 > gpack);
  CHECK(cpack5 >= cpack4 + 0.5);
}
