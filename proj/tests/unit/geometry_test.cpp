#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>

#include "support.hpp"

using namespace testing;

namespace {

Graph complete(int n) {
  Graph g;
  for (int i = 1; i <= n; ++i) g.vertices.push_back(i);
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) g.edges.emplace_back(i, j);
  return g;
}

Graph cycle(int n) {
  Graph g;
  for (int i = 1; i <= n; ++i) g.vertices.push_back(i);
  for (int i = 1; i <= n; ++i) {
    const int j = i % n + 1;
    g.edges.emplace_back(std::min(i, j), std::max(i, j));
  }
  return g;
}

Graph petersen() {
  Graph g;
  for (int i = 1; i <= 10; ++i) g.vertices.push_back(i);
  auto add = [&](int a, int b) { g.edges.emplace_back(std::min(a, b), std::max(a, b)); };
  for (int i = 0; i < 5; ++i) {
    add(1 + i, 1 + (i + 1) % 5);
    add(6 + i, 6 + (i + 2) % 5);
    add(1 + i, 6 + i);
  }
  return g;
}

/// Same graph with vertex ids renamed by a permutation.
Graph relabel(const Graph& g, const std::vector<int>& perm) {
  Graph h;
  for (int v : g.vertices) h.vertices.push_back(perm[v - 1]);
  std::sort(h.vertices.begin(), h.vertices.end());
  for (auto [a, b] : g.edges) {
    const int x = perm[a - 1], y = perm[b - 1];
    h.edges.emplace_back(std::min(x, y), std::max(x, y));
  }
  return h;
}

double total_area(const Partition& p) {
  double a = 0.0;
  for (int id : p.subdomain_ids()) a += p.subdomain_area(id);
  return a;
}

}  // namespace

TEST_CASE("half plane: two subdomains split by one interface of length 2R") {
  GeometryParams g;
  g.box_radius = 10;
  const Partition p = build_canonical_partition(CanonicalGeometry::half_plane, g);
  CHECK(p.subdomains().size() == 2);
  REQUIRE(p.interfaces().size() == 1);
  CHECK(p.interfaces()[0].length == doctest::Approx(20.0).epsilon(1e-15));
  const Graph gr = adjacency_graph(p);
  REQUIRE(gr.edges.size() == 1);
  CHECK(gr.has_edge(1, 2));
}

TEST_CASE("star3: three sectors, rays clipped to the box") {
  GeometryParams g;
  g.box_radius = 6;
  const Partition p = build_canonical_partition(CanonicalGeometry::star3, g);
  CHECK(p.subdomains().size() == 3);
  REQUIRE(p.interfaces().size() == 3);
  // Rays at 30, 150 and 270 degrees; the slanted ones exit through the sides at R / cos(pi/6).
  std::vector<double> lengths;
  for (const auto& itf : p.interfaces()) lengths.push_back(itf.length);
  std::sort(lengths.begin(), lengths.end());
  CHECK(lengths[0] == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(lengths[1] == doctest::Approx(4.0 * std::sqrt(3.0)).epsilon(1e-14));
  CHECK(lengths[2] == doctest::Approx(4.0 * std::sqrt(3.0)).epsilon(1e-14));
  // Rays meet pairwise at 2 pi / 3 at the origin.
  std::vector<Vec2> dirs;
  for (const auto& itf : p.interfaces()) {
    const Vec2 a = p.vertices()[itf.polyline.front()], b = p.vertices()[itf.polyline.back()];
    const Vec2 far = norm(a) > norm(b) ? a : b;
    CHECK(std::min(norm(a), norm(b)) == 0.0);
    dirs.push_back((1.0 / norm(far)) * far);
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) CHECK(dot(dirs[i], dirs[j]) == doctest::Approx(-0.5).epsilon(1e-14));
  const Graph gr = adjacency_graph(p);
  CHECK(gr.edges.size() == 3);
  CHECK(chromatic_colouring(gr).chi == 3);
}

TEST_CASE("line with bump: bounded bump cell, closed bump interface and the line") {
  GeometryParams g;
  g.box_radius = 8;
  g.bump = square_bump({0.0, 2.0}, 2.0);
  const Partition p = build_canonical_partition(CanonicalGeometry::line_with_bump, g);
  CHECK(p.subdomains().size() == 3);
  REQUIRE(p.interfaces().size() == 2);
  int bump_cell = 0;
  for (int id : p.subdomain_ids())
    if (p.is_bounded(id)) bump_cell = id;
  REQUIRE(bump_cell != 0);
  CHECK(p.subdomain_area(bump_cell) == doctest::Approx(4.0).epsilon(1e-14));
  bool saw_bump = false, saw_line = false;
  for (const auto& itf : p.interfaces()) {
    if (itf.k == bump_cell || itf.l == bump_cell) {
      saw_bump = true;
      CHECK(itf.polyline.size() == 5);  // four edges, closed
      CHECK(itf.polyline.front() == itf.polyline.back());
      CHECK(itf.length == doctest::Approx(8.0).epsilon(1e-14));
    } else {
      saw_line = true;
      CHECK(itf.length == doctest::Approx(16.0).epsilon(1e-14));
    }
  }
  CHECK(saw_bump);
  CHECK(saw_line);
}

TEST_CASE("wedge: two subdomains split by the clipped boundary rays") {
  GeometryParams g;
  g.box_radius = 8;
  g.angle = 2 * pi / 3;
  const Partition p = build_canonical_partition(CanonicalGeometry::wedge, g);
  CHECK(p.subdomains().size() == 2);
  REQUIRE(p.interfaces().size() == 1);
  CHECK(p.interfaces()[0].length == doctest::Approx(2 * 8 / std::cos(pi / 6)).epsilon(1e-14));
  // Upper half box minus the two triangles below the rays at pi/6 and 5pi/6.
  const double inner = std::min(p.subdomain_area(1), p.subdomain_area(2));
  CHECK(inner == doctest::Approx(64.0 * (2.0 - std::tan(pi / 6))).epsilon(1e-13));
  REQUIRE(p.axis().has_value());
}

TEST_CASE("wedge of angle pi is the half plane") {
  GeometryParams g;
  g.box_radius = 3;
  g.angle = pi;
  const Partition p = build_canonical_partition(CanonicalGeometry::wedge, g);
  CHECK(p.interfaces()[0].length == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(p.subdomain_area(1) == doctest::Approx(18.0).epsilon(1e-14));
}

TEST_CASE("grid 2x2: diagonal cells touch only at a point") {
  GeometryParams g;
  g.box_radius = 2;
  const Partition p = build_canonical_partition(CanonicalGeometry::grid, g);
  const Graph gr = adjacency_graph(p);
  CHECK(gr.edges.size() == 4);
  CHECK(gr.has_edge(1, 2));
  CHECK(gr.has_edge(1, 3));
  CHECK(gr.has_edge(2, 4));
  CHECK(gr.has_edge(3, 4));
  CHECK_FALSE(gr.has_edge(1, 4));
  CHECK_FALSE(gr.has_edge(2, 3));
  CHECK(chromatic_colouring(gr).chi == 2);
}

TEST_CASE("wheel: hub triangle and three outer cells are mutually adjacent") {
  GeometryParams g;
  g.box_radius = 8;
  g.sides = 3;
  g.radius = 1;
  const Partition p = build_canonical_partition(CanonicalGeometry::wheel, g);
  const Graph gr = adjacency_graph(p);
  CHECK(gr.edges.size() == 6);
  CHECK(chromatic_colouring(gr).chi == 4);
  int bounded = 0;
  for (int id : p.subdomain_ids()) bounded += p.is_bounded(id);
  CHECK(bounded == 1);
  // Hub sides are chords of the unit circle subtending 2 pi / 3.
  int hub_sides = 0;
  for (const auto& itf : p.interfaces())
    if (std::abs(itf.length - std::sqrt(3.0)) < 1e-13) ++hub_sides;
  CHECK(hub_sides == 3);
}

TEST_CASE("wheel with an even spoke count needs only three colours") {
  GeometryParams g;
  g.box_radius = 8;
  g.sides = 4;
  const Partition p = build_canonical_partition(CanonicalGeometry::wheel, g);
  CHECK(chromatic_colouring(adjacency_graph(p)).chi == 3);
}

TEST_CASE("inclusion: regular polygon interface has the polygon perimeter") {
  GeometryParams g;
  g.box_radius = 6;
  g.sides = 16;
  g.radius = 1;
  const Partition p = build_canonical_partition(CanonicalGeometry::inclusion, g);
  REQUIRE(p.interfaces().size() == 1);
  CHECK(p.interfaces()[0].length == doctest::Approx(32 * std::sin(pi / 16)).epsilon(1e-14));
  CHECK(p.subdomain_area(1) == doctest::Approx(8 * std::sin(2 * pi / 16)).epsilon(1e-13));
}

TEST_CASE("every canonical partition tiles the box and shares interfaces verbatim") {
  for (const auto& n : canonical(5.0)) {
    CAPTURE(n.label);
    const Partition p = build(n);
    CHECK(total_area(p) == doctest::Approx(100.0).epsilon(1e-9));
    for (const auto& itf : p.interfaces()) {
      CHECK(itf.length > 0.0);
      CHECK(itf.length == doctest::Approx(polyline_length(p.vertices(), itf.polyline)).epsilon(1e-15));
      // Each polyline edge occurs, in some orientation, in a boundary loop of both sides.
      for (std::size_t i = 0; i + 1 < itf.polyline.size(); ++i) {
        const int a = itf.polyline[i], b = itf.polyline[i + 1];
        for (int side : {itf.k, itf.l}) {
          bool found = false;
          for (const auto& loop : p.subdomain(side).pieces)
            for (std::size_t j = 0; j < loop.size(); ++j) {
              const int u = loop[j], v = loop[(j + 1) % loop.size()];
              found = found || (u == a && v == b) || (u == b && v == a);
            }
          CHECK(found);
        }
      }
    }
    for (const auto& sd : p.subdomains())
      for (const auto& loop : sd.pieces) CHECK(signed_area(p.vertices(), loop) > 0.0);
  }
}

TEST_CASE("partition builder rejects bad parameters") {
  GeometryParams g;
  g.box_radius = 4;
  g.angle = 0.0;
  check_throws_containing([&] { build_canonical_partition(CanonicalGeometry::wedge, g); }, "wedge angle");
  g.angle = 3.5;
  check_throws_containing([&] { build_canonical_partition(CanonicalGeometry::wedge, g); }, "wedge angle");
  g.angle = 1.0;
  g.box_radius = -1;
  check_throws_containing([&] { build_canonical_partition(CanonicalGeometry::wedge, g); }, "box_radius");

  GeometryParams b;
  b.box_radius = 4;
  b.bump = square_bump({0.0, 0.5}, 2.0);  // dips below the line
  check_throws_containing([&] { build_canonical_partition(CanonicalGeometry::line_with_bump, b); },
                          "strictly inside the upper half box");
  b.bump = square_bump({0.0, 3.5}, 2.0);  // leaves the box
  check_throws_containing([&] { build_canonical_partition(CanonicalGeometry::line_with_bump, b); },
                          "strictly inside the upper half box");
  b.bump = {{-1, 1}, {1, 2}, {1, 1}, {-1, 2}};  // bow tie
  CHECK_THROWS_AS(build_canonical_partition(CanonicalGeometry::line_with_bump, b), Error);

  GeometryParams gr;
  gr.nx = 0;
  check_throws_containing([&] { build_canonical_partition(CanonicalGeometry::grid, gr); }, "grid counts");
  check_throws_containing([] { parse_geometry_name("torus"); }, "unknown geometry name 'torus'");
}

TEST_CASE("partition constructor rejects overlapping and incomplete tilings") {
  const std::vector<Vec2> v{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}, {0, -1}, {0, 1}};
  // Only the left half covered.
  check_throws_containing([&] { Partition(1.0, v, {{1, {{0, 4, 5, 3}}}}, {}); }, "box area");
  // Two halves without the interface record.
  check_throws_containing([&] { Partition(1.0, v, {{1, {{0, 4, 5, 3}}}, {2, {{4, 1, 2, 5}}}}, {}); },
                          "not covered by an interface");
  // Interface of zero length.
  check_throws_containing(
      [&] { Partition(1.0, v, {{1, {{0, 4, 5, 3}}}, {2, {{4, 1, 2, 5}}}}, {{1, 1, 2, {4, 4}, 0.0}}); },
      "zero length");
  // Clockwise piece.
  CHECK_THROWS_AS(Partition(1.0, v, {{1, {{0, 3, 5, 4}}}, {2, {{4, 1, 2, 5}}}}, {{1, 1, 2, {4, 5}, 0.0}}),
                  Error);
  // The valid version.
  const Partition ok(1.0, v, {{1, {{0, 4, 5, 3}}}, {2, {{4, 1, 2, 5}}}}, {{1, 1, 2, {4, 5}, 0.0}});
  CHECK(ok.interface(1).length == doctest::Approx(2.0));
  check_throws_containing([&] { (void)ok.subdomain(7); }, "unknown subdomain id 7");
}

TEST_CASE("interaction data validation") {
  GeometryParams g;
  g.box_radius = 2;
  const Partition p = build_canonical_partition(CanonicalGeometry::star3, g);
  check_throws_containing([&] { InteractionData::uniform(p, 1.0, 0.0); }, "beta must be strictly positive");
  check_throws_containing([&] { InteractionData::uniform(p, 1.0, -2.0); }, "beta must be strictly positive");
  InteractionData d = InteractionData::uniform(p, 1.0, 2.0);
  d.validate(p);
  d.beta.erase(2);
  check_throws_containing([&] { d.validate(p); }, "cover exactly");
  check_throws_containing([&] { (void)d.beta_of(2); }, "missing from beta");
  d.beta[2] = 0.0;
  check_throws_containing([&] { d.validate(p); }, "beta must be strictly positive");
}

TEST_CASE("chromatic numbers of standard graphs") {
  CHECK(chromatic_colouring(complete(2)).chi == 2);
  CHECK(chromatic_colouring(complete(3)).chi == 3);
  CHECK(chromatic_colouring(complete(4)).chi == 4);
  CHECK(chromatic_colouring(complete(7)).chi == 7);
  CHECK(chromatic_colouring(cycle(4)).chi == 2);
  CHECK(chromatic_colouring(cycle(5)).chi == 3);
  CHECK(chromatic_colouring(cycle(9)).chi == 3);
  CHECK(chromatic_colouring(petersen()).chi == 3);
  Graph isolated;
  isolated.vertices = {1, 2, 3};
  CHECK(chromatic_colouring(isolated).chi == 1);
}

TEST_CASE("colouring is proper, minimal and lexicographically first") {
  const Graph c5 = cycle(5);
  const Colouring c = chromatic_colouring(c5);
  CHECK(is_proper(c5, c));
  // Greedy in vertex order with smallest colours: 0 1 0 1 2.
  CHECK(c.phi.at(1) == 0);
  CHECK(c.phi.at(2) == 1);
  CHECK(c.phi.at(3) == 0);
  CHECK(c.phi.at(4) == 1);
  CHECK(c.phi.at(5) == 2);
  // No proper colouring with chi - 1 colours exists: brute force over 2^5 assignments.
  int proper2 = 0;
  for (int mask = 0; mask < 32; ++mask) {
    Colouring t{2, {}};
    for (int v = 1; v <= 5; ++v) t.phi[v] = (mask >> (v - 1)) & 1;
    proper2 += is_proper(c5, t);
  }
  CHECK(proper2 == 0);
}

TEST_CASE("chromatic number is invariant under vertex relabelling") {
  std::mt19937_64 rng(11);
  for (const Graph& g : {petersen(), cycle(7), complete(5)}) {
    const int chi = chromatic_colouring(g).chi;
    std::vector<int> perm(g.vertices.size());
    std::iota(perm.begin(), perm.end(), 1);
    for (int trial = 0; trial < 10; ++trial) {
      std::shuffle(perm.begin(), perm.end(), rng);
      const Graph h = relabel(g, perm);
      const Colouring c = chromatic_colouring(h);
      CHECK(c.chi == chi);
      CHECK(is_proper(h, c));
    }
  }
}

TEST_CASE("exact colouring refuses graphs above the vertex limit") {
  check_throws_containing([] { chromatic_colouring(cycle(25)); }, "exact colouring limit");
  ColouringOptions wide;
  wide.max_vertices = 30;
  CHECK(chromatic_colouring(cycle(25), wide).chi == 3);
}

TEST_CASE("edge constant 4 sin^2(pi/chi)") {
  CHECK(edge_constant(2) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(edge_constant(3) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(edge_constant(4) == doctest::Approx(2.0).epsilon(1e-15));
  for (int chi = 2; chi < 40; ++chi) CHECK(edge_constant(chi + 1) < edge_constant(chi));
  check_throws_containing([] { edge_constant(1); }, "chi >= 2");
}

TEST_CASE("phase assignment for chi = 2, beta = 4") {
  GeometryParams g;
  g.box_radius = 2;
  const Partition p = build_canonical_partition(CanonicalGeometry::half_plane, g);
  const Colouring c = chromatic_colouring(adjacency_graph(p));
  const PhaseAssignment ph = phase_assignment(p, c, InteractionData::uniform(p, 0.0, 4.0));
  CHECK(ph.z.at(1) == std::complex<double>(1.0, 0.0));
  CHECK(ph.z.at(2).real() == -1.0);
  CHECK(std::abs(ph.z.at(2).imag()) < 1e-15);
  CHECK(ph.alpha_z.at(1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("phase assignment on star3 with beta = 3 gives alpha_Z = 1") {
  GeometryParams g;
  g.box_radius = 2;
  const Partition p = build_canonical_partition(CanonicalGeometry::star3, g);
  const PhaseAssignment ph = phase_assignment(p, chromatic_colouring(adjacency_graph(p)),
                                              InteractionData::uniform(p, 0.0, 3.0));
  for (const auto& [id, a] : ph.alpha_z) CHECK(a == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("phase assignment for chi = 4: adjacent colours 0 and 1 are a quarter turn apart") {
  GeometryParams g;
  g.box_radius = 6;
  g.sides = 3;
  const Partition p = build_canonical_partition(CanonicalGeometry::wheel, g);
  const Colouring c = chromatic_colouring(adjacency_graph(p));
  REQUIRE(c.chi == 4);
  const PhaseAssignment ph = phase_assignment(p, c, InteractionData::uniform(p, 0.0, 1.0));
  int quarter = 0;
  for (const auto& itf : p.interfaces()) {
    const int a = c.phi.at(itf.k), b = c.phi.at(itf.l);
    const double d2 = std::norm(ph.z.at(itf.k) - ph.z.at(itf.l));
    CHECK(ph.alpha_z.at(itf.id) == doctest::Approx(d2).epsilon(1e-15));
    if (std::min(a, b) == 0 && std::max(a, b) == 1) {
      ++quarter;
      CHECK(d2 == doctest::Approx(2.0).epsilon(1e-15));
    }
  }
  CHECK(quarter == 1);
}

TEST_CASE("phases are unit and alpha_Z dominates the edge constant on every canonical partition") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ub(0.2, 5.0);
  for (const auto& n : canonical()) {
    CAPTURE(n.label);
    const Partition p = build(n);
    const Colouring c = chromatic_colouring(adjacency_graph(p));
    InteractionData d = InteractionData::uniform(p, 0.0, 1.0);
    for (auto& [id, b] : d.beta) b = ub(rng);
    const PhaseAssignment ph = phase_assignment(p, c, d);
    for (const auto& [k, z] : ph.z) CHECK(std::abs(std::abs(z) - 1.0) <= 1e-15);
    for (const auto& itf : p.interfaces()) {
      const double d2 = std::norm(ph.z.at(itf.k) - ph.z.at(itf.l));
      CHECK(d2 >= edge_constant(c.chi) - 1e-12);
      CHECK(ph.alpha_z.at(itf.id) * d.beta.at(itf.id) >= edge_constant(c.chi) - 1e-12);
    }
  }
}

TEST_CASE("phase assignment rejects an improper colouring") {
  GeometryParams g;
  g.box_radius = 2;
  const Partition p = build_canonical_partition(CanonicalGeometry::half_plane, g);
  const Colouring bad{2, {{1, 0}, {2, 0}}};
  check_throws_containing([&] { phase_assignment(p, bad, InteractionData::uniform(p, 0.0, 1.0)); },
                          "not proper");
}
