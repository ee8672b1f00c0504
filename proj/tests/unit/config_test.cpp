#include "deltaspec/config.hpp"
#include "support.hpp"

using namespace testing;

TEST_CASE("star3 example config") {
  const Config c = parse_config(R"({"geometry":{"name":"star3"},"box_radius":6,"levels":4,"alpha":1,"beta":3,
                                   "solver":{"k":10,"tol":1e-8,"seed":7}})");
  REQUIRE(c.mesh);
  CHECK(c.mesh->geometry == CanonicalGeometry::star3);
  CHECK(c.mesh->params.box_radius == 6.0);
  CHECK(c.mesh->levels == 4);
  CHECK(c.scalar_alpha() == 1.0);
  CHECK(c.scalar_beta() == 3.0);
  CHECK(c.solver.k == 10);
  CHECK(c.solver.tol == 1e-8);
  CHECK(c.solver.seed == 7);
  CHECK(c.boundary == BoundaryPolicy::dirichlet);
  CHECK_FALSE(c.format);
  // Scalars broadcast to every interface.
  const Partition p = build_canonical_partition(c.mesh->geometry, c.mesh->params);
  const InteractionData d = c.interactions(p);
  CHECK(d.alpha.size() == 3);
  for (const auto& [id, b] : d.beta) CHECK(b == 3.0);
}

TEST_CASE("per-interface strengths") {
  const Config c = parse_config(R"({"geometry":{"name":"star3"},"box_radius":2,"levels":0,
                                   "alpha":{"1":1,"2":2,"3":3},"beta":{"1":0.5,"2":1,"3":1.5}})");
  const Partition p = build_canonical_partition(c.mesh->geometry, c.mesh->params);
  const InteractionData d = c.interactions(p);
  CHECK(d.alpha_of(2) == 2.0);
  CHECK(d.beta_of(3) == 1.5);
  check_throws_containing([&] { (void)c.scalar_beta(); }, "must be a scalar");
  check_throws_containing(
      [] { parse_config(R"({"geometry":{"name":"star3"},"box_radius":2,"levels":0,"beta":{"1":1,"2":1}})"); },
      "cover exactly");
  check_throws_containing(
      [] { parse_config(R"({"geometry":{"name":"half_plane"},"box_radius":2,"levels":0,"beta":{"x":1}})"); },
      "field 'beta.x'");
}

TEST_CASE("beta must be strictly positive") {
  check_throws_containing(
      [] { parse_config(R"({"geometry":{"name":"star3"},"box_radius":6,"levels":4,"beta":0})"); },
      "beta must be strictly positive");
  check_throws_containing(
      [] { parse_config(R"({"geometry":{"name":"half_plane"},"box_radius":6,"levels":4,"beta":{"1":-1}})"); },
      "beta must be strictly positive");
}

TEST_CASE("schema errors name the field") {
  check_throws_containing([] { parse_config(R"({"geometry":{"name":"star3"},"levels":4})"); },
                          "missing field 'box_radius'");
  check_throws_containing([] { parse_config(R"({"geometry":{"name":"star3"},"box_radius":6})"); },
                          "missing field 'levels'");
  check_throws_containing([] { parse_config(R"({"geometry":{"name":"wedge"},"box_radius":6,"levels":1})"); },
                          "missing field 'geometry.angle'");
  check_throws_containing([] { parse_config(R"({"geometry":{"name":"star3"},"box_radius":"6","levels":1})"); },
                          "field 'box_radius' must be a number");
  check_throws_containing([] { parse_config(R"({"geometry":{"name":"star3"},"box_radius":6,"levels":-1})"); },
                          "field 'levels' must be non-negative");
  check_throws_containing([] { parse_config(R"({"geometry":{"name":"star3"},"box_radius":6,"levels":1.5})"); },
                          "field 'levels' must be an integer");
  check_throws_containing(
      [] { parse_config(R"({"geometry":{"name":"star3"},"box_radius":6,"levels":1,"solver":{"k":0}})"); },
      "field 'solver.k'");
  check_throws_containing(
      [] { parse_config(R"({"geometry":{"name":"star3"},"box_radius":6,"levels":1,"solver":{"rtol":1}})"); },
      "field 'solver.rtol' is not recognised");
  check_throws_containing([] { parse_config(R"({"geometry":{"name":"star3"},"box_radius":6,"levels":1,"R":2})"); },
                          "field 'R' is not recognised");
  check_throws_containing([] { parse_config(R"({"box_radius":6})"); }, "missing field 'geometry'");
  check_throws_containing([] { parse_config(R"({"geometry":{"name":"hexagon"},"box_radius":6,"levels":1})"); },
                          "unknown geometry name 'hexagon'");
  check_throws_containing([] { parse_config("{not json"); }, "malformed JSON");
  check_throws_containing([] { parse_config("[1,2]"); }, "must be a JSON object");
  check_throws_containing([] { parse_config(R"({"format":"xml"})"); }, "unknown output format 'xml'");
  check_throws_containing([] { parse_config(R"({"boundary":"robin"})"); }, "unknown boundary policy");
  check_throws_containing(
      [] { parse_config(R"({"geometry":{"name":"wedge","angle":4},"box_radius":6,"levels":1})"); }, "wedge angle");
}

TEST_CASE("geometry-free configs and optional fields") {
  const Config c = parse_config(R"({"alpha":2,"format":"csv","boundary":"neumann",
                                   "solver":{"deterministic":true,"preconditioner":"jacobi","padding":3},
                                   "experiment":{"samples":10}})");
  CHECK_FALSE(c.mesh);
  CHECK(c.scalar_alpha() == 2.0);
  CHECK(c.format == OutputFormat::csv);
  CHECK(c.boundary == BoundaryPolicy::neumann);
  CHECK(c.solver.preconditioner == Preconditioner::jacobi);
  CHECK(c.solver.padding == 3);
  CHECK(c.experiment["samples"] == 10);
  check_throws_containing([&] { c.require_mesh(); }, "missing field 'geometry'");
}

TEST_CASE("line_with_bump defaults to the standard square bump") {
  const Config c = parse_config(R"({"geometry":{"name":"line_with_bump"},"box_radius":8,"levels":0})");
  REQUIRE(c.mesh);
  CHECK(c.mesh->params.bump.size() == 4);
  const Config d = parse_config(
      R"({"geometry":{"name":"line_with_bump","bump":[[-1,1],[1,1],[1,3],[-1,3]]},"box_radius":8,"levels":0})");
  CHECK(d.mesh->params.bump[2].y == 3.0);
}
