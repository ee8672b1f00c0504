#include <cmath>
#include <limits>

#include "deltaspec/closedform.hpp"
#include "deltaspec/experiments.hpp"
#include "support.hpp"

using namespace testing;

namespace {

Assertion make(Relation r, double c, double ref, double tol) { return {"a", r, c, ref, tol, "s", false}; }

double computed(const ExperimentReport& r, const std::string& key) {
  for (const auto& [k, v] : r.computed)
    if (k == key) return v;
  FAIL("missing computed key " << key);
  return 0.0;
}

MeshSpec spec_of(const Named& n, int levels) { return {n.geometry, n.params, levels}; }

SolverOptions solver(int k) {
  SolverOptions o;
  o.k = k;
  return o;
}

}  // namespace

TEST_CASE("assertion margins and verdicts") {
  CHECK(make(Relation::le, 1.0, 2.0, 0.5).margin() == 1.5);
  CHECK(make(Relation::le, 2.5, 2.0, 0.5).pass());
  CHECK_FALSE(make(Relation::le, 2.6, 2.0, 0.5).pass());
  CHECK(make(Relation::ge, 1.5, 2.0, 0.5).pass());
  CHECK(make(Relation::ge, 1.5, 2.0, 0.5).margin() == 0.0);
  CHECK_FALSE(make(Relation::ge, 1.4, 2.0, 0.5).pass());
  CHECK(make(Relation::lt, 1.0, 2.0, 0.0).pass());
  CHECK_FALSE(make(Relation::lt, 2.0, 2.0, 0.0).pass());
  CHECK(make(Relation::gt, 3.0, 2.0, 0.5).pass());
  CHECK_FALSE(make(Relation::gt, 2.5, 2.0, 0.5).pass());
  CHECK(make(Relation::abs_within, 1.1, 1.0, 0.2).margin() == doctest::Approx(0.1));
  CHECK_FALSE(make(Relation::abs_within, 1.3, 1.0, 0.2).pass());
  CHECK(make(Relation::rel_within, 10.5, 10.0, 0.06).pass());
  CHECK_FALSE(make(Relation::rel_within, 10.7, 10.0, 0.06).pass());
  CHECK(make(Relation::rel_within, 0.01, 0.0, 0.02).pass());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (auto r : {Relation::le, Relation::ge, Relation::lt, Relation::gt, Relation::abs_within, Relation::rel_within})
    CHECK_FALSE(make(r, nan, 0.0, 1.0).pass());
}

TEST_CASE("informational assertions do not decide the verdict") {
  ExperimentReport r;
  r.name = "demo";
  r.check("holds", Relation::le, 1, 2, 0, "x");
  CHECK(r.passed());
  r.check("fails but informational", Relation::le, 3, 2, 0, "x", true);
  CHECK(r.passed());
  CHECK(to_json(r, false)["verdict"] == "pass");
  r.informational = true;
  CHECK(to_json(r, false)["verdict"] == "informational");
  r.check("fails", Relation::le, 3, 2, 0, "x");
  CHECK_FALSE(r.passed());
  CHECK(to_json(r, false)["verdict"] == "fail");
  const std::string text = to_text(r, false);
  CHECK(text.find("FAIL") != std::string::npos);
  CHECK(text.find("info") != std::string::npos);
  CHECK(text.find("wall_seconds") == std::string::npos);
  CHECK(to_text(r, true).find("wall_seconds") != std::string::npos);
}

TEST_CASE("report JSON carries every assertion field") {
  ExperimentReport r;
  r.name = "demo";
  r.config = {{"alpha", 1.0}};
  r.record("x", 0.123456789012345);
  r.record_reference("y", -0.25);
  r.check("x <= y", Relation::le, 0.5, -0.25, 1.0, "src");
  r.notes.push_back("note");
  r.wall_seconds = 1.5;
  const auto j = to_json(r, true);
  CHECK(j["experiment"] == "demo");
  CHECK(j["computed"]["x"].get<double>() == 0.123456789012345);
  CHECK(j["reference"]["y"] == -0.25);
  const auto& a = j["assertions"][0];
  for (const char* key : {"name", "relation", "computed", "reference", "tolerance", "margin", "pass", "informational", "source"})
    CHECK(a.contains(key));
  CHECK(a["relation"] == "<=");
  CHECK(a["margin"] == 0.25);
  CHECK(j["wall_seconds"] == 1.5);
  CHECK_FALSE(to_json(r, false).contains("wall_seconds"));
  CHECK(j.dump().find("0.123456789012345") != std::string::npos);
}

TEST_CASE("operator names") {
  CHECK(parse_operator("delta") == Operator::delta);
  CHECK(parse_operator("delta-prime") == Operator::delta_prime);
  CHECK(parse_operator("delta_prime") == Operator::delta_prime);
  CHECK_THROWS_AS(parse_operator("laplace"), Error);
}

TEST_CASE("ordering holds at the boundary of the admissible range on every canonical geometry") {
  for (const auto& n : canonical(3.0)) {
    CAPTURE(n.label);
    const Partition p = build(n);
    const int chi = chromatic_colouring(adjacency_graph(p)).chi;
    for (int L : {1, 2}) {
      const ExperimentReport r = run_ordering(spec_of(n, L), 1.0, edge_constant(chi), solver(10));
      CHECK_FALSE(r.informational);
      CHECK(r.passed());
      const auto compared = std::count_if(r.assertions.begin(), r.assertions.end(),
                                          [](const Assertion& a) { return a.name.find("<=") != std::string::npos; });
      CHECK(compared == std::min<long>(10, static_cast<long>(computed(r, "dofs_delta"))));
    }
  }
}

TEST_CASE("ordering above the admissible range is informational") {
  GeometryParams g;
  g.box_radius = 3;
  const ExperimentReport r = run_ordering({CanonicalGeometry::star3, g, 2}, 1.0, 4.0, solver(5));
  CHECK(r.informational);
  CHECK(to_json(r, false)["verdict"] != "fail");
}

TEST_CASE("unitary identity on every canonical geometry") {
  for (const auto& n : canonical(3.0)) {
    CAPTURE(n.label);
    for (auto bc : {BoundaryPolicy::dirichlet, BoundaryPolicy::neumann}) {
      const ExperimentReport r = run_unitary_identity(spec_of(n, 2), 1.7, 20, 5, bc);
      CHECK(r.passed());
    }
  }
}

TEST_CASE("experiments are deterministic") {
  GeometryParams g;
  g.box_radius = 3;
  const MeshSpec s{CanonicalGeometry::star3, g, 2};
  CHECK(to_json(run_ordering(s, 1, 3, solver(5)), false).dump() ==
        to_json(run_ordering(s, 1, 3, solver(5)), false).dump());
  CHECK(to_text(run_unitary_identity(s, 3, 10, 9), false) == to_text(run_unitary_identity(s, 3, 10, 9), false));
}

TEST_CASE("certified star bounds hold on coarse meshes") {
  StarBoundsParams p;
  p.meshes = {{3.0, 2}, {4.0, 3}, {5.0, 3}};
  p.gap_tolerance = 10.0;  // coarse meshes: only the certified side is meaningful here
  p.solver.k = 2;
  const ExperimentReport r = run_star_bounds(p);
  for (const auto& a : r.assertions)
    if (a.name.find("certified") != std::string::npos) {
      CAPTURE(a.name);
      CHECK(a.pass());
    }
  CHECK(r.passed());
}

TEST_CASE("sharpness verdict for chi = 2") {
  SharpnessParams p;
  p.box_radius = 6;
  p.levels = 4;
  p.solver.k = 2;
  p.beta = 5;
  ExperimentReport r = run_sharpness_chi2(p);
  CHECK(computed(r, "ordering_impossible") == 1.0);
  CHECK(r.passed());
  p.beta = 4;
  r = run_sharpness_chi2(p);
  CHECK(computed(r, "ordering_impossible") == 0.0);
  CHECK(r.passed());
  bool boundary_note = false;
  for (const auto& n : r.notes) boundary_note = boundary_note || n.find("boundary case") != std::string::npos;
  CHECK(boundary_note);
  p.beta = 3;
  r = run_sharpness_chi2(p);
  CHECK(computed(r, "ordering_impossible") == 0.0);
  CHECK(r.passed());
}

TEST_CASE("mesh-free deformation integral: direct and reduced forms agree") {
  for (double n : {1.0, 4.0, 16.0, 64.0}) {
    const DeformationQuadrature q = deformation_quadrature(square_bump({0, 2}, 2), 1.0, n);
    CHECK(std::abs(q.direct - q.reduced) <= 1e-10 * (std::abs(q.reduced) + q.norm2));
    CHECK(q.norm2 > 0.0);
  }
  CHECK(deformation_quadrature(square_bump({0, 2}, 2), 1.0, 64.0).direct < 0.0);
}

TEST_CASE("mesh-free psi quotients approach the threshold") {
  const double beta = 2.0;
  double prev = INFINITY;
  for (double n : {8.0, 16.0, 32.0}) {
    const PsiQuadrature q = psi_quadrature(n, 0.0, beta);
    CHECK(q.rayleigh < prev);
    CHECK(q.rayleigh > -4 / (beta * beta));
    CHECK(std::abs(q.norm2 / q.limit_norm2 - 1) <= 1e-6);
    prev = q.rayleigh;
  }
  CHECK(std::abs(prev + 1.0) <= 0.1);
  CHECK(psi_quadrature(32.0, 0.0, beta).limit_norm2 == doctest::Approx(2083.0 / 770.0).epsilon(1e-12));
  // The momentum shift adds p^2.
  const PsiQuadrature shifted = psi_quadrature(32.0, 0.5, beta);
  CHECK(std::abs(shifted.rayleigh - (psi_quadrature(32.0, 0.0, beta).rayleigh + 0.25)) <= 1e-10);
}

TEST_CASE("closed-form experiments pass") {
  CHECK(run_minimax(100000).passed());
  IntervalParams ip;
  ip.betas = {1.0, 2.0};
  ip.lengths = {1.0};
  CHECK(run_interval(ip).passed());
  CHECK(run_abc(2000, 3).passed());
}
