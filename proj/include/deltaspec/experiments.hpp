#ifndef DELTASPEC_EXPERIMENTS_HPP
#define DELTASPEC_EXPERIMENTS_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "deltaspec/forms.hpp"
#include "deltaspec/geometry.hpp"
#include "deltaspec/mesh.hpp"
#include "deltaspec/spectrum.hpp"

namespace deltaspec {

enum class Relation { le, ge, lt, gt, abs_within, rel_within };

/// One verdict: computed vs reference under a relation and tolerance.
/// `source` names where the reference value comes from.
struct Assertion {
  std::string name;
  Relation relation = Relation::le;
  double computed = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  std::string source;
  bool informational = false;

  /// Signed slack; non-negative exactly when the assertion passes (strict relations need > 0).
  double margin() const;
  bool pass() const;
};

std::string to_string(Relation r);

struct ExperimentReport {
  std::string name;
  nlohmann::ordered_json config;
  std::vector<std::pair<std::string, double>> computed;
  std::vector<std::pair<std::string, double>> reference;
  std::vector<Assertion> assertions;
  std::vector<std::string> notes;
  /// The hypothesis of the tested statement fails; the run is reported only.
  bool informational = false;
  double wall_seconds = 0.0;

  void record(std::string key, double value) { computed.emplace_back(std::move(key), value); }
  void record_reference(std::string key, double value) { reference.emplace_back(std::move(key), value); }
  Assertion& check(std::string name, Relation rel, double computed, double reference, double tolerance,
                   std::string source, bool informational = false);
  /// All non-informational assertions pass.
  bool passed() const;
};

/// Timing is left out when `include_timing` is false so reruns are byte-identical.
nlohmann::ordered_json to_json(const ExperimentReport& r, bool include_timing);
std::string to_text(const ExperimentReport& r, bool include_timing);

struct MeshSpec {
  CanonicalGeometry geometry = CanonicalGeometry::half_plane;
  GeometryParams params;
  int levels = 3;
};

std::shared_ptr<const Mesh> make_mesh(const MeshSpec& spec);
nlohmann::ordered_json describe(const MeshSpec& spec);

/// Mesh family (box radius, refinement levels).
using MeshLadder = std::vector<std::pair<double, int>>;

ExperimentReport run_ordering(const MeshSpec& spec, double alpha, double beta, const SolverOptions& solver);

ExperimentReport run_unitary_identity(const MeshSpec& spec, double beta, int trials, std::uint64_t seed,
                                      BoundaryPolicy bc = BoundaryPolicy::dirichlet);

struct StarBoundsParams {
  double alpha = 1.0;
  double beta = 1.0;
  MeshLadder meshes{{8.0, 5}, {12.0, 6}, {16.0, 7}};
  double gap_tolerance = 0.06;
  SolverOptions solver;
};
ExperimentReport run_star_bounds(const StarBoundsParams& p);

enum class Operator { delta, delta_prime };
Operator parse_operator(const std::string& name);
std::string to_string(Operator op);

struct ThresholdParams {
  CanonicalGeometry geometry = CanonicalGeometry::half_plane;
  double angle = 0.0;  // wedge only
  Operator op = Operator::delta;
  double strength = 1.0;  // alpha for delta, beta for delta_prime
  MeshLadder meshes{{8.0, 5}, {12.0, 6}, {16.0, 7}};
  /// Extra levels at the largest box for the refinement-monotonicity check.
  std::vector<int> refinement_levels;
  double tolerance = 0.02;
  std::vector<double> psi_n{8.0, 16.0, 32.0};
  double p = 0.0;
  double psi_tolerance = 0.1;
  /// Mesh cross-check of one psi quotient: scale n, box, levels.
  double psi_mesh_n = 2.0;
  double psi_mesh_box = 16.0;
  int psi_mesh_levels = 6;
  SolverOptions solver;
};
ExperimentReport run_threshold_convergence(const ThresholdParams& p);

struct DeformationParams {
  std::vector<Vec2> bump = square_bump({0.0, 2.0}, 2.0);
  double alpha = 1.0;
  std::vector<double> n_list{1.0, 4.0, 16.0, 64.0};
  double box_radius = 16.0;
  int levels = 5;
  /// Scale at which the mesh value of I_n is compared with quadrature.
  double mesh_n = 4.0;
  SolverOptions solver;
};
ExperimentReport run_deformation_bound_state(const DeformationParams& p);

struct IndicatorParams {
  int sides = 16;
  double radius = 1.0;
  double beta = 1.0;
  MeshLadder meshes{{6.0, 4}, {9.0, 4}};
  double large_beta = 1000.0;
  SolverOptions solver;
};
ExperimentReport run_indicator_bound_state(const IndicatorParams& p);

struct SharpnessParams {
  double alpha = 1.0;
  double beta = 5.0;
  double box_radius = 16.0;
  int levels = 6;
  SolverOptions solver;
};
ExperimentReport run_sharpness_chi2(const SharpnessParams& p);

ExperimentReport run_minimax(int grid_points = 1000000);

struct IntervalParams {
  std::vector<double> betas{0.5, 1.0, 2.0, 4.0};
  std::vector<double> lengths{0.5, 1.0, 2.0, 5.0};
  /// Lengths checked only for the strict bound and monotonicity.
  std::vector<double> long_lengths{10.0, 40.0, 80.0};
  int elements = 10000;
};
ExperimentReport run_interval(const IntervalParams& p);

ExperimentReport run_abc(int samples, std::uint64_t seed);

struct WedgeTraceParams {
  std::vector<double> angles;
  double gamma = 1.0;
  double box_radius = 8.0;
  int levels = 5;
  /// Angle at which sharpness is checked, and the relative tolerance.
  double sharp_angle = 0.0;
  double sharp_tolerance = 0.10;
  SolverOptions solver;
};
ExperimentReport run_wedge_trace(const WedgeTraceParams& p);

struct EvenOddParams {
  std::vector<double> angles;
  double box_radius = 8.0;
  int levels = 4;
  int trials = 20;
  std::uint64_t seed = 1;
};
ExperimentReport run_even_odd(const EvenOddParams& p);

/// Iterative vs dense eigenvalues for delta and delta' forms on each spec.
ExperimentReport run_solver_crosscheck(const std::vector<MeshSpec>& specs, double alpha, double beta,
                                       const SolverOptions& solver);

/// Mesh-free evaluation of I_n = a[f_n] + alpha^2/4 |f_n|^2.
struct DeformationQuadrature {
  double direct = 0.0;   // from the four separated integrals
  double reduced = 0.0;  // (2/(alpha n)) |phi'|^2 - alpha |f_n on bump|^2
  double norm2 = 0.0;
};
DeformationQuadrature deformation_quadrature(const std::vector<Vec2>& bump, double alpha, double n);

/// Mesh-free Rayleigh quotient and squared norm of psi_{n,p} in the infinite wedge.
struct PsiQuadrature {
  double rayleigh = 0.0;
  double norm2 = 0.0;
  double limit_norm2 = 0.0;  // (beta/2) |phi|^2_{L2(R)}
};
PsiQuadrature psi_quadrature(double n, double p, double beta);

}  // namespace deltaspec

#endif  // DELTASPEC_EXPERIMENTS_HPP
