#ifndef DELTASPEC_FORMS_HPP
#define DELTASPEC_FORMS_HPP

#include <complex>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "deltaspec/geometry.hpp"
#include "deltaspec/mesh.hpp"

namespace deltaspec {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// continuous: one dof per node. broken: one dof per (subdomain, node).
/// subdomain: dofs of a single subdomain only.
enum class Space { continuous, broken, subdomain };
enum class BoundaryPolicy { dirichlet, neumann };

BoundaryPolicy parse_boundary_policy(const std::string& name);
std::string to_string(BoundaryPolicy bc);
std::string to_string(Space s);

struct DofMap {
  Space space = Space::continuous;
  std::vector<int> dof_node;
  std::vector<int> dof_domain;  // 0 in the continuous space
  std::vector<std::vector<std::pair<int, int>>> node_dofs;  // node -> (domain, dof)

  int size() const { return static_cast<int>(dof_node.size()); }
  /// Dof carrying (domain, node), or -1 when absent or constrained away.
  /// In the continuous space the domain is ignored.
  int dof(int domain, int node) const;
};

struct DiscreteForm {
  SparseMatrix A;
  SparseMatrix M;
  DofMap dofs;
  BoundaryPolicy bc = BoundaryPolicy::dirichlet;
  std::shared_ptr<const Mesh> mesh;

  Eigen::Index size() const { return A.rows(); }
};

/// P1 stiffness minus alpha-weighted interface edge mass, continuous space.
DiscreteForm assemble_delta(std::shared_ptr<const Mesh> mesh, const InteractionData& d, BoundaryPolicy bc);
/// Block-diagonal stiffness minus beta^{-1}-weighted trace-jump edge mass, broken space.
DiscreteForm assemble_delta_prime(std::shared_ptr<const Mesh> mesh, const InteractionData& d, BoundaryPolicy bc);
/// |grad f|^2 - gamma |f|^2 on the interface part of the boundary of one subdomain.
/// With `vanish_on_axis` the nodes on the mesh reflection axis are constrained to zero.
DiscreteForm assemble_wedge_trace(std::shared_ptr<const Mesh> mesh, int domain, double gamma,
                                  BoundaryPolicy bc, bool vanish_on_axis);

/// Copies each nodal value of a continuous vector onto every subdomain duplicate.
Eigen::VectorXd embed_continuous(const DiscreteForm& broken, const DiscreteForm& continuous,
                                 const Eigen::VectorXd& f);
/// Multiplies the block of subdomain k by z_k.
Eigen::VectorXcd apply_unitary(const PhaseAssignment& ph, const DiscreteForm& broken, const Eigen::VectorXcd& f);

double form_value(const DiscreteForm& df, const Eigen::VectorXd& f);
double form_value(const DiscreteForm& df, const Eigen::VectorXcd& f);
double mass_norm2(const DiscreteForm& df, const Eigen::VectorXd& f);
double mass_norm2(const DiscreteForm& df, const Eigen::VectorXcd& f);
/// fᵀAf / fᵀMf; throws on a vector with zero mass norm.
double rayleigh(const DiscreteForm& df, const Eigen::VectorXd& f);
double rayleigh(const DiscreteForm& df, const Eigen::VectorXcd& f);

/// Form value of the indicator of subdomain k. Requires the neumann policy.
double indicator_form_value(const DiscreteForm& broken, int k);
Eigen::VectorXd indicator_vector(const DiscreteForm& broken, int k);

/// C^2 cutoff on [0, inf): 1 on [0,1], quintic smoothstep down to 0 on [1, 1.9].
/// Evaluated at |s|.
double cutoff(double s);
double cutoff_derivative(double s);
inline constexpr double cutoff_support = 1.9;

enum class TestFamily { deformation_fn, wedge_psi_np, transverse_exp };
TestFamily parse_test_family(const std::string& name);

struct TestFunctionParams {
  double n = 1.0;
  double p = 0.0;
  double alpha = 1.0;
  double beta = 1.0;
  /// Cutoff centre x1^(n) along the wedge ray.
  double center = 0.0;
  /// Ray Sigma_1 of the wedge: origin and polar angle; x2 > 0 is `inside_domain`.
  Vec2 ray_origin;
  double ray_angle = 0.0;
  int inside_domain = 1;
};

/// Nodal interpolant of the named family in the form's dof space.
///   deformation_fn  phi(x1/n) exp(-alpha|x2|/2)
///   transverse_exp  exp(-alpha|x2|/2)
///   wedge_psi_np    n^{-1/2} phi(|x1-c|/n) phi(|x2|/n) sign(x2) exp(-2|x2|/beta) exp(i p x1)
/// in coordinates attached to the ray. Throws when the cutoff support leaves the box
/// (or, for wedge_psi_np, meets another interface).
Eigen::VectorXcd sample_test_function(const DiscreteForm& df, TestFamily family, const TestFunctionParams& params);

/// Coordinate export "i j value", 1-based, sorted by row then column.
void write_matrix(std::ostream& os, const SparseMatrix& a);

}  // namespace deltaspec

#endif  // DELTASPEC_FORMS_HPP
