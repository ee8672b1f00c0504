#ifndef DELTASPEC_MESH_HPP
#define DELTASPEC_MESH_HPP

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "deltaspec/geometry.hpp"

namespace deltaspec {

struct Triangle {
  std::array<int, 3> v;
  int domain = 0;
};

/// Mesh edge lying on interface Σ_kl. `normal` is the unit normal pointing
/// out of subdomain k into subdomain l.
struct InterfaceEdge {
  int interface_id = 0;
  int a = 0;
  int b = 0;
  int k = 0;
  int l = 0;
  Vec2 normal;
  double length = 0.0;
};

/// Conforming triangulation of a partition. Every interface lies on mesh
/// edges and geometric nodes are shared across interfaces; splitting into
/// per-subdomain degrees of freedom happens in the forms module.
struct Mesh {
  double box_radius = 0.0;
  std::vector<Vec2> nodes;
  std::vector<Triangle> triangles;
  std::vector<InterfaceEdge> interface_edges;
  std::vector<int> outer_boundary_nodes;  // sorted
  std::vector<char> is_outer;             // per node
  int refinement_level = 0;
  std::optional<ReflectionAxis> axis;

  std::size_t node_count() const { return nodes.size(); }
  double triangle_area(std::size_t t) const;
  /// Sorted subdomain ids touching each node.
  std::vector<std::vector<int>> node_domains() const;
};

/// Ear-clips each subdomain piece (with Lawson flips for quality), then
/// applies `levels` rounds of uniform 4-way refinement. Partitions carrying a
/// reflection axis are triangulated mirror-symmetrically.
Mesh triangulate(const Partition& p, int levels);

/// Ear clipping of one simple CCW polygon; returns index triples into `loop`'s
/// vertex ids. Throws on degenerate or non-simple input.
std::vector<std::array<int, 3>> ear_clip(const std::vector<Vec2>& points, const Loop& loop);

/// Checks positive orientation, tiling of each subdomain, interface
/// conformity and interface lengths against the partition. Throws on failure.
void validate_mesh(const Mesh& m, const Partition& p);

/// Node permutation induced by reflection across `axis`; throws if the mesh is
/// not symmetric within 1e-12 R.
std::vector<int> mirror_map(const Mesh& m, const ReflectionAxis& axis);

struct EvenOddParts {
  Eigen::VectorXd even;
  Eigen::VectorXd odd;
};

/// even(x) = (f(x) + f(x̂))/2 and odd = f - even, with x̂ the mirror node.
EvenOddParts reflect_split(const Mesh& m, const ReflectionAxis& axis, const Eigen::VectorXd& f);

/// Nodes lying on the axis (mirror image equals the node itself).
std::vector<int> axis_nodes(const Mesh& m, const ReflectionAxis& axis);

/// Plain-text export: "v x y", "t i j k domain", "e i j interface k l" with
/// 1-based node indices.
void write_mesh(std::ostream& os, const Mesh& m);

}  // namespace deltaspec

#endif  // DELTASPEC_MESH_HPP
