#ifndef DELTASPEC_GEOMETRY_HPP
#define DELTASPEC_GEOMETRY_HPP

#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace deltaspec {

/// Exception type used throughout the library for contract violations.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a);

/// Line used for mirror symmetry: passes through `point`, unit `direction`.
struct ReflectionAxis {
  Vec2 point;
  Vec2 direction;

  Vec2 mirror(Vec2 p) const;
  /// Signed distance of p from the axis (positive on the left of `direction`).
  double side(Vec2 p) const;
};

using Loop = std::vector<int>;

/// A subdomain is the union of one or more simple counter-clockwise pieces.
/// Pieces of the same subdomain may share edges (internal chords).
struct Subdomain {
  int id = 0;
  std::vector<Loop> pieces;
};

/// Shared boundary Σ_kl between subdomains k and l, given as a vertex polyline.
/// A closed polyline repeats its first vertex at the end.
struct Interface {
  int id = 0;
  int k = 0;
  int l = 0;
  std::vector<int> polyline;
  double length = 0.0;
};

/// Polygonal partition of the box [-R, R]^2.
///
/// The constructor validates: positive piece areas summing to the box area,
/// no crossing segments, no T-junctions, every interface edge present in the
/// boundary loops of both adjacent subdomains, every internal boundary edge
/// covered by an interface, positive interface lengths.
class Partition {
public:
  Partition(double box_radius, std::vector<Vec2> vertices,
            std::vector<Subdomain> subdomains,
            std::vector<Interface> interfaces,
            std::optional<ReflectionAxis> axis = std::nullopt);

  double box_radius() const { return box_radius_; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Subdomain>& subdomains() const { return subdomains_; }
  const std::vector<Interface>& interfaces() const { return interfaces_; }
  const std::optional<ReflectionAxis>& axis() const { return axis_; }

  const Subdomain& subdomain(int id) const;
  const Interface& interface(int id) const;
  std::vector<int> subdomain_ids() const;
  std::vector<int> interface_ids() const;

  double subdomain_area(int id) const;
  /// True if the subdomain does not touch the box boundary.
  bool is_bounded(int id) const;
  /// Edges (vertex pairs) of the subdomain boundary that lie on the box boundary.
  bool on_box_boundary(Vec2 p) const;

private:
  void validate() const;

  double box_radius_;
  std::vector<Vec2> vertices_;
  std::vector<Subdomain> subdomains_;
  std::vector<Interface> interfaces_;
  std::optional<ReflectionAxis> axis_;
};

double signed_area(const std::vector<Vec2>& vertices, const Loop& loop);
double polyline_length(const std::vector<Vec2>& vertices,
                       const std::vector<int>& polyline);

/// Per-interface constant interaction strengths.
struct InteractionData {
  std::map<int, double> alpha;
  std::map<int, double> beta;

  /// Broadcasts scalars to every interface; throws if beta <= 0.
  static InteractionData uniform(const Partition& p, double alpha, double beta);
  /// Checks beta > 0 and that both maps cover exactly the interface ids.
  void validate(const Partition& p) const;

  double alpha_of(int interface_id) const;
  double beta_of(int interface_id) const;
};

enum class CanonicalGeometry {
  half_plane,
  wedge,
  star3,
  line_with_bump,
  grid,
  wheel,
  inclusion,
};

CanonicalGeometry parse_geometry_name(const std::string& name);
std::string to_string(CanonicalGeometry g);

struct GeometryParams {
  double box_radius = 1.0;
  /// Wedge opening angle in (0, pi].
  double angle = 0.0;
  /// Bump polygon (counter-clockwise, x-monotone) strictly inside the upper half box.
  std::vector<Vec2> bump;
  int nx = 2;
  int ny = 2;
  /// Wheel spokes / inclusion polygon side count.
  int sides = 3;
  /// Wheel hub or inclusion circumradius.
  double radius = 1.0;
};

Partition build_canonical_partition(CanonicalGeometry name,
                                    const GeometryParams& params);

/// Square bump of the given side centred at `center`, as a CCW polygon.
std::vector<Vec2> square_bump(Vec2 center, double side);

/// Undirected simple graph on subdomain ids.
struct Graph {
  std::vector<int> vertices;
  std::vector<std::pair<int, int>> edges;  // (a, b) with a < b

  std::vector<std::vector<int>> adjacency_lists() const;  // by vertex position
  bool has_edge(int a, int b) const;
};

Graph adjacency_graph(const Partition& p);

struct Colouring {
  int chi = 0;
  std::map<int, int> phi;  // subdomain id -> colour in [0, chi)
};

struct ColouringOptions {
  int max_vertices = 24;
};

/// Exact minimum colouring by backtracking; ties broken towards the
/// lexicographically smallest colour vector in vertex order.
Colouring chromatic_colouring(const Graph& g, const ColouringOptions& opts = {});
bool is_proper(const Graph& g, const Colouring& c);

/// 4 sin^2(pi / chi), the squared side of the regular chi-gon on the unit circle.
double edge_constant(int chi);

struct PhaseAssignment {
  std::map<int, std::complex<double>> z;  // subdomain id -> unit phase
  std::map<int, double> alpha_z;          // interface id -> |z_k - z_l|^2 / beta_kl
};

PhaseAssignment phase_assignment(const Partition& p, const Colouring& c,
                                 const InteractionData& d);

}  // namespace deltaspec

#endif  // DELTASPEC_GEOMETRY_HPP
