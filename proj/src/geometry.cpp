#include "deltaspec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

namespace deltaspec {

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

Vec2 ReflectionAxis::mirror(Vec2 p) const {
  const Vec2 foot = point + dot(p - point, direction) * direction;
  return 2.0 * foot - p;
}

double ReflectionAxis::side(Vec2 p) const { return cross(direction, p - point); }

double signed_area(const std::vector<Vec2>& v, const Loop& loop) {
  double a = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Vec2 p = v[loop[i]];
    const Vec2 q = v[loop[(i + 1) % loop.size()]];
    a += cross(p, q);
  }
  return 0.5 * a;
}

double polyline_length(const std::vector<Vec2>& v, const std::vector<int>& pl) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < pl.size(); ++i) len += norm(v[pl[i + 1]] - v[pl[i]]);
  return len;
}

namespace {

using Edge = std::pair<int, int>;

Edge undirected(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol) {
  // Proper crossing only; shared endpoints and touching are excluded.
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) &&
         ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol));
}

bool strictly_inside_segment(Vec2 p, Vec2 a, Vec2 b, double tol) {
  const Vec2 ab = b - a;
  const double len = norm(ab);
  if (len == 0.0) return false;
  if (std::abs(cross(ab, p - a)) / len > tol) return false;
  const double t = dot(p - a, ab) / (len * len);
  return t > tol / len && t < 1.0 - tol / len;
}

}  // namespace

Partition::Partition(double box_radius, std::vector<Vec2> vertices,
                     std::vector<Subdomain> subdomains,
                     std::vector<Interface> interfaces,
                     std::optional<ReflectionAxis> axis)
    : box_radius_(box_radius),
      vertices_(std::move(vertices)),
      subdomains_(std::move(subdomains)),
      interfaces_(std::move(interfaces)),
      axis_(axis) {
  for (auto& itf : interfaces_) itf.length = polyline_length(vertices_, itf.polyline);
  validate();
}

const Subdomain& Partition::subdomain(int id) const {
  for (const auto& s : subdomains_)
    if (s.id == id) return s;
  throw Error("unknown subdomain id " + std::to_string(id));
}

const Interface& Partition::interface(int id) const {
  for (const auto& i : interfaces_)
    if (i.id == id) return i;
  throw Error("unknown interface id " + std::to_string(id));
}

std::vector<int> Partition::subdomain_ids() const {
  std::vector<int> ids;
  for (const auto& s : subdomains_) ids.push_back(s.id);
  return ids;
}

std::vector<int> Partition::interface_ids() const {
  std::vector<int> ids;
  for (const auto& i : interfaces_) ids.push_back(i.id);
  return ids;
}

double Partition::subdomain_area(int id) const {
  double a = 0.0;
  for (const auto& piece : subdomain(id).pieces) a += signed_area(vertices_, piece);
  return a;
}

bool Partition::on_box_boundary(Vec2 p) const {
  const double tol = 1e-12 * box_radius_;
  return std::abs(std::abs(p.x) - box_radius_) <= tol ||
         std::abs(std::abs(p.y) - box_radius_) <= tol;
}

bool Partition::is_bounded(int id) const {
  for (const auto& piece : subdomain(id).pieces)
    for (int v : piece)
      if (on_box_boundary(vertices_[v])) return false;
  return true;
}

void Partition::validate() const {
  const double R = box_radius_;
  if (!(R > 0.0)) throw Error("box_radius must be positive");
  const double tol = 1e-12 * R;
  for (const auto& p : vertices_)
    if (std::abs(p.x) > R + tol || std::abs(p.y) > R + tol)
      throw Error("partition vertex outside the box");

  std::set<int> ids;
  double total = 0.0;
  // edge -> list of (subdomain id, piece index)
  std::map<Edge, std::vector<std::pair<int, int>>> owners;
  for (const auto& s : subdomains_) {
    if (!ids.insert(s.id).second) throw Error("duplicate subdomain id");
    if (s.pieces.empty()) throw Error("subdomain without pieces");
    for (std::size_t pi = 0; pi < s.pieces.size(); ++pi) {
      const auto& loop = s.pieces[pi];
      if (loop.size() < 3) throw Error("subdomain piece with fewer than 3 vertices");
      for (int v : loop)
        if (v < 0 || v >= static_cast<int>(vertices_.size()))
          throw Error("vertex index out of range");
      const double a = signed_area(vertices_, loop);
      if (!(a > 0.0))
        throw Error("subdomain " + std::to_string(s.id) +
                    " has a piece with non-positive (clockwise or degenerate) area");
      total += a;
      for (std::size_t i = 0; i < loop.size(); ++i)
        owners[undirected(loop[i], loop[(i + 1) % loop.size()])].push_back(
            {s.id, static_cast<int>(pi)});
    }
  }
  const double box_area = 4.0 * R * R;
  if (std::abs(total - box_area) > 1e-9 * box_area)
    throw Error("subdomain areas do not sum to the box area");

  std::vector<Edge> edges;
  for (const auto& [e, o] : owners) {
    edges.push_back(e);
    if (o.size() > 2) throw Error("boundary edge shared by more than two pieces");
    if (o.size() == 1) {
      const Vec2 a = vertices_[e.first], b = vertices_[e.second];
      const Vec2 mid = 0.5 * (a + b);
      if (!(on_box_boundary(a) && on_box_boundary(b) && on_box_boundary(mid)))
        throw Error("piece edge neither shared nor on the box boundary");
    }
  }
  for (std::size_t i = 0; i < edges.size(); ++i)
    for (std::size_t j = i + 1; j < edges.size(); ++j) {
      const auto [a, b] = edges[i];
      const auto [c, d] = edges[j];
      if (segments_cross(vertices_[a], vertices_[b], vertices_[c], vertices_[d], tol * R))
        throw Error("crossing boundary segments");
    }
  std::set<int> used;
  for (const auto& e : edges) used.insert({e.first, e.second});
  for (int v : used)
    for (const auto& e : edges) {
      if (e.first == v || e.second == v) continue;
      if (strictly_inside_segment(vertices_[v], vertices_[e.first], vertices_[e.second], tol))
        throw Error("T-junction: vertex lies inside a boundary edge");
    }

  std::set<int> itf_ids;
  std::set<Edge> interface_edges;
  for (const auto& itf : interfaces_) {
    if (!itf_ids.insert(itf.id).second) throw Error("duplicate interface id");
    if (!ids.count(itf.k) || !ids.count(itf.l) || itf.k == itf.l)
      throw Error("interface " + std::to_string(itf.id) + " references invalid subdomains");
    if (itf.polyline.size() < 2 || !(itf.length > 0.0))
      throw Error("interface " + std::to_string(itf.id) + " has zero length");
    for (std::size_t i = 0; i + 1 < itf.polyline.size(); ++i) {
      const Edge e = undirected(itf.polyline[i], itf.polyline[i + 1]);
      auto it = owners.find(e);
      if (it == owners.end() || it->second.size() != 2)
        throw Error("interface edge not shared by two pieces");
      std::set<int> sides{it->second[0].first, it->second[1].first};
      if (sides != std::set<int>{itf.k, itf.l})
        throw Error("interface " + std::to_string(itf.id) +
                    " is not shared verbatim by its subdomains");
      if (!interface_edges.insert(e).second) throw Error("edge listed in two interfaces");
    }
  }
  for (const auto& [e, o] : owners)
    if (o.size() == 2 && o[0].first != o[1].first && !interface_edges.count(e))
      throw Error("edge between distinct subdomains not covered by an interface");
}

// ---------------------------------------------------------------------------

InteractionData InteractionData::uniform(const Partition& p, double alpha, double beta) {
  if (!(beta > 0.0)) throw Error("beta must be strictly positive");
  InteractionData d;
  for (int id : p.interface_ids()) {
    d.alpha[id] = alpha;
    d.beta[id] = beta;
  }
  return d;
}

void InteractionData::validate(const Partition& p) const {
  const auto ids = p.interface_ids();
  auto covers = [&](const std::map<int, double>& m) {
    if (m.size() != ids.size()) return false;
    return std::all_of(ids.begin(), ids.end(), [&](int id) { return m.count(id) > 0; });
  };
  if (!covers(alpha) || !covers(beta))
    throw Error("interaction maps must cover exactly the partition's interface ids");
  for (const auto& [id, b] : beta)
    if (!(b > 0.0)) throw Error("beta must be strictly positive");
}

double InteractionData::alpha_of(int id) const {
  auto it = alpha.find(id);
  if (it == alpha.end()) throw Error("interface id " + std::to_string(id) + " missing from alpha");
  return it->second;
}

double InteractionData::beta_of(int id) const {
  auto it = beta.find(id);
  if (it == beta.end()) throw Error("interface id " + std::to_string(id) + " missing from beta");
  if (!(it->second > 0.0)) throw Error("beta must be strictly positive");
  return it->second;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<int>> Graph::adjacency_lists() const {
  std::vector<std::vector<int>> adj(vertices.size());
  auto pos = [&](int v) {
    return static_cast<int>(std::find(vertices.begin(), vertices.end(), v) - vertices.begin());
  };
  for (const auto& [a, b] : edges) {
    const int i = pos(a), j = pos(b);
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  for (auto& l : adj) std::sort(l.begin(), l.end());
  return adj;
}

bool Graph::has_edge(int a, int b) const {
  const auto e = undirected(a, b);
  return std::find(edges.begin(), edges.end(), e) != edges.end();
}

Graph adjacency_graph(const Partition& p) {
  Graph g;
  g.vertices = p.subdomain_ids();
  std::sort(g.vertices.begin(), g.vertices.end());
  std::set<Edge> e;
  for (const auto& itf : p.interfaces())
    if (itf.length > 0.0) e.insert(undirected(itf.k, itf.l));
  g.edges.assign(e.begin(), e.end());
  return g;
}

namespace {

class Backtracker {
public:
  Backtracker(const std::vector<std::vector<int>>& adj, int colours)
      : adj_(adj), colours_(colours), colour_(adj.size(), -1) {}

  bool run() { return assign(0); }
  const std::vector<int>& colours() const { return colour_; }

private:
  bool assign(std::size_t v) {
    if (v == adj_.size()) return true;
    for (int c = 0; c < colours_; ++c) {
      bool ok = true;
      for (int u : adj_[v])
        if (colour_[u] == c) {
          ok = false;
          break;
        }
      if (!ok) continue;
      colour_[v] = c;
      if (assign(v + 1)) return true;
    }
    colour_[v] = -1;
    return false;
  }

  const std::vector<std::vector<int>>& adj_;
  int colours_;
  std::vector<int> colour_;
};

int greedy_clique_size(const std::vector<std::vector<int>>& adj) {
  int best = adj.empty() ? 0 : 1;
  for (std::size_t s = 0; s < adj.size(); ++s) {
    std::vector<int> clique{static_cast<int>(s)};
    for (std::size_t v = 0; v < adj.size(); ++v) {
      if (v == s) continue;
      bool all = std::all_of(clique.begin(), clique.end(), [&](int u) {
        return std::binary_search(adj[v].begin(), adj[v].end(), u);
      });
      if (all) clique.push_back(static_cast<int>(v));
    }
    best = std::max(best, static_cast<int>(clique.size()));
  }
  return best;
}

int greedy_colour_count(const std::vector<std::vector<int>>& adj) {
  std::vector<int> colour(adj.size(), -1);
  int used = 0;
  for (std::size_t v = 0; v < adj.size(); ++v) {
    int c = 0;
    while (std::any_of(adj[v].begin(), adj[v].end(), [&](int u) { return colour[u] == c; })) ++c;
    colour[v] = c;
    used = std::max(used, c + 1);
  }
  return used;
}

}  // namespace

Colouring chromatic_colouring(const Graph& g, const ColouringOptions& opts) {
  const int n = static_cast<int>(g.vertices.size());
  if (n > opts.max_vertices)
    throw Error("graph has " + std::to_string(n) + " vertices; exact colouring limit is " +
                std::to_string(opts.max_vertices));
  Colouring result;
  if (n == 0) return result;
  const auto adj = g.adjacency_lists();
  const int lower = greedy_clique_size(adj);
  const int upper = greedy_colour_count(adj);
  for (int c = lower; c <= upper; ++c) {
    Backtracker bt(adj, c);
    if (bt.run()) {
      result.chi = c;
      for (int i = 0; i < n; ++i) result.phi[g.vertices[i]] = bt.colours()[i];
      return result;
    }
  }
  throw Error("colouring search failed");  // unreachable: greedy bound is feasible
}

bool is_proper(const Graph& g, const Colouring& c) {
  for (const auto& [a, b] : g.edges) {
    auto ia = c.phi.find(a), ib = c.phi.find(b);
    if (ia == c.phi.end() || ib == c.phi.end() || ia->second == ib->second) return false;
  }
  for (const auto& [v, col] : c.phi)
    if (col < 0 || col >= c.chi) return false;
  return true;
}

double edge_constant(int chi) {
  if (chi < 2) throw Error("edge_constant requires chi >= 2");
  const double s = std::sin(std::numbers::pi / chi);
  return 4.0 * s * s;
}

namespace {

// exp(2 pi i colour / chi), exact on quarter turns.
std::complex<double> unit_phase(int colour, int chi) {
  if ((4 * colour) % chi == 0) {
    switch ((4 * colour / chi) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  const double angle = 2.0 * std::numbers::pi * colour / chi;
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace

PhaseAssignment phase_assignment(const Partition& p, const Colouring& c,
                                 const InteractionData& d) {
  PhaseAssignment ph;
  for (int id : p.subdomain_ids()) {
    auto it = c.phi.find(id);
    if (it == c.phi.end()) throw Error("colouring does not cover subdomain " + std::to_string(id));
    ph.z[id] = unit_phase(it->second, c.chi);
  }
  for (const auto& itf : p.interfaces()) {
    const double beta = d.beta_of(itf.id);
    const double gap = std::norm(ph.z.at(itf.k) - ph.z.at(itf.l));
    if (gap < edge_constant(c.chi) - 1e-12)
      throw Error("colouring is not proper on interface " + std::to_string(itf.id));
    ph.alpha_z[itf.id] = gap / beta;
  }
  return ph;
}

}  // namespace deltaspec
