#include "deltaspec/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

namespace deltaspec {

double Mesh::triangle_area(std::size_t t) const {
  const auto& v = triangles[t].v;
  return 0.5 * cross(nodes[v[1]] - nodes[v[0]], nodes[v[2]] - nodes[v[0]]);
}

std::vector<std::vector<int>> Mesh::node_domains() const {
  std::vector<std::vector<int>> out(nodes.size());
  for (const auto& t : triangles)
    for (int v : t.v) out[v].push_back(t.domain);
  for (auto& d : out) {
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
  }
  return out;
}

namespace {

using Tri = std::array<int, 3>;
using Edge = std::pair<int, int>;

Edge undirected(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

double min_angle(Vec2 a, Vec2 b, Vec2 c) {
  auto angle = [](Vec2 p, Vec2 q, Vec2 r) {
    const Vec2 u = q - p, w = r - p;
    return std::atan2(std::abs(cross(u, w)), dot(u, w));
  };
  return std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
}

// Closed-triangle containment with a relative tolerance.
bool in_triangle(Vec2 p, Vec2 a, Vec2 b, Vec2 c, double eps) {
  return orient(a, b, p) >= -eps && orient(b, c, p) >= -eps && orient(c, a, p) >= -eps;
}

bool incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double det = (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) -
                     (bdx * bdx + bdy * bdy) * (adx * cdy - cdx * ady) +
                     (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
  const double scale = (adx * adx + ady * ady) * (bdx * bdx + bdy * bdy + cdx * cdx + cdy * cdy) + 1e-300;
  return det > 1e-12 * scale;
}

// Lawson flips towards the constrained Delaunay triangulation of one piece.
void delaunay_flips(std::vector<Tri>& tris, const std::vector<Vec2>& pts) {
  const std::size_t limit = 50 * tris.size() * tris.size() + 10;
  for (std::size_t iter = 0; iter < limit; ++iter) {
    std::map<Edge, std::vector<std::pair<int, int>>> owner;  // edge -> (triangle, opposite slot)
    for (int t = 0; t < static_cast<int>(tris.size()); ++t)
      for (int s = 0; s < 3; ++s) owner[undirected(tris[t][(s + 1) % 3], tris[t][(s + 2) % 3])].push_back({t, s});
    bool flipped = false;
    for (const auto& [e, o] : owner) {
      if (o.size() != 2) continue;
      const auto [t1, s1] = o[0];
      const auto [t2, s2] = o[1];
      const int a = tris[t1][(s1 + 1) % 3], b = tris[t1][(s1 + 2) % 3];
      const int c = tris[t1][s1], d = tris[t2][s2];
      if (!incircle(pts[a], pts[b], pts[c], pts[d])) continue;
      // New diagonal c-d must separate a and b strictly.
      if (!(orient(pts[c], pts[d], pts[a]) * orient(pts[c], pts[d], pts[b]) < 0.0)) continue;
      Tri n1{c, a, d}, n2{d, b, c};
      if (orient(pts[n1[0]], pts[n1[1]], pts[n1[2]]) <= 0.0 || orient(pts[n2[0]], pts[n2[1]], pts[n2[2]]) <= 0.0)
        continue;
      tris[t1] = n1;
      tris[t2] = n2;
      flipped = true;
      break;
    }
    if (!flipped) return;
  }
}

std::vector<Tri> triangulate_loop(const std::vector<Vec2>& pts, const Loop& loop) {
  auto tris = ear_clip(pts, loop);
  delaunay_flips(tris, pts);
  return tris;
}

// Triangles for every piece, mirror-symmetric when the axis allows it.
std::vector<Triangle> coarse_triangles(const Partition& p, bool& symmetric) {
  const auto& pts = p.vertices();
  std::vector<Triangle> out;
  std::vector<int> vm;
  symmetric = false;
  if (p.axis()) {
    const double tol = 1e-12 * p.box_radius();
    symmetric = true;
    for (const auto& v : pts) {
      const Vec2 w = p.axis()->mirror(v);
      int found = -1;
      for (std::size_t j = 0; j < pts.size(); ++j)
        if (norm(pts[j] - w) <= tol) found = static_cast<int>(j);
      if (found < 0) {
        symmetric = false;
        break;
      }
      vm.push_back(found);
    }
  }
  struct PieceRef {
    int domain;
    const Loop* loop;
  };
  std::vector<PieceRef> pieces;
  for (const auto& s : p.subdomains())
    for (const auto& loop : s.pieces) pieces.push_back({s.id, &loop});

  if (!symmetric) {
    for (const auto& pc : pieces)
      for (const auto& t : triangulate_loop(pts, *pc.loop)) out.push_back({t, pc.domain});
    return out;
  }

  auto key = [](const Loop& l) {
    std::set<int> s(l.begin(), l.end());
    return s;
  };
  std::vector<char> done(pieces.size(), 0);
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (done[i]) continue;
    const Loop& loop = *pieces[i].loop;
    Loop mirrored;
    for (int v : loop) mirrored.push_back(vm[v]);
    const auto mk = key(mirrored);
    auto mirror_tri = [&](const Tri& t) { return Tri{vm[t[0]], vm[t[2]], vm[t[1]]}; };
    if (mk == key(loop)) {
      std::vector<int> on_axis;
      for (std::size_t j = 0; j < loop.size(); ++j)
        if (vm[loop[j]] == loop[j]) on_axis.push_back(static_cast<int>(j));
      if (on_axis.size() != 2)
        throw Error("symmetric piece must have exactly two vertices on the reflection axis");
      const int n = static_cast<int>(loop.size());
      auto chain = [&](int from, int to) {
        Loop c{loop[from]};
        for (int j = from; j != to;) {
          j = (j + 1) % n;
          c.push_back(loop[j]);
        }
        return c;
      };
      Loop half = chain(on_axis[0], on_axis[1]);
      if (half.size() < 3) half = chain(on_axis[1], on_axis[0]);
      if (half.size() < 3) throw Error("degenerate symmetric piece");
      for (const auto& t : triangulate_loop(pts, half)) {
        out.push_back({t, pieces[i].domain});
        out.push_back({mirror_tri(t), pieces[i].domain});
      }
      done[i] = 1;
      continue;
    }
    std::size_t partner = pieces.size();
    for (std::size_t j = i + 1; j < pieces.size(); ++j)
      if (!done[j] && key(*pieces[j].loop) == mk) partner = j;
    if (partner == pieces.size()) throw Error("piece has no mirror image");
    for (const auto& t : triangulate_loop(pts, loop)) {
      out.push_back({t, pieces[i].domain});
      out.push_back({mirror_tri(t), pieces[partner].domain});
    }
    done[i] = done[partner] = 1;
  }
  return out;
}

}  // namespace

std::vector<std::array<int, 3>> ear_clip(const std::vector<Vec2>& pts, const Loop& input) {
  Loop loop = input;
  std::vector<Tri> out;
  double scale = 0.0;
  for (int v : loop) scale = std::max({scale, std::abs(pts[v].x), std::abs(pts[v].y)});
  const double eps = 1e-14 * scale * scale;
  while (loop.size() > 3) {
    const int n = static_cast<int>(loop.size());
    int best = -1;
    double best_quality = -1.0;
    for (int i = 0; i < n; ++i) {
      const int a = loop[(i + n - 1) % n], b = loop[i], c = loop[(i + 1) % n];
      if (orient(pts[a], pts[b], pts[c]) <= eps) continue;
      bool empty = true;
      for (int j = 0; j < n && empty; ++j) {
        const int v = loop[j];
        if (v == a || v == b || v == c) continue;
        const Vec2 q = pts[v];
        if (norm(q - pts[a]) == 0.0 || norm(q - pts[b]) == 0.0 || norm(q - pts[c]) == 0.0) continue;
        if (in_triangle(q, pts[a], pts[b], pts[c], eps)) empty = false;
      }
      if (!empty) continue;
      const double quality = min_angle(pts[a], pts[b], pts[c]);
      if (quality > best_quality) {
        best_quality = quality;
        best = i;
      }
    }
    if (best < 0) throw Error("ear clipping failed (polygon not simple?)");
    out.push_back({loop[(best + n - 1) % n], loop[best], loop[(best + 1) % n]});
    loop.erase(loop.begin() + best);
  }
  if (orient(pts[loop[0]], pts[loop[1]], pts[loop[2]]) <= eps) throw Error("degenerate polygon");
  out.push_back({loop[0], loop[1], loop[2]});
  return out;
}

Mesh triangulate(const Partition& p, int levels) {
  if (levels < 0) throw Error("refinement levels must be non-negative");
  Mesh m;
  m.box_radius = p.box_radius();
  m.nodes = p.vertices();
  bool symmetric = false;
  m.triangles = coarse_triangles(p, symmetric);
  if (symmetric) m.axis = p.axis();
  for (const auto& itf : p.interfaces())
    for (std::size_t i = 0; i + 1 < itf.polyline.size(); ++i)
      m.interface_edges.push_back({itf.id, itf.polyline[i], itf.polyline[i + 1], itf.k, itf.l, {}, 0.0});

  for (int level = 0; level < levels; ++level) {
    std::map<Edge, int> mid;
    auto midpoint = [&](int a, int b) {
      const Edge e = undirected(a, b);
      auto it = mid.find(e);
      if (it != mid.end()) return it->second;
      m.nodes.push_back(0.5 * (m.nodes[a] + m.nodes[b]));
      const int id = static_cast<int>(m.nodes.size()) - 1;
      mid.emplace(e, id);
      return id;
    };
    std::vector<Triangle> fine;
    fine.reserve(4 * m.triangles.size());
    for (const auto& t : m.triangles) {
      const int a = t.v[0], b = t.v[1], c = t.v[2];
      const int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
      fine.push_back({{a, ab, ca}, t.domain});
      fine.push_back({{ab, b, bc}, t.domain});
      fine.push_back({{ca, bc, c}, t.domain});
      fine.push_back({{ab, bc, ca}, t.domain});
    }
    m.triangles = std::move(fine);
    std::vector<InterfaceEdge> edges;
    edges.reserve(2 * m.interface_edges.size());
    for (const auto& e : m.interface_edges) {
      const int c = mid.at(undirected(e.a, e.b));
      edges.push_back({e.interface_id, e.a, c, e.k, e.l, {}, 0.0});
      edges.push_back({e.interface_id, c, e.b, e.k, e.l, {}, 0.0});
    }
    m.interface_edges = std::move(edges);
  }
  m.refinement_level = levels;

  // Normals point out of subdomain k.
  std::map<Edge, std::vector<std::pair<int, int>>> edge_tris;  // edge -> (domain, opposite node)
  for (const auto& t : m.triangles)
    for (int s = 0; s < 3; ++s)
      edge_tris[undirected(t.v[(s + 1) % 3], t.v[(s + 2) % 3])].push_back({t.domain, t.v[s]});
  for (auto& e : m.interface_edges) {
    const Vec2 d = m.nodes[e.b] - m.nodes[e.a];
    e.length = norm(d);
    Vec2 n{d.y / e.length, -d.x / e.length};
    int opposite = -1;
    for (const auto& [dom, c] : edge_tris[undirected(e.a, e.b)])
      if (dom == e.k) opposite = c;
    if (opposite < 0) throw Error("interface edge without a triangle on side k");
    if (dot(n, m.nodes[opposite] - m.nodes[e.a]) > 0.0) n = -1.0 * n;
    e.normal = n;
  }
  m.is_outer.assign(m.nodes.size(), 0);
  for (std::size_t i = 0; i < m.nodes.size(); ++i)
    if (p.on_box_boundary(m.nodes[i])) {
      m.is_outer[i] = 1;
      m.outer_boundary_nodes.push_back(static_cast<int>(i));
    }
  validate_mesh(m, p);
  return m;
}

void validate_mesh(const Mesh& m, const Partition& p) {
  std::map<int, double> area;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const double a = m.triangle_area(t);
    if (!(a > 0.0)) throw Error("triangle with non-positive area");
    area[m.triangles[t].domain] += a;
  }
  for (int id : p.subdomain_ids()) {
    const double expected = p.subdomain_area(id);
    if (std::abs(area[id] - expected) > 1e-10 * expected)
      throw Error("triangles do not tile subdomain " + std::to_string(id));
  }
  std::map<Edge, std::vector<int>> edge_domains;
  for (const auto& t : m.triangles)
    for (int s = 0; s < 3; ++s) edge_domains[undirected(t.v[s], t.v[(s + 1) % 3])].push_back(t.domain);
  for (const auto& [e, doms] : edge_domains) {
    if (doms.size() > 2) throw Error("non-manifold mesh edge");
    if (doms.size() == 1 && !(m.is_outer[e.first] && m.is_outer[e.second]))
      throw Error("hanging mesh edge inside the box");
  }
  std::map<int, double> length;
  for (const auto& e : m.interface_edges) {
    auto it = edge_domains.find(undirected(e.a, e.b));
    if (it == edge_domains.end() || it->second.size() != 2)
      throw Error("interface edge is not shared by two triangles");
    std::vector<int> doms = it->second;
    std::sort(doms.begin(), doms.end());
    if (doms != std::vector<int>{std::min(e.k, e.l), std::max(e.k, e.l)})
      throw Error("interface edge sides do not match its subdomains");
    length[e.interface_id] += e.length;
  }
  for (const auto& itf : p.interfaces())
    if (std::abs(length[itf.id] - itf.length) > 1e-12 * itf.length)
      throw Error("interface edge lengths do not sum to interface " + std::to_string(itf.id));
}

std::vector<int> mirror_map(const Mesh& m, const ReflectionAxis& axis) {
  const double tol = 1e-12 * m.box_radius;
  std::vector<int> order(m.nodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return m.nodes[a].x < m.nodes[b].x || (m.nodes[a].x == m.nodes[b].x && m.nodes[a].y < m.nodes[b].y);
  });
  std::vector<int> map(m.nodes.size(), -1);
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    const Vec2 w = axis.mirror(m.nodes[i]);
    auto lo = std::lower_bound(order.begin(), order.end(), w.x - tol,
                               [&](int a, double x) { return m.nodes[a].x < x; });
    for (auto it = lo; it != order.end() && m.nodes[*it].x <= w.x + tol; ++it)
      if (std::abs(m.nodes[*it].y - w.y) <= tol) {
        map[i] = *it;
        break;
      }
    if (map[i] < 0) throw Error("mesh is not reflection-symmetric about the axis");
  }
  return map;
}

EvenOddParts reflect_split(const Mesh& m, const ReflectionAxis& axis, const Eigen::VectorXd& f) {
  if (f.size() != static_cast<Eigen::Index>(m.nodes.size()))
    throw Error("nodal vector size does not match the mesh");
  const auto map = mirror_map(m, axis);
  EvenOddParts parts{Eigen::VectorXd(f.size()), Eigen::VectorXd(f.size())};
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    parts.even[i] = 0.5 * (f[i] + f[map[i]]);
    parts.odd[i] = f[i] - parts.even[i];
  }
  return parts;
}

std::vector<int> axis_nodes(const Mesh& m, const ReflectionAxis& axis) {
  const auto map = mirror_map(m, axis);
  std::vector<int> out;
  for (std::size_t i = 0; i < map.size(); ++i)
    if (map[i] == static_cast<int>(i)) out.push_back(static_cast<int>(i));
  return out;
}

void write_mesh(std::ostream& os, const Mesh& m) {
  os.precision(17);
  for (const auto& p : m.nodes) os << "v " << p.x << ' ' << p.y << '\n';
  for (const auto& t : m.triangles)
    os << "t " << t.v[0] + 1 << ' ' << t.v[1] + 1 << ' ' << t.v[2] + 1 << ' ' << t.domain << '\n';
  for (const auto& e : m.interface_edges)
    os << "e " << e.a + 1 << ' ' << e.b + 1 << ' ' << e.interface_id << ' ' << e.k << ' ' << e.l << '\n';
}

}  // namespace deltaspec
