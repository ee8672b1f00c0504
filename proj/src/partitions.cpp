// Canonical partitions of the box [-R, R]^2.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "deltaspec/geometry.hpp"

namespace deltaspec {

namespace {

constexpr double pi = std::numbers::pi;

class Builder {
public:
  explicit Builder(double R) : R_(R), tol_(1e-12 * R) {}

  int vertex(Vec2 p) {
    p = snap(p);
    for (std::size_t i = 0; i < vertices_.size(); ++i)
      if (norm(vertices_[i] - p) <= tol_) return static_cast<int>(i);
    vertices_.push_back(p);
    return static_cast<int>(vertices_.size()) - 1;
  }

  std::vector<int> vertices(const std::vector<Vec2>& pts) {
    std::vector<int> out;
    for (const auto& p : pts) out.push_back(vertex(p));
    return out;
  }

  /// Point where the ray from the origin at angle theta leaves the box.
  Vec2 ray_exit(double theta) const {
    const double c = std::cos(theta), s = std::sin(theta);
    const double t = R_ / std::max(std::abs(c), std::abs(s));
    return snap({t * c, t * s});
  }

  /// Box corners and `extras` strictly between `from` and `to`, walking the
  /// box boundary counter-clockwise.
  std::vector<Vec2> box_arc(Vec2 from, Vec2 to, std::vector<Vec2> extras = {}) const {
    const double P = 8.0 * R_;
    const double sf = perimeter(from);
    double st = perimeter(to);
    if (st <= sf + tol_) st += P;
    extras.push_back({R_, R_});
    extras.push_back({-R_, R_});
    extras.push_back({-R_, -R_});
    extras.push_back({R_, -R_});
    std::vector<std::pair<double, Vec2>> hits;
    for (const auto& c : extras) {
      double s = perimeter(c);
      if (s <= sf + tol_) s += P;
      if (s > sf + tol_ && s < st - tol_) hits.push_back({s, c});
    }
    std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Vec2> out;
    for (const auto& h : hits) out.push_back(h.second);
    return out;
  }

  Vec2 point(int id) const { return vertices_[id]; }
  std::vector<Vec2> take_vertices() { return std::move(vertices_); }
  const std::vector<Vec2>& current() const { return vertices_; }

private:
  Vec2 snap(Vec2 p) const {
    auto s = [&](double v) {
      if (std::abs(v - R_) <= tol_) return R_;
      if (std::abs(v + R_) <= tol_) return -R_;
      if (std::abs(v) <= tol_) return 0.0;
      return v;
    };
    return {s(p.x), s(p.y)};
  }

  // Counter-clockwise arclength along the box boundary starting at (R, 0).
  double perimeter(Vec2 p) const {
    const double R = R_;
    if (std::abs(p.x - R) <= tol_ && p.y >= -tol_) return p.y;
    if (std::abs(p.y - R) <= tol_) return R + (R - p.x);
    if (std::abs(p.x + R) <= tol_) return 3 * R + (R - p.y);
    if (std::abs(p.y + R) <= tol_) return 5 * R + (p.x + R);
    if (std::abs(p.x - R) <= tol_) return 7 * R + (p.y + R);
    throw Error("point is not on the box boundary");
  }

  double R_;
  double tol_;
  std::vector<Vec2> vertices_;
};

Loop concat(std::initializer_list<std::vector<int>> parts) {
  Loop out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

Partition half_plane(double R) {
  Builder b(R);
  const int A = b.vertex({-R, 0}), B = b.vertex({R, 0});
  const int C = b.vertex({R, R}), D = b.vertex({-R, R});
  const int E = b.vertex({-R, -R}), F = b.vertex({R, -R});
  std::vector<Subdomain> sd{{1, {{A, B, C, D}}}, {2, {{E, F, B, A}}}};
  std::vector<Interface> itf{{1, 1, 2, {A, B}, 0.0}};
  return Partition(R, b.take_vertices(), std::move(sd), std::move(itf));
}

Partition wedge(double R, double angle) {
  if (!(angle > 0.0 && angle <= pi)) throw Error("wedge angle must lie in (0, pi]");
  Builder b(R);
  const Vec2 e1 = b.ray_exit(pi / 2 - angle / 2);
  const Vec2 e2 = b.ray_exit(pi / 2 + angle / 2);
  const int O = b.vertex({0, 0}), E1 = b.vertex(e1), E2 = b.vertex(e2);
  const Loop inside = concat({{O, E1}, b.vertices(b.box_arc(e1, e2, {{0, R}})), {E2}});
  const Loop outside = concat({{O, E2}, b.vertices(b.box_arc(e2, e1, {{0, -R}})), {E1}});
  std::vector<Subdomain> sd{{1, {inside}}, {2, {outside}}};
  std::vector<Interface> itf{{1, 1, 2, {E1, O, E2}, 0.0}};
  return Partition(R, b.take_vertices(), std::move(sd), std::move(itf),
                   ReflectionAxis{{0, 0}, {0, 1}});
}

Partition star3(double R) {
  Builder b(R);
  const Vec2 e30 = b.ray_exit(pi / 6), e150 = b.ray_exit(5 * pi / 6), e270 = b.ray_exit(3 * pi / 2);
  const int O = b.vertex({0, 0});
  const int A = b.vertex(e30), B = b.vertex(e150), C = b.vertex(e270);
  const Loop s1 = concat({{O, A}, b.vertices(b.box_arc(e30, e150, {{0, R}})), {B}});
  const Loop s2 = concat({{O, B}, b.vertices(b.box_arc(e150, e270)), {C}});
  const Loop s3 = concat({{O, C}, b.vertices(b.box_arc(e270, e30)), {A}});
  std::vector<Subdomain> sd{{1, {s1}}, {2, {s2}}, {3, {s3}}};
  std::vector<Interface> itf{{1, 1, 2, {O, B}, 0.0}, {2, 2, 3, {O, C}, 0.0}, {3, 1, 3, {O, A}, 0.0}};
  return Partition(R, b.take_vertices(), std::move(sd), std::move(itf),
                   ReflectionAxis{{0, 0}, {0, 1}});
}

Partition grid(double R, int nx, int ny) {
  if (nx < 1 || ny < 1) throw Error("grid counts must be positive");
  Builder b(R);
  auto node = [&](int i, int j) {
    return b.vertex({-R + 2 * R * i / nx, -R + 2 * R * j / ny});
  };
  auto cell = [&](int i, int j) { return 1 + i + nx * j; };
  std::vector<Subdomain> sd;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      sd.push_back({cell(i, j), {{node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)}}});
  std::vector<Interface> itf;
  int id = 1;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (i + 1 < nx)
        itf.push_back({id++, cell(i, j), cell(i + 1, j), {node(i + 1, j), node(i + 1, j + 1)}, 0.0});
      if (j + 1 < ny)
        itf.push_back({id++, cell(i, j), cell(i, j + 1), {node(i, j + 1), node(i + 1, j + 1)}, 0.0});
    }
  return Partition(R, b.take_vertices(), std::move(sd), std::move(itf));
}

Partition wheel(double R, int m, double r) {
  if (m < 3) throw Error("wheel needs at least 3 spokes");
  if (!(r > 0.0 && r < R)) throw Error("wheel hub radius must lie in (0, R)");
  Builder b(R);
  std::vector<int> hub, ray;
  std::vector<Vec2> exits;
  for (int j = 0; j < m; ++j) {
    const double th = pi / 2 + 2 * pi * j / m;
    hub.push_back(b.vertex({r * std::cos(th), r * std::sin(th)}));
    exits.push_back(b.ray_exit(th));
    ray.push_back(b.vertex(exits.back()));
  }
  std::vector<Subdomain> sd{{1, {hub}}};
  std::vector<Interface> itf;
  for (int j = 0; j < m; ++j) {
    const int n = (j + 1) % m;
    sd.push_back({j + 2, {concat({{hub[j], ray[j]}, b.vertices(b.box_arc(exits[j], exits[n])),
                                  {ray[n], hub[n]}})}});
    itf.push_back({j + 1, 1, j + 2, {hub[j], hub[n]}, 0.0});
  }
  for (int j = 0; j < m; ++j) {
    const int prev = (j + m - 1) % m;
    itf.push_back({m + j + 1, prev + 2, j + 2, {hub[j], ray[j]}, 0.0});
  }
  return Partition(R, b.take_vertices(), std::move(sd), std::move(itf));
}

struct HoleSplit {
  std::vector<Loop> pieces;
  int bottom_left = -1;   // (xmin, y0)
  int bottom_right = -1;  // (xmax, y0)
  Loop hole;
};

/// Splits the rectangle [x0,x1]x[y0,y1] minus an x-monotone CCW polygon into
/// four simple pieces using vertical chords at the polygon's extreme x.
HoleSplit split_around_hole(Builder& b, double x0, double x1, double y0, double y1,
                            const std::vector<Vec2>& poly) {
  const int n = static_cast<int>(poly.size());
  double xmin = poly[0].x, xmax = poly[0].x;
  for (const auto& p : poly) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
  }
  auto extreme = [&](double x, bool lowest) {
    int best = -1;
    for (int i = 0; i < n; ++i)
      if (poly[i].x == x && (best < 0 || (lowest ? poly[i].y < poly[best].y : poly[i].y > poly[best].y)))
        best = i;
    return best;
  };
  const int lmin = extreme(xmin, true), lmax = extreme(xmin, false);
  const int rmin = extreme(xmax, true), rmax = extreme(xmax, false);
  auto chain = [&](int from, int to) {  // CCW walk, inclusive
    std::vector<int> out{from};
    for (int i = from; i != to;) {
      i = (i + 1) % n;
      out.push_back(i);
    }
    return out;
  };
  const auto lower = chain(lmin, rmin);
  const auto upper = chain(rmax, lmax);
  for (std::size_t i = 0; i + 1 < lower.size(); ++i)
    if (poly[lower[i + 1]].x < poly[lower[i]].x) throw Error("polygon is not x-monotone");
  for (std::size_t i = 0; i + 1 < upper.size(); ++i)
    if (poly[upper[i + 1]].x > poly[upper[i]].x) throw Error("polygon is not x-monotone");

  HoleSplit out;
  std::vector<int> id(n);
  for (int i = 0; i < n; ++i) id[i] = b.vertex(poly[i]);
  out.hole = id;
  auto ids = [&](std::vector<int> idx, bool reverse) {
    if (reverse) std::reverse(idx.begin(), idx.end());
    for (auto& i : idx) i = id[i];
    return idx;
  };
  const int bl = b.vertex({xmin, y0}), br = b.vertex({xmax, y0});
  const int tl = b.vertex({xmin, y1}), tr = b.vertex({xmax, y1});
  const int c00 = b.vertex({x0, y0}), c10 = b.vertex({x1, y0});
  const int c11 = b.vertex({x1, y1}), c01 = b.vertex({x0, y1});
  out.bottom_left = bl;
  out.bottom_right = br;
  out.pieces.push_back(concat({{c00, bl}, ids(chain(lmax, lmin), true), {tl, c01}}));
  out.pieces.push_back(concat({{br, c10, c11, tr}, ids(chain(rmin, rmax), true)}));
  out.pieces.push_back(concat({{bl, br}, ids(lower, true)}));
  out.pieces.push_back(concat({ids(upper, true), {tr, tl}}));
  return out;
}

std::vector<Vec2> ccw(std::vector<Vec2> poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
  if (a < 0.0) std::reverse(poly.begin(), poly.end());
  return poly;
}

void require_simple(const std::vector<Vec2>& poly, const char* what) {
  const std::size_t n = poly.size();
  if (n < 3) throw Error(std::string(what) + " polygon needs at least 3 vertices");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      const Vec2 a = poly[i], b = poly[(i + 1) % n], c = poly[j], d = poly[(j + 1) % n];
      const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
      const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
      if (((d1 >= 0) != (d2 >= 0) || d1 == 0 || d2 == 0) && ((d3 >= 0) != (d4 >= 0) || d3 == 0 || d4 == 0))
        throw Error(std::string(what) + " polygon is not simple");
    }
}

Partition line_with_bump(double R, std::vector<Vec2> bump) {
  require_simple(bump, "bump");
  bump = ccw(std::move(bump));
  for (const auto& p : bump)
    if (!(p.y > 0.0 && p.y < R && std::abs(p.x) < R))
      throw Error("bump polygon must lie strictly inside the upper half box");
  Builder b(R);
  const int A = b.vertex({-R, 0}), B = b.vertex({R, 0});
  auto split = split_around_hole(b, -R, R, 0.0, R, bump);
  const int E = b.vertex({-R, -R}), F = b.vertex({R, -R});
  Loop closed = split.hole;
  closed.push_back(closed.front());
  std::vector<Subdomain> sd{{1, {split.hole}},
                            {2, split.pieces},
                            {3, {{E, F, B, split.bottom_right, split.bottom_left, A}}}};
  std::vector<Interface> itf{{1, 1, 2, closed, 0.0},
                             {2, 2, 3, {A, split.bottom_left, split.bottom_right, B}, 0.0}};
  return Partition(R, b.take_vertices(), std::move(sd), std::move(itf));
}

Partition inclusion(double R, int sides, double r) {
  if (sides < 3) throw Error("inclusion polygon needs at least 3 sides");
  if (!(r > 0.0 && r < R)) throw Error("inclusion radius must lie in (0, R)");
  std::vector<Vec2> poly;
  for (int j = 0; j < sides; ++j) {
    const double th = 2 * pi * j / sides;
    poly.push_back({r * std::cos(th), r * std::sin(th)});
  }
  // Equalise extreme abscissae that differ only by rounding.
  double xmin = poly[0].x;
  for (const auto& p : poly) xmin = std::min(xmin, p.x);
  for (auto& p : poly)
    if (std::abs(p.x - xmin) < 1e-12 * r) p.x = xmin;
  Builder b(R);
  // A square ring at 2r keeps the coarse mesh around the polygon independent of R.
  const double s = 2.0 * r < R ? 2.0 * r : R;
  auto split = split_around_hole(b, -s, s, -s, s, poly);
  Loop closed = split.hole;
  closed.push_back(closed.front());
  std::vector<Loop> outer = split.pieces;
  if (s < R) {
    const int c00 = b.vertex({-R, -R}), c10 = b.vertex({R, -R}), c11 = b.vertex({R, R}), c01 = b.vertex({-R, R});
    const int s00 = b.vertex({-s, -s}), s10 = b.vertex({s, -s}), s11 = b.vertex({s, s}), s01 = b.vertex({-s, s});
    const int bl = split.bottom_left, br = split.bottom_right;
    const int tl = b.vertex({b.point(bl).x, s}), tr = b.vertex({b.point(br).x, s});
    outer.push_back({c00, c10, s10, br, bl, s00});
    outer.push_back({c10, c11, s11, s10});
    outer.push_back({c11, c01, s01, tl, tr, s11});
    outer.push_back({c01, c00, s00, s01});
  }
  std::vector<Subdomain> sd{{1, {split.hole}}, {2, outer}};
  std::vector<Interface> itf{{1, 1, 2, closed, 0.0}};
  return Partition(R, b.take_vertices(), std::move(sd), std::move(itf));
}

}  // namespace

std::vector<Vec2> square_bump(Vec2 c, double side) {
  const double h = side / 2;
  return {{c.x - h, c.y - h}, {c.x + h, c.y - h}, {c.x + h, c.y + h}, {c.x - h, c.y + h}};
}

CanonicalGeometry parse_geometry_name(const std::string& name) {
  if (name == "half_plane") return CanonicalGeometry::half_plane;
  if (name == "wedge") return CanonicalGeometry::wedge;
  if (name == "star3") return CanonicalGeometry::star3;
  if (name == "line_with_bump") return CanonicalGeometry::line_with_bump;
  if (name == "grid") return CanonicalGeometry::grid;
  if (name == "wheel") return CanonicalGeometry::wheel;
  if (name == "inclusion") return CanonicalGeometry::inclusion;
  throw Error("unknown geometry name '" + name + "'");
}

std::string to_string(CanonicalGeometry g) {
  switch (g) {
    case CanonicalGeometry::half_plane: return "half_plane";
    case CanonicalGeometry::wedge: return "wedge";
    case CanonicalGeometry::star3: return "star3";
    case CanonicalGeometry::line_with_bump: return "line_with_bump";
    case CanonicalGeometry::grid: return "grid";
    case CanonicalGeometry::wheel: return "wheel";
    case CanonicalGeometry::inclusion: return "inclusion";
  }
  return "unknown";
}

Partition build_canonical_partition(CanonicalGeometry name, const GeometryParams& p) {
  const double R = p.box_radius;
  if (!(R > 0.0)) throw Error("box_radius must be positive");
  switch (name) {
    case CanonicalGeometry::half_plane: return half_plane(R);
    case CanonicalGeometry::wedge: return wedge(R, p.angle);
    case CanonicalGeometry::star3: return star3(R);
    case CanonicalGeometry::line_with_bump: return line_with_bump(R, p.bump);
    case CanonicalGeometry::grid: return grid(R, p.nx, p.ny);
    case CanonicalGeometry::wheel: return wheel(R, p.sides, p.radius);
    case CanonicalGeometry::inclusion: return inclusion(R, p.sides, p.radius);
  }
  throw Error("unhandled geometry");
}

}  // namespace deltaspec
