#include "deltaspec/forms.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <tuple>

namespace deltaspec {

BoundaryPolicy parse_boundary_policy(const std::string& name) {
  if (name == "dirichlet") return BoundaryPolicy::dirichlet;
  if (name == "neumann") return BoundaryPolicy::neumann;
  throw Error("unknown boundary policy '" + name + "'");
}

std::string to_string(BoundaryPolicy bc) { return bc == BoundaryPolicy::dirichlet ? "dirichlet" : "neumann"; }

std::string to_string(Space s) {
  switch (s) {
    case Space::continuous: return "continuous";
    case Space::broken: return "broken";
    case Space::subdomain: return "subdomain";
  }
  return "?";
}

int DofMap::dof(int domain, int node) const {
  for (const auto& [d, i] : node_dofs[node])
    if (space == Space::continuous || d == domain) return i;
  return -1;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

DofMap make_dofs(const Mesh& m, Space space, BoundaryPolicy bc, int only_domain = 0,
                 const std::vector<char>& extra_constraint = {}) {
  DofMap map;
  map.space = space;
  map.node_dofs.resize(m.node_count());
  const auto domains = m.node_domains();
  for (std::size_t v = 0; v < m.node_count(); ++v) {
    if (bc == BoundaryPolicy::dirichlet && m.is_outer[v]) continue;
    if (!extra_constraint.empty() && extra_constraint[v]) continue;
    auto add = [&](int d) {
      map.node_dofs[v].push_back({d, map.size()});
      map.dof_node.push_back(static_cast<int>(v));
      map.dof_domain.push_back(d);
    };
    switch (space) {
      case Space::continuous: add(0); break;
      case Space::broken:
        for (int d : domains[v]) add(d);
        break;
      case Space::subdomain:
        if (std::binary_search(domains[v].begin(), domains[v].end(), only_domain)) add(only_domain);
        break;
    }
  }
  return map;
}

// Element matrices of one P1 triangle, in local vertex order.
struct Element {
  double K[3][3];
  double M[3][3];
};

Element p1_element(const Mesh& m, std::size_t t) {
  const auto& v = m.triangles[t].v;
  const Vec2 p[3] = {m.nodes[v[0]], m.nodes[v[1]], m.nodes[v[2]]};
  const double area = m.triangle_area(t);
  Vec2 g[3];
  for (int i = 0; i < 3; ++i) {
    const Vec2 e = p[(i + 2) % 3] - p[(i + 1) % 3];
    g[i] = {-e.y / (2.0 * area), e.x / (2.0 * area)};
  }
  Element el{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      el.K[i][j] = area * dot(g[i], g[j]);
      el.M[i][j] = area / 12.0 * (i == j ? 2.0 : 1.0);
    }
  return el;
}

// Stiffness and mass over the triangles (of one subdomain when only_domain != 0).
void assemble_volume(const Mesh& m, const DofMap& dofs, Triplets& a, Triplets& mass, int only_domain = 0) {
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tri = m.triangles[t];
    if (only_domain != 0 && tri.domain != only_domain) continue;
    const Element el = p1_element(m, t);
    int d[3];
    for (int i = 0; i < 3; ++i) d[i] = dofs.dof(tri.domain, tri.v[i]);
    for (int i = 0; i < 3; ++i) {
      if (d[i] < 0) continue;
      for (int j = 0; j < 3; ++j) {
        if (d[j] < 0) continue;
        a.emplace_back(d[i], d[j], el.K[i][j]);
        mass.emplace_back(d[i], d[j], el.M[i][j]);
      }
    }
  }
}

// weight * |e|/6 [[2,1],[1,2]] on a combination of dofs with signs.
void add_edge_mass(Triplets& a, double weight, double length, const int (&da)[2], const int (&db)[2],
                   const double (&sign)[2]) {
  const double em[2][2] = {{2.0 * length / 6.0, length / 6.0}, {length / 6.0, 2.0 * length / 6.0}};
  // Row entries: node a / node b, each carried by up to two signed dofs.
  const int* rows[2] = {da, db};
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q)
      for (int s = 0; s < 2; ++s)
        for (int r = 0; r < 2; ++r) {
          const int i = rows[p][s], j = rows[q][r];
          if (i < 0 || j < 0) continue;
          a.emplace_back(i, j, weight * sign[s] * sign[r] * em[p][q]);
        }
}

SparseMatrix build(Eigen::Index n, const Triplets& t) {
  SparseMatrix s(n, n);
  s.setFromTriplets(t.begin(), t.end());
  s.makeCompressed();
  return s;
}

}  // namespace

DiscreteForm assemble_delta(std::shared_ptr<const Mesh> mesh, const InteractionData& d, BoundaryPolicy bc) {
  const Mesh& m = *mesh;
  DiscreteForm f;
  f.bc = bc;
  f.dofs = make_dofs(m, Space::continuous, bc);
  Triplets a, mass;
  assemble_volume(m, f.dofs, a, mass);
  for (const auto& e : m.interface_edges) {
    const double alpha = d.alpha_of(e.interface_id);
    const int da[2] = {f.dofs.dof(0, e.a), -1};
    const int db[2] = {f.dofs.dof(0, e.b), -1};
    const double sign[2] = {1.0, 0.0};
    add_edge_mass(a, -alpha, e.length, da, db, sign);
  }
  f.A = build(f.dofs.size(), a);
  f.M = build(f.dofs.size(), mass);
  f.mesh = std::move(mesh);
  return f;
}

DiscreteForm assemble_delta_prime(std::shared_ptr<const Mesh> mesh, const InteractionData& d, BoundaryPolicy bc) {
  const Mesh& m = *mesh;
  DiscreteForm f;
  f.bc = bc;
  f.dofs = make_dofs(m, Space::broken, bc);
  Triplets a, mass;
  assemble_volume(m, f.dofs, a, mass);
  for (const auto& e : m.interface_edges) {
    const double beta = d.beta_of(e.interface_id);
    if (!(beta > 0.0)) throw Error("beta must be strictly positive");
    const int da[2] = {f.dofs.dof(e.k, e.a), f.dofs.dof(e.l, e.a)};
    const int db[2] = {f.dofs.dof(e.k, e.b), f.dofs.dof(e.l, e.b)};
    const double sign[2] = {1.0, -1.0};
    add_edge_mass(a, -1.0 / beta, e.length, da, db, sign);
  }
  f.A = build(f.dofs.size(), a);
  f.M = build(f.dofs.size(), mass);
  f.mesh = std::move(mesh);
  return f;
}

DiscreteForm assemble_wedge_trace(std::shared_ptr<const Mesh> mesh, int domain, double gamma, BoundaryPolicy bc,
                                  bool vanish_on_axis) {
  const Mesh& m = *mesh;
  std::vector<char> constrained;
  if (vanish_on_axis) {
    if (!m.axis) throw Error("mesh carries no reflection axis");
    constrained.assign(m.node_count(), 0);
    for (int v : axis_nodes(m, *m.axis)) constrained[v] = 1;
  }
  DiscreteForm f;
  f.bc = bc;
  f.dofs = make_dofs(m, Space::subdomain, bc, domain, constrained);
  if (f.dofs.size() == 0) throw Error("subdomain " + std::to_string(domain) + " carries no dofs");
  Triplets a, mass;
  assemble_volume(m, f.dofs, a, mass, domain);
  for (const auto& e : m.interface_edges) {
    if (e.k != domain && e.l != domain) continue;
    const int da[2] = {f.dofs.dof(domain, e.a), -1};
    const int db[2] = {f.dofs.dof(domain, e.b), -1};
    const double sign[2] = {1.0, 0.0};
    add_edge_mass(a, -gamma, e.length, da, db, sign);
  }
  f.A = build(f.dofs.size(), a);
  f.M = build(f.dofs.size(), mass);
  f.mesh = std::move(mesh);
  return f;
}

Eigen::VectorXd embed_continuous(const DiscreteForm& broken, const DiscreteForm& continuous,
                                 const Eigen::VectorXd& f) {
  if (broken.dofs.space != Space::broken || continuous.dofs.space != Space::continuous)
    throw Error("embed_continuous needs a broken and a continuous form");
  if (broken.mesh != continuous.mesh) throw Error("forms are built on different meshes");
  if (f.size() != continuous.size()) throw Error("vector size does not match the continuous form");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(broken.size());
  for (int i = 0; i < broken.dofs.size(); ++i) {
    const int c = continuous.dofs.dof(0, broken.dofs.dof_node[i]);
    if (c >= 0) out[i] = f[c];
  }
  return out;
}

Eigen::VectorXcd apply_unitary(const PhaseAssignment& ph, const DiscreteForm& broken, const Eigen::VectorXcd& f) {
  if (broken.dofs.space != Space::broken) throw Error("apply_unitary needs a broken form");
  if (f.size() != broken.size()) throw Error("vector size does not match the broken form");
  Eigen::VectorXcd out(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const auto it = ph.z.find(broken.dofs.dof_domain[i]);
    if (it == ph.z.end()) throw Error("no phase for subdomain " + std::to_string(broken.dofs.dof_domain[i]));
    out[i] = it->second * f[i];
  }
  return out;
}

namespace {
void check_size(const DiscreteForm& df, Eigen::Index n) {
  if (n != df.size()) throw Error("vector size does not match the form");
}
}  // namespace

double form_value(const DiscreteForm& df, const Eigen::VectorXd& f) {
  check_size(df, f.size());
  return f.dot(df.A * f);
}

double form_value(const DiscreteForm& df, const Eigen::VectorXcd& f) {
  const Eigen::VectorXd re = f.real(), im = f.imag();
  return form_value(df, re) + form_value(df, im);
}

double mass_norm2(const DiscreteForm& df, const Eigen::VectorXd& f) {
  check_size(df, f.size());
  return f.dot(df.M * f);
}

double mass_norm2(const DiscreteForm& df, const Eigen::VectorXcd& f) {
  const Eigen::VectorXd re = f.real(), im = f.imag();
  return mass_norm2(df, re) + mass_norm2(df, im);
}

double rayleigh(const DiscreteForm& df, const Eigen::VectorXd& f) {
  const double m = mass_norm2(df, f);
  if (!(m > 0.0)) throw Error("Rayleigh quotient of a zero vector");
  return form_value(df, f) / m;
}

double rayleigh(const DiscreteForm& df, const Eigen::VectorXcd& f) {
  const double m = mass_norm2(df, f);
  if (!(m > 0.0)) throw Error("Rayleigh quotient of a zero vector");
  return form_value(df, f) / m;
}

Eigen::VectorXd indicator_vector(const DiscreteForm& broken, int k) {
  if (broken.dofs.space != Space::broken) throw Error("indicator needs a broken form");
  if (broken.bc != BoundaryPolicy::neumann)
    throw Error("indicator is not in the discrete space under the dirichlet policy");
  Eigen::VectorXd f = Eigen::VectorXd::Zero(broken.size());
  for (int i = 0; i < broken.dofs.size(); ++i)
    if (broken.dofs.dof_domain[i] == k) f[i] = 1.0;
  return f;
}

double indicator_form_value(const DiscreteForm& broken, int k) {
  return form_value(broken, indicator_vector(broken, k));
}

double cutoff(double s) {
  s = std::abs(s);
  if (s <= 1.0) return 1.0;
  if (s >= cutoff_support) return 0.0;
  const double u = (s - 1.0) / (cutoff_support - 1.0);
  return 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}

double cutoff_derivative(double s) {
  const double sign = s < 0.0 ? -1.0 : 1.0;
  s = std::abs(s);
  if (s <= 1.0 || s >= cutoff_support) return 0.0;
  const double w = cutoff_support - 1.0;
  const double u = (s - 1.0) / w;
  return -sign * 30.0 * u * u * (1.0 - u) * (1.0 - u) / w;
}

TestFamily parse_test_family(const std::string& name) {
  if (name == "deformation_fn") return TestFamily::deformation_fn;
  if (name == "wedge_psi_np") return TestFamily::wedge_psi_np;
  if (name == "transverse_exp") return TestFamily::transverse_exp;
  throw Error("unknown test function family '" + name + "'");
}

namespace {

// Liang-Barsky: does segment pq meet the box [x0,x1]x[y0,y1]?
bool segment_meets_box(Vec2 p, Vec2 q, double x0, double x1, double y0, double y1) {
  double t0 = 0.0, t1 = 1.0;
  const Vec2 d = q - p;
  const double P[4] = {-d.x, d.x, -d.y, d.y};
  const double Q[4] = {p.x - x0, x1 - p.x, p.y - y0, y1 - p.y};
  for (int i = 0; i < 4; ++i) {
    if (P[i] == 0.0) {
      if (Q[i] < 0.0) return false;
      continue;
    }
    const double r = Q[i] / P[i];
    if (P[i] < 0.0)
      t0 = std::max(t0, r);
    else
      t1 = std::min(t1, r);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace

Eigen::VectorXcd sample_test_function(const DiscreteForm& df, TestFamily family, const TestFunctionParams& prm) {
  const Mesh& m = *df.mesh;
  const double R = m.box_radius;
  if (!(prm.n > 0.0)) throw Error("test function scale n must be positive");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(df.size());
  switch (family) {
    case TestFamily::transverse_exp:
    case TestFamily::deformation_fn: {
      const bool cut = family == TestFamily::deformation_fn;
      if (cut && cutoff_support * prm.n > R) throw Error("test function support exceeds the box");
      for (int i = 0; i < df.dofs.size(); ++i) {
        const Vec2 x = m.nodes[df.dofs.dof_node[i]];
        const double c = cut ? cutoff(x.x / prm.n) : 1.0;
        out[i] = c * std::exp(-0.5 * prm.alpha * std::abs(x.y));
      }
      return out;
    }
    case TestFamily::wedge_psi_np: {
      if (df.dofs.space != Space::broken) throw Error("wedge_psi_np lives in the broken space");
      if (!(prm.beta > 0.0)) throw Error("beta must be strictly positive");
      const Vec2 e1{std::cos(prm.ray_angle), std::sin(prm.ray_angle)};
      const Vec2 e2{-e1.y, e1.x};
      auto local = [&](Vec2 x) {
        const Vec2 r = x - prm.ray_origin;
        return Vec2{dot(r, e1), dot(r, e2)};
      };
      const double s = cutoff_support * prm.n;
      const double x0 = prm.center - s, x1 = prm.center + s;
      for (double a : {x0, x1})
        for (double b : {-s, s}) {
          const Vec2 g = prm.ray_origin + a * e1 + b * e2;
          if (std::abs(g.x) > R || std::abs(g.y) > R) throw Error("test function support exceeds the box");
        }
      const double tol = 1e-12 * R;
      for (const auto& e : m.interface_edges) {
        const Vec2 p = local(m.nodes[e.a]), q = local(m.nodes[e.b]);
        const bool on_ray = std::abs(p.y) <= tol && std::abs(q.y) <= tol && p.x >= -tol && q.x >= -tol;
        if (!on_ray && segment_meets_box(p, q, x0, x1, -s, s))
          throw Error("test function support meets another interface");
      }
      const double scale = 1.0 / std::sqrt(prm.n);
      for (int i = 0; i < df.dofs.size(); ++i) {
        const Vec2 x = local(m.nodes[df.dofs.dof_node[i]]);
        const double sign = df.dofs.dof_domain[i] == prm.inside_domain ? 1.0 : -1.0;
        const double mod = scale * cutoff(std::abs(x.x - prm.center) / prm.n) * cutoff(std::abs(x.y) / prm.n) *
                           std::exp(-2.0 * std::abs(x.y) / prm.beta);
        out[i] = sign * mod * std::polar(1.0, prm.p * x.x);
      }
      return out;
    }
  }
  throw Error("unknown test function family");
}

void write_matrix(std::ostream& os, const SparseMatrix& a) {
  std::vector<std::tuple<Eigen::Index, Eigen::Index, double>> entries;
  for (Eigen::Index c = 0; c < a.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) entries.emplace_back(it.row(), it.col(), it.value());
  std::sort(entries.begin(), entries.end());
  os.precision(17);
  for (const auto& [i, j, v] : entries) os << i + 1 << ' ' << j + 1 << ' ' << v << '\n';
}

}  // namespace deltaspec
