#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "deltaspec/closedform.hpp"
#include "deltaspec/config.hpp"
#include "deltaspec/experiments.hpp"
#include "deltaspec/forms.hpp"
#include "deltaspec/mesh.hpp"
#include "deltaspec/spectrum.hpp"

using namespace deltaspec;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_failed = 2;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Config load_config(const std::string& path) {
  if (path.empty()) throw Error("--config is required");
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

OutputFormat resolve_format(const std::string& flag, const Config* c, OutputFormat fallback) {
  if (!flag.empty()) return parse_output_format(flag);
  if (c && c->format) return *c->format;
  return fallback;
}

// Rows of name/value pairs rendered in any of the three formats.
void emit_pairs(const std::vector<std::pair<std::string, ojson>>& rows, OutputFormat f) {
  if (f == OutputFormat::json) {
    ojson j = ojson::object();
    for (const auto& [k, v] : rows) j[k] = v;
    std::cout << j.dump(2) << '\n';
    return;
  }
  auto scalar = [](const ojson& v) { return v.is_number_float() ? fmt(v.get<double>()) : v.dump(); };
  if (f == OutputFormat::csv) {
    for (std::size_t i = 0; i < rows.size(); ++i) std::cout << (i ? "," : "") << rows[i].first;
    std::cout << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) std::cout << (i ? "," : "") << scalar(rows[i].second);
    std::cout << '\n';
    return;
  }
  std::size_t w = 0;
  for (const auto& row : rows) w = std::max(w, row.first.size());
  for (const auto& [k, v] : rows) std::cout << k << std::string(w - k.size() + 2, ' ') << scalar(v) << '\n';
}

double arg(const std::vector<std::string>& a, std::size_t i, const std::string& name) {
  if (i >= a.size()) throw Error("missing parameter '" + name + "'");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(a[i], &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != a[i].size()) throw Error("parameter '" + name + "' must be a number");
  return v;
}

int closed_form(const std::string& name, const std::vector<std::string>& a, OutputFormat f) {
  auto expect = [&](std::size_t n) {
    if (a.size() > n) throw Error("too many parameters for '" + name + "'");
  };
  std::vector<std::pair<std::string, ojson>> rows;
  bool plain = true;  // text output is the bare values on one line
  if (name == "halfplane-bottoms") {
    expect(2);
    const auto b = halfplane_bottoms(arg(a, 0, "alpha"), arg(a, 1, "beta"));
    rows = {{"delta", b.delta}, {"delta_prime", b.delta_prime}};
  } else if (name == "ordering-impossible") {
    expect(2);
    rows = {{"ordering_impossible", ordering_impossible(arg(a, 0, "alpha"), arg(a, 1, "beta"))}};
  } else if (name == "wedge-trace") {
    expect(2);
    rows = {{"bound", wedge_trace_bound(arg(a, 0, "gamma"), arg(a, 1, "phi"))}};
  } else if (name == "wedge-trace-bisector") {
    expect(2);
    rows = {{"bound", wedge_trace_bound_bisector(arg(a, 0, "gamma"), arg(a, 1, "phi"))}};
  } else if (name == "star-delta") {
    expect(1);
    rows = {{"bottom", star_delta_bottom(arg(a, 0, "alpha"))}};
  } else if (name == "edge-constant") {
    expect(1);
    const double chi = arg(a, 0, "chi");
    if (chi != std::floor(chi)) throw Error("parameter 'chi' must be an integer");
    rows = {{"edge_constant", edge_constant(static_cast<int>(chi))}};
  } else if (name == "m-functions") {
    expect(2);
    const auto m = m_functions(arg(a, 0, "omega"), arg(a, 1, "t"));
    rows = {{"m1", m.m1}, {"m2", m.m2}};
  } else if (name == "omega-star") {
    expect(1);
    rows = {{"omega_star", omega_star(arg(a, 0, "t"))}};
  } else if (name == "interval") {
    expect(2);
    const auto r = interval_delta_prime(arg(a, 0, "beta"), arg(a, 1, "l"));
    rows = {{"epsilon", r.epsilon}, {"k", r.k_rate}, {"residual", r.residual},
            {"gap_below_threshold", r.gap_below_threshold}};
  } else if (name == "interval-fem") {
    expect(3);
    rows = {{"epsilon", interval_fem_oracle(arg(a, 0, "beta"), arg(a, 1, "l"),
                                            static_cast<int>(arg(a, 2, "elements")))}};
  } else if (name == "minimax") {
    expect(1);
    const int grid = a.empty() ? 1000000 : static_cast<int>(arg(a, 0, "grid_points"));
    const MinimaxReport m = minimax_star(1e-14, grid);
    rows = {{"t_star", m.t_star},
            {"omega_star", m.omega_star_at_t},
            {"value", m.value},
            {"c_star_derived", m.c_star_derived},
            {"paper_printed_value", m.paper_printed_value},
            {"paper_printed_c_star", m.paper_printed_c_star},
            {"branch_t_ge_1", m.branch_t_ge_1},
            {"value_at_half", m.value_at_half},
            {"grid_value", m.grid_value},
            {"grid_t", m.grid_t},
            {"oracle_gap", m.oracle_gap},
            {"crossing_residual", m.crossing_residual},
            {"discrepancy", m.discrepancy}};
    plain = false;
  } else {
    throw Error("unknown closed form '" + name + "'");
  }
  if (f == OutputFormat::text && plain) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const ojson& v = rows[i].second;
      std::cout << (i ? " " : "") << (v.is_number_float() ? fmt(v.get<double>()) : v.dump());
    }
    std::cout << '\n';
  } else {
    emit_pairs(rows, f);
  }
  return exit_ok;
}

int partition_info(const Config& c, OutputFormat f) {
  const MeshSpec& spec = c.require_mesh();
  const Partition p = build_canonical_partition(spec.geometry, spec.params);
  const InteractionData d = c.interactions(p);
  const Graph g = adjacency_graph(p);
  const Colouring col = chromatic_colouring(g);
  const PhaseAssignment ph = phase_assignment(p, col, d);
  if (f == OutputFormat::csv) {
    std::cout << "interface,k,l,length,alpha,beta,alpha_Z\n";
    for (const auto& i : p.interfaces())
      std::cout << i.id << ',' << i.k << ',' << i.l << ',' << fmt(i.length) << ',' << fmt(d.alpha_of(i.id)) << ','
                << fmt(d.beta_of(i.id)) << ',' << fmt(ph.alpha_z.at(i.id)) << '\n';
    return exit_ok;
  }
  ojson j;
  j["geometry"] = describe(spec);
  auto& sd = j["subdomains"] = ojson::array();
  for (const auto& s : p.subdomains())
    sd.push_back({{"id", s.id},
                  {"area", p.subdomain_area(s.id)},
                  {"bounded", p.is_bounded(s.id)},
                  {"pieces", s.pieces.size()},
                  {"colour", col.phi.at(s.id)}});
  auto& itf = j["interfaces"] = ojson::array();
  for (const auto& i : p.interfaces())
    itf.push_back({{"id", i.id},
                   {"k", i.k},
                   {"l", i.l},
                   {"length", i.length},
                   {"alpha", d.alpha_of(i.id)},
                   {"beta", d.beta_of(i.id)},
                   {"alpha_Z", ph.alpha_z.at(i.id)}});
  j["chi"] = col.chi;
  j["edge_constant"] = edge_constant(col.chi);
  if (f == OutputFormat::json) {
    std::cout << j.dump(2) << '\n';
    return exit_ok;
  }
  std::cout << "geometry       " << j["geometry"].dump() << "\nchi            " << col.chi
            << "\nedge_constant  " << fmt(edge_constant(col.chi)) << "\nsubdomains\n";
  for (const auto& s : p.subdomains())
    std::cout << "  " << s.id << "  area " << fmt(p.subdomain_area(s.id)) << "  colour " << col.phi.at(s.id)
              << (p.is_bounded(s.id) ? "  bounded" : "") << '\n';
  std::cout << "interfaces\n";
  for (const auto& i : p.interfaces())
    std::cout << "  " << i.id << "  " << i.k << '-' << i.l << "  length " << fmt(i.length) << "  alpha "
              << fmt(d.alpha_of(i.id)) << "  beta " << fmt(d.beta_of(i.id)) << "  alpha_Z "
              << fmt(ph.alpha_z.at(i.id)) << '\n';
  return exit_ok;
}

DiscreteForm assemble(const Config& c, Operator op, std::shared_ptr<const Mesh>* mesh_out = nullptr) {
  const MeshSpec& spec = c.require_mesh();
  const Partition p = build_canonical_partition(spec.geometry, spec.params);
  const InteractionData d = c.interactions(p);
  auto mesh = std::make_shared<const Mesh>(triangulate(p, spec.levels));
  if (mesh_out) *mesh_out = mesh;
  return op == Operator::delta ? assemble_delta(mesh, d, c.boundary) : assemble_delta_prime(mesh, d, c.boundary);
}

int spectrum(const Config& c, Operator op, OutputFormat f) {
  const DiscreteForm form = assemble(c, op);
  const SpectrumResult r = lowest_eigenpairs(form.A, form.M, c.solver);
  if (f == OutputFormat::csv) {
    std::cout << "index,value,residual\n";
    for (Eigen::Index i = 0; i < r.eigenvalues.size(); ++i)
      std::cout << i + 1 << ',' << fmt(r.eigenvalues[i]) << ',' << fmt(r.residuals[i]) << '\n';
  } else if (f == OutputFormat::json) {
    ojson j{{"operator", to_string(op)},
            {"mesh", describe(c.require_mesh())},
            {"boundary", to_string(c.boundary)},
            {"dofs", form.size()},
            {"converged", r.converged},
            {"iterations", r.iterations},
            {"shift", r.shift},
            {"preconditioner", to_string(r.preconditioner)},
            {"tol", r.tol}};
    auto& ev = j["eigenvalues"] = ojson::array();
    for (Eigen::Index i = 0; i < r.eigenvalues.size(); ++i)
      ev.push_back({{"index", i + 1}, {"value", r.eigenvalues[i]}, {"residual", r.residuals[i]}});
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "operator    " << to_string(op) << "\ndofs        " << form.size() << "\nconverged   "
              << (r.converged ? "yes" : "no") << "\niterations  " << r.iterations << "\nindex  value  residual\n";
    for (Eigen::Index i = 0; i < r.eigenvalues.size(); ++i)
      std::cout << i + 1 << "  " << fmt(r.eigenvalues[i]) << "  " << fmt(r.residuals[i]) << '\n';
  }
  if (!r.converged) {
    std::cerr << "eigensolver did not converge\n";
    return exit_failed;
  }
  return exit_ok;
}

// Typed access to the free-form "experiment" block.
class Options {
public:
  explicit Options(const nlohmann::json& j) : j_(j) {}

  double number(const std::string& key, double def) const {
    if (!j_.contains(key)) return def;
    if (!j_[key].is_number()) bad(key, "must be a number");
    return j_[key].get<double>();
  }
  int integer(const std::string& key, int def) const {
    if (!j_.contains(key)) return def;
    if (!j_[key].is_number_integer()) bad(key, "must be an integer");
    return j_[key].get<int>();
  }
  std::string string(const std::string& key, const std::string& def) const {
    if (!j_.contains(key)) return def;
    if (!j_[key].is_string()) bad(key, "must be a string");
    return j_[key].get<std::string>();
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> def) const {
    if (!j_.contains(key)) return def;
    std::vector<double> out;
    if (!j_[key].is_array()) bad(key, "must be an array of numbers");
    for (const auto& v : j_[key]) {
      if (!v.is_number()) bad(key, "must be an array of numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }
  std::vector<int> integers(const std::string& key, std::vector<int> def) const {
    if (!j_.contains(key)) return def;
    std::vector<int> out;
    if (!j_[key].is_array()) bad(key, "must be an array of integers");
    for (const auto& v : j_[key]) {
      if (!v.is_number_integer()) bad(key, "must be an array of integers");
      out.push_back(v.get<int>());
    }
    return out;
  }
  MeshLadder ladder(const std::string& key, MeshLadder def) const {
    if (!j_.contains(key)) return def;
    MeshLadder out;
    if (!j_[key].is_array()) bad(key, "must be an array of [box_radius, levels] pairs");
    for (const auto& v : j_[key]) {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number_integer())
        bad(key, "must be an array of [box_radius, levels] pairs");
      out.emplace_back(v[0].get<double>(), v[1].get<int>());
    }
    return out;
  }

private:
  [[noreturn]] static void bad(const std::string& key, const std::string& what) {
    throw Error("config: field 'experiment." + key + "' " + what);
  }
  const nlohmann::json& j_;
};

ExperimentReport run_experiment(const std::string& name, const Config& c) {
  using std::numbers::pi;
  const Options o(c.experiment);
  if (name == "ordering") return run_ordering(c.require_mesh(), c.scalar_alpha(), c.scalar_beta(), c.solver);
  if (name == "unitary-identity")
    return run_unitary_identity(c.require_mesh(), c.scalar_beta(), o.integer("trials", 100), c.solver.seed,
                                c.boundary);
  if (name == "star-bounds") {
    StarBoundsParams p;
    p.alpha = c.scalar_alpha();
    p.beta = c.scalar_beta();
    p.meshes = o.ladder("meshes", p.meshes);
    p.gap_tolerance = o.number("gap_tolerance", p.gap_tolerance);
    p.solver = c.solver;
    return run_star_bounds(p);
  }
  if (name == "threshold-convergence") {
    const MeshSpec& m = c.require_mesh();
    ThresholdParams p;
    p.geometry = m.geometry;
    p.angle = m.params.angle;
    p.op = parse_operator(o.string("operator", "delta"));
    p.strength = p.op == Operator::delta ? c.scalar_alpha() : c.scalar_beta();
    p.meshes = o.ladder("meshes", {{m.params.box_radius, m.levels}});
    p.refinement_levels = o.integers("refinement_levels", {});
    p.tolerance = o.number("tolerance", p.tolerance);
    p.psi_n = o.numbers("psi_n", p.psi_n);
    p.p = o.number("p", p.p);
    p.psi_tolerance = o.number("psi_tolerance", p.psi_tolerance);
    p.solver = c.solver;
    return run_threshold_convergence(p);
  }
  if (name == "deformation-bound-state") {
    const MeshSpec& m = c.require_mesh();
    if (m.geometry != CanonicalGeometry::line_with_bump) throw Error("deformation-bound-state needs line_with_bump");
    DeformationParams p;
    p.bump = m.params.bump;
    p.alpha = c.scalar_alpha();
    p.box_radius = m.params.box_radius;
    p.levels = m.levels;
    p.n_list = o.numbers("n", p.n_list);
    p.mesh_n = o.number("mesh_n", p.mesh_n);
    p.solver = c.solver;
    return run_deformation_bound_state(p);
  }
  if (name == "indicator-bound-state") {
    const MeshSpec& m = c.require_mesh();
    if (m.geometry != CanonicalGeometry::inclusion) throw Error("indicator-bound-state needs the inclusion geometry");
    IndicatorParams p;
    p.sides = m.params.sides;
    p.radius = m.params.radius;
    p.beta = c.scalar_beta();
    p.meshes = o.ladder("meshes", {{m.params.box_radius, m.levels}});
    p.large_beta = o.number("large_beta", p.large_beta);
    p.solver = c.solver;
    return run_indicator_bound_state(p);
  }
  if (name == "sharpness-chi2") {
    SharpnessParams p;
    p.alpha = c.scalar_alpha();
    p.beta = c.scalar_beta();
    if (c.mesh) {
      p.box_radius = c.mesh->params.box_radius;
      p.levels = c.mesh->levels;
    }
    p.solver = c.solver;
    return run_sharpness_chi2(p);
  }
  if (name == "minimax") return run_minimax(o.integer("grid_points", 1000000));
  if (name == "interval") {
    IntervalParams p;
    p.betas = o.numbers("betas", p.betas);
    p.lengths = o.numbers("lengths", p.lengths);
    p.long_lengths = o.numbers("long_lengths", p.long_lengths);
    p.elements = o.integer("elements", p.elements);
    return run_interval(p);
  }
  if (name == "abc") return run_abc(o.integer("samples", 100000), c.solver.seed);
  if (name == "wedge-trace") {
    WedgeTraceParams p;
    p.angles = o.numbers("angles", {pi / 3, 2 * pi / 3, pi});
    p.gamma = o.number("gamma", p.gamma);
    if (c.mesh) {
      p.box_radius = c.mesh->params.box_radius;
      p.levels = c.mesh->levels;
    }
    p.sharp_angle = o.number("sharp_angle", 2 * pi / 3);
    p.sharp_tolerance = o.number("sharp_tolerance", p.sharp_tolerance);
    p.solver = c.solver;
    return run_wedge_trace(p);
  }
  if (name == "even-odd") {
    EvenOddParams p;
    p.angles = o.numbers("angles", {pi / 3, 2 * pi / 3, pi});
    if (c.mesh) {
      p.box_radius = c.mesh->params.box_radius;
      p.levels = c.mesh->levels;
    }
    p.trials = o.integer("trials", p.trials);
    p.seed = c.solver.seed;
    return run_even_odd(p);
  }
  if (name == "solver-crosscheck")
    return run_solver_crosscheck({c.require_mesh()}, c.scalar_alpha(), c.scalar_beta(), c.solver);
  throw Error("unknown experiment '" + name + "'");
}

int verify(const std::string& name, const Config& c, OutputFormat f) {
  const ExperimentReport r = run_experiment(name, c);
  const bool timing = !c.solver.deterministic;
  if (f == OutputFormat::json) {
    std::cout << to_json(r, timing).dump(2) << '\n';
  } else if (f == OutputFormat::text) {
    std::cout << to_text(r, timing);
  } else {
    std::cout << "assertion,relation,computed,reference,tolerance,margin,pass,informational,source\n";
    auto quote = [](const std::string& s) { return '"' + s + '"'; };
    for (const auto& a : r.assertions)
      std::cout << quote(a.name) << ',' << quote(to_string(a.relation)) << ',' << fmt(a.computed) << ','
                << fmt(a.reference) << ',' << fmt(a.tolerance) << ',' << fmt(a.margin()) << ','
                << (a.pass() ? "true" : "false") << ',' << (a.informational ? "true" : "false") << ','
                << quote(a.source) << '\n';
  }
  return r.passed() ? exit_ok : exit_failed;
}

int export_artifact(const std::string& kind, const Config& c, const std::string& op_name, const std::string& which) {
  if (kind == "mesh") {
    const MeshSpec& spec = c.require_mesh();
    write_mesh(std::cout, triangulate(build_canonical_partition(spec.geometry, spec.params), spec.levels));
    return exit_ok;
  }
  if (kind == "matrix") {
    const DiscreteForm form = assemble(c, parse_operator(op_name));
    if (which == "A")
      write_matrix(std::cout, form.A);
    else if (which == "M")
      write_matrix(std::cout, form.M);
    else
      throw Error("--which must be A or M");
    return exit_ok;
  }
  throw Error("unknown export kind '" + kind + "' (expected mesh or matrix)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral experiments for delta and delta' interactions on partitions of the plane", "deltaspec"};
  app.require_subcommand(1);
  std::string format, config_path;

  auto* part = app.add_subcommand("partition", "Partition queries");
  part->require_subcommand(1);
  auto* info = part->add_subcommand("info", "Subdomains, interfaces, colouring and phase weights");
  info->add_option("--config", config_path, "JSON config file")->required();
  info->add_option("--format", format, "json, text or csv");

  std::string op_name = "delta";
  auto* spec = app.add_subcommand("spectrum", "Lowest eigenvalues of the discrete operator");
  spec->add_option("--operator", op_name, "delta or delta-prime")->required();
  spec->add_option("--config", config_path, "JSON config file")->required();
  spec->add_option("--format", format, "json, text or csv");

  std::string cf_name;
  std::vector<std::string> cf_args;
  auto* cf = app.add_subcommand("closed-form", "Closed-form quantities");
  cf->add_option("name", cf_name,
                 "halfplane-bottoms, ordering-impossible, wedge-trace, wedge-trace-bisector, star-delta, "
                 "edge-constant, m-functions, omega-star, interval, interval-fem, minimax")
      ->required();
  cf->add_option("params", cf_args, "Numeric parameters");
  cf->add_option("--format", format, "json, text or csv");
  cf->allow_extras(false);

  std::string exp_name;
  auto* ver = app.add_subcommand("verify", "Run a named experiment and report assertions");
  ver->add_option("experiment", exp_name, "Experiment name")->required();
  ver->add_option("--config", config_path, "JSON config file")->required();
  ver->add_option("--format", format, "json, text or csv");

  std::string kind, which = "A";
  auto* exp = app.add_subcommand("export", "Write a mesh or an assembled matrix");
  exp->add_option("kind", kind, "mesh or matrix")->required();
  exp->add_option("--config", config_path, "JSON config file")->required();
  exp->add_option("--operator", op_name, "delta or delta-prime (matrix only)");
  exp->add_option("--which", which, "A or M (matrix only)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    std::cerr << app.help();
    return exit_usage;
  }

  try {
    if (*cf) return closed_form(cf_name, cf_args, resolve_format(format, nullptr, OutputFormat::text));
    const Config c = load_config(config_path);
    if (*info) return partition_info(c, resolve_format(format, &c, OutputFormat::json));
    if (*spec) return spectrum(c, parse_operator(op_name), resolve_format(format, &c, OutputFormat::json));
    if (*ver) return verify(exp_name, c, resolve_format(format, &c, OutputFormat::json));
    if (*exp) return export_artifact(kind, c, op_name, which);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  }
  return exit_usage;
}
