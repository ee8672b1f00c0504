#ifndef DELTASPEC_CONFIG_HPP
#define DELTASPEC_CONFIG_HPP

#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "deltaspec/experiments.hpp"
#include "deltaspec/forms.hpp"
#include "deltaspec/geometry.hpp"
#include "deltaspec/spectrum.hpp"

namespace deltaspec {

enum class OutputFormat { json, text, csv };
OutputFormat parse_output_format(const std::string& name);

/// A scalar broadcast to every interface, or explicit per-interface values.
struct Strength {
  std::optional<double> scalar;
  std::map<int, double> per_interface;
};

struct Config {
  /// Absent when the document has no "geometry" object.
  std::optional<MeshSpec> mesh;
  BoundaryPolicy boundary = BoundaryPolicy::dirichlet;
  Strength alpha{1.0, {}};
  Strength beta{1.0, {}};
  SolverOptions solver;
  std::optional<OutputFormat> format;
  /// Experiment-specific options, passed through unvalidated.
  nlohmann::json experiment = nlohmann::json::object();

  const MeshSpec& require_mesh() const;
  InteractionData interactions(const Partition& p) const;
  /// The scalar value; throws if the strength was given per interface.
  double scalar_alpha() const;
  double scalar_beta() const;
};

/// Parses and validates a JSON config document. Errors name the offending
/// field path, e.g. "config: missing field 'box_radius'".
Config parse_config(const std::string& text);

}  // namespace deltaspec

#endif  // DELTASPEC_CONFIG_HPP
