#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "deltaspec/experiments.hpp"

namespace deltaspec {

std::string to_string(Relation r) {
  switch (r) {
    case Relation::le: return "<=";
    case Relation::ge: return ">=";
    case Relation::lt: return "<";
    case Relation::gt: return ">";
    case Relation::abs_within: return "|c-r|<=";
    case Relation::rel_within: return "|c-r|/|r|<=";
  }
  return "?";
}

double Assertion::margin() const {
  const double c = computed, r = reference, t = tolerance;
  switch (relation) {
    case Relation::le: return r + t - c;
    case Relation::ge: return c - (r - t);
    case Relation::lt: return r - t - c;
    case Relation::gt: return c - r - t;
    case Relation::abs_within: return t - std::abs(c - r);
    case Relation::rel_within: return t - std::abs(c - r) / (r != 0.0 ? std::abs(r) : 1.0);
  }
  return std::nan("");
}

bool Assertion::pass() const {
  const double m = margin();
  if (relation == Relation::lt || relation == Relation::gt) return m > 0.0;
  return m >= 0.0;
}

Assertion& ExperimentReport::check(std::string name, Relation rel, double computed, double reference,
                                   double tolerance, std::string source, bool informational) {
  assertions.push_back({std::move(name), rel, computed, reference, tolerance, std::move(source), informational});
  return assertions.back();
}

bool ExperimentReport::passed() const {
  return std::all_of(assertions.begin(), assertions.end(),
                     [](const Assertion& a) { return a.informational || a.pass(); });
}

namespace {

std::string verdict(const ExperimentReport& r) {
  if (!r.passed()) return "fail";
  return r.informational ? "informational" : "pass";
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

}  // namespace

nlohmann::ordered_json to_json(const ExperimentReport& r, bool include_timing) {
  nlohmann::ordered_json j;
  j["experiment"] = r.name;
  j["verdict"] = verdict(r);
  j["config"] = r.config;
  auto& c = j["computed"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.computed) c[k] = v;
  auto& ref = j["reference"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.reference) ref[k] = v;
  auto& as = j["assertions"] = nlohmann::ordered_json::array();
  for (const auto& a : r.assertions) {
    as.push_back({{"name", a.name},
                  {"relation", to_string(a.relation)},
                  {"computed", a.computed},
                  {"reference", a.reference},
                  {"tolerance", a.tolerance},
                  {"margin", a.margin()},
                  {"pass", a.pass()},
                  {"informational", a.informational},
                  {"source", a.source}});
  }
  j["notes"] = r.notes;
  if (include_timing) j["wall_seconds"] = r.wall_seconds;
  return j;
}

std::string to_text(const ExperimentReport& r, bool include_timing) {
  std::ostringstream os;
  os << "experiment  " << r.name << "\nverdict     " << verdict(r) << "\nconfig      " << r.config.dump() << '\n';
  auto table = [&](const char* title, const std::vector<std::pair<std::string, double>>& rows) {
    if (rows.empty()) return;
    std::size_t w = 0;
    for (const auto& row : rows) w = std::max(w, row.first.size());
    os << title << '\n';
    for (const auto& [k, v] : rows) os << "  " << k << std::string(w - k.size() + 2, ' ') << num(v) << '\n';
  };
  table("computed", r.computed);
  table("reference", r.reference);
  if (!r.assertions.empty()) {
    std::vector<std::array<std::string, 8>> rows{
        {"assertion", "relation", "computed", "reference", "tolerance", "margin", "verdict", "source"}};
    for (const auto& a : r.assertions)
      rows.push_back({a.name, to_string(a.relation), num(a.computed), num(a.reference), num(a.tolerance),
                      num(a.margin()), a.pass() ? "PASS" : (a.informational ? "info" : "FAIL"), a.source});
    std::array<std::size_t, 8> w{};
    for (const auto& row : rows)
      for (std::size_t i = 0; i < 8; ++i) w[i] = std::max(w[i], row[i].size());
    os << "assertions\n";
    for (const auto& row : rows) {
      os << ' ';
      for (std::size_t i = 0; i < 8; ++i) {
        os << ' ' << row[i];
        if (i + 1 < 8) os << std::string(w[i] - row[i].size(), ' ');
      }
      os << '\n';
    }
  }
  for (const auto& n : r.notes) os << "note        " << n << '\n';
  if (include_timing) os << "wall_seconds " << num(r.wall_seconds) << '\n';
  return os.str();
}

}  // namespace deltaspec
