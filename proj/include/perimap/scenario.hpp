#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "perimap/mapping.hpp"
#include "perimap/sampling.hpp"
#include "perimap/solvers.hpp"

namespace perimap {

inline constexpr const char* kSchemaVersion = "1";

/// A mapping, the set it acts on, and everything needed to reproduce a run.
struct Scenario {
  std::string name;
  std::string description;
  Eigen::Index dimension = 0;
  NormSpec norm;
  DomainSpec domain;  // domain.norm == norm
  MappingPtr mapping;
  SamplerConfig sampler;
  Tolerances tolerances;
  std::vector<std::string> tags;
  std::optional<Point> start;
  std::optional<ScheduleSpec> schedule;

  /// `start` if given, else the first lattice point of the domain.
  Point start_point() const;
  bool has_tag(const std::string& tag) const;
};

/// Parses and fully validates. Errors carry a JSON-pointer path:
/// ParseError for malformed JSON, SchemaError for missing/mistyped fields
/// and out-of-range values, InvalidSpec for inconsistent specifications.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

nlohmann::json to_json(const Scenario& s);
nlohmann::json to_json(const MappingSpec& T);
nlohmann::json to_json(const DomainSpec& K);
nlohmann::json to_json(const ScheduleSpec& s);
nlohmann::json to_json(const Tolerances& t);
nlohmann::json point_json(const Point& p);

/// Missing fields keep their defaults. Throws SchemaError at `path`.
Tolerances tolerances_from_json(const nlohmann::json& j, const std::string& path = "/tolerances");
Point point_from_json(const nlohmann::json& j, const std::string& path);

/// Canonical text: sorted keys, 2-space indent, doubles with 17 significant
/// digits (always carrying a decimal point or exponent), non-finite as null.
std::string canonical_dump(const nlohmann::json& doc);

/// Built-in scenarios: example_2_2, example_2_3, example_2_4.
std::vector<Scenario> corpus();
/// Writes every corpus scenario to `<dir>/<name>.json`; returns the paths.
std::vector<std::filesystem::path> write_corpus(const std::filesystem::path& dir);

}  // namespace perimap
