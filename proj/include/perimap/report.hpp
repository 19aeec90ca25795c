#pragma once

// Run reports: everything one CLI invocation computed, plus the metadata
// needed to reproduce it.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "perimap/classifier.hpp"
#include "perimap/scenario.hpp"
#include "perimap/solvers.hpp"
#include "perimap/suites.hpp"

namespace perimap {

inline constexpr const char* kToolVersion = "0.1.0";

struct PhaseTime {
  std::string phase;
  double seconds = 0.0;
};

struct RunReport {
  std::string schema_version = kSchemaVersion;
  std::string scenario;           // scenario name
  nlohmann::json scenario_spec;   // the validated scenario, as parsed
  std::string tool_version = kToolVersion;
  std::vector<std::string> command;  // subcommand and arguments, minus the scenario path
  std::string generator{kGeneratorName};
  std::uint64_t seed = 0;
  std::optional<ClassificationReport> classification;
  std::optional<Period2Report> period2;
  std::vector<SolveResult> solves;
  std::vector<SuiteReport> suites;
  bool include_trace = false;
  std::vector<PhaseTime> wall_time;  // only filled when timings are requested
};

enum class ReportFormat { Json, CsvSummary };

nlohmann::json to_json(const Witness& w);
nlohmann::json to_json(const ClassificationReport& r);
nlohmann::json to_json(const Period2Report& r);
nlohmann::json to_json(const SolveResult& r, bool include_trace);
nlohmann::json to_json(const SuiteReport& r);
nlohmann::json to_json(const RunReport& r);

/// Inverse of to_json(RunReport). Throws SchemaError with a field path.
RunReport run_report_from_json(const nlohmann::json& doc);

std::string emit_report(const RunReport& report, ReportFormat format);

}  // namespace perimap
