#include "perimap/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace perimap {

using nlohmann::json;

namespace {

json points_json(const std::vector<Point>& ps) {
  json a = json::array();
  for (const auto& p : ps) a.push_back(point_json(p));
  return a;
}

// +inf and nan have no JSON form; they round-trip through null
json real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

[[noreturn]] void schema_error(const std::string& path, const std::string& msg) {
  throw Error(ErrorKind::SchemaError, msg, path);
}

const json& at(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema_error(path + "/" + key, "missing required field");
  return *it;
}

double get_real(const json& j, const char* key, const std::string& path, double if_null) {
  const auto& v = at(j, key, path);
  if (v.is_null()) return if_null;
  if (!v.is_number()) schema_error(path + "/" + key, "expected a number");
  return v.get<double>();
}

template <typename T>
T get(const json& j, const char* key, const std::string& path) {
  try {
    return at(j, key, path).get<T>();
  } catch (const json::exception& e) {
    schema_error(path + "/" + key, e.what());
  }
}

std::vector<Point> get_points(const json& j, const char* key, const std::string& path) {
  const auto& a = at(j, key, path);
  if (!a.is_array()) schema_error(path + "/" + key, "expected an array of points");
  std::vector<Point> out;
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(point_from_json(a[i], path + "/" + key + "/" + std::to_string(i)));
  return out;
}

template <typename Enum, std::size_t N>
Enum enum_from(const std::string& s, const Enum (&values)[N], const std::string& path) {
  for (Enum v : values)
    if (to_string(v) == s) return v;
  schema_error(path, "unknown value '" + s + "'");
}

constexpr VerdictStatus kStatuses[] = {VerdictStatus::Holds, VerdictStatus::Fails, VerdictStatus::Unknown};
constexpr Termination kTerminations[] = {Termination::Converged, Termination::ResidualFloor, Termination::MaxIter,
                                         Termination::Period2Obstruction, Termination::Diverged};

Witness witness_from(const json& j, const std::string& path) {
  Witness w;
  w.indices = get<std::vector<std::size_t>>(j, "indices", path);
  w.points = get_points(j, "points", path);
  w.observed = get_real(j, "observed", path, std::numeric_limits<double>::quiet_NaN());
  w.bound = get_real(j, "bound", path, std::numeric_limits<double>::quiet_NaN());
  return w;
}

ClassificationReport classification_from(const json& j, const std::string& path) {
  ClassificationReport r;
  const auto& verdicts = at(j, "verdicts", path);
  for (MapClass c : kAllClasses) {
    const auto vpath = path + "/verdicts/" + std::string(to_string(c));
    const auto& v = at(verdicts, std::string(to_string(c)).c_str(), path + "/verdicts");
    Verdict verdict;
    verdict.status = enum_from(get<std::string>(v, "status", vpath), kStatuses, vpath + "/status");
    if (v.contains("witness")) verdict.witness = witness_from(v["witness"], vpath + "/witness");
    r.verdicts[c] = std::move(verdict);
  }
  r.alpha_hat = get_real(j, "alpha_hat", path, 0.0);
  r.pair_alpha_hat = get_real(j, "pair_alpha_hat", path, 0.0);
  r.n_points = get<std::size_t>(j, "n_points", path);
  r.n_triples_checked = get<std::size_t>(j, "n_triples_checked", path);
  r.n_pairs_checked = get<std::size_t>(j, "n_pairs_checked", path);
  r.exhaustive = get<bool>(j, "exhaustive", path);
  r.fixed_points = get_points(j, "fixed_points", path);
  r.notes = get<std::vector<std::string>>(j, "notes", path);
  return r;
}

Period2Report period2_from(const json& j, const std::string& path) {
  Period2Report r;
  r.found = get<bool>(j, "found", path);
  if (j.contains("witness")) r.witness = point_from_json(j["witness"], path + "/witness");
  r.displacement = get_real(j, "displacement", path, 0.0);
  r.fixed_gap = get_real(j, "fixed_gap", path, 0.0);
  return r;
}

SolveResult solve_from(const json& j, const std::string& path) {
  SolveResult r;
  r.method = get<std::string>(j, "method", path);
  r.candidate = point_from_json(at(j, "candidate", path), path + "/candidate");
  r.residual = get_real(j, "residual", path, std::numeric_limits<double>::infinity());
  r.outer_iterations = get<std::size_t>(j, "outer_iterations", path);
  r.inner_iterations_total = get<std::size_t>(j, "inner_iterations_total", path);
  r.termination = enum_from(get<std::string>(j, "termination", path), kTerminations, path + "/termination");
  if (j.contains("bound_scale")) r.bound_scale = get_real(j, "bound_scale", path, 0.0);
  r.bound_samples = get<std::size_t>(j, "bound_samples", path);
  r.decay_violations = get<std::size_t>(j, "decay_violations", path);
  if (j.contains("trace")) {
    const auto& trace = j["trace"];
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const auto tpath = path + "/trace/" + std::to_string(i);
      TraceEntry e;
      e.index = get<std::size_t>(trace[i], "index", tpath);
      e.parameter = get_real(trace[i], "parameter", tpath, 0.0);
      e.iterate = point_from_json(at(trace[i], "iterate", tpath), tpath + "/iterate");
      e.residual = get_real(trace[i], "residual", tpath, std::numeric_limits<double>::infinity());
      r.trace.push_back(std::move(e));
    }
  }
  return r;
}

SuiteReport suite_from(const json& j, const std::string& path) {
  SuiteReport r;
  r.suite_name = get<std::string>(j, "suite_name", path);
  r.n_cases = get<std::size_t>(j, "n_cases", path);
  r.n_violations = get<std::size_t>(j, "n_violations", path);
  r.worst_margin = get_real(j, "worst_margin", path, std::numeric_limits<double>::infinity());
  const auto& vs = at(j, "violations", path);
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const auto vpath = path + "/violations/" + std::to_string(i);
    Violation v;
    v.indices = get<std::vector<std::size_t>>(vs[i], "indices", vpath);
    v.points = get_points(vs[i], "points", vpath);
    v.observed = get_real(vs[i], "observed", vpath, 0.0);
    v.bound = get_real(vs[i], "bound", vpath, 0.0);
    v.margin = get_real(vs[i], "margin", vpath, 0.0);
    v.parameter = get_real(vs[i], "parameter", vpath, 0.0);
    v.scenario = get<std::string>(vs[i], "scenario", vpath);
    r.violations.push_back(std::move(v));
  }
  r.fixed_set = get_points(j, "fixed_set", path);
  r.seed = get<std::uint64_t>(j, "seed", path);
  r.tolerances = tolerances_from_json(at(j, "tolerances", path), path + "/tolerances");
  return r;
}

}  // namespace

json to_json(const Witness& w) {
  return {{"indices", w.indices}, {"points", points_json(w.points)}, {"observed", real(w.observed)},
          {"bound", real(w.bound)}};
}

json to_json(const ClassificationReport& r) {
  json verdicts = json::object();
  for (const auto& [c, v] : r.verdicts) {
    json entry{{"status", to_string(v.status)}};
    if (v.witness) entry["witness"] = to_json(*v.witness);
    verdicts[std::string(to_string(c))] = entry;
  }
  return {{"verdicts", verdicts},
          {"alpha_hat", real(r.alpha_hat)},
          {"pair_alpha_hat", real(r.pair_alpha_hat)},
          {"n_points", r.n_points},
          {"n_triples_checked", r.n_triples_checked},
          {"n_pairs_checked", r.n_pairs_checked},
          {"exhaustive", r.exhaustive},
          {"fixed_points", points_json(r.fixed_points)},
          {"notes", r.notes}};
}

json to_json(const Period2Report& r) {
  json j{{"found", r.found}, {"displacement", real(r.displacement)}, {"fixed_gap", real(r.fixed_gap)}};
  if (r.witness) j["witness"] = point_json(*r.witness);
  return j;
}

json to_json(const SolveResult& r, bool include_trace) {
  json j{{"method", r.method},
         {"candidate", point_json(r.candidate)},
         {"residual", real(r.residual)},
         {"outer_iterations", r.outer_iterations},
         {"inner_iterations_total", r.inner_iterations_total},
         {"termination", to_string(r.termination)},
         {"bound_samples", r.bound_samples},
         {"decay_violations", r.decay_violations}};
  if (r.bound_scale) j["bound_scale"] = real(*r.bound_scale);
  if (include_trace) {
    json trace = json::array();
    for (const auto& e : r.trace)
      trace.push_back({{"index", e.index},
                       {"parameter", real(e.parameter)},
                       {"iterate", point_json(e.iterate)},
                       {"residual", real(e.residual)}});
    j["trace"] = std::move(trace);
  }
  return j;
}

json to_json(const SuiteReport& r) {
  json violations = json::array();
  for (const auto& v : r.violations)
    violations.push_back({{"indices", v.indices},
                          {"points", points_json(v.points)},
                          {"observed", real(v.observed)},
                          {"bound", real(v.bound)},
                          {"margin", real(v.margin)},
                          {"parameter", real(v.parameter)},
                          {"scenario", v.scenario}});
  return {{"suite_name", r.suite_name},
          {"n_cases", r.n_cases},
          {"n_violations", r.n_violations},
          {"worst_margin", real(r.worst_margin)},
          {"violations", violations},
          {"fixed_set", points_json(r.fixed_set)},
          {"seed", r.seed},
          {"tolerances", to_json(r.tolerances)},
          {"passed", r.passed()}};
}

json to_json(const RunReport& r) {
  json solves = json::array();
  for (const auto& s : r.solves) solves.push_back(to_json(s, r.include_trace));
  json suites = json::array();
  for (const auto& s : r.suites) suites.push_back(to_json(s));
  json j{{"schema_version", r.schema_version},
         {"scenario", r.scenario},
         {"scenario_spec", r.scenario_spec},
         {"tool_version", r.tool_version},
         {"command", r.command},
         {"generator", r.generator},
         {"seed", r.seed},
         {"solves", solves},
         {"suites", suites},
         {"include_trace", r.include_trace}};
  if (r.classification) j["classification"] = to_json(*r.classification);
  if (r.period2) j["period2"] = to_json(*r.period2);
  if (!r.wall_time.empty()) {
    json times = json::object();
    for (const auto& t : r.wall_time) times[t.phase] = t.seconds;
    j["wall_time"] = times;
  }
  return j;
}

RunReport run_report_from_json(const json& doc) {
  RunReport r;
  r.schema_version = get<std::string>(doc, "schema_version", "");
  if (r.schema_version != kSchemaVersion) schema_error("/schema_version", "unsupported schema version");
  r.scenario = get<std::string>(doc, "scenario", "");
  r.scenario_spec = at(doc, "scenario_spec", "");
  r.tool_version = get<std::string>(doc, "tool_version", "");
  r.command = get<std::vector<std::string>>(doc, "command", "");
  r.generator = get<std::string>(doc, "generator", "");
  r.seed = get<std::uint64_t>(doc, "seed", "");
  r.include_trace = get<bool>(doc, "include_trace", "");
  if (doc.contains("classification")) r.classification = classification_from(doc["classification"], "/classification");
  if (doc.contains("period2")) r.period2 = period2_from(doc["period2"], "/period2");
  const auto& solves = at(doc, "solves", "");
  for (std::size_t i = 0; i < solves.size(); ++i) r.solves.push_back(solve_from(solves[i], "/solves/" + std::to_string(i)));
  const auto& suites = at(doc, "suites", "");
  for (std::size_t i = 0; i < suites.size(); ++i) r.suites.push_back(suite_from(suites[i], "/suites/" + std::to_string(i)));
  if (doc.contains("wall_time"))
    for (const auto& [phase, secs] : doc["wall_time"].items()) r.wall_time.push_back({phase, secs.get<double>()});
  return r;
}

// ---------------------------------------------------------------------------
// CSV summary

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string point_cell(const Point& p) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < p.size(); ++i) s += (i ? " " : "") + num(p[i]);
  return s + ")";
}

std::string points_cell(const std::vector<Point>& ps) {
  std::string s;
  for (std::size_t i = 0; i < ps.size(); ++i) s += (i ? ";" : "") + point_cell(ps[i]);
  return s;
}

std::string indices_cell(const std::vector<std::size_t>& idx) {
  std::string s;
  for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? ";" : "") + std::to_string(idx[i]);
  return s;
}

std::string_view status_cell(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Holds: return "PASS";
    case VerdictStatus::Fails: return "FAIL";
    case VerdictStatus::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::string csv_summary(const RunReport& r) {
  std::ostringstream out;
  out << "# classification\n";
  out << "class,status,verdict,exhaustive,witness_indices,witness_points,observed,bound\n";
  if (r.classification) {
    for (const auto& [c, v] : r.classification->verdicts) {
      out << to_string(c) << ',' << status_cell(v.status) << ',' << to_string(v.status) << ','
          << (r.classification->exhaustive ? "true" : "false") << ',';
      if (v.witness)
        out << indices_cell(v.witness->indices) << ',' << points_cell(v.witness->points) << ','
            << num(v.witness->observed) << ',' << num(v.witness->bound);
      else
        out << ",,,";
      out << '\n';
    }
  }
  out << "# period2\n";
  out << "status,found,witness,displacement,fixed_gap\n";
  if (r.period2)
    out << (r.period2->found ? "FAIL" : "PASS") << ',' << (r.period2->found ? "true" : "false") << ','
        << (r.period2->witness ? point_cell(*r.period2->witness) : "") << ',' << num(r.period2->displacement) << ','
        << num(r.period2->fixed_gap) << '\n';
  out << "# solves\n";
  out << "method,status,termination,residual,outer_iterations,inner_iterations_total,candidate\n";
  for (const auto& s : r.solves)
    out << s.method << ',' << (s.termination == Termination::Converged ? "PASS" : "FAIL") << ','
        << to_string(s.termination) << ',' << num(s.residual) << ',' << s.outer_iterations << ','
        << s.inner_iterations_total << ',' << point_cell(s.candidate) << '\n';
  out << "# suites\n";
  out << "suite,status,n_cases,n_violations,worst_margin\n";
  for (const auto& s : r.suites)
    out << s.suite_name << ',' << (s.passed() ? "PASS" : "FAIL") << ',' << s.n_cases << ',' << s.n_violations << ','
        << num(s.worst_margin) << '\n';
  return out.str();
}

}  // namespace

std::string emit_report(const RunReport& report, ReportFormat format) {
  return format == ReportFormat::Json ? canonical_dump(to_json(report)) : csv_summary(report);
}

}  // namespace perimap
