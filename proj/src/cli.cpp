#include "perimap/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "perimap/report.hpp"

namespace perimap {

namespace {

struct Options {
  std::string scenario_path;
  std::string out_path;
  bool timings = false;
  std::optional<std::uint64_t> seed;

  // classify
  bool exhaustive = false;
  // solve / detect-period2
  std::string method;
  std::optional<double> tol;
  std::string schedule;
  std::optional<std::size_t> n_max;
  std::optional<std::size_t> max_iter;
  bool trace = false;
  // verify
  std::string suite;
  std::vector<double> c_values{0.0, 0.5, 0.9, 0.99};
  // report
  std::string format = "json";
};

class Stopwatch {
 public:
  explicit Stopwatch(RunReport& report, bool enabled, std::string phase)
      : report_(report), enabled_(enabled), phase_(std::move(phase)), start_(std::chrono::steady_clock::now()) {}
  ~Stopwatch() {
    if (!enabled_) return;
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start_;
    report_.wall_time.push_back({phase_, dt.count()});
  }

 private:
  RunReport& report_;
  bool enabled_;
  std::string phase_;
  std::chrono::steady_clock::time_point start_;
};

std::uint64_t parse_seed(const std::string& text) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used, 10);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-')
    throw Error(ErrorKind::InvalidSpec, "PERIMAP_SEED must be a nonnegative integer, got '" + text + "'");
  return v;
}

ScheduleSpec parse_schedule_flag(const std::string& text) {
  ScheduleSpec s;
  if (text == "harmonic") {
    s.kind = ScheduleKind::Harmonic;
  } else if (text.rfind("geometric:", 0) == 0) {
    s.kind = ScheduleKind::Geometric;
    try {
      std::size_t used = 0;
      const std::string rho = text.substr(10);
      s.rho = std::stod(rho, &used);
      if (used != rho.size()) throw std::invalid_argument(rho);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidSpec, "bad --schedule value '" + text + "'");
    }
  } else {
    throw Error(ErrorKind::InvalidSpec, "--schedule must be harmonic or geometric:RHO");
  }
  return s;
}

/// Loads the scenario and applies the seed precedence: --seed, then
/// PERIMAP_SEED, then the scenario file.
Scenario load(const Options& o) {
  Scenario s = load_scenario(o.scenario_path);
  if (const char* env = std::getenv("PERIMAP_SEED"); env && *env) s.sampler.seed = parse_seed(env);
  if (o.seed) s.sampler.seed = *o.seed;
  return s;
}

RunReport start_report(const Scenario& s, const std::vector<std::string>& command) {
  RunReport r;
  r.scenario = s.name;
  r.scenario_spec = to_json(s);
  r.command = command;
  r.seed = s.sampler.seed;
  return r;
}

int classify_cmd(const Options& o, RunReport& report, const Scenario& s) {
  Stopwatch sw(report, o.timings, "classify");
  ClassifyOptions opts;
  opts.tol = s.tolerances;
  opts.exhaustive = o.exhaustive;
  report.classification = classify(s.mapping, s.domain, s.sampler, opts);
  return report.classification->at(MapClass::PerimetricNonexpansive).status == VerdictStatus::Fails ? kExitFinding
                                                                                                   : kExitOk;
}

int detect_cmd(const Options& o, RunReport& report, const Scenario& s) {
  Stopwatch sw(report, o.timings, "detect-period2");
  report.period2 = detect_period2(*s.mapping, s.domain, s.sampler, o.tol.value_or(s.tolerances.tol_fix), s.tolerances);
  return report.period2->found ? kExitFinding : kExitOk;
}

int solve_cmd(const Options& o, RunReport& report, const Scenario& s) {
  Stopwatch sw(report, o.timings, "solve");
  const double tol_fix = o.tol.value_or(s.tolerances.tol_fix);
  report.include_trace = o.trace;
  SolveResult result;
  if (o.method == "picard") {
    PicardParams p;
    p.tol_fix = tol_fix;
    if (o.max_iter) p.max_iter = *o.max_iter;
    p.record_trace = o.trace;
    result = picard_solve(*s.mapping, s.domain, s.start_point(), p, s.tolerances);
  } else if (o.method == "orbit") {
    OrbitParams p;
    p.tol_fix = tol_fix;
    if (o.max_iter) p.max_iter = *o.max_iter;
    p.record_trace = o.trace;
    result = orbit_solve(*s.mapping, s.domain, s.start_point(), p, s.tolerances);
  } else {
    StagedParams p;
    p.tol_fix = tol_fix;
    p.inner_tol = s.tolerances.inner_tol;
    const bool damped = o.method == "damped";
    if (damped) p.start = s.start;
    const Point x0 = s.start_point();
    if (!o.schedule.empty()) p.schedule = parse_schedule_flag(o.schedule);
    else if (s.schedule) p.schedule = *s.schedule;
    if (o.n_max) {
      p.schedule.n_max = *o.n_max;
    } else if (o.schedule.empty() && !s.schedule && p.schedule.kind == ScheduleKind::Harmonic) {
      // enough stages for the residual bound r / n to reach tol_fix
      const auto bound = damped ? damped_bound_scale(*s.mapping, s.domain, p.bound_samples, s.tolerances)
                                : anchored_bound_scale(*s.mapping, s.domain, x0, p.bound_samples, s.tolerances);
      p.schedule.n_max = harmonic_stages_for(bound.r, tol_fix);
    }
    result = damped ? damped_solve(s.mapping, s.domain, p, s.tolerances)
                    : anchored_solve(s.mapping, s.domain, x0, p, s.tolerances);
  }
  const bool converged = result.termination == Termination::Converged;
  report.solves.push_back(std::move(result));
  return converged ? kExitOk : kExitFinding;
}

int verify_cmd(const Options& o, RunReport& report, const Scenario& s) {
  Stopwatch sw(report, o.timings, "verify");
  SuiteReport suite;
  if (o.suite == "continuity") {
    suite = suite_continuity(s.mapping, s.domain, s.sampler, s.tolerances);
  } else if (o.suite == "closed-set") {
    suite = suite_fixed_set_closed(s.mapping, s.domain, s.sampler, s.tolerances);
  } else if (o.suite == "scaling") {
    suite = suite_scaling_law(s.mapping, s.domain, s.sampler, o.c_values, s.tolerances);
  } else {
    // the scenario under test is audited together with the bundled corpus
    std::vector<ClassifiedScenario> classified;
    auto add = [&](const Scenario& sc) {
      for (const auto& c : classified)
        if (c.name == sc.name) return;
      ClassifyOptions opts;
      opts.tol = sc.tolerances;
      classified.push_back({sc.name, classify(sc.mapping, sc.domain, sc.sampler, opts)});
    };
    add(s);
    for (const auto& sc : corpus()) add(sc);
    suite = suite_hierarchy(classified);
  }
  suite.seed = s.sampler.seed;
  const bool passed = suite.passed();
  report.suites.push_back(std::move(suite));
  return passed ? kExitOk : kExitFinding;
}

void write_output(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.out_path, std::ios::binary);
  if (!file) throw Error(ErrorKind::InvalidSpec, "cannot write " + o.out_path);
  file << text;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Audit self-maps for perimeter-based nonexpansiveness and search for their fixed points.", "perimap"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  auto scenario_cmd = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("scenario", o.scenario_path, "Scenario JSON file")->required();
    sub->add_option("--out", o.out_path, "Write the report to FILE instead of stdout");
    sub->add_option("--seed", o.seed, "Sampler seed (overrides PERIMAP_SEED and the scenario)");
    sub->add_flag("--timings", o.timings, "Record wall time per phase in the report");
    return sub;
  };

  auto* classify_sub = scenario_cmd("classify", "Audit the mapping against every class");
  classify_sub->add_flag("--exhaustive", o.exhaustive, "Audit the whole sampling lattice as the space under test");

  auto* solve_sub = scenario_cmd("solve", "Search for a fixed point");
  solve_sub->add_option("--method", o.method, "Iteration scheme")
      ->required()
      ->check(CLI::IsMember({"picard", "damped", "anchored", "orbit"}));
  solve_sub->add_option("--tol", o.tol, "Residual tolerance for convergence")->check(CLI::PositiveNumber);
  solve_sub->add_option("--schedule", o.schedule, "harmonic or geometric:RHO");
  solve_sub->add_option("--n-max", o.n_max, "Number of stages for the damped and anchored schemes");
  solve_sub->add_option("--max-iter", o.max_iter, "Iteration budget for picard and orbit");
  solve_sub->add_flag("--trace", o.trace, "Include the iterate trace in the report");

  auto* detect_sub = scenario_cmd("detect-period2", "Look for a point of prime period 2");
  detect_sub->add_option("--tol", o.tol, "Fixed-point tolerance")->check(CLI::NonNegativeNumber);

  auto* verify_sub = scenario_cmd("verify", "Run a property suite");
  verify_sub->add_option("--suite", o.suite, "Suite name")
      ->required()
      ->check(CLI::IsMember({"continuity", "closed-set", "hierarchy", "scaling"}));
  verify_sub->add_option("--c", o.c_values, "Scaling factors for the scaling suite")
      ->check(CLI::Range(0.0, 1.0))
      ->delimiter(',');

  auto* corpus_sub = app.add_subcommand("corpus", "Write the bundled example scenarios");
  std::string corpus_dir;
  corpus_sub->add_option("--out", corpus_dir, "Target directory")->required();

  auto* report_sub = app.add_subcommand("report", "Re-emit a saved run report");
  std::string report_path;
  report_sub->add_option("run", report_path, "Report JSON written by a previous run")->required();
  report_sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  report_sub->add_option("--out", o.out_path, "Write to FILE instead of stdout");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (corpus_sub->parsed()) {
      for (const auto& path : write_corpus(corpus_dir)) out << path.string() << '\n';
      return kExitOk;
    }
    if (report_sub->parsed()) {
      std::ifstream in(report_path, std::ios::binary);
      if (!in) throw Error(ErrorKind::ParseError, "cannot read " + report_path);
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::ParseError, e.what(), "/");
      }
      const RunReport report = run_report_from_json(doc);
      write_output(o, emit_report(report, o.format == "csv" ? ReportFormat::CsvSummary : ReportFormat::Json), out);
      return kExitOk;
    }

    const Scenario s = load(o);
    auto* sub = app.get_subcommands().front();
    std::vector<std::string> command{sub->get_name()};
    // the scenario is embedded in full; the output path does not affect results
    for (std::size_t i = 0; i < args.size(); ++i) {
      const auto& a = args[i];
      if (a == "--out") ++i;
      else if (a.rfind("--out=", 0) == 0 || a == o.scenario_path || a == sub->get_name()) continue;
      else command.push_back(a);
    }
    RunReport report = start_report(s, command);

    int code = kExitOk;
    if (sub == classify_sub) code = classify_cmd(o, report, s);
    else if (sub == solve_sub) code = solve_cmd(o, report, s);
    else if (sub == detect_sub) code = detect_cmd(o, report, s);
    else code = verify_cmd(o, report, s);

    write_output(o, emit_report(report, ReportFormat::Json), out);
    return code;
  } catch (const Error& e) {
    err << "perimap: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "perimap: internal error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace perimap
