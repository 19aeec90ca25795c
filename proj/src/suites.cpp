#include "perimap/suites.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace perimap {

namespace {

// stored counterexamples per suite; n_violations still counts all of them
constexpr std::size_t kMaxStoredViolations = 100;

template <class MakeViolation>
void record_case(SuiteReport& report, double observed, double bound, MakeViolation&& make) {
  ++report.n_cases;
  const double margin = bound - observed;
  report.worst_margin = std::min(report.worst_margin, margin);
  if (margin >= 0.0) return;
  ++report.n_violations;
  if (report.violations.size() < kMaxStoredViolations) {
    Violation v = make();
    v.observed = observed;
    v.bound = bound;
    v.margin = margin;
    report.violations.push_back(std::move(v));
  }
}

std::vector<Point> distinct_samples(const DomainSpec& K, const SamplerConfig& cfg, const Tolerances& tol) {
  auto pts = distinct_points(sample_points(K, cfg), K.norm, tol.eps_distinct);
  if (pts.size() < 3)
    throw Error(ErrorKind::InsufficientSpace, "need at least 3 distinct samples, got " + std::to_string(pts.size()));
  return pts;
}

void require_perimetric(const MappingPtr& T, const DomainSpec& K, const std::vector<Point>& pts,
                        const Tolerances& tol) {
  ClassifyOptions opts;
  opts.tol = tol;
  opts.solve_for_fixed_points = false;
  const auto report = classify_points(T, K, pts, false, opts);
  if (report.at(MapClass::PerimetricNonexpansive).status == VerdictStatus::Fails)
    throw Error(ErrorKind::PreconditionViolation, "mapping is not perimetric nonexpansive on the sample");
}

}  // namespace

SuiteReport suite_continuity(const MappingPtr& T, const DomainSpec& K, const SamplerConfig& cfg,
                             const Tolerances& tol) {
  const auto pts = distinct_samples(K, cfg, tol);
  require_perimetric(T, K, pts, tol);
  const auto tables = pair_tables(*T, K, pts, tol);
  const std::size_t n = pts.size();

  // two nearest neighbours of every sample, ties to the lower index
  std::vector<std::array<std::size_t, 2>> nearest(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t a = n, b = n;
    for (std::size_t m = 0; m < n; ++m) {
      if (m == j) continue;
      if (a == n || tables.input(j, m) < tables.input(j, a)) {
        b = a;
        a = m;
      } else if (b == n || tables.input(j, m) < tables.input(j, b)) {
        b = m;
      }
    }
    nearest[j] = {a, b};
  }

  SuiteReport report;
  report.suite_name = "continuity";
  report.seed = cfg.seed;
  report.tolerances = tol;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const std::size_t y = nearest[j][0] == i ? nearest[j][1] : nearest[j][0];
      const double observed = tables.output(i, j);
      const double bound = 2.0 * (tables.input(i, j) + tables.input(j, y)) + tol.tau_abs;
      record_case(report, observed, bound, [&] { return Violation{.indices = {i, j, y}, .points = {pts[i], pts[j], pts[y]}}; });
    }
  }
  return report;
}

SuiteReport suite_fixed_set_closed(const MappingPtr& T, const DomainSpec& K, const SamplerConfig& cfg,
                                   const Tolerances& tol) {
  SamplerConfig grid = cfg;
  grid.strategy = SampleStrategy::Grid;
  const auto pts = distinct_points(sample_points(K, grid), K.norm, tol.eps_distinct);
  const auto tables = pair_tables(*T, K, pts, tol);
  const std::size_t n = pts.size();

  SuiteReport report;
  report.suite_name = "closed-set";
  report.seed = cfg.seed;
  report.tolerances = tol;

  std::vector<double> res(n);
  std::vector<std::size_t> fixed;
  for (std::size_t i = 0; i < n; ++i) {
    res[i] = dist(tables.images[i], pts[i], K.norm);
    if (res[i] <= tol.tol_fix) {
      fixed.push_back(i);
      report.fixed_set.push_back(pts[i]);
    }
  }
  // grid step: the largest nearest-neighbour distance among the samples
  double h = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double nn = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) nn = std::min(nn, tables.input(i, j));
    if (std::isfinite(nn)) h = std::max(h, nn);
  }
  constexpr double kLipschitz = 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t near = n;
    for (auto f : fixed)
      if (tables.input(i, f) <= h * (1.0 + tol.tau_rel) && (near == n || tables.input(i, f) < tables.input(i, near)))
        near = f;
    if (near == n) continue;
    const double bound = tol.tol_fix + kLipschitz * h + tol.tau_abs;
    record_case(report, res[i], bound, [&] { return Violation{.indices = {i, near}, .points = {pts[i], pts[near]}}; });
  }
  return report;
}

SuiteReport suite_hierarchy(const std::vector<ClassifiedScenario>& scenarios, bool require_witness) {
  SuiteReport report;
  report.suite_name = "hierarchy";
  const double tau_rel = report.tolerances.tau_rel;
  bool witness = false;
  for (const auto& s : scenarios) {
    const auto nonexpansive = s.report.at(MapClass::Nonexpansive).status;
    const auto perimetric = s.report.at(MapClass::PerimetricNonexpansive).status;
    if (perimetric == VerdictStatus::Holds && nonexpansive == VerdictStatus::Fails) witness = true;
    if (nonexpansive != VerdictStatus::Holds) {
      ++report.n_cases;
      continue;
    }
    // a nonexpansive map keeps every triple ratio at most 1
    const double observed = perimetric == VerdictStatus::Fails ? std::max(s.report.alpha_hat, 1.0 + 2 * tau_rel)
                                                               : s.report.alpha_hat;
    record_case(report, observed, 1.0 + tau_rel, [&] {
      Violation v;
      v.scenario = s.name;
      if (const auto& w = s.report.at(MapClass::PerimetricNonexpansive).witness) {
        v.indices = w->indices;
        v.points = w->points;
      }
      return v;
    });
  }
  if (require_witness && !witness)
    throw Error(ErrorKind::SuiteConfigError,
                "no scenario is perimetric nonexpansive without being nonexpansive; the corpus lacks its witness");
  return report;
}

SuiteReport suite_scaling_law(const MappingPtr& T, const DomainSpec& K, const SamplerConfig& cfg,
                              const std::vector<double>& c_values, const Tolerances& tol) {
  compose_scaled(T, 1.0, K);  // origin and convexity preconditions
  const auto pts = distinct_samples(K, cfg, tol);
  require_perimetric(T, K, pts, tol);
  const std::size_t n = pts.size();

  SuiteReport report;
  report.suite_name = "scaling";
  report.seed = cfg.seed;
  report.tolerances = tol;
  for (double c : c_values) {
    const auto scaled = compose_scaled(T, c, K);
    const auto tables = pair_tables(*scaled, K, pts, tol);
    const double bound = c * (1.0 + tol.tau_rel);
    double alpha = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
          const double in = perimeter_of_sides(tables.input(i, j), tables.input(j, k), tables.input(k, i));
          const double out = perimeter_of_sides(tables.output(i, j), tables.output(j, k), tables.output(k, i));
          const double ratio = out < tol.eps_distinct ? 0.0 : out / in;
          alpha = std::max(alpha, ratio);
          record_case(report, ratio, bound, [&] {
            Violation v{.indices = {i, j, k}, .points = {pts[i], pts[j], pts[k]}};
            v.parameter = c;
            return v;
          });
        }
      }
    }
    record_case(report, alpha, c + tol.tau_rel, [&] {
      Violation v;
      v.parameter = c;
      return v;
    });
  }
  return report;
}

}  // namespace perimap
