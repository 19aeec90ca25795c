#pragma once

// Desk-scale property suites for the checkable consequences of perimetric
// nonexpansiveness: the pairwise continuity bound, closedness of the fixed
// set, the class hierarchy, and the scaling law of T -> c T.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "perimap/classifier.hpp"

namespace perimap {

/// A single failed case with enough metadata to re-run it standalone.
struct Violation {
  std::vector<std::size_t> indices{};  // sample indices
  std::vector<Point> points{};
  double observed = 0.0;
  double bound = 0.0;
  double margin = 0.0;     // bound - observed, negative
  double parameter = 0.0;  // scaling factor c for the scaling suite
  std::string scenario{};  // hierarchy suite
};

struct SuiteReport {
  std::string suite_name;
  std::size_t n_cases = 0;
  std::size_t n_violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();  // +inf when there were no cases
  std::vector<Violation> violations;
  std::vector<Point> fixed_set;  // closed-set suite only
  std::uint64_t seed = 0;
  Tolerances tolerances;

  bool passed() const { return n_violations == 0; }
};

/// |Tx - Tx*| <= 2(|x - x*| + |x* - y|) + tau_abs for every ordered sample
/// pair (x, x*), with y the sample nearest to x* other than x and x*.
SuiteReport suite_continuity(const MappingPtr& T, const DomainSpec& K, const SamplerConfig& cfg,
                             const Tolerances& tol = {});

/// Discrete fixed set F on the grid samples, and the surrogate
/// residual(x) <= tol_fix + 2h for every sample within the grid step h of F.
SuiteReport suite_fixed_set_closed(const MappingPtr& T, const DomainSpec& K, const SamplerConfig& cfg,
                                   const Tolerances& tol = {});

struct ClassifiedScenario {
  std::string name;
  ClassificationReport report;
};

/// (a) no exhaustive NONEXPANSIVE=HOLDS with PERIMETRIC_NONEXPANSIVE=FAILS;
/// (b) when `require_witness`, some scenario is perimetric nonexpansive but
/// not nonexpansive.
SuiteReport suite_hierarchy(const std::vector<ClassifiedScenario>& scenarios, bool require_witness = true);

/// For every c, every triple ratio of c T is <= c (1 + tau_rel) and its
/// alpha estimate is <= c + tau_rel.
SuiteReport suite_scaling_law(const MappingPtr& T, const DomainSpec& K, const SamplerConfig& cfg,
                              const std::vector<double>& c_values, const Tolerances& tol = {});

}  // namespace perimap
