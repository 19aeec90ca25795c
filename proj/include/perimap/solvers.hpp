#pragma once

// Fixed-point schemes: plain Picard iteration, the damped scheme
// x -> t_n T x, the anchored scheme x -> (1 - s_n) x0 + s_n T x, and orbit
// cluster search.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "perimap/mapping.hpp"

namespace perimap {

enum class Termination { Converged, ResidualFloor, MaxIter, Period2Obstruction, Diverged };

std::string_view to_string(Termination t);

enum class ScheduleKind { Harmonic, Geometric, Explicit };

std::string_view to_string(ScheduleKind k);

/// Parameters t_n in (0, 1), nondecreasing.
///   HARMONIC:  t_n = 1 - 1/n,   n = 2, ..., n_max
///   GEOMETRIC: t_n = 1 - rho^n, n = 1, ..., n_max
///   EXPLICIT:  t_n = values[n-1]
struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::Harmonic;
  double rho = 0.5;
  std::vector<double> values;
  std::size_t n_max = 10000;

  /// Stage indices run from first_index() to last_index() inclusive.
  std::size_t first_index() const { return kind == ScheduleKind::Harmonic ? 2 : 1; }
  std::size_t last_index() const { return kind == ScheduleKind::Explicit ? values.size() : n_max; }
  double at(std::size_t n) const;
  void validate() const;

  bool operator==(const ScheduleSpec&) const = default;
};

/// Smallest HARMONIC n_max for which the residual bound r(1 - t_n) drops to
/// `tol`, clamped to [1e4, 1e7].
std::size_t harmonic_stages_for(double r, double tol);

struct TraceEntry {
  std::size_t index = 0;     // iteration (Picard/orbit) or stage n (damped/anchored)
  double parameter = 0.0;    // t_n or s_n for staged schemes, 0 otherwise
  Point iterate;
  double residual = 0.0;     // |T(iterate) - iterate|
};

struct SolveResult {
  std::string method;
  Point candidate;
  double residual = 0.0;
  std::size_t outer_iterations = 0;
  std::size_t inner_iterations_total = 0;
  Termination termination = Termination::MaxIter;
  std::vector<TraceEntry> trace;
  /// Staged schemes: the scale r of the residual bound r(1 - t_n) and the
  /// number of sampled points it was estimated from.
  std::optional<double> bound_scale;
  std::size_t bound_samples = 0;
  /// Picard with an alpha hint: orbit triples whose perimeter failed to
  /// shrink by the hinted factor, p_{k+1} > alpha * p_k + tau_abs.
  std::size_t decay_violations = 0;
};

double residual(const MappingSpec& T, const Point& x, const NormSpec& norm, const Tolerances& tol = {});

struct PicardParams {
  std::optional<double> alpha_hint;  // contraction factor estimate in [0, 1)
  double tol_fix = 1e-9;
  std::size_t max_iter = 10000;
  bool record_trace = true;
};

SolveResult picard_solve(const MappingSpec& T, const DomainSpec& K, const Point& x0, const PicardParams& params,
                         const Tolerances& tol = {});

/// How each stage fixed point is found. Auto solves (I - A_n) x = b_n
/// exactly when the stage map is affine and accepts the result if its stage
/// residual is within inner_tol, falling back to a warm-started Picard run;
/// with Picard every stage is iterated.
enum class InnerSolver { Auto, Picard };

struct StagedParams {
  ScheduleSpec schedule;
  double tol_fix = 1e-9;
  double inner_tol = 1e-12;
  std::size_t max_inner = 0;  // 0: 10 * ceil(log(inner_tol) / log(t_n)), capped at 1e6
  std::optional<Point> start; // damped only; defaults to the origin
  std::size_t dense_trace = 1024;  // stages recorded densely before thinning
  std::size_t bound_samples = 4096;
  InnerSolver inner = InnerSolver::Auto;
};

/// Scale r of the residual bound |T x_n - x_n| <= r (1 - t_n): the largest
/// |T x| (damped) or |T x - x0| (anchored) over grid samples, inflated by 10%.
struct BoundScale {
  double r = 0.0;
  std::size_t samples = 0;
};

BoundScale damped_bound_scale(const MappingSpec& T, const DomainSpec& K, std::size_t n_samples,
                              const Tolerances& tol = {});
BoundScale anchored_bound_scale(const MappingSpec& T, const DomainSpec& K, const Point& x0, std::size_t n_samples,
                                const Tolerances& tol = {});

/// Damped scheme on a convex bounded K containing the origin.
SolveResult damped_solve(const MappingPtr& T, const DomainSpec& K, const StagedParams& params,
                         const Tolerances& tol = {});

/// Anchored scheme on a convex bounded K containing x0.
SolveResult anchored_solve(const MappingPtr& T, const DomainSpec& K, const Point& x0, const StagedParams& params,
                           const Tolerances& tol = {});

struct OrbitParams {
  double tol_fix = 1e-9;
  std::size_t max_iter = 100000;
  std::size_t cluster_window = 8;
  bool record_trace = true;
};

SolveResult orbit_solve(const MappingSpec& T, const DomainSpec& K, const Point& x0, const OrbitParams& params,
                        const Tolerances& tol = {});

/// Lowest residual wins; ties go to the earliest start.
std::size_t best_of(const std::vector<SolveResult>& results);

/// Candidates of converged results, deduplicated within `radius`.
std::vector<Point> distinct_limits(const std::vector<SolveResult>& results, const NormSpec& norm, double radius);

}  // namespace perimap
