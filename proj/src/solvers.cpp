#include "perimap/solvers.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>

#include "perimap/sampling.hpp"

namespace perimap {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "CONVERGED";
    case Termination::ResidualFloor: return "RESIDUAL_FLOOR";
    case Termination::MaxIter: return "MAX_ITER";
    case Termination::Period2Obstruction: return "PERIOD2_OBSTRUCTION";
    case Termination::Diverged: return "DIVERGED";
  }
  return "?";
}

std::string_view to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::Harmonic: return "HARMONIC";
    case ScheduleKind::Geometric: return "GEOMETRIC";
    case ScheduleKind::Explicit: return "EXPLICIT";
  }
  return "?";
}

double ScheduleSpec::at(std::size_t n) const {
  switch (kind) {
    case ScheduleKind::Harmonic: return 1.0 - 1.0 / double(n);
    case ScheduleKind::Geometric: return 1.0 - std::pow(rho, double(n));
    case ScheduleKind::Explicit: return values.at(n - 1);
  }
  return 0.0;
}

void ScheduleSpec::validate() const {
  switch (kind) {
    case ScheduleKind::Harmonic:
      if (n_max < 2) throw Error(ErrorKind::InvalidSpec, "harmonic schedule needs n_max >= 2");
      break;
    case ScheduleKind::Geometric:
      if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorKind::InvalidSpec, "geometric schedule needs rho in (0,1)");
      if (n_max < 1) throw Error(ErrorKind::InvalidSpec, "geometric schedule needs n_max >= 1");
      if (!(at(n_max) < 1.0))
        throw Error(ErrorKind::InvalidSpec, "geometric schedule reaches t_n = 1 in double precision before n_max");
      break;
    case ScheduleKind::Explicit:
      if (values.empty()) throw Error(ErrorKind::InvalidSpec, "explicit schedule is empty");
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0 && values[i] < 1.0))
          throw Error(ErrorKind::InvalidSpec, "schedule value " + std::to_string(i) + " outside (0,1)");
        if (i > 0 && values[i] < values[i - 1])
          throw Error(ErrorKind::InvalidSpec, "schedule values must be nondecreasing");
      }
      break;
  }
}

std::size_t harmonic_stages_for(double r, double tol) {
  const double n = std::ceil(r / tol) + 1.0;
  return std::size_t(std::clamp(n, 1e4, 1e7));
}

double residual(const MappingSpec& T, const Point& x, const NormSpec& norm, const Tolerances& tol) {
  return dist(evaluate(T, x, tol), x, norm);
}

namespace {

/// Stagnant residual: relative spread below 1e-3 over the last quarter.
bool residual_floor(const std::vector<double>& history) {
  if (history.size() < 4) return false;
  const auto from = history.end() - std::ptrdiff_t(std::max<std::size_t>(2, history.size() / 4));
  const auto [lo, hi] = std::minmax_element(from, history.end());
  const double scale = std::max(std::abs(*hi), std::numeric_limits<double>::min());
  return (*hi - *lo) / scale < 1e-3;
}

bool record_stage(std::size_t i, std::size_t dense) {
  if (i < dense) return true;
  const std::size_t stride = std::max<std::size_t>(1, std::bit_floor(i) / std::max<std::size_t>(dense, 1));
  return i % stride == 0;
}

std::size_t default_inner_budget(double t, double inner_tol) {
  if (t <= 0.0) return 10;
  const double steps = std::ceil(std::log(inner_tol) / std::log(t));
  return std::size_t(std::clamp(10.0 * steps, 10.0, 1e6));
}

void require_start(const DomainSpec& K, const Point& x0, const Tolerances& tol) {
  if (x0.size() != K.dimension()) throw Error(ErrorKind::InvalidSpec, "start point has the wrong dimension");
  if (!x0.allFinite()) throw Error(ErrorKind::InvalidSpec, "start point is not finite");
  if (!contains(K, x0, tol.tau_abs)) throw Error(ErrorKind::DomainViolation, "start point lies outside the domain");
}

}  // namespace

SolveResult picard_solve(const MappingSpec& T, const DomainSpec& K, const Point& x0, const PicardParams& params,
                         const Tolerances& tol) {
  require_start(K, x0, tol);
  if (params.alpha_hint && !(*params.alpha_hint >= 0.0 && *params.alpha_hint <= 1.0))
    throw Error(ErrorKind::InvalidSpec, "alpha hint must lie in [0,1]");

  SolveResult out;
  out.method = "picard";
  const auto& norm = K.norm;
  Point x = x0, fx(x0.size()), prev1, prev2;
  int history_len = 0;  // number of valid entries among prev1, prev2
  std::vector<double> history;
  Point best = x0;
  double best_res = std::numeric_limits<double>::infinity();
  double last_perimeter = -1.0;

  for (std::size_t k = 0; k < params.max_iter; ++k) {
    evaluate_into(T, x, fx, tol);
    out.outer_iterations = k + 1;
    if (!fx.allFinite() || fx.lpNorm<Eigen::Infinity>() > 1e300) {
      out.termination = Termination::Diverged;
      out.candidate = best;
      out.residual = best_res;
      return out;
    }
    const double r = dist(fx, x, norm);
    if (params.record_trace) out.trace.push_back({k, 0.0, x, r});
    history.push_back(r);
    if (r < best_res) {
      best_res = r;
      best = x;
    }
    if (r <= params.tol_fix) {
      out.termination = Termination::Converged;
      out.candidate = x;
      out.residual = r;
      return out;
    }
    if (!contains(K, fx, tol.tau_abs))
      throw Error(ErrorKind::DomainViolation, "iterate " + std::to_string(k + 1) + " left the domain");

    if (history_len >= 1) {
      const double p_next = perimeter(prev1, x, fx, norm);
      if (params.alpha_hint && history_len >= 2 && last_perimeter >= 0.0) {
        const double gap = std::min({dist(prev1, x, norm), r, dist(fx, prev1, norm)});
        if (gap > tol.eps_distinct && p_next > *params.alpha_hint * last_perimeter + tol.tau_abs)
          ++out.decay_violations;
      }
      // period 2: x_{k+1} returns to x_{k-1} while x_k stays away and the
      // orbit-triple perimeter has stopped shrinking
      if (history_len >= 2) {
        const bool stalled = p_next >= last_perimeter * (1.0 - tol.tau_rel);
        if (stalled && dist(fx, prev1, norm) <= params.tol_fix && dist(x, prev1, norm) > params.tol_fix) {
          out.termination = Termination::Period2Obstruction;
          out.candidate = prev1;
          out.residual = dist(x, prev1, norm);
          return out;
        }
      }
      last_perimeter = p_next;
    }
    prev2.swap(prev1);
    prev1.swap(x);
    x.swap(fx);
    history_len = std::min(history_len + 1, 2);
  }
  out.termination = residual_floor(history) ? Termination::ResidualFloor : Termination::MaxIter;
  out.candidate = best;
  out.residual = best_res;
  return out;
}

namespace {

// stage_of(t, Tx, out) writes the stage map at x given Tx; stage_affine(t, T, M, c)
// writes M = I - A_t and c = b_t for an affine T; make_stage(t) builds the
// stage map for the iterative fallback. D fixes the size of the stage
// system for small dimensions.
template <int D, class StageOf, class StageAffine, class MakeStage>
SolveResult run_stages_fixed(const char* method, const MappingSpec& T, const DomainSpec& K, Point x,
                             const StagedParams& p, const Tolerances& tol, StageOf stage_of,
                             StageAffine stage_affine, MakeStage make_stage) {
  SolveResult out;
  out.method = method;
  const auto form = p.inner == InnerSolver::Auto ? affine_form(T) : std::nullopt;
  const std::size_t first = p.schedule.first_index(), last = p.schedule.last_index();
  std::vector<double> history;
  double res = residual(T, x, K.norm, tol);
  const Eigen::Index d = x.size();
  Point tx(d), sx(d), solved(d);
  Eigen::Matrix<double, D, 1> c(d);
  Eigen::Matrix<double, D, D> M(d, d);
  Eigen::PartialPivLU<Eigen::Matrix<double, D, D>> lu(d);
  out.trace.reserve(std::min<std::size_t>({p.dense_trace, last - first + 1, std::size_t(1) << 22}));

  for (std::size_t n = first; n <= last; ++n) {
    const double t = p.schedule.at(n);
    bool certified = false;
    if (form) {
      stage_affine(t, *form, M, c);
      lu.compute(M);
      solved = lu.solve(c);
      if (solved.allFinite() && contains(K, solved, tol.tau_abs)) {
        x = solved;
        evaluate_into(T, x, tx, tol);
        stage_of(t, tx, sx);
        ++out.inner_iterations_total;
        certified = dist(sx, x, K.norm) <= p.inner_tol;
      }
    }
    out.outer_iterations = n - first + 1;
    if (!certified) {
      PicardParams inner_params;
      inner_params.alpha_hint = t;
      inner_params.tol_fix = p.inner_tol;
      inner_params.max_iter = p.max_inner ? p.max_inner : default_inner_budget(t, p.inner_tol);
      inner_params.record_trace = false;
      const SolveResult inner = picard_solve(*make_stage(t), K, x, inner_params, tol);
      out.inner_iterations_total += inner.outer_iterations;
      x = inner.candidate;
      if (inner.termination == Termination::Diverged) {
        out.termination = Termination::Diverged;
        out.candidate = x;
        out.residual = std::numeric_limits<double>::infinity();
        return out;
      }
      evaluate_into(T, x, tx, tol);
    }
    res = dist(tx, x, K.norm);
    history.push_back(res);
    const bool done = res <= p.tol_fix;
    if (done || n == last || record_stage(n - first, p.dense_trace)) out.trace.push_back({n, t, x, res});
    if (done) {
      out.termination = Termination::Converged;
      out.candidate = x;
      out.residual = res;
      return out;
    }
  }
  out.termination = residual_floor(history) ? Termination::ResidualFloor : Termination::MaxIter;
  out.candidate = x;
  out.residual = res;
  return out;
}

template <class... Args>
SolveResult run_stages(const char* method, const MappingSpec& T, const DomainSpec& K, Point x,
                       const StagedParams& p, Args&&... args) {
  p.schedule.validate();
  switch (x.size()) {
    case 1: return run_stages_fixed<1>(method, T, K, std::move(x), p, std::forward<Args>(args)...);
    case 2: return run_stages_fixed<2>(method, T, K, std::move(x), p, std::forward<Args>(args)...);
    case 3: return run_stages_fixed<3>(method, T, K, std::move(x), p, std::forward<Args>(args)...);
    default: return run_stages_fixed<Eigen::Dynamic>(method, T, K, std::move(x), p, std::forward<Args>(args)...);
  }
}

void require_convex_bounded(const DomainSpec& K) {
  if (!is_convex(K)) throw Error(ErrorKind::PreconditionViolation, "domain is not convex");
  if (!is_bounded(K)) throw Error(ErrorKind::PreconditionViolation, "domain is not bounded");
}

}  // namespace

BoundScale damped_bound_scale(const MappingSpec& T, const DomainSpec& K, std::size_t n_samples,
                              const Tolerances& tol) {
  const auto samples = sample_points(K, {0, n_samples, SampleStrategy::Grid});
  double r = 0.0;
  for (const auto& s : samples) r = std::max(r, norm(evaluate(T, s, tol), K.norm));
  return {1.1 * r, samples.size()};
}

BoundScale anchored_bound_scale(const MappingSpec& T, const DomainSpec& K, const Point& x0, std::size_t n_samples,
                                const Tolerances& tol) {
  const auto samples = sample_points(K, {0, n_samples, SampleStrategy::Grid});
  double r = 0.0;
  for (const auto& s : samples) r = std::max(r, dist(evaluate(T, s, tol), x0, K.norm));
  return {1.1 * r, samples.size()};
}

SolveResult damped_solve(const MappingPtr& T, const DomainSpec& K, const StagedParams& params,
                         const Tolerances& tol) {
  require_convex_bounded(K);
  if (!contains_origin(K)) throw Error(ErrorKind::PreconditionViolation, "domain does not contain the origin");
  const Point start = params.start.value_or(Point::Zero(K.dimension()));
  require_start(K, start, tol);

  const auto [r, n_samples] = damped_bound_scale(*T, K, params.bound_samples, tol);
  compose_scaled(T, 1.0, K);  // precondition check only
  auto out = run_stages(
      "damped", *T, K, start, params, tol, [](double t, const Point& tx, Point& sx) { sx = t * tx; },
      [](double t, const AffineForm& f, auto& M, auto& c) {
        M.setIdentity();
        M -= t * f.matrix;
        c = t * f.offset;
      },
      [&](double t) { return make_mapping(Scaled{t, T}); });
  out.bound_scale = r;
  out.bound_samples = n_samples;
  return out;
}

SolveResult anchored_solve(const MappingPtr& T, const DomainSpec& K, const Point& x0, const StagedParams& params,
                           const Tolerances& tol) {
  require_convex_bounded(K);
  if (x0.size() != K.dimension() || !contains(K, x0, tol.tau_abs))
    throw Error(ErrorKind::PreconditionViolation, "anchor lies outside the domain");

  const auto [r, n_samples] = anchored_bound_scale(*T, K, x0, params.bound_samples, tol);
  auto out = run_stages(
      "anchored", *T, K, x0, params, tol,
      [&](double s, const Point& tx, Point& sx) { sx = (1.0 - s) * x0 + s * tx; },
      [&](double s, const AffineForm& f, auto& M, auto& c) {
        M.setIdentity();
        M -= s * f.matrix;
        c = (1.0 - s) * x0 + s * f.offset;
      },
      [&](double s) { return make_mapping(Anchored{x0, s, T}); });
  out.bound_scale = r;
  out.bound_samples = n_samples;
  return out;
}

SolveResult orbit_solve(const MappingSpec& T, const DomainSpec& K, const Point& x0, const OrbitParams& params,
                        const Tolerances& tol) {
  require_start(K, x0, tol);
  SolveResult out;
  out.method = "orbit";
  std::deque<Point> window;
  Point x = x0, fx(x0.size());
  Point best = x0;
  double best_res = std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < params.max_iter; ++k) {
    evaluate_into(T, x, fx, tol);
    out.outer_iterations = k + 1;
    if (!fx.allFinite() || fx.lpNorm<Eigen::Infinity>() > 1e300) {
      out.termination = Termination::Diverged;
      out.candidate = best;
      out.residual = best_res;
      return out;
    }
    const double r = dist(fx, x, K.norm);
    if (params.record_trace) out.trace.push_back({k, 0.0, x, r});
    if (r < best_res) {
      best_res = r;
      best = x;
    }
    if (r <= params.tol_fix) {
      out.termination = Termination::Converged;
      out.candidate = x;
      out.residual = r;
      return out;
    }
    // a return to an earlier iterate, with a gap negligible next to the
    // residual, means the orbit sits on a cycle that iteration only repeats;
    // lag 2 is the prime-period-2 obstruction. Slowly converging orbits
    // return with a gap proportional to the residual and are left alone.
    for (std::size_t lag = 2; lag <= window.size(); ++lag) {
      const double gap = dist(x, window[window.size() - lag], K.norm);
      if (gap > params.tol_fix || gap > tol.tau_rel * r) continue;
      out.termination = lag == 2 ? Termination::Period2Obstruction : Termination::MaxIter;
      out.candidate = best;
      out.residual = best_res;
      return out;
    }
    window.push_back(x);
    if (window.size() > params.cluster_window) window.pop_front();
    if (!contains(K, fx, tol.tau_abs))
      throw Error(ErrorKind::DomainViolation, "iterate " + std::to_string(k + 1) + " left the domain");
    x.swap(fx);
  }
  out.termination = Termination::MaxIter;
  out.candidate = best;
  out.residual = best_res;
  return out;
}

std::size_t best_of(const std::vector<SolveResult>& results) {
  if (results.empty()) throw Error(ErrorKind::InsufficientData, "no solve results to reduce");
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].residual < results[best].residual) best = i;
  return best;
}

std::vector<Point> distinct_limits(const std::vector<SolveResult>& results, const NormSpec& norm, double radius) {
  std::vector<Point> out;
  for (const auto& r : results) {
    if (r.termination != Termination::Converged) continue;
    const bool seen = std::any_of(out.begin(), out.end(), [&](const Point& p) { return dist(p, r.candidate, norm) <= radius; });
    if (!seen) out.push_back(r.candidate);
  }
  return out;
}

}  // namespace perimap
