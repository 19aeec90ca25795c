#include <doctest.h>

#include <cmath>

#include "perimap/scenario.hpp"
#include "perimap/solvers.hpp"

using namespace perimap;

namespace {

Point pt(double a, double b) { return Eigen::Vector2d(a, b); }

const DomainSpec kBox{Box{pt(0, 0), pt(1, 1), {21, 21}}, NormSpec::l1()};
const MappingPtr kReflect = make_mapping(Affine{-Eigen::MatrixXd::Identity(2, 2), pt(1, 1)});

ScheduleSpec harmonic(std::size_t n_max) {
  ScheduleSpec s;
  s.n_max = n_max;
  return s;
}

}  // namespace

TEST_CASE("schedules") {
  const auto h = harmonic(100);
  CHECK(h.first_index() == 2);
  CHECK(h.at(2) == 0.5);
  CHECK(h.at(100) == 1.0 - 1.0 / 100);
  ScheduleSpec g;
  g.kind = ScheduleKind::Geometric;
  g.rho = 0.5;
  g.n_max = 10;
  CHECK(g.at(1) == 0.5);
  CHECK(g.at(3) == 0.875);
  CHECK_NOTHROW(g.validate());
  g.n_max = 60;  // 1 - 0.5^60 rounds to 1
  CHECK_THROWS_AS(g.validate(), Error);
  ScheduleSpec e;
  e.kind = ScheduleKind::Explicit;
  e.values = {0.2, 0.5, 0.9};
  CHECK(e.last_index() == 3);
  CHECK(e.at(2) == 0.5);
  e.values = {0.5, 1.5};
  CHECK_THROWS_AS(e.validate(), Error);
  e.values = {0.5, 0.4};
  CHECK_THROWS_AS(e.validate(), Error);
  CHECK(harmonic_stages_for(10.0, 0.0009765625) == 10241);
  CHECK(harmonic_stages_for(1.0, 1.0) == 10000);
  CHECK(harmonic_stages_for(1.0, 1e-12) == 10000000);
}

TEST_CASE("residual") {
  CHECK(residual(*kReflect, pt(0.5, 0.5), NormSpec::l1()) == 0.0);
  const auto shift = make_mapping(Translation{Point::Constant(1, 1.0)});
  CHECK(residual(*shift, Point::Constant(1, 3.7), NormSpec::l1()) == 1.0);
}

TEST_CASE("picard converges for the scaled reflection") {
  const auto T = compose_scaled(kReflect, 0.9, kBox);
  PicardParams p;
  p.tol_fix = 1e-10;
  p.alpha_hint = 0.9;
  const auto r = picard_solve(*T, kBox, pt(0, 0), p);
  CHECK(r.termination == Termination::Converged);
  CHECK(r.residual <= 1e-10);
  CHECK((r.candidate - Point::Constant(2, 0.9 / 1.9)).lpNorm<1>() <= 1e-10);
  CHECK(r.decay_violations == 0);
  // stored residuals match recomputation
  for (const auto& e : r.trace) CHECK(std::abs(residual(*T, e.iterate, kBox.norm) - e.residual) <= 1e-9 * (1 + e.residual));
}

TEST_CASE("picard reports the period-2 obstruction of the reflection") {
  const auto r = picard_solve(*kReflect, kBox, pt(0, 0), {});
  CHECK(r.termination == Termination::Period2Obstruction);
  REQUIRE(r.trace.size() >= 2);
  CHECK(r.trace[0].iterate == pt(0, 0));
  CHECK(r.trace[1].iterate == pt(1, 1));
}

TEST_CASE("picard diagnoses the translation's residual floor") {
  const auto s = corpus()[1];
  const auto r = picard_solve(*s.mapping, s.domain, s.start_point(), {});
  CHECK(r.termination == Termination::ResidualFloor);
  CHECK(r.residual == 1.0);
  CHECK(r.trace.size() == 10000);
  for (const auto& e : r.trace) CHECK(e.residual == 1.0);
}

TEST_CASE("picard rejects iterates that leave the domain") {
  const auto T = make_mapping(Translation{pt(0.3, 0)});
  try {
    picard_solve(*T, kBox, pt(0, 0), {});
    FAIL("expected DomainViolation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DomainViolation);
  }
}

TEST_CASE("damped scheme on the reflection") {
  StagedParams p;
  p.schedule = harmonic(1000);
  p.tol_fix = 1e-9;
  const auto r = damped_solve(kReflect, kBox, p);
  CHECK(r.termination != Termination::Converged);
  CHECK(r.outer_iterations == 999);
  REQUIRE(r.bound_scale);
  CHECK(*r.bound_scale == doctest::Approx(2.2));
  for (const auto& e : r.trace) {
    const double t = e.parameter;
    CHECK(t == 1.0 - 1.0 / double(e.index));
    CHECK((e.iterate - Point::Constant(2, t / (1 + t))).cwiseAbs().maxCoeff() <= 2e-12);
    CHECK(e.residual <= 2.0 * (1 - t) + 2e-12);
  }
}

TEST_CASE("damped scheme with pure Picard stages agrees with the direct solve") {
  StagedParams p;
  ScheduleSpec g;
  g.kind = ScheduleKind::Geometric;
  g.rho = 0.7;
  g.n_max = 12;
  p.schedule = g;
  p.tol_fix = 1e-12;
  const auto direct = damped_solve(kReflect, kBox, p);
  p.inner = InnerSolver::Picard;
  const auto warm = damped_solve(kReflect, kBox, p);
  CHECK(warm.inner_iterations_total > direct.inner_iterations_total);
  REQUIRE(warm.trace.size() == direct.trace.size());
  for (std::size_t i = 0; i < warm.trace.size(); ++i)
    CHECK((warm.trace[i].iterate - direct.trace[i].iterate).lpNorm<1>() <= 1e-10);

  // cold starts: each stage solved from the origin on its own schedule
  for (std::size_t n = 1; n <= g.n_max; ++n) {
    StagedParams single = p;
    single.schedule = ScheduleSpec{ScheduleKind::Explicit, 0.5, {g.at(n)}, 1};
    const auto cold = damped_solve(kReflect, kBox, single);
    CHECK((cold.candidate - warm.trace[n - 1].iterate).lpNorm<1>() <= 1e-10);
  }
}

TEST_CASE("damped scheme on the identity converges at the first stage") {
  StagedParams p;
  p.schedule = harmonic(100);
  p.start = pt(0.3, 0.7);
  const auto r = damped_solve(identity_map(2), kBox, p);
  CHECK(r.termination == Termination::Converged);
  CHECK(r.outer_iterations == 1);
  CHECK(r.residual == 0.0);  // the only fixed point of x -> t x is the origin
  CHECK(r.candidate == pt(0, 0));
}

TEST_CASE("damped scheme preconditions") {
  const DomainSpec shifted{Box{pt(1, 1), pt(2, 2), {3, 3}}, NormSpec::l1()};
  try {
    damped_solve(identity_map(2), shifted, {});
    FAIL("expected PreconditionViolation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PreconditionViolation);
  }
  const auto s = corpus()[0];
  CHECK_THROWS_AS(damped_solve(s.mapping, s.domain, {}), Error);
}

TEST_CASE("anchored scheme on the reflection") {
  StagedParams p;
  p.schedule = harmonic(1000);
  const Point x0 = pt(0, 0);
  const auto r = anchored_solve(kReflect, kBox, x0, p);
  for (const auto& e : r.trace) {
    const double s = e.parameter;
    CHECK((e.iterate - Point::Constant(2, s / (1 + s))).cwiseAbs().maxCoeff() <= 2e-12);
    const Point tu = evaluate(*kReflect, e.iterate);
    const double lhs = dist(tu, e.iterate, kBox.norm), rhs = (1 - s) * dist(tu, x0, kBox.norm);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * rhs);
  }
}

TEST_CASE("anchored scheme works without the origin and from a fixed anchor") {
  const DomainSpec shifted{Box{pt(1, 1), pt(2, 2), {5, 5}}, NormSpec::l2()};
  const auto T = make_mapping(Affine{-Eigen::MatrixXd::Identity(2, 2), pt(3, 3)});
  StagedParams p;
  p.schedule = harmonic(100);
  const auto from_fixed = anchored_solve(T, shifted, pt(1.5, 1.5), p);
  CHECK(from_fixed.termination == Termination::Converged);
  CHECK(from_fixed.outer_iterations == 1);
  CHECK(from_fixed.candidate == pt(1.5, 1.5));
  CHECK_THROWS_AS(anchored_solve(T, shifted, pt(0, 0), p), Error);
}

TEST_CASE("orbit search") {
  const auto T = compose_scaled(kReflect, 0.999, kBox);
  const auto r = orbit_solve(*T, kBox, pt(0, 0), {});
  CHECK(r.termination == Termination::Converged);
  CHECK((r.candidate - Point::Constant(2, 0.999 / 1.999)).lpNorm<1>() <= 1e-8);

  const auto s = corpus()[1];
  const auto shift = orbit_solve(*s.mapping, s.domain, s.start_point(), {});
  CHECK(shift.termination == Termination::MaxIter);
  CHECK(shift.residual == 1.0);

  CHECK(orbit_solve(*kReflect, kBox, pt(0, 0), {}).termination == Termination::Period2Obstruction);

  // an irrational rotation of the plane fixes the origin
  const double a = std::sqrt(2.0);
  Eigen::MatrixXd R(2, 2);
  R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  const DomainSpec disk_box{Box{pt(-1, -1), pt(1, 1), {3, 3}}, NormSpec::l2()};
  const auto rot = orbit_solve(MappingSpec{Affine{R, pt(0, 0)}}, disk_box, pt(0, 0), {});
  CHECK(rot.termination == Termination::Converged);
  CHECK(rot.candidate == pt(0, 0));

  // a 3-cycle is reported as a non-converging return, not as period 2
  const DomainSpec tri{FiniteSet{{pt(0, 0), pt(1, 0), pt(0, 1)}}, NormSpec::l1()};
  const MappingSpec cycle{Tabulated{{{pt(0, 0), pt(1, 0)}, {pt(1, 0), pt(0, 1)}, {pt(0, 1), pt(0, 0)}}}};
  const auto c3 = orbit_solve(cycle, tri, pt(0, 0), {});
  CHECK(c3.termination == Termination::MaxIter);
  CHECK(c3.outer_iterations == 4);
}

TEST_CASE("multi-start reduction") {
  std::vector<SolveResult> results(3);
  results[0].residual = 0.5;
  results[1].residual = 0.1;
  results[2].residual = 0.1;
  CHECK(best_of(results) == 1);
  for (auto& r : results) r.termination = Termination::Converged;
  results[0].candidate = pt(0, 0);
  results[1].candidate = pt(1, 1);
  results[2].candidate = pt(1, 1 + 1e-12);
  CHECK(distinct_limits(results, NormSpec::l1(), 1e-9).size() == 2);
}
