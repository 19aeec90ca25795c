#include "perimap/classifier.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "perimap/solvers.hpp"

namespace perimap {

std::string_view to_string(MapClass c) {
  switch (c) {
    case MapClass::Contraction: return "CONTRACTION";
    case MapClass::Nonexpansive: return "NONEXPANSIVE";
    case MapClass::QuasiNonexpansive: return "QUASI_NONEXPANSIVE";
    case MapClass::PerimetricNonexpansive: return "PERIMETRIC_NONEXPANSIVE";
    case MapClass::PerimeterContracting: return "PERIMETER_CONTRACTING";
    case MapClass::EdelsteinPerimetric: return "EDELSTEIN_PERIMETRIC";
  }
  return "?";
}

std::string_view to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Holds: return "HOLDS";
    case VerdictStatus::Fails: return "FAILS";
    case VerdictStatus::Unknown: return "UNKNOWN";
  }
  return "?";
}

std::vector<Point> distinct_points(std::span<const Point> points, const NormSpec& norm, double eps_distinct) {
  std::vector<Point> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    const bool dup =
        std::any_of(out.begin(), out.end(), [&](const Point& q) { return dist(p, q, norm) <= eps_distinct; });
    if (!dup) out.push_back(p);
  }
  return out;
}

PairTables pair_tables(const MappingSpec& T, const DomainSpec& K, std::span<const Point> points,
                       const Tolerances& tol) {
  PairTables tables;
  tables.points.assign(points.begin(), points.end());
  const auto n = Eigen::Index(points.size());
  tables.images.reserve(points.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    Point image = evaluate(T, tables.points[i], tol);
    if (!contains(K, image, tol.tau_abs))
      throw Error(ErrorKind::DomainViolation, "T maps sample " + std::to_string(i) + " outside the domain");
    tables.images.push_back(std::move(image));
  }
  tables.input = Eigen::MatrixXd::Zero(n, n);
  tables.output = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      tables.input(i, j) = tables.input(j, i) = dist(tables.points[i], tables.points[j], K.norm);
      tables.output(i, j) = tables.output(j, i) = dist(tables.images[i], tables.images[j], K.norm);
    }
  }
  return tables;
}

namespace {

Witness make_witness(const PairTables& t, std::initializer_list<std::size_t> idx, double observed, double bound) {
  Witness w;
  for (auto i : idx) {
    w.indices.push_back(i);
    w.points.push_back(t.points[i]);
  }
  w.observed = observed;
  w.bound = bound;
  return w;
}

Verdict from_witness(std::optional<Witness> w, bool holds_if_clean) {
  if (w) return {VerdictStatus::Fails, std::move(w)};
  return {holds_if_clean ? VerdictStatus::Holds : VerdictStatus::Unknown, std::nullopt};
}

}  // namespace

ClassificationReport classify_points(const MappingPtr& T, const DomainSpec& K, std::span<const Point> points,
                                     bool exhaustive, const ClassifyOptions& opts) {
  const auto& tol = opts.tol;
  const auto pts = distinct_points(points, K.norm, tol.eps_distinct);
  if (pts.size() < 3)
    throw Error(ErrorKind::InsufficientSpace, "need at least 3 distinct points, got " + std::to_string(pts.size()));
  const PairTables tables = pair_tables(*T, K, pts, tol);
  const std::size_t n = pts.size();

  ClassificationReport report;
  report.n_points = n;
  report.exhaustive = exhaustive;

  // pairs, enumerated as (i, j) with j < i
  std::optional<Witness> nonexpansive_fail, contraction_fail;
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double in = tables.input(i, j), out = tables.output(i, j);
      const double ratio = out / in;
      report.pair_alpha_hat = std::max(report.pair_alpha_hat, ratio);
      if (!nonexpansive_fail && out > in * (1.0 + tol.tau_rel)) nonexpansive_fail = make_witness(tables, {i, j}, out, in);
      if (!contraction_fail && ratio >= 1.0 - tol.tau_rel) contraction_fail = make_witness(tables, {i, j}, out, in);
      ++report.n_pairs_checked;
    }
  }

  // triples, lexicographic i < j < k
  std::optional<Witness> perimetric_fail, contracting_fail, edelstein_fail;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        const double in = perimeter_of_sides(tables.input(i, j), tables.input(j, k), tables.input(k, i));
        const double out = perimeter_of_sides(tables.output(i, j), tables.output(j, k), tables.output(k, i));
        const double ratio = out < tol.eps_distinct ? 0.0 : out / in;
        report.alpha_hat = std::max(report.alpha_hat, ratio);
        if (!perimetric_fail && out > in * (1.0 + tol.tau_rel))
          perimetric_fail = make_witness(tables, {i, j, k}, out, in);
        if (!contracting_fail && ratio >= 1.0 - tol.tau_rel)
          contracting_fail = make_witness(tables, {i, j, k}, out, in);
        if (!edelstein_fail && in - out <= tol.tau_strict) edelstein_fail = make_witness(tables, {i, j, k}, out, in);
        ++report.n_triples_checked;
      }
    }
  }

  report.verdicts[MapClass::Nonexpansive] = from_witness(nonexpansive_fail, true);
  report.verdicts[MapClass::Contraction] = from_witness(contraction_fail, exhaustive);
  report.verdicts[MapClass::PerimetricNonexpansive] = from_witness(perimetric_fail, true);
  report.verdicts[MapClass::PerimeterContracting] = from_witness(contracting_fail, exhaustive);
  report.verdicts[MapClass::EdelsteinPerimetric] = from_witness(edelstein_fail, true);

  // quasi-nonexpansive, relative to the fixed points found
  std::vector<double> fixed_residual;
  std::vector<std::size_t> fixed_index;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = dist(tables.images[i], pts[i], K.norm);
    if (r <= tol.tol_fix) {
      report.fixed_points.push_back(pts[i]);
      fixed_residual.push_back(r);
      fixed_index.push_back(i);
    }
  }
  if (report.fixed_points.empty() && opts.solve_for_fixed_points) {
    if (const auto form = affine_form(*T)) {
      const Eigen::Index d = K.dimension();
      const Point p = (Eigen::MatrixXd::Identity(d, d) - form->matrix).partialPivLu().solve(form->offset);
      if (p.allFinite() && contains(K, p, tol.tau_abs)) {
        const double r = residual(*T, p, K.norm, tol);
        if (r <= tol.tol_fix) {
          report.fixed_points.push_back(p);
          fixed_residual.push_back(r);
          report.notes.push_back("fixed point for the quasi-nonexpansive audit solved from the affine form");
        }
      }
    } else if (is_convex(K) && is_bounded(K) && !K.is_finite_set()) {
      StagedParams params;
      params.schedule.n_max = 1000;
      params.max_inner = 1000;
      params.tol_fix = tol.tol_fix;
      params.inner_tol = tol.inner_tol;
      const auto solved = anchored_solve(T, K, pts.front(), params, tol);
      if (solved.termination == Termination::Converged) {
        report.fixed_points.push_back(solved.candidate);
        fixed_residual.push_back(solved.residual);
        report.notes.push_back("fixed point for the quasi-nonexpansive audit obtained by the anchored scheme");
      }
    }
  }
  Verdict quasi;
  if (report.fixed_points.empty()) {
    // only a fully enumerated finite domain proves the fixed set empty
    quasi.status = exhaustive && K.is_finite_set() ? VerdictStatus::Fails : VerdictStatus::Unknown;
    report.notes.push_back("no fixed point found; the quasi-nonexpansive class needs a nonempty fixed set");
  } else {
    quasi.status = VerdictStatus::Holds;
    for (std::size_t i = 0; i < n && quasi.status == VerdictStatus::Holds; ++i) {
      for (std::size_t f = 0; f < report.fixed_points.size(); ++f) {
        const Point& p = report.fixed_points[f];
        const double out = dist(tables.images[i], p, K.norm), in = dist(pts[i], p, K.norm);
        if (out > in * (1.0 + tol.tau_rel) + fixed_residual[f] + tol.tau_abs) {
          Witness w;
          w.indices.push_back(i);
          if (f < fixed_index.size()) w.indices.push_back(fixed_index[f]);
          w.points = {pts[i], p};
          w.observed = out;
          w.bound = in;
          quasi = {VerdictStatus::Fails, std::move(w)};
          break;
        }
      }
    }
  }
  report.verdicts[MapClass::QuasiNonexpansive] = std::move(quasi);

  if (report.at(MapClass::Nonexpansive).status == VerdictStatus::Holds &&
      report.at(MapClass::PerimetricNonexpansive).status == VerdictStatus::Fails)
    throw std::logic_error("classifier produced NONEXPANSIVE=HOLDS with PERIMETRIC_NONEXPANSIVE=FAILS");
  return report;
}

ClassificationReport classify(const MappingPtr& T, const DomainSpec& K, const SamplerConfig& cfg,
                              const ClassifyOptions& opts) {
  SamplerConfig effective = cfg;
  if (opts.exhaustive) {
    effective.strategy = SampleStrategy::Grid;
    effective.n_points = lattice(K).size();
  }
  const auto samples = sample_points(K, effective);
  bool exhaustive = opts.exhaustive;
  if (const auto* f = std::get_if<FiniteSet>(&K.shape)) {
    const auto all = distinct_points(f->points, K.norm, opts.tol.eps_distinct);
    const auto got = distinct_points(samples, K.norm, opts.tol.eps_distinct);
    exhaustive = got.size() == all.size();
  }
  auto report = classify_points(T, K, samples, exhaustive, opts);
  if (const auto* r = std::get_if<RayUnion>(&K.shape))
    report.notes.push_back("unbounded ray truncated at alpha_max = " + std::to_string(r->alpha_max) +
                           "; verdicts cover the truncated lattice only");
  if (exhaustive && !K.is_finite_set())
    report.notes.push_back("exhaustive over the sampling lattice, not over the continuous domain");
  return report;
}

TripleCertificate audit_triple(const MappingSpec& T, const Triple& t, const NormSpec& norm, const Tolerances& tol) {
  TripleCertificate cert;
  cert.triple = t;
  cert.input_perimeter = perimeter(t, norm, tol.eps_distinct);
  cert.output_perimeter = perimeter(evaluate(T, t.x, tol), evaluate(T, t.y, tol), evaluate(T, t.z, tol), norm);
  cert.ratio = cert.output_perimeter < tol.eps_distinct ? 0.0 : cert.output_perimeter / cert.input_perimeter;
  return cert;
}

Period2Report detect_period2(const MappingSpec& T, const DomainSpec& K, const SamplerConfig& cfg, double tol_fix,
                             const Tolerances& tol) {
  Period2Report report;
  for (const auto& x : sample_points(K, cfg)) {
    const Point tx = evaluate(T, x, tol);
    const Point ttx = evaluate(T, tx, tol);
    const double displacement = dist(ttx, x, K.norm), gap = dist(tx, x, K.norm);
    if (displacement <= tol_fix && gap > tol_fix) {
      report.found = true;
      report.witness = x;
      report.displacement = displacement;
      report.fixed_gap = gap;
      break;
    }
  }
  return report;
}

double estimate_alpha(std::span<const TripleCertificate> certs) {
  if (certs.empty()) throw Error(ErrorKind::InsufficientData, "no triple certificates");
  double alpha = 0.0;
  for (const auto& c : certs) alpha = std::max(alpha, c.ratio);
  return alpha;
}

}  // namespace perimap
