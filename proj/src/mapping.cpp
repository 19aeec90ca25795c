#include "perimap/mapping.hpp"

#include <cmath>
#include <string>

namespace perimap {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_point(const Point& p, Eigen::Index dim, const char* what) {
  if (p.size() != dim)
    throw Error(ErrorKind::InvalidSpec, std::string(what) + " has dimension " + std::to_string(p.size()) +
                                            ", expected " + std::to_string(dim));
  if (!p.allFinite()) throw Error(ErrorKind::InvalidSpec, std::string(what) + " has non-finite coordinates");
}

bool on_ray(const RayUnion& r, const Point& x, const NormSpec& norm, double tol) {
  const double dd = r.direction.squaredNorm();
  const double alpha = std::max(r.alpha_min, x.dot(r.direction) / dd);
  return dist(x, alpha * r.direction, norm) <= tol;
}

}  // namespace

Eigen::Index DomainSpec::dimension() const {
  return std::visit(overloaded{
                        [](const FiniteSet& f) -> Eigen::Index { return f.points.empty() ? 0 : f.points.front().size(); },
                        [](const Box& b) -> Eigen::Index { return b.lower.size(); },
                        [](const RayUnion& r) -> Eigen::Index { return r.direction.size(); },
                    },
                    shape);
}

void validate(const DomainSpec& K, Eigen::Index dim) {
  if (dim < 1) throw Error(ErrorKind::InvalidSpec, "dimension must be >= 1");
  K.norm.validate(dim);
  std::visit(overloaded{
                 [&](const FiniteSet& f) {
                   if (f.points.empty()) throw Error(ErrorKind::InvalidSpec, "finite domain is empty");
                   for (const auto& p : f.points) check_point(p, dim, "finite domain point");
                 },
                 [&](const Box& b) {
                   check_point(b.lower, dim, "box lower corner");
                   check_point(b.upper, dim, "box upper corner");
                   if ((b.lower.array() > b.upper.array()).any())
                     throw Error(ErrorKind::InvalidSpec, "box lower corner exceeds upper corner");
                   if (Eigen::Index(b.resolution.size()) != dim)
                     throw Error(ErrorKind::InvalidSpec, "box resolution needs one entry per axis");
                   for (int r : b.resolution)
                     if (r < 2) throw Error(ErrorKind::InvalidSpec, "box resolution must be >= 2 per axis");
                 },
                 [&](const RayUnion& r) {
                   for (const auto& p : r.base) check_point(p, dim, "ray union base point");
                   check_point(r.direction, dim, "ray direction");
                   if (r.direction.squaredNorm() == 0.0) throw Error(ErrorKind::InvalidSpec, "ray direction is zero");
                   if (!(r.alpha_max > r.alpha_min))
                     throw Error(ErrorKind::InvalidSpec, "ray truncation alpha_max must exceed alpha_min");
                   if (!(r.step > 0.0) || !std::isfinite(r.step))
                     throw Error(ErrorKind::InvalidSpec, "ray lattice step must be > 0");
                 },
             },
             K.shape);
}

bool contains(const DomainSpec& K, const Point& x, double tol) {
  if (x.size() != K.dimension()) return false;
  return std::visit(overloaded{
                        [&](const FiniteSet& f) {
                          for (const auto& p : f.points)
                            if (p == x) return true;
                          return false;
                        },
                        [&](const Box& b) {
                          return ((x.array() >= b.lower.array() - tol) && (x.array() <= b.upper.array() + tol)).all();
                        },
                        [&](const RayUnion& r) {
                          for (const auto& p : r.base)
                            if (dist(p, x, K.norm) <= tol) return true;
                          return on_ray(r, x, K.norm, tol);
                        },
                    },
                    K.shape);
}

bool contains_origin(const DomainSpec& K) { return contains(K, Point::Zero(K.dimension())); }

bool is_convex(const DomainSpec& K) {
  return std::visit(overloaded{
                        [](const FiniteSet& f) {
                          for (const auto& p : f.points)
                            if (p != f.points.front()) return false;
                          return true;
                        },
                        [](const Box&) { return true; },
                        [&](const RayUnion& r) {
                          for (const auto& p : r.base)
                            if (!on_ray(r, p, K.norm, Tolerances{}.tau_abs)) return false;
                          return true;
                        },
                    },
                    K.shape);
}

bool is_bounded(const DomainSpec& K) { return !std::holds_alternative<RayUnion>(K.shape); }

std::vector<Point> lattice(const DomainSpec& K) {
  return std::visit(overloaded{
                        [](const FiniteSet& f) { return f.points; },
                        [](const Box& b) {
                          const auto d = b.lower.size();
                          std::size_t total = 1;
                          for (int r : b.resolution) total *= std::size_t(r);
                          std::vector<Point> out;
                          out.reserve(total);
                          std::vector<int> idx(d, 0);
                          for (std::size_t n = 0; n < total; ++n) {
                            Point p(d);
                            for (Eigen::Index i = 0; i < d; ++i) {
                              const int r = b.resolution[i];
                              p[i] = idx[i] == r - 1 ? b.upper[i]
                                                     : b.lower[i] + (b.upper[i] - b.lower[i]) * idx[i] / (r - 1);
                            }
                            out.push_back(std::move(p));
                            for (Eigen::Index i = d - 1; i >= 0; --i) {
                              if (++idx[i] < b.resolution[i]) break;
                              idx[i] = 0;
                            }
                          }
                          return out;
                        },
                        [](const RayUnion& r) {
                          std::vector<Point> out = r.base;
                          const double slack = 1e-12 * std::max(1.0, std::abs(r.alpha_max));
                          for (std::size_t k = 0;; ++k) {
                            const double alpha = r.alpha_min + double(k) * r.step;
                            if (alpha > r.alpha_max + slack) break;
                            out.push_back(alpha * r.direction);
                          }
                          return out;
                        },
                    },
                    K.shape);
}

MappingPtr identity_map(Eigen::Index dim) {
  return make_mapping(Affine{Eigen::MatrixXd::Identity(dim, dim), Point::Zero(dim)});
}

void validate(const MappingSpec& T, Eigen::Index dim, const Tolerances& tol) {
  std::visit(overloaded{
                 [&](const Affine& a) {
                   if (a.matrix.rows() != dim || a.matrix.cols() != dim)
                     throw Error(ErrorKind::InvalidSpec, "affine matrix must be " + std::to_string(dim) + "x" +
                                                             std::to_string(dim));
                   if (!a.matrix.allFinite()) throw Error(ErrorKind::InvalidSpec, "affine matrix is not finite");
                   check_point(a.offset, dim, "affine offset");
                 },
                 [&](const Translation& t) { check_point(t.offset, dim, "translation offset"); },
                 [&](const Scaled& s) {
                   if (!(s.factor >= 0.0 && s.factor <= 1.0))
                     throw Error(ErrorKind::InvalidSpec, "scaling factor must lie in [0,1]");
                   if (!s.inner) throw Error(ErrorKind::InvalidSpec, "scaled mapping has no inner map");
                   validate(*s.inner, dim, tol);
                 },
                 [&](const Anchored& a) {
                   if (!(a.weight >= 0.0 && a.weight <= 1.0))
                     throw Error(ErrorKind::InvalidSpec, "anchoring weight must lie in [0,1]");
                   check_point(a.anchor, dim, "anchor");
                   if (!a.inner) throw Error(ErrorKind::InvalidSpec, "anchored mapping has no inner map");
                   validate(*a.inner, dim, tol);
                 },
                 [&](const Tabulated& t) {
                   if (t.table.empty()) throw Error(ErrorKind::InvalidSpec, "tabulated mapping is empty");
                   for (std::size_t i = 0; i < t.table.size(); ++i) {
                     check_point(t.table[i].first, dim, "table input");
                     check_point(t.table[i].second, dim, "table output");
                     for (std::size_t j = 0; j < i; ++j)
                       if ((t.table[i].first - t.table[j].first).lpNorm<Eigen::Infinity>() <= tol.eps_distinct)
                         throw Error(ErrorKind::InvalidSpec, "tabulated inputs " + std::to_string(j) + " and " +
                                                                 std::to_string(i) + " coincide");
                   }
                 },
                 [&](const Piecewise& p) {
                   if (p.pieces.empty()) throw Error(ErrorKind::InvalidSpec, "piecewise mapping has no pieces");
                   for (const auto& piece : p.pieces) {
                     validate(piece.region, dim);
                     if (!piece.map) throw Error(ErrorKind::InvalidSpec, "piece has no mapping");
                     validate(*piece.map, dim, tol);
                   }
                 },
             },
             T.variant);
}

Point evaluate(const MappingSpec& T, const Point& x, const Tolerances& tol) {
  return std::visit(overloaded{
                        [&](const Affine& a) -> Point {
                          if (x.size() != a.offset.size()) throw Error(ErrorKind::InvalidSpec, "dimension mismatch");
                          return a.matrix * x + a.offset;
                        },
                        [&](const Translation& t) -> Point {
                          if (x.size() != t.offset.size()) throw Error(ErrorKind::InvalidSpec, "dimension mismatch");
                          return x + t.offset;
                        },
                        [&](const Scaled& s) -> Point { return s.factor * evaluate(*s.inner, x, tol); },
                        [&](const Anchored& a) -> Point {
                          return (1.0 - a.weight) * a.anchor + a.weight * evaluate(*a.inner, x, tol);
                        },
                        [&](const Tabulated& t) -> Point {
                          for (const auto& [in, out] : t.table)
                            if (in == x) return out;
                          throw Error(ErrorKind::DomainViolation, "point is not in the table");
                        },
                        [&](const Piecewise& p) -> Point {
                          for (const auto& piece : p.pieces)
                            if (contains(piece.region, x, tol.tau_abs)) return evaluate(*piece.map, x, tol);
                          throw Error(ErrorKind::DomainViolation, "no piece contains the point");
                        },
                    },
                    T.variant);
}

MappingPtr compose_scaled(const MappingPtr& T, double c, const DomainSpec& K) {
  if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorKind::InvalidSpec, "scaling factor must lie in [0,1]");
  if (K.is_finite_set())
    throw Error(ErrorKind::PreconditionViolation, "scaled maps need a convex domain, not a finite set");
  if (!is_convex(K)) throw Error(ErrorKind::PreconditionViolation, "domain is not convex");
  if (!contains_origin(K)) throw Error(ErrorKind::PreconditionViolation, "domain does not contain the origin");
  return make_mapping(Scaled{c, T});
}

MappingPtr compose_anchored(const MappingPtr& T, const Point& x0, double s, const DomainSpec& K) {
  if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorKind::InvalidSpec, "anchoring weight must lie in [0,1]");
  if (!is_convex(K)) throw Error(ErrorKind::PreconditionViolation, "domain is not convex");
  if (!contains(K, x0)) throw Error(ErrorKind::PreconditionViolation, "anchor lies outside the domain");
  return make_mapping(Anchored{x0, s, T});
}

}  // namespace perimap

namespace perimap {

void evaluate_into(const MappingSpec& T, const Point& x, Point& out, const Tolerances& tol) {
  std::visit(overloaded{
                 [&](const Affine& a) {
                   if (x.size() != a.offset.size()) throw Error(ErrorKind::InvalidSpec, "dimension mismatch");
                   out.noalias() = a.matrix * x;
                   out += a.offset;
                 },
                 [&](const Translation& t) {
                   if (x.size() != t.offset.size()) throw Error(ErrorKind::InvalidSpec, "dimension mismatch");
                   out = x + t.offset;
                 },
                 [&](const Scaled& s) {
                   evaluate_into(*s.inner, x, out, tol);
                   out *= s.factor;
                 },
                 [&](const Anchored& a) {
                   evaluate_into(*a.inner, x, out, tol);
                   out = (1.0 - a.weight) * a.anchor + a.weight * out;
                 },
                 [&](const auto&) { out = evaluate(T, x, tol); },
             },
             T.variant);
}

std::optional<AffineForm> affine_form(const MappingSpec& T) {
  return std::visit(overloaded{
                        [](const Affine& a) -> std::optional<AffineForm> { return AffineForm{a.matrix, a.offset}; },
                        [](const Translation& t) -> std::optional<AffineForm> {
                          return AffineForm{Eigen::MatrixXd::Identity(t.offset.size(), t.offset.size()), t.offset};
                        },
                        [](const Scaled& s) -> std::optional<AffineForm> {
                          auto inner = affine_form(*s.inner);
                          if (!inner) return std::nullopt;
                          return AffineForm{s.factor * inner->matrix, s.factor * inner->offset};
                        },
                        [](const Anchored& a) -> std::optional<AffineForm> {
                          auto inner = affine_form(*a.inner);
                          if (!inner) return std::nullopt;
                          return AffineForm{a.weight * inner->matrix,
                                            (1.0 - a.weight) * a.anchor + a.weight * inner->offset};
                        },
                        [](const auto&) -> std::optional<AffineForm> { return std::nullopt; },
                    },
                    T.variant);
}

}  // namespace perimap
