#pragma once

// Declarative self-maps T and the sets K they act on.

#include <Eigen/Core>

#include <memory>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "perimap/geometry.hpp"

namespace perimap {

// ---------------------------------------------------------------------------
// Domains

struct FiniteSet {
  std::vector<Point> points;
};

/// Axis-aligned box with a lattice of `resolution[i]` points on axis i.
struct Box {
  Point lower, upper;
  std::vector<int> resolution;
};

/// base ∪ {alpha * direction : alpha >= alpha_min}. The ray is unbounded;
/// alpha_max and step only define the sampling lattice.
struct RayUnion {
  std::vector<Point> base;
  Point direction;
  double alpha_min = 1.0;
  double alpha_max = 4.0;
  double step = 0.5;
};

struct DomainSpec {
  std::variant<FiniteSet, Box, RayUnion> shape;
  NormSpec norm;

  Eigen::Index dimension() const;
  bool is_finite_set() const { return std::holds_alternative<FiniteSet>(shape); }
};

void validate(const DomainSpec& K, Eigen::Index dim);

/// Membership. FINITE sets use exact coordinate equality; boxes and rays
/// accept points within `tol` (in the domain norm).
bool contains(const DomainSpec& K, const Point& x, double tol = Tolerances{}.tau_abs);
bool contains_origin(const DomainSpec& K);
bool is_convex(const DomainSpec& K);
bool is_bounded(const DomainSpec& K);

/// Canonical lattice of K: FINITE points in order, the BOX grid with the
/// first axis varying slowest, or RAY_UNION base points followed by
/// alpha_min, alpha_min + step, ... <= alpha_max along the ray.
std::vector<Point> lattice(const DomainSpec& K);

// ---------------------------------------------------------------------------
// Mappings

struct MappingSpec;
using MappingPtr = std::shared_ptr<const MappingSpec>;

struct Affine {
  Eigen::MatrixXd matrix;
  Point offset;
};

struct Translation {
  Point offset;
};

/// x -> factor * inner(x)
struct Scaled {
  double factor = 1.0;
  MappingPtr inner;
};

/// x -> (1 - weight) * anchor + weight * inner(x)
struct Anchored {
  Point anchor;
  double weight = 1.0;
  MappingPtr inner;
};

struct Tabulated {
  std::vector<std::pair<Point, Point>> table;
};

struct Piece {
  DomainSpec region;
  MappingPtr map;
};

/// First piece whose region contains x wins.
struct Piecewise {
  std::vector<Piece> pieces;
};

struct MappingSpec {
  std::variant<Affine, Translation, Scaled, Anchored, Tabulated, Piecewise> variant;
};

template <typename V>
MappingPtr make_mapping(V v) {
  return std::make_shared<const MappingSpec>(MappingSpec{std::move(v)});
}

MappingPtr identity_map(Eigen::Index dim);

void validate(const MappingSpec& T, Eigen::Index dim, const Tolerances& tol = {});

Point evaluate(const MappingSpec& T, const Point& x, const Tolerances& tol = {});

/// Allocation-free variant for hot loops; `out` must not alias `x`.
void evaluate_into(const MappingSpec& T, const Point& x, Point& out, const Tolerances& tol = {});

/// x -> matrix * x + offset, when T is built only from AFFINE, TRANSLATION,
/// SCALED and ANCHORED pieces.
struct AffineForm {
  Eigen::MatrixXd matrix;
  Point offset;
};

std::optional<AffineForm> affine_form(const MappingSpec& T);

/// SCALED{c, T}. K must be convex and contain the origin so the result maps
/// K into itself.
MappingPtr compose_scaled(const MappingPtr& T, double c, const DomainSpec& K);

/// ANCHORED{x0, s, T}. K must be convex and contain x0.
MappingPtr compose_anchored(const MappingPtr& T, const Point& x0, double s, const DomainSpec& K);

}  // namespace perimap
