#pragma once

// Points, norms and the triple-perimeter functional
//   S(x, y, z) = |x - y| + |y - z| + |z - x|
// on finite-dimensional normed spaces. Everything here is templated on the
// scalar type and accepts arbitrary Eigen expressions.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>

#include "perimap/error.hpp"

namespace perimap {

template <typename Scalar>
using PointT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Point = PointT<double>;

/// Numerical tolerances shared by every module. Defaults may be overridden
/// per scenario.
struct Tolerances {
  double eps_distinct = 1e-12;  // minimal pairwise gap of an admissible triple
  double tau_zero = 1e-12;      // |v| below this counts as the zero vector
  double tau_rel = 1e-9;        // relative slack on non-strict inequalities
  double tau_abs = 1e-9;        // absolute slack (domain membership, bounds)
  double tau_strict = 1e-12;    // margin required for a strict inequality
  double tol_fix = 1e-9;        // residual accepted as a fixed point
  double inner_tol = 1e-12;     // stopping tolerance of inner Picard solves
};

enum class NormKind { L1, L2, LInf, WeightedP };

struct NormSpec {
  NormKind kind = NormKind::L2;
  Eigen::VectorXd weights;  // WeightedP only, all > 0
  double p = 2.0;           // WeightedP only, p >= 1

  static NormSpec l1() { return {NormKind::L1, {}, 1.0}; }
  static NormSpec l2() { return {NormKind::L2, {}, 2.0}; }
  static NormSpec linf() { return {NormKind::LInf, {}, 2.0}; }
  static NormSpec weighted(Eigen::VectorXd w, double p) { return {NormKind::WeightedP, std::move(w), p}; }

  void validate() const {
    if (kind != NormKind::WeightedP) return;
    if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorKind::InvalidSpec, "weighted norm exponent must be >= 1");
    if (weights.size() == 0) throw Error(ErrorKind::InvalidSpec, "weighted norm needs weights");
    for (Eigen::Index i = 0; i < weights.size(); ++i)
      if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
        throw Error(ErrorKind::InvalidSpec, "weighted norm weights must be finite and > 0");
  }

  void validate(Eigen::Index dim) const {
    validate();
    if (kind == NormKind::WeightedP && weights.size() != dim)
      throw Error(ErrorKind::InvalidSpec, "weights have dimension " + std::to_string(weights.size()) +
                                              ", expected " + std::to_string(dim));
  }

  bool operator==(const NormSpec& o) const {
    return kind == o.kind && (kind != NormKind::WeightedP || (p == o.p && weights == o.weights));
  }
};

std::string to_string(NormKind kind);

template <typename Derived>
bool is_finite(const Eigen::MatrixBase<Derived>& v) {
  return v.allFinite();
}

template <typename Derived>
typename Derived::Scalar norm(const Eigen::MatrixBase<Derived>& v, const NormSpec& spec) {
  using Scalar = typename Derived::Scalar;
  using std::abs;
  using std::pow;
  if (v.size() == 0) return Scalar(0);
  switch (spec.kind) {
    case NormKind::L1:
      return v.template lpNorm<1>();
    case NormKind::L2:
      return v.norm();
    case NormKind::LInf:
      return v.template lpNorm<Eigen::Infinity>();
    case NormKind::WeightedP: {
      if (spec.weights.size() != v.size())
        throw Error(ErrorKind::InvalidSpec, "weighted norm dimension mismatch");
      const Scalar p(spec.p);
      // (sum w_i |v_i|^p)^(1/p), rescaled by the largest term to avoid overflow
      Scalar scale(0);
      for (Eigen::Index i = 0; i < v.size(); ++i)
        scale = std::max(scale, pow(Scalar(spec.weights[i]), Scalar(1) / p) * abs(v[i]));
      if (scale == Scalar(0)) return Scalar(0);
      Scalar acc(0);
      for (Eigen::Index i = 0; i < v.size(); ++i)
        acc += pow(pow(Scalar(spec.weights[i]), Scalar(1) / p) * abs(v[i]) / scale, p);
      return scale * pow(acc, Scalar(1) / p);
    }
  }
  return Scalar(0);
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar dist(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                               const NormSpec& spec) {
  if (a.size() != b.size())
    throw Error(ErrorKind::InvalidSpec,
                "dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  return norm(a - b, spec);
}

/// Sum of three side lengths, added in ascending order so the result does not
/// depend on the order the sides were supplied in.
template <typename Scalar>
Scalar perimeter_of_sides(Scalar a, Scalar b, Scalar c) {
  if (a > b) std::swap(a, b);
  if (b > c) std::swap(b, c);
  if (a > b) std::swap(a, b);
  return (a + b) + c;
}

template <typename Scalar>
struct TripleT {
  PointT<Scalar> x, y, z;
  Scalar min_pairwise_gap = Scalar(0);
};

using Triple = TripleT<double>;

/// Builds a triple, rejecting it when two of the points are closer than
/// `eps_distinct`.
template <typename Scalar>
TripleT<Scalar> make_triple(PointT<Scalar> x, PointT<Scalar> y, PointT<Scalar> z, const NormSpec& spec,
                            double eps_distinct = Tolerances{}.eps_distinct) {
  const Scalar gap = std::min({dist(x, y, spec), dist(y, z, spec), dist(z, x, spec)});
  if (!(gap > Scalar(eps_distinct)))
    throw Error(ErrorKind::DegenerateTriple, "points are not pairwise distinct (gap " + std::to_string(double(gap)) + ")");
  return {std::move(x), std::move(y), std::move(z), gap};
}

/// Unchecked perimeter of three points.
template <typename DX, typename DY, typename DZ>
typename DX::Scalar perimeter(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y,
                              const Eigen::MatrixBase<DZ>& z, const NormSpec& spec) {
  return perimeter_of_sides(dist(x, y, spec), dist(y, z, spec), dist(z, x, spec));
}

template <typename Scalar>
Scalar perimeter(const TripleT<Scalar>& t, const NormSpec& spec, double eps_distinct = Tolerances{}.eps_distinct) {
  if (!(t.min_pairwise_gap > Scalar(eps_distinct)))
    throw Error(ErrorKind::DegenerateTriple, "triple gap below distinctness threshold");
  return perimeter(t.x, t.y, t.z, spec);
}

inline std::string to_string(NormKind kind) {
  switch (kind) {
    case NormKind::L1: return "L1";
    case NormKind::L2: return "L2";
    case NormKind::LInf: return "LINF";
    case NormKind::WeightedP: return "WEIGHTED_P";
  }
  return "?";
}

}  // namespace perimap
