#pragma once

// Brute-force reference auditor. Shares no code with the library: plain
// std::vector points, hand-written norms and loops, Cramer's rule.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

enum class Norm { L1, L2, LInf };

inline double dist(const Vec& a, const Vec& b, Norm n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::fabs(a[i] - b[i]);
    if (n == Norm::L1) acc += d;
    else if (n == Norm::L2) acc += d * d;
    else acc = std::max(acc, d);
  }
  return n == Norm::L2 ? std::sqrt(acc) : acc;
}

inline double perimeter(const Vec& a, const Vec& b, const Vec& c, Norm n) {
  return dist(a, b, n) + dist(b, c, n) + dist(c, a, n);
}

/// x -> A x + b in two dimensions.
struct Affine2 {
  double a11, a12, a21, a22, b1, b2;

  Vec operator()(const Vec& x) const { return {a11 * x[0] + a12 * x[1] + b1, a21 * x[0] + a22 * x[1] + b2}; }

  /// Solution of (I - A) p = b, if the system is nonsingular.
  std::optional<Vec> fixed_point() const {
    const double m11 = 1.0 - a11, m12 = -a12, m21 = -a21, m22 = 1.0 - a22;
    const double det = m11 * m22 - m12 * m21;
    if (std::fabs(det) < 1e-14) return std::nullopt;
    return Vec{(b1 * m22 - m12 * b2) / det, (m11 * b2 - m21 * b1) / det};
  }
};

/// n x n grid on [lo, hi]^2, first coordinate slowest.
inline std::vector<Vec> grid(int n, double lo = 0.0, double hi = 1.0) {
  std::vector<Vec> pts;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      pts.push_back({lo + (hi - lo) * i / (n - 1), lo + (hi - lo) * j / (n - 1)});
  return pts;
}

enum class Status { Holds, Fails, Unknown };

struct Verdicts {
  Status nonexpansive = Status::Unknown;
  Status contraction = Status::Unknown;
  Status perimetric = Status::Unknown;
  Status perimeter_contracting = Status::Unknown;
  Status edelstein = Status::Unknown;
  Status quasi = Status::Unknown;
  double max_pair_ratio = 0.0;
  double max_triple_ratio = 0.0;
  std::size_t triples = 0;
};

struct Tol {
  double tau_rel = 1e-9, tau_abs = 1e-9, tau_strict = 1e-12, eps_distinct = 1e-12, tol_fix = 1e-9;
};

using Map = std::function<Vec(const Vec&)>;

/// Treats `pts` as the whole space. `extra_fixed` are fixed points found
/// off the sample (they are used only if their residual is within tol_fix).
inline Verdicts audit(const std::vector<Vec>& pts, const Map& T, Norm norm, const Tol& tol = {},
                      const std::vector<Vec>& extra_fixed = {}) {
  std::vector<Vec> img;
  for (const auto& p : pts) img.push_back(T(p));
  const std::size_t n = pts.size();

  Verdicts v;
  bool nonexp = true, contr = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double in = dist(pts[i], pts[j], norm), out = dist(img[i], img[j], norm);
      v.max_pair_ratio = std::max(v.max_pair_ratio, out / in);
      if (out > in * (1.0 + tol.tau_rel)) nonexp = false;
      if (out / in >= 1.0 - tol.tau_rel) contr = false;
    }
  v.nonexpansive = nonexp ? Status::Holds : Status::Fails;
  v.contraction = contr ? Status::Holds : Status::Fails;

  bool perim = true, pcontr = true, edel = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const double in = perimeter(pts[i], pts[j], pts[k], norm);
        const double out = perimeter(img[i], img[j], img[k], norm);
        const double ratio = out < tol.eps_distinct ? 0.0 : out / in;
        v.max_triple_ratio = std::max(v.max_triple_ratio, ratio);
        if (out > in * (1.0 + tol.tau_rel)) perim = false;
        if (ratio >= 1.0 - tol.tau_rel) pcontr = false;
        if (in - out <= tol.tau_strict) edel = false;
        ++v.triples;
      }
  v.perimetric = perim ? Status::Holds : Status::Fails;
  v.perimeter_contracting = pcontr ? Status::Holds : Status::Fails;
  v.edelstein = edel ? Status::Holds : Status::Fails;

  std::vector<Vec> fixed;
  std::vector<double> slack;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = dist(img[i], pts[i], norm);
    if (r <= tol.tol_fix) {
      fixed.push_back(pts[i]);
      slack.push_back(r);
    }
  }
  if (fixed.empty())
    for (const auto& p : extra_fixed) {
      const double r = dist(T(p), p, norm);
      if (r <= tol.tol_fix) {
        fixed.push_back(p);
        slack.push_back(r);
      }
    }
  if (!fixed.empty()) {
    v.quasi = Status::Holds;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t f = 0; f < fixed.size(); ++f)
        if (dist(img[i], fixed[f], norm) > dist(pts[i], fixed[f], norm) * (1.0 + tol.tau_rel) + slack[f] + tol.tau_abs)
          v.quasi = Status::Fails;
  }
  return v;
}

}  // namespace oracle
