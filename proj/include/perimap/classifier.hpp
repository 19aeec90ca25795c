#pragma once

// Audits a mapping on a sampled point set against the class hierarchy
//   contraction, nonexpansive, quasi-nonexpansive,
//   perimetric nonexpansive   S(Tx,Ty,Tz) <= S(x,y,z),
//   perimeter contracting     S(Tx,Ty,Tz) <= alpha S(x,y,z), alpha < 1,
//   Edelstein perimetric      S(Tx,Ty,Tz) <  S(x,y,z),
// and scans for points of prime period 2.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "perimap/mapping.hpp"
#include "perimap/sampling.hpp"

namespace perimap {

enum class MapClass {
  Contraction,
  Nonexpansive,
  QuasiNonexpansive,
  PerimetricNonexpansive,
  PerimeterContracting,
  EdelsteinPerimetric,
};

inline constexpr MapClass kAllClasses[] = {
    MapClass::Contraction,           MapClass::Nonexpansive,         MapClass::QuasiNonexpansive,
    MapClass::PerimetricNonexpansive, MapClass::PerimeterContracting, MapClass::EdelsteinPerimetric,
};

std::string_view to_string(MapClass c);

enum class VerdictStatus { Holds, Fails, Unknown };

std::string_view to_string(VerdictStatus s);

/// Points (pair, triple, or (x, fixed point p)) that violate a class
/// inequality, with their sample indices; `observed` is the left-hand side
/// and `bound` the right-hand side of the violated inequality.
struct Witness {
  std::vector<std::size_t> indices;
  std::vector<Point> points;
  double observed = 0.0;
  double bound = 0.0;
};

struct Verdict {
  VerdictStatus status = VerdictStatus::Unknown;
  std::optional<Witness> witness;
};

struct TripleCertificate {
  Triple triple;
  double input_perimeter = 0.0;
  double output_perimeter = 0.0;
  double ratio = 0.0;
};

struct ClassificationReport {
  std::map<MapClass, Verdict> verdicts;
  double alpha_hat = 0.0;       // max triple ratio
  double pair_alpha_hat = 0.0;  // max pair ratio
  std::size_t n_points = 0;
  std::size_t n_triples_checked = 0;
  std::size_t n_pairs_checked = 0;
  bool exhaustive = false;
  std::vector<Point> fixed_points;  // fixed set used for quasi-nonexpansiveness
  std::vector<std::string> notes;

  const Verdict& at(MapClass c) const { return verdicts.at(c); }
};

struct Period2Report {
  bool found = false;
  std::optional<Point> witness;
  double displacement = 0.0;  // |T^2 x - x|
  double fixed_gap = 0.0;     // |T x - x|
};

struct ClassifyOptions {
  Tolerances tol;
  /// Audit the whole sampling lattice and treat it as the space under test.
  /// FINITE domains are always audited exhaustively when fully sampled.
  bool exhaustive = false;
  /// When no sampled point is fixed, solve for one: directly for affine
  /// maps, else with the anchored scheme on a convex bounded domain.
  bool solve_for_fixed_points = true;
};

ClassificationReport classify(const MappingPtr& T, const DomainSpec& K, const SamplerConfig& cfg,
                              const ClassifyOptions& opts = {});

/// Audit on an explicit point list. Duplicate points are dropped first.
/// `exhaustive` marks the list as the whole space under test.
ClassificationReport classify_points(const MappingPtr& T, const DomainSpec& K, std::span<const Point> points,
                                     bool exhaustive, const ClassifyOptions& opts = {});

TripleCertificate audit_triple(const MappingSpec& T, const Triple& t, const NormSpec& norm,
                               const Tolerances& tol = {});

Period2Report detect_period2(const MappingSpec& T, const DomainSpec& K, const SamplerConfig& cfg, double tol_fix,
                             const Tolerances& tol = {});

double estimate_alpha(std::span<const TripleCertificate> certs);

/// Precomputed input/output distance tables for a point set. Shared by the
/// classifier and the verification suites.
struct PairTables {
  std::vector<Point> points, images;
  Eigen::MatrixXd input, output;  // input(i, j) = |x_i - x_j|, output(i, j) = |Tx_i - Tx_j|
};

PairTables pair_tables(const MappingSpec& T, const DomainSpec& K, std::span<const Point> points,
                       const Tolerances& tol = {});

/// Drops points within eps_distinct of an earlier one, keeping order.
std::vector<Point> distinct_points(std::span<const Point> points, const NormSpec& norm, double eps_distinct);

}  // namespace perimap
