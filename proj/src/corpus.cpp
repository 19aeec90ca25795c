#include <fstream>

#include "perimap/scenario.hpp"

namespace perimap {

namespace {

Point pt(std::initializer_list<double> xs) {
  Point p(Eigen::Index(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) p[i++] = x;
  return p;
}

Scenario two_point_spike() {
  Scenario s;
  s.name = "example_2_2";
  s.description =
      "L1 plane, K = {(0,0),(1,0),(0,1)} plus the ray a(1,1), a >= 1. T sends (1,0) and (0,1) to (1,1) "
      "and fixes everything else. Perimetric nonexpansive but not nonexpansive.";
  s.dimension = 2;
  s.norm = NormSpec::l1();
  s.domain = DomainSpec{RayUnion{{pt({0, 0}), pt({1, 0}), pt({0, 1})}, pt({1, 1}), 1.0, 4.0, 0.5}, s.norm};

  const DomainSpec moved{FiniteSet{{pt({1, 0}), pt({0, 1})}}, s.norm};
  const DomainSpec still{RayUnion{{pt({0, 0})}, pt({1, 1}), 1.0, 4.0, 0.5}, s.norm};
  s.mapping = make_mapping(Piecewise{{
      Piece{moved, make_mapping(Affine{Eigen::MatrixXd::Zero(2, 2), pt({1, 1})})},
      Piece{still, identity_map(2)},
  }});
  s.sampler = SamplerConfig{0, 10, SampleStrategy::Grid};
  s.tags = {"reference-example", "classification-only"};
  return s;
}

Scenario unit_shift() {
  Scenario s;
  s.name = "example_2_3";
  s.description = "Tx = x + 1 on the nonnegative half-line. Isometric, no fixed point.";
  s.dimension = 1;
  s.norm = NormSpec::l1();
  s.domain = DomainSpec{RayUnion{{}, pt({1}), 0.0, 4.0, 0.5}, s.norm};
  s.mapping = make_mapping(Translation{pt({1})});
  s.sampler = SamplerConfig{0, 9, SampleStrategy::Grid};
  s.tags = {"reference-example", "no-fixed-point"};
  s.start = pt({0});
  return s;
}

Scenario point_reflection() {
  Scenario s;
  s.name = "example_2_4";
  s.description = "T(x,y) = (1-x, 1-y) on the L1 unit square. Every point other than the centre has period 2.";
  s.dimension = 2;
  s.norm = NormSpec::l1();
  s.domain = DomainSpec{Box{pt({0, 0}), pt({1, 1}), {21, 21}}, s.norm};
  Eigen::MatrixXd reflect(2, 2);
  reflect << -1, 0, 0, -1;
  s.mapping = make_mapping(Affine{reflect, pt({1, 1})});
  s.sampler = SamplerConfig{0, 441, SampleStrategy::Grid};
  s.tolerances.tol_fix = 1e-6;
  s.tags = {"reference-example", "period-2"};
  s.start = pt({0, 0});
  return s;
}

}  // namespace

std::vector<Scenario> corpus() { return {two_point_spike(), unit_shift(), point_reflection()}; }

std::vector<std::filesystem::path> write_corpus(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& s : corpus()) {
    const auto path = dir / (s.name + ".json");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::InvalidSpec, "cannot write " + path.string());
    out << canonical_dump(to_json(s));
    written.push_back(path);
  }
  return written;
}

}  // namespace perimap
