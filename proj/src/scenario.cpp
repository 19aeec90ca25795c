#include "perimap/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace perimap {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& message) {
  throw Error(ErrorKind::SchemaError, message, path.empty() ? "/" : path);
}

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

void expect_object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) schema_error(path, "expected an object");
  std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) schema_error(child(path, k), "unknown field");
}

const json& field(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) schema_error(child(path, key), "missing required field");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema_error(path, "expected a finite number");
  return v;
}

std::uint64_t unsigned_int(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) schema_error(path, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

std::string string(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

Point point(const json& j, const std::string& path, Eigen::Index dim) {
  if (!j.is_array()) schema_error(path, "expected an array of numbers");
  if (Eigen::Index(j.size()) != dim)
    schema_error(path, "expected " + std::to_string(dim) + " coordinates, got " + std::to_string(j.size()));
  Point p(dim);
  for (std::size_t i = 0; i < j.size(); ++i) p[Eigen::Index(i)] = number(j[i], child(path, i));
  return p;
}

std::vector<Point> points(const json& j, const std::string& path, Eigen::Index dim) {
  if (!j.is_array()) schema_error(path, "expected an array of points");
  std::vector<Point> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(point(j[i], child(path, i), dim));
  return out;
}

NormSpec parse_norm(const json& j, const std::string& path, Eigen::Index dim) {
  const json obj = j.is_string() ? json{{"kind", j}} : j;
  expect_object(obj, path, {"kind", "weights", "p"});
  const auto kind = string(field(obj, "kind", path), child(path, "kind"));
  NormSpec n;
  if (kind == "L1") n = NormSpec::l1();
  else if (kind == "L2") n = NormSpec::l2();
  else if (kind == "LINF") n = NormSpec::linf();
  else if (kind == "WEIGHTED_P")
    n = NormSpec::weighted(point(field(obj, "weights", path), child(path, "weights"), dim),
                           number(field(obj, "p", path), child(path, "p")));
  else schema_error(child(path, "kind"), "unknown norm '" + kind + "'");
  try {
    n.validate(dim);
  } catch (const Error& e) {
    throw Error(ErrorKind::SchemaError, e.message(), path);
  }
  return n;
}

DomainSpec parse_domain(const json& j, const std::string& path, Eigen::Index dim, const NormSpec& norm) {
  if (!j.is_object()) schema_error(path, "expected an object");
  const auto kind = string(field(j, "kind", path), child(path, "kind"));
  DomainSpec K;
  K.norm = norm;
  if (kind == "FINITE") {
    expect_object(j, path, {"kind", "points"});
    K.shape = FiniteSet{points(field(j, "points", path), child(path, "points"), dim)};
  } else if (kind == "BOX") {
    expect_object(j, path, {"kind", "lower", "upper", "resolution"});
    Box b;
    b.lower = point(field(j, "lower", path), child(path, "lower"), dim);
    b.upper = point(field(j, "upper", path), child(path, "upper"), dim);
    const auto& res = field(j, "resolution", path);
    if (!res.is_array()) schema_error(child(path, "resolution"), "expected an array of integers");
    for (std::size_t i = 0; i < res.size(); ++i) {
      const auto r = unsigned_int(res[i], child(child(path, "resolution"), i));
      if (r > 100000) schema_error(child(child(path, "resolution"), i), "resolution too large");
      b.resolution.push_back(int(r));
    }
    K.shape = std::move(b);
  } else if (kind == "RAY_UNION") {
    expect_object(j, path, {"kind", "base", "direction", "alpha_min", "alpha_max", "step"});
    RayUnion r;
    if (j.contains("base")) r.base = points(j["base"], child(path, "base"), dim);
    r.direction = point(field(j, "direction", path), child(path, "direction"), dim);
    if (j.contains("alpha_min")) r.alpha_min = number(j["alpha_min"], child(path, "alpha_min"));
    r.alpha_max = j.contains("alpha_max") ? number(j["alpha_max"], child(path, "alpha_max"))
                                          : std::max(4.0, r.alpha_min + 1.0);
    if (j.contains("step")) r.step = number(j["step"], child(path, "step"));
    K.shape = std::move(r);
  } else {
    schema_error(child(path, "kind"), "unknown domain kind '" + kind + "'");
  }
  try {
    validate(K, dim);
  } catch (const Error& e) {
    throw Error(e.kind(), e.message(), path);
  }
  return K;
}

MappingPtr parse_mapping(const json& j, const std::string& path, Eigen::Index dim, const NormSpec& norm) {
  if (!j.is_object()) schema_error(path, "expected an object");
  const auto kind = string(field(j, "kind", path), child(path, "kind"));
  auto unit = [&](const char* key) {
    const double v = number(field(j, key, path), child(path, key));
    if (!(v >= 0.0 && v <= 1.0)) schema_error(child(path, key), "must lie in [0,1]");
    return v;
  };
  if (kind == "AFFINE") {
    expect_object(j, path, {"kind", "matrix", "offset"});
    const auto& rows = field(j, "matrix", path);
    const auto mpath = child(path, "matrix");
    if (!rows.is_array() || Eigen::Index(rows.size()) != dim)
      schema_error(mpath, "expected " + std::to_string(dim) + " rows");
    Eigen::MatrixXd A(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) A.row(r) = point(rows[r], child(mpath, std::size_t(r)), dim).transpose();
    return make_mapping(Affine{std::move(A), point(field(j, "offset", path), child(path, "offset"), dim)});
  }
  if (kind == "TRANSLATION") {
    expect_object(j, path, {"kind", "offset"});
    return make_mapping(Translation{point(field(j, "offset", path), child(path, "offset"), dim)});
  }
  if (kind == "SCALED") {
    expect_object(j, path, {"kind", "factor", "inner"});
    return make_mapping(Scaled{unit("factor"), parse_mapping(field(j, "inner", path), child(path, "inner"), dim, norm)});
  }
  if (kind == "ANCHORED") {
    expect_object(j, path, {"kind", "anchor", "weight", "inner"});
    return make_mapping(Anchored{point(field(j, "anchor", path), child(path, "anchor"), dim), unit("weight"),
                                 parse_mapping(field(j, "inner", path), child(path, "inner"), dim, norm)});
  }
  if (kind == "TABULATED") {
    expect_object(j, path, {"kind", "table"});
    const auto& table = field(j, "table", path);
    const auto tpath = child(path, "table");
    if (!table.is_array()) schema_error(tpath, "expected an array of {in, out} entries");
    Tabulated t;
    for (std::size_t i = 0; i < table.size(); ++i) {
      const auto epath = child(tpath, i);
      expect_object(table[i], epath, {"in", "out"});
      t.table.emplace_back(point(field(table[i], "in", epath), child(epath, "in"), dim),
                           point(field(table[i], "out", epath), child(epath, "out"), dim));
    }
    return make_mapping(std::move(t));
  }
  if (kind == "PIECEWISE") {
    expect_object(j, path, {"kind", "pieces"});
    const auto& pieces = field(j, "pieces", path);
    const auto ppath = child(path, "pieces");
    if (!pieces.is_array()) schema_error(ppath, "expected an array of {region, map} entries");
    Piecewise pw;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const auto epath = child(ppath, i);
      expect_object(pieces[i], epath, {"region", "map"});
      pw.pieces.push_back(Piece{parse_domain(field(pieces[i], "region", epath), child(epath, "region"), dim, norm),
                                parse_mapping(field(pieces[i], "map", epath), child(epath, "map"), dim, norm)});
    }
    return make_mapping(std::move(pw));
  }
  schema_error(child(path, "kind"), "unknown mapping kind '" + kind + "'");
}

ScheduleSpec parse_schedule(const json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  const auto kind = string(field(j, "kind", path), child(path, "kind"));
  ScheduleSpec s;
  if (kind == "HARMONIC") {
    expect_object(j, path, {"kind", "n_max"});
    s.kind = ScheduleKind::Harmonic;
    s.n_max = unsigned_int(field(j, "n_max", path), child(path, "n_max"));
  } else if (kind == "GEOMETRIC") {
    expect_object(j, path, {"kind", "rho", "n_max"});
    s.kind = ScheduleKind::Geometric;
    s.rho = number(field(j, "rho", path), child(path, "rho"));
    s.n_max = unsigned_int(field(j, "n_max", path), child(path, "n_max"));
  } else if (kind == "EXPLICIT") {
    expect_object(j, path, {"kind", "values"});
    s.kind = ScheduleKind::Explicit;
    const auto& values = field(j, "values", path);
    if (!values.is_array()) schema_error(child(path, "values"), "expected an array of numbers");
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto vpath = child(child(path, "values"), i);
      const double v = number(values[i], vpath);
      if (!(v > 0.0 && v < 1.0)) schema_error(vpath, "schedule values must lie strictly between 0 and 1");
      if (!s.values.empty() && v < s.values.back()) schema_error(vpath, "schedule values must be nondecreasing");
      s.values.push_back(v);
    }
  } else {
    schema_error(child(path, "kind"), "unknown schedule kind '" + kind + "'");
  }
  try {
    s.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::SchemaError, e.message(), path);
  }
  return s;
}

}  // namespace

Tolerances tolerances_from_json(const json& j, const std::string& path) {
  expect_object(j, path, {"eps_distinct", "tau_zero", "tau_rel", "tau_abs", "tau_strict", "tol_fix", "inner_tol"});
  Tolerances t;
  auto read = [&](const char* key, double& dst) {
    if (!j.contains(key)) return;
    dst = number(j[key], child(path, key));
    if (!(dst >= 0.0)) schema_error(child(path, key), "tolerances must be nonnegative");
  };
  read("eps_distinct", t.eps_distinct);
  read("tau_zero", t.tau_zero);
  read("tau_rel", t.tau_rel);
  read("tau_abs", t.tau_abs);
  read("tau_strict", t.tau_strict);
  read("tol_fix", t.tol_fix);
  read("inner_tol", t.inner_tol);
  return t;
}

Point point_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array of numbers");
  return point(j, path, Eigen::Index(j.size()));
}

namespace {

SamplerConfig parse_sampler(const json& j, const std::string& path) {
  expect_object(j, path, {"seed", "n_points", "strategy"});
  SamplerConfig c;
  if (j.contains("seed")) c.seed = unsigned_int(j["seed"], child(path, "seed"));
  if (j.contains("n_points")) c.n_points = unsigned_int(j["n_points"], child(path, "n_points"));
  if (c.n_points == 0) schema_error(child(path, "n_points"), "must be positive");
  if (j.contains("strategy")) {
    const auto s = string(j["strategy"], child(path, "strategy"));
    if (s == "GRID") c.strategy = SampleStrategy::Grid;
    else if (s == "UNIFORM_RANDOM") c.strategy = SampleStrategy::UniformRandom;
    else if (s == "HYBRID") c.strategy = SampleStrategy::Hybrid;
    else schema_error(child(path, "strategy"), "unknown strategy '" + s + "'");
  }
  return c;
}

// every lattice point of the domain must fall into some piece
void check_cover(const Scenario& s) {
  const auto* pw = std::get_if<Piecewise>(&s.mapping->variant);
  if (!pw) return;
  for (const auto& x : lattice(s.domain)) {
    bool covered = false;
    for (const auto& piece : pw->pieces) covered = covered || contains(piece.region, x, s.tolerances.tau_abs);
    if (!covered) throw Error(ErrorKind::InvalidSpec, "piecewise regions do not cover the domain", "/mapping/pieces");
  }
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  expect_object(doc, "", {"schema_version", "name", "description", "dimension", "norm", "domain", "mapping",
                          "tolerances", "sampler", "tags", "start", "schedule"});
  if (doc.contains("schema_version") && string(doc["schema_version"], "/schema_version") != kSchemaVersion)
    schema_error("/schema_version", "unsupported schema version");
  Scenario s;
  if (doc.contains("name")) s.name = string(doc["name"], "/name");
  if (doc.contains("description")) s.description = string(doc["description"], "/description");
  const auto dim = unsigned_int(field(doc, "dimension", ""), "/dimension");
  if (dim < 1 || dim > 4096) schema_error("/dimension", "dimension must lie in [1, 4096]");
  s.dimension = Eigen::Index(dim);
  s.norm = parse_norm(field(doc, "norm", ""), "/norm", s.dimension);
  s.domain = parse_domain(field(doc, "domain", ""), "/domain", s.dimension, s.norm);
  s.mapping = parse_mapping(field(doc, "mapping", ""), "/mapping", s.dimension, s.norm);
  if (doc.contains("tolerances")) s.tolerances = tolerances_from_json(doc["tolerances"], "/tolerances");
  if (doc.contains("sampler")) s.sampler = parse_sampler(doc["sampler"], "/sampler");
  // finite sets default to full enumeration
  if (const auto* f = std::get_if<FiniteSet>(&s.domain.shape);
      f && !(doc.contains("sampler") && doc["sampler"].contains("n_points")))
    s.sampler.n_points = f->points.size();
  if (doc.contains("tags")) {
    if (!doc["tags"].is_array()) schema_error("/tags", "expected an array of strings");
    for (std::size_t i = 0; i < doc["tags"].size(); ++i) s.tags.push_back(string(doc["tags"][i], child("/tags", i)));
  }
  if (doc.contains("schedule")) s.schedule = parse_schedule(doc["schedule"], "/schedule");
  try {
    validate(*s.mapping, s.dimension, s.tolerances);
  } catch (const Error& e) {
    throw Error(e.kind(), e.message(), "/mapping");
  }
  check_cover(s);
  if (doc.contains("start")) {
    s.start = point(doc["start"], "/start", s.dimension);
    if (!contains(s.domain, *s.start, s.tolerances.tau_abs))
      throw Error(ErrorKind::InvalidSpec, "start point lies outside the domain", "/start");
  }
  return s;
}

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, e.what(), "/");
  }
  return parse_scenario(doc);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

Point Scenario::start_point() const {
  if (start) return *start;
  return lattice(domain).front();
}

bool Scenario::has_tag(const std::string& tag) const {
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

// ---------------------------------------------------------------------------
// Serialization

json point_json(const Point& p) {
  json a = json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) a.push_back(p[i]);
  return a;
}

namespace {

json points_json(const std::vector<Point>& ps) {
  json a = json::array();
  for (const auto& p : ps) a.push_back(point_json(p));
  return a;
}

json norm_json(const NormSpec& n) {
  json j{{"kind", to_string(n.kind)}};
  if (n.kind == NormKind::WeightedP) {
    j["weights"] = point_json(n.weights);
    j["p"] = n.p;
  }
  return j;
}

}  // namespace

json to_json(const DomainSpec& K) {
  if (const auto* f = std::get_if<FiniteSet>(&K.shape)) return {{"kind", "FINITE"}, {"points", points_json(f->points)}};
  if (const auto* b = std::get_if<Box>(&K.shape))
    return {{"kind", "BOX"}, {"lower", point_json(b->lower)}, {"upper", point_json(b->upper)}, {"resolution", b->resolution}};
  const auto& r = std::get<RayUnion>(K.shape);
  return {{"kind", "RAY_UNION"}, {"base", points_json(r.base)}, {"direction", point_json(r.direction)},
          {"alpha_min", r.alpha_min}, {"alpha_max", r.alpha_max}, {"step", r.step}};
}

json to_json(const MappingSpec& T) {
  return std::visit(
      [](const auto& v) -> json {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Affine>) {
          json rows = json::array();
          for (Eigen::Index r = 0; r < v.matrix.rows(); ++r) rows.push_back(point_json(v.matrix.row(r).transpose()));
          return {{"kind", "AFFINE"}, {"matrix", rows}, {"offset", point_json(v.offset)}};
        } else if constexpr (std::is_same_v<V, Translation>) {
          return {{"kind", "TRANSLATION"}, {"offset", point_json(v.offset)}};
        } else if constexpr (std::is_same_v<V, Scaled>) {
          return {{"kind", "SCALED"}, {"factor", v.factor}, {"inner", to_json(*v.inner)}};
        } else if constexpr (std::is_same_v<V, Anchored>) {
          return {{"kind", "ANCHORED"}, {"anchor", point_json(v.anchor)}, {"weight", v.weight}, {"inner", to_json(*v.inner)}};
        } else if constexpr (std::is_same_v<V, Tabulated>) {
          json table = json::array();
          for (const auto& [in, out] : v.table) table.push_back({{"in", point_json(in)}, {"out", point_json(out)}});
          return {{"kind", "TABULATED"}, {"table", table}};
        } else {
          json pieces = json::array();
          for (const auto& p : v.pieces) pieces.push_back({{"region", to_json(p.region)}, {"map", to_json(*p.map)}});
          return {{"kind", "PIECEWISE"}, {"pieces", pieces}};
        }
      },
      T.variant);
}

json to_json(const ScheduleSpec& s) {
  switch (s.kind) {
    case ScheduleKind::Harmonic: return {{"kind", "HARMONIC"}, {"n_max", s.n_max}};
    case ScheduleKind::Geometric: return {{"kind", "GEOMETRIC"}, {"rho", s.rho}, {"n_max", s.n_max}};
    case ScheduleKind::Explicit: return {{"kind", "EXPLICIT"}, {"values", s.values}};
  }
  return {};
}

json to_json(const Tolerances& t) {
  return {{"eps_distinct", t.eps_distinct}, {"tau_zero", t.tau_zero},     {"tau_rel", t.tau_rel},
          {"tau_abs", t.tau_abs},           {"tau_strict", t.tau_strict}, {"tol_fix", t.tol_fix},
          {"inner_tol", t.inner_tol}};
}

json to_json(const Scenario& s) {
  json j{
      {"schema_version", kSchemaVersion},
      {"name", s.name},
      {"dimension", s.dimension},
      {"norm", norm_json(s.norm)},
      {"domain", to_json(s.domain)},
      {"mapping", to_json(*s.mapping)},
      {"tolerances", to_json(s.tolerances)},
      {"sampler",
       {{"seed", s.sampler.seed}, {"n_points", s.sampler.n_points}, {"strategy", to_string(s.sampler.strategy)}}},
      {"tags", s.tags},
  };
  if (!s.description.empty()) j["description"] = s.description;
  if (s.start) j["start"] = point_json(*s.start);
  if (s.schedule) j["schedule"] = to_json(*s.schedule);
  return j;
}

namespace {

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

void dump(const json& j, std::string& out, int indent) {
  const std::string pad(std::size_t(indent) * 2, ' ');
  const std::string inner(std::size_t(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + json(it.key()).dump() + ": ";
        dump(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // arrays of scalars stay on one line
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return !e.is_structured(); });
      out += flat ? "[" : "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += flat ? ", " : ",\n";
        if (!flat) out += inner;
        dump(j[i], out, indent + 1);
      }
      out += flat ? "]" : "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string canonical_dump(const json& doc) {
  std::string out;
  dump(doc, out, 0);
  out += "\n";
  return out;
}

}  // namespace perimap
