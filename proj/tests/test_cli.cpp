#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "perimap/cli.hpp"
#include "perimap/report.hpp"

using namespace perimap;
using nlohmann::json;

namespace {

const std::string kCorpus = PERIMAP_CORPUS_DIR;

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scenario(const std::string& name) { return kCorpus + "/" + name + ".json"; }

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("perimap_cli_" + name);
}

// Scoped PERIMAP_SEED.
struct SeedEnv {
  explicit SeedEnv(const char* value) { ::setenv("PERIMAP_SEED", value, 1); }
  ~SeedEnv() { ::unsetenv("PERIMAP_SEED"); }
};

}  // namespace

TEST_CASE("classify example_2_2") {
  const auto r = run({"classify", scenario("example_2_2"), "--exhaustive"});
  CHECK(r.code == kExitOk);
  const auto doc = json::parse(r.out);
  const auto& v = doc["classification"]["verdicts"];
  CHECK(v["PERIMETRIC_NONEXPANSIVE"]["status"] == "HOLDS");
  CHECK(v["NONEXPANSIVE"]["status"] == "FAILS");
  CHECK(v["NONEXPANSIVE"]["witness"]["points"] == json::parse("[[1.0, 0.0], [0.0, 0.0]]"));
  CHECK(v["NONEXPANSIVE"]["witness"]["observed"] == 2.0);
  CHECK(v["NONEXPANSIVE"]["witness"]["bound"] == 1.0);
  CHECK(v["QUASI_NONEXPANSIVE"]["status"] == "FAILS");
  CHECK(doc["schema_version"] == "1");
  CHECK(doc["generator"] == "mt19937_64/splitmix64");
  CHECK(run({"classify", scenario("example_2_2")}).code == kExitOk);
}

TEST_CASE("classify exits 1 when the perimetric audit fails") {
  const auto path = temp_path("spread.json");
  std::ofstream(path) << R"({"dimension": 2, "norm": "L1",
    "domain": {"kind": "FINITE", "points": [[0, 0], [1, 0], [0, 1], [3, 3]]},
    "mapping": {"kind": "TABULATED", "table": [{"in": [0, 0], "out": [3, 3]}, {"in": [1, 0], "out": [1, 0]},
                                               {"in": [0, 1], "out": [0, 1]}, {"in": [3, 3], "out": [3, 3]}]}})";
  CHECK(run({"classify", path.string()}).code == kExitFinding);
  std::filesystem::remove(path);
}

TEST_CASE("solve examples") {
  {
    const auto r = run({"solve", "--method", "damped", scenario("example_2_4"), "--tol", "1e-6"});
    CHECK(r.code == kExitOk);
    const auto s = json::parse(r.out)["solves"][0];
    CHECK(s["termination"] == "CONVERGED");
    CHECK(std::abs(s["candidate"][0].get<double>() - 0.5) <= 1e-6);
    CHECK(std::abs(s["candidate"][1].get<double>() - 0.5) <= 1e-6);
  }
  {
    const auto r = run({"solve", "--method", "picard", scenario("example_2_3")});
    CHECK(r.code == kExitFinding);
    const auto s = json::parse(r.out)["solves"][0];
    CHECK(s["termination"] == "RESIDUAL_FLOOR");
    CHECK(s["residual"] == 1.0);
  }
  {
    const auto r = run({"solve", "--method", "picard", scenario("example_2_4"), "--trace"});
    CHECK(r.code == kExitFinding);
    const auto s = json::parse(r.out)["solves"][0];
    CHECK(s["termination"] == "PERIOD2_OBSTRUCTION");
    CHECK(s["trace"].size() >= 2);
  }
  {
    const auto r = run({"solve", "--method", "anchored", scenario("example_2_4"), "--schedule", "geometric:0.5",
                        "--n-max", "40", "--tol", "1e-9"});
    CHECK(r.code == kExitOk);
  }
}

TEST_CASE("detect-period2 and verify") {
  CHECK(run({"detect-period2", scenario("example_2_4")}).code == kExitFinding);
  CHECK(run({"detect-period2", scenario("example_2_3")}).code == kExitOk);
  for (const char* suite : {"continuity", "closed-set", "hierarchy"})
    for (const char* name : {"example_2_2", "example_2_3", "example_2_4"}) {
      CAPTURE(suite);
      CAPTURE(name);
      CHECK(run({"verify", scenario(name), "--suite", suite}).code == kExitOk);
    }
  CHECK(run({"verify", scenario("example_2_4"), "--suite", "scaling", "--c", "0.5,0.9"}).code == kExitOk);
  // the ray union is not convex
  const auto r = run({"verify", scenario("example_2_2"), "--suite", "scaling"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("PreconditionViolation") != std::string::npos);
}

TEST_CASE("usage and parse errors exit 2") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"classify"}).code == kExitUsage);
  CHECK(run({"solve", scenario("example_2_4")}).code == kExitUsage);
  CHECK(run({"solve", scenario("example_2_4"), "--method", "newton"}).code == kExitUsage);
  CHECK(run({"verify", scenario("example_2_4"), "--suite", "everything"}).code == kExitUsage);
  CHECK(run({"classify", "/nonexistent.json"}).code == kExitUsage);
  const auto bad = temp_path("bad.json");
  std::ofstream(bad) << R"({"dimension": 2, "norm": "L1", "domain": {"kind": "BOX"}})";
  const auto r = run({"classify", bad.string()});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("/domain/lower") != std::string::npos);
  std::filesystem::remove(bad);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("re-runs are byte identical") {
  const std::vector<std::vector<std::string>> commands{
      {"classify", scenario("example_2_2"), "--exhaustive"},
      {"solve", scenario("example_2_4"), "--method", "anchored", "--n-max", "200", "--trace"},
      {"detect-period2", scenario("example_2_4")},
      {"verify", scenario("example_2_4"), "--suite", "hierarchy"},
  };
  for (const auto& c : commands) {
    const auto a = run(c), b = run(c);
    CHECK(a.out == b.out);
    CHECK(!a.out.empty());
  }
}

TEST_CASE("seed precedence") {
  const auto path = temp_path("random.json");
  auto doc = json::parse(std::ifstream(scenario("example_2_4")));
  doc["sampler"] = json{{"strategy", "UNIFORM_RANDOM"}, {"n_points", 30}, {"seed", 5}};
  std::ofstream(path) << doc.dump();
  const auto seed_of = [](const Run& r) { return json::parse(r.out)["seed"].get<std::uint64_t>(); };

  const auto plain = run({"classify", path.string()});
  CHECK(seed_of(plain) == 5);
  CHECK(seed_of(run({"classify", path.string(), "--seed", "9"})) == 9);
  {
    SeedEnv env("11");
    const auto from_env = run({"classify", path.string()});
    CHECK(seed_of(from_env) == 11);
    CHECK(from_env.out != plain.out);
    CHECK(seed_of(run({"classify", path.string(), "--seed", "9"})) == 9);
    CHECK(run({"classify", path.string()}).out == from_env.out);
  }
  {
    SeedEnv env("eleven");
    CHECK(run({"classify", path.string()}).code == kExitUsage);
  }
  std::filesystem::remove(path);
}

TEST_CASE("report re-emission") {
  const auto saved = temp_path("run.json");
  REQUIRE(run({"classify", scenario("example_2_2"), "--exhaustive", "--out", saved.string()}).code == kExitOk);
  std::ifstream in(saved);
  std::stringstream original;
  original << in.rdbuf();

  const auto again = run({"report", saved.string(), "--format", "json"});
  CHECK(again.code == kExitOk);
  CHECK(again.out == original.str());

  const auto csv = run({"report", saved.string(), "--format", "csv"});
  CHECK(csv.code == kExitOk);
  CHECK(csv.out.find("NONEXPANSIVE,FAIL,FAILS,true,1;0,(1 0);(0 0),2,1") != std::string::npos);
  CHECK(csv.out.find("PERIMETRIC_NONEXPANSIVE,PASS,HOLDS,true,,,") != std::string::npos);
  // no solves were run: header only
  const auto solves = csv.out.find("# solves\n");
  REQUIRE(solves != std::string::npos);
  const auto header_end = csv.out.find('\n', solves + 9);
  CHECK(csv.out.compare(header_end + 1, 9, "# suites\n") == 0);

  const auto garbled = temp_path("garbled.json");
  std::ofstream(garbled) << R"({"schema_version": "1"})";
  CHECK(run({"report", garbled.string()}).code == kExitUsage);
  std::filesystem::remove(garbled);
  std::filesystem::remove(saved);
}

TEST_CASE("corpus subcommand") {
  const auto dir = temp_path("corpus");
  std::filesystem::remove_all(dir);
  CHECK(run({"corpus", "--out", dir.string()}).code == kExitOk);
  for (const char* name : {"example_2_2", "example_2_3", "example_2_4"}) {
    std::ifstream a(dir / (std::string(name) + ".json")), b(scenario(name));
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
  }
  std::filesystem::remove_all(dir);
}
