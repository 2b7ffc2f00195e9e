#include <doctest.h>

#include <sstream>

#include "finwalk/config.hpp"
#include "finwalk/io.hpp"

using namespace finwalk;

namespace {

const char* kSample = R"(
# sample experiment
[metric]
name = katok
r = 0.5

[measure]
kind = lebesgue-disc

[walk]
N = 400
T = 0.25
seed = 42
paths = 3
start = 0.1 0.2
)";

}  // namespace

TEST_CASE("config parsing, overrides and builders") {
  RunConfig cfg = RunConfig::from_string(kSample);
  CHECK(cfg.get_long("walk.N", 0) == 400);
  CHECK(cfg.get_double("metric.r", 0.0) == 0.5);

  cfg.apply_override("walk.N=100");
  cfg.apply_override("walk.alpha = 0.0");
  CHECK(cfg.get_long("walk.N", 0) == 100);

  const Geometry geo = cfg.make_geometry();
  CHECK(geo.metric->name() == "katok(0.500000)");
  const auto family = cfg.make_measure(geo);
  CHECK(family->kind() == "lebesgue-disc");
  const WalkConfig walk = cfg.make_walk(geo);
  CHECK(walk.N == 100);
  CHECK(walk.alpha == 0.0);
  CHECK(walk.seed == 42);
  CHECK(walk.start.x[1] == 0.2);

  CHECK(cfg.echo().find("walk.N = 100") != std::string::npos);
}

TEST_CASE("config errors carry their location") {
  CHECK_THROWS_WITH_AS(RunConfig::from_string("key_without_section = 1", "f.ini"),
                       doctest::Contains("f.ini:1"), Error);
  CHECK_THROWS_WITH_AS(RunConfig::from_string("[walk]\nbroken line\n", "f.ini"),
                       doctest::Contains("f.ini:2"), Error);
  RunConfig cfg;
  CHECK_THROWS_AS(cfg.apply_override("no_dot"), Error);
}

TEST_CASE("discrete measure from config text") {
  RunConfig cfg = RunConfig::from_string(R"(
[metric]
name = euclidean
m = 1
[measure]
kind = discrete
atoms = 0.75 : 1 | 0.25 : -1
)");
  const Geometry geo = cfg.make_geometry();
  const auto family = cfg.make_measure(geo);
  CHECK(family->kind() == "discrete");
  CHECK(family->mean(*geo.metric, {0, Vec(Vec::Zero(1))})[0] == doctest::Approx(0.5));
}

TEST_CASE("csv headers carry version, config and seed") {
  const Geometry geo = make_euclidean(2);
  const auto family = make_lebesgue_disc(geo);
  WalkConfig cfg;
  cfg.N = 4;
  cfg.n_steps = 2;
  cfg.seed = 77;
  cfg.paths = 2;
  cfg.start = {0, Vec(Vec::Zero(2))};
  const auto paths = simulate_paths(geo, *family, cfg, PathKind::discrete);

  std::ostringstream out;
  write_paths_csv(out, paths, "walk.N = 4", 77);
  const std::string text = out.str();
  CHECK(text.find("# finwalk") != std::string::npos);
  CHECK(text.find("# config: walk.N = 4") != std::string::npos);
  CHECK(text.find("# seed: 77") != std::string::npos);
  CHECK(text.find("path,kind,t,chart,x0,x1") != std::string::npos);

  // identical runs serialize identically apart from the timestamp line
  std::ostringstream again;
  write_paths_csv(again, simulate_paths(geo, *family, cfg, PathKind::discrete), "walk.N = 4", 77);
  auto strip_timestamp = [](std::string s) {
    const auto a = s.find("# timestamp");
    const auto b = s.find('\n', a);
    return s.erase(a, b - a);
  };
  CHECK(strip_timestamp(out.str()) == strip_timestamp(again.str()));
}

TEST_CASE("estimate json shape") {
  const Geometry geo = make_euclidean(2);
  const auto disc = make_lebesgue_disc(geo);
  const ChartPoint p{0, Vec(Vec::Zero(2))};
  const GeneratorEstimate est = estimate_at(geo, *disc, p);
  const std::string doc = estimates_json({est}, {drift(geo, *disc, p)}, "", 0);
  CHECK(doc.find("\"symbol\"") != std::string::npos);
  CHECK(doc.find("\"provenance\": \"quadrature\"") != std::string::npos);
  CHECK(doc.find("\"drift\"") != std::string::npos);

  const std::string empty = estimates_json({}, {}, "", 0);
  CHECK(empty.find("\"estimates\": []") != std::string::npos);
}
