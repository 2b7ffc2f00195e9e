#include <doctest.h>

#include <cmath>

#include "finwalk/walk.hpp"

using namespace finwalk;

namespace {

std::shared_ptr<MeasureFamily> biased_line_family() {
  return make_discrete_measure({{make_vec({1.0}), 0.75}, {make_vec({-1.0}), 0.25}});
}

std::shared_ptr<MeasureFamily> point_mass(const Vec& v) {
  return make_discrete_measure({{v, 1.0}});
}

bool records_equal(const WalkPath& a, const WalkPath& b) {
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    if (a.records[i].t != b.records[i].t) return false;
    if (a.records[i].chart != b.records[i].chart) return false;
    if (a.records[i].x != b.records[i].x) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("zero steps gives a single record at the start") {
  const Geometry geo = make_euclidean(2);
  const auto family = make_lebesgue_disc(geo);
  WalkConfig cfg;
  cfg.N = 10;
  cfg.n_steps = 0;
  cfg.start = {0, make_vec({0.4, -0.2})};
  const WalkPath path = run_discrete(geo, *family, cfg, 0);
  REQUIRE(path.records.size() == 1);
  CHECK(path.records[0].t == 0.0);
  CHECK(path.records[0].x == cfg.start.x);
}

TEST_CASE("point-mass step is deterministic translation in the flat case") {
  const Geometry geo = make_euclidean(2);
  const Vec v = make_vec({0.3, -0.1});
  const auto family = point_mass(v);
  const ChartPoint p{0, make_vec({1.0, 2.0})};
  Philox rng(0);
  const ChartPoint q = walk_step(*geo.metric, *geo.atlas, *family, p, 1, rng, 1e-3);
  CHECK((q.x - (p.x + v)).cwiseAbs().maxCoeff() <= 1e-12);

  // Degenerate family: every path is the deterministic flow of mu/N steps.
  WalkConfig cfg;
  cfg.N = 4;
  cfg.n_steps = 8;
  cfg.start = p;
  const WalkPath path = run_discrete(geo, *family, cfg, 3);
  for (std::size_t k = 0; k < 8; ++k) {
    const Vec expect = p.x + (static_cast<double>(k + 1) / 4.0) * v;
    CHECK((path.records[k + 1].x - expect).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("chain consistency: stored increments reproduce the chain") {
  const Geometry geo = make_katok(0.5);
  const auto family = make_lebesgue_disc(geo);
  WalkConfig cfg;
  cfg.N = 50;
  cfg.n_steps = 40;
  cfg.seed = 2024;
  cfg.start = {0, make_vec({0.3, 0.1})};
  const WalkPath path = run_discrete(geo, *family, cfg, 1);
  REQUIRE(path.increments.size() == 40);
  for (std::size_t k = 0; k < path.increments.size(); ++k) {
    const ChartPoint from{path.records[k].chart, path.records[k].x};
    const ChartPoint to =
        exp_map(*geo.metric, *geo.atlas, from, path.increments[k], cfg.h_ode);
    CHECK(to.chart == path.records[k + 1].chart);
    CHECK((to.x - path.records[k + 1].x).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("walk stays on the sphere atlas and jumps stay small") {
  const Geometry geo = make_katok(0.5);
  const auto family = make_lebesgue_disc(geo);
  WalkConfig cfg;
  cfg.N = 100;
  cfg.n_steps = 10000;
  cfg.seed = 7;
  cfg.start = {0, make_vec({0.0, 0.0})};
  const WalkPath path = run_discrete(geo, *family, cfg, 0);
  // Coordinate jump bound K/sqrt(N): F of a rescaled draw is at most
  // (1 + F(-mu))/sqrt(N) + F(mu)/N <= 3/sqrt(N); chart coordinates compare
  // to F with a bounded factor away from the poles.
  const double bound = 8.0 / std::sqrt(100.0);
  for (std::size_t k = 0; k + 1 < path.records.size(); ++k) {
    REQUIRE(geo.atlas->in_domain({path.records[k].chart, path.records[k].x}));
    if (path.records[k].chart == path.records[k + 1].chart)
      CHECK((path.records[k + 1].x - path.records[k].x).norm() <= bound);
  }
}

TEST_CASE("identical seeds give bitwise identical paths, any thread count") {
  const Geometry geo = make_katok(0.3);
  const auto family = make_lebesgue_disc(geo);
  WalkConfig cfg;
  cfg.N = 30;
  cfg.T = 0.5;
  cfg.paths = 6;
  cfg.seed = 99;
  cfg.start = {0, make_vec({0.2, 0.1})};

  cfg.threads = 1;
  const auto once = simulate_paths(geo, *family, cfg, PathKind::subordinated);
  const auto twice = simulate_paths(geo, *family, cfg, PathKind::subordinated);
  cfg.threads = 3;
  const auto threaded = simulate_paths(geo, *family, cfg, PathKind::subordinated);

  REQUIRE(once.size() == 6);
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(records_equal(once[i], twice[i]));
    CHECK(records_equal(once[i], threaded[i]));
  }
}

TEST_CASE("biased line walk: endpoint moments") {
  const Geometry geo = make_euclidean(1);
  const auto family = biased_line_family();
  WalkConfig cfg;
  cfg.N = 400;
  cfg.n_steps = 400;
  cfg.paths = 20000;
  cfg.seed = 31;
  cfg.threads = 2;
  cfg.start = {0, Vec(Vec::Zero(1))};

  std::vector<double> endpoint(static_cast<std::size_t>(cfg.paths));
  for_each_path(geo, *family, cfg, PathKind::discrete, [&](const WalkPath& path) {
    endpoint[static_cast<std::size_t>(path.path_index)] = path.records.back().x[0];
  });
  const double n = static_cast<double>(cfg.paths);
  double mean = 0.0;
  for (double v : endpoint) mean += v;
  mean /= n;
  double var = 0.0, m4 = 0.0;
  for (double v : endpoint) {
    var += (v - mean) * (v - mean);
    m4 += std::pow(v - mean, 4);
  }
  var /= n;
  m4 /= n;

  // Exact moments: mean 1/2, variance 3/4.
  const double se_mean = std::sqrt(0.75 / n);
  CHECK(std::abs(mean - 0.5) <= 3.0 * se_mean);
  const double se_var = std::sqrt(std::max(0.0, m4 - var * var) / n);
  CHECK(std::abs(var - 0.75) <= 3.0 * se_var);
}

TEST_CASE("subordination") {
  const Geometry geo = make_euclidean(1);
  const auto family = biased_line_family();

  SUBCASE("zero horizon is the constant path") {
    WalkConfig cfg;
    cfg.N = 100;
    cfg.T = 0.0;
    cfg.start = {0, Vec(Vec::Zero(1))};
    const auto paths = simulate_paths(geo, *family, cfg, PathKind::subordinated);
    REQUIRE(paths[0].records.size() == 1);
    CHECK(paths[0].records[0].t == 0.0);
  }

  SUBCASE("jump counts have Poisson moments") {
    WalkConfig cfg;
    cfg.N = 100;
    cfg.T = 1.0;
    cfg.paths = 10000;
    cfg.seed = 5;
    cfg.threads = 2;
    cfg.start = {0, Vec(Vec::Zero(1))};
    std::vector<double> counts(static_cast<std::size_t>(cfg.paths));
    for_each_path(geo, *family, cfg, PathKind::subordinated, [&](const WalkPath& path) {
      counts[static_cast<std::size_t>(path.path_index)] =
          static_cast<double>(path.records.size() - 1);
    });
    const double n = static_cast<double>(cfg.paths);
    double mean = 0.0;
    for (double c : counts) mean += c;
    mean /= n;
    double var = 0.0;
    for (double c : counts) var += (c - mean) * (c - mean);
    var /= n;
    // Poisson(100): mean 100 (se 0.1), variance 100 (se ~1.42).
    CHECK(std::abs(mean - 100.0) <= 3.0 * 0.1);
    CHECK(std::abs(var - 100.0) <= 3.0 * 1.45);
  }

  SUBCASE("values between jumps are the discrete states, bitwise") {
    WalkConfig cfg;
    cfg.N = 20;
    cfg.T = 1.0;
    cfg.seed = 3;
    cfg.start = {0, Vec(Vec::Zero(1))};
    const WalkPath zeta = run_discrete(geo, *family, cfg, 0);
    Philox clock = clock_stream(cfg.seed, 0);
    const WalkPath xi = subordinate(zeta, clock, cfg.T);
    for (std::size_t j = 0; j < xi.records.size(); ++j) {
      CHECK(xi.records[j].x == zeta.records[j].x);
      if (j > 0) CHECK(xi.records[j].t > xi.records[j - 1].t);
    }
  }

  SUBCASE("insufficient steps is reported when regeneration is off") {
    WalkConfig cfg;
    cfg.N = 1000;
    cfg.n_steps = 2;
    cfg.start = {0, Vec(Vec::Zero(1))};
    const WalkPath zeta = run_discrete(geo, *family, cfg, 0);
    Philox clock = clock_stream(cfg.seed, 0);
    CHECK_THROWS_WITH_AS(subordinate(zeta, clock, 1.0), doctest::Contains("insufficient_steps"),
                         Error);
  }
}

TEST_CASE("interpolation") {
  SUBCASE("slab endpoints are the chain states; flat interpolation is linear") {
    const Geometry geo = make_euclidean(2);
    const auto family = make_lebesgue_disc(geo);
    WalkConfig cfg;
    cfg.N = 8;
    cfg.n_steps = 8;
    cfg.seed = 17;
    cfg.start = {0, Vec(Vec::Zero(2))};
    const WalkPath zeta = run_discrete(geo, *family, cfg, 0);

    std::vector<double> times;
    for (int i = 0; i <= 32; ++i) times.push_back(i / 32.0);
    const WalkPath hat = interpolate(geo, zeta, times, cfg.h_ode);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double t = times[i];
      const double scaled = t * 8.0;
      const long k = std::min<long>(static_cast<long>(scaled), 7);
      const double s = scaled - k;
      const Vec expect = zeta.records[k].x + s * (zeta.records[k + 1].x - zeta.records[k].x);
      CHECK((hat.records[i].x - expect).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  SUBCASE("interior samples lie on the stored geodesic segment") {
    const Geometry geo = make_katok(0.5);
    const auto family = make_lebesgue_disc(geo);
    WalkConfig cfg;
    cfg.N = 10;
    cfg.n_steps = 3;
    cfg.seed = 21;
    cfg.start = {0, make_vec({0.1, 0.2})};
    const WalkPath zeta = run_discrete(geo, *family, cfg, 0);

    const long k = 1;
    const Trajectory segment =
        geodesic_flow(*geo.metric, *geo.atlas, {zeta.records[k].chart, zeta.records[k].x},
                      zeta.increments[k], 1.0, cfg.h_ode);
    std::vector<double> times;
    for (int j = 1; j <= 10; ++j)
      times.push_back((static_cast<double>(k) + j / 11.0) / 10.0);
    const WalkPath hat = interpolate(geo, zeta, times, cfg.h_ode);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double s = times[i] * 10.0 - k;
      // Compare against the trajectory state nearest to parameter s.
      const std::size_t idx = static_cast<std::size_t>(std::llround(s / segment.dt));
      const double gap = std::abs(segment.states[idx].t - s);
      if (gap > 1e-12) continue;  // query between grid nodes
      CHECK((hat.records[i].x - segment.states[idx].x).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }

  SUBCASE("out of horizon is reported") {
    const Geometry geo = make_euclidean(2);
    const auto family = make_lebesgue_disc(geo);
    WalkConfig cfg;
    cfg.N = 4;
    cfg.n_steps = 4;
    cfg.start = {0, Vec(Vec::Zero(2))};
    const WalkPath zeta = run_discrete(geo, *family, cfg, 0);
    CHECK_THROWS_WITH_AS(interpolate(geo, zeta, {1.5}, cfg.h_ode),
                         doctest::Contains("out_of_horizon"), Error);
  }
}

TEST_CASE("exit times") {
  const Geometry geo = make_euclidean(2);
  const DistanceFn dist = make_distance_fn(geo);

  SUBCASE("constant path never exits") {
    WalkPath still;
    still.kind = PathKind::subordinated;
    still.records = {{0.0, 0, make_vec({0.0, 0.0})}, {0.7, 0, make_vec({0.0, 0.0})}};
    CHECK(std::isinf(exit_time(still, {0, make_vec({0.0, 0.0})}, 0.2, dist)));
  }

  SUBCASE("unit drift exits a delta-ball at about t = delta") {
    const auto family = point_mass(make_vec({1.0, 0.0}));
    WalkConfig cfg;
    cfg.N = 100;
    cfg.T = 0.5;
    cfg.paths = 200;
    cfg.seed = 13;
    cfg.start = {0, Vec(Vec::Zero(2))};
    double sum = 0.0;
    long n = 0;
    for (const WalkPath& path : simulate_paths(geo, *family, cfg, PathKind::subordinated)) {
      const double tau = exit_time(path, cfg.start, 0.2, dist);
      REQUIRE(std::isfinite(tau));
      sum += tau;
      ++n;
    }
    CHECK(sum / n == doctest::Approx(0.2).epsilon(0.15));
  }
}

TEST_CASE("discrete and subordinated observables agree at matched times") {
  // E f(xi_1) and E f(zeta_N) for f(x) = x share the same expectation.
  const Geometry geo = make_euclidean(1);
  const auto family = biased_line_family();
  WalkConfig cfg;
  cfg.N = 100;
  cfg.T = 1.0;
  cfg.paths = 20000;
  cfg.seed = 40;
  cfg.threads = 2;
  cfg.start = {0, Vec(Vec::Zero(1))};

  std::vector<double> disc(static_cast<std::size_t>(cfg.paths));
  std::vector<double> sub(static_cast<std::size_t>(cfg.paths));
  WalkConfig dcfg = cfg;
  dcfg.n_steps = 100;
  for_each_path(geo, *family, dcfg, PathKind::discrete, [&](const WalkPath& path) {
    disc[static_cast<std::size_t>(path.path_index)] = path.records.back().x[0];
  });
  WalkConfig scfg = cfg;
  scfg.seed = 41;  // independent realization
  for_each_path(geo, *family, scfg, PathKind::subordinated, [&](const WalkPath& path) {
    sub[static_cast<std::size_t>(path.path_index)] = path.records.back().x[0];
  });
  auto mean_se = [](const std::vector<double>& v, double& mean, double& se) {
    const double n = static_cast<double>(v.size());
    mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= n;
    se = std::sqrt(var / n);
  };
  double m1, s1, m2, s2;
  mean_se(disc, m1, s1);
  mean_se(sub, m2, s2);
  CHECK(std::abs(m1 - m2) <= 4.0 * (s1 + s2));
}

TEST_CASE("step budget covers the horizon with headroom") {
  CHECK(default_step_budget(100, 1.0) >= 140);
  CHECK(default_step_budget(1, 0.0) == 0);
}
