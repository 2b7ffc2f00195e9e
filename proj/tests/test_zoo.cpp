#include <doctest.h>

#include <cmath>

#include "finwalk/rng.hpp"
#include "finwalk/zoo.hpp"

using namespace finwalk;

namespace {

// Independent route to the Zermelo norm: bisection on the indicatrix
// condition h(y/s - W, y/s - W) = 1.
double navigation_root(const RiemannianField& h, const VectorField& wind, const ChartPoint& p,
                       const Vec& y) {
  const Mat hm = h.value(p);
  const Vec w = wind.value(p);
  auto inside = [&](double s) {
    const Vec v = y / s - w;
    return v.dot(hm * v) < 1.0;
  };
  double lo = 1e-9, hi = 1.0;
  while (!inside(hi)) {
    hi *= 2.0;
    REQUIRE(hi < 1e9);
  }
  while (inside(lo)) {
    lo *= 0.5;
    REQUIRE(lo > 1e-300);
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (inside(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("closed-form navigation norm against the root-solve oracle") {
  Philox rng(101);
  for (const Geometry& geo : {make_katok(0.3), make_flat_randers(make_vec({0.4, 0.25}))}) {
    const auto& randers = dynamic_cast<const RandersMetric&>(*geo.metric);
    for (int i = 0; i < 1000; ++i) {
      ChartPoint p{0, make_vec({rng.uniform(-1.0, 1.0), rng.uniform(-0.9, 0.9)})};
      Vec y = make_vec({rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)});
      if (y.norm() < 0.05) continue;
      const double closed = geo.metric->value(p, y);
      const double root =
          navigation_root(randers.navigation_metric(), randers.wind(), p, y);
      CHECK(std::abs(closed - root) <= 1e-10 * root);
    }
  }
}

TEST_CASE("zero wind reduces to the Riemannian norm") {
  const Geometry katok0 = make_katok(0.0);
  const Geometry sphere = make_round_sphere();
  CHECK(katok0.metric->reversible());
  Philox rng(7);
  for (int i = 0; i < 1000; ++i) {
    ChartPoint p{0, make_vec({rng.uniform(-2.0, 2.0), rng.uniform(-1.2, 1.2)})};
    Vec y = make_vec({rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)});
    CHECK(std::abs(katok0.metric->value(p, y) - sphere.metric->value(p, y)) <= 1e-12);
  }
}

TEST_CASE("equatorial values of the rotating metric") {
  const Geometry geo = make_katok(0.5);
  const ChartPoint p{0, make_vec({1.1, 0.0})};
  const Vec e_psi = make_vec({1.0, 0.0});
  CHECK(geo.metric->value(p, e_psi) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(geo.metric->value(p, -e_psi) == doctest::Approx(2.0).epsilon(1e-14));
  // Non-reversibility product F(d_psi) F(-d_psi) = 1/(1 - r^2).
  CHECK(geo.metric->value(p, e_psi) * geo.metric->value(p, -e_psi) ==
        doctest::Approx(1.0 / (1.0 - 0.25)).epsilon(1e-12));
  CHECK_FALSE(geo.metric->reversible());
}

TEST_CASE("indicatrix is the shifted unit sphere") {
  const Geometry geo = make_katok(0.5);
  const auto& randers = dynamic_cast<const RandersMetric&>(*geo.metric);
  for (const double theta : {0.0, 0.5, -0.8}) {
    ChartPoint p{0, make_vec({0.4, theta})};
    const Mat h = randers.navigation_metric().value(p);
    const Vec w = randers.wind().value(p);
    const Mat l = h.llt().matrixL();
    for (int k = 0; k < 32; ++k) {
      const double a = 2.0 * M_PI * k / 32;
      // v = L^{-T} u has h(v,v) = |u|^2 = 1.
      const Vec v =
          l.transpose().triangularView<Eigen::Upper>().solve(make_vec({std::cos(a), std::sin(a)}));
      CHECK(std::abs(v.dot(h * v) - 1.0) <= 1e-12);
      CHECK(std::abs(geo.metric->value(p, v + w) - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("round sphere norm values") {
  const Geometry geo = make_round_sphere();
  const Vec e_psi = make_vec({1.0, 0.0});
  CHECK(geo.metric->value({0, make_vec({0.0, 0.0})}, e_psi) == doctest::Approx(1.0));
  CHECK(geo.metric->value({0, make_vec({0.0, M_PI / 3.0})}, e_psi) ==
        doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("wind components agree across charts") {
  // The rotation field pushed to chart 1 must embed to the same vector.
  SphereAtlas atlas;
  const auto wind = rotation_wind(0.5);
  Philox rng(13);
  for (int i = 0; i < 100; ++i) {
    ChartPoint p{0, make_vec({rng.uniform(-3.0, 3.0), rng.uniform(-1.3, 1.3)})};
    const ChartPoint q = atlas.express(p, 1);
    const Vec pushed = atlas.express_tangent(p, wind->value(p), 1);
    CHECK((pushed - wind->value(q)).cwiseAbs().maxCoeff() <= 1e-11);
  }
}

TEST_CASE("disc bounding box contains the indicatrix") {
  Philox rng(19);
  for (const Geometry& geo : {make_katok(0.5), make_flat_randers(make_vec({0.3, -0.5})),
                              make_round_sphere()}) {
    ChartPoint p{0, make_vec({0.3, 0.4})};
    Vec lo, hi;
    geo.metric->disc_box(p, lo, hi);
    for (int k = 0; k < 256; ++k) {
      const double a = 2.0 * M_PI * k / 256;
      const Vec u = make_vec({std::cos(a), std::sin(a)});
      const Vec boundary = u / geo.metric->value(p, u);
      for (int i = 0; i < 2; ++i) {
        CHECK(boundary[i] >= lo[i] - 1e-12);
        CHECK(boundary[i] <= hi[i] + 1e-12);
      }
    }
  }
}

TEST_CASE("construction guards") {
  CHECK_THROWS_AS(make_katok(1.2), Error);
  const Geometry fast = make_flat_randers(make_vec({1.0, 0.0}));
  CHECK_THROWS_WITH_AS(fast.metric->value({0, make_vec({0.0, 0.0})}, make_vec({1.0, 0.0})),
                       doctest::Contains("navigation_too_fast"), Error);
  CHECK_THROWS_AS(make_geometry("nonsense", {}), Error);
  CHECK(make_geometry("katok", {{"r", 0.25}}).metric->name() == "katok(0.250000)");
}
