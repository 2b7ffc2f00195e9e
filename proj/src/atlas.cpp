#include "finwalk/atlas.hpp"

#include <algorithm>
#include <cmath>

namespace finwalk {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::singular_direction: return "singular_direction";
    case Errc::not_positive_definite: return "not_positive_definite";
    case Errc::ill_conditioned: return "ill_conditioned";
    case Errc::no_covering_chart: return "no_covering_chart";
    case Errc::left_atlas: return "left_atlas";
    case Errc::energy_drift_exceeded: return "energy_drift_exceeded";
    case Errc::shooting_diverged: return "shooting_diverged";
    case Errc::rejection_budget_exceeded: return "rejection_budget_exceeded";
    case Errc::insufficient_steps: return "insufficient_steps";
    case Errc::out_of_horizon: return "out_of_horizon";
    case Errc::stencil_left_chart: return "stencil_left_chart";
    case Errc::navigation_too_fast: return "navigation_too_fast";
    case Errc::invalid_config: return "invalid_config";
    case Errc::invalid_argument: return "invalid_argument";
  }
  return "unknown";
}

bool ChartAtlas::in_domain(const ChartPoint& p) const {
  if (p.chart < 0 || p.chart >= chart_count()) return false;
  const Chart& c = chart(p.chart);
  for (int i = 0; i < c.dim; ++i) {
    if (!(p.x[i] > c.lo[i] && p.x[i] < c.hi[i])) return false;
  }
  return true;
}

ChartPoint transition(const ChartAtlas& atlas, const ChartPoint& p) {
  if (!atlas.in_domain(p)) raise(Errc::no_covering_chart, "point outside chart domain");
  if (!atlas.wants_switch(p)) return p;
  return atlas.express(p, atlas.switch_target(p));
}

ChartState transition(const ChartAtlas& atlas, const ChartPoint& p, const Vec& y) {
  if (!atlas.in_domain(p)) raise(Errc::no_covering_chart, "point outside chart domain");
  if (!atlas.wants_switch(p)) return {p, y};
  const int target = atlas.switch_target(p);
  return {atlas.express(p, target), atlas.express_tangent(p, y, target)};
}

// ---------------------------------------------------------------------------
// FlatAtlas

FlatAtlas::FlatAtlas(int dim, double half_width) : dim_(dim) {
  chart_.id = 0;
  chart_.dim = dim;
  chart_.lo = Vec::Constant(dim, -half_width);
  chart_.hi = Vec::Constant(dim, half_width);
}

const Chart& FlatAtlas::chart(int id) const {
  if (id != 0) raise(Errc::invalid_argument, "flat atlas has a single chart");
  return chart_;
}

ChartPoint FlatAtlas::express(const ChartPoint& p, int target_chart) const {
  if (target_chart != 0) raise(Errc::invalid_argument, "flat atlas has a single chart");
  return p;
}

Vec FlatAtlas::express_tangent(const ChartPoint&, const Vec& y, int target_chart) const {
  if (target_chart != 0) raise(Errc::invalid_argument, "flat atlas has a single chart");
  return y;
}

// ---------------------------------------------------------------------------
// SphereAtlas

namespace {

constexpr double kPi = 3.14159265358979323846;

// Quarter turn about the x-axis and its inverse.
inline Vec3 rot_x(const Vec3& v) { return Vec3(v[0], -v[2], v[1]); }
inline Vec3 rot_x_inv(const Vec3& v) { return Vec3(v[0], v[2], -v[1]); }

inline Vec3 base_embed(double psi, double theta) {
  const double c = std::cos(theta);
  return Vec3(std::cos(psi) * c, std::sin(psi) * c, std::sin(theta));
}

inline Vec3 base_dpsi(double psi, double theta) {
  const double c = std::cos(theta);
  return Vec3(-std::sin(psi) * c, std::cos(psi) * c, 0.0);
}

inline Vec3 base_dtheta(double psi, double theta) {
  const double s = std::sin(theta);
  return Vec3(-std::cos(psi) * s, -std::sin(psi) * s, std::cos(theta));
}

}  // namespace

SphereAtlas::SphereAtlas(double theta_switch) : theta_switch_(theta_switch) {
  if (!(theta_switch > 0.0 && theta_switch < kPi / 2))
    raise(Errc::invalid_argument, "theta_switch must lie in (0, pi/2)");
  for (int id = 0; id < 2; ++id) {
    charts_[id].id = id;
    charts_[id].dim = 2;
    charts_[id].lo = make_vec({-1e18, -kPi / 2});
    charts_[id].hi = make_vec({1e18, kPi / 2});
  }
}

const Chart& SphereAtlas::chart(int id) const {
  if (id < 0 || id > 1) raise(Errc::invalid_argument, "sphere atlas has charts 0 and 1");
  return charts_[id];
}

bool SphereAtlas::in_domain(const ChartPoint& p) const {
  if (p.chart < 0 || p.chart > 1) return false;
  return std::abs(p.x[1]) < kPi / 2 - 1e-9;
}

bool SphereAtlas::wants_switch(const ChartPoint& p) const {
  return std::abs(p.x[1]) > theta_switch_;
}

int SphereAtlas::switch_target(const ChartPoint& p) const { return 1 - p.chart; }

Vec3 SphereAtlas::embed(const ChartPoint& p) const {
  const Vec3 e = base_embed(p.x[0], p.x[1]);
  return p.chart == 0 ? e : rot_x(e);
}

Vec3 SphereAtlas::embed_tangent(const ChartPoint& p, const Vec& y) const {
  const Vec3 v = y[0] * base_dpsi(p.x[0], p.x[1]) + y[1] * base_dtheta(p.x[0], p.x[1]);
  return p.chart == 0 ? v : rot_x(v);
}

Vec SphereAtlas::coords_from_embedding(int chart, const Vec3& pos) const {
  const Vec3 q = chart == 0 ? pos : rot_x_inv(pos);
  const double z = std::clamp(q[2], -1.0, 1.0);
  return make_vec({std::atan2(q[1], q[0]), std::asin(z)});
}

ChartPoint SphereAtlas::express(const ChartPoint& p, int target_chart) const {
  if (target_chart < 0 || target_chart > 1)
    raise(Errc::invalid_argument, "sphere atlas has charts 0 and 1");
  if (target_chart == p.chart) return p;
  ChartPoint out;
  out.chart = target_chart;
  out.x = coords_from_embedding(target_chart, embed(p));
  if (!in_domain(out))
    raise(Errc::no_covering_chart, "point coincides with a pole of the target chart");
  return out;
}

Vec SphereAtlas::express_tangent(const ChartPoint& p, const Vec& y, int target_chart) const {
  if (target_chart == p.chart) return y;
  const ChartPoint q = express(p, target_chart);
  const Vec3 v = embed_tangent(p, y);
  // Components in the target frame; the frame vectors are orthogonal with
  // |d_psi|^2 = cos^2(theta) and |d_theta| = 1.
  const Vec3 vv = target_chart == 0 ? v : rot_x_inv(v);
  const Vec3 fpsi = base_dpsi(q.x[0], q.x[1]);
  const Vec3 fth = base_dtheta(q.x[0], q.x[1]);
  const double c2 = std::cos(q.x[1]) * std::cos(q.x[1]);
  return make_vec({vv.dot(fpsi) / c2, vv.dot(fth)});
}

}  // namespace finwalk
