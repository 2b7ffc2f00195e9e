#include "finwalk/geodesic.hpp"

#include <algorithm>
#include <cmath>

namespace finwalk {

namespace {

struct PhaseState {
  int chart;
  Vec x;
  Vec u;  // unit-F velocity
};

// Geodesic spray at unit-rescaled direction; 0-homogeneity makes the rescale
// exact and keeps the tensor evaluation well conditioned.
void spray(const FinslerMetric& fm, int chart, const Vec& x, const Vec& u, Vec& du) {
  const int m = static_cast<int>(x.size());
  const ChartPoint p{chart, x};
  const Vec dir = u / u.norm();
  const std::vector<Mat> gamma = christoffel(fm, p, dir);
  du.resize(m);
  for (int k = 0; k < m; ++k) du[k] = -u.dot(gamma[k] * u);
}

void rk4_step(const FinslerMetric& fm, PhaseState& s, double h) {
  Vec k1x = s.u, k1u;
  spray(fm, s.chart, s.x, s.u, k1u);

  Vec x2 = s.x + 0.5 * h * k1x;
  Vec u2 = s.u + 0.5 * h * k1u;
  Vec k2u;
  spray(fm, s.chart, x2, u2, k2u);

  Vec x3 = s.x + 0.5 * h * u2;
  Vec u3 = s.u + 0.5 * h * k2u;
  Vec k3u;
  spray(fm, s.chart, x3, u3, k3u);

  Vec x4 = s.x + h * u3;
  Vec u4 = s.u + h * k3u;
  Vec k4u;
  spray(fm, s.chart, x4, u4, k4u);

  s.x += (h / 6.0) * (k1x + 2.0 * u2 + 2.0 * u3 + u4);
  s.u += (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
}

}  // namespace

Trajectory geodesic_flow(const FinslerMetric& fm, const ChartAtlas& atlas, const ChartPoint& x0,
                         const Vec& y0, double T, double h_ode, const FlowOptions& opt) {
  if (!(h_ode > 0.0)) raise(Errc::invalid_argument, "h_ode must be positive");
  if (T < 0.0) raise(Errc::invalid_argument, "duration must be nonnegative");
  if (!atlas.in_domain(x0)) raise(Errc::left_atlas, "initial point outside the atlas");

  Trajectory traj;
  const double c = fm.value(x0, y0);
  traj.speed = c;

  if (T == 0.0 || c == 0.0) {
    traj.states.push_back({x0.chart, x0.x, y0, 0.0});
    if (T > 0.0) traj.states.push_back({x0.chart, x0.x, y0, T});
    traj.dt = T;
    return traj;
  }

  if (fm.flat()) {
    // x-independent metric: the spray vanishes and geodesics are straight.
    const long n = opt.record_all
                       ? std::max<long>(1, static_cast<long>(std::ceil(c * T / h_ode - 1e-12)))
                       : 1;
    traj.dt = T / static_cast<double>(n);
    for (long k = 0; k <= n; ++k) {
      const double t = traj.dt * static_cast<double>(k);
      const Vec x = x0.x + t * y0;
      if (!atlas.in_domain({x0.chart, x})) raise(Errc::left_atlas, "geodesic left the atlas");
      traj.states.push_back({x0.chart, x, y0, t});
    }
    return traj;
  }

  const double arc = c * T;
  const long n = std::max<long>(1, static_cast<long>(std::ceil(arc / h_ode - 1e-12)));
  const double h = arc / static_cast<double>(n);
  traj.dt = T / static_cast<double>(n);

  PhaseState s{x0.chart, x0.x, y0 / c};
  if (opt.record_all) traj.states.reserve(static_cast<std::size_t>(n) + 1);
  traj.states.push_back({s.chart, s.x, y0, 0.0});

  for (long k = 1; k <= n; ++k) {
    rk4_step(fm, s, h);
    if (!atlas.in_domain({s.chart, s.x})) raise(Errc::left_atlas, "geodesic left the atlas");

    const double f = fm.value({s.chart, s.x}, s.u);
    if (std::abs(f - 1.0) > opt.tol_energy)
      raise(Errc::energy_drift_exceeded, "speed drift " + std::to_string(std::abs(f - 1.0)) +
                                             " exceeds tolerance; reduce h_ode");

    if (atlas.wants_switch({s.chart, s.x})) {
      const ChartState moved = transition(atlas, {s.chart, s.x}, s.u);
      s.chart = moved.point.chart;
      s.x = moved.point.x;
      s.u = moved.tangent;
    }

    if (opt.record_all || k == n)
      traj.states.push_back({s.chart, s.x, c * s.u, traj.dt * static_cast<double>(k)});
  }
  return traj;
}

GeodesicState exp_state(const FinslerMetric& fm, const ChartAtlas& atlas, const ChartPoint& p,
                        const Vec& Y, double h_ode) {
  FlowOptions opt;
  opt.record_all = false;
  return geodesic_flow(fm, atlas, p, Y, 1.0, h_ode, opt).back();
}

ChartPoint exp_map(const FinslerMetric& fm, const ChartAtlas& atlas, const ChartPoint& p,
                   const Vec& Y, double h_ode) {
  const GeodesicState s = exp_state(fm, atlas, p, Y, h_ode);
  return {s.chart, s.x};
}

// ---------------------------------------------------------------------------
// Short-range distance by shooting

namespace {

// Endpoint of exp_p(s * u(phi)) expressed in p's chart. u(phi) is the unit
// indicatrix direction at angle phi.
Vec shoot(const FinslerMetric& fm, const ChartAtlas& atlas, const ChartPoint& p, double phi,
          double s, double h_ode) {
  Vec w = make_vec({std::cos(phi), std::sin(phi)});
  const double f = fm.value(p, w);
  const GeodesicState end = exp_state(fm, atlas, p, (s / f) * w, h_ode);
  ChartPoint e{end.chart, end.x};
  if (e.chart != p.chart) e = atlas.express(e, p.chart);
  return e.x;
}

double shoot_1d(const FinslerMetric& fm, const ChartAtlas& atlas, const ChartPoint& p,
                const ChartPoint& q, const ShootingConfig& cfg) {
  const double dx = q.x[0] - p.x[0];
  if (dx == 0.0) return 0.0;
  const Vec dir = make_vec({dx > 0 ? 1.0 : -1.0});
  const double f = fm.value(p, dir);
  double s = std::abs(dx) * f;
  for (int it = 0; it < cfg.max_iter; ++it) {
    const GeodesicState end = exp_state(fm, atlas, p, (s / f) * dir, cfg.h_ode);
    const double r = end.x[0] - q.x[0];
    if (std::abs(r) <= cfg.tol) return s;
    const double ds = 1e-7 * std::max(1.0, std::abs(s));
    const GeodesicState end2 = exp_state(fm, atlas, p, ((s + ds) / f) * dir, cfg.h_ode);
    const double slope = (end2.x[0] - end.x[0]) / ds;
    if (slope == 0.0) break;
    s -= r / slope;
    if (!(s > 0.0) || s > 2.0 * cfg.radius_cap) break;
  }
  raise(Errc::shooting_diverged, "1d distance iteration failed");
}

}  // namespace

double one_way_distance(const FinslerMetric& fm, const ChartAtlas& atlas, const ChartPoint& p,
                        const ChartPoint& q, const ShootingConfig& cfg) {
  ChartPoint qq = q;
  if (qq.chart != p.chart) qq = atlas.express(qq, p.chart);
  const Vec diff = qq.x - p.x;
  if (diff.norm() == 0.0) return 0.0;

  if (fm.flat()) return fm.value(p, diff);

  const int m = fm.dimension();
  if (m == 1) return shoot_1d(fm, atlas, p, qq, cfg);
  if (m != 2) raise(Errc::invalid_argument, "shooting distance is implemented for m <= 2");

  const double phi_base = std::atan2(diff[1], diff[0]);
  const double s_base = std::min(fm.value(p, diff), 1.5 * cfg.radius_cap);
  static constexpr double kOffsets[8] = {0.0,        0.39269908, -0.39269908, 0.78539816,
                                         -0.78539816, 1.57079633, -1.57079633, 3.14159265};

  for (int start = 0; start < std::min(cfg.starts, 8); ++start) {
    double phi = phi_base + kOffsets[start];
    double s = std::max(s_base, 1e-6);
    Vec r = shoot(fm, atlas, p, phi, s, cfg.h_ode) - qq.x;
    bool ok = false;
    for (int it = 0; it < cfg.max_iter && !ok; ++it) {
      if (r.norm() <= cfg.tol) {
        ok = true;
        break;
      }
      const double dphi = 1e-7;
      const double ds = 1e-7 * std::max(1.0, s);
      Vec rp = shoot(fm, atlas, p, phi + dphi, s, cfg.h_ode) - qq.x;
      Vec rs = shoot(fm, atlas, p, phi, s + ds, cfg.h_ode) - qq.x;
      Mat J(2, 2);
      J.col(0) = (rp - r) / dphi;
      J.col(1) = (rs - r) / ds;
      const double det = J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0);
      if (std::abs(det) < 1e-18) break;
      Vec step(2);
      step[0] = (J(1, 1) * r[0] - J(0, 1) * r[1]) / det;
      step[1] = (-J(1, 0) * r[0] + J(0, 0) * r[1]) / det;

      // Damped update: backtrack while the residual grows.
      double lambda = 1.0;
      bool improved = false;
      for (int bt = 0; bt < 6; ++bt) {
        const double phi_try = phi - lambda * step[0];
        const double s_try = s - lambda * step[1];
        if (s_try > 0.0 && s_try <= 2.0 * cfg.radius_cap) {
          Vec r_try = shoot(fm, atlas, p, phi_try, s_try, cfg.h_ode) - qq.x;
          if (r_try.norm() < r.norm()) {
            phi = phi_try;
            s = s_try;
            r = r_try;
            improved = true;
            break;
          }
        }
        lambda *= 0.5;
      }
      if (!improved) break;
    }
    if (ok || r.norm() <= cfg.tol) return s;
  }
  raise(Errc::shooting_diverged,
        "no shooting start converged; points may exceed the short-range radius");
}

double symmetrized_distance(const FinslerMetric& fm, const ChartAtlas& atlas, const ChartPoint& p,
                            const ChartPoint& q, const ShootingConfig& cfg) {
  const double fwd = one_way_distance(fm, atlas, p, q, cfg);
  const double bwd = one_way_distance(fm, atlas, q, p, cfg);
  return std::max(fwd, bwd);
}

}  // namespace finwalk
