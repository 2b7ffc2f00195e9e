#pragma once

#include <vector>

#include "finwalk/metric.hpp"

namespace finwalk {

struct GeodesicState {
  int chart = 0;
  Vec x;
  Vec y;
  double t = 0.0;
};

// Geodesic sampled on a uniform time grid. F(x, y) along the states is
// conserved up to the integrator tolerance.
struct Trajectory {
  std::vector<GeodesicState> states;
  double dt = 0.0;     // grid spacing in the caller's parametrization
  double speed = 0.0;  // F(x0, y0)

  const GeodesicState& front() const { return states.front(); }
  const GeodesicState& back() const { return states.back(); }
};

struct FlowOptions {
  double tol_energy = 1e-6;
  bool record_all = true;  // false keeps only the endpoint
};

// Classical fixed-step RK4 for dx/dt = y, dy^k/dt = -Gamma^k_ij(x,y) y^i y^j.
// Integration runs in the unit-speed parametrization (geodesics rescale, so
// this is exact) with arc step h_ode; chart transitions are applied between
// steps. States are reported in the caller's parametrization on [0, T].
Trajectory geodesic_flow(const FinslerMetric& fm, const ChartAtlas& atlas, const ChartPoint& x0,
                         const Vec& y0, double T, double h_ode, const FlowOptions& opt = {});

// Endpoint of the unit-time geodesic with initial velocity Y.
ChartPoint exp_map(const FinslerMetric& fm, const ChartAtlas& atlas, const ChartPoint& p,
                   const Vec& Y, double h_ode);
GeodesicState exp_state(const FinslerMetric& fm, const ChartAtlas& atlas, const ChartPoint& p,
                        const Vec& Y, double h_ode);

struct ShootingConfig {
  double h_ode = 1e-3;
  double tol = 1e-6;        // residual in chart coordinates
  int max_iter = 40;
  int starts = 8;           // initial angles around the straight-line guess
  double radius_cap = 0.5;  // short-range validity bound
};

// One-way distance d_a(p, q) by shooting over (direction angle, scale) on the
// unit indicatrix; valid short-range only. Flat metrics shortcut to F(q - p).
double one_way_distance(const FinslerMetric& fm, const ChartAtlas& atlas, const ChartPoint& p,
                        const ChartPoint& q, const ShootingConfig& cfg = {});

// max(d_a(p,q), d_a(q,p)).
double symmetrized_distance(const FinslerMetric& fm, const ChartAtlas& atlas, const ChartPoint& p,
                            const ChartPoint& q, const ShootingConfig& cfg = {});

}  // namespace finwalk
