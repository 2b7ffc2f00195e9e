#pragma once

#include <functional>
#include <vector>

#include "finwalk/geodesic.hpp"
#include "finwalk/measure.hpp"

namespace finwalk {

struct WalkConfig {
  long N = 1;                 // rescaling parameter
  double T = 1.0;             // time horizon of the subordinated process
  long n_steps = -1;          // explicit discrete step count; derived when < 0
  ChartPoint start;
  double h_ode = 1e-3;
  std::uint64_t seed = 0;
  long paths = 1;
  double alpha = 1.0;         // mean-recentering coefficient of the rescaling
  int threads = 1;
};

enum class PathKind { discrete, subordinated, interpolated };
const char* path_kind_name(PathKind k);

struct WalkRecord {
  double t = 0.0;
  int chart = 0;
  Vec x;
};

// One realization. Discrete chains carry their increments so that the
// subordinated and interpolated views reuse the same underlying steps;
// record k+1 of a discrete chain is exp(record k, increment k).
struct WalkPath {
  PathKind kind = PathKind::discrete;
  long path_index = 0;
  long N = 1;
  double horizon = 0.0;
  std::vector<WalkRecord> records;
  std::vector<Vec> increments;
};

// Discrete steps generated beyond ceil(N T) to cover the Poisson clock's
// fluctuations: ceil(1.1 (ceil(N T) + 4 sqrt(N T))).
long default_step_budget(long N, double T);

// Per-path generator streams; substream 0 feeds the increments, substream 1
// the Poisson clock, so the two sources stay independent and re-running a
// chain with a larger step budget reproduces its prefix bitwise.
Philox increment_stream(std::uint64_t seed, long path_index);
Philox clock_stream(std::uint64_t seed, long path_index);

// One walk step: exponential map applied to a rescaled draw at p.
ChartPoint walk_step(const FinslerMetric& fm, const ChartAtlas& atlas,
                     const MeasureFamily& family, const ChartPoint& p, long N, Philox& rng,
                     double h_ode, double alpha = 1.0);

// The discrete chain started at config.start; records carry t = k / N.
WalkPath run_discrete(const Geometry& geo, const MeasureFamily& family, const WalkConfig& cfg,
                      long path_index, long n_steps_override = -1);

// Subordination by a rate-N Poisson clock: piecewise-constant records at the
// jump times in (0, T], preceded by the initial state at t = 0.
WalkPath subordinate(const WalkPath& discrete, Philox& clock_rng, double T);

// Continuous interpolation sampled at the query times: within step slab k the
// stored geodesic segment is re-traversed up to parameter N t - k.
WalkPath interpolate(const Geometry& geo, const WalkPath& discrete,
                     const std::vector<double>& times, double h_ode);

using DistanceFn = std::function<double(const ChartPoint&, const ChartPoint&)>;

// Symmetrized-distance routine specialized per geometry: flat metrics use the
// norm of the displacement, the round sphere its arc angle, anything else the
// shooting routine.
DistanceFn make_distance_fn(const Geometry& geo, const ShootingConfig& cfg = {});

// First record time with d(center, path) > delta; +infinity when the path
// never leaves the ball within its horizon.
double exit_time(const WalkPath& path, const ChartPoint& center, double delta,
                 const DistanceFn& dist);

// Runs cfg.paths independent realizations (deterministic per-path streams)
// and feeds each to `consume`, possibly from several threads and in arbitrary
// order. Aggregation on the caller's side must be order-independent.
void for_each_path(const Geometry& geo, const MeasureFamily& family, const WalkConfig& cfg,
                   PathKind kind, const std::function<void(const WalkPath&)>& consume,
                   const std::vector<double>& interpolation_times = {});

std::vector<WalkPath> simulate_paths(const Geometry& geo, const MeasureFamily& family,
                                     const WalkConfig& cfg, PathKind kind,
                                     const std::vector<double>& interpolation_times = {});

}  // namespace finwalk
