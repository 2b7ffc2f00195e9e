#include "finwalk/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace finwalk {

const char* path_kind_name(PathKind k) {
  switch (k) {
    case PathKind::discrete: return "discrete";
    case PathKind::subordinated: return "subordinated";
    case PathKind::interpolated: return "interpolated";
  }
  return "unknown";
}

long default_step_budget(long N, double T) {
  const double nt = static_cast<double>(N) * T;
  return static_cast<long>(std::ceil(1.1 * (std::ceil(nt) + 4.0 * std::sqrt(nt))));
}

Philox increment_stream(std::uint64_t seed, long path_index) {
  return Philox(seed, static_cast<std::uint64_t>(path_index), 0);
}

Philox clock_stream(std::uint64_t seed, long path_index) {
  return Philox(seed, static_cast<std::uint64_t>(path_index), 1);
}

ChartPoint walk_step(const FinslerMetric& fm, const ChartAtlas& atlas,
                     const MeasureFamily& family, const ChartPoint& p, long N, Philox& rng,
                     double h_ode, double alpha) {
  const Vec y = rescaled_sample(family, fm, p, N, rng, alpha);
  return exp_map(fm, atlas, p, y, h_ode);
}

WalkPath run_discrete(const Geometry& geo, const MeasureFamily& family, const WalkConfig& cfg,
                      long path_index, long n_steps_override) {
  if (cfg.N < 1) raise(Errc::invalid_argument, "walk needs N >= 1");
  long n = n_steps_override >= 0 ? n_steps_override
                                 : (cfg.n_steps >= 0 ? cfg.n_steps : default_step_budget(cfg.N, cfg.T));

  WalkPath path;
  path.kind = PathKind::discrete;
  path.path_index = path_index;
  path.N = cfg.N;
  path.horizon = static_cast<double>(n) / static_cast<double>(cfg.N);
  path.records.reserve(static_cast<std::size_t>(n) + 1);
  path.increments.reserve(static_cast<std::size_t>(n));

  Philox rng = increment_stream(cfg.seed, path_index);
  ChartPoint p = cfg.start;
  path.records.push_back({0.0, p.chart, p.x});
  for (long k = 0; k < n; ++k) {
    const Vec y = rescaled_sample(family, *geo.metric, p, cfg.N, rng, cfg.alpha);
    p = exp_map(*geo.metric, *geo.atlas, p, y, cfg.h_ode);
    path.increments.push_back(y);
    path.records.push_back(
        {static_cast<double>(k + 1) / static_cast<double>(cfg.N), p.chart, p.x});
  }
  return path;
}

WalkPath subordinate(const WalkPath& discrete, Philox& clock_rng, double T) {
  if (discrete.kind != PathKind::discrete)
    raise(Errc::invalid_argument, "subordination consumes a discrete chain");
  if (T < 0.0) raise(Errc::invalid_argument, "horizon must be nonnegative");

  WalkPath path;
  path.kind = PathKind::subordinated;
  path.path_index = discrete.path_index;
  path.N = discrete.N;
  path.horizon = T;
  path.records.push_back(discrete.records.front());
  path.records.front().t = 0.0;

  const double rate = static_cast<double>(discrete.N);
  double t = clock_rng.exponential(rate);
  std::size_t k = 1;
  while (t <= T) {
    if (k >= discrete.records.size())
      raise(Errc::insufficient_steps,
            "discrete chain too short for the requested horizon; regeneration disabled");
    WalkRecord rec = discrete.records[k];
    rec.t = t;
    path.records.push_back(rec);
    ++k;
    t += clock_rng.exponential(rate);
  }
  return path;
}

WalkPath interpolate(const Geometry& geo, const WalkPath& discrete,
                     const std::vector<double>& times, double h_ode) {
  if (discrete.kind != PathKind::discrete)
    raise(Errc::invalid_argument, "interpolation consumes a discrete chain");
  const double rate = static_cast<double>(discrete.N);
  const long n_steps = static_cast<long>(discrete.increments.size());

  WalkPath path;
  path.kind = PathKind::interpolated;
  path.path_index = discrete.path_index;
  path.N = discrete.N;
  path.horizon = discrete.horizon;
  path.records.reserve(times.size());

  for (double t : times) {
    if (t < 0.0 || t * rate > static_cast<double>(n_steps) + 1e-12)
      raise(Errc::out_of_horizon, "interpolation time outside [0, n_steps/N]");
    long k = static_cast<long>(std::floor(t * rate));
    double s = t * rate - static_cast<double>(k);
    if (k >= n_steps) {  // exact right endpoint
      k = n_steps - 1;
      s = 1.0;
    }
    const WalkRecord& base = discrete.records[static_cast<std::size_t>(k)];
    if (s == 0.0) {
      path.records.push_back({t, base.chart, base.x});
      continue;
    }
    const GeodesicState end = geodesic_flow(*geo.metric, *geo.atlas, {base.chart, base.x},
                                            discrete.increments[static_cast<std::size_t>(k)], s,
                                            h_ode, {1e-6, false})
                                  .back();
    path.records.push_back({t, end.chart, end.x});
  }
  return path;
}

DistanceFn make_distance_fn(const Geometry& geo, const ShootingConfig& cfg) {
  const FinslerMetric* fm = geo.metric.get();
  const ChartAtlas* atlas = geo.atlas.get();

  if (fm->flat()) {
    return [fm](const ChartPoint& p, const ChartPoint& q) {
      const Vec d = q.x - p.x;
      return std::max(fm->value(p, d), fm->value(q, -d));
    };
  }
  // Round sphere: the symmetrized distance is the great-circle arc.
  const auto* sphere = dynamic_cast<const SphereAtlas*>(atlas);
  const auto* riem = dynamic_cast<const RiemannianMetric*>(fm);
  const auto* randers = dynamic_cast<const RandersMetric*>(fm);
  const bool round = sphere && (riem || (randers && randers->wind().zero()));
  if (round) {
    return [sphere](const ChartPoint& p, const ChartPoint& q) {
      const double c = std::clamp(sphere->embed(p).dot(sphere->embed(q)), -1.0, 1.0);
      return std::acos(c);
    };
  }
  return [fm, atlas, cfg](const ChartPoint& p, const ChartPoint& q) {
    return symmetrized_distance(*fm, *atlas, p, q, cfg);
  };
}

double exit_time(const WalkPath& path, const ChartPoint& center, double delta,
                 const DistanceFn& dist) {
  for (const WalkRecord& rec : path.records) {
    if (dist(center, {rec.chart, rec.x}) > delta) return rec.t;
  }
  return std::numeric_limits<double>::infinity();
}

namespace {

WalkPath make_path(const Geometry& geo, const MeasureFamily& family, const WalkConfig& cfg,
                   PathKind kind, long index, const std::vector<double>& times) {
  if (kind == PathKind::discrete) return run_discrete(geo, family, cfg, index);

  if (kind == PathKind::subordinated) {
    // Draw the clock first so the chain can be sized to cover every jump; the
    // clock stream is then replayed for the actual subordination.
    Philox probe = clock_stream(cfg.seed, index);
    long jumps = 0;
    const double rate = static_cast<double>(cfg.N);
    for (double t = probe.exponential(rate); t <= cfg.T; t += probe.exponential(rate)) ++jumps;
    const long budget =
        std::max(cfg.n_steps >= 0 ? cfg.n_steps : default_step_budget(cfg.N, cfg.T), jumps);
    const WalkPath zeta = run_discrete(geo, family, cfg, index, budget);
    Philox clock = clock_stream(cfg.seed, index);
    return subordinate(zeta, clock, cfg.T);
  }

  const WalkPath zeta = run_discrete(geo, family, cfg, index);
  return interpolate(geo, zeta, times, cfg.h_ode);
}

}  // namespace

void for_each_path(const Geometry& geo, const MeasureFamily& family, const WalkConfig& cfg,
                   PathKind kind, const std::function<void(const WalkPath&)>& consume,
                   const std::vector<double>& interpolation_times) {
  const int threads = std::max(1, cfg.threads);
  if (threads == 1 || cfg.paths < 2) {
    for (long i = 0; i < cfg.paths; ++i)
      consume(make_path(geo, family, cfg, kind, i, interpolation_times));
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (long i = w; i < cfg.paths; i += threads)
          consume(make_path(geo, family, cfg, kind, i, interpolation_times));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<WalkPath> simulate_paths(const Geometry& geo, const MeasureFamily& family,
                                     const WalkConfig& cfg, PathKind kind,
                                     const std::vector<double>& interpolation_times) {
  std::vector<WalkPath> out(static_cast<std::size_t>(cfg.paths));
  for_each_path(
      geo, family, cfg, kind,
      [&out](const WalkPath& path) { out[static_cast<std::size_t>(path.path_index)] = path; },
      interpolation_times);
  return out;
}

}  // namespace finwalk
