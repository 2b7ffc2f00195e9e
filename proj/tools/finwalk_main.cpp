// Command-line driver: simulate | generator | converge | exit-times.
// Every output file records the tool version, the resolved configuration and
// the master seed, so a run can be reproduced from its artifacts alone.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "finwalk/config.hpp"
#include "finwalk/io.hpp"

namespace fs = std::filesystem;
using namespace finwalk;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  long seed = -1;
  long paths = -1;
  long N = -1;
  int threads = -1;
  bool svg = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "configuration file");
  cmd->add_option("--out-dir", args.out_dir, "output directory");
  cmd->add_option("--set", args.overrides, "override as section.key=value")->take_all();
  cmd->add_option("--seed", args.seed, "master seed (overrides walk.seed)");
  cmd->add_option("--paths", args.paths, "path count (overrides walk.paths)");
  cmd->add_option("--N", args.N, "rescaling parameter (overrides walk.N)");
  cmd->add_option("--threads", args.threads, "worker threads (overrides walk.threads)");
  cmd->add_flag("--svg", args.svg, "also write an SVG projection of simulated paths");
}

RunConfig resolve(const CommonArgs& args) {
  RunConfig cfg =
      args.config_path.empty() ? RunConfig() : RunConfig::from_file(args.config_path);
  for (const std::string& o : args.overrides) cfg.apply_override(o);
  if (args.seed >= 0) cfg.set("walk.seed", std::to_string(args.seed));
  if (args.paths >= 0) cfg.set("walk.paths", std::to_string(args.paths));
  if (args.N >= 0) cfg.set("walk.N", std::to_string(args.N));
  if (args.threads >= 0) cfg.set("walk.threads", std::to_string(args.threads));
  return cfg;
}

std::ofstream open_output(const CommonArgs& args, const std::string& filename) {
  fs::create_directories(args.out_dir);
  const fs::path path = fs::path(args.out_dir) / filename;
  std::ofstream out(path);
  if (!out) raise(Errc::invalid_config, "cannot open output file " + path.string());
  std::cerr << "writing " << path.string() << "\n";
  return out;
}

PathKind parse_kind(const std::string& name) {
  if (name == "discrete") return PathKind::discrete;
  if (name == "subordinated") return PathKind::subordinated;
  if (name == "interpolated") return PathKind::interpolated;
  raise(Errc::invalid_config, "walk.kind must be discrete, subordinated or interpolated");
}

int run_simulate(const CommonArgs& args) {
  const RunConfig cfg = resolve(args);
  const Geometry geo = cfg.make_geometry();
  const auto family = cfg.make_measure(geo);
  const WalkConfig walk = cfg.make_walk(geo);
  const PathKind kind = parse_kind(cfg.get_string("walk.kind", "discrete"));

  std::vector<double> times;
  if (kind == PathKind::interpolated) {
    const long samples = cfg.get_long("walk.samples", 512);
    for (long i = 0; i <= samples; ++i)
      times.push_back(walk.T * static_cast<double>(i) / static_cast<double>(samples));
  }
  const std::vector<WalkPath> paths = simulate_paths(geo, *family, walk, kind, times);

  auto out = open_output(args, "paths.csv");
  write_paths_csv(out, paths, cfg.echo(), walk.seed);
  if (args.svg) {
    auto svg = open_output(args, "paths.svg");
    write_paths_svg(svg, paths, geo);
  }
  return 0;
}

int run_generator(const CommonArgs& args) {
  const RunConfig cfg = resolve(args);
  const Geometry geo = cfg.make_geometry();
  const auto family = cfg.make_measure(geo);
  const WalkConfig walk = cfg.make_walk(geo);
  const std::vector<ChartPoint> probes = cfg.probe_points(geo);

  std::vector<GeneratorEstimate> estimates;
  std::vector<Vec> drifts;
  const bool with_drift = cfg.get_long("study.drift", 1) != 0;
  for (const ChartPoint& p : probes) {
    estimates.push_back(estimate_at(geo, *family, p));
    if (with_drift) drifts.push_back(drift(geo, *family, p));
  }
  auto out = open_output(args, "generator.json");
  out << estimates_json(estimates, drifts, cfg.echo(), walk.seed) << "\n";
  return 0;
}

int run_converge(const CommonArgs& args) {
  const RunConfig cfg = resolve(args);
  const Geometry geo = cfg.make_geometry();
  const auto family = cfg.make_measure(geo);
  const WalkConfig walk = cfg.make_walk(geo);
  std::vector<ChartPoint> probes = cfg.probe_points(geo);
  if (probes.empty()) probes.push_back(walk.start);

  std::vector<long> Ns = cfg.get_longs("study.Ns");
  if (Ns.empty()) Ns = {100, 400, 1600, 6400};

  const int m = geo.metric->dimension();
  std::vector<TestFunction> fs;
  for (int axis = 0; axis < m; ++axis) {
    TestFunction f;
    f.name = "sin_x" + std::to_string(axis);
    const auto atlas = geo.atlas;
    f.value = [axis, atlas](const ChartPoint& p) {
      const ChartPoint q = p.chart == 0 ? p : atlas->express(p, 0);
      return std::sin(q.x[axis]);
    };
    f.gradient = [axis, m](const ChartPoint& p) {
      Vec g = Vec::Zero(m);
      g[axis] = std::cos(p.x[axis]);
      return g;
    };
    f.hessian = [axis, m](const ChartPoint& p) {
      Mat h = Mat::Zero(m, m);
      h(axis, axis) = -std::sin(p.x[axis]);
      return h;
    };
    fs.push_back(std::move(f));
  }
  for (TestFunction& f : fs) f.validate(probes);

  const ConvergenceStudy study = convergence_study(geo, *family, fs, probes, Ns, walk.h_ode);
  auto out = open_output(args, "convergence.csv");
  write_convergence_csv(out, study, cfg.echo(), walk.seed);
  return 0;
}

int run_exit_times(const CommonArgs& args) {
  const RunConfig cfg = resolve(args);
  const Geometry geo = cfg.make_geometry();
  const auto family = cfg.make_measure(geo);
  const WalkConfig walk = cfg.make_walk(geo);

  std::vector<double> deltas = cfg.get_doubles("study.deltas");
  if (deltas.empty()) deltas = {0.2};
  std::vector<double> ts = cfg.get_doubles("study.times");
  if (ts.empty()) ts = {0.005, 0.01, 0.02};

  const ExitTimeStudy study = exit_time_study(geo, *family, walk, deltas, ts);
  auto out = open_output(args, "exit_times.csv");
  write_exit_time_csv(out, study, cfg.echo(), walk.seed);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesic random walks and their limit diffusion generators on Finsler manifolds"};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* simulate = app.add_subcommand("simulate", "simulate walk paths and dump them as CSV");
  CLI::App* generator =
      app.add_subcommand("generator", "limit generator, symbol and drift at probe points");
  CLI::App* converge = app.add_subcommand("converge", "pre-limit vs limit generator over N");
  CLI::App* exit_times = app.add_subcommand("exit-times", "empirical exit-time probabilities");
  for (CLI::App* cmd : {simulate, generator, converge, exit_times}) add_common(cmd, args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(args);
    if (generator->parsed()) return run_generator(args);
    if (converge->parsed()) return run_converge(args);
    if (exit_times->parsed()) return run_exit_times(args);
  } catch (const Error& e) {
    std::cerr << "error[" << errc_name(e.code()) << "]: " << e.what() << "\n";
    return e.code() == Errc::invalid_config ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 4;
  }
  return 1;
}
