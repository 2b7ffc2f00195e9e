#include "finwalk/generator.hpp"

#include <algorithm>
#include <cmath>

namespace finwalk {

void TestFunction::validate(const std::vector<ChartPoint>& probes, double tol,
                            double step) const {
  for (const ChartPoint& p : probes) {
    const int m = static_cast<int>(p.x.size());
    const Vec g = gradient(p);
    const Mat h = hessian(p);
    ChartPoint a = p, b = p;
    for (int i = 0; i < m; ++i) {
      a.x = p.x; a.x[i] += step;
      b.x = p.x; b.x[i] -= step;
      const double fd = (value(a) - value(b)) / (2.0 * step);
      if (std::abs(fd - g[i]) > tol * std::max(1.0, std::abs(g[i])))
        raise(Errc::invalid_argument, "test function '" + name + "': gradient mismatch");
      const Vec ga = gradient(a), gb = gradient(b);
      for (int j = 0; j < m; ++j) {
        const double fd2 = (ga[j] - gb[j]) / (2.0 * step);
        if (std::abs(fd2 - h(i, j)) > tol * std::max(1.0, std::abs(h(i, j))))
          raise(Errc::invalid_argument, "test function '" + name + "': Hessian mismatch");
      }
    }
  }
}

namespace {

constexpr double kGammaExclusionRadius = 1e-10;

// Gamma^k_ij(p, z) z^i z^j for all k, with the direction unit-rescaled before
// the tensor evaluation (0-homogeneity makes this exact).
Vec gamma_quadratic(const FinslerMetric& fm, const ChartPoint& p, const Vec& z) {
  const std::vector<Mat> gamma = christoffel(fm, p, z / z.norm());
  const int m = static_cast<int>(z.size());
  Vec out(m);
  for (int k = 0; k < m; ++k) out[k] = z.dot(gamma[k] * z);
  return out;
}

Mat symbol_from_rule(const QuadratureRule& rule, const Vec& mu) {
  return rule.half_centered_second_moment(mu);
}

void check_symbol(const Mat& sigma) {
  Eigen::SelfAdjointEigenSolver<Mat> es(sigma, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 0.0))
    raise(Errc::not_positive_definite, "symbol is not positive definite (degenerate measure)");
}

}  // namespace

double apply_A(const FinslerMetric& fm, const MeasureFamily& family, const TestFunction& f,
               const ChartPoint& p) {
  const Vec mu = family.mean(fm, p);
  const QuadratureRule rule = family.quadrature_about(fm, p, mu);
  const Vec grad = f.gradient(p);
  const Mat hess = f.hessian(p);

  double acc = grad.dot(mu);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const Vec z = rule.nodes[i] - mu;
    acc += 0.5 * rule.weights[i] * z.dot(hess * z);
    if (z.norm() >= kGammaExclusionRadius)
      acc -= 0.5 * rule.weights[i] * grad.dot(gamma_quadratic(fm, p, z));
  }
  return acc;
}

Mat symbol_matrix(const FinslerMetric& fm, const MeasureFamily& family, const ChartPoint& p) {
  const Vec mu = family.mean(fm, p);
  const Mat sigma = symbol_from_rule(family.quadrature_about(fm, p, mu), mu);
  check_symbol(sigma);
  return sigma;
}

Vec generator_first_order(const FinslerMetric& fm, const MeasureFamily& family,
                          const ChartPoint& p) {
  const Vec mu = family.mean(fm, p);
  const QuadratureRule rule = family.quadrature_about(fm, p, mu);
  Vec acc = mu;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const Vec z = rule.nodes[i] - mu;
    if (z.norm() >= kGammaExclusionRadius)
      acc -= 0.5 * rule.weights[i] * gamma_quadratic(fm, p, z);
  }
  return acc;
}

Mat associated_metric(const Mat& symbol) {
  check_symbol(symbol);
  return spd_inverse(symbol, "associated metric");
}

namespace {

// Levi-Civita first-order coefficients of the metric whose co-metric is the
// symbol field: b^k = -sigma^{ij} Gamma(g_A)^k_ij, with d g_A from central
// differences of sigma.
Vec laplace_first_order_impl(const Geometry& geo, const MeasureFamily& family,
                             const ChartPoint& p, double fd_step) {
  const FinslerMetric& fm = *geo.metric;
  const int m = fm.dimension();

  auto symbol_at = [&](const ChartPoint& q) {
    const Vec mu = family.mean(fm, q);
    return symbol_from_rule(family.quadrature_about(fm, q, mu), mu);
  };

  const Mat sigma = symbol_at(p);
  check_symbol(sigma);
  const Mat gA = spd_inverse(sigma, "associated metric");

  std::vector<Mat> dgA(m);
  for (int s = 0; s < m; ++s) {
    ChartPoint a = p, b = p;
    a.x[s] += fd_step;
    b.x[s] -= fd_step;
    if (!geo.atlas->in_domain(a) || !geo.atlas->in_domain(b))
      raise(Errc::stencil_left_chart, "symbol stencil does not fit in the chart");
    const Mat dsigma = (symbol_at(a) - symbol_at(b)) / (2.0 * fd_step);
    dgA[s] = -gA * dsigma * gA;
  }

  Vec out = Vec::Zero(m);
  for (int k = 0; k < m; ++k) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        double gam = 0.0;
        for (int s = 0; s < m; ++s)
          gam += sigma(k, s) * (dgA[j](i, s) + dgA[i](j, s) - dgA[s](i, j));
        acc += sigma(i, j) * 0.5 * gam;
      }
    }
    out[k] = -acc;
  }
  return out;
}

}  // namespace

Vec laplace_first_order(const Geometry& geo, const MeasureFamily& family, const ChartPoint& p,
                        double fd_step) {
  return laplace_first_order_impl(geo, family, p, fd_step);
}

Vec drift(const Geometry& geo, const MeasureFamily& family, const ChartPoint& p, double fd_step) {
  const Vec b_A = generator_first_order(*geo.metric, family, p);
  const Vec b_lap = laplace_first_order_impl(geo, family, p, fd_step);
  return b_A - b_lap;
}

Vec katok_drift_closed_form(double r, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  const double rc2 = r * r * c * c;
  const double denom = (1.0 - rc2) * (1.0 - rc2);
  return make_vec({r, 0.25 * r * r * c * s * (rc2 - 2.0) / denom});
}

double laplace_beltrami(const RiemannianMetric& fm, const TestFunction& f, const ChartPoint& p) {
  const int m = fm.dimension();
  const Mat g = fm.analytic_tensor(p, Vec::Ones(m));
  const Mat gi = spd_inverse(g, "Riemannian metric");
  const std::vector<Mat> gamma = christoffel(fm, p, Vec::Ones(m));
  const Vec grad = f.gradient(p);
  const Mat hess = f.hessian(p);
  double acc = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double second = hess(i, j);
      for (int k = 0; k < m; ++k) second -= gamma[k](i, j) * grad[k];
      acc += gi(i, j) * second;
    }
  return acc;
}

double apply_AN(const Geometry& geo, const MeasureFamily& family, const TestFunction& f,
                const ChartPoint& p, long N, double h_ode) {
  const FinslerMetric& fm = *geo.metric;
  const Vec mu = family.mean(fm, p);
  const QuadratureRule rule = family.quadrature_about(fm, p, mu);
  const double n = static_cast<double>(N);
  const double fp = f.value(p);

  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const Vec z = (rule.nodes[i] - mu) / std::sqrt(n) + mu / n;
    acc += rule.weights[i] * f.value(exp_map(fm, *geo.atlas, p, z, h_ode));
  }
  return n * (acc - fp);
}

McValue apply_AN_mc(const Geometry& geo, const MeasureFamily& family, const TestFunction& f,
                    const ChartPoint& p, long N, long samples, Philox& rng, double h_ode) {
  const FinslerMetric& fm = *geo.metric;
  const double n = static_cast<double>(N);
  const double fp = f.value(p);
  double sum = 0.0, sum2 = 0.0;
  for (long i = 0; i < samples; ++i) {
    const Vec z = rescaled_sample(family, fm, p, N, rng);
    const double v = f.value(exp_map(fm, *geo.atlas, p, z, h_ode)) - fp;
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / static_cast<double>(samples);
  const double var = std::max(0.0, sum2 / static_cast<double>(samples) - mean * mean);
  McValue out;
  out.value = n * mean;
  out.se = n * std::sqrt(var / static_cast<double>(samples));
  out.n = samples;
  return out;
}

McValue mc_generator_estimate(const Geometry& geo, const MeasureFamily& family,
                              const WalkConfig& cfg, const TestFunction& f) {
  const double t = cfg.T;
  if (!(t > 0.0)) raise(Errc::invalid_argument, "mc_generator_estimate needs a positive horizon");
  const double fp = f.value(cfg.start);

  std::vector<double> vals(static_cast<std::size_t>(cfg.paths), 0.0);
  for_each_path(geo, family, cfg, PathKind::subordinated, [&](const WalkPath& path) {
    const WalkRecord& last = path.records.back();
    vals[static_cast<std::size_t>(path.path_index)] = f.value({last.chart, last.x}) - fp;
  });

  std::vector<double> sq(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) sq[i] = vals[i] * vals[i];
  const double n = static_cast<double>(vals.size());
  const double mean = pairwise_sum(vals) / n;
  const double var = std::max(0.0, pairwise_sum(sq) / n - mean * mean);

  McValue out;
  out.value = mean / t;
  out.se = std::sqrt(var / n) / t;
  out.n = cfg.paths;
  return out;
}

GeneratorEstimate estimate_at(const Geometry& geo, const MeasureFamily& family,
                              const ChartPoint& p) {
  GeneratorEstimate est;
  est.point = p;
  est.symbol = symbol_matrix(*geo.metric, family, p);
  est.second_order = est.symbol;
  est.first_order = generator_first_order(*geo.metric, family, p);
  est.provenance = "quadrature";
  return est;
}

ConvergenceStudy convergence_study(const Geometry& geo, const MeasureFamily& family,
                                   const std::vector<TestFunction>& fs,
                                   const std::vector<ChartPoint>& probes,
                                   const std::vector<long>& Ns, double h_ode) {
  if (Ns.size() < 3) raise(Errc::invalid_argument, "convergence study needs >= 3 values of N");
  std::vector<long> sorted = Ns;
  std::sort(sorted.begin(), sorted.end());

  std::vector<std::vector<double>> limits;  // A f at each (f, probe)
  for (const TestFunction& f : fs) {
    std::vector<double> row;
    for (const ChartPoint& p : probes) row.push_back(apply_A(*geo.metric, family, f, p));
    limits.push_back(std::move(row));
  }

  ConvergenceStudy study;
  for (long N : sorted) {
    double sup = 0.0;
    for (std::size_t fi = 0; fi < fs.size(); ++fi)
      for (std::size_t pi = 0; pi < probes.size(); ++pi)
        sup = std::max(sup,
                       std::abs(apply_AN(geo, family, fs[fi], probes[pi], N, h_ode) -
                                limits[fi][pi]));
    study.rows.push_back({N, sup});
  }

  // Least-squares slope of log(error) against log(N).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(study.rows.size());
  for (const ConvergenceRow& row : study.rows) {
    const double x = std::log(static_cast<double>(row.N));
    const double y = std::log(std::max(row.sup_error, 1e-300));
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  study.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return study;
}

void wilson_interval(long successes, long n, double z, double& lo, double& hi) {
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = phat + z2 / (2.0 * nn);
  const double half = z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn));
  lo = std::max(0.0, (center - half) / denom);
  hi = std::min(1.0, (center + half) / denom);
}

ExitTimeStudy exit_time_study(const Geometry& geo, const MeasureFamily& family,
                              const WalkConfig& cfg, const std::vector<double>& deltas,
                              const std::vector<double>& ts, double wilson_z) {
  WalkConfig run = cfg;
  run.T = *std::max_element(ts.begin(), ts.end());
  const DistanceFn dist = make_distance_fn(geo);

  std::vector<std::vector<double>> taus(deltas.size());
  for (auto& v : taus) v.assign(static_cast<std::size_t>(cfg.paths), 0.0);
  for_each_path(geo, family, run, PathKind::subordinated, [&](const WalkPath& path) {
    for (std::size_t d = 0; d < deltas.size(); ++d)
      taus[d][static_cast<std::size_t>(path.path_index)] =
          exit_time(path, cfg.start, deltas[d], dist);
  });

  ExitTimeStudy study;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    for (double t : ts) {
      ExitCell cell;
      cell.delta = deltas[d];
      cell.t = t;
      cell.paths = cfg.paths;
      for (double tau : taus[d])
        if (tau <= t) ++cell.exits;
      cell.p_hat = static_cast<double>(cell.exits) / static_cast<double>(cfg.paths);
      wilson_interval(cell.exits, cell.paths, wilson_z, cell.ci_lo, cell.ci_hi);
      study.cells.push_back(cell);
      sxx += t * t;
      sxy += t * cell.p_hat;
    }
  }
  study.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  return study;
}

double pairwise_sum(const std::vector<double>& values) {
  std::function<double(std::size_t, std::size_t)> rec = [&](std::size_t lo,
                                                            std::size_t hi) -> double {
    if (hi - lo <= 8) {
      double acc = 0.0;
      for (std::size_t i = lo; i < hi; ++i) acc += values[i];
      return acc;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return rec(lo, mid) + rec(mid, hi);
  };
  return values.empty() ? 0.0 : rec(0, values.size());
}

}  // namespace finwalk
