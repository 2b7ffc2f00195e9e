#include "finwalk/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace finwalk {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string point_key(const ChartPoint& p) {
  // Quantized at 1e-12 so cache hits require coordinate agreement well below
  // any step the callers take.
  std::string key = std::to_string(p.chart);
  char buf[32];
  for (Eigen::Index i = 0; i < p.x.size(); ++i) {
    std::snprintf(buf, sizeof(buf), ":%lld", static_cast<long long>(std::llround(p.x[i] * 1e12)));
    key += buf;
  }
  return key;
}

// Gauss-Legendre nodes/weights on [0, 1]. Computed once per size by Newton on
// the Legendre polynomial.
void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Initial guess (Chebyshev-like) on [-1, 1].
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = 0.5 * (1.0 - x);  // map to [0,1], reversed order is harmless
    weights[i] = 1.0 / ((1.0 - x * x) * pp * pp);
  }
}

// Largest s with F(center + s u) <= 1. For center = 0 this is 1/F(u); for an
// interior center the crossing is unique by convexity and found by bisection.
double radial_extent(const FinslerMetric& fm, const ChartPoint& p, const Vec& center,
                     const Vec& u) {
  const double f_dir = fm.value(p, u);
  if (!(f_dir > 0.0)) raise(Errc::not_positive_definite, "F vanishes on a direction");
  if (center.norm() < 1e-15) return 1.0 / f_dir;

  double hi = 1.0 / f_dir;
  int guard = 0;
  while (fm.value(p, center + hi * u) < 1.0) {
    hi *= 1.5;
    if (++guard > 80) raise(Errc::invalid_argument, "unit disc appears unbounded");
  }
  double lo = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fm.value(p, center + mid * u) < 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double QuadratureRule::integrate(const std::function<double(const Vec&)>& f) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
  return acc;
}

Vec QuadratureRule::integrate_vector(const std::function<Vec(const Vec&)>& f, int dim) const {
  Vec acc = Vec::Zero(dim);
  for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
  return acc;
}

Vec QuadratureRule::mean() const {
  Vec acc = Vec::Zero(nodes.empty() ? 0 : nodes.front().size());
  for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * nodes[i];
  return acc;
}

Mat QuadratureRule::half_centered_second_moment(const Vec& mu) const {
  const Eigen::Index m = mu.size();
  Mat acc = Mat::Zero(m, m);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Vec z = nodes[i] - mu;
    acc += weights[i] * (z * z.transpose());
  }
  return 0.5 * acc;
}

Vec rescaled_sample(const MeasureFamily& family, const FinslerMetric& fm, const ChartPoint& p,
                    long N, Philox& rng, double alpha) {
  if (N < 1) raise(Errc::invalid_argument, "rescaled_sample needs N >= 1");
  const Vec y = family.sample(fm, p, rng);
  const Vec mu = family.mean(fm, p);
  const double n = static_cast<double>(N);
  return (y - mu) / std::sqrt(n) + (alpha / n) * mu;
}

double quadrature_integrate(const MeasureFamily& family, const FinslerMetric& fm,
                            const ChartPoint& p, const std::function<double(const Vec&)>& f) {
  return family.quadrature(fm, p).integrate(f);
}

// ---------------------------------------------------------------------------
// LebesgueDiscMeasure

LebesgueDiscMeasure::LebesgueDiscMeasure(MeanPolicy policy,
                                         std::function<Vec(const ChartPoint&)> analytic_mean,
                                         int angular_nodes, int radial_nodes,
                                         long mc_mean_samples)
    : policy_(policy),
      analytic_mean_(std::move(analytic_mean)),
      n_ang_(angular_nodes),
      n_rad_(radial_nodes),
      mc_mean_samples_(mc_mean_samples) {
  if (policy_ == MeanPolicy::analytic && !analytic_mean_)
    raise(Errc::invalid_argument, "analytic mean policy needs a mean function");
}

Vec LebesgueDiscMeasure::sample(const FinslerMetric& fm, const ChartPoint& p, Philox& rng) const {
  const int m = fm.dimension();
  Vec lo, hi;
  fm.disc_box(p, lo, hi);
  Vec y(m);
  for (long attempt = 0; attempt < kRejectionBudget; ++attempt) {
    for (int i = 0; i < m; ++i) y[i] = rng.uniform(lo[i], hi[i]);
    if (fm.value(p, y) <= 1.0) return y;
  }
  raise(Errc::rejection_budget_exceeded,
        "disc rejection sampler exhausted its budget; indicatrix may be degenerate");
}

QuadratureRule LebesgueDiscMeasure::quadrature(const FinslerMetric& fm,
                                               const ChartPoint& p) const {
  return quadrature_about(fm, p, Vec::Zero(fm.dimension()));
}

QuadratureRule LebesgueDiscMeasure::quadrature_about(const FinslerMetric& fm, const ChartPoint& p,
                                                     const Vec& center) const {
  const int m = fm.dimension();
  QuadratureRule rule;

  if (m == 1) {
    // Exact interval [-1/F(-1), 1/F(1)]; Gauss-Legendre on it.
    const double right = 1.0 / fm.value(p, make_vec({1.0}));
    const double left = -1.0 / fm.value(p, make_vec({-1.0}));
    std::vector<double> t, w;
    gauss_legendre_01(n_rad_, t, w);
    const double len = right - left;
    rule.nodes.reserve(t.size());
    for (std::size_t j = 0; j < t.size(); ++j) {
      rule.nodes.push_back(make_vec({left + len * t[j]}));
      rule.weights.push_back(w[j]);
    }
    return rule;
  }
  if (m != 2)
    raise(Errc::invalid_argument, "disc quadrature is implemented for m <= 2");

  if (fm.value(p, center) >= 1.0 - 1e-9)
    raise(Errc::invalid_argument, "quadrature center must be interior to the unit disc");

  std::vector<double> t, w;
  gauss_legendre_01(n_rad_, t, w);

  rule.nodes.reserve(static_cast<std::size_t>(n_ang_) * n_rad_);
  rule.weights.reserve(rule.nodes.capacity());
  double total = 0.0;
  Vec u(2);
  for (int ia = 0; ia < n_ang_; ++ia) {
    const double phi = kTwoPi * ia / n_ang_;
    u[0] = std::cos(phi);
    u[1] = std::sin(phi);
    const double radius = radial_extent(fm, p, center, u);
    const double r2 = radius * radius;
    for (int j = 0; j < n_rad_; ++j) {
      rule.nodes.push_back(center + (t[j] * radius) * u);
      const double weight = w[j] * t[j] * r2;  // polar area element
      rule.weights.push_back(weight);
      total += weight;
    }
  }
  for (double& weight : rule.weights) weight /= total;
  return rule;
}

Vec LebesgueDiscMeasure::mean(const FinslerMetric& fm, const ChartPoint& p) const {
  if (policy_ == MeanPolicy::analytic) return analytic_mean_(p);

  const std::string key = point_key(p);
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = mean_cache_.find(key);
    if (it != mean_cache_.end()) return it->second;
  }
  Vec mu;
  if (policy_ == MeanPolicy::quadrature) {
    mu = quadrature(fm, p).mean();
  } else {
    // Deterministic stream keyed off the point so repeated queries agree.
    Philox rng(0x6D65616Eu, std::hash<std::string>{}(key));
    mu = Vec::Zero(fm.dimension());
    const long n = mc_mean_samples_ > 0 ? mc_mean_samples_ : 100000;
    for (long i = 0; i < n; ++i) mu += sample(fm, p, rng);
    mu /= static_cast<double>(n);
  }
  std::lock_guard<std::mutex> lock(cache_mutex_);
  mean_cache_.emplace(key, mu);
  return mu;
}

// ---------------------------------------------------------------------------
// IndicatrixMeasure

IndicatrixMeasure::IndicatrixMeasure(int table_nodes) : n_nodes_(table_nodes) {}

IndicatrixMeasure::Table IndicatrixMeasure::build_table(const FinslerMetric& fm,
                                                        const ChartPoint& p) const {
  if (fm.dimension() != 2)
    raise(Errc::invalid_argument, "indicatrix measure is implemented for m = 2");
  Table tab;
  tab.nodes.reserve(n_nodes_);
  tab.weights.resize(n_nodes_);
  tab.cumulative.resize(n_nodes_);

  double total = 0.0;
  for (int i = 0; i < n_nodes_; ++i) {
    const double phi = kTwoPi * i / n_nodes_;
    const Vec u = make_vec({std::cos(phi), std::sin(phi)});
    const Vec du = make_vec({-std::sin(phi), std::cos(phi)});
    const double f = fm.value(p, u);
    const Mat g = fundamental_tensor(fm, p, u);
    // dF(u)[du] from Euler's relation; then d(u/F)/dphi.
    const double df = u.dot(g * du) / f;
    const Vec dy = du / f - u * (df / (f * f));
    const double dens = std::sqrt(std::max(0.0, dy.dot(g * dy)));
    tab.nodes.push_back(u / f);
    tab.weights[i] = dens;
    total += dens;
  }
  double cum = 0.0;
  for (int i = 0; i < n_nodes_; ++i) {
    tab.weights[i] /= total;
    cum += tab.weights[i];
    tab.cumulative[i] = cum;
  }
  tab.cumulative.back() = 1.0;
  return tab;
}

const IndicatrixMeasure::Table& IndicatrixMeasure::table(const FinslerMetric& fm,
                                                         const ChartPoint& p) const {
  const std::string key = point_key(p);
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = cache_.find(key);
  if (it == cache_.end()) it = cache_.emplace(key, build_table(fm, p)).first;
  return it->second;
}

Vec IndicatrixMeasure::sample(const FinslerMetric& fm, const ChartPoint& p, Philox& rng) const {
  const Table& tab = table(fm, p);
  const double u = rng.uniform();
  const auto it = std::upper_bound(tab.cumulative.begin(), tab.cumulative.end(), u);
  const int bin = static_cast<int>(std::min<std::ptrdiff_t>(it - tab.cumulative.begin(),
                                                            n_nodes_ - 1));
  const double c_lo = bin == 0 ? 0.0 : tab.cumulative[bin - 1];
  const double frac = tab.weights[bin] > 0.0 ? (u - c_lo) / tab.weights[bin] : 0.0;
  const double phi = kTwoPi * (bin + frac) / n_nodes_;
  const Vec dir = make_vec({std::cos(phi), std::sin(phi)});
  return dir / fm.value(p, dir);
}

Vec IndicatrixMeasure::mean(const FinslerMetric& fm, const ChartPoint& p) const {
  const Table& tab = table(fm, p);
  Vec mu = Vec::Zero(2);
  for (int i = 0; i < n_nodes_; ++i) mu += tab.weights[i] * tab.nodes[i];
  return mu;
}

QuadratureRule IndicatrixMeasure::quadrature(const FinslerMetric& fm, const ChartPoint& p) const {
  const Table& tab = table(fm, p);
  return {tab.nodes, tab.weights};
}

// ---------------------------------------------------------------------------
// DiscreteMeasure

DiscreteMeasure::DiscreteMeasure(std::vector<std::pair<Vec, double>> atoms)
    : atoms_(std::move(atoms)) {
  if (atoms_.empty()) raise(Errc::invalid_argument, "discrete measure needs at least one atom");
  double total = 0.0;
  for (const auto& [v, w] : atoms_) {
    if (!(w > 0.0)) raise(Errc::invalid_argument, "atom weights must be positive");
    if (v.size() != atoms_.front().first.size())
      raise(Errc::invalid_argument, "atom dimensions disagree");
    total += w;
  }
  double cum = 0.0;
  for (auto& [v, w] : atoms_) {
    w /= total;
    cum += w;
    cumulative_.push_back(cum);
  }
  cumulative_.back() = 1.0;
}

Vec DiscreteMeasure::sample(const FinslerMetric&, const ChartPoint&, Philox& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const std::size_t i = std::min<std::size_t>(it - cumulative_.begin(), atoms_.size() - 1);
  return atoms_[i].first;
}

Vec DiscreteMeasure::mean(const FinslerMetric&, const ChartPoint&) const {
  Vec mu = Vec::Zero(atoms_.front().first.size());
  for (const auto& [v, w] : atoms_) mu += w * v;
  return mu;
}

QuadratureRule DiscreteMeasure::quadrature(const FinslerMetric&, const ChartPoint&) const {
  QuadratureRule rule;
  for (const auto& [v, w] : atoms_) {
    rule.nodes.push_back(v);
    rule.weights.push_back(w);
  }
  return rule;
}

// ---------------------------------------------------------------------------
// Builders

std::shared_ptr<MeasureFamily> make_lebesgue_disc(const Geometry& geo) {
  if (const auto* randers = dynamic_cast<const RandersMetric*>(geo.metric.get())) {
    // The disc is the navigation ball translated by the wind; its centroid is
    // the wind itself.
    const auto* wind = &randers->wind();
    auto keep_alive = geo.metric;
    return std::make_shared<LebesgueDiscMeasure>(
        MeanPolicy::analytic,
        [wind, keep_alive](const ChartPoint& p) { return wind->value(p); });
  }
  if (dynamic_cast<const RiemannianMetric*>(geo.metric.get())) {
    const int m = geo.metric->dimension();
    return std::make_shared<LebesgueDiscMeasure>(
        MeanPolicy::analytic, [m](const ChartPoint&) { return Vec(Vec::Zero(m)); });
  }
  return std::make_shared<LebesgueDiscMeasure>(MeanPolicy::quadrature, nullptr);
}

std::shared_ptr<MeasureFamily> make_indicatrix_measure(const Geometry&) {
  return std::make_shared<IndicatrixMeasure>();
}

std::shared_ptr<MeasureFamily> make_discrete_measure(std::vector<std::pair<Vec, double>> atoms) {
  return std::make_shared<DiscreteMeasure>(std::move(atoms));
}

}  // namespace finwalk
