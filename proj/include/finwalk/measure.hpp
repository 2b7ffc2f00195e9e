#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "finwalk/metric.hpp"
#include "finwalk/rng.hpp"
#include "finwalk/zoo.hpp"

namespace finwalk {

// Discrete rule approximating integration against a per-point probability
// measure: integral f dnu ~= sum_i w_i f(Y_i), with sum w_i = 1.
struct QuadratureRule {
  std::vector<Vec> nodes;
  std::vector<double> weights;

  double integrate(const std::function<double(const Vec&)>& f) const;
  Vec integrate_vector(const std::function<Vec(const Vec&)>& f, int dim) const;
  Vec mean() const;
  // 1/2 * integral (Y - mu) (Y - mu)^T dnu, the covariance-type moment.
  Mat half_centered_second_moment(const Vec& mu) const;
};

enum class MeanPolicy { analytic, quadrature, monte_carlo };

// A smooth family of probability measures nu_p on the tangent spaces,
// supported in the unit disc {F <= 1} or on the indicatrix {F = 1}.
class MeasureFamily {
 public:
  virtual ~MeasureFamily() = default;

  virtual std::string name() const = 0;
  virtual std::string kind() const = 0;

  virtual Vec sample(const FinslerMetric& fm, const ChartPoint& p, Philox& rng) const = 0;
  virtual Vec mean(const FinslerMetric& fm, const ChartPoint& p) const = 0;
  virtual QuadratureRule quadrature(const FinslerMetric& fm, const ChartPoint& p) const = 0;

  // Rule whose radial grid is centered at `center` (an interior point of the
  // support's hull). Integrands of the form G(Y - center) with G positively
  // 0-homogeneous become separable on such a grid, so the polar rule keeps
  // its accuracy. Families without a radial structure ignore the center.
  virtual QuadratureRule quadrature_about(const FinslerMetric& fm, const ChartPoint& p,
                                          const Vec& /*center*/) const {
    return quadrature(fm, p);
  }
};

// One draw of the N-rescaled measure: (Y - mu_p)/sqrt(N) + alpha mu_p / N
// with Y ~ nu_p. alpha = 1 recovers nu_p at N = 1.
Vec rescaled_sample(const MeasureFamily& family, const FinslerMetric& fm, const ChartPoint& p,
                    long N, Philox& rng, double alpha = 1.0);

double quadrature_integrate(const MeasureFamily& family, const FinslerMetric& fm,
                            const ChartPoint& p, const std::function<double(const Vec&)>& f);

// Normalized Lebesgue measure on the unit disc D_p = {F(p, .) <= 1}.
// Sampling is rejection from the metric's disc bounding box; quadrature is a
// polar grid (Gauss-Legendre radially, uniform angularly).
class LebesgueDiscMeasure final : public MeasureFamily {
 public:
  LebesgueDiscMeasure(MeanPolicy policy, std::function<Vec(const ChartPoint&)> analytic_mean,
                      int angular_nodes = 256, int radial_nodes = 64, long mc_mean_samples = 0);

  std::string name() const override { return "lebesgue-disc"; }
  std::string kind() const override { return "lebesgue-disc"; }
  Vec sample(const FinslerMetric& fm, const ChartPoint& p, Philox& rng) const override;
  Vec mean(const FinslerMetric& fm, const ChartPoint& p) const override;
  QuadratureRule quadrature(const FinslerMetric& fm, const ChartPoint& p) const override;
  QuadratureRule quadrature_about(const FinslerMetric& fm, const ChartPoint& p,
                                  const Vec& center) const override;

  static constexpr long kRejectionBudget = 100000;

 private:
  MeanPolicy policy_;
  std::function<Vec(const ChartPoint&)> analytic_mean_;
  int n_ang_, n_rad_;
  long mc_mean_samples_;
  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<std::string, Vec> mean_cache_;
};

// Probability measure on the indicatrix {F = 1} with density proportional to
// the arclength element of the fundamental tensor. Planar charts only.
class IndicatrixMeasure final : public MeasureFamily {
 public:
  explicit IndicatrixMeasure(int table_nodes = 1024);

  std::string name() const override { return "indicatrix-fundamental"; }
  std::string kind() const override { return "indicatrix-fundamental"; }
  Vec sample(const FinslerMetric& fm, const ChartPoint& p, Philox& rng) const override;
  Vec mean(const FinslerMetric& fm, const ChartPoint& p) const override;
  QuadratureRule quadrature(const FinslerMetric& fm, const ChartPoint& p) const override;

 private:
  struct Table {
    std::vector<Vec> nodes;
    std::vector<double> weights;  // normalized
    std::vector<double> cumulative;
  };
  Table build_table(const FinslerMetric& fm, const ChartPoint& p) const;
  const Table& table(const FinslerMetric& fm, const ChartPoint& p) const;

  int n_nodes_;
  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<std::string, Table> cache_;
};

// Finitely supported measure given as explicit (vector, weight) atoms.
class DiscreteMeasure final : public MeasureFamily {
 public:
  explicit DiscreteMeasure(std::vector<std::pair<Vec, double>> atoms);

  std::string name() const override { return "discrete"; }
  std::string kind() const override { return "discrete"; }
  Vec sample(const FinslerMetric& fm, const ChartPoint& p, Philox& rng) const override;
  Vec mean(const FinslerMetric& fm, const ChartPoint& p) const override;
  QuadratureRule quadrature(const FinslerMetric& fm, const ChartPoint& p) const override;

  const std::vector<std::pair<Vec, double>>& atoms() const { return atoms_; }

 private:
  std::vector<std::pair<Vec, double>> atoms_;
  std::vector<double> cumulative_;
};

// Disc measure wired to the geometry: installs the analytic mean (the wind
// for shifted-ball metrics, zero for Riemannian ones) and falls back to
// cached quadrature otherwise.
std::shared_ptr<MeasureFamily> make_lebesgue_disc(const Geometry& geo);
std::shared_ptr<MeasureFamily> make_indicatrix_measure(const Geometry& geo);
std::shared_ptr<MeasureFamily> make_discrete_measure(std::vector<std::pair<Vec, double>> atoms);

}  // namespace finwalk
