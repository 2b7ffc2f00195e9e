#pragma once

#include <functional>
#include <string>
#include <vector>

#include "finwalk/walk.hpp"

namespace finwalk {

// Scalar observable with analytic chart-coordinate derivatives. Functions on
// multi-chart manifolds are expected to re-express their argument into a
// reference chart themselves.
struct TestFunction {
  std::string name;
  std::function<double(const ChartPoint&)> value;
  std::function<Vec(const ChartPoint&)> gradient;
  std::function<Mat(const ChartPoint&)> hessian;
  bool compact_support = false;

  // Central-difference consistency check of gradient and Hessian.
  void validate(const std::vector<ChartPoint>& probes, double tol = 1e-6,
                double step = 1e-5) const;
};

struct GeneratorEstimate {
  ChartPoint point;
  Mat second_order;   // a^{ij}, coefficient of f_ij
  Vec first_order;    // b^k, coefficient of f_k
  Mat symbol;         // identical to second_order by the co-metric convention
  std::string provenance;
  long mc_paths = 0;
  double mc_se = 0.0;
};

// Limit generator applied to f at p:
//   A f = df(mu_p) + 1/2 int [ f_ij z^i z^j - f_k Gamma^k_ij(p, z) z^i z^j ] dnu(y),
// z = y - mu_p, evaluated by the family's quadrature centered at mu_p. The
// Gamma term is skipped inside a 1e-10 ball around z = 0 (a null set for the
// continuous families; Gamma is bounded, so the omission is O(radius^m)).
double apply_A(const FinslerMetric& fm, const MeasureFamily& family, const TestFunction& f,
               const ChartPoint& p);

// Symbol sigma(A) = 1/2 int (y - mu)(y - mu)^T dnu; positive definite for
// non-degenerate families.
Mat symbol_matrix(const FinslerMetric& fm, const MeasureFamily& family, const ChartPoint& p);

// First-order coefficient b_A^k = mu^k - 1/2 int Gamma^k_ij(p, z) z^i z^j dnu.
Vec generator_first_order(const FinslerMetric& fm, const MeasureFamily& family,
                          const ChartPoint& p);

// The co-metric of the associated Riemannian metric g_A is defined to equal
// the symbol, so the second-order parts of A and the Laplace-Beltrami
// operator of g_A cancel exactly and their difference is a vector field.
inline Mat associated_cometric(const Mat& symbol) { return symbol; }
Mat associated_metric(const Mat& symbol);

// Drift of A: coefficient vector of A - Laplace_{g_A} as a first-order
// operator. Levi-Civita symbols of g_A come from central differences of the
// symbol field with step fd_step.
Vec drift(const Geometry& geo, const MeasureFamily& family, const ChartPoint& p,
          double fd_step = 1e-4);

// First-order coefficients of Laplace_{g_A} at p (needed to isolate the drift
// from Monte Carlo estimates of A f).
Vec laplace_first_order(const Geometry& geo, const MeasureFamily& family, const ChartPoint& p,
                        double fd_step = 1e-4);

// Closed-form drift of the rotating-sphere family at latitude theta:
//   (r, 1/4 r^2 cos th sin th (r^2 cos^2 th - 2) / (1 - r^2 cos^2 th)^2).
Vec katok_drift_closed_form(double r, double theta);

// Laplace-Beltrami operator of an analytic Riemannian metric applied to f.
double laplace_beltrami(const RiemannianMetric& fm, const TestFunction& f, const ChartPoint& p);

enum class ANMode { quadrature, monte_carlo };

struct McValue {
  double value = 0.0;
  double se = 0.0;
  long n = 0;
};

// Pre-limit generator A_N f = N (P^N f - f): quadrature mode pushes every
// node through the exponential map; Monte Carlo mode averages single steps.
double apply_AN(const Geometry& geo, const MeasureFamily& family, const TestFunction& f,
                const ChartPoint& p, long N, double h_ode = 1e-3);
McValue apply_AN_mc(const Geometry& geo, const MeasureFamily& family, const TestFunction& f,
                    const ChartPoint& p, long N, long samples, Philox& rng, double h_ode = 1e-3);

// (E f(xi_t) - f(p)) / t from subordinated paths; consistent with A f as
// N -> infinity and t -> 0.
McValue mc_generator_estimate(const Geometry& geo, const MeasureFamily& family,
                              const WalkConfig& cfg, const TestFunction& f);

GeneratorEstimate estimate_at(const Geometry& geo, const MeasureFamily& family,
                              const ChartPoint& p);

struct ConvergenceRow {
  long N = 0;
  double sup_error = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;  // ordered by N
  double slope = 0.0;                // log-log fit of sup_error against N
};

ConvergenceStudy convergence_study(const Geometry& geo, const MeasureFamily& family,
                                   const std::vector<TestFunction>& fs,
                                   const std::vector<ChartPoint>& probes,
                                   const std::vector<long>& Ns, double h_ode = 1e-3);

struct ExitCell {
  double delta = 0.0;
  double t = 0.0;
  long exits = 0;
  long paths = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0;  // Wilson interval
  double ci_hi = 0.0;
};

struct ExitTimeStudy {
  std::vector<ExitCell> cells;
  double slope = 0.0;  // least-squares slope of p_hat against t through 0
};

ExitTimeStudy exit_time_study(const Geometry& geo, const MeasureFamily& family,
                              const WalkConfig& cfg, const std::vector<double>& deltas,
                              const std::vector<double>& ts, double wilson_z = 1.96);

// Deterministic order-independent reduction.
double pairwise_sum(const std::vector<double>& values);

// Wilson score interval for a binomial proportion.
void wilson_interval(long successes, long n, double z, double& lo, double& hi);

}  // namespace finwalk
