#pragma once

#include <memory>
#include <string>
#include <vector>

#include "finwalk/atlas.hpp"
#include "finwalk/rng.hpp"
#include "finwalk/types.hpp"

namespace finwalk {

// A Finsler metric evaluated on chart coordinates: F(x, y) >= 0, positively
// 1-homogeneous and strongly convex in y. Implementations may register
// analytic fundamental tensors and their x-derivatives; everything else falls
// back to central finite differences.
class FinslerMetric {
 public:
  virtual ~FinslerMetric() = default;

  virtual std::string name() const = 0;
  virtual int dimension() const = 0;
  virtual bool reversible() const { return false; }

  // F(x, y); y in the chart's tangent coordinates.
  virtual double value(const ChartPoint& p, const Vec& y) const = 0;

  virtual bool has_analytic_tensor() const { return false; }
  virtual Mat analytic_tensor(const ChartPoint&, const Vec&) const {
    raise(Errc::invalid_argument, "metric has no analytic fundamental tensor");
  }

  virtual bool has_analytic_tensor_gradient() const { return false; }
  // dg[s](i,j) = d g_ij / d x^s
  virtual void analytic_tensor_gradient(const ChartPoint&, const Vec&, std::vector<Mat>&) const {
    raise(Errc::invalid_argument, "metric has no analytic tensor gradient");
  }

  // True when F does not depend on x (geodesics are straight lines).
  virtual bool flat() const { return false; }

  // Coordinate bounding box of the unit disc {F(p, .) <= 1}, used by the
  // rejection sampler. The generic version samples the indicatrix and
  // inflates; shifted-ellipsoid metrics override with the exact box.
  virtual void disc_box(const ChartPoint& p, Vec& lo, Vec& hi) const;
};

// Defaults shared by the geometry kernels.
inline constexpr double kTensorStepY = 1e-4;   // relative y-step for d^2(F^2/2)
inline constexpr double kTensorStepX = 1e-4;   // chart-unit x-step for dg/dx
inline constexpr double kMinDirectionNorm = 1e-8;
inline constexpr double kConditionLimit = 1e10;

// Fundamental tensor g_ij(x,y) = (F^2/2)_{y^i y^j}. Analytic when the metric
// supplies it, otherwise second-order central differences with step h*|y|.
Mat fundamental_tensor(const FinslerMetric& fm, const ChartPoint& p, const Vec& y,
                       double h = kTensorStepY);

// dg[s](i,j) = d g_ij / d x^s, analytic or central differences of
// fundamental_tensor with step hx.
std::vector<Mat> tensor_x_gradient(const FinslerMetric& fm, const ChartPoint& p, const Vec& y,
                                   double hx = kTensorStepX);

// Formal Christoffel symbols of the second kind,
//   Gamma^k_ij = 1/2 g^{ks} (d_j g_is + d_i g_js - d_s g_ij),
// returned as Gamma[k](i,j). 0-homogeneous in y.
std::vector<Mat> christoffel(const FinslerMetric& fm, const ChartPoint& p, const Vec& y,
                             double h = kTensorStepY);

// Largest sampled value of sqrt(g_u(v,v) / g_v(v,v)) over unit direction
// pairs: a pointwise probe of the uniform-ellipticity constant. Equals 1 for
// Riemannian metrics and is nondecreasing in n_samples.
double ellipticity_ratio(const FinslerMetric& fm, const ChartPoint& p, int n_samples, Philox& rng);

// Solves an SPD system with a positive-definiteness and conditioning guard.
Mat spd_inverse(const Mat& g, const char* what);

}  // namespace finwalk
