#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>

#include "finwalk/metric.hpp"

namespace finwalk {

// Analytic Riemannian metric field on an atlas, with x-derivatives.
class RiemannianField {
 public:
  virtual ~RiemannianField() = default;
  virtual int dimension() const = 0;
  virtual Mat value(const ChartPoint& p) const = 0;
  virtual void gradient(const ChartPoint& p, std::vector<Mat>& dg) const = 0;
  virtual bool constant() const { return false; }
};

class VectorField {
 public:
  virtual ~VectorField() = default;
  virtual int dimension() const = 0;
  virtual Vec value(const ChartPoint& p) const = 0;
  virtual void gradient(const ChartPoint& p, std::vector<Vec>& dw) const = 0;
  virtual bool constant() const { return false; }
  virtual bool zero() const { return false; }
};

std::shared_ptr<const RiemannianField> constant_field(const Mat& g);
std::shared_ptr<const RiemannianField> round_sphere_field();
std::shared_ptr<const VectorField> constant_wind(const Vec& w);
// r * d_psi on the two-chart sphere atlas, expressed per chart.
std::shared_ptr<const VectorField> rotation_wind(double r);

// F(y) = sqrt(g(y,y)). The fundamental tensor is g itself (y-independent) and
// the formal Christoffel symbols reduce to the Levi-Civita ones.
class RiemannianMetric final : public FinslerMetric {
 public:
  RiemannianMetric(std::string name, std::shared_ptr<const RiemannianField> g);

  std::string name() const override { return name_; }
  int dimension() const override { return g_->dimension(); }
  bool reversible() const override { return true; }
  double value(const ChartPoint& p, const Vec& y) const override;
  bool has_analytic_tensor() const override { return true; }
  Mat analytic_tensor(const ChartPoint& p, const Vec&) const override { return g_->value(p); }
  bool has_analytic_tensor_gradient() const override { return true; }
  void analytic_tensor_gradient(const ChartPoint& p, const Vec&,
                                std::vector<Mat>& dg) const override {
    g_->gradient(p, dg);
  }
  bool flat() const override { return g_->constant(); }
  void disc_box(const ChartPoint& p, Vec& lo, Vec& hi) const override;

  const RiemannianField& field() const { return *g_; }

 private:
  std::string name_;
  std::shared_ptr<const RiemannianField> g_;
};

// Zermelo navigation metric for data (h, W) with h(W,W) < 1: F(y) is the
// unique s > 0 with h(y/s - W, y/s - W) = 1, equivalently the Randers norm
//   F = sqrt(lam h(y,y) + h(W,y)^2)/lam - h(W,y)/lam,  lam = 1 - h(W,W).
// Its indicatrix is the h-unit sphere translated by W. Fundamental tensor and
// its x-gradient are analytic via the Randers closed form.
class RandersMetric final : public FinslerMetric {
 public:
  RandersMetric(std::string name, std::shared_ptr<const RiemannianField> h,
                std::shared_ptr<const VectorField> wind);

  std::string name() const override { return name_; }
  int dimension() const override { return h_->dimension(); }
  bool reversible() const override { return wind_->zero(); }
  double value(const ChartPoint& p, const Vec& y) const override;
  bool has_analytic_tensor() const override { return true; }
  Mat analytic_tensor(const ChartPoint& p, const Vec& y) const override;
  bool has_analytic_tensor_gradient() const override { return true; }
  void analytic_tensor_gradient(const ChartPoint& p, const Vec& y,
                                std::vector<Mat>& dg) const override;
  bool flat() const override { return h_->constant() && wind_->constant(); }
  void disc_box(const ChartPoint& p, Vec& lo, Vec& hi) const override;

  const RiemannianField& navigation_metric() const { return *h_; }
  const VectorField& wind() const { return *wind_; }

 private:
  struct Data;  // Randers data (a, b) and x-derivatives at a point
  Data data(const ChartPoint& p) const;

  std::string name_;
  std::shared_ptr<const RiemannianField> h_;
  std::shared_ptr<const VectorField> wind_;
};

// A metric together with the atlas it lives on.
struct Geometry {
  std::shared_ptr<const FinslerMetric> metric;
  std::shared_ptr<const ChartAtlas> atlas;
};

Geometry make_euclidean(int dim);
Geometry make_round_sphere();
// Flat Randers norm on R^dim with a constant wind.
Geometry make_flat_randers(const Vec& wind);
// Zermelo metric of the round sphere with wind r * d_psi, |r| < 1.
Geometry make_katok(double r);

// Zoo lookup by name + parameter map: euclidean(m), sphere, katok(r),
// flat_randers(w0, w1, ...).
Geometry make_geometry(const std::string& name, const std::map<std::string, double>& params);

}  // namespace finwalk
