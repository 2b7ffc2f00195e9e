#pragma once

#include <memory>
#include <vector>

#include "finwalk/types.hpp"

namespace finwalk {

struct ChartPoint {
  int chart = 0;
  Vec x;
};

struct Chart {
  int id = 0;
  int dim = 0;
  Vec lo, hi;  // coordinate domain box (open)
};

// A manifold presented as coordinate charts with transition maps. Transition
// maps are mutually inverse on overlaps; the switch policy decides when a
// point has to be re-expressed so that evaluations stay away from chart
// degeneracies.
class ChartAtlas {
 public:
  virtual ~ChartAtlas() = default;

  virtual int dimension() const = 0;
  virtual int chart_count() const = 0;
  virtual const Chart& chart(int id) const = 0;

  virtual bool in_domain(const ChartPoint& p) const;

  // Switch policy.
  virtual bool wants_switch(const ChartPoint& p) const = 0;
  virtual int switch_target(const ChartPoint& p) const = 0;

  // Re-express a point (and tangent vectors at it) in another chart.
  virtual ChartPoint express(const ChartPoint& p, int target_chart) const = 0;
  virtual Vec express_tangent(const ChartPoint& p, const Vec& y, int target_chart) const = 0;
};

// Applies the switch policy: identity when the point is fine where it is,
// otherwise the same geometric point in the designated overlapping chart.
ChartPoint transition(const ChartAtlas& atlas, const ChartPoint& p);

struct ChartState {
  ChartPoint point;
  Vec tangent;
};
ChartState transition(const ChartAtlas& atlas, const ChartPoint& p, const Vec& y);

// R^m as a single chart.
class FlatAtlas final : public ChartAtlas {
 public:
  explicit FlatAtlas(int dim, double half_width = 1e9);

  int dimension() const override { return dim_; }
  int chart_count() const override { return 1; }
  const Chart& chart(int id) const override;
  bool wants_switch(const ChartPoint&) const override { return false; }
  int switch_target(const ChartPoint&) const override { return 0; }
  ChartPoint express(const ChartPoint& p, int target_chart) const override;
  Vec express_tangent(const ChartPoint& p, const Vec& y, int target_chart) const override;

 private:
  int dim_;
  Chart chart_;
};

// The unit 2-sphere covered by two spherical charts: chart 0 is
//   (psi, theta) -> (cos psi cos theta, sin psi cos theta, sin theta),
// chart 1 is the same map composed with a quarter turn about the x-axis, so
// the poles of one chart sit on the equator of the other. A point is switched
// once its latitude passes theta_switch; re-expressed latitude then satisfies
// |theta'| < pi/2 - theta_switch.
class SphereAtlas final : public ChartAtlas {
 public:
  explicit SphereAtlas(double theta_switch = 1.0);

  int dimension() const override { return 2; }
  int chart_count() const override { return 2; }
  const Chart& chart(int id) const override;
  bool in_domain(const ChartPoint& p) const override;
  bool wants_switch(const ChartPoint& p) const override;
  int switch_target(const ChartPoint& p) const override;
  ChartPoint express(const ChartPoint& p, int target_chart) const override;
  Vec express_tangent(const ChartPoint& p, const Vec& y, int target_chart) const override;

  double theta_switch() const { return theta_switch_; }

  // Embedding into R^3 (shared by tests and the SVG projection).
  Vec3 embed(const ChartPoint& p) const;
  Vec3 embed_tangent(const ChartPoint& p, const Vec& y) const;
  Vec coords_from_embedding(int chart, const Vec3& pos) const;

 private:
  double theta_switch_;
  Chart charts_[2];
};

}  // namespace finwalk
