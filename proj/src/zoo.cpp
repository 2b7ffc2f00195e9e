#include "finwalk/zoo.hpp"

#include <cmath>

namespace finwalk {

namespace {

class ConstantField final : public RiemannianField {
 public:
  explicit ConstantField(const Mat& g) : g_(g) {}
  int dimension() const override { return static_cast<int>(g_.rows()); }
  Mat value(const ChartPoint&) const override { return g_; }
  void gradient(const ChartPoint&, std::vector<Mat>& dg) const override {
    dg.assign(dimension(), Mat::Zero(g_.rows(), g_.cols()));
  }
  bool constant() const override { return true; }

 private:
  Mat g_;
};

// Round metric of the unit sphere in either spherical chart:
//   g = diag(cos^2 theta, 1).
class RoundSphereField final : public RiemannianField {
 public:
  int dimension() const override { return 2; }
  Mat value(const ChartPoint& p) const override {
    const double c = std::cos(p.x[1]);
    Mat g = Mat::Zero(2, 2);
    g(0, 0) = c * c;
    g(1, 1) = 1.0;
    return g;
  }
  void gradient(const ChartPoint& p, std::vector<Mat>& dg) const override {
    dg.assign(2, Mat::Zero(2, 2));
    dg[1](0, 0) = -2.0 * std::cos(p.x[1]) * std::sin(p.x[1]);
  }
};

class ConstantWind final : public VectorField {
 public:
  explicit ConstantWind(const Vec& w) : w_(w) {}
  int dimension() const override { return static_cast<int>(w_.size()); }
  Vec value(const ChartPoint&) const override { return w_; }
  void gradient(const ChartPoint&, std::vector<Vec>& dw) const override {
    dw.assign(dimension(), Vec::Zero(w_.size()));
  }
  bool constant() const override { return true; }
  bool zero() const override { return w_.norm() == 0.0; }

 private:
  Vec w_;
};

// r * d_psi of chart 0 expressed in both sphere charts. In chart 1 the same
// rotation field has components r * (-sin(psi) tan(theta), -cos(psi)).
class RotationWind final : public VectorField {
 public:
  explicit RotationWind(double r) : r_(r) {}
  int dimension() const override { return 2; }
  Vec value(const ChartPoint& p) const override {
    if (p.chart == 0) return make_vec({r_, 0.0});
    const double psi = p.x[0], th = p.x[1];
    return make_vec({-r_ * std::sin(psi) * std::tan(th), -r_ * std::cos(psi)});
  }
  void gradient(const ChartPoint& p, std::vector<Vec>& dw) const override {
    dw.assign(2, Vec::Zero(2));
    if (p.chart == 0) return;
    const double psi = p.x[0], th = p.x[1];
    const double c = std::cos(th);
    dw[0] = make_vec({-r_ * std::cos(psi) * std::tan(th), r_ * std::sin(psi)});
    dw[1] = make_vec({-r_ * std::sin(psi) / (c * c), 0.0});
  }
  bool zero() const override { return r_ == 0.0; }

 private:
  double r_;
};

}  // namespace

std::shared_ptr<const RiemannianField> constant_field(const Mat& g) {
  return std::make_shared<ConstantField>(g);
}

std::shared_ptr<const RiemannianField> round_sphere_field() {
  return std::make_shared<RoundSphereField>();
}

std::shared_ptr<const VectorField> constant_wind(const Vec& w) {
  return std::make_shared<ConstantWind>(w);
}

std::shared_ptr<const VectorField> rotation_wind(double r) {
  return std::make_shared<RotationWind>(r);
}

// ---------------------------------------------------------------------------
// RiemannianMetric

RiemannianMetric::RiemannianMetric(std::string name, std::shared_ptr<const RiemannianField> g)
    : name_(std::move(name)), g_(std::move(g)) {}

double RiemannianMetric::value(const ChartPoint& p, const Vec& y) const {
  const double q = y.dot(g_->value(p) * y);
  return q > 0.0 ? std::sqrt(q) : 0.0;
}

void RiemannianMetric::disc_box(const ChartPoint& p, Vec& lo, Vec& hi) const {
  const Mat gi = spd_inverse(g_->value(p), "Riemannian metric");
  const int m = dimension();
  lo = Vec(m);
  hi = Vec(m);
  for (int i = 0; i < m; ++i) {
    const double e = std::sqrt(gi(i, i));
    lo[i] = -e;
    hi[i] = e;
  }
}

// ---------------------------------------------------------------------------
// RandersMetric

struct RandersMetric::Data {
  Mat a;           // Randers quadratic part
  Vec b;           // Randers linear part
  Vec w;           // wind
  double lambda;   // 1 - h(W,W)
  std::vector<Mat> da;
  std::vector<Vec> db;
  bool with_gradient = false;
};

RandersMetric::RandersMetric(std::string name, std::shared_ptr<const RiemannianField> h,
                             std::shared_ptr<const VectorField> wind)
    : name_(std::move(name)), h_(std::move(h)), wind_(std::move(wind)) {
  if (h_->dimension() != wind_->dimension())
    raise(Errc::invalid_argument, "navigation data dimensions disagree");
}

RandersMetric::Data RandersMetric::data(const ChartPoint& p) const {
  Data d;
  const Mat h = h_->value(p);
  d.w = wind_->value(p);
  const Vec wl = h * d.w;  // lowered wind
  d.lambda = 1.0 - d.w.dot(wl);
  if (d.lambda < 1e-9)
    raise(Errc::navigation_too_fast, "wind reaches unit speed: h(W,W) >= 1 - 1e-9");
  d.a = h / d.lambda + (wl * wl.transpose()) / (d.lambda * d.lambda);
  d.b = -wl / d.lambda;
  return d;
}

namespace {

// Shared evaluation of the Randers norm F = alpha + beta and, on request, the
// fundamental tensor g = l l^T + (F/alpha)(a - yt yt^T / alpha^2) with
// l = yt/alpha + b, yt = a y.
struct RandersEval {
  double alpha, F;
  Vec yt, l;
};

RandersEval randers_eval(const Mat& a, const Vec& b, const Vec& y) {
  RandersEval e;
  e.yt = a * y;
  const double a2 = y.dot(e.yt);
  e.alpha = std::sqrt(a2);
  e.F = e.alpha + b.dot(y);
  e.l = e.yt / e.alpha + b;
  return e;
}

}  // namespace

double RandersMetric::value(const ChartPoint& p, const Vec& y) const {
  const Data d = data(p);
  const double a2 = y.dot(d.a * y);
  if (a2 <= 0.0) return 0.0;
  return std::sqrt(a2) + d.b.dot(y);
}

Mat RandersMetric::analytic_tensor(const ChartPoint& p, const Vec& y) const {
  if (y.norm() < kMinDirectionNorm)
    raise(Errc::singular_direction, "Randers tensor needs y != 0");
  const Data d = data(p);
  const RandersEval e = randers_eval(d.a, d.b, y);
  const double a2 = e.alpha * e.alpha;
  return e.l * e.l.transpose() + (e.F / e.alpha) * (d.a - (e.yt * e.yt.transpose()) / a2);
}

void RandersMetric::analytic_tensor_gradient(const ChartPoint& p, const Vec& y,
                                             std::vector<Mat>& dg) const {
  if (y.norm() < kMinDirectionNorm)
    raise(Errc::singular_direction, "Randers tensor gradient needs y != 0");
  const int m = dimension();

  const Mat h = h_->value(p);
  const Vec w = wind_->value(p);
  std::vector<Mat> dh;
  std::vector<Vec> dw;
  h_->gradient(p, dh);
  wind_->gradient(p, dw);

  const Vec wl = h * w;
  const double lam = 1.0 - w.dot(wl);
  if (lam < 1e-9) raise(Errc::navigation_too_fast, "wind reaches unit speed");
  const Mat a = h / lam + (wl * wl.transpose()) / (lam * lam);
  const Vec b = -wl / lam;
  const RandersEval e = randers_eval(a, b, y);
  const double a2 = e.alpha * e.alpha;
  const Mat M = a - (e.yt * e.yt.transpose()) / a2;

  dg.assign(m, Mat::Zero(m, m));
  for (int s = 0; s < m; ++s) {
    const Vec dwl = dh[s] * w + h * dw[s];
    const double dlam = -w.dot(dh[s] * w) - 2.0 * wl.dot(dw[s]);
    const Mat da = dh[s] / lam - h * (dlam / (lam * lam)) +
                   (dwl * wl.transpose() + wl * dwl.transpose()) / (lam * lam) -
                   (wl * wl.transpose()) * (2.0 * dlam / (lam * lam * lam));
    const Vec db = -dwl / lam + wl * (dlam / (lam * lam));

    const Vec dyt = da * y;
    const double dalpha = y.dot(dyt) / (2.0 * e.alpha);
    const double dF = dalpha + db.dot(y);
    const Vec dl = dyt / e.alpha - e.yt * (dalpha / a2) + db;
    const Mat dM = da - (dyt * e.yt.transpose() + e.yt * dyt.transpose()) / a2 +
                   (e.yt * e.yt.transpose()) * (2.0 * dalpha / (a2 * e.alpha));

    dg[s] = dl * e.l.transpose() + e.l * dl.transpose() +
            (dF / e.alpha - e.F * dalpha / a2) * M + (e.F / e.alpha) * dM;
  }
}

void RandersMetric::disc_box(const ChartPoint& p, Vec& lo, Vec& hi) const {
  // The unit disc is the h-unit ball translated by the wind, so the exact
  // coordinate extents are W_i +/- sqrt((h^{-1})_ii).
  const Mat hi_inv = spd_inverse(h_->value(p), "navigation metric");
  const Vec w = wind_->value(p);
  const int m = dimension();
  lo = Vec(m);
  hi = Vec(m);
  for (int i = 0; i < m; ++i) {
    const double e = std::sqrt(hi_inv(i, i));
    lo[i] = w[i] - e;
    hi[i] = w[i] + e;
  }
}

// ---------------------------------------------------------------------------
// Factories

Geometry make_euclidean(int dim) {
  if (dim < 1) raise(Errc::invalid_argument, "euclidean(m) needs m >= 1");
  Geometry g;
  g.metric = std::make_shared<RiemannianMetric>("euclidean(" + std::to_string(dim) + ")",
                                                constant_field(Mat::Identity(dim, dim)));
  g.atlas = std::make_shared<FlatAtlas>(dim);
  return g;
}

Geometry make_round_sphere() {
  Geometry g;
  g.metric = std::make_shared<RiemannianMetric>("sphere", round_sphere_field());
  g.atlas = std::make_shared<SphereAtlas>();
  return g;
}

Geometry make_flat_randers(const Vec& wind) {
  const int m = static_cast<int>(wind.size());
  Geometry g;
  g.metric = std::make_shared<RandersMetric>("flat_randers", constant_field(Mat::Identity(m, m)),
                                             constant_wind(wind));
  g.atlas = std::make_shared<FlatAtlas>(m);
  return g;
}

Geometry make_katok(double r) {
  if (!(std::abs(r) < 1.0)) raise(Errc::invalid_argument, "katok(r) needs |r| < 1");
  Geometry g;
  g.metric = std::make_shared<RandersMetric>("katok(" + std::to_string(r) + ")",
                                             round_sphere_field(), rotation_wind(r));
  g.atlas = std::make_shared<SphereAtlas>();
  return g;
}

Geometry make_geometry(const std::string& name, const std::map<std::string, double>& params) {
  auto get = [&](const std::string& key, double fallback, bool required = false) {
    auto it = params.find(key);
    if (it != params.end()) return it->second;
    if (required) raise(Errc::invalid_config, "metric '" + name + "' needs parameter '" + key + "'");
    return fallback;
  };
  if (name == "euclidean") return make_euclidean(static_cast<int>(get("m", 2)));
  if (name == "sphere") return make_round_sphere();
  if (name == "katok") return make_katok(get("r", 0.0, true));
  if (name == "flat_randers") {
    const int m = static_cast<int>(get("m", 2));
    Vec w = Vec::Zero(m);
    for (int i = 0; i < m; ++i) w[i] = get("w" + std::to_string(i), 0.0);
    return make_flat_randers(w);
  }
  raise(Errc::invalid_config, "unknown metric '" + name + "'");
}

}  // namespace finwalk
