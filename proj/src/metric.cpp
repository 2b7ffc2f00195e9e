#include "finwalk/metric.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace finwalk {

void FinslerMetric::disc_box(const ChartPoint& p, Vec& lo, Vec& hi) const {
  const int m = dimension();
  lo = Vec::Zero(m);
  hi = Vec::Zero(m);
  if (m == 1) {
    hi[0] = 1.05 / value(p, make_vec({1.0}));
    lo[0] = -1.05 / value(p, make_vec({-1.0}));
    return;
  }
  // Coordinate extents of the convex disc are attained on the indicatrix
  // u/F(u); sample directions and inflate to cover the discretization gap.
  const int n_dirs = m == 2 ? 64 : 512;
  for (int k = 0; k < n_dirs; ++k) {
    Vec u(m);
    if (m == 2) {
      const double phi = 2.0 * M_PI * k / n_dirs;
      u[0] = std::cos(phi);
      u[1] = std::sin(phi);
    } else {
      // Low-discrepancy-ish direction set from a fixed counter stream.
      Philox dir_rng(0x5EEDBA5Eu, static_cast<std::uint64_t>(k));
      double n2 = 0.0;
      do {
        n2 = 0.0;
        for (int i = 0; i < m; ++i) {
          u[i] = dir_rng.normal();
          n2 += u[i] * u[i];
        }
      } while (n2 < 1e-12);
      u /= std::sqrt(n2);
    }
    const double f = value(p, u);
    if (!(f > 0.0)) raise(Errc::not_positive_definite, "F(u) <= 0 on a unit direction");
    for (int i = 0; i < m; ++i) {
      lo[i] = std::min(lo[i], u[i] / f);
      hi[i] = std::max(hi[i], u[i] / f);
    }
  }
  for (int i = 0; i < m; ++i) {
    lo[i] *= 1.1;
    hi[i] *= 1.1;
  }
}

namespace {

double energy(const FinslerMetric& fm, const ChartPoint& p, const Vec& y) {
  const double f = fm.value(p, y);
  return 0.5 * f * f;
}

void check_spd(const Mat& g, const char* what) {
  Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) raise(Errc::not_positive_definite, what);
  if (hi / lo > kConditionLimit) raise(Errc::ill_conditioned, what);
}

}  // namespace

Mat fundamental_tensor(const FinslerMetric& fm, const ChartPoint& p, const Vec& y, double h) {
  const int m = fm.dimension();
  const double yn = y.norm();
  if (yn < kMinDirectionNorm) raise(Errc::singular_direction, "fundamental tensor needs y != 0");
  if (fm.has_analytic_tensor()) return fm.analytic_tensor(p, y);

  const double step = h * yn;
  Mat g(m, m);
  const double e0 = energy(fm, p, y);
  Vec ya = y, yb = y;
  for (int i = 0; i < m; ++i) {
    ya = y;
    ya[i] += step;
    yb = y;
    yb[i] -= step;
    g(i, i) = (energy(fm, p, ya) - 2.0 * e0 + energy(fm, p, yb)) / (step * step);
    for (int j = i + 1; j < m; ++j) {
      Vec ypp = y, ypm = y, ymp = y, ymm = y;
      ypp[i] += step; ypp[j] += step;
      ypm[i] += step; ypm[j] -= step;
      ymp[i] -= step; ymp[j] += step;
      ymm[i] -= step; ymm[j] -= step;
      const double v = (energy(fm, p, ypp) - energy(fm, p, ypm) - energy(fm, p, ymp) +
                        energy(fm, p, ymm)) /
                       (4.0 * step * step);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  check_spd(g, "finite-difference fundamental tensor");
  return g;
}

std::vector<Mat> tensor_x_gradient(const FinslerMetric& fm, const ChartPoint& p, const Vec& y,
                                   double hx) {
  const int m = fm.dimension();
  std::vector<Mat> dg(m);
  if (fm.has_analytic_tensor_gradient()) {
    fm.analytic_tensor_gradient(p, y, dg);
    return dg;
  }
  ChartPoint pa = p, pb = p;
  for (int s = 0; s < m; ++s) {
    pa.x = p.x;
    pa.x[s] += hx;
    pb.x = p.x;
    pb.x[s] -= hx;
    dg[s] = (fundamental_tensor(fm, pa, y) - fundamental_tensor(fm, pb, y)) / (2.0 * hx);
  }
  return dg;
}

Mat spd_inverse(const Mat& g, const char* what) {
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) raise(Errc::not_positive_definite, what);
  Mat inv = llt.solve(Mat::Identity(g.rows(), g.cols()));
  // Cheap conditioning estimate from the max-norms of g and g^{-1}.
  const double cond = g.cwiseAbs().maxCoeff() * inv.cwiseAbs().maxCoeff() * g.rows();
  if (cond > kConditionLimit) raise(Errc::ill_conditioned, what);
  return inv;
}

std::vector<Mat> christoffel(const FinslerMetric& fm, const ChartPoint& p, const Vec& y, double h) {
  const int m = fm.dimension();
  if (y.norm() < kMinDirectionNorm)
    raise(Errc::singular_direction, "Christoffel symbols need y != 0");
  const Mat g = fundamental_tensor(fm, p, y, h);
  const Mat gi = spd_inverse(g, "fundamental tensor in Christoffel symbols");
  const std::vector<Mat> dg = tensor_x_gradient(fm, p, y);

  std::vector<Mat> gamma(m, Mat::Zero(m, m));
  for (int k = 0; k < m; ++k) {
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        double v = 0.0;
        for (int s = 0; s < m; ++s)
          v += gi(k, s) * (dg[j](i, s) + dg[i](j, s) - dg[s](i, j));
        gamma[k](i, j) = 0.5 * v;
        gamma[k](j, i) = 0.5 * v;
      }
    }
  }
  return gamma;
}

double ellipticity_ratio(const FinslerMetric& fm, const ChartPoint& p, int n_samples, Philox& rng) {
  if (n_samples < 2) raise(Errc::invalid_argument, "ellipticity_ratio needs n_samples >= 2");
  const int m = fm.dimension();
  double best = 1.0;
  Vec u(m), v(m);
  for (int k = 0; k < n_samples; ++k) {
    for (auto* w : {&u, &v}) {
      double n2 = 0.0;
      do {
        n2 = 0.0;
        for (int i = 0; i < m; ++i) {
          (*w)[i] = rng.normal();
          n2 += (*w)[i] * (*w)[i];
        }
      } while (n2 < 1e-12);
      *w /= std::sqrt(n2);
    }
    const Mat gu = fundamental_tensor(fm, p, u);
    const Mat gv = fundamental_tensor(fm, p, v);
    const double num = v.dot(gu * v);
    const double den = v.dot(gv * v);
    if (!(den > 0.0)) raise(Errc::not_positive_definite, "g_v(v,v) <= 0");
    best = std::max(best, std::sqrt(num / den));
  }
  return best;
}

}  // namespace finwalk
