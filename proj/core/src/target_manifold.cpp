#include "lojvar/target_manifold.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lojvar/error.hpp"

namespace lojvar {

namespace {

constexpr double kRootTol = 1e-13;
constexpr int kRootMaxIter = 200;

}  // namespace

TargetManifold::TargetManifold(Kind kind, Vec axes, double delta)
    : kind_(kind), axes_(std::move(axes)), delta_(delta) {}

TargetManifold TargetManifold::sphere(int ambient_dim, std::optional<double> tube_radius) {
  if (ambient_dim < 2) {
    throw Error(ErrorCode::invalid_argument, "sphere target needs ambient dimension >= 2");
  }
  const double delta = tube_radius.value_or(0.5);
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "sphere tube radius must lie in (0, 1)");
  }
  return TargetManifold(Kind::sphere, Vec::Ones(ambient_dim), delta);
}

TargetManifold TargetManifold::ellipsoid(const Vec& semi_axes, std::optional<double> tube_radius) {
  if (semi_axes.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "ellipsoid target needs ambient dimension >= 2");
  }
  if ((semi_axes.array() <= 0.0).any() || !semi_axes.allFinite()) {
    throw Error(ErrorCode::invalid_argument, "ellipsoid semi-axes must be positive");
  }
  const double cmin = semi_axes.minCoeff();
  const double delta = tube_radius.value_or(0.25 * cmin);
  if (!(delta > 0.0 && delta < cmin)) {
    throw Error(ErrorCode::invalid_argument, "ellipsoid tube radius must lie in (0, min semi-axis)");
  }
  return TargetManifold(Kind::ellipsoid, semi_axes, delta);
}

void TargetManifold::check_dim(const Vec& x) const {
  if (x.size() != axes_.size()) {
    throw Error(ErrorCode::length_mismatch, "point has dimension " + std::to_string(x.size()) +
                                                ", target lives in R^" +
                                                std::to_string(axes_.size()));
  }
}

double TargetManifold::level(const Vec& x) const {
  check_dim(x);
  return x.cwiseQuotient(axes_).squaredNorm() - 1.0;
}

bool TargetManifold::contains(const Vec& y, double tol) const {
  if (kind_ == Kind::sphere) return std::abs(y.norm() - 1.0) <= tol;
  return std::abs(level(y)) <= tol;
}

void TargetManifold::check_on(const Vec& y) const {
  check_dim(y);
  if (!contains(y)) {
    throw Error(ErrorCode::not_on_manifold, "point is not on the target (level " +
                                                std::to_string(level(y)) + ")");
  }
}

Vec TargetManifold::project_nearest(const Vec& x) const {
  check_dim(x);
  if (kind_ == Kind::sphere) {
    const double r = x.norm();
    if (!(std::abs(r - 1.0) < delta_)) {
      throw Error(ErrorCode::outside_tube, "point at radius " + std::to_string(r) +
                                               " is outside the projection tube");
    }
    return x / r;
  }
  return project_ellipsoid(x);
}

double TargetManifold::ellipsoid_multiplier(const Vec& x) const {
  const double r = x.norm();
  const double cmin = axes_.minCoeff();
  const double cmax = axes_.maxCoeff();
  if (!(r > cmin - delta_ && r < cmax + delta_)) {
    throw Error(ErrorCode::outside_tube, "point at radius " + std::to_string(r) +
                                             " is outside the ellipsoid tube");
  }
  const Vec c2 = axes_.array().square();
  const Vec cx = axes_.cwiseProduct(x);

  // Lagrange condition y_a = c_a² x_a / (c_a² + t); g is decreasing in t on (-c_min², ∞).
  auto g = [&](double t) { return cx.cwiseQuotient((c2.array() + t).matrix()).squaredNorm() - 1.0; };
  auto dg = [&](double t) {
    const auto d = (c2.array() + t);
    return -2.0 * (cx.array().square() / d.cube()).sum();
  };

  double lo;
  double hi;
  if (g(0.0) >= 0.0) {
    lo = 0.0;
    hi = cmax * r;
  } else {
    lo = -cmin * cmin * (1.0 - 1e-15);
    hi = 0.0;
    if (!(g(lo) > 0.0)) {
      throw Error(ErrorCode::not_converged, "ellipsoid projection has no admissible multiplier");
    }
  }

  double t = 0.5 * (lo + hi);
  bool converged = false;
  for (int it = 0; it < kRootMaxIter; ++it) {
    const double gt = g(t);
    if (std::abs(gt) < kRootTol) {
      converged = true;
      break;
    }
    if (gt > 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    const double d = dg(t);
    double next = (d != 0.0) ? t - gt / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo < kRootTol * std::max(1.0, std::abs(t))) {
      t = next;
      converged = true;
      break;
    }
    t = next;
  }
  if (!converged) {
    throw Error(ErrorCode::not_converged, "ellipsoid projection root solve did not converge");
  }

  return t;
}

Vec TargetManifold::project_ellipsoid(const Vec& x) const {
  const Vec c2 = axes_.array().square();
  const double t = ellipsoid_multiplier(x);
  Vec y = c2.cwiseProduct(x).cwiseQuotient((c2.array() + t).matrix());
  y /= std::sqrt(y.cwiseQuotient(axes_).squaredNorm());
  if (!((x - y).norm() < delta_)) {
    throw Error(ErrorCode::outside_tube, "point is farther than the tube radius from the ellipsoid");
  }
  return y;
}

Vec TargetManifold::differential_of_projection(const Vec& x, const Vec& v) const {
  check_dim(x);
  check_dim(v);
  if (kind_ == Kind::sphere) {
    const double r = x.norm();
    if (!(std::abs(r - 1.0) < delta_)) {
      throw Error(ErrorCode::outside_tube, "point is outside the projection tube");
    }
    const Vec xh = x / r;
    return (v - v.dot(xh) * xh) / r;
  }
  const double vn = v.norm();
  if (vn == 0.0) return Vec::Zero(x.size());
  const double eps = 1e-6 * std::max(1.0, x.norm());
  const Vec vh = v / vn;
  return vn * (project_nearest(x + eps * vh) - project_nearest(x - eps * vh)) / (2.0 * eps);
}

Mat TargetManifold::projection_jacobian(const Vec& x) const {
  check_dim(x);
  const int p = ambient_dim();
  if (kind_ == Kind::sphere) {
    const double r = x.norm();
    if (!(std::abs(r - 1.0) < delta_)) {
      throw Error(ErrorCode::outside_tube, "point is outside the projection tube");
    }
    const Vec xh = x / r;
    return (Mat::Identity(p, p) - xh * xh.transpose()) / r;
  }
  // Implicit differentiation of y = W x, W = diag(1/(1 + t/c²)), subject to
  // yᵀ D y = 1 with D = diag(1/c²).
  const Vec c2 = axes_.array().square();
  const double t = ellipsoid_multiplier(x);
  const Vec w = c2.cwiseQuotient((c2.array() + t).matrix());
  const Vec y = w.cwiseProduct(x);
  const Vec wg = w.cwiseProduct(y.cwiseQuotient(c2));
  const double denom = y.cwiseQuotient(c2).dot(wg);
  Mat J = Mat(w.asDiagonal()) - wg * wg.transpose() / denom;
  return J;
}

Vec TargetManifold::unit_normal(const Vec& y) const {
  check_dim(y);
  const Vec g = y.cwiseQuotient(axes_.cwiseProduct(axes_));
  return g / g.norm();
}

Mat TargetManifold::projector_unchecked(const Vec& y) const {
  const Vec n = unit_normal(y);
  return Mat::Identity(y.size(), y.size()) - n * n.transpose();
}

Mat TargetManifold::tangent_projector(const Vec& y) const {
  check_on(y);
  return projector_unchecked(y);
}

Vec TargetManifold::second_fundamental_form(const Vec& y, const Vec& X, const Vec& Y) const {
  check_on(y);
  check_dim(X);
  check_dim(Y);
  const Mat P = projector_unchecked(y);
  if ((P * X - X).norm() > 1e-10 * std::max(1.0, X.norm()) ||
      (P * Y - Y).norm() > 1e-10 * std::max(1.0, Y.norm())) {
    throw Error(ErrorCode::not_tangent, "second fundamental form needs tangent arguments");
  }
  if (kind_ == Kind::sphere) return X.dot(Y) * y;

  // Differentiate the projector field along the curve s -> Π(y + sX).
  const double xn = X.norm();
  if (xn == 0.0) return Vec::Zero(y.size());
  const Vec xh = X / xn;
  const double eps = 1e-5;
  const Mat Pp = projector_unchecked(project_nearest(y + eps * xh));
  const Mat Pm = projector_unchecked(project_nearest(y - eps * xh));
  const Vec a = -xn * ((Pp - Pm) / (2.0 * eps)) * Y;
  // Keep only the normal part; the tangential part is finite-difference noise.
  return a - P * a;
}

}  // namespace lojvar
