#include "lojvar/bundle.hpp"

#include <cmath>
#include <string>

#include "lojvar/error.hpp"

namespace lojvar {

namespace {

constexpr double kFiberTol = 1e-10;
constexpr double kChartCosine = 0.1;

void check_shape(const PullbackBundle& b, const NodeField& f) {
  if (f.rows() != b.size() || f.cols() != b.ambient_dim()) {
    throw Error(ErrorCode::length_mismatch,
                "field is " + std::to_string(f.rows()) + "x" + std::to_string(f.cols()) +
                    ", bundle expects " + std::to_string(b.size()) + "x" +
                    std::to_string(b.ambient_dim()));
  }
}

}  // namespace

NodeField PullbackBundle::project(const NodeField& raw) const {
  check_shape(*this, raw);
  NodeField out(raw.rows(), raw.cols());
  for (int i = 0; i < size(); ++i) out.row(i) = (projectors[i] * raw.row(i).transpose()).transpose();
  return out;
}

Vec PullbackBundle::to_fiber_coords(const NodeField& values) const {
  check_shape(*this, values);
  const int q = fiber_dim();
  Vec c(size() * q);
  for (int i = 0; i < size(); ++i) c.segment(i * q, q) = fiber_bases[i].transpose() * values.row(i).transpose();
  return c;
}

NodeField PullbackBundle::from_fiber_coords(const Vec& coords) const {
  const int q = fiber_dim();
  if (coords.size() != size() * q) {
    throw Error(ErrorCode::length_mismatch, "fiber coordinate vector has wrong length");
  }
  NodeField out(size(), ambient_dim());
  for (int i = 0; i < size(); ++i) out.row(i) = (fiber_bases[i] * coords.segment(i * q, q)).transpose();
  return out;
}

BundlePtr build_pullback_bundle(const DomainMesh& mesh, const TargetManifold& target,
                                const NodeField& base_map) {
  auto b = std::make_shared<PullbackBundle>(PullbackBundle{mesh, target, base_map, {}, {}});
  check_shape(*b, base_map);
  const int p = target.ambient_dim();
  b->projectors.reserve(mesh.size());
  b->fiber_bases.reserve(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) {
    const Vec y = base_map.row(i).transpose();
    if (!target.contains(y)) {
      throw Error(ErrorCode::not_on_manifold,
                  "base map leaves the target at node " + std::to_string(i));
    }
    b->projectors.push_back(target.tangent_projector(y));
    Eigen::HouseholderQR<Mat> qr(target.unit_normal(y));
    const Mat Q = qr.householderQ() * Mat::Identity(p, p);
    b->fiber_bases.push_back(Q.rightCols(p - 1));
  }
  return b;
}

BundleSection::BundleSection(BundlePtr bundle, NodeField values)
    : bundle_(std::move(bundle)), values_(std::move(values)) {
  check_shape(*bundle_, values_);
  for (int i = 0; i < bundle_->size(); ++i) {
    const Vec v = values_.row(i).transpose();
    if ((bundle_->projectors[i] * v - v).norm() > kFiberTol * std::max(1.0, v.norm())) {
      throw Error(ErrorCode::not_tangent,
                  "section value leaves the fiber at node " + std::to_string(i));
    }
  }
}

BundleSection::BundleSection(BundlePtr bundle, NodeField values, Trusted)
    : bundle_(std::move(bundle)), values_(std::move(values)) {}

BundleSection BundleSection::zero(const BundlePtr& bundle) {
  return BundleSection(bundle, NodeField::Zero(bundle->size(), bundle->ambient_dim()), Trusted{});
}

BundleSection BundleSection::operator+(const BundleSection& other) const {
  if (other.bundle_ != bundle_) throw Error(ErrorCode::bundle_mismatch, "sections live on different bundles");
  return BundleSection(bundle_, values_ + other.values_, Trusted{});
}

BundleSection BundleSection::operator-(const BundleSection& other) const {
  if (other.bundle_ != bundle_) throw Error(ErrorCode::bundle_mismatch, "sections live on different bundles");
  return BundleSection(bundle_, values_ - other.values_, Trusted{});
}

BundleSection BundleSection::operator*(double a) const {
  return BundleSection(bundle_, a * values_, Trusted{});
}

BundleSection project_section(const BundlePtr& bundle, const NodeField& raw) {
  return BundleSection(bundle, bundle->project(raw), BundleSection::Trusted{});
}

Mat BundleGradient::tensor(int i) const {
  return frames.row(i).transpose() * derivatives.row(i);
}

BundleGradient bundle_gradient(const BundleSection& section, int frame_sign) {
  const auto& b = *section.bundle();
  const double s = frame_sign < 0 ? -1.0 : 1.0;
  BundleGradient g;
  g.frames.resize(b.size(), 2);
  g.derivatives = b.project(s * b.mesh.differentiate(section.values()));
  for (int i = 0; i < b.size(); ++i) g.frames.row(i) = s * b.mesh.tangent_frame(i).transpose();
  return g;
}

BundleGradient bundle_gradient_components(const BundleSection& section) {
  const auto& b = *section.bundle();
  const int p = b.ambient_dim();
  BundleGradient g;
  g.frames.resize(b.size(), 2);
  g.derivatives = NodeField::Zero(b.size(), p);
  for (int j = 0; j < p; ++j) {
    const Vec dj = b.mesh.differentiate(Vec(section.values().col(j)));
    for (int i = 0; i < b.size(); ++i) g.derivatives.row(i) += dj(i) * b.projectors[i].col(j).transpose();
  }
  for (int i = 0; i < b.size(); ++i) g.frames.row(i) = b.mesh.tangent_frame(i).transpose();
  return g;
}

double l2_inner(const BundleSection& a, const BundleSection& b) {
  if (a.bundle() != b.bundle()) {
    throw Error(ErrorCode::bundle_mismatch, "inner product of sections on different bundles");
  }
  const Vec pointwise = a.values().cwiseProduct(b.values()).rowwise().sum();
  return a.bundle()->mesh.integrate(pointwise);
}

SobolevNorms sobolev_norms(const DomainMesh& mesh, const NodeField& values) {
  auto sq = [&](const NodeField& f) { return mesh.integrate(Vec(f.rowwise().squaredNorm())); };
  const double l2sq = sq(values);
  const double d1 = sq(mesh.differentiate(values));
  const double d2 = sq(mesh.laplace_beltrami(values));
  return {std::sqrt(l2sq), std::sqrt(l2sq + d1), std::sqrt(l2sq + d1 + d2)};
}

SobolevNorms sobolev_norms(const BundleSection& section) {
  return sobolev_norms(section.bundle()->mesh, section.values());
}

double c0_norm(const NodeField& values) {
  return values.rows() == 0 ? 0.0 : values.rowwise().norm().maxCoeff();
}

double c2_norm(const DomainMesh& mesh, const NodeField& values) {
  return c0_norm(values) + c0_norm(mesh.differentiate(values)) + c0_norm(mesh.laplace_beltrami(values));
}

BundleSection chart_encode(const BundlePtr& bundle, const NodeField& u) {
  const auto& b = *bundle;
  check_shape(b, u);
  const auto& target = b.target;
  NodeField out(b.size(), b.ambient_dim());
  for (int i = 0; i < b.size(); ++i) {
    const Vec phi = b.base_map.row(i).transpose();
    const Vec ui = u.row(i).transpose();
    const double cosine = target.unit_normal(phi).dot(target.unit_normal(ui));
    if (!(cosine > kChartCosine)) {
      throw Error(ErrorCode::chart_violation,
                  "map leaves the chart around the base map at node " + std::to_string(i));
    }
    if (target.kind() == TargetManifold::Kind::sphere) {
      out.row(i) = (ui / ui.dot(phi) - phi).transpose();
      continue;
    }
    // Gauss-Newton on fiber coordinates, starting from the projected chord.
    const Mat& B = b.fiber_bases[i];
    Vec c = B.transpose() * (ui - phi);
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
      const Vec x = phi + B * c;
      const Vec r = target.project_nearest(x) - ui;
      if (r.norm() < 1e-12) {
        converged = true;
        break;
      }
      const Mat J = target.projection_jacobian(x) * B;
      c -= J.colPivHouseholderQr().solve(r);
    }
    if (!converged) {
      throw Error(ErrorCode::not_converged, "chart inversion failed at node " + std::to_string(i));
    }
    out.row(i) = (B * c).transpose();
  }
  return project_section(bundle, out);
}

NodeField chart_decode(const BundleSection& section) {
  const auto& b = *section.bundle();
  NodeField out(b.size(), b.ambient_dim());
  for (int i = 0; i < b.size(); ++i) {
    const Vec v = section.values().row(i).transpose();
    if (!(v.norm() < b.target.tube_radius())) {
      throw Error(ErrorCode::outside_tube,
                  "section exceeds the tube radius at node " + std::to_string(i));
    }
    out.row(i) = b.target.project_nearest(b.base_map.row(i).transpose() + v).transpose();
  }
  return out;
}

BundleSection smooth_random_section(const BundlePtr& bundle, Rng& rng, int modes, double c0_size) {
  const auto& b = *bundle;
  const int p = b.ambient_dim();
  NodeField raw = NodeField::Zero(b.size(), p);
  for (int k = 0; k <= modes; ++k) {
    const double decay = 1.0 / (1.0 + k * k);
    for (int j = 0; j < p; ++j) {
      const double a = rng.normal() * decay;
      const double c = rng.normal() * decay;
      for (int i = 0; i < b.size(); ++i) {
        const double t = b.mesh.angles()(i);
        raw(i, j) += a * std::cos(k * t) + c * std::sin(k * t);
      }
    }
  }
  NodeField v = b.project(raw);
  const double m = c0_norm(v);
  if (m > 0.0) v *= c0_size / m;
  return project_section(bundle, v);
}

}  // namespace lojvar
