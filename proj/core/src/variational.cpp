#include "lojvar/variational.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "lojvar/error.hpp"
#include "lojvar/rng.hpp"

namespace lojvar {

MapState::MapState(DomainMesh mesh_, TargetManifold target_, NodeField values_)
    : mesh(std::move(mesh_)), target(std::move(target_)), values(std::move(values_)) {
  if (values.rows() != mesh.size() || values.cols() != target.ambient_dim()) {
    throw Error(ErrorCode::length_mismatch, "map values do not match mesh and target");
  }
  for (int i = 0; i < mesh.size(); ++i) {
    if (!target.contains(values.row(i).transpose())) {
      throw Error(ErrorCode::not_on_manifold, "map leaves the target at node " + std::to_string(i));
    }
  }
}

NodeField great_circle(const DomainMesh& mesh, int ambient_dim, int degree) {
  if (ambient_dim < 2) throw Error(ErrorCode::invalid_argument, "great circle needs p >= 2");
  NodeField u = NodeField::Zero(mesh.size(), ambient_dim);
  for (int i = 0; i < mesh.size(); ++i) {
    const double t = degree * mesh.angles()(i);
    u(i, 0) = std::cos(t);
    u(i, 1) = std::sin(t);
  }
  return u;
}

NodeField equatorial_geodesic(const DomainMesh& mesh, const TargetManifold& target, int degree) {
  const int p = target.ambient_dim();
  if (target.kind() == TargetManifold::Kind::sphere) return great_circle(mesh, p, degree);
  const double a = target.semi_axes()(0);
  const double b = target.semi_axes()(1);
  auto speed = [&](double s) { return std::hypot(a * std::sin(s), b * std::cos(s)); };

  // Arclength by 8-point Gauss-Legendre on a fine uniform partition.
  static constexpr double gx[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                   0.9602898564975363};
  static constexpr double gw[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                   0.1012285362903763};
  auto segment = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double acc = 0.0;
    for (int k = 0; k < 4; ++k) acc += gw[k] * (speed(mid + half * gx[k]) + speed(mid - half * gx[k]));
    return half * acc;
  };
  const int K = 2048;
  const double two_pi = 2.0 * 3.14159265358979323846;
  const double ds = two_pi / K;
  std::vector<double> cum(K + 1, 0.0);
  for (int k = 0; k < K; ++k) cum[k + 1] = cum[k] + segment(k * ds, (k + 1) * ds);
  const double total = cum[K];
  auto arclength = [&](double s) {
    const int k = std::clamp(static_cast<int>(s / ds), 0, K - 1);
    return cum[k] + segment(k * ds, s);
  };

  NodeField u = NodeField::Zero(mesh.size(), p);
  for (int i = 0; i < mesh.size(); ++i) {
    const double frac = std::fmod(degree * mesh.angles()(i) / two_pi, 1.0);
    const double want = (frac < 0.0 ? frac + 1.0 : frac) * total;
    double s = want / total * two_pi;
    for (int it = 0; it < 50; ++it) {
      const double step = (arclength(s) - want) / speed(s);
      s -= step;
      if (std::abs(step) < 1e-15) break;
    }
    u(i, 0) = a * std::cos(s);
    u(i, 1) = b * std::sin(s);
  }
  return u;
}

double l2_inner(const DomainMesh& mesh, const NodeField& a, const NodeField& b) {
  return mesh.integrate(Vec(a.cwiseProduct(b).rowwise().sum()));
}

double l2_norm(const DomainMesh& mesh, const NodeField& f) {
  return std::sqrt(std::max(0.0, l2_inner(mesh, f, f)));
}

double energy(const MapState& map) {
  const NodeField du = map.mesh.differentiate(map.values);
  return map.mesh.integrate(Vec(du.rowwise().squaredNorm()));
}

double energy_compact(const MapState& map) {
  const NodeField du = map.mesh.forward_difference(map.values);
  return map.mesh.integrate(Vec(du.rowwise().squaredNorm()));
}

NodeField tension_field(const MapState& map) {
  const NodeField ddu = map.mesh.differentiate(map.mesh.differentiate(map.values));
  NodeField out(ddu.rows(), ddu.cols());
  for (int i = 0; i < map.mesh.size(); ++i) {
    const Mat P = map.target.tangent_projector(map.values.row(i).transpose());
    out.row(i) = (P * ddu.row(i).transpose()).transpose();
  }
  return out;
}

namespace {

NodeField project_map(const TargetManifold& target, const NodeField& x) {
  NodeField out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out.row(i) = target.project_nearest(x.row(i).transpose()).transpose();
  }
  return out;
}

}  // namespace

VariationCheck first_variation_check(const MapState& map, const NodeField& direction, double step) {
  if (direction.rows() != map.values.rows() || direction.cols() != map.values.cols()) {
    throw Error(ErrorCode::length_mismatch, "variation direction does not match the map");
  }
  const MapState plus(map.mesh, map.target, project_map(map.target, map.values + step * direction));
  const MapState minus(map.mesh, map.target, project_map(map.target, map.values - step * direction));
  VariationCheck r;
  r.lhs = (energy(plus) - energy(minus)) / (2.0 * step);
  r.rhs = -2.0 * l2_inner(map.mesh, tension_field(map), direction);
  const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
  r.mismatch = scale < 1e-14 ? 0.0 : std::abs(r.lhs - r.rhs) / scale;
  return r;
}

void validate(const FunctionalSpec& spec, std::uint64_t seed) {
  if (!spec.integrand || !spec.partial_z || !spec.partial_eta) {
    throw Error(ErrorCode::validation_failed, "functional '" + spec.label + "' is missing a callable");
  }
  Rng rng(seed);
  const int p = spec.ambient_dim;
  const double eps = 1e-5;
  const double two_pi = 2.0 * 3.14159265358979323846;
  for (int k = 0; k < 100; ++k) {
    EdgePoint at;
    at.edge = spec.edge_count > 0 ? static_cast<int>(rng.uniform() * spec.edge_count) : 0;
    at.angle = spec.edge_count > 0 ? (at.edge + 0.5) * two_pi / spec.edge_count : rng.uniform(0.0, two_pi);
    const Vec z = spec.z_probe_radius * rng.uniform() * rng.unit_vector(p);
    const Vec eta = spec.eta_probe_radius * rng.uniform() * rng.unit_vector(p);
    const Vec fz = spec.partial_z(at, z, eta);
    const Vec fe = spec.partial_eta(at, z, eta);
    for (int j = 0; j < p; ++j) {
      const Vec ej = eps * Vec::Unit(p, j);
      const double dz = (spec.integrand(at, z + ej, eta) - spec.integrand(at, z - ej, eta)) / (2.0 * eps);
      const double de = (spec.integrand(at, z, eta + ej) - spec.integrand(at, z, eta - ej)) / (2.0 * eps);
      if (std::abs(dz - fz(j)) > 1e-6 * std::max(1.0, std::abs(fz(j))) ||
          std::abs(de - fe(j)) > 1e-6 * std::max(1.0, std::abs(fe(j)))) {
        throw Error(ErrorCode::validation_failed,
                    "partials of functional '" + spec.label + "' disagree with finite differences");
      }
    }
  }
}

namespace {

void check_validity(const FunctionalSpec& spec, const BundleSection& section) {
  if (section.bundle()->ambient_dim() != spec.ambient_dim) {
    throw Error(ErrorCode::bundle_mismatch, "functional and section have different ambient dimension");
  }
  if (spec.validity_radius > 0.0 && !(c0_norm(section.values()) < spec.validity_radius)) {
    throw Error(ErrorCode::validity_violation,
                "section leaves the validity radius of functional '" + spec.label + "'");
  }
}

}  // namespace

double functional_value(const FunctionalSpec& spec, const BundleSection& section) {
  check_validity(spec, section);
  const auto& mesh = section.bundle()->mesh;
  const NodeField z = mesh.edge_average(section.values());
  const NodeField eta = mesh.forward_difference(section.values());
  double total = 0.0;
  for (int e = 0; e < mesh.size(); ++e) {
    total += spec.integrand({e, mesh.edge_angle(e)}, z.row(e).transpose(), eta.row(e).transpose());
  }
  return mesh.spacing() * total;
}

namespace {

struct EdgePartials {
  Vec fz;
  Vec g;
};

EdgePartials edge_partials(const FunctionalSpec& spec, const DomainMesh& mesh, const NodeField& v, int e) {
  const int next = mesh.wrap(e + 1);
  const Vec z = 0.5 * (v.row(e) + v.row(next)).transpose();
  const Vec eta = (v.row(next) - v.row(e)).transpose() / mesh.spacing();
  const EdgePoint at{e, mesh.edge_angle(e)};
  return {spec.partial_z(at, z, eta), spec.partial_eta(at, z, eta)};
}

// Node i collects the two edges that touch it.
Vec assemble_node(const DomainMesh& mesh, const Mat& P, const EdgePartials& left,
                  const EdgePartials& right, int i) {
  // H·τ vanishes on the round circle; kept so the assembly matches the
  // general curved-domain formula.
  const double h_tau = mesh.mean_curvature(i).dot(mesh.tangent_frame(i));
  const Vec m = 0.5 * (right.fz + left.fz) - (right.g - left.g) / mesh.spacing() +
                h_tau * 0.5 * (right.g + left.g);
  return P * m;
}

}  // namespace

BundleSection general_euler_lagrange(const FunctionalSpec& spec, const BundleSection& section) {
  check_validity(spec, section);
  const auto& b = *section.bundle();
  const auto& mesh = b.mesh;
  const int n = mesh.size();
  std::vector<EdgePartials> edges;
  edges.reserve(n);
  for (int e = 0; e < n; ++e) edges.push_back(edge_partials(spec, mesh, section.values(), e));
  NodeField m(n, b.ambient_dim());
  for (int i = 0; i < n; ++i) {
    m.row(i) = assemble_node(mesh, b.projectors[i], edges[mesh.wrap(i - 1)], edges[i], i).transpose();
  }
  return project_section(section.bundle(), m);
}

FunctionalSpec energy_functional_on_bundle(const BundlePtr& bundle) {
  const auto& b = *bundle;
  const int n = b.size();
  const double h = b.mesh.spacing();
  std::vector<double> base(n);
  for (int e = 0; e < n; ++e) {
    base[e] = ((b.base_map.row(b.mesh.wrap(e + 1)) - b.base_map.row(e)) / h).squaredNorm();
  }

  // The bundle outlives the spec through the captured pointer.
  auto ends = [bundle, h](const EdgePoint& at, const Vec& z, const Vec& eta) {
    const auto& bb = *bundle;
    const Vec xp = bb.base_map.row(bb.mesh.wrap(at.edge + 1)).transpose() + z + 0.5 * h * eta;
    const Vec xm = bb.base_map.row(at.edge).transpose() + z - 0.5 * h * eta;
    return std::pair<Vec, Vec>{xp, xm};
  };

  FunctionalSpec spec;
  spec.label = "energy";
  spec.ambient_dim = b.ambient_dim();
  spec.edge_count = n;
  spec.validity_radius = b.target.tube_radius();
  spec.z_probe_radius = 0.3 * b.target.tube_radius();
  spec.eta_probe_radius = std::min(1.0, 0.3 * b.target.tube_radius() / h);

  spec.integrand = [bundle, h, base, ends](const EdgePoint& at, const Vec& z, const Vec& eta) {
    const auto [xp, xm] = ends(at, z, eta);
    const auto& t = bundle->target;
    const Vec d = (t.project_nearest(xp) - t.project_nearest(xm)) / h;
    return d.squaredNorm() - base[at.edge];
  };
  spec.partial_z = [bundle, h, ends](const EdgePoint& at, const Vec& z, const Vec& eta) {
    const auto [xp, xm] = ends(at, z, eta);
    const auto& t = bundle->target;
    const Vec d = (t.project_nearest(xp) - t.project_nearest(xm)) / h;
    return Vec((2.0 / h) * (t.projection_jacobian(xp).transpose() * d -
                            t.projection_jacobian(xm).transpose() * d));
  };
  spec.partial_eta = [bundle, h, ends](const EdgePoint& at, const Vec& z, const Vec& eta) {
    const auto [xp, xm] = ends(at, z, eta);
    const auto& t = bundle->target;
    const Vec d = (t.project_nearest(xp) - t.project_nearest(xm)) / h;
    return Vec(t.projection_jacobian(xp).transpose() * d + t.projection_jacobian(xm).transpose() * d);
  };

  validate(spec);

  // F(v) must equal E(Π(φ₀ + v)) - E(φ₀) for the staggered energy. It agrees
  // with the central-stencil energy only up to O(h²) unless φ₀ is critical
  // for both.
  const MapState phi0(b.mesh, b.target, b.base_map);
  const double e0 = energy_compact(phi0);
  Rng rng(0xc0ffee);
  for (int k = 0; k < 10; ++k) {
    const BundleSection v = smooth_random_section(bundle, rng, 4, 1e-3);
    const double lhs = functional_value(spec, v);
    const double rhs = energy_compact(MapState(b.mesh, b.target, chart_decode(v))) - e0;
    if (std::abs(lhs - rhs) > 1e-8) {
      std::ostringstream msg;
      msg << "energy functional disagrees with the map energy: " << lhs << " vs " << rhs;
      throw Error(ErrorCode::validation_failed, msg.str());
    }
  }
  return spec;
}

FunctionalSpec with_quartic_penalty(FunctionalSpec spec, double mu) {
  auto f = spec.integrand;
  auto fz = spec.partial_z;
  spec.integrand = [f, mu](const EdgePoint& at, const Vec& z, const Vec& eta) {
    const double r2 = z.squaredNorm();
    return f(at, z, eta) + mu * r2 * r2;
  };
  spec.partial_z = [fz, mu](const EdgePoint& at, const Vec& z, const Vec& eta) {
    return Vec(fz(at, z, eta) + 4.0 * mu * z.squaredNorm() * z);
  };
  spec.label += "+quartic";
  return spec;
}

FunctionalSpec dirichlet_model_functional(int ambient_dim, int edge_count, double validity_radius) {
  FunctionalSpec spec;
  spec.label = "dirichlet";
  spec.ambient_dim = ambient_dim;
  spec.edge_count = edge_count;
  spec.validity_radius = validity_radius;
  spec.integrand = [](const EdgePoint&, const Vec&, const Vec& eta) { return eta.squaredNorm(); };
  spec.partial_z = [](const EdgePoint&, const Vec& z, const Vec&) { return Vec(Vec::Zero(z.size())); };
  spec.partial_eta = [](const EdgePoint&, const Vec&, const Vec& eta) { return Vec(2.0 * eta); };
  return spec;
}

Mat linearization_matrix(const FunctionalSpec& spec, const BundleSection& at, double eps) {
  check_validity(spec, at);
  const auto& b = *at.bundle();
  const auto& mesh = b.mesh;
  const int n = b.size();
  const int p = b.ambient_dim();
  const NodeField& v = at.values();
  std::vector<EdgePartials> base;
  base.reserve(n);
  for (int e = 0; e < n; ++e) base.push_back(edge_partials(spec, mesh, v, e));

  // Moving node i only changes edges i-1 and i, hence M at nodes i-1, i, i+1.
  // Every other entry of the central difference is exactly zero.
  Mat L = Mat::Zero(n * p, n * p);
  NodeField work = v;
  for (int i = 0; i < n; ++i) {
    const int im1 = mesh.wrap(i - 1);
    const int im2 = mesh.wrap(i - 2);
    const int ip1 = mesh.wrap(i + 1);
    for (int a = 0; a < p; ++a) {
      const Vec d = b.projectors[i].col(a);
      Vec col[2][3];
      for (int s = 0; s < 2; ++s) {
        work.row(i) = v.row(i) + (s == 0 ? eps : -eps) * d.transpose();
        if (spec.validity_radius > 0.0 && !(work.row(i).norm() < spec.validity_radius)) {
          throw Error(ErrorCode::validity_violation, "linearization probe leaves the validity radius");
        }
        const EdgePartials left = edge_partials(spec, mesh, work, im1);
        const EdgePartials right = edge_partials(spec, mesh, work, i);
        col[s][0] = assemble_node(mesh, b.projectors[im1], base[im2], left, im1);
        col[s][1] = assemble_node(mesh, b.projectors[i], left, right, i);
        col[s][2] = assemble_node(mesh, b.projectors[ip1], right, base[ip1], ip1);
      }
      work.row(i) = v.row(i);
      const int c = i * p + a;
      L.block(im1 * p, c, p, 1) = (col[0][0] - col[1][0]) / (2.0 * eps);
      L.block(i * p, c, p, 1) = (col[0][1] - col[1][1]) / (2.0 * eps);
      L.block(ip1 * p, c, p, 1) = (col[0][2] - col[1][2]) / (2.0 * eps);
    }
  }
  return L;
}

RemainderCheck quadratic_remainder_check(const FunctionalSpec& spec, const Mat& L0,
                                         const BundleSection& u1, const BundleSection& u2) {
  const auto& bundle = u1.bundle();
  const auto& mesh = bundle->mesh;
  const BundleSection diff = u1 - u2;
  if (L0.rows() != diff.values().size() || L0.cols() != diff.values().size()) {
    throw Error(ErrorCode::length_mismatch, "linearization has the wrong size");
  }
  const Vec lin = L0 * flatten(diff.values());
  const NodeField r = general_euler_lagrange(spec, u1).values() - general_euler_lagrange(spec, u2).values() -
                      unflatten(lin, diff.values().rows(), diff.values().cols());
  RemainderCheck out;
  out.remainder = l2_norm(mesh, r);
  out.product = (c2_norm(mesh, u1.values()) + c2_norm(mesh, u2.values())) *
                sobolev_norms(mesh, diff.values()).w22;
  return out;
}

bool ellipticity_check(const FunctionalSpec& spec, const std::vector<EllipticityProbe>& probes) {
  const double s = 1e-5;
  for (const auto& pr : probes) {
    const Eigen::Vector2d tau(-std::sin(pr.at.angle), std::cos(pr.at.angle));
    const double xt = pr.xi.dot(tau);
    if (xt == 0.0 || pr.lambda.norm() == 0.0) continue;
    const Vec gp = spec.partial_eta(pr.at, pr.z, pr.eta + s * pr.lambda);
    const Vec gm = spec.partial_eta(pr.at, pr.z, pr.eta - s * pr.lambda);
    const double form = pr.lambda.dot((gp - gm) / (2.0 * s)) * xt * xt;
    if (!(form > 0.0)) return false;
  }
  return true;
}

}  // namespace lojvar
