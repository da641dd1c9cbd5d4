#include "harness/initial_map.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "harness/report_io.hpp"
#include "lojvar/error.hpp"
#include "lojvar/rng.hpp"

namespace lojvar::harness {

DomainMesh make_mesh(const RunConfig& config) {
  return DomainMesh::circle(config.domain.n_nodes, config.domain.diff_order);
}

TargetManifold make_target(const RunConfig& config) {
  if (config.target.kind == "sphere") {
    return TargetManifold::sphere(config.target.ambient_dim, config.target.tube_radius);
  }
  const Vec axes = Eigen::Map<const Vec>(config.target.semi_axes.data(),
                                         static_cast<Eigen::Index>(config.target.semi_axes.size()));
  return TargetManifold::ellipsoid(axes, config.target.tube_radius);
}

NodeField make_base_map(const RunConfig& config, const DomainMesh& mesh, const TargetManifold& target) {
  if (config.base_map.file.empty()) return equatorial_geodesic(mesh, target, config.base_map.degree);
  const NodeField values = read_node_csv(config.base_map.file);
  if (values.rows() != mesh.size() || values.cols() != target.ambient_dim()) {
    throw Error(ErrorCode::config_error, "base_map.file: expected " + std::to_string(mesh.size()) + " rows of " +
                                             std::to_string(target.ambient_dim()) + " coordinates");
  }
  return values;
}

MapState make_initial_map(const RunConfig& config) {
  const DomainMesh mesh = make_mesh(config);
  const TargetManifold target = make_target(config);
  const NodeField base = make_base_map(config, mesh, target);
  const auto& pc = config.perturbation;
  if (!(pc.amplitude < target.tube_radius())) {
    throw Error(ErrorCode::config_error, "perturbation.amplitude must be below the tube radius");
  }
  const BundlePtr bundle = build_pullback_bundle(mesh, target, base);
  if (pc.amplitude == 0.0) return MapState(mesh, target, base);

  Rng rng(pc.seed);
  const int p = target.ambient_dim();
  NodeField raw = NodeField::Zero(mesh.size(), p);
  for (int k = 0; k < pc.mode_count; ++k) {
    const int m = 2 * k + 1;
    const double r = rng.uniform();
    const double psi = 2.0 * std::numbers::pi * rng.uniform();
    const double a = r * std::cos(psi);
    const double b = r * std::sin(psi);
    const Vec w = rng.unit_vector(p);
    for (int i = 0; i < mesh.size(); ++i) {
      const double t = mesh.angles()(i);
      raw.row(i) += pc.amplitude * (a * std::cos(m * t) + b * std::sin(m * t)) * w.transpose();
    }
  }
  const BundleSection section = project_section(bundle, raw);
  return MapState(mesh, target, chart_decode(section));
}

}  // namespace lojvar::harness
