#pragma once

#include "harness/config.hpp"
#include "lojvar/bundle.hpp"
#include "lojvar/variational.hpp"

namespace lojvar::harness {

DomainMesh make_mesh(const RunConfig& config);
TargetManifold make_target(const RunConfig& config);

/// Base map φ₀: read from base_map.file if given, else the degree-k
/// equatorial geodesic.
NodeField make_base_map(const RunConfig& config, const DomainMesh& mesh, const TargetManifold& target);

/// φ₀ perturbed by amplitude · Σ_m (a_m cos mθ + b_m sin mθ) w_m over odd
/// harmonics m = 1, 3, ..., 2·mode_count - 1, with (a_m, b_m) in the unit disk
/// and w_m a random unit vector, projected onto the fibers and decoded
/// through the chart. Deterministic per seed.
MapState make_initial_map(const RunConfig& config);

}  // namespace lojvar::harness
