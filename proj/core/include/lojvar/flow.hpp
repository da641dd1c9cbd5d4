#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lojvar/lojasiewicz.hpp"
#include "lojvar/polynomial.hpp"
#include "lojvar/variational.hpp"

namespace lojvar {

enum class Integrator { projected_euler, projected_rk4 };

std::string_view to_string(Integrator integrator);

struct FlowConfig {
  /// dt = dt_factor · h², must lie in (0, 0.5].
  double dt_factor = 0.2;
  double t_max = 50.0;
  double stop_grad_tol = 1e-8;
  Integrator integrator = Integrator::projected_rk4;
  std::uint64_t seed = 0;
};

struct FlowTrace {
  std::vector<double> times;
  std::vector<double> energies;
  std::vector<double> grad_norms;
  /// L² distance to the terminal state, filled by replaying the run.
  std::vector<double> dist_to_limit;
  FlowConfig config;
  /// Terminal map (map flows) or point (finite-dimensional flows, one row).
  NodeField final_state;
  /// Trajectory of finite-dimensional flows; empty for map flows.
  std::vector<Vec> positions;
  bool converged = false;
};

/// One step of u̇ = M_E(u); every stage is projected back onto the target.
/// Throws stability_violation when dt > h²/2.
MapState flow_step(const MapState& map, double dt, Integrator integrator = Integrator::projected_rk4);

/// Integrates until t_max or ‖M_E‖ < stop_grad_tol, recording every step.
FlowTrace run_flow(const MapState& initial, const FlowConfig& config);

struct ModelFit {
  double intercept = 0.0;
  /// b in a - b·t, or p in a - p·log t.
  double rate = 0.0;
  double r_squared = 0.0;
  double sse = 0.0;
};

struct RateReport {
  double e_inf = 0.0;
  int records_used = 0;
  ModelFit exponential;
  ModelFit power_law;
  std::string preferred;
};

/// Fits log(E - E∞) on the tail half of the trace with the last 10% removed.
/// E∞ defaults to the final recorded value.
RateReport fit_convergence_rate(const FlowTrace& trace, std::optional<double> e_inf = {});

/// RK4 on ẋ = -∇f. Throws divergence when |x| > 1e6.
FlowTrace finite_dim_flow(const Polynomial& f, const Vec& x0, double dt = 1e-3, double t_max = 10.0);

/// Pairs (|E(t) - E∞|, ‖M_E(t)‖) from a flow trace.
SampleCloud cloud_from_trace(const FlowTrace& trace, std::optional<double> e_inf = {});

}  // namespace lojvar
