#include "lojvar/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lojvar/error.hpp"

namespace lojvar {

std::string_view to_string(Integrator integrator) {
  return integrator == Integrator::projected_euler ? "projected_euler" : "projected_rk4";
}

namespace {

NodeField project_rows(const TargetManifold& target, const NodeField& x) {
  NodeField out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.row(i) = target.project_nearest(x.row(i).transpose()).transpose();
  return out;
}

NodeField tension_at(const MapState& like, const NodeField& values) {
  return tension_field(MapState(like.mesh, like.target, values));
}

}  // namespace

MapState flow_step(const MapState& map, double dt, Integrator integrator) {
  const double h = map.mesh.spacing();
  if (!(dt > 0.0) || dt > 0.5 * h * h) {
    std::ostringstream msg;
    msg << "time step " << dt << " violates dt <= h^2/2 = " << 0.5 * h * h;
    throw Error(ErrorCode::stability_violation, msg.str());
  }
  const NodeField& u = map.values;
  const auto& target = map.target;
  if (integrator == Integrator::projected_euler) {
    return MapState(map.mesh, target, project_rows(target, u + dt * tension_field(map)));
  }
  const NodeField k1 = tension_field(map);
  const NodeField k2 = tension_at(map, project_rows(target, u + 0.5 * dt * k1));
  const NodeField k3 = tension_at(map, project_rows(target, u + 0.5 * dt * k2));
  const NodeField k4 = tension_at(map, project_rows(target, u + dt * k3));
  return MapState(map.mesh, target, project_rows(target, u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)));
}

FlowTrace run_flow(const MapState& initial, const FlowConfig& config) {
  if (!(config.dt_factor > 0.0 && config.dt_factor <= 0.5)) {
    throw Error(ErrorCode::stability_violation, "dt_factor must lie in (0, 0.5]");
  }
  if (!(config.t_max > 0.0)) throw Error(ErrorCode::invalid_argument, "t_max must be positive");
  const double h = initial.mesh.spacing();
  const double dt = config.dt_factor * h * h;

  FlowTrace trace;
  trace.config = config;
  auto record = [&](double t, const MapState& m) {
    trace.times.push_back(t);
    trace.energies.push_back(energy(m));
    trace.grad_norms.push_back(l2_norm(m.mesh, tension_field(m)));
  };

  MapState u = initial;
  double t = 0.0;
  record(t, u);
  long steps = 0;
  while (trace.grad_norms.back() >= config.stop_grad_tol && t + 0.5 * dt < config.t_max) {
    u = flow_step(u, dt, config.integrator);
    ++steps;
    t = steps * dt;
    record(t, u);
  }
  trace.converged = trace.grad_norms.back() < config.stop_grad_tol;
  trace.final_state = u.values;

  // Replay the deterministic run to measure distances to the terminal state.
  MapState v = initial;
  trace.dist_to_limit.push_back(l2_norm(v.mesh, NodeField(v.values - trace.final_state)));
  for (long k = 0; k < steps; ++k) {
    v = flow_step(v, dt, config.integrator);
    trace.dist_to_limit.push_back(l2_norm(v.mesh, NodeField(v.values - trace.final_state)));
  }
  return trace;
}

RateReport fit_convergence_rate(const FlowTrace& trace, std::optional<double> e_inf) {
  const std::size_t n = trace.energies.size();
  if (n == 0 || trace.times.size() != n) throw Error(ErrorCode::insufficient_data, "empty trace");
  RateReport rep;
  rep.e_inf = e_inf.value_or(trace.energies.back());

  const std::size_t keep = (n * 9) / 10;
  std::vector<double> all_gaps;
  for (std::size_t i = 0; i < keep; ++i) {
    const double g = trace.energies[i] - rep.e_inf;
    if (g > kFitFloor) all_gaps.push_back(g);
  }
  if (all_gaps.empty()) throw Error(ErrorCode::insufficient_data, "trace shows no energy decay");
  const auto [mn, mx] = std::minmax_element(all_gaps.begin(), all_gaps.end());
  if (std::log10(*mx / *mn) < 2.0) {
    throw Error(ErrorCode::insufficient_data, "energy gap spans less than two decades");
  }

  std::vector<double> t;
  std::vector<double> lt;
  std::vector<double> lg;
  for (std::size_t i = keep / 2; i < keep; ++i) {
    const double g = trace.energies[i] - rep.e_inf;
    if (g <= kFitFloor || trace.times[i] <= 0.0) continue;
    t.push_back(trace.times[i]);
    lt.push_back(std::log(trace.times[i]));
    lg.push_back(std::log(g));
  }
  rep.records_used = static_cast<int>(t.size());
  if (rep.records_used < 20) {
    throw Error(ErrorCode::insufficient_data, "fewer than 20 usable tail records");
  }

  auto fit = [&](const std::vector<double>& x) {
    const double m = static_cast<double>(x.size());
    double mx_ = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      mx_ += x[i];
      my += lg[i];
    }
    mx_ /= m;
    my /= m;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxx += (x[i] - mx_) * (x[i] - mx_);
      sxy += (x[i] - mx_) * (lg[i] - my);
      syy += (lg[i] - my) * (lg[i] - my);
    }
    ModelFit mf;
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    mf.intercept = my - slope * mx_;
    mf.rate = -slope;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = lg[i] - (mf.intercept + slope * x[i]);
      mf.sse += e * e;
    }
    mf.r_squared = syy > 0.0 ? std::max(0.0, 1.0 - mf.sse / syy) : 1.0;
    return mf;
  };
  rep.exponential = fit(t);
  rep.power_law = fit(lt);
  rep.preferred = rep.exponential.sse <= rep.power_law.sse ? "exponential" : "power_law";
  return rep;
}

FlowTrace finite_dim_flow(const Polynomial& f, const Vec& x0, double dt, double t_max) {
  if (x0.size() != f.dim()) throw Error(ErrorCode::length_mismatch, "initial point dimension mismatch");
  if (!(dt > 0.0) || !(t_max > 0.0)) throw Error(ErrorCode::invalid_argument, "dt and t_max must be positive");
  FlowTrace trace;
  trace.config.t_max = t_max;
  trace.config.stop_grad_tol = 0.0;
  Vec x = x0;
  auto record = [&](double t) {
    trace.times.push_back(t);
    trace.energies.push_back(f.value(x));
    trace.grad_norms.push_back(f.gradient(x).norm());
    trace.positions.push_back(x);
  };
  record(0.0);
  const long steps = std::lround(t_max / dt);
  for (long k = 1; k <= steps; ++k) {
    const Vec k1 = -f.gradient(x);
    const Vec k2 = -f.gradient(x + 0.5 * dt * k1);
    const Vec k3 = -f.gradient(x + 0.5 * dt * k2);
    const Vec k4 = -f.gradient(x + dt * k3);
    x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!(x.norm() <= 1e6)) throw Error(ErrorCode::divergence, "finite-dimensional flow diverged");
    record(k * dt);
  }
  trace.final_state = x.transpose();
  trace.converged = true;
  for (const Vec& p : trace.positions) trace.dist_to_limit.push_back((p - x).norm());
  return trace;
}

SampleCloud cloud_from_trace(const FlowTrace& trace, std::optional<double> e_inf) {
  const double einf = e_inf.value_or(trace.energies.empty() ? 0.0 : trace.energies.back());
  SampleCloud cloud;
  cloud.provenance = Provenance::flow_trajectory;
  for (std::size_t i = 0; i < trace.energies.size(); ++i) {
    cloud.pairs.push_back({std::abs(trace.energies[i] - einf), trace.grad_norms[i]});
  }
  return cloud;
}

}  // namespace lojvar
