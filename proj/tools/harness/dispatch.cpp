#include "harness/dispatch.hpp"

#include <algorithm>
#include <cmath>

#include "harness/initial_map.hpp"
#include "harness/report_io.hpp"
#include "lojvar/error.hpp"
#include "lojvar/flow.hpp"
#include "lojvar/lojasiewicz.hpp"
#include "lojvar/reduction.hpp"

namespace lojvar::harness {

namespace fs = std::filesystem;

namespace {

ojson fit_json(const ExponentFit& f) {
  return {{"theta", f.theta},
          {"constant", f.constant},
          {"r_squared", f.r_squared},
          {"sample_count", f.sample_count},
          {"noise_floor_hits", f.noise_floor_hits}};
}

ojson error_json(const std::exception& e) {
  const auto* le = dynamic_cast<const Error*>(&e);
  return {{"error", le ? std::string(to_string(le->code())) : std::string("internal_error")},
          {"message", e.what()}};
}

template <class F>
ojson guarded(F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return error_json(e);
  }
}

ojson model_json(const ModelFit& m) {
  return {{"intercept", m.intercept}, {"rate", m.rate}, {"r_squared", m.r_squared}, {"sse", m.sse}};
}

ojson rate_json(const RateReport& r) {
  return {{"e_inf", r.e_inf},
          {"records_used", r.records_used},
          {"exponential", model_json(r.exponential)},
          {"power_law", model_json(r.power_law)},
          {"preferred", r.preferred}};
}

std::string trace_csv(const FlowTrace& trace, int stride) {
  std::string s = "t,energy,grad_norm,dist_to_limit\n";
  const std::size_t n = trace.times.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i % static_cast<std::size_t>(stride) != 0 && i + 1 != n) continue;
    s += format_double(trace.times[i]) + ',' + format_double(trace.energies[i]) + ',' +
         format_double(trace.grad_norms[i]) + ',' + format_double(trace.dist_to_limit[i]) + '\n';
  }
  return s;
}

BundlePtr base_bundle(const RunConfig& config) {
  const DomainMesh mesh = make_mesh(config);
  const TargetManifold target = make_target(config);
  return build_pullback_bundle(mesh, target, make_base_map(config, mesh, target));
}

FunctionalSpec configured_functional(const RunConfig& config, const BundlePtr& bundle) {
  FunctionalSpec spec = energy_functional_on_bundle(bundle);
  if (config.reduction.quartic_penalty > 0.0) spec = with_quartic_penalty(std::move(spec), config.reduction.quartic_penalty);
  return spec;
}

void run_energy_eval(const RunConfig& config, const fs::path& dir, std::ostream& out) {
  const MapState map = make_initial_map(config);
  ojson doc = report_header();
  doc["subcommand"] = "energy-eval";
  doc["n_nodes"] = map.mesh.size();
  doc["energy"] = energy(map);
  doc["energy_compact"] = energy_compact(map);
  doc["tension_norm"] = l2_norm(map.mesh, tension_field(map));
  write_json(dir / "energy.json", doc);
  out << doc.dump(2) << "\n";
}

void run_flow_run(const RunConfig& config, const fs::path& dir, std::ostream& out) {
  const MapState initial = make_initial_map(config);
  const FlowTrace trace = run_flow(initial, config.flow);
  write_text(dir / "trace.csv", trace_csv(trace, config.output.stride));
  write_node_csv(dir / "final_map.csv", trace.final_state);

  ojson doc = report_header();
  doc["subcommand"] = "flow-run";
  doc["converged"] = trace.converged;
  doc["steps"] = trace.times.size() - 1;
  doc["dt"] = config.flow.dt_factor * std::pow(initial.mesh.spacing(), 2);
  doc["final_time"] = trace.times.back();
  doc["initial_energy"] = trace.energies.front();
  doc["final_energy"] = trace.energies.back();
  doc["terminal_grad_norm"] = trace.grad_norms.back();
  doc["fit"] = guarded([&] { return rate_json(fit_convergence_rate(trace)); });
  write_json(dir / "rate_fit.json", doc);
  out << "flow-run: " << (trace.converged ? "converged" : "not converged") << " at t = " << trace.times.back()
      << ", |M_E| = " << trace.grad_norms.back() << "\n";
}

void run_loj_estimate(const RunConfig& config, const fs::path& dir, std::ostream& out) {
  const MapState initial = make_initial_map(config);
  const FlowTrace trace = run_flow(initial, config.flow);
  const SampleCloud flow_cloud = cloud_from_trace(trace);

  SampleCloud pert_cloud;
  pert_cloud.provenance = Provenance::random_perturbation;
  ojson pert_fit = guarded([&]() -> ojson {
    const BundlePtr bundle = base_bundle(config);
    const auto ws = ReductionWorkspace::build(bundle, configured_functional(config, bundle), reduction_settings(config));
    pert_cloud = perturbation_cloud(ws, config.lojasiewicz.amplitudes, config.lojasiewicz.samples_per_radius,
                                    config.perturbation.seed);
    return fit_json(estimate_gradient_exponent(pert_cloud));
  });

  std::string csv = "provenance,value_gap,gradient_norm\n";
  for (const SampleCloud* c : std::initializer_list<const SampleCloud*>{&flow_cloud, &pert_cloud}) {
    for (const auto& p : c->pairs) {
      csv += std::string(to_string(c->provenance)) + ',' + format_double(p.value_gap) + ',' +
             format_double(p.gradient_norm) + '\n';
    }
  }
  write_text(dir / "cloud.csv", csv);

  ojson doc = report_header();
  doc["subcommand"] = "loj-estimate";
  doc["flow_converged"] = trace.converged;
  doc["flow_trajectory"] = guarded([&] { return fit_json(estimate_gradient_exponent(flow_cloud)); });
  doc["random_perturbation"] = pert_fit;
  doc["inequality"] = guarded([&]() -> ojson {
    const InequalityReport r = verify_inequality(flow_cloud, config.lojasiewicz.theta_claim);
    return {{"theta_claim", r.theta_claim},     {"c_min", r.c_min},
            {"holdout_constant", r.holdout_constant}, {"holdout_pass_fraction", r.holdout_pass_fraction},
            {"trend_slope", r.trend_slope},     {"diverging", r.diverging},
            {"usable", r.usable},               {"excluded", r.excluded}};
  });
  write_json(dir / "exponent_fit.json", doc);
  if (doc["flow_trajectory"].contains("theta")) {
    out << "loj-estimate: theta(flow) = " << doc["flow_trajectory"]["theta"].get<double>() << "\n";
  } else {
    out << "loj-estimate: flow-trajectory fit failed\n";
  }
}

void run_reduce_run(const RunConfig& config, const fs::path& dir, std::ostream& out) {
  const BundlePtr bundle = base_bundle(config);
  const auto ws = ReductionWorkspace::build(bundle, configured_functional(config, bundle), reduction_settings(config));
  const KernelResult& k = ws.kernel();

  ojson doc = report_header();
  doc["subcommand"] = "reduce-run";
  doc["functional"] = ws.functional().label;
  doc["kernel_dimension"] = ws.kernel_dimension();
  doc["kept_eigenvalues"] = std::vector<double>(k.kept.data(), k.kept.data() + k.kept.size());
  std::vector<double> by_size(k.spectrum.data(), k.spectrum.data() + k.spectrum.size());
  std::sort(by_size.begin(), by_size.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  by_size.erase(by_size.begin(), by_size.begin() + std::min<std::ptrdiff_t>(ws.kernel_dimension(), static_cast<std::ptrdiff_t>(by_size.size())));
  by_size.resize(std::min<std::size_t>(by_size.size(), 6));
  doc["smallest_discarded_eigenvalues"] = by_size;
  doc["spectral_radius"] = k.spectral_radius;
  doc["gap_ratio"] = std::isfinite(k.gap_ratio) ? ojson(k.gap_ratio) : ojson(nullptr);

  const IntegrabilityReport ip = integrability_probe(ws, config.reduction.probe_radii, 8, 1e-4, config.perturbation.seed);
  ojson rows = ojson::array();
  for (const auto& r : ip.rows) {
    ojson row = {{"radius", r.radius}, {"max_abs_f", r.max_abs_f}, {"pass", r.pass}};
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(row);
  }
  doc["integrability"] = {{"tau", ip.tau}, {"integrable", ip.integrable}, {"rows", rows}};

  Rng rng(config.perturbation.seed);
  if (ws.kernel_dimension() > 0) {
    int determinate = 0;
    int pass = 0;
    ojson samples = ojson::array();
    for (int s = 0; s < config.reduction.sandwich_samples; ++s) {
      const double r = rng.uniform(0.005, 0.03);
      const Vec xi = r * rng.unit_vector(ws.kernel_dimension());
      samples.push_back(guarded([&]() -> ojson {
        const SandwichResult sr = ws.sandwich_check(xi);
        determinate += sr.determinate ? 1 : 0;
        pass += sr.pass ? 1 : 0;
        return {{"radius", r},
                {"determinate", sr.determinate},
                {"ratio", sr.determinate ? ojson(sr.ratio) : ojson(nullptr)},
                {"gradient_norm", sr.gradient_norm},
                {"residual_norm", sr.residual_norm}};
      }));
    }
    doc["sandwich"] = {{"band", {ws.settings().band_lo, ws.settings().band_hi}},
                       {"determinate", determinate},
                       {"pass_rate", determinate > 0 ? ojson(static_cast<double>(pass) / determinate) : ojson(nullptr)},
                       {"samples", samples}};
  }

  doc["approximation"] = guarded([&]() -> ojson {
    const BundleSection v = smooth_random_section(bundle, rng, 4, 1.0);
    std::vector<double> lx;
    std::vector<double> ly;
    ojson pts = ojson::array();
    for (double eps : {0.04, 0.02, 0.01}) {
      const ApproximationResult ar = ws.approximation_check(eps * v);
      pts.push_back({{"amplitude", eps}, {"lhs", ar.lhs}, {"rhs", ar.rhs}});
      if (ar.lhs > 0.0 && ar.rhs > 0.0) {
        lx.push_back(0.5 * std::log(ar.rhs));
        ly.push_back(std::log(ar.lhs));
      }
    }
    ojson res = {{"points", pts}};
    if (lx.size() == 3) {
      const double mx = (lx[0] + lx[1] + lx[2]) / 3.0;
      const double my = (ly[0] + ly[1] + ly[2]) / 3.0;
      double sxx = 0.0;
      double sxy = 0.0;
      for (int i = 0; i < 3; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
      }
      res["slope"] = sxy / sxx;
    }
    return res;
  });

  ojson lip = ojson::array();
  for (double amp : {0.01, 0.005}) {
    lip.push_back(guarded([&]() -> ojson {
      const LipschitzReport lr = lipschitz_probe(ws, 50, amp, config.perturbation.seed);
      return {{"amplitude", amp},
              {"pairs", lr.ratios.size()},
              {"min_ratio", lr.min_ratio},
              {"max_ratio", lr.max_ratio},
              {"spread", lr.max_ratio / lr.min_ratio}};
    }));
  }
  doc["lipschitz"] = lip;

  write_json(dir / "reduction.json", doc);
  out << "reduce-run: kernel_dimension = " << ws.kernel_dimension() << ", integrable = " << (ip.integrable ? "yes" : "no")
      << "\n";
}

void run_finite_verify(const RunConfig& config, const fs::path& dir, std::ostream& out) {
  const auto polys = config.finite.polynomials.empty() ? default_polynomials() : config.finite.polynomials;
  ojson results = ojson::array();
  for (const auto& fp : polys) {
    ojson r = {{"name", fp.name}, {"polynomial", fp.polynomial.to_string()}};
    const Vec x0 = Eigen::Map<const Vec>(fp.critical_point.data(), static_cast<Eigen::Index>(fp.critical_point.size()));
    r["gradient"] = guarded([&] {
      return fit_json(finite_dim_gradient_exponent(fp.polynomial, x0, config.finite.radii,
                                                   config.finite.samples_per_radius, config.perturbation.seed));
    });
    if (!fp.box_lo.empty()) {
      const Vec lo = Eigen::Map<const Vec>(fp.box_lo.data(), static_cast<Eigen::Index>(fp.box_lo.size()));
      const Vec hi = Eigen::Map<const Vec>(fp.box_hi.data(), static_cast<Eigen::Index>(fp.box_hi.size()));
      r["distance"] = guarded([&]() -> ojson {
        const DistanceFit d = finite_dim_distance_exponent(fp.polynomial, lo, hi, fp.grid_n);
        return {{"alpha", d.alpha},
                {"constant", d.constant},
                {"r_squared", d.r_squared},
                {"sample_count", d.sample_count},
                {"zero_set_size", d.zero_set_size}};
      });
    }
    out << "finite-verify: " << fp.name;
    if (r["gradient"].contains("theta")) out << " theta = " << r["gradient"]["theta"].get<double>();
    if (r.contains("distance") && r["distance"].contains("alpha")) out << " alpha = " << r["distance"]["alpha"].get<double>();
    out << "\n";
    results.push_back(std::move(r));
  }
  ojson doc = report_header();
  doc["subcommand"] = "finite-verify";
  doc["results"] = results;
  write_json(dir / "finite_verify.json", doc);
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"energy-eval", "flow-run", "loj-estimate", "reduce-run", "finite-verify"};
  return names;
}

std::vector<FinitePolynomial> default_polynomials() {
  auto make = [](std::string name, int dim, std::vector<Monomial> terms) {
    FinitePolynomial fp;
    fp.name = std::move(name);
    fp.polynomial = Polynomial(dim, std::move(terms));
    fp.critical_point.assign(dim, 0.0);
    fp.box_lo.assign(dim, -1.0);
    fp.box_hi.assign(dim, 1.0);
    fp.grid_n = dim == 1 ? 201 : 41;
    return fp;
  };
  return {make("x^2", 1, {{{2}, 1.0}}), make("x^4", 1, {{{4}, 1.0}}),
          make("x^2+y^4", 2, {{{2, 0}, 1.0}, {{0, 4}, 1.0}}), make("x^2*y^2", 2, {{{2, 2}, 1.0}})};
}

void dispatch(const std::string& subcommand, const RunConfig& config, const fs::path& out_dir, std::ostream& out) {
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), subcommand) == names.end()) {
    throw Error(ErrorCode::invalid_argument, "unknown subcommand '" + subcommand + "'");
  }
  fs::create_directories(out_dir);
  ojson echo = report_header();
  echo["subcommand"] = subcommand;
  echo["config"] = config_to_json(config);
  echo["config"]["output"]["directory"] = out_dir.string();
  write_json(out_dir / "config_echo.json", echo);

  if (subcommand == "energy-eval") {
    run_energy_eval(config, out_dir, out);
  } else if (subcommand == "flow-run") {
    run_flow_run(config, out_dir, out);
  } else if (subcommand == "loj-estimate") {
    run_loj_estimate(config, out_dir, out);
  } else if (subcommand == "reduce-run") {
    run_reduce_run(config, out_dir, out);
  } else {
    run_finite_verify(config, out_dir, out);
  }
}

}  // namespace lojvar::harness
