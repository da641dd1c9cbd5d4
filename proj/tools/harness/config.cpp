#include "harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "lojvar/error.hpp"

namespace lojvar::harness {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::config_error, path + ": " + what);
}

// Walks one JSON object, tracking which keys were consumed so leftovers can
// be rejected by name.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& at(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  template <class T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) fail(path(key), "expected a number");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer() && !v.is_number_unsigned()) fail(path(key), "expected an integer");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) fail(path(key), "expected a string");
      }
      out = v.get<T>();
    } catch (const json::exception& e) {
      fail(path(key), e.what());
    }
  }

  void read_list(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array()) fail(path(key), "expected an array of numbers");
    out.clear();
    for (const auto& x : v) {
      if (!x.is_number()) fail(path(key), "expected an array of numbers");
      out.push_back(x.get<double>());
    }
  }

  void reject_unknown() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(path(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) fail(path, what);
}

int line_of(const std::string& text, std::size_t byte) {
  const auto end = text.begin() + static_cast<std::ptrdiff_t>(std::min(byte, text.size()));
  return 1 + static_cast<int>(std::count(text.begin(), end, '\n'));
}

FinitePolynomial parse_polynomial(const json& j, const std::string& path) {
  Section s(j, path);
  FinitePolynomial fp;
  int dim = 0;
  s.read("name", fp.name);
  s.read("dim", dim);
  require(dim >= 1, s.path("dim"), "must be >= 1");
  std::vector<Monomial> terms;
  if (!s.has("terms")) fail(s.path("terms"), "missing");
  const json& t = s.at("terms");
  require(t.is_array() && !t.empty(), s.path("terms"), "expected a non-empty array of [exponents, coefficient] pairs");
  for (std::size_t k = 0; k < t.size(); ++k) {
    const std::string tp = s.path("terms") + "[" + std::to_string(k) + "]";
    const json& pair = t[k];
    require(pair.is_array() && pair.size() == 2 && pair[0].is_array() && pair[1].is_number(), tp,
            "expected [exponents, coefficient]");
    Monomial m;
    for (const auto& e : pair[0]) {
      require(e.is_number_integer() && e.get<int>() >= 0, tp, "exponents must be nonnegative integers");
      m.exponents.push_back(e.get<int>());
    }
    require(static_cast<int>(m.exponents.size()) == dim, tp, "exponent tuple length must equal dim");
    m.coefficient = pair[1].get<double>();
    terms.push_back(std::move(m));
  }
  fp.polynomial = Polynomial(dim, std::move(terms));
  fp.critical_point.assign(dim, 0.0);
  s.read_list("critical_point", fp.critical_point);
  require(static_cast<int>(fp.critical_point.size()) == dim, s.path("critical_point"), "length must equal dim");
  if (s.has("box")) {
    Section b(s.at("box"), s.path("box"));
    b.read_list("lo", fp.box_lo);
    b.read_list("hi", fp.box_hi);
    b.reject_unknown();
    require(static_cast<int>(fp.box_lo.size()) == dim && static_cast<int>(fp.box_hi.size()) == dim,
            s.path("box"), "lo and hi must have length dim");
  }
  s.read("grid_n", fp.grid_n);
  require(fp.grid_n >= 3, s.path("grid_n"), "must be >= 3");
  s.reject_unknown();
  if (fp.name.empty()) fp.name = fp.polynomial.to_string();
  return fp;
}

nlohmann::ordered_json polynomial_to_json(const FinitePolynomial& fp) {
  nlohmann::ordered_json terms = nlohmann::ordered_json::array();
  for (const auto& m : fp.polynomial.terms()) terms.push_back(nlohmann::ordered_json::array({m.exponents, m.coefficient}));
  nlohmann::ordered_json j = {{"name", fp.name}, {"dim", fp.polynomial.dim()}, {"terms", terms}, {"critical_point", fp.critical_point}};
  if (!fp.box_lo.empty()) j["box"] = {{"lo", fp.box_lo}, {"hi", fp.box_hi}};
  j["grid_n"] = fp.grid_n;
  return j;
}

bool positive_list(const std::vector<double>& v) {
  return !v.empty() && std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0 && std::isfinite(x); });
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream msg;
    msg << "parse error at line " << line_of(text, e.byte) << ": " << e.what();
    throw Error(ErrorCode::config_error, msg.str());
  }
  RunConfig c;
  Section top(root, "");

  if (top.has("domain")) {
    Section s(top.at("domain"), "domain");
    s.read("n_nodes", c.domain.n_nodes);
    s.read("diff_order", c.domain.diff_order);
    s.reject_unknown();
  }
  require(c.domain.n_nodes >= 8, "domain.n_nodes", "must be >= 8");
  require(c.domain.diff_order == 2 || c.domain.diff_order == 4, "domain.diff_order", "must be 2 or 4");

  if (top.has("target")) {
    Section s(top.at("target"), "target");
    s.read("kind", c.target.kind);
    s.read("ambient_dim", c.target.ambient_dim);
    s.read_list("semi_axes", c.target.semi_axes);
    if (s.has("tube_radius")) {
      double r = 0.0;
      s.read("tube_radius", r);
      c.target.tube_radius = r;
    }
    s.reject_unknown();
  }
  require(c.target.kind == "sphere" || c.target.kind == "ellipsoid", "target.kind", "must be sphere or ellipsoid");
  require(c.target.ambient_dim >= 2, "target.ambient_dim", "must be >= 2");
  if (c.target.kind == "ellipsoid") {
    if (c.target.semi_axes.empty()) c.target.semi_axes.assign(c.target.ambient_dim, 1.0);
    require(static_cast<int>(c.target.semi_axes.size()) == c.target.ambient_dim, "target.semi_axes",
            "length must equal ambient_dim");
    require(positive_list(c.target.semi_axes), "target.semi_axes", "entries must be positive");
  } else {
    require(c.target.semi_axes.empty(), "target.semi_axes", "only valid for ellipsoid targets");
  }
  if (c.target.tube_radius) require(*c.target.tube_radius > 0.0, "target.tube_radius", "must be positive");

  if (top.has("base_map")) {
    Section s(top.at("base_map"), "base_map");
    s.read("degree", c.base_map.degree);
    s.read("file", c.base_map.file);
    s.reject_unknown();
  }

  if (top.has("perturbation")) {
    Section s(top.at("perturbation"), "perturbation");
    s.read("seed", c.perturbation.seed);
    s.read("amplitude", c.perturbation.amplitude);
    s.read("mode_count", c.perturbation.mode_count);
    s.reject_unknown();
  }
  require(c.perturbation.amplitude >= 0.0, "perturbation.amplitude", "must be >= 0");
  require(c.perturbation.mode_count >= 1, "perturbation.mode_count", "must be >= 1");
  c.flow.seed = c.perturbation.seed;

  if (top.has("flow")) {
    Section s(top.at("flow"), "flow");
    s.read("dt_factor", c.flow.dt_factor);
    s.read("t_max", c.flow.t_max);
    s.read("stop_grad_tol", c.flow.stop_grad_tol);
    std::string integ(to_string(c.flow.integrator));
    s.read("integrator", integ);
    require(integ == "projected_euler" || integ == "projected_rk4", s.path("integrator"),
            "must be projected_euler or projected_rk4");
    c.flow.integrator = integ == "projected_euler" ? Integrator::projected_euler : Integrator::projected_rk4;
    s.reject_unknown();
  }
  require(c.flow.dt_factor > 0.0 && c.flow.dt_factor <= 0.5, "flow.dt_factor", "must lie in (0, 0.5]");
  require(c.flow.t_max > 0.0, "flow.t_max", "must be positive");
  require(c.flow.stop_grad_tol >= 0.0, "flow.stop_grad_tol", "must be >= 0");

  if (top.has("reduction")) {
    Section s(top.at("reduction"), "reduction");
    s.read("kernel_tol", c.reduction.kernel_tol);
    s.read("newton_tol", c.reduction.newton_tol);
    s.read("newton_max_iter", c.reduction.newton_max_iter);
    s.read("quartic_penalty", c.reduction.quartic_penalty);
    s.read_list("probe_radii", c.reduction.probe_radii);
    s.read("sandwich_samples", c.reduction.sandwich_samples);
    s.reject_unknown();
  }
  require(c.reduction.kernel_tol > 0.0 && c.reduction.kernel_tol < 1.0, "reduction.kernel_tol", "must lie in (0, 1)");
  require(c.reduction.newton_tol > 0.0, "reduction.newton_tol", "must be positive");
  require(c.reduction.newton_max_iter >= 1, "reduction.newton_max_iter", "must be >= 1");
  require(c.reduction.quartic_penalty >= 0.0, "reduction.quartic_penalty", "must be >= 0");
  require(positive_list(c.reduction.probe_radii), "reduction.probe_radii", "entries must be positive");
  require(c.reduction.sandwich_samples >= 0, "reduction.sandwich_samples", "must be >= 0");

  if (top.has("lojasiewicz")) {
    Section s(top.at("lojasiewicz"), "lojasiewicz");
    s.read_list("radii", c.lojasiewicz.radii);
    s.read("samples_per_radius", c.lojasiewicz.samples_per_radius);
    s.read_list("amplitudes", c.lojasiewicz.amplitudes);
    s.read("theta_claim", c.lojasiewicz.theta_claim);
    s.reject_unknown();
  }
  require(positive_list(c.lojasiewicz.radii), "lojasiewicz.radii", "entries must be positive");
  require(positive_list(c.lojasiewicz.amplitudes), "lojasiewicz.amplitudes", "entries must be positive");
  require(c.lojasiewicz.samples_per_radius >= 1, "lojasiewicz.samples_per_radius", "must be >= 1");
  require(c.lojasiewicz.theta_claim > 0.0 && c.lojasiewicz.theta_claim <= 1.0, "lojasiewicz.theta_claim",
          "must lie in (0, 1]");

  if (top.has("output")) {
    Section s(top.at("output"), "output");
    s.read("directory", c.output.directory);
    s.read("stride", c.output.stride);
    s.reject_unknown();
  }
  require(!c.output.directory.empty(), "output.directory", "must not be empty");
  require(c.output.stride >= 1, "output.stride", "must be >= 1");

  if (top.has("finite")) {
    Section s(top.at("finite"), "finite");
    if (s.has("polynomials")) {
      const json& list = s.at("polynomials");
      require(list.is_array(), s.path("polynomials"), "expected an array");
      for (std::size_t k = 0; k < list.size(); ++k) {
        c.finite.polynomials.push_back(parse_polynomial(list[k], "finite.polynomials[" + std::to_string(k) + "]"));
      }
    }
    s.read_list("radii", c.finite.radii);
    s.read("samples_per_radius", c.finite.samples_per_radius);
    s.reject_unknown();
  }
  require(positive_list(c.finite.radii), "finite.radii", "entries must be positive");
  require(c.finite.samples_per_radius >= 0, "finite.samples_per_radius", "must be >= 0");

  top.reject_unknown();
  return c;
}

nlohmann::ordered_json config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["domain"] = {{"n_nodes", c.domain.n_nodes}, {"diff_order", c.domain.diff_order}};
  j["target"] = {{"kind", c.target.kind}, {"ambient_dim", c.target.ambient_dim}, {"semi_axes", c.target.semi_axes}};
  if (c.target.tube_radius) j["target"]["tube_radius"] = *c.target.tube_radius;
  j["base_map"] = {{"degree", c.base_map.degree}, {"file", c.base_map.file}};
  j["perturbation"] = {{"seed", c.perturbation.seed},
                       {"amplitude", c.perturbation.amplitude},
                       {"mode_count", c.perturbation.mode_count}};
  j["flow"] = {{"dt_factor", c.flow.dt_factor},
               {"t_max", c.flow.t_max},
               {"stop_grad_tol", c.flow.stop_grad_tol},
               {"integrator", std::string(to_string(c.flow.integrator))}};
  j["reduction"] = {{"kernel_tol", c.reduction.kernel_tol},
                    {"newton_tol", c.reduction.newton_tol},
                    {"newton_max_iter", c.reduction.newton_max_iter},
                    {"quartic_penalty", c.reduction.quartic_penalty},
                    {"probe_radii", c.reduction.probe_radii},
                    {"sandwich_samples", c.reduction.sandwich_samples}};
  j["lojasiewicz"] = {{"radii", c.lojasiewicz.radii},
                      {"samples_per_radius", c.lojasiewicz.samples_per_radius},
                      {"amplitudes", c.lojasiewicz.amplitudes},
                      {"theta_claim", c.lojasiewicz.theta_claim}};
  j["output"] = {{"directory", c.output.directory}, {"stride", c.output.stride}};
  nlohmann::ordered_json polys = nlohmann::ordered_json::array();
  for (const auto& p : c.finite.polynomials) polys.push_back(polynomial_to_json(p));
  j["finite"] = {{"polynomials", polys}, {"radii", c.finite.radii}, {"samples_per_radius", c.finite.samples_per_radius}};
  return j;
}

ReductionSettings reduction_settings(const RunConfig& c) {
  ReductionSettings s;
  s.kernel_tol = c.reduction.kernel_tol;
  s.newton_tol = c.reduction.newton_tol;
  s.newton_max_iter = c.reduction.newton_max_iter;
  return s;
}

}  // namespace lojvar::harness
