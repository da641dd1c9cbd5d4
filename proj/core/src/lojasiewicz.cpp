#include "lojvar/lojasiewicz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lojvar/error.hpp"
#include "lojvar/rng.hpp"

namespace lojvar {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::flow_trajectory: return "flow_trajectory";
    case Provenance::random_perturbation: return "random_perturbation";
    case Provenance::grid: return "grid";
    case Provenance::sphere_sampling: return "sphere_sampling";
  }
  return "unknown";
}

namespace {

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

Line ols(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  Line l;
  l.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  l.intercept = my - l.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (l.intercept + l.slope * x[i]);
    sse += e * e;
  }
  l.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  return l;
}

bool usable(const SamplePair& s) {
  return s.value_gap > kFitFloor && s.gradient_norm > kFitFloor && std::isfinite(s.value_gap) &&
         std::isfinite(s.gradient_norm);
}

// A group of samples sharing a scale (radius shell or distance bin). Each
// sample is (log v, log g) and the group has an abscissa log r.
struct Group {
  double log_scale = 0.0;
  std::vector<std::pair<double, double>> samples;
};

// Worst-case envelope: the exponent e at which max_group(e·log v - log g) is
// flat in log r. That slope is nondecreasing in e, so bisection applies.
double envelope_exponent(const std::vector<Group>& groups, double lo, double hi) {
  auto slope = [&](double e) {
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& g : groups) {
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& [lv, lg] : g.samples) best = std::max(best, e * lv - lg);
      x.push_back(g.log_scale);
      y.push_back(best);
    }
    return ols(x, y).slope;
  };
  if (slope(hi) <= 0.0) return hi;
  if (slope(lo) >= 0.0) return lo;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (slope(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// R² of log g against log v over the samples that attain each group's max.
double envelope_r_squared(const std::vector<Group>& groups, double e) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& g : groups) {
    double best = -std::numeric_limits<double>::infinity();
    std::pair<double, double> arg{0.0, 0.0};
    for (const auto& s : g.samples) {
      if (e * s.first - s.second > best) {
        best = e * s.first - s.second;
        arg = s;
      }
    }
    x.push_back(arg.first);
    y.push_back(arg.second);
  }
  return x.size() >= 2 ? ols(x, y).r_squared : 0.0;
}

}  // namespace

ExponentFit estimate_gradient_exponent(const SampleCloud& cloud) {
  std::vector<double> lv;
  std::vector<double> lg;
  ExponentFit fit;
  for (const auto& s : cloud.pairs) {
    if (!usable(s)) {
      ++fit.noise_floor_hits;
      continue;
    }
    lv.push_back(std::log(s.value_gap));
    lg.push_back(std::log(s.gradient_norm));
  }
  fit.sample_count = static_cast<int>(lv.size());
  if (fit.sample_count < 10) {
    throw Error(ErrorCode::insufficient_data,
                "exponent fit needs at least 10 usable pairs, got " + std::to_string(fit.sample_count));
  }
  const auto [mn, mx] = std::minmax_element(lv.begin(), lv.end());
  if ((*mx - *mn) / std::log(10.0) < 2.0) {
    throw Error(ErrorCode::insufficient_data, "value gaps span less than two decades");
  }
  const Line l = ols(lv, lg);
  fit.theta = l.slope;
  fit.constant = std::exp(-l.intercept);
  fit.r_squared = l.r_squared;
  if (!(fit.theta > 0.0 && fit.theta <= 1.0 + 1e-9)) {
    std::ostringstream msg;
    msg << "fitted exponent " << fit.theta << " lies outside (0, 1]";
    throw Error(ErrorCode::fit_out_of_range, msg.str());
  }
  return fit;
}

InequalityReport verify_inequality(const SampleCloud& cloud, double theta_claim) {
  InequalityReport rep;
  rep.theta_claim = theta_claim;
  std::vector<SamplePair> use;
  for (const auto& s : cloud.pairs) {
    if (usable(s)) {
      use.push_back(s);
    } else {
      ++rep.excluded;
    }
  }
  rep.usable = static_cast<int>(use.size());
  if (rep.usable < 2) {
    throw Error(ErrorCode::insufficient_data, "inequality check needs at least 2 usable pairs");
  }
  auto ratio = [&](const SamplePair& s) { return std::pow(s.value_gap, theta_claim) / s.gradient_norm; };

  const std::size_t half = use.size() / 2;
  double c_first = 0.0;
  for (std::size_t i = 0; i < use.size(); ++i) {
    rep.c_min = std::max(rep.c_min, ratio(use[i]));
    if (i < half) c_first = std::max(c_first, ratio(use[i]));
  }
  rep.holdout_constant = 2.0 * c_first;
  int pass = 0;
  for (std::size_t i = half; i < use.size(); ++i) {
    if (std::pow(use[i].value_gap, theta_claim) <= rep.holdout_constant * use[i].gradient_norm) ++pass;
  }
  rep.holdout_pass_fraction = static_cast<double>(pass) / static_cast<double>(use.size() - half);

  std::vector<double> x;
  std::vector<double> y;
  for (const auto& s : use) {
    x.push_back(std::log(s.value_gap));
    y.push_back(std::log(ratio(s)));
  }
  rep.trend_slope = ols(x, y).slope;
  rep.diverging = rep.trend_slope < -0.05;
  return rep;
}

namespace {

std::vector<Vec> sample_directions(int dim, int random_count, Rng& rng) {
  std::vector<Vec> dirs;
  for (int a = 0; a < dim; ++a) {
    dirs.push_back(Vec::Unit(dim, a));
    dirs.push_back(-Vec::Unit(dim, a));
  }
  for (int k = 0; k < random_count; ++k) dirs.push_back(rng.unit_vector(dim));
  return dirs;
}

void check_critical(const Polynomial& f, const Vec& x) {
  if (x.size() != f.dim()) throw Error(ErrorCode::length_mismatch, "critical point dimension mismatch");
  if (f.gradient(x).norm() > 1e-12) {
    throw Error(ErrorCode::invalid_argument, "point is not critical for the polynomial");
  }
}

}  // namespace

SampleCloud finite_dim_cloud(const Polynomial& f, const Vec& critical_point,
                             const std::vector<double>& radii, int samples_per_radius,
                             std::uint64_t seed) {
  check_critical(f, critical_point);
  Rng rng(seed);
  const double f0 = f.value(critical_point);
  SampleCloud cloud;
  cloud.provenance = Provenance::sphere_sampling;
  for (double r : radii) {
    for (const Vec& d : sample_directions(f.dim(), samples_per_radius, rng)) {
      const Vec y = critical_point + r * d;
      cloud.pairs.push_back({std::abs(f.value(y) - f0), f.gradient(y).norm()});
    }
  }
  return cloud;
}

ExponentFit finite_dim_gradient_exponent(const Polynomial& f, const Vec& critical_point,
                                         const std::vector<double>& radii, int samples_per_radius,
                                         std::uint64_t seed) {
  const SampleCloud cloud = finite_dim_cloud(f, critical_point, radii, samples_per_radius, seed);
  const std::size_t per = cloud.pairs.size() / std::max<std::size_t>(radii.size(), 1);
  std::vector<Group> groups;
  ExponentFit fit;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    Group g;
    g.log_scale = std::log(radii[k]);
    for (std::size_t j = 0; j < per; ++j) {
      const auto& s = cloud.pairs[k * per + j];
      if (!usable(s)) {
        ++fit.noise_floor_hits;
        continue;
      }
      g.samples.emplace_back(std::log(s.value_gap), std::log(s.gradient_norm));
    }
    fit.sample_count += static_cast<int>(g.samples.size());
    if (!g.samples.empty()) groups.push_back(std::move(g));
  }
  if (groups.size() < 2) {
    throw Error(ErrorCode::insufficient_data, "gradient exponent needs usable samples on at least 2 radii");
  }
  fit.theta = envelope_exponent(groups, 1e-3, 1.0);
  for (const auto& g : groups) {
    for (const auto& [lv, lg] : g.samples) fit.constant = std::max(fit.constant, std::exp(fit.theta * lv - lg));
  }
  fit.r_squared = envelope_r_squared(groups, fit.theta);
  return fit;
}

DistanceFit finite_dim_distance_exponent(const Polynomial& f, const Vec& lo, const Vec& hi, int grid_n) {
  const int dim = f.dim();
  if (lo.size() != dim || hi.size() != dim) throw Error(ErrorCode::length_mismatch, "box dimension mismatch");
  if ((hi - lo).minCoeff() <= 0.0) throw Error(ErrorCode::invalid_argument, "box bounds are inverted");
  if (grid_n < 3) throw Error(ErrorCode::invalid_argument, "grid needs at least 3 points per axis");
  const double zero_tol = 1e-8;

  auto grid_points = [&](int m) {
    std::vector<Vec> pts;
    std::vector<int> idx(dim, 0);
    while (true) {
      Vec x(dim);
      for (int a = 0; a < dim; ++a) x(a) = lo(a) + (hi(a) - lo(a)) * idx[a] / (m - 1);
      pts.push_back(x);
      int a = 0;
      while (a < dim && ++idx[a] == m) idx[a++] = 0;
      if (a == dim) break;
    }
    return pts;
  };

  // The fine grid refines the coarse one, so coarse points on Z are found.
  std::vector<Vec> zeros;
  for (Vec x : grid_points(4 * (grid_n - 1) + 1)) {
    if (std::abs(f.value(x)) >= zero_tol) continue;
    // Newton polish; degenerate zeros converge only linearly, hence the long cap.
    for (int it = 0; it < 400; ++it) {
      const double fx = f.value(x);
      const Vec g = f.gradient(x);
      const double gg = g.squaredNorm();
      if (fx == 0.0 || gg == 0.0) break;
      const Vec y = x - fx / gg * g;
      if (std::abs(f.value(y)) > std::abs(fx) || (y - x).norm() < 1e-16) break;
      x = y;
    }
    zeros.push_back(x);
  }
  if (zeros.empty()) throw Error(ErrorCode::empty_zero_set, "no zeros of the polynomial in the box");

  DistanceFit fit;
  fit.zero_set_size = static_cast<int>(zeros.size());
  std::vector<std::pair<double, double>> pairs;
  for (const Vec& x : grid_points(grid_n)) {
    double d = std::numeric_limits<double>::infinity();
    for (const Vec& z : zeros) d = std::min(d, (x - z).norm());
    const double v = std::abs(f.value(x));
    if (d > kFitFloor && v > kFitFloor) pairs.emplace_back(std::log(d), std::log(v));
  }
  fit.sample_count = static_cast<int>(pairs.size());
  if (pairs.size() < 10) throw Error(ErrorCode::insufficient_data, "too few grid points off the zero set");

  double dmin = std::numeric_limits<double>::infinity();
  double dmax = -dmin;
  for (const auto& p : pairs) {
    dmin = std::min(dmin, p.first);
    dmax = std::max(dmax, p.first);
  }
  const int nbins = 12;
  std::vector<Group> groups(nbins);
  for (int k = 0; k < nbins; ++k) groups[k].log_scale = dmin + (k + 0.5) * (dmax - dmin) / nbins;
  for (const auto& [ld, lv] : pairs) {
    const int k = dmax > dmin ? std::min(nbins - 1, static_cast<int>((ld - dmin) / (dmax - dmin) * nbins)) : 0;
    // The envelope is taken over α·log d - log|f|, i.e. "value" log d, "gradient" log|f|.
    groups[k].samples.emplace_back(ld, lv);
  }
  std::erase_if(groups, [](const Group& g) { return g.samples.empty(); });
  if (groups.size() < 2) throw Error(ErrorCode::insufficient_data, "distances span a single bin");

  fit.alpha = envelope_exponent(groups, 0.1, 20.0);
  for (const auto& g : groups) {
    for (const auto& [ld, lv] : g.samples) fit.constant = std::max(fit.constant, std::exp(fit.alpha * ld - lv));
  }
  fit.r_squared = envelope_r_squared(groups, fit.alpha);
  return fit;
}

IntegrabilityReport integrability_probe(const ReductionWorkspace& ws, const std::vector<double>& radii,
                                        int samples_per_radius, double tau, std::uint64_t seed) {
  IntegrabilityReport rep;
  rep.tau = tau;
  rep.integrable = true;
  Rng rng(seed);
  const int l = ws.kernel_dimension();
  for (double r : radii) {
    IntegrabilityRow row;
    row.radius = r;
    if (r == 0.0 || l == 0) {
      row.pass = true;
      rep.rows.push_back(row);
      continue;
    }
    try {
      for (const Vec& d : sample_directions(l, samples_per_radius, rng)) {
        row.max_abs_f = std::max(row.max_abs_f, std::abs(ws.reduced_function(r * d)));
      }
      row.pass = row.max_abs_f <= tau * r * r;
    } catch (const Error& e) {
      row.pass = false;
      row.error = e.what();
    }
    rep.integrable = rep.integrable && row.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

SampleCloud perturbation_cloud(const ReductionWorkspace& ws, const std::vector<double>& amplitudes,
                               int per_amplitude, std::uint64_t seed) {
  Rng rng(seed);
  SampleCloud cloud;
  cloud.provenance = Provenance::random_perturbation;
  const auto& F = ws.functional();
  for (double a : amplitudes) {
    for (int k = 0; k < per_amplitude; ++k) {
      BundleSection v = smooth_random_section(ws.bundle(), rng, 4, 1.0);
      v = v - ws.project_onto_kernel(v);
      v = v * (a / c0_norm(v.values()));
      const BundleSection m = general_euler_lagrange(F, v);
      cloud.pairs.push_back({std::abs(functional_value(F, v)), std::sqrt(l2_inner(m, m))});
    }
  }
  return cloud;
}

}  // namespace lojvar
