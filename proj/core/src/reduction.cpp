#include "lojvar/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lojvar/error.hpp"

namespace lojvar {

namespace {

Mat fiber_basis_matrix(const PullbackBundle& b) {
  const int n = b.size();
  const int p = b.ambient_dim();
  const int q = b.fiber_dim();
  Mat B = Mat::Zero(n * p, n * q);
  for (int i = 0; i < n; ++i) B.block(i * p, i * q, p, q) = b.fiber_bases[i];
  return B;
}

}  // namespace

KernelResult compute_kernel(const Mat& L, const BundlePtr& bundle, double kernel_tol) {
  const auto& b = *bundle;
  const int n = b.size();
  const int p = b.ambient_dim();
  if (L.rows() != n * p || L.cols() != n * p) {
    throw Error(ErrorCode::length_mismatch, "linearization does not match the bundle");
  }
  const Mat B = fiber_basis_matrix(b);
  const Mat R = B.transpose() * L * B;
  const double asym = (R - R.transpose()).norm() / std::max(R.norm(), 1e-300);
  if (asym > 1e-5) {
    std::ostringstream msg;
    msg << "linearization is not self-adjoint (relative asymmetry " << asym << ")";
    throw Error(ErrorCode::validation_failed, msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (R + R.transpose()));
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::not_converged, "eigendecomposition failed");
  }
  KernelResult out;
  out.spectrum = es.eigenvalues();
  out.spectral_radius = out.spectrum.cwiseAbs().maxCoeff();
  const double threshold = kernel_tol * out.spectral_radius;

  std::vector<int> kept;
  double max_kept = 0.0;
  double min_discarded = std::numeric_limits<double>::infinity();
  for (int k = 0; k < out.spectrum.size(); ++k) {
    const double a = std::abs(out.spectrum(k));
    if (a < threshold) {
      kept.push_back(k);
      max_kept = std::max(max_kept, a);
    } else {
      min_discarded = std::min(min_discarded, a);
    }
  }
  out.gap_ratio = kept.empty() || max_kept == 0.0 ? std::numeric_limits<double>::infinity()
                                                   : min_discarded / max_kept;
  if (!kept.empty() && !(out.gap_ratio >= 10.0)) {
    std::ostringstream msg;
    msg << "no spectral gap: kept eigenvalues up to " << max_kept << ", discarded from "
        << min_discarded;
    throw Error(ErrorCode::no_spectral_gap, msg.str());
  }

  const double h = b.mesh.spacing();
  out.kept.resize(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) {
    out.kept(static_cast<Eigen::Index>(j)) = out.spectrum(kept[j]);
    const Vec c = es.eigenvectors().col(kept[j]);
    BundleSection phi = project_section(bundle, unflatten(Vec(B * c / std::sqrt(h)), n, p));
    // Gram-Schmidt in the quadrature inner product.
    for (const auto& prev : out.basis) phi = phi - l2_inner(phi, prev) * prev;
    phi = phi * (1.0 / std::sqrt(l2_inner(phi, phi)));
    out.basis.push_back(std::move(phi));
  }
  return out;
}

ReductionWorkspace ReductionWorkspace::build(BundlePtr bundle, FunctionalSpec functional,
                                             ReductionSettings settings) {
  ReductionWorkspace ws(std::move(bundle), std::move(functional), settings);
  const BundleSection zero = BundleSection::zero(ws.bundle_);
  ws.L_ = linearization_matrix(ws.functional_, zero);
  ws.kernel_ = compute_kernel(ws.L_, ws.bundle_, settings.kernel_tol);

  const auto& b = *ws.bundle_;
  const double h = b.mesh.spacing();
  const int nq = b.size() * b.fiber_dim();
  ws.pk_fiber_ = Mat::Zero(nq, nq);
  for (const auto& phi : ws.kernel_.basis) {
    const Vec c = b.to_fiber_coords(phi.values());
    ws.pk_fiber_ += h * c * c.transpose();
  }
  return ws;
}

BundleSection ReductionWorkspace::project_onto_kernel(const BundleSection& u) const {
  if (u.bundle() != bundle_) throw Error(ErrorCode::bundle_mismatch, "section is on another bundle");
  BundleSection out = BundleSection::zero(bundle_);
  for (const auto& phi : kernel_.basis) out = out + l2_inner(u, phi) * phi;
  return out;
}

Vec ReductionWorkspace::kernel_coordinates(const BundleSection& u) const {
  Vec xi(kernel_dimension());
  for (int j = 0; j < kernel_dimension(); ++j) xi(j) = l2_inner(u, kernel_.basis[j]);
  return xi;
}

BundleSection ReductionWorkspace::kernel_combination(const Vec& xi) const {
  if (xi.size() != kernel_dimension()) {
    throw Error(ErrorCode::length_mismatch, "kernel coordinate vector has the wrong length");
  }
  BundleSection out = BundleSection::zero(bundle_);
  for (int j = 0; j < kernel_dimension(); ++j) out = out + xi(j) * kernel_.basis[j];
  return out;
}

BundleSection ReductionWorkspace::apply_N(const BundleSection& u) const {
  return project_onto_kernel(u) + general_euler_lagrange(functional_, u);
}

NewtonReport ReductionWorkspace::invert_N_report(const BundleSection& f) const {
  if (f.bundle() != bundle_) throw Error(ErrorCode::bundle_mismatch, "section is on another bundle");
  const auto& b = *bundle_;
  if (!(std::sqrt(l2_inner(f, f)) < settings_.basin_radius)) {
    throw Error(ErrorCode::outside_neighborhood, "right-hand side lies outside the Newton basin");
  }
  const Mat B = fiber_basis_matrix(b);
  auto residual = [&](const BundleSection& u) { return apply_N(u) - f; };
  auto norm = [&](const BundleSection& s) { return std::sqrt(l2_inner(s, s)); };

  NewtonReport rep{f, {}, false};
  BundleSection r = residual(rep.solution);
  double rn = norm(r);
  rep.residuals.push_back(rn);
  for (int it = 0; it < settings_.newton_max_iter && rn > settings_.newton_tol; ++it) {
    const Mat J = pk_fiber_ + B.transpose() * linearization_matrix(functional_, rep.solution) * B;
    Eigen::PartialPivLU<Mat> lu(J);
    if (!(lu.rcond() > 1e-13)) {
      throw Error(ErrorCode::singular_system, "Newton system is singular");
    }
    const Vec delta = lu.solve(-b.to_fiber_coords(r.values()));
    const BundleSection step(bundle_, b.from_fiber_coords(delta));

    double scale = 1.0;
    BundleSection trial = rep.solution + step;
    BundleSection rt = residual(trial);
    double tn = norm(rt);
    for (int k = 0; k < settings_.max_halvings && !(tn < rn); ++k) {
      scale *= 0.5;
      trial = rep.solution + scale * step;
      rt = residual(trial);
      tn = norm(rt);
    }
    rep.solution = trial;
    r = rt;
    rn = tn;
    rep.residuals.push_back(rn);
  }
  rep.converged = rn <= settings_.newton_tol;
  if (!rep.converged) {
    std::ostringstream msg;
    msg << "Newton inversion stalled at residual " << rn << " after " << rep.residuals.size() - 1
        << " iterations";
    throw Error(ErrorCode::not_converged, msg.str());
  }
  return rep;
}

double ReductionWorkspace::reduced_function(const Vec& xi) const {
  if (!(xi.norm() < settings_.xi_radius)) {
    throw Error(ErrorCode::outside_neighborhood, "reduced function evaluated outside its ball");
  }
  return functional_value(functional_, invert_N(kernel_combination(xi)));
}

Vec ReductionWorkspace::reduced_gradient(const Vec& xi) const {
  const double s = settings_.gradient_step;
  Vec g(xi.size());
  for (Eigen::Index j = 0; j < xi.size(); ++j) {
    Vec xp = xi;
    Vec xm = xi;
    xp(j) += s;
    xm(j) -= s;
    g(j) = (reduced_function(xp) - reduced_function(xm)) / (2.0 * s);
  }
  return g;
}

SandwichResult ReductionWorkspace::sandwich_check(const Vec& xi) const {
  SandwichResult out;
  out.gradient_norm = reduced_gradient(xi).norm();
  const BundleSection m = general_euler_lagrange(functional_, invert_N(kernel_combination(xi)));
  out.residual_norm = std::sqrt(l2_inner(m, m));
  out.determinate = out.gradient_norm > settings_.noise_floor && out.residual_norm > settings_.noise_floor;
  if (out.determinate) {
    out.ratio = out.residual_norm / out.gradient_norm;
    out.pass = out.ratio >= settings_.band_lo && out.ratio <= settings_.band_hi;
  }
  return out;
}

ApproximationResult ReductionWorkspace::approximation_check(const BundleSection& u) const {
  const double fu = functional_value(functional_, u);
  const double fr = functional_value(functional_, invert_N(project_onto_kernel(u)));
  const BundleSection m = general_euler_lagrange(functional_, u);
  return {std::abs(fu - fr), l2_inner(m, m)};
}

LipschitzReport lipschitz_probe(const ReductionWorkspace& ws, int pairs, double amplitude, std::uint64_t seed) {
  if (pairs < 1) throw Error(ErrorCode::invalid_argument, "lipschitz_probe needs at least one pair");
  Rng rng(seed);
  LipschitzReport rep;
  for (int k = 0; k < pairs; ++k) {
    const BundleSection f1 = smooth_random_section(ws.bundle(), rng, 3, amplitude);
    const BundleSection f2 = smooth_random_section(ws.bundle(), rng, 3, amplitude);
    const double den = l2_inner(f1 - f2, f1 - f2);
    if (den <= 0.0) continue;
    const BundleSection d = ws.invert_N(f1) - ws.invert_N(f2);
    rep.ratios.push_back(sobolev_norms(d).w22 / std::sqrt(den));
  }
  if (rep.ratios.empty()) throw Error(ErrorCode::insufficient_data, "all Lipschitz pairs coincided");
  const auto [lo, hi] = std::minmax_element(rep.ratios.begin(), rep.ratios.end());
  rep.min_ratio = *lo;
  rep.max_ratio = *hi;
  return rep;
}

}  // namespace lojvar
