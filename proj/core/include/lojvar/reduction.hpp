#pragma once

#include <cstdint>
#include <vector>

#include "lojvar/bundle.hpp"
#include "lojvar/variational.hpp"

namespace lojvar {

struct ReductionSettings {
  double kernel_tol = 1e-6;
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  int max_halvings = 8;
  /// Newton is only attempted for right-hand sides with ‖f‖_L² below this.
  double basin_radius = 0.1;
  /// Reduced function domain |ξ| < xi_radius.
  double xi_radius = 0.05;
  double gradient_step = 1e-5;
  double noise_floor = 1e-9;
  double band_lo = 0.4;
  double band_hi = 2.1;
};

struct KernelResult {
  std::vector<BundleSection> basis;
  Vec kept;
  /// All eigenvalues of the fiber-restricted linearization, ascending.
  Vec spectrum;
  double spectral_radius = 0.0;
  /// min |discarded| / max |kept|; infinite when nothing is kept.
  double gap_ratio = 0.0;
};

/// Kernel of the linearization restricted to the fibers. L must be symmetric
/// to 1e-5 relative; eigenvalues below kernel_tol·ρ are kept and must be
/// separated from the rest by a factor of 10.
KernelResult compute_kernel(const Mat& L, const BundlePtr& bundle, double kernel_tol);

struct NewtonReport {
  BundleSection solution;
  std::vector<double> residuals;
  bool converged = false;
};

struct SandwichResult {
  double ratio = 0.0;
  double gradient_norm = 0.0;
  double residual_norm = 0.0;
  bool determinate = false;
  bool pass = false;
};

struct ApproximationResult {
  double lhs = 0.0;
  double rhs = 0.0;
};

class ReductionWorkspace {
 public:
  static ReductionWorkspace build(BundlePtr bundle, FunctionalSpec functional,
                                  ReductionSettings settings = {});

  const BundlePtr& bundle() const noexcept { return bundle_; }
  const FunctionalSpec& functional() const noexcept { return functional_; }
  const ReductionSettings& settings() const noexcept { return settings_; }
  const Mat& linearization() const noexcept { return L_; }
  const KernelResult& kernel() const noexcept { return kernel_; }
  int kernel_dimension() const noexcept { return static_cast<int>(kernel_.basis.size()); }

  BundleSection project_onto_kernel(const BundleSection& u) const;
  /// Σ ξ_j φ_j.
  BundleSection kernel_combination(const Vec& xi) const;
  /// Coefficients ⟨u, φ_j⟩.
  Vec kernel_coordinates(const BundleSection& u) const;

  /// N(u) = P_K u + M_F(u).
  BundleSection apply_N(const BundleSection& u) const;
  /// Ψ(f): full Newton from u₀ = f. Throws outside_neighborhood,
  /// singular_system or not_converged.
  NewtonReport invert_N_report(const BundleSection& f) const;
  BundleSection invert_N(const BundleSection& f) const { return invert_N_report(f).solution; }

  /// f(ξ) = F(Ψ(Σ ξ_j φ_j)).
  double reduced_function(const Vec& xi) const;
  Vec reduced_gradient(const Vec& xi) const;
  SandwichResult sandwich_check(const Vec& xi) const;
  ApproximationResult approximation_check(const BundleSection& u) const;

 private:
  ReductionWorkspace(BundlePtr bundle, FunctionalSpec functional, ReductionSettings settings)
      : bundle_(std::move(bundle)), functional_(std::move(functional)), settings_(settings) {}

  BundlePtr bundle_;
  FunctionalSpec functional_;
  ReductionSettings settings_;
  Mat L_;
  KernelResult kernel_;
  /// Fiber-coordinate matrix of P_K.
  Mat pk_fiber_;
};

struct LipschitzReport {
  std::vector<double> ratios;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

/// Ratios ‖Ψ(f₁) - Ψ(f₂)‖_{W^{2,2}} / ‖f₁ - f₂‖_{L²} over seeded pairs of smooth
/// sections with C⁰ size `amplitude`.
LipschitzReport lipschitz_probe(const ReductionWorkspace& ws, int pairs, double amplitude, std::uint64_t seed);

}  // namespace lojvar
