#pragma once

// Transmutation kernels on the triangle 0 <= t <= x <= epsilon and the compactly supported
// initial velocity whose Fourier coefficients are known in closed form.
//
// Robin:     cos(x sqrt(l))         = y(x,l)   + int_0^x H(x,t) y(t,l)   dt
// Dirichlet: sin(x sqrt(l))/sqrt(l) = phi(x,l) + int_0^x L(x,t) phi(t,l) dt
//
// The kernel solves the Goursat problem
//   K_xx - K_tt = -q(t) K,   K(x,x) = -h - 1/2 int_0^x q   (h := 0 for Dirichlet),
//   K_t(x,0) = h K(x,0)  (Robin)   or   K(x,0) = 0  (Dirichlet).

#include <cstddef>
#include <span>
#include <vector>

#include "wavinv/core_model.hpp"

namespace wavinv {

class TransmutationKernel {
 public:
  TransmutationKernel(LeftBoundary left, double epsilon, std::size_t intervals, std::vector<double> values);

  BoundaryVariant variant() const { return left_.variant(); }
  const LeftBoundary& left() const { return left_; }
  double epsilon() const { return epsilon_; }
  std::size_t intervals() const { return intervals_; }
  double delta() const { return epsilon_ / static_cast<double>(intervals_); }
  /// Kernel at grid node x = i*delta, t = j*delta, j <= i.
  double at(std::size_t i, std::size_t j) const { return values_[i * (i + 1) / 2 + j]; }

 private:
  LeftBoundary left_;
  double epsilon_;
  std::size_t intervals_;
  std::vector<double> values_;
};

struct KernelOptions {
  std::size_t intervals = 200;
  /// Max identity residual accepted over lambda in {0, 1, 4, 25}; <= 0 disables the check.
  double tolerance = 1e-6;
};

/// Characteristic (diamond) marching at two resolutions combined by Richardson extrapolation.
/// Throws NumericError if the identity residual exceeds the tolerance.
TransmutationKernel compute_kernel(const KnownPrefix& prefix, const KernelOptions& options = {});

/// max_x |y + int H y - cos| (or the Dirichlet analogue) on the kernel grid, one value per lambda.
std::vector<double> kernel_identity_residual(const KnownPrefix& prefix, const TransmutationKernel& kernel,
                                             std::span<const double> lambdas);

/// (x-eps)^2 on [0,eps] for Robin, (eps-x) on [0,eps] for Dirichlet, 0 beyond.
double psi(double x, double epsilon, BoundaryVariant variant);

struct InitialCondition {
  UniformGrid grid;              // samples on the [0, l] grid
  std::vector<double> samples;
  double support_end = 0.0;      // epsilon
  UniformGrid support_grid;      // kernel grid over [0, epsilon]
  std::vector<double> support_samples;

  /// Cubic interpolation on the support grid; exactly 0 for x >= epsilon.
  double operator()(double x) const;
};

InitialCondition build_g(const KnownPrefix& prefix, const TransmutationKernel& kernel,
                         const UniformGrid& ell_grid);

/// Closed-form transform of psi against cos(x sqrt(l)) (Robin) or sin(x sqrt(l))/sqrt(l) (Dirichlet):
///   Robin:     2 (e k - sin e k) / k^3
///   Dirichlet:   (e k - sin e k) / k^3,    k = sqrt(lambda)
/// continued analytically to lambda <= 0.
double b_closed_form(double lambda, double epsilon, BoundaryVariant variant);

/// int_0^eps g(x) y(x, lambda) dx, integrated on the support grid refined to the IVP step.
double fourier_coefficient(const KnownPrefix& prefix, const InitialCondition& g, double lambda);
double fourier_coefficient(const Scenario& s, const InitialCondition& g, double lambda);

/// cos(x sqrt(l)) or sin(x sqrt(l))/sqrt(l), continued to l <= 0.
double free_solution(double x, double lambda, BoundaryVariant variant);

}  // namespace wavinv
