#pragma once

// Forward Sturm-Liouville solver for -y'' + q y = lambda y on [0, l] with
//   y(0) = 1, y'(0) = h      (Robin at zero)
//   y(0) = 0, y'(0) = 1      (Dirichlet at zero)
// and eigenvalues defined by y'(l) + H y(l) = 0.

#include <cstddef>
#include <span>
#include <vector>

#include "wavinv/core_model.hpp"

namespace wavinv {

/// Solution of the initial-value problem on a uniform integration grid. The grid is the
/// caller's grid refined by `stride` substeps, so caller node i sits at index i*stride.
struct IvpSolution {
  double lambda = 0.0;
  UniformGrid grid;
  std::size_t stride = 1;
  std::vector<double> y;
  std::vector<double> y_prime;

  double y_end() const { return y.back(); }
  double y_prime_end() const { return y_prime.back(); }
  /// y restricted to the caller's (unrefined) grid.
  std::vector<double> coarse_y() const;
};

/// Fixed-step RK4 with power-of-two substeps so that sqrt(max|lambda-q|)*step <= 0.04.
IvpSolution solve_ivp(const LeftBoundary& left, const PiecewiseLinear& q, double lambda,
                      double x_max, std::size_t intervals);
/// Integrates on the scenario grid up to x_max (rounded to the nearest grid node when interior).
IvpSolution solve_ivp(const Scenario& s, double lambda, double x_max);
/// x_max must not exceed epsilon.
IvpSolution solve_ivp(const KnownPrefix& p, double lambda, double x_max, std::size_t intervals = 200);

struct EigenResult {
  std::size_t index = 0;
  double lambda = 0.0;
  double alpha_sq = 0.0;
  double y_at_ell = 0.0;
  double y_prime_at_ell = 0.0;
};

/// First `count` eigenvalues in increasing order, each verified by its oscillation count.
std::vector<EigenResult> eigenvalues(const Scenario& s, std::size_t count);

SpectralData spectral_data(const std::vector<EigenResult>& modes);

/// Number of sign changes of y on the open interval (0, l).
std::size_t count_interior_zeros(const IvpSolution& sol);

/// alpha^2 = int_0^l y(x, lambda_n)^2 dx. Throws ValidationError if lambda_n is not an eigenvalue.
double norming_constant(const Scenario& s, double lambda_n);

/// Boundary function y'(l, lambda) + H y(l, lambda) computed by shooting.
double boundary_function(const Scenario& s, double lambda);

/// int_0^l g(x) y(x, lambda) dx for g sampled on the scenario grid.
double fourier_coefficient(const Scenario& s, std::span<const double> g, double lambda);

}  // namespace wavinv
