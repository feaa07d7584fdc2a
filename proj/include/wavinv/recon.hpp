#pragma once

// Reconstruction from complete spectral data: length and a1 from eigenvalue asymptotics,
// q from the Gelfand-Levitan equation, H from the a1 identity.
//
// Asymptotics (nu = n for Robin, n + 1/2 for Dirichlet):
//   sqrt(l_n) = nu pi / l + a1 / (nu pi) + O(nu^-3),
//   a1 = h + H + 1/2 int q   (Robin),   a1 = H + 1/2 int q   (Dirichlet).

#include <cstddef>
#include <string>
#include <vector>

#include "wavinv/core_model.hpp"

namespace wavinv {

/// Richardson-extrapolated limit of nu pi / sqrt(l_n). Throws NumericError if the tail of the
/// sequence is not monotone.
double estimate_length(const SpectralData& data, BoundaryVariant variant);

/// a1 = (pi / l) * lim nu (l sqrt(l_n) - nu pi), Richardson-extrapolated.
double estimate_a1(const SpectralData& data, double ell_hat, BoundaryVariant variant);

/// H = a1 - h - 1/2 int q  (h ignored for Dirichlet).
double recover_H(double a1_hat, double h_known, double q_integral, BoundaryVariant variant);
/// Same, with int q from the trapezoid rule over q_hat, which must cover [0, ell_hat].
double recover_H(double a1_hat, double h_known, const PiecewiseLinear& q_hat, double ell_hat,
                 BoundaryVariant variant);

struct GlOptions {
  double margin = 0.9;          // q_hat reported on [0, margin * ell_hat]
  std::size_t nodes = 181;      // grid nodes on that interval
  double residual_tolerance = 1e-8;
};

struct GlResult {
  UniformGrid grid;
  std::vector<double> kernel_diagonal;  // K(x,x) on grid
  std::vector<double> q_hat;
  double h_hat = 0.0;
  double q_integral = 0.0;  // int_0^ell q from K(ell,ell)
  double shift = 0.0;       // constant removed from the data before solving
  double tail_coefficient = 0.0;  // c in the weight asymptotics used for the truncation correction
  double min_rcond = 0.0;
  double max_residual = 0.0;  // max relative algebraic residual over rows
  std::size_t modes = 0;
};

/// Gelfand-Levitan reconstruction with a separable kernel. F is built against the free problem
/// on [0, ell_hat] (Neumann or Dirichlet at 0, Neumann at ell_hat), after shifting the data by
/// a constant so that its eigenvalues approach the reference ones. The modes beyond the data
/// are accounted for to first order: their weight differences follow c/k_n^2, and the missing
/// sawtooth-type tail would otherwise leave an O(c) layer in q_hat at both ends.
GlResult gl_reconstruct(const SpectralData& data, double ell_hat, BoundaryVariant variant,
                        const GlOptions& options = {});

/// K(x,x) at a single point, with the same construction as gl_reconstruct.
double gl_kernel_diagonal(const SpectralData& data, double ell_hat, BoundaryVariant variant, double x);

struct ReconstructionReport {
  BoundaryVariant variant = BoundaryVariant::RobinAtZero;
  double ell_hat = 0.0;
  double a1_hat = 0.0;
  double H_hat = 0.0;
  double h_hat = 0.0;
  double h_known = 0.0;
  GlResult gl;
  double prefix_mismatch = 0.0;  // max |q_hat - q| on the known prefix
  std::vector<std::string> flags;
};

struct ReconOptions {
  GlOptions gl;
  double h_tolerance = 0.05;
};

/// Full pipeline. For Robin input a recovered h differing from the known one by more than
/// h_tolerance is a NumericError.
ReconstructionReport reconstruct(const KnownPrefix& prefix, const SpectralData& data,
                                 const ReconOptions& options = {});

}  // namespace wavinv
