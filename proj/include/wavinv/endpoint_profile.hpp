#pragma once

// The boundary function Phi(l) = y'(l,l) + H y(l,l) rebuilt from its zeros alone:
//   Robin:     Phi(l) = ell (l_0 - l) prod_{n>=1} (l_n - l) / k_n^2,       k_n = n pi / ell
//   Dirichlet: Phi(m) =               prod_{n>=0} (m_n - m) / k_n^2,       k_n = (n + 1/2) pi / ell
// Factors beyond the data use k_n^2 + c with c the limit of l_n - k_n^2.
// Since alpha_n^2 = -y(ell, l_n) Phi'(l_n), the far-end trace is
//   u(ell, t) = -sum_n b(l_n) sin(t sqrt(l_n)) / (sqrt(l_n) Phi'(l_n)),
// which needs no knowledge of q.

#include <cstddef>
#include <vector>

#include "wavinv/core_model.hpp"

namespace wavinv {

class BoundaryFunction {
 public:
  /// Needs at least 10 eigenvalues, strictly increasing.
  BoundaryFunction(std::vector<double> eigenvalues, double ell, BoundaryVariant variant);

  double operator()(double lambda) const;
  /// Derivative at the m-th zero: derivative of factor m times all other factors.
  double derivative_at_zero(std::size_t m) const;

  std::size_t size() const { return lambda_.size(); }
  double ell() const { return ell_; }
  double tail_shift() const { return shift_; }
  BoundaryVariant variant() const { return variant_; }
  const std::vector<double>& eigenvalues() const { return lambda_; }

 private:
  struct LogValue {
    double log_abs = 0.0;
    int sign = 1;
  };
  LogValue log_product(double lambda, std::size_t skip) const;
  LogValue log_tail(double lambda) const;
  double k_sq(std::size_t n) const;

  std::vector<double> lambda_;
  double ell_;
  BoundaryVariant variant_;
  double shift_ = 0.0;
};

double phi(const BoundaryFunction& bf, double lambda);
double phi_prime(const BoundaryFunction& bf, std::size_t m);

/// -y(ell, l_m) Phi'(l_m) as predicted from the eigenvalues; equals alpha_m^2.
double norming_from_phi(const BoundaryFunction& bf, std::size_t m, double y_at_ell);

/// u(ell, t) on t_grid from the first N eigenvalues (N = 0 uses all).
Trace far_end_profile(const std::vector<double>& eigenvalues, double epsilon, double ell_hat,
                      BoundaryVariant variant, const UniformGrid& t_grid, std::size_t N = 0);
Trace far_end_profile(const SpectralData& data, double epsilon, double ell_hat, BoundaryVariant variant,
                      const UniformGrid& t_grid, std::size_t N = 0);

}  // namespace wavinv
