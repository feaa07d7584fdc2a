#pragma once

// Modal synthesis of the boundary traces of u_tt = u_xx - q u with u(x,0) = 0, u_t(x,0) = g_eps:
//   u(x,t) = sum_n b_n y(x,l_n) / alpha_n^2 * sin(t sqrt(l_n)) / sqrt(l_n)
// Robin reads u(0,t) (y(0) = 1); Dirichlet reads u_x(0,t) (phi'(0) = 1), so both channels share
// the amplitude b_n / alpha_n^2.

#include <complex>
#include <cstddef>
#include <vector>

#include "wavinv/core_model.hpp"

namespace wavinv {

struct ModalCoefficients {
  BoundaryVariant variant = BoundaryVariant::RobinAtZero;
  double epsilon = 0.0;
  std::vector<double> lambda;
  std::vector<double> alpha_sq;
  std::vector<double> b;

  std::size_t size() const { return lambda.size(); }
  bool has_negative_modes() const { return !lambda.empty() && lambda.front() < 0.0; }
};

/// First N modes of s with b_n from the closed form.
ModalCoefficients modal_coefficients(const Scenario& s, std::size_t N);
ModalCoefficients modal_coefficients(const SpectralData& data, double epsilon, BoundaryVariant variant);

/// sin(t sqrt(l))/sqrt(l), continued through t at l = 0 and sinh at l < 0.
double mode_time_function(double lambda, double t);

/// dt with sqrt(l_max) dt <= pi/8, duration 40 l, 1 + ceil(T/dt) samples.
UniformGrid default_time_grid(double lambda_max, double length);
/// 1 + ceil(T/dt) samples starting at 0.
UniformGrid time_grid(double duration, double dt);

struct SynthesizedTrace {
  Trace trace;
  /// Bound on the sup-norm of the omitted modes; infinite when the tail is not absolutely summable
  /// (the Dirichlet u_x(0,t) series decays like 1/n).
  double tail_bound = 0.0;
  /// lambda_0 < 0 was synthesized with a sinh term.
  bool negative_mode = false;
};

SynthesizedTrace synthesize_trace(const ModalCoefficients& modal, const UniformGrid& t_grid, double length);
SynthesizedTrace synthesize_trace(const Scenario& s, std::size_t N, const UniformGrid& t_grid);
/// Uses default_time_grid for the N-th eigenvalue.
SynthesizedTrace synthesize_trace(const Scenario& s, std::size_t N);

/// u(x,t) as a partial sum over N modes; channel UL at x = l, U0 at x = 0, Interior otherwise.
Trace field_at(const Scenario& s, double x, const UniformGrid& t_grid, std::size_t N);

/// sum_n b_n / (alpha_n^2 (s^2 + l_n)). Throws ValidationError within 1e-9 of a pole.
std::complex<double> laplace_of_trace(const ModalCoefficients& modal, std::complex<double> s);

/// y(x, lambda) for the scenario's left condition, Hermite-interpolated from the shooting grid.
double eigenfunction_value(const Scenario& s, double lambda, double x);

}  // namespace wavinv
