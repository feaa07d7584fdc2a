#include "wavinv/wave_trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wavinv/sl_forward.hpp"
#include "wavinv/transmutation.hpp"

namespace wavinv {
namespace {

constexpr double kPi = std::numbers::pi;

// Robin tail: |b| <= 2 (eps w + 1)/w^3 and alpha^2 stays near l/2, so the omitted amplitudes
// b/(alpha^2 w) are summed along the asymptotic frequency ladder w_j = w_last + j*spacing.
double robin_tail_bound(const ModalCoefficients& m, double length) {
  const double w_last = std::sqrt(std::max(m.lambda.back(), 0.0));
  const double alpha = 0.5 * std::min(m.alpha_sq.back(), 0.5 * length);
  const double spacing = 0.9 * kPi / length;
  auto term = [&](double w) { return 2.0 * (m.epsilon * w + 1.0) / (alpha * w * w * w * w); };
  double sum = 0.0;
  constexpr int kExplicit = 100000;
  for (int j = 1; j <= kExplicit; ++j) sum += term(w_last + j * spacing);
  // Remaining terms dominated by the integral of 2(eps w + 1)/(alpha w^4) over the ladder.
  const double w_end = w_last + kExplicit * spacing;
  sum += (m.epsilon / (w_end * w_end) + 2.0 / (3.0 * w_end * w_end * w_end)) / (alpha * spacing);
  return sum;
}

double hermite(double x0, double h, double y0, double y1, double p0, double p1, double x) {
  const double s = (x - x0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * p0 + (-2 * s3 + 3 * s2) * y1 +
         (s3 - s2) * h * p1;
}

}  // namespace

ModalCoefficients modal_coefficients(const Scenario& s, std::size_t N) {
  validate_scenario(s);
  const auto modes = eigenvalues(s, N);
  return modal_coefficients(spectral_data(modes), s.epsilon, s.variant());
}

ModalCoefficients modal_coefficients(const SpectralData& data, double epsilon, BoundaryVariant variant) {
  ModalCoefficients m;
  m.variant = variant;
  m.epsilon = epsilon;
  for (const auto& e : data.entries()) {
    m.lambda.push_back(e.lambda);
    m.alpha_sq.push_back(e.alpha_sq);
    m.b.push_back(b_closed_form(e.lambda, epsilon, variant));
  }
  return m;
}

double mode_time_function(double lambda, double t) {
  if (lambda > 0.0) {
    const double w = std::sqrt(lambda);
    return std::sin(w * t) / w;
  }
  if (lambda == 0.0) return t;
  const double w = std::sqrt(-lambda);
  return std::sinh(w * t) / w;
}

UniformGrid time_grid(double duration, double dt) {
  if (!(dt > 0.0) || !(duration > 0.0)) throw ValidationError("time grid needs dt > 0 and duration > 0");
  const auto steps = static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
  return {0.0, dt, steps + 1};
}

UniformGrid default_time_grid(double lambda_max, double length) {
  const double w = std::sqrt(std::max(lambda_max, 1.0));
  return time_grid(40.0 * length, kPi / (8.0 * w));
}

SynthesizedTrace synthesize_trace(const ModalCoefficients& modal, const UniformGrid& t_grid, double length) {
  if (modal.size() == 0) throw ValidationError("synthesize_trace: N must be >= 1");
  SynthesizedTrace out;
  out.trace.channel = modal.variant == BoundaryVariant::RobinAtZero ? Channel::U0 : Channel::Ux0;
  out.trace.t0 = t_grid.x0;
  out.trace.dt = t_grid.dx;
  out.trace.samples.assign(t_grid.size, 0.0);
  for (std::size_t n = 0; n < modal.size(); ++n) {
    const double amp = modal.b[n] / modal.alpha_sq[n];
    for (std::size_t i = 0; i < t_grid.size; ++i)
      out.trace.samples[i] += amp * mode_time_function(modal.lambda[n], t_grid.at(i));
  }
  out.negative_mode = modal.has_negative_modes();
  out.tail_bound = modal.variant == BoundaryVariant::RobinAtZero ? robin_tail_bound(modal, length)
                                                                  : std::numeric_limits<double>::infinity();
  return out;
}

SynthesizedTrace synthesize_trace(const Scenario& s, std::size_t N, const UniformGrid& t_grid) {
  return synthesize_trace(modal_coefficients(s, N), t_grid, s.length);
}

SynthesizedTrace synthesize_trace(const Scenario& s, std::size_t N) {
  const ModalCoefficients m = modal_coefficients(s, N);
  return synthesize_trace(m, default_time_grid(m.lambda.back(), s.length), s.length);
}

double eigenfunction_value(const Scenario& s, double lambda, double x) {
  if (x < 0.0 || x > s.length * (1.0 + 1e-12)) throw ValidationError("x outside [0, l]");
  if (x == 0.0) return s.left.is_robin() ? 1.0 : 0.0;
  const IvpSolution sol = solve_ivp(s, lambda, s.length);
  const double h = sol.grid.dx;
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(x / h), sol.y.size() - 2);
  return hermite(sol.grid.at(i), h, sol.y[i], sol.y[i + 1], sol.y_prime[i], sol.y_prime[i + 1], x);
}

Trace field_at(const Scenario& s, double x, const UniformGrid& t_grid, std::size_t N) {
  validate_scenario(s);
  if (x < 0.0 || x > s.length * (1.0 + 1e-12)) throw ValidationError("field_at: x outside [0, l]");
  const auto modes = eigenvalues(s, N);
  Trace out;
  const bool at_end = std::abs(x - s.length) <= 1e-12 * s.length;
  out.channel = x == 0.0 ? Channel::U0 : (at_end ? Channel::UL : Channel::Interior);
  out.t0 = t_grid.x0;
  out.dt = t_grid.dx;
  out.samples.assign(t_grid.size, 0.0);
  for (const auto& m : modes) {
    const double y = at_end ? m.y_at_ell : eigenfunction_value(s, m.lambda, x);
    const double amp = b_closed_form(m.lambda, s.epsilon, s.variant()) * y / m.alpha_sq;
    for (std::size_t i = 0; i < t_grid.size; ++i) out.samples[i] += amp * mode_time_function(m.lambda, t_grid.at(i));
  }
  return out;
}

std::complex<double> laplace_of_trace(const ModalCoefficients& modal, std::complex<double> s) {
  std::complex<double> sum = 0.0;
  for (std::size_t n = 0; n < modal.size(); ++n) {
    const double lam = modal.lambda[n];
    const std::complex<double> pole =
        lam >= 0.0 ? std::complex<double>(0.0, std::sqrt(lam)) : std::complex<double>(std::sqrt(-lam), 0.0);
    if (std::abs(s - pole) < 1e-9 || std::abs(s + pole) < 1e-9)
      throw ValidationError("laplace_of_trace: s is within 1e-9 of a pole");
    sum += modal.b[n] / (modal.alpha_sq[n] * (s * s + lam));
  }
  return sum;
}

}  // namespace wavinv
