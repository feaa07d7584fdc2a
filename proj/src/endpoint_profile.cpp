#include "wavinv/endpoint_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wavinv/transmutation.hpp"
#include "wavinv/wave_trace.hpp"

namespace wavinv {
namespace {

constexpr double kPi = std::numbers::pi;

// sum_{k>=0} (a+k)^-s for a >= 8, Euler-Maclaurin with the remainder starting at a.
double hurwitz_zeta(double s, double a) {
  double sum = 0.0;
  constexpr int kDirect = 8;
  for (int k = 0; k < kDirect; ++k) sum += std::pow(a + k, -s);
  const double b = a + kDirect;
  sum += std::pow(b, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(b, -s);
  // Bernoulli corrections B2/2!, B4/4!, B6/4!, B8/8!
  constexpr double coef[] = {1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0};
  double rising = s;  // s (s+1) ... (s+2m-2)
  double power = std::pow(b, -s - 1.0);
  for (int m = 0; m < 4; ++m) {
    sum += coef[m] * rising * power;
    rising *= (s + 2.0 * m + 1.0) * (s + 2.0 * m + 2.0);
    power /= b * b;
  }
  return sum;
}

}  // namespace

BoundaryFunction::BoundaryFunction(std::vector<double> eigenvalues, double ell, BoundaryVariant variant)
    : lambda_(std::move(eigenvalues)), ell_(ell), variant_(variant) {
  if (lambda_.size() < 10) throw ValidationError("BoundaryFunction needs at least 10 eigenvalues");
  if (!(ell_ > 0.0)) throw ValidationError("BoundaryFunction needs ell > 0");
  for (std::size_t i = 1; i < lambda_.size(); ++i)
    if (!(lambda_[i] > lambda_[i - 1])) throw ValidationError("eigenvalues must be strictly increasing");
  // l_n - k_n^2 -> c + e/k_n^2; two-point extrapolation.
  const std::size_t a = lambda_.size() - 1, b = lambda_.size() / 2;
  const double ka = k_sq(a), kb = k_sq(b);
  shift_ = (ka * (lambda_[a] - ka) - kb * (lambda_[b] - kb)) / (ka - kb);
}

double BoundaryFunction::k_sq(std::size_t n) const {
  const double nu = static_cast<double>(n) + (variant_ == BoundaryVariant::DirichletAtZero ? 0.5 : 0.0);
  const double k = nu * kPi / ell_;
  return k * k;
}

BoundaryFunction::LogValue BoundaryFunction::log_tail(double lambda) const {
  // prod_{n>=N} (1 - z/k_n^2), z = lambda - c
  const double z = lambda - shift_;
  const double off = variant_ == BoundaryVariant::DirichletAtZero ? 0.5 : 0.0;
  const std::size_t N = lambda_.size();
  const double root = std::sqrt(std::abs(z)) * ell_ / kPi;
  const auto M = std::max<std::size_t>(N, static_cast<std::size_t>(2.0 * root) + 16);
  LogValue out;
  for (std::size_t n = N; n < M; ++n) {
    const double f = 1.0 - z / k_sq(n);
    if (f == 0.0) return {-std::numeric_limits<double>::infinity(), 1};
    out.log_abs += std::log(std::abs(f));
    if (f < 0.0) out.sign = -out.sign;
  }
  // log(1 - beta/u^2) = -sum_j beta^j / (j u^{2j}), u = n + off >= M + off, |beta/u^2| <= 1/4
  const double beta = z * ell_ * ell_ / (kPi * kPi);
  const double a = static_cast<double>(M) + off;
  double bj = 1.0;
  for (int j = 1; j <= 60; ++j) {
    bj *= beta;
    const double term = bj / j * hurwitz_zeta(2.0 * j, a);
    out.log_abs -= term;
    if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(out.log_abs))) break;
  }
  return out;
}

BoundaryFunction::LogValue BoundaryFunction::log_product(double lambda, std::size_t skip) const {
  LogValue out = log_tail(lambda);
  for (std::size_t n = 0; n < lambda_.size(); ++n) {
    if (n == skip) continue;
    double f;
    if (n == 0 && variant_ == BoundaryVariant::RobinAtZero) f = ell_ * (lambda_[0] - lambda);
    else f = (lambda_[n] - lambda) / k_sq(n);
    if (f == 0.0) return {-std::numeric_limits<double>::infinity(), 1};
    out.log_abs += std::log(std::abs(f));
    if (f < 0.0) out.sign = -out.sign;
  }
  return out;
}

double BoundaryFunction::operator()(double lambda) const {
  const LogValue v = log_product(lambda, lambda_.size());
  return v.sign * std::exp(v.log_abs);
}

double BoundaryFunction::derivative_at_zero(std::size_t m) const {
  if (m >= lambda_.size()) throw ValidationError("phi_prime: index beyond the supplied eigenvalues");
  const LogValue v = log_product(lambda_[m], m);
  const double dfactor = (m == 0 && variant_ == BoundaryVariant::RobinAtZero) ? -ell_ : -1.0 / k_sq(m);
  return dfactor * v.sign * std::exp(v.log_abs);
}

double phi(const BoundaryFunction& bf, double lambda) { return bf(lambda); }
double phi_prime(const BoundaryFunction& bf, std::size_t m) { return bf.derivative_at_zero(m); }

double norming_from_phi(const BoundaryFunction& bf, std::size_t m, double y_at_ell) {
  return -y_at_ell * bf.derivative_at_zero(m);
}

Trace far_end_profile(const std::vector<double>& eigenvalues, double epsilon, double ell_hat,
                      BoundaryVariant variant, const UniformGrid& t_grid, std::size_t N) {
  std::vector<double> lam = eigenvalues;
  if (N > 0 && N < lam.size()) lam.resize(N);
  const BoundaryFunction bf(lam, ell_hat, variant);
  Trace out;
  out.channel = Channel::UL;
  out.t0 = t_grid.x0;
  out.dt = t_grid.dx;
  out.samples.assign(t_grid.size, 0.0);
  for (std::size_t n = 0; n < lam.size(); ++n) {
    const double amp = -b_closed_form(lam[n], epsilon, variant) / bf.derivative_at_zero(n);
    for (std::size_t i = 0; i < t_grid.size; ++i) out.samples[i] += amp * mode_time_function(lam[n], t_grid.at(i));
  }
  return out;
}

Trace far_end_profile(const SpectralData& data, double epsilon, double ell_hat, BoundaryVariant variant,
                      const UniformGrid& t_grid, std::size_t N) {
  return far_end_profile(data.lambdas(), epsilon, ell_hat, variant, t_grid, N);
}

}  // namespace wavinv
