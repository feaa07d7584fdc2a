#include "wavinv/transmutation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "wavinv/quadrature.hpp"
#include "wavinv/sl_forward.hpp"

namespace wavinv {
namespace {

// One marching pass of the diamond scheme on a grid of `n` intervals.
std::vector<double> march(const KnownPrefix& prefix, std::size_t n) {
  const double eps = prefix.epsilon;
  const double d = eps / static_cast<double>(n);
  const bool robin = prefix.left.is_robin();
  const double h = robin ? prefix.left.h() : 0.0;
  const PiecewiseLinear& q = prefix.q;

  auto diag = [&](double x) { return -h - 0.5 * q.integral(0.0, std::min(x, eps)); };
  auto idx = [](std::size_t i, std::size_t j) { return i * (i + 1) / 2 + j; };

  std::vector<double> K((n + 1) * (n + 2) / 2, 0.0);
  K[idx(0, 0)] = diag(0.0);
  K[idx(1, 1)] = diag(d);
  if (robin) {
    // Taylor expansion at the corner from the diagonal and boundary relations.
    const double q0 = q(0.0);
    const double dq0 = (q(d) - q0) / d;
    const double hx = -0.5 * q0 + h * h;
    const double hxx = 0.5 * (-0.5 * dq0 + q0 * h - 2.0 * h * hx);
    K[idx(1, 0)] = -h + d * hx + 0.5 * d * d * hxx;
  }

  std::vector<double> qt(n + 1);
  for (std::size_t j = 0; j <= n; ++j) qt[j] = q(static_cast<double>(j) * d);

  for (std::size_t i = 1; i < n; ++i) {
    const double x_next = static_cast<double>(i + 1) * d;
    K[idx(i + 1, i + 1)] = diag(x_next);

    // Half cell touching the diagonal.
    {
      const double a = K[idx(i, i - 1)];
      const double b = diag((static_cast<double>(i) + 0.5) * d);
      const double c = diag((static_cast<double>(i) - 0.5) * d);
      const double w = d * d * q((static_cast<double>(i) - 0.25) * d) / 8.0;
      K[idx(i + 1, i)] = (a + b - c - w * (a + b + c)) / (1.0 + w);
    }

    for (std::size_t j = 1; j + 1 <= i; ++j) {
      K[idx(i + 1, j)] = K[idx(i, j + 1)] + K[idx(i, j - 1)] - K[idx(i - 1, j)] -
                         d * d * qt[j] * K[idx(i, j)];
    }

    if (robin) {
      const double ghost = K[idx(i, 1)] - 2.0 * d * h * K[idx(i, 0)];
      K[idx(i + 1, 0)] = K[idx(i, 1)] + ghost - K[idx(i - 1, 0)] - d * d * qt[0] * K[idx(i, 0)];
    } else {
      K[idx(i + 1, 0)] = 0.0;
    }
  }
  return K;
}

double cubic_lagrange(std::span<const double> v, double h, double x) {
  const std::size_t n = v.size();
  const double s = x / h;
  auto i0 = static_cast<std::ptrdiff_t>(std::floor(s)) - 1;
  i0 = std::clamp<std::ptrdiff_t>(i0, 0, static_cast<std::ptrdiff_t>(n) - 4);
  double out = 0.0;
  for (std::ptrdiff_t a = 0; a < 4; ++a) {
    double w = 1.0;
    for (std::ptrdiff_t b = 0; b < 4; ++b)
      if (b != a) w *= (s - static_cast<double>(i0 + b)) / static_cast<double>(a - b);
    out += w * v[static_cast<std::size_t>(i0 + a)];
  }
  return out;
}

}  // namespace

TransmutationKernel::TransmutationKernel(LeftBoundary left, double epsilon, std::size_t intervals,
                                         std::vector<double> values)
    : left_(left), epsilon_(epsilon), intervals_(intervals), values_(std::move(values)) {
  if (values_.size() != (intervals_ + 1) * (intervals_ + 2) / 2)
    throw ValidationError("kernel values do not fill the triangular grid");
}

double free_solution(double x, double lambda, BoundaryVariant variant) {
  if (variant == BoundaryVariant::RobinAtZero) {
    if (lambda >= 0.0) return std::cos(x * std::sqrt(lambda));
    return std::cosh(x * std::sqrt(-lambda));
  }
  if (lambda > 0.0) {
    const double k = std::sqrt(lambda);
    return x * sinc(k * x);
  }
  if (lambda == 0.0) return x;
  const double k = std::sqrt(-lambda);
  const double z = k * x;
  return std::abs(z) < 1e-4 ? x * (1.0 + z * z / 6.0) : std::sinh(z) / k;
}

TransmutationKernel compute_kernel(const KnownPrefix& prefix, const KernelOptions& options) {
  validate_prefix(prefix);
  const std::size_t n = options.intervals;
  if (n < 4) throw ValidationError("kernel grid needs at least 4 intervals");
  const std::vector<double> coarse = march(prefix, n);
  const std::vector<double> fine = march(prefix, 2 * n);
  std::vector<double> values(coarse.size());
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const std::size_t c = i * (i + 1) / 2 + j;
      const std::size_t f = (2 * i) * (2 * i + 1) / 2 + 2 * j;
      values[c] = (4.0 * fine[f] - coarse[c]) / 3.0;
    }
  TransmutationKernel kernel(prefix.left, prefix.epsilon, n, std::move(values));

  if (options.tolerance > 0.0) {
    constexpr std::array<double, 4> probe{0.0, 1.0, 4.0, 25.0};
    const auto residual = kernel_identity_residual(prefix, kernel, probe);
    if (*std::max_element(residual.begin(), residual.end()) > options.tolerance) {
      std::ostringstream msg;
      msg << "compute_kernel: identity residual above " << options.tolerance << " (";
      for (std::size_t i = 0; i < probe.size(); ++i)
        msg << (i ? ", " : "") << "lambda=" << probe[i] << ": " << residual[i];
      msg << ")";
      throw NumericError(msg.str());
    }
  }
  return kernel;
}

std::vector<double> kernel_identity_residual(const KnownPrefix& prefix, const TransmutationKernel& kernel,
                                             std::span<const double> lambdas) {
  const std::size_t n = kernel.intervals();
  const double d = kernel.delta();
  std::vector<double> out;
  std::vector<double> row;
  for (double lambda : lambdas) {
    const IvpSolution sol = solve_ivp(prefix, lambda, prefix.epsilon, n);
    const std::vector<double> y = sol.coarse_y();
    double worst = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      row.assign(i + 1, 0.0);
      for (std::size_t j = 0; j <= i; ++j) row[j] = kernel.at(i, j) * y[j];
      const double x = static_cast<double>(i) * d;
      const double lhs = y[i] + integrate_uniform(row, d);
      worst = std::max(worst, std::abs(lhs - free_solution(x, lambda, kernel.variant())));
    }
    out.push_back(worst);
  }
  return out;
}

double psi(double x, double epsilon, BoundaryVariant variant) {
  if (x < 0.0 || x > epsilon) return 0.0;
  return variant == BoundaryVariant::RobinAtZero ? (x - epsilon) * (x - epsilon) : (epsilon - x);
}

double InitialCondition::operator()(double x) const {
  if (x >= support_end || x < 0.0) return 0.0;
  return cubic_lagrange(support_samples, support_grid.dx, x);
}

InitialCondition build_g(const KnownPrefix& prefix, const TransmutationKernel& kernel,
                         const UniformGrid& ell_grid) {
  if (kernel.variant() != prefix.variant()) throw ValidationError("build_g: kernel variant does not match prefix");
  const std::size_t n = kernel.intervals();
  const double d = kernel.delta();
  const double eps = kernel.epsilon();
  InitialCondition g;
  g.support_end = eps;
  g.support_grid = {0.0, d, n + 1};
  g.support_samples.resize(n + 1);
  std::vector<double> col;
  for (std::size_t i = 0; i <= n; ++i) {
    col.clear();
    for (std::size_t k = i; k <= n; ++k)
      col.push_back(kernel.at(k, i) * psi(static_cast<double>(k) * d, eps, prefix.variant()));
    g.support_samples[i] = psi(static_cast<double>(i) * d, eps, prefix.variant()) + integrate_uniform(col, d);
  }
  g.support_samples[n] = 0.0;
  g.grid = ell_grid;
  g.samples.resize(ell_grid.size);
  for (std::size_t i = 0; i < ell_grid.size; ++i) g.samples[i] = g(ell_grid.at(i));
  return g;
}

double b_closed_form(double lambda, double epsilon, BoundaryVariant variant) {
  const double scale = variant == BoundaryVariant::RobinAtZero ? 2.0 : 1.0;
  const double z = epsilon * std::sqrt(std::abs(lambda));
  if (z < 0.1) {
    // (z - sin z)/k^3 as a series in lambda = k^2, valid on both sides of zero.
    const double e3 = epsilon * epsilon * epsilon;
    const double e2 = epsilon * epsilon;
    const double series = e3 / 6.0 - e3 * e2 * lambda / 120.0 + e3 * e2 * e2 * lambda * lambda / 5040.0 -
                          e3 * e2 * e2 * e2 * lambda * lambda * lambda / 362880.0;
    return scale * series;
  }
  const double k = std::sqrt(std::abs(lambda));
  if (lambda > 0.0) return scale * (z - std::sin(z)) / (k * k * k);
  return scale * (std::sinh(z) - z) / (k * k * k);
}

double fourier_coefficient(const KnownPrefix& prefix, const InitialCondition& g, double lambda) {
  const std::size_t n = g.support_grid.intervals();
  const IvpSolution sol = solve_ivp(prefix, lambda, g.support_end, n);
  std::vector<double> gv(sol.y.size());
  for (std::size_t i = 0; i < gv.size(); ++i) {
    if (i % sol.stride == 0) {
      gv[i] = g.support_samples[i / sol.stride];
    } else {
      gv[i] = cubic_lagrange(g.support_samples, g.support_grid.dx, sol.grid.at(i));
    }
  }
  return integrate_product(gv, sol.y, sol.grid.dx);
}

double fourier_coefficient(const Scenario& s, const InitialCondition& g, double lambda) {
  return fourier_coefficient(known_prefix_of(s), g, lambda);
}

}  // namespace wavinv
