#include "wavinv/sl_forward.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "wavinv/quadrature.hpp"

namespace wavinv {
namespace {

constexpr double kStepPhase = 0.04;  // max sqrt|lambda-q| * step
constexpr double kPi = std::numbers::pi;

// Integrates the IVP on [0, x_max] split into `intervals` base steps. Holds the potential
// sampled at every RK4 stage point for each substep level, since those do not depend on lambda.
class Shooter {
 public:
  Shooter(const LeftBoundary& left, const PiecewiseLinear& q, double x_max, std::size_t intervals)
      : left_(left), q_(q), x_max_(x_max), intervals_(intervals), q_abs_(q.max_abs()) {
    if (intervals_ == 0) throw ValidationError("solve_ivp needs at least one interval");
    if (!(x_max_ > 0.0)) throw ValidationError("solve_ivp needs x_max > 0");
    if (x_max_ > q_.back() * (1.0 + 1e-12) + 1e-14)
      throw ValidationError("x_max beyond q data (" + std::to_string(x_max_) + " > " +
                            std::to_string(q_.back()) + ")");
  }

  std::size_t substeps(double lambda) const {
    const double rate = std::sqrt(std::max(std::abs(lambda) + q_abs_, 1.0));
    const double h = x_max_ / static_cast<double>(intervals_);
    std::size_t m = 1;
    while (rate * h / static_cast<double>(m) > kStepPhase) {
      m *= 2;
      if (m > (1u << 24)) throw NumericError("solve_ivp: step-size underflow at lambda=" + std::to_string(lambda));
    }
    return m;
  }

  double y0() const { return left_.is_robin() ? 1.0 : 0.0; }
  double p0() const { return left_.is_robin() ? left_.h() : 1.0; }

  // Scaled Pruefer angle atan2(k y, y') at x_max. The angle cannot move backwards through a
  // multiple of pi, so it equals pi * (sign changes of y) plus its residue modulo pi.
  double angle(double lambda, double k) { return angle(lambda, k, substeps(lambda)); }

  double angle(double lambda, double k, std::size_t m) {
    const auto& qs = stage_potential(m);
    const std::size_t steps = intervals_ * m;
    const double h = x_max_ / static_cast<double>(steps);
    double y = y0();
    double p = p0();
    int last_sign = (y > 0.0) - (y < 0.0);
    std::size_t crossings = 0;
    for (std::size_t i = 0; i < steps; ++i) {
      rk4(y, p, lambda, h, qs[2 * i], qs[2 * i + 1], qs[2 * i + 2]);
      const double scale = std::abs(y) + std::abs(p);
      if (scale > 1e100) {
        y *= 1e-100;
        p *= 1e-100;
      }
      const int sgn = (y > 0.0) - (y < 0.0);
      if (sgn != 0) {
        if (last_sign != 0 && sgn != last_sign) ++crossings;
        last_sign = sgn;
      }
    }
    double residue = std::atan2(k * y, p);
    if (residue < 0.0) residue += kPi;
    if (y == 0.0) residue = 0.0;
    if (residue >= kPi) residue -= kPi;
    return static_cast<double>(crossings) * kPi + residue;
  }

  IvpSolution solve(double lambda) { return solve(lambda, substeps(lambda)); }

  IvpSolution solve(double lambda, std::size_t m) {
    const auto& qs = stage_potential(m);
    const std::size_t steps = intervals_ * m;
    const double h = x_max_ / static_cast<double>(steps);
    IvpSolution out;
    out.lambda = lambda;
    out.grid = {0.0, h, steps + 1};
    out.stride = m;
    out.y.resize(steps + 1);
    out.y_prime.resize(steps + 1);
    double y = y0();
    double p = p0();
    out.y[0] = y;
    out.y_prime[0] = p;
    for (std::size_t i = 0; i < steps; ++i) {
      rk4(y, p, lambda, h, qs[2 * i], qs[2 * i + 1], qs[2 * i + 2]);
      out.y[i + 1] = y;
      out.y_prime[i + 1] = p;
    }
    return out;
  }

 private:
  static void rk4(double& y, double& p, double lambda, double h, double qa, double qm, double qb) {
    const double k1y = p;
    const double k1p = (qa - lambda) * y;
    const double k2y = p + 0.5 * h * k1p;
    const double k2p = (qm - lambda) * (y + 0.5 * h * k1y);
    const double k3y = p + 0.5 * h * k2p;
    const double k3p = (qm - lambda) * (y + 0.5 * h * k2y);
    const double k4y = p + h * k3p;
    const double k4p = (qb - lambda) * (y + h * k3y);
    y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
  }

  const std::vector<double>& stage_potential(std::size_t m) {
    auto it = cache_.find(m);
    if (it != cache_.end()) return it->second;
    const std::size_t steps = intervals_ * m;
    std::vector<double> qs(2 * steps + 1);
    const double half = 0.5 * x_max_ / static_cast<double>(steps);
    for (std::size_t j = 0; j <= 2 * steps; ++j)
      qs[j] = q_(std::min(half * static_cast<double>(j), x_max_));
    return cache_.emplace(m, std::move(qs)).first->second;
  }

  LeftBoundary left_;
  const PiecewiseLinear& q_;
  double x_max_;
  std::size_t intervals_;
  double q_abs_;
  std::map<std::size_t, std::vector<double>> cache_;
};

std::size_t scenario_intervals(const Scenario& s, double x_max) {
  const double dx = s.grid().dx;
  const auto n = static_cast<std::size_t>(std::llround(x_max / dx));
  return std::max<std::size_t>(n, 1);
}

// Root of a monotone increasing mismatch inside [lo, hi] with f(lo) < 0 < f(hi):
// Illinois steps, falling back to bisection whenever the bracket fails to halve.
template <class F>
double refine_root(F&& f, double lo, double hi, double f_lo, double f_hi) {
  for (int it = 0; it < 300; ++it) {
    const double tol = std::max(1e-12, 1e-15 * std::max(std::abs(lo), std::abs(hi)));
    if (hi - lo <= tol) break;
    const double width = hi - lo;
    double x = hi - f_hi * (hi - lo) / (f_hi - f_lo);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    const double fx = f(x);
    if (fx == 0.0) return x;
    if (fx < 0.0) {
      lo = x;
      f_lo = fx;
      f_hi *= 0.5;
    } else {
      hi = x;
      f_hi = fx;
      f_lo *= 0.5;
    }
    if (hi - lo > 0.5 * width) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if (fm == 0.0) return mid;
      if (fm < 0.0) {
        lo = mid;
        f_lo = fm;
      } else {
        hi = mid;
        f_hi = fm;
      }
    }
  }
  return 0.5 * (lo + hi);
}

// Root with a fixed substep count, starting from a guess known to be close.
template <class F>
double root_near(F&& f, double guess) {
  double w = std::max(1e-9, 1e-7 * std::abs(guess));
  for (int it = 0; it < 40; ++it, w *= 4.0) {
    const double lo = guess - w;
    const double hi = guess + w;
    const double f_lo = f(lo);
    const double f_hi = f(hi);
    if (f_lo < 0.0 && f_hi > 0.0) return refine_root(f, lo, hi, f_lo, f_hi);
  }
  throw NumericError("eigenvalues: lost the root while refining the step size");
}

}  // namespace

std::vector<double> IvpSolution::coarse_y() const {
  std::vector<double> out;
  out.reserve(y.size() / stride + 1);
  for (std::size_t i = 0; i < y.size(); i += stride) out.push_back(y[i]);
  return out;
}

IvpSolution solve_ivp(const LeftBoundary& left, const PiecewiseLinear& q, double lambda,
                      double x_max, std::size_t intervals) {
  if (!std::isfinite(lambda)) throw ValidationError("lambda must be finite");
  Shooter shooter(left, q, x_max, intervals);
  return shooter.solve(lambda);
}

IvpSolution solve_ivp(const Scenario& s, double lambda, double x_max) {
  if (x_max > s.length * (1.0 + 1e-12)) throw ValidationError("x_max beyond q data");
  return solve_ivp(s.left, s.q, lambda, x_max, scenario_intervals(s, x_max));
}

IvpSolution solve_ivp(const KnownPrefix& p, double lambda, double x_max, std::size_t intervals) {
  if (x_max > p.epsilon * (1.0 + 1e-12)) throw ValidationError("x_max beyond q data");
  return solve_ivp(p.left, p.q, lambda, x_max, intervals);
}

std::size_t count_interior_zeros(const IvpSolution& sol) {
  std::size_t count = 0;
  int last = 0;
  for (std::size_t i = 1; i + 1 < sol.y.size(); ++i) {
    const int sgn = (sol.y[i] > 0.0) - (sol.y[i] < 0.0);
    if (sgn == 0) continue;
    if (last != 0 && sgn != last) ++count;
    last = sgn;
  }
  // A zero crossing inside the final interval still lies in (0, l).
  const double y_end = sol.y.back();
  const int sgn_end = (y_end > 0.0) - (y_end < 0.0);
  if (sgn_end != 0 && last != 0 && sgn_end != last) ++count;
  return count;
}

std::vector<EigenResult> eigenvalues(const Scenario& s, std::size_t count) {
  validate_scenario(s);
  if (count == 0) throw ValidationError("eigenvalues: count must be >= 1");
  const std::size_t intervals = s.grid().intervals();
  Shooter shooter(s.left, s.q, s.length, intervals);

  const double h = s.left.is_robin() ? s.left.h() : 0.0;
  double lambda_floor = -std::pow(std::abs(h) + std::abs(s.H) + s.q.max_abs() + 1.0, 2);
  const double offset = s.left.is_robin() ? 0.0 : 0.5;

  std::vector<EigenResult> out;
  out.reserve(count);
  double prev = lambda_floor;
  for (std::size_t n = 0; n < count; ++n) {
    const double nu = static_cast<double>(n) + offset;
    const double estimate = std::pow((nu + 0.5) * kPi / s.length, 2);
    const double k = std::sqrt(std::max(estimate, 1.0));
    const double beta = std::atan2(k, -s.H);
    const double target = beta + static_cast<double>(n) * kPi;

    double lo = prev;
    double f_lo = shooter.angle(lo, k) - target;
    int retries = 0;
    while (!(f_lo < 0.0)) {
      if (n > 0 || ++retries > 60) throw NumericError("eigenvalues: cannot bracket mode " + std::to_string(n) + " from below");
      lo = 2.0 * lo - 1.0;
      f_lo = shooter.angle(lo, k) - target;
    }
    double step = std::max(1.0, (2.0 * nu + 1.0) * kPi * kPi / (s.length * s.length));
    double hi = std::max(lo, 0.0) + step;
    double f_hi = shooter.angle(hi, k) - target;
    retries = 0;
    while (!(f_hi > 0.0)) {
      if (++retries > 100) throw NumericError("eigenvalues: cannot bracket mode " + std::to_string(n) + " from above");
      if (f_hi < 0.0) {
        lo = hi;
        f_lo = f_hi;
      }
      step *= 2.0;
      hi = lo + step;
      f_hi = shooter.angle(hi, k) - target;
    }
    const double coarse_root = refine_root([&](double x) { return shooter.angle(x, k) - target; }, lo, hi,
                                           f_lo, f_hi);
    // Richardson extrapolation over a step halving removes the leading RK4 phase error.
    const std::size_t m = shooter.substeps(coarse_root);
    const double lambda1 = root_near([&](double x) { return shooter.angle(x, k, m) - target; }, coarse_root);
    const double lambda2 = root_near([&](double x) { return shooter.angle(x, k, 2 * m) - target; }, lambda1);
    const double lambda = (16.0 * lambda2 - lambda1) / 15.0;
    const IvpSolution sol1 = shooter.solve(lambda1, m);
    const IvpSolution sol = shooter.solve(lambda2, 2 * m);
    const std::size_t zeros = count_interior_zeros(sol);
    if (zeros != n)
      throw NumericError("eigenvalues: mode " + std::to_string(n) + " has " + std::to_string(zeros) +
                         " interior zeros; a root was skipped");
    const double a1 = integrate_product(sol1.y, sol1.y, sol1.grid.dx);
    const double a2 = integrate_product(sol.y, sol.y, sol.grid.dx);
    EigenResult r;
    r.index = n;
    r.lambda = lambda;
    r.alpha_sq = (16.0 * a2 - a1) / 15.0;
    r.y_at_ell = sol.y_end();
    r.y_prime_at_ell = sol.y_prime_end();
    out.push_back(r);
    prev = lambda;
  }
  return out;
}

SpectralData spectral_data(const std::vector<EigenResult>& modes) {
  std::vector<SpectralEntry> e;
  e.reserve(modes.size());
  for (const auto& m : modes) e.push_back({m.lambda, m.alpha_sq});
  return SpectralData(std::move(e));
}

namespace {

// End values and int y^2 from two step sizes, combined by Richardson extrapolation.
struct EndValues {
  double y = 0.0;
  double p = 0.0;
  double norm_sq = 0.0;
};

EndValues extrapolated_end(const Scenario& s, double lambda) {
  Shooter shooter(s.left, s.q, s.length, s.grid().intervals());
  const std::size_t m = shooter.substeps(lambda);
  const IvpSolution a = shooter.solve(lambda, m);
  const IvpSolution b = shooter.solve(lambda, 2 * m);
  auto rich = [](double coarse, double fine) { return (16.0 * fine - coarse) / 15.0; };
  return {rich(a.y_end(), b.y_end()), rich(a.y_prime_end(), b.y_prime_end()),
          rich(integrate_product(a.y, a.y, a.grid.dx), integrate_product(b.y, b.y, b.grid.dx))};
}

}  // namespace

double boundary_function(const Scenario& s, double lambda) {
  validate_scenario(s);
  const EndValues e = extrapolated_end(s, lambda);
  return e.p + s.H * e.y;
}

double norming_constant(const Scenario& s, double lambda_n) {
  validate_scenario(s);
  const EndValues e = extrapolated_end(s, lambda_n);
  const double residual = std::abs(e.p + s.H * e.y);
  if (residual > 1e-6 * (std::abs(e.p) + std::abs(s.H) * std::abs(e.y) + 1.0))
    throw ValidationError("norming_constant: lambda fails the eigencondition (residual " +
                          std::to_string(residual) + ")");
  return e.norm_sq;
}

double fourier_coefficient(const Scenario& s, std::span<const double> g, double lambda) {
  if (g.size() != s.q.size()) throw ValidationError("fourier_coefficient: g must be sampled on the scenario grid");
  const IvpSolution sol = solve_ivp(s, lambda, s.length);
  const std::vector<double> y = sol.coarse_y();
  return integrate_product(g, y, s.grid().dx);
}

}  // namespace wavinv
