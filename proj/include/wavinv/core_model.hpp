#pragma once

// Domain types shared by every stage of the one-sided wave inversion pipeline.

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "wavinv/errors.hpp"

namespace wavinv {

enum class BoundaryVariant { RobinAtZero, DirichletAtZero };

std::string_view to_string(BoundaryVariant v);

/// Left-end boundary condition: u_x(0,t) = h u(0,t) or u(0,t) = 0.
class LeftBoundary {
 public:
  static LeftBoundary robin(double h);
  static LeftBoundary dirichlet();

  BoundaryVariant variant() const { return variant_; }
  bool is_robin() const { return variant_ == BoundaryVariant::RobinAtZero; }
  /// Throws ValidationError for the Dirichlet variant, which carries no h.
  double h() const;

  bool operator==(const LeftBoundary&) const = default;

 private:
  LeftBoundary(BoundaryVariant v, double h) : variant_(v), h_(h) {}
  BoundaryVariant variant_;
  double h_;
};

/// Uniform grid x_i = x0 + i*dx, i = 0..size-1.
struct UniformGrid {
  double x0 = 0.0;
  double dx = 0.0;
  std::size_t size = 0;

  static UniformGrid spanning(double a, double b, std::size_t nodes);

  double at(std::size_t i) const { return x0 + dx * static_cast<double>(i); }
  double back() const { return at(size - 1); }
  std::size_t intervals() const { return size - 1; }
  bool operator==(const UniformGrid&) const = default;
};

/// Piecewise-linear function through (x_i, v_i), x strictly increasing.
/// Evaluation outside [x_front, x_back] beyond a relative slack of 1e-12 throws.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;
  PiecewiseLinear(std::vector<double> x, std::vector<double> v);
  PiecewiseLinear(const UniformGrid& grid, std::vector<double> v);
  static PiecewiseLinear sample(const UniformGrid& grid, const std::function<double(double)>& f);

  double operator()(double x) const;
  /// Exact integral of the interpolant over [a, b] within the support.
  double integral(double a, double b) const;

  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  std::size_t size() const { return x_.size(); }
  std::span<const double> nodes() const { return x_; }
  std::span<const double> values() const { return v_; }
  double max_abs() const;
  bool is_uniform() const { return uniform_; }

  bool operator==(const PiecewiseLinear& o) const { return x_ == o.x_ && v_ == o.v_; }

 private:
  std::size_t locate(double x) const;
  std::vector<double> x_;
  std::vector<double> v_;
  std::vector<double> cumulative_;
  bool uniform_ = false;
};

/// Ground truth for the forward side: -u_xx + q u = -u_tt on [0, length].
struct Scenario {
  double length = 0.0;
  LeftBoundary left = LeftBoundary::robin(0.0);
  double H = 0.0;
  double epsilon = 0.0;
  PiecewiseLinear q;  // sampled on a uniform grid over [0, length]

  UniformGrid grid() const;
  BoundaryVariant variant() const { return left.variant(); }
  bool operator==(const Scenario&) const = default;
};

inline constexpr std::size_t kDefaultGridNodes = 1000;

/// Samples q on a uniform grid of `nodes` points over [0, length].
Scenario make_scenario(double length, LeftBoundary left, double H, double epsilon,
                       const std::function<double(double)>& q,
                       std::size_t nodes = kDefaultGridNodes);

/// Everything the inverse side is allowed to know: epsilon, the left boundary and q on [0, epsilon].
struct KnownPrefix {
  double epsilon = 0.0;
  LeftBoundary left = LeftBoundary::robin(0.0);
  PiecewiseLinear q;  // support exactly [0, epsilon]

  BoundaryVariant variant() const { return left.variant(); }
};

/// Samples q on `nodes` uniform points over [0, epsilon].
KnownPrefix make_prefix(double epsilon, LeftBoundary left, const std::function<double(double)>& q,
                        std::size_t nodes = 201);

Scenario validate_scenario(const Scenario& s);
void validate_prefix(const KnownPrefix& p);

/// Restriction of s to the information a one-sided observer holds.
KnownPrefix known_prefix_of(const Scenario& s);

enum class Channel { U0, Ux0, UL, Interior };

std::string_view to_string(Channel c);
Channel channel_from_string(std::string_view name);

struct Trace {
  Channel channel = Channel::U0;
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> samples;

  double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  double duration() const { return dt * static_cast<double>(samples.size() - 1); }
};

void validate_trace(const Trace& t);

struct SpectralEntry {
  double lambda = 0.0;
  double alpha_sq = 0.0;
  bool operator==(const SpectralEntry&) const = default;
};

/// Ordered spectral data {lambda_n, alpha_n^2}: lambda strictly increasing, alpha_sq > 0.
class SpectralData {
 public:
  SpectralData() = default;
  explicit SpectralData(std::vector<SpectralEntry> entries);

  std::span<const SpectralEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const SpectralEntry& operator[](std::size_t i) const { return entries_[i]; }
  std::vector<double> lambdas() const;
  /// First n entries.
  SpectralData head(std::size_t n) const;
  /// Every lambda shifted by c; norming constants unchanged.
  SpectralData shifted(double c) const;

 private:
  std::vector<SpectralEntry> entries_;
};

/// Coefficient a(lambda_n) of the initial displacement. The pipeline fixes f = 0.
constexpr double initial_displacement_coefficient(double /*lambda*/) { return 0.0; }

}  // namespace wavinv
