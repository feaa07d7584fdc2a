#include "wavinv/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wavinv {

std::string_view to_string(BoundaryVariant v) {
  return v == BoundaryVariant::RobinAtZero ? "robin" : "dirichlet";
}

LeftBoundary LeftBoundary::robin(double h) {
  if (!std::isfinite(h)) throw ValidationError("Robin boundary requires a finite h");
  return {BoundaryVariant::RobinAtZero, h};
}

LeftBoundary LeftBoundary::dirichlet() { return {BoundaryVariant::DirichletAtZero, 0.0}; }

double LeftBoundary::h() const {
  if (!is_robin()) throw ValidationError("Dirichlet boundary carries no h");
  return h_;
}

UniformGrid UniformGrid::spanning(double a, double b, std::size_t nodes) {
  if (nodes < 2 || !(b > a)) throw ValidationError("grid needs at least 2 nodes over a non-empty interval");
  return {a, (b - a) / static_cast<double>(nodes - 1), nodes};
}

PiecewiseLinear::PiecewiseLinear(std::vector<double> x, std::vector<double> v)
    : x_(std::move(x)), v_(std::move(v)) {
  if (x_.size() != v_.size() || x_.size() < 2)
    throw ValidationError("piecewise-linear data needs >= 2 matching nodes and values");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!std::isfinite(x_[i]) || !std::isfinite(v_[i]))
      throw ValidationError("q values must be finite");
    if (i > 0 && !(x_[i] > x_[i - 1])) throw ValidationError("q grid must be strictly increasing");
  }
  const double h0 = x_[1] - x_[0];
  uniform_ = true;
  for (std::size_t i = 1; i < x_.size(); ++i) {
    if (std::abs((x_[i] - x_[i - 1]) - h0) > 1e-9 * h0) {
      uniform_ = false;
      break;
    }
  }
  cumulative_.assign(x_.size(), 0.0);
  for (std::size_t i = 1; i < x_.size(); ++i)
    cumulative_[i] = cumulative_[i - 1] + 0.5 * (x_[i] - x_[i - 1]) * (v_[i] + v_[i - 1]);
}

PiecewiseLinear::PiecewiseLinear(const UniformGrid& grid, std::vector<double> v)
    : PiecewiseLinear(
          [&] {
            std::vector<double> x(grid.size);
            for (std::size_t i = 0; i < grid.size; ++i) x[i] = grid.at(i);
            return x;
          }(),
          std::move(v)) {}

PiecewiseLinear PiecewiseLinear::sample(const UniformGrid& grid,
                                        const std::function<double(double)>& f) {
  std::vector<double> v(grid.size);
  for (std::size_t i = 0; i < grid.size; ++i) v[i] = f(grid.at(i));
  return {grid, std::move(v)};
}

std::size_t PiecewiseLinear::locate(double x) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(x_.back() - x_.front()));
  if (x < x_.front() - slack || x > x_.back() + slack)
    throw ValidationError("evaluation point " + std::to_string(x) + " outside q support [" +
                          std::to_string(x_.front()) + ", " + std::to_string(x_.back()) + "]");
  if (uniform_) {
    const double h = (x_.back() - x_.front()) / static_cast<double>(x_.size() - 1);
    const auto i = static_cast<std::ptrdiff_t>(std::floor((x - x_.front()) / h));
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(x_.size()) - 2));
  }
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const auto i = static_cast<std::ptrdiff_t>(it - x_.begin()) - 1;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(x_.size()) - 2));
}

double PiecewiseLinear::operator()(double x) const {
  const std::size_t i = locate(x);
  const double w = (x - x_[i]) / (x_[i + 1] - x_[i]);
  return v_[i] + w * (v_[i + 1] - v_[i]);
}

double PiecewiseLinear::integral(double a, double b) const {
  auto primitive = [&](double x) {
    const std::size_t i = locate(x);
    const double d = x - x_[i];
    const double slope = (v_[i + 1] - v_[i]) / (x_[i + 1] - x_[i]);
    return cumulative_[i] + d * v_[i] + 0.5 * slope * d * d;
  };
  return primitive(b) - primitive(a);
}

double PiecewiseLinear::max_abs() const {
  double m = 0.0;
  for (double v : v_) m = std::max(m, std::abs(v));
  return m;
}

UniformGrid Scenario::grid() const { return {0.0, length / static_cast<double>(q.size() - 1), q.size()}; }

Scenario make_scenario(double length, LeftBoundary left, double H, double epsilon,
                       const std::function<double(double)>& q, std::size_t nodes) {
  Scenario s{length, left, H, epsilon,
             PiecewiseLinear::sample(UniformGrid::spanning(0.0, length, nodes), q)};
  return validate_scenario(s);
}

Scenario validate_scenario(const Scenario& s) {
  if (!(s.length > 0.0) || !std::isfinite(s.length)) throw ValidationError("length must be positive");
  if (!std::isfinite(s.H)) throw ValidationError("H must be finite");
  if (!(s.epsilon > 0.0 && s.epsilon < 1.0)) throw ValidationError("epsilon must satisfy 0<ε<1");
  if (!(s.epsilon < s.length)) throw ValidationError("epsilon must be < ℓ");
  if (s.q.size() < 2) throw ValidationError("q must have at least 2 samples");
  if (!s.q.is_uniform()) throw ValidationError("q grid must be uniform");
  if (std::abs(s.q.front()) > 1e-12 * s.length || std::abs(s.q.back() - s.length) > 1e-9 * s.length)
    throw ValidationError("q grid must span [0, ℓ]");
  if (s.left.is_robin() && !std::isfinite(s.left.h())) throw ValidationError("h must be finite");
  return s;
}

void validate_prefix(const KnownPrefix& p) {
  if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) throw ValidationError("epsilon must satisfy 0<ε<1");
  if (p.q.size() < 2) throw ValidationError("q prefix must have at least 2 samples");
  if (std::abs(p.q.front()) > 1e-12) throw ValidationError("q prefix must start at x=0");
  if (std::abs(p.q.back() - p.epsilon) > 1e-12 * std::max(1.0, p.epsilon))
    throw ValidationError("q prefix must end exactly at epsilon");
}

KnownPrefix make_prefix(double epsilon, LeftBoundary left, const std::function<double(double)>& q,
                        std::size_t nodes) {
  KnownPrefix p{epsilon, left, PiecewiseLinear::sample(UniformGrid::spanning(0.0, epsilon, nodes), q)};
  validate_prefix(p);
  return p;
}

KnownPrefix known_prefix_of(const Scenario& s) {
  std::vector<double> x;
  std::vector<double> v;
  const auto nodes = s.q.nodes();
  const auto values = s.q.values();
  const double tol = 1e-12 * s.length;
  for (std::size_t i = 0; i < nodes.size() && nodes[i] < s.epsilon - tol; ++i) {
    x.push_back(nodes[i]);
    v.push_back(values[i]);
  }
  // Close the prefix exactly at epsilon with the interpolated value q(ε).
  x.push_back(s.epsilon);
  v.push_back(s.q(s.epsilon));
  KnownPrefix p{s.epsilon, s.left, PiecewiseLinear(std::move(x), std::move(v))};
  validate_prefix(p);
  return p;
}

std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::U0: return "U0";
    case Channel::Ux0: return "Ux0";
    case Channel::UL: return "UL";
    case Channel::Interior: return "Interior";
  }
  return "?";
}

Channel channel_from_string(std::string_view name) {
  if (name == "U0") return Channel::U0;
  if (name == "Ux0") return Channel::Ux0;
  if (name == "UL") return Channel::UL;
  if (name == "Interior") return Channel::Interior;
  throw ValidationError("unknown trace channel '" + std::string(name) + "'");
}

void validate_trace(const Trace& t) {
  if (!(t.dt > 0.0) || !std::isfinite(t.dt)) throw ValidationError("trace dt must be positive");
  if (!std::isfinite(t.t0)) throw ValidationError("trace t0 must be finite");
  if (t.samples.size() < 2) throw ValidationError("trace too short");
  for (double v : t.samples)
    if (!std::isfinite(v)) throw ValidationError("trace samples must be finite");
}

SpectralData::SpectralData(std::vector<SpectralEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!std::isfinite(entries_[i].lambda) || !std::isfinite(entries_[i].alpha_sq))
      throw ValidationError("spectral data must be finite");
    if (!(entries_[i].alpha_sq > 0.0)) throw ValidationError("alpha_sq must be positive");
    if (i > 0 && !(entries_[i].lambda > entries_[i - 1].lambda))
      throw ValidationError("lambda must be strictly increasing");
  }
}

std::vector<double> SpectralData::lambdas() const {
  std::vector<double> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.lambda);
  return out;
}

SpectralData SpectralData::head(std::size_t n) const {
  n = std::min(n, entries_.size());
  return SpectralData({entries_.begin(), entries_.begin() + static_cast<std::ptrdiff_t>(n)});
}

SpectralData SpectralData::shifted(double c) const {
  auto e = entries_;
  for (auto& x : e) x.lambda += c;
  return SpectralData(std::move(e));
}

}  // namespace wavinv
