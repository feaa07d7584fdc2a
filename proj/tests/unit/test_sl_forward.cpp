#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles/fd_eigen.hpp"
#include "wavinv/sl_forward.hpp"
#include "wavinv/transmutation.hpp"

using namespace wavinv;
using std::numbers::pi;

namespace {

// Plain RK4 on (y, y') with q(x) = x evaluated exactly.
std::pair<double, double> rk4_linear_q(double h0, double lambda, double x_max, int steps) {
  auto f = [&](double x, double y, double p) { return std::pair{p, (x - lambda) * y}; };
  double y = 1.0, p = h0, x = 0.0;
  const double dx = x_max / steps;
  for (int i = 0; i < steps; ++i) {
    const auto [k1y, k1p] = f(x, y, p);
    const auto [k2y, k2p] = f(x + dx / 2, y + dx / 2 * k1y, p + dx / 2 * k1p);
    const auto [k3y, k3p] = f(x + dx / 2, y + dx / 2 * k2y, p + dx / 2 * k2p);
    const auto [k4y, k4p] = f(x + dx, y + dx * k3y, p + dx * k3p);
    y += dx / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
    p += dx / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
    x += dx;
  }
  return {y, p};
}

Scenario free_pi() { return make_scenario(pi, LeftBoundary::robin(0.0), 0.0, 0.5, [](double) { return 0.0; }); }
Scenario linear_q() { return make_scenario(1.0, LeftBoundary::robin(0.5), 1.0, 0.5, [](double x) { return x; }); }

}  // namespace

TEST_CASE("solve_ivp free closed forms") {
  const IvpSolution r = solve_ivp(free_pi(), 4.0, pi);
  CHECK(r.y_end() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(r.y_prime_end()) < 1e-8);
  const Scenario d = make_scenario(pi, LeftBoundary::dirichlet(), 0.0, 0.5, [](double) { return 0.0; });
  const IvpSolution rd = solve_ivp(d, 4.0, pi);
  CHECK(std::abs(rd.y_end()) < 1e-9);
  for (std::size_t i = 0; i < rd.y.size(); i += 97) CHECK(std::abs(rd.y[i] - std::sin(2.0 * rd.grid.at(i)) / 2) < 1e-9);
}

TEST_CASE("solve_ivp matches a fine RK4 for q(x)=x") {
  const IvpSolution r = solve_ivp(linear_q(), 2.0, 1.0);
  const auto [y, p] = rk4_linear_q(0.5, 2.0, 1.0, 20000);
  CHECK(std::abs(r.y_end() - y) < 1e-8);
  CHECK(std::abs(r.y_prime_end() - p) < 1e-8);
}

TEST_CASE("eigenvalues free and shifted") {
  const auto ev = eigenvalues(free_pi(), 4);
  for (int n = 0; n < 4; ++n) CHECK(std::abs(ev[n].lambda - n * n) < 1e-9);
  const Scenario one = make_scenario(pi, LeftBoundary::robin(0.0), 0.0, 0.5, [](double) { return 1.0; });
  const auto e1 = eigenvalues(one, 4);
  const double expect[] = {1, 2, 5, 10};
  for (int n = 0; n < 4; ++n) CHECK(std::abs(e1[n].lambda - expect[n]) < 1e-9);
}

TEST_CASE("eigenvalues and norming constants against the finite-difference oracle") {
  const Scenario s = linear_q();
  const auto ev = eigenvalues(s, 10);
  const auto fd = oracle::fd_eigen({1.0, false, 0.5, 1.0, [](double x) { return x; }}, 10, 10000);
  for (int n = 0; n < 10; ++n) {
    CAPTURE(n);
    CHECK(std::abs(ev[n].lambda - fd[n].lambda) < 1e-6 * std::max(1.0, std::abs(fd[n].lambda)));
    CHECK(std::abs(ev[n].alpha_sq / fd[n].alpha_sq - 1.0) < 1e-6);
  }
}

TEST_CASE("free norming constants") {
  const Scenario s = free_pi();
  CHECK(norming_constant(s, 0.0) == doctest::Approx(pi).epsilon(1e-10));
  for (int n = 1; n < 6; ++n) CHECK(norming_constant(s, n * n) == doctest::Approx(pi / 2).epsilon(1e-10));
  CHECK_THROWS_AS(norming_constant(s, 2.0), ValidationError);
}

TEST_CASE("fourier_coefficient orthogonality and norm") {
  const Scenario s = linear_q();
  const auto ev = eigenvalues(s, 4);
  const auto y1 = solve_ivp(s, ev[1].lambda, s.length).coarse_y();
  const auto y3 = solve_ivp(s, ev[3].lambda, s.length).coarse_y();
  CHECK(std::abs(fourier_coefficient(s, y1, ev[3].lambda)) < 1e-8 * std::sqrt(ev[1].alpha_sq * ev[3].alpha_sq));
  CHECK(std::abs(fourier_coefficient(s, y3, ev[1].lambda)) < 1e-8 * std::sqrt(ev[1].alpha_sq * ev[3].alpha_sq));
  CHECK(fourier_coefficient(s, y1, ev[1].lambda) == doctest::Approx(ev[1].alpha_sq).epsilon(1e-8));
}

TEST_CASE("fourier_coefficient of g_eps equals the closed form (free)") {
  const Scenario s = free_pi();
  const KnownPrefix p = known_prefix_of(s);
  const InitialCondition g = build_g(p, compute_kernel(p), s.grid());
  CHECK(std::abs(fourier_coefficient(s, g, 4.0) - b_closed_form(4.0, 0.5, BoundaryVariant::RobinAtZero)) < 1e-8);
  // Sampled on the scenario grid, the kink of g at epsilon limits Simpson to a few 1e-8.
  CHECK(std::abs(fourier_coefficient(s, g.samples, 4.0) - b_closed_form(4.0, 0.5, BoundaryVariant::RobinAtZero)) <
        1e-6);
}

TEST_CASE("boundary function vanishes at eigenvalues") {
  const Scenario s = linear_q();
  for (const auto& e : eigenvalues(s, 8)) {
    const double scale = std::abs(e.y_prime_at_ell) + s.H * std::abs(e.y_at_ell) + 1.0;
    CHECK(std::abs(boundary_function(s, e.lambda)) <= 1e-8 * scale);
  }
}

// Properties

TEST_CASE("oscillation count equals the index") {
  for (const Scenario& s : {linear_q(), make_scenario(pi, LeftBoundary::dirichlet(), 0.3, 0.5,
                                                      [](double x) { return 1.0 + std::sin(x); })}) {
    const auto ev = eigenvalues(s, 25);
    for (std::size_t n = 0; n < ev.size(); ++n) {
      CAPTURE(n);
      CHECK(count_interior_zeros(solve_ivp(s, ev[n].lambda, s.length)) == n);
    }
  }
}

TEST_CASE("constant shift of q shifts the spectrum only") {
  const double c = 2.5;
  const Scenario a = make_scenario(1.0, LeftBoundary::robin(0.5), 1.0, 0.5, [](double x) { return x * x; });
  const Scenario b = make_scenario(1.0, LeftBoundary::robin(0.5), 1.0, 0.5, [&](double x) { return x * x + c; });
  const auto ea = eigenvalues(a, 15), eb = eigenvalues(b, 15);
  for (int n = 0; n < 15; ++n) {
    CAPTURE(n);
    CHECK(std::abs(eb[n].lambda - ea[n].lambda - c) < 1e-8 * std::max(1.0, ea[n].lambda));
    CHECK(std::abs(eb[n].alpha_sq / ea[n].alpha_sq - 1.0) < 1e-8);
  }
  const auto ya = solve_ivp(a, ea[3].lambda, 1.0).coarse_y(), yb = solve_ivp(b, eb[3].lambda, 1.0).coarse_y();
  for (std::size_t i = 0; i < ya.size(); i += 50) CHECK(std::abs(ya[i] - yb[i]) < 1e-7);
}

TEST_CASE("eigenvalue asymptotics approach the free frequencies") {
  const Scenario r = linear_q();
  const auto er = eigenvalues(r, 40);
  const double d_early = std::abs(std::sqrt(er[5].lambda) - 5 * pi);
  const double d_late = std::abs(std::sqrt(er[39].lambda) - 39 * pi);
  CHECK(d_late < d_early);
  CHECK(d_late < 0.02);
  const Scenario d = make_scenario(pi, LeftBoundary::dirichlet(), 0.0, 0.5, [](double) { return 1.0; });
  const auto ed = eigenvalues(d, 40);
  CHECK(std::abs(std::sqrt(ed[39].lambda) - 39.5) < std::abs(std::sqrt(ed[5].lambda) - 5.5));
  CHECK(std::abs(std::sqrt(ed[39].lambda) - 39.5) < 0.02);
}
