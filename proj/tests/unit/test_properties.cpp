// Cross-module invariants: Parseval, round trips, noise, determinism.

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wavinv/recon.hpp"
#include "wavinv/sl_forward.hpp"
#include "wavinv/spectral_extract.hpp"
#include "wavinv/transmutation.hpp"
#include "wavinv/wave_trace.hpp"

using namespace wavinv;
using std::numbers::pi;

TEST_CASE("Parseval: sum of b^2/alpha^2 increases to the norm of g") {
  const Scenario s = make_scenario(pi, LeftBoundary::robin(0.0), 0.0, 0.5, [](double) { return 0.0; });
  const ModalCoefficients m = modal_coefficients(s, 100);
  const double norm = std::pow(0.5, 5) / 5;  // int_0^eps (x - eps)^4 dx
  double sum = 0.0;
  for (std::size_t n = 0; n < m.size(); ++n) {
    const double next = sum + m.b[n] * m.b[n] / m.alpha_sq[n];
    CHECK(next > sum);
    sum = next;
  }
  CHECK(sum <= norm * (1 + 1e-12));
  CHECK(sum >= 0.99 * norm);
}

TEST_CASE("round trip on several scenarios with nonnegative spectrum") {
  struct Case {
    double length;
    LeftBoundary left;
    double H;
    std::function<double(double)> q;
  };
  const Case cases[] = {
      {1.0, LeftBoundary::robin(0.5), 1.0, [](double x) { return x; }},
      {2.0, LeftBoundary::robin(0.1), 0.3, [](double x) { return 2.0 + std::cos(3 * x); }},
      {pi, LeftBoundary::dirichlet(), 0.5, [](double x) { return x * x / 4; }},
  };
  for (const Case& c : cases) {
    const Scenario s = make_scenario(c.length, c.left, c.H, 0.5, c.q);
    const auto ev = eigenvalues(s, 20);
    REQUIRE(ev[0].lambda >= 0.0);
    const ExtractionResult r = detect_modes(synthesize_trace(s, 20).trace);
    const SpectralData d = spectral_data_from_modes(r.modes, 0.5, s.variant());
    REQUIRE(d.size() == 20);
    for (std::size_t n = 0; n < 20; ++n) {
      CAPTURE(c.length);
      CAPTURE(n);
      CHECK(std::abs(d[n].lambda - ev[n].lambda) <= 1e-5 * std::max(1.0, ev[n].lambda));
      CHECK(std::abs(d[n].alpha_sq / ev[n].alpha_sq - 1.0) < 1e-5);
      CHECK(d[n].alpha_sq > 0.0);
    }
  }
}

TEST_CASE("noise degrades eigenvalues linearly") {
  const Scenario s = make_scenario(pi, LeftBoundary::robin(0.0), 0.0, 0.5, [](double) { return 1.0; });
  const auto ev = eigenvalues(s, 30);
  const Trace clean = synthesize_trace(s, 30).trace;
  ExtractOptions opt;
  opt.max_modes = 30;
  opt.residual_threshold = 1.0;  // the noise floor sets the residual
  double errs[2];
  int k = 0;
  for (double eta : {1e-6, 1e-4}) {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> noise(-eta, eta);
    Trace t = clean;
    for (double& v : t.samples) v += noise(rng);
    const SpectralData d = spectral_data_from_modes(detect_modes(t, opt).modes, 0.5, s.variant());
    REQUIRE(d.size() >= 10);
    double e = 0.0;
    for (std::size_t n = 0; n < 10; ++n) e = std::max(e, std::abs(d[n].lambda - ev[n].lambda));
    MESSAGE("eta " << eta << ": max eigenvalue error " << e);
    CHECK(e <= 10 * eta);
    errs[k++] = e;
  }
  CHECK(errs[1] / errs[0] == doctest::Approx(100.0).epsilon(0.5));
}

TEST_CASE("extraction and reconstruction are deterministic") {
  const Scenario s = make_scenario(1.0, LeftBoundary::robin(0.5), 1.0, 0.5, [](double x) { return x; });
  const Trace t = synthesize_trace(s, 25).trace;
  const ExtractionResult a = detect_modes(t), b = detect_modes(t);
  REQUIRE(a.modes.size() == b.modes.size());
  for (std::size_t i = 0; i < a.modes.size(); ++i) {
    CHECK(a.modes[i].omega == b.modes[i].omega);
    CHECK(a.modes[i].amplitude == b.modes[i].amplitude);
  }
  const SpectralData d = spectral_data_from_modes(a.modes, 0.5, s.variant());
  const GlResult g1 = gl_reconstruct(d, 1.0, s.variant()), g2 = gl_reconstruct(d, 1.0, s.variant());
  CHECK(g1.q_hat == g2.q_hat);
}

TEST_CASE("transform identity holds for a kinked prefix") {
  const auto q = [](double x) { return 1.0 + 4.0 * std::abs(x - 0.2); };
  const Scenario s = make_scenario(2.0, LeftBoundary::robin(-0.3), 0.2, 0.5, q, 2001);
  const KnownPrefix p = known_prefix_of(s);
  const InitialCondition g = build_g(p, compute_kernel(p), s.grid());
  for (const auto& e : eigenvalues(s, 12)) {
    CAPTURE(e.lambda);
    CHECK(std::abs(fourier_coefficient(s, g, e.lambda) / b_closed_form(e.lambda, 0.5, s.variant()) - 1.0) < 1e-5);
  }
}

TEST_CASE("a jump in the prefix is caught by the kernel check") {
  const auto q = [](double x) { return x < 0.2 ? 3.0 : -1.0; };
  const KnownPrefix p = make_prefix(0.5, LeftBoundary::robin(0.0), q, 2001);
  CHECK_THROWS_AS(compute_kernel(p), NumericError);
  KernelOptions fine;
  fine.intervals = 1600;
  fine.tolerance = 1e-5;
  CHECK_NOTHROW(compute_kernel(p, fine));
}
