#include <doctest.h>

#include <cmath>
#include <numbers>

#include "wavinv/sl_forward.hpp"
#include "wavinv/spectral_extract.hpp"
#include "wavinv/transmutation.hpp"
#include "wavinv/wave_trace.hpp"

using namespace wavinv;
using std::numbers::pi;

namespace {

Trace signal(double T, double dt, const std::function<double(double)>& f, Channel c = Channel::U0) {
  Trace t{c, 0.0, dt, {}};
  const auto n = static_cast<std::size_t>(std::llround(T / dt)) + 1;
  for (std::size_t i = 0; i < n; ++i) t.samples.push_back(f(dt * i));
  return t;
}

ModeEstimate sinusoid(double w, double a) { return {w, a, false, 0.0}; }

}  // namespace

TEST_CASE("single sinusoid") {
  const auto r = detect_modes(signal(100.0, 0.01, [](double t) { return std::sin(t); }), 1);
  REQUIRE(r.modes.size() == 1);
  CHECK(std::abs(r.modes[0].omega - 1.0) < 1e-8);
  CHECK(std::abs(r.modes[0].amplitude - 1.0) < 1e-8);
  CHECK_FALSE(r.modes[0].is_linear_term);
}

TEST_CASE("linear term plus sinusoid") {
  const auto r = detect_modes(signal(100.0, 0.01, [](double t) { return 0.5 * t + 0.2 * std::sin(2 * t); }));
  REQUIRE(r.modes.size() == 2);
  CHECK(r.modes[0].is_linear_term);
  CHECK(std::abs(r.modes[0].amplitude - 0.5) < 1e-8);
  CHECK(std::abs(r.modes[1].omega - 2.0) < 1e-8);
  CHECK(std::abs(r.modes[1].amplitude - 0.2) < 1e-8);
}

TEST_CASE("frequencies of a q=1 synthesis") {
  const Scenario s = make_scenario(pi, LeftBoundary::robin(0.0), 0.0, 0.5, [](double) { return 1.0; });
  const auto r = detect_modes(synthesize_trace(s, 20).trace);
  REQUIRE(r.modes.size() == 20);
  for (int n = 0; n < 20; ++n) {
    CAPTURE(n);
    CHECK(std::abs(r.modes[n].omega - std::sqrt(n * n + 1.0)) < 1e-6);
  }
}

TEST_CASE("amplitude inversion") {
  const double b1 = b_closed_form(1.0, 0.5, BoundaryVariant::RobinAtZero);
  const SpectralData d = spectral_data_from_modes(
      {{0.0, (0.125 / 3) / pi, true, 0.0}, sinusoid(1.0, b1 / (pi / 2))}, 0.5, BoundaryVariant::RobinAtZero);
  REQUIRE(d.size() == 2);
  CHECK(d[0].lambda == 0.0);
  CHECK(d[0].alpha_sq == doctest::Approx(pi).epsilon(1e-14));
  CHECK(d[1].lambda == 1.0);
  CHECK(d[1].alpha_sq == doctest::Approx(pi / 2).epsilon(1e-14));
}

TEST_CASE("output is sorted regardless of detection order") {
  const SpectralData d = spectral_data_from_modes({sinusoid(3.0, 0.01), sinusoid(1.0, 0.02), sinusoid(2.0, 0.03)},
                                                  0.5, BoundaryVariant::RobinAtZero);
  CHECK(d[0].lambda == 1.0);
  CHECK(d[1].lambda == 4.0);
  CHECK(d[2].lambda == 9.0);
  const auto r = detect_modes(signal(100.0, 0.01, [](double t) { return 0.3 * std::sin(3 * t) + std::sin(1.5 * t); }));
  REQUIRE(r.modes.size() == 2);
  CHECK(r.modes[0].omega < r.modes[1].omega);
}

TEST_CASE("negative norming constants are errors") {
  CHECK_THROWS_AS(spectral_data_from_modes({sinusoid(1.0, -0.1)}, 0.5, BoundaryVariant::RobinAtZero), NumericError);
  CHECK_THROWS_AS(spectral_data_from_modes({sinusoid(1.0, 0.0)}, 0.5, BoundaryVariant::RobinAtZero), NumericError);
}

TEST_CASE("norming constants from a q=1 synthesis") {
  const Scenario s = make_scenario(pi, LeftBoundary::robin(0.0), 0.0, 0.5, [](double) { return 1.0; });
  const auto ev = eigenvalues(s, 20);
  const auto r = detect_modes(synthesize_trace(s, 20).trace);
  const SpectralData d = spectral_data_from_modes(r.modes, 0.5, s.variant());
  for (int n = 0; n < 20; ++n) CHECK(std::abs(d[n].alpha_sq / ev[n].alpha_sq - 1.0) < 1e-5);
}

TEST_CASE("resolvability diagnostics") {
  const Scenario s = make_scenario(pi, LeftBoundary::robin(0.0), 0.0, 0.5, [](double) { return 1.0; });
  const Trace t = synthesize_trace(s, 20).trace;
  const auto r = detect_modes(t);
  const auto ok = resolvability_report(t, r.modes, r.residual);
  CHECK(ok.nyquist_margin >= 1.0);
  CHECK(ok.gap_margin >= 1.0);
  CHECK(ok.flags.empty());

  const Trace coarse = signal(100.0, 0.2, [](double) { return 0.0; });
  const auto ny = resolvability_report(coarse, {sinusoid(std::sqrt(19.0 * 19.0 + 1.0), 1.0)});
  CHECK_FALSE(ny.nyquist_ok);
  REQUIRE(ny.flags.size() == 1);
  CHECK(ny.flags[0].rfind("nyquist", 0) == 0);

  const Trace shortt = signal(100.0, 0.01, [](double) { return 0.0; });
  const auto gap = resolvability_report(shortt, {sinusoid(std::sqrt(99.9), 1.0), sinusoid(std::sqrt(100.1), 1.0)});
  CHECK_FALSE(gap.gap_ok);
  CHECK(gap.flags.at(0).rfind("gap", 0) == 0);
}

TEST_CASE("input contracts") {
  CHECK_THROWS_WITH_AS(detect_modes(signal(10.0, 0.01, [](double t) { return std::sin(t); }, Channel::UL)),
                       "channel UL not a measurement input", ValidationError);
  CHECK_THROWS_WITH_AS(detect_modes(signal(0.1, 0.01, [](double t) { return t; })), "trace too short",
                       ValidationError);
  CHECK_THROWS_AS(detect_modes(signal(50.0, 0.01, [](double t) { return std::sinh(t); })), NumericError);
  // Two modes 0.01 apart in a 100-unit record cannot be separated.
  CHECK_THROWS_AS(detect_modes(signal(100.0, 0.01, [](double t) { return std::sin(10 * t) + std::sin(10.01 * t); })),
                  std::exception);
}

TEST_CASE("round trip reproduces spectral data for both variants") {
  for (LeftBoundary left : {LeftBoundary::robin(0.0), LeftBoundary::dirichlet()}) {
    const Scenario s = make_scenario(pi, left, 0.0, 0.5, [](double) { return 1.0; });
    const auto ev = eigenvalues(s, 30);
    const auto r = detect_modes(synthesize_trace(s, 30).trace);
    const SpectralData d = spectral_data_from_modes(r.modes, 0.5, s.variant());
    REQUIRE(d.size() == 30);
    for (int n = 0; n < 30; ++n) {
      CAPTURE(n);
      CHECK(std::abs(d[n].lambda / ev[n].lambda - 1.0) < 1e-5);
      CHECK(std::abs(d[n].alpha_sq / ev[n].alpha_sq - 1.0) < 1e-5);
    }
  }
}
