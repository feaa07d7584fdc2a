#include <doctest.h>

#include <cmath>
#include <numbers>

#include "wavinv/core_model.hpp"

using namespace wavinv;
using std::numbers::pi;

TEST_CASE("validate_scenario accepts the free case") {
  const Scenario s = make_scenario(pi, LeftBoundary::robin(0.0), 0.0, 0.5, [](double) { return 0.0; });
  CHECK(validate_scenario(s) == s);
  CHECK(s.variant() == BoundaryVariant::RobinAtZero);
}

TEST_CASE("validate_scenario rejects bad epsilon") {
  CHECK_THROWS_WITH_AS(make_scenario(pi, LeftBoundary::robin(0.0), 0.0, 1.5, [](double) { return 0.0; }),
                       "epsilon must satisfy 0<ε<1", ValidationError);
  CHECK_THROWS_WITH_AS(make_scenario(0.4, LeftBoundary::robin(0.0), 0.0, 0.5, [](double) { return 0.0; }),
                       "epsilon must be < ℓ", ValidationError);
}

TEST_CASE("validate_scenario is idempotent") {
  const Scenario s = make_scenario(1.0, LeftBoundary::robin(0.5), 1.0, 0.5, [](double x) { return x; });
  const Scenario once = validate_scenario(s);
  CHECK(validate_scenario(once) == once);
  CHECK(once == s);
}

TEST_CASE("known_prefix_of restricts q and keeps the left condition") {
  const Scenario s = make_scenario(pi, LeftBoundary::robin(0.3), 0.0, 0.25, [](double x) { return x; });
  const KnownPrefix p = known_prefix_of(s);
  CHECK(p.epsilon == 0.25);
  CHECK(p.left.h() == doctest::Approx(0.3));
  CHECK(p.q.back() == 0.25);
  for (double x : p.q.nodes()) {
    CHECK(x <= 0.25);
    CHECK(p.q(x) == doctest::Approx(x).epsilon(1e-12));
  }
}

TEST_CASE("known_prefix_of for Dirichlet carries no h") {
  const Scenario s = make_scenario(pi, LeftBoundary::dirichlet(), 0.0, 0.5, [](double) { return 0.0; });
  const KnownPrefix p = known_prefix_of(s);
  CHECK(p.variant() == BoundaryVariant::DirichletAtZero);
  CHECK_THROWS_AS(p.left.h(), ValidationError);
  CHECK(p.q.max_abs() == 0.0);
}

TEST_CASE("piecewise linear integral and evaluation") {
  const PiecewiseLinear f(UniformGrid::spanning(0.0, 2.0, 5), {0.0, 0.5, 1.0, 1.5, 2.0});
  CHECK(f(0.75) == doctest::Approx(0.75));
  CHECK(f.integral(0.0, 2.0) == doctest::Approx(2.0));
  CHECK(f.integral(0.25, 1.25) == doctest::Approx(0.5 * (1.25 * 1.25 - 0.25 * 0.25)));
  CHECK_THROWS_AS(f(2.5), ValidationError);
}

TEST_CASE("spectral data ordering and shifting") {
  CHECK_THROWS_AS(SpectralData({{1.0, 1.0}, {0.5, 1.0}}), ValidationError);
  CHECK_THROWS_AS(SpectralData({{0.0, 1.0}, {1.0, -1.0}}), ValidationError);
  const SpectralData d({{0.0, pi}, {1.0, pi / 2}, {4.0, pi / 2}});
  const SpectralData s = d.shifted(1.0);
  CHECK(s[2].lambda == 5.0);
  CHECK(s[2].alpha_sq == d[2].alpha_sq);
  CHECK(d.head(2).size() == 2);
}

TEST_CASE("channel names round trip") {
  for (Channel c : {Channel::U0, Channel::Ux0, Channel::UL, Channel::Interior})
    CHECK(channel_from_string(to_string(c)) == c);
  CHECK_THROWS_AS(channel_from_string("bogus"), ValidationError);
}
