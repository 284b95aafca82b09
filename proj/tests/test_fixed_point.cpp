#include <cmath>

#include "chf/fixed_point.hpp"
#include "chf/geometry.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace chf;
using namespace chf::testing;

namespace {

const TargetManifold kSphere = TargetManifold::sphere(2);
const TargetManifold kFlat = TargetManifold::euclidean(1);

SpaceTimeScalar constant_u(const GridGeometry& g, double T, double dt, double c) {
  return SpaceTimeScalar{dt, std::vector<ScalarField>(time_steps(T, dt) + 1, ScalarField(g, c))};
}

SpaceTimeMap repeated(const MapField& f, double T, double dt) {
  return SpaceTimeMap{dt, std::vector<MapField>(time_steps(T, dt) + 1, f)};
}

MapField cosine_mode(const GridGeometry& g) {
  MapField f(g, 1);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) f(i, j, 0) = std::cos(kTwoPi * i / g.nx);
  return f;
}

}  // namespace

TEST_CASE("time grid") {
  CHECK(time_steps(0.01, 1e-3) == 10);
  CHECK_THROWS_AS(time_steps(0.0105, 1e-3), ConfigError);
  CHECK_THROWS_AS(time_steps(0.0, 1e-3), ConfigError);
}

TEST_CASE("s1_solve") {
  const auto g = torus(32);
  const double T = 0.1, dt = 1e-2;
  SUBCASE("constant map stays put") {
    const MapField c = constant_map(g, 0, 0.6, 0.8);
    const SpaceTimeMap h = s1_solve(repeated(c, T, dt), constant_u(g, T, dt, 0.0), c, g, kSphere);
    REQUIRE(h.frames.size() == 11);
    for (const auto& fr : h.frames) CHECK(max_abs_diff(fr, c) <= 1e-15);
  }
  SUBCASE("heat kernel decay of a single mode, with and without a constant conformal factor") {
    const MapField f0 = cosine_mode(g);
    // discrete eigenvalue of the 5-point Laplacian for the first mode
    const double lam = 4.0 / (g.hx() * g.hx()) * std::pow(std::sin(g.hx() / 2), 2);
    for (double c : {0.0, 0.3}) {
      const SpaceTimeMap h = s1_solve(repeated(f0, T, dt), constant_u(g, T, dt, c), f0, g, kFlat);
      const double rate = lam * std::exp(-2 * c);
      for (int k = 0; k <= h.steps(); ++k) {
        // implicit Euler exactly: amplitude (1 + dt*rate)^{-k}
        const double amp = std::pow(1 + dt * rate, -k);
        CHECK(h.frames[k](0, 3, 0) == doctest::Approx(amp).epsilon(1e-9));
        const double exact = std::exp(-rate * h.time(k));
        CHECK(std::abs(amp / exact - 1) <= 2 * dt * (1.0 * std::exp(-2 * c)) * h.time(k) + 1e-12);
      }
    }
  }
  SUBCASE("flat target with u = 0 conserves the mean") {
    std::mt19937_64 rng(7);
    MapField f0(g, 1);
    const ScalarField r = random_scalar(g, rng);
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) f0(i, j, 0) = r(i, j);
    const SpaceTimeMap h = s1_solve(repeated(f0, T, dt), constant_u(g, T, dt, 0.0), f0, g, kFlat);
    auto mean = [&](const MapField& f) {
      double s = 0.0;
      for (double v : f.values()) s += v;
      return s / g.points();
    };
    for (const auto& fr : h.frames) CHECK(mean(fr) == doctest::Approx(mean(f0)).epsilon(1e-9));
  }
}

TEST_CASE("s2_solve") {
  const auto g = torus(16);
  const double T = 0.2, dt = 1e-2;
  FlowParams p;
  p.a = 1.3;
  p.b = 0.7;
  SUBCASE("constant map: v = -a t") {
    const SpaceTimeScalar v = s2_solve(repeated(constant_map(g, 1, 0, 0), T, dt), constant_u(g, T, dt, 0.0), p, g);
    for (int k = 0; k <= v.steps(); ++k)
      for (double x : v.frames[k].values()) CHECK(x == doctest::Approx(-p.a * v.time(k)).epsilon(1e-14));
  }
  SUBCASE("constant density, u = 0: v = (bc - a) t") {
    const MapField w = wrap_map(g);
    const double c = energy_density(w, g)(0, 0);
    const SpaceTimeScalar v = s2_solve(repeated(w, T, dt), constant_u(g, T, dt, 0.0), p, g);
    for (int k = 0; k <= v.steps(); ++k) CHECK(v.frames[k](4, 5) == doctest::Approx((p.b * c - p.a) * v.time(k)));
  }
  SUBCASE("constant density with the closed-form u: trapezoid error is O(dt^2)") {
    const MapField w = wrap_map(g);
    const double c = energy_density(w, g)(0, 0);
    auto max_err = [&](double step) {
      const int nt = time_steps(T, step);
      SpaceTimeScalar u{step, {}};
      for (int k = 0; k <= nt; ++k) {
        const double t = k * step;
        u.frames.emplace_back(g, u_closed_form(ScalarField(g, c * std::expm1(2 * p.a * t) / (2 * p.a)), t, p.a, p.b)(0, 0));
      }
      const SpaceTimeScalar v = s2_solve(repeated(w, T, step), u, p, g);
      double e = 0.0;
      for (int k = 0; k <= nt; ++k) e = std::max(e, std::abs(v.frames[k](0, 0) - u.frames[k](0, 0)));
      return e;
    };
    const double e1 = max_err(2e-2), e2 = max_err(1e-2);
    CHECK(e2 <= 1e-4);
    CHECK(e1 / e2 >= 3.8);
  }
}

TEST_CASE("space-time norm") {
  const GridGeometry unit{8, 8, 1.0, 1.0};
  const double T = 1.0, dt = 0.125;
  MapField one(unit, 1);
  for (double& v : one.values()) v = 1.0;
  const SpaceTimeMap f = repeated(one, T, dt);
  const SpaceTimeScalar u = constant_u(unit, T, dt, 0.0);
  CHECK(spacetime_l2_norm(f, u, unit) == doctest::Approx(1.0).epsilon(1e-15));
  const SpaceTimeMap zf = repeated(MapField(unit, 1), T, dt);
  CHECK(spacetime_l2_norm(zf, u, unit) == 0.0);

  const auto g = torus(16);
  std::mt19937_64 rng(3);
  SpaceTimeMap fr{0.1, {}};
  SpaceTimeScalar ur{0.1, {}};
  SpaceTimeMap fs{0.1, {}};
  SpaceTimeScalar us{0.1, {}};
  for (int k = 0; k < 4; ++k) {
    MapField m = smooth_sphere_map(g, 0.1 * k);
    ScalarField s = random_scalar(g, rng);
    fr.frames.push_back(m);
    ur.frames.push_back(s);
    for (double& v : m.values()) v *= -3.0;
    for (double& v : s.values()) v *= -3.0;
    fs.frames.push_back(m);
    us.frames.push_back(s);
  }
  CHECK(spacetime_l2_norm(fs, us, g) == doctest::Approx(3.0 * spacetime_l2_norm(fr, ur, g)).epsilon(1e-14));
}

TEST_CASE("picard_iterate") {
  FlowParams p;
  SUBCASE("constant map converges in two iterations to (f0, -a t)") {
    const auto g = torus(16);
    const MapField c = constant_map(g, 0, 0, 1);
    const PicardReport r = picard_iterate(c, 0.01, 1e-3, p, g, kSphere, 1e-12, 20);
    CHECK(r.converged);
    CHECK(r.iterations <= 2);
    for (int k = 0; k <= r.f.steps(); ++k) {
      CHECK(max_abs_diff(r.f.frames[k], c) <= 1e-15);
      CHECK(r.u.frames[k](3, 3) == doctest::Approx(-p.a * r.u.time(k)).epsilon(1e-14));
    }
  }
  SUBCASE("harmonic wrap contracts") {
    const auto g = torus(32);
    const PicardReport r = picard_iterate(wrap_map(g), 0.01, 1e-3, p, g, kSphere, 1e-8, 20);
    CHECK(r.converged);
    CHECK(r.max_ratio() < 1.0);
    MESSAGE("iterations " << r.iterations << ", max ratio " << r.max_ratio());
    // the fixed point's u is S2 of its own f
    const SpaceTimeScalar v = s2_solve(r.f, r.u, p, g);
    CHECK(spacetime_l2_distance(r.f, v, r.f, r.u, g) <= 1e-7);
  }
  SUBCASE("running out of iterations is a report, not an error") {
    const auto g = torus(16);
    const PicardReport r = picard_iterate(smooth_sphere_map(g), 0.01, 1e-3, p, g, kSphere, 1e-30, 3);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 3);
    CHECK(r.differences.size() == 3);
    CHECK(r.ratios.size() == 2);
  }
  SUBCASE("shorter horizons contract at least as fast") {
    const auto g = torus(16);
    double prev = 1e9;
    for (double T : {0.04, 0.02, 0.01}) {
      const PicardReport r = picard_iterate(smooth_sphere_map(g), T, 1e-3, p, g, kSphere, 1e-10, 30);
      CHECK(r.converged);
      CHECK(r.max_ratio() <= prev);
      prev = r.max_ratio();
    }
  }
}
