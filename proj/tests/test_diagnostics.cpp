#include <cmath>
#include <limits>
#include <numbers>

#include "chf/diagnostics.hpp"
#include "chf/geometry.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace chf;
using namespace chf::testing;

namespace {

const TargetManifold kSphere = TargetManifold::sphere(2);
constexpr double kPi = std::numbers::pi;

FlowParams params(double dt, double t_end, double a = 1.0, double b = 1.0) {
  FlowParams p;
  p.dt = dt;
  p.t_end = t_end;
  p.a = a;
  p.b = b;
  return p;
}

double sinc2(double h) { return std::pow(std::sin(h) / h, 2); }

/// Localized twist near the north pole: energy concentrated within a few widths of (cx, cy).
MapField bump_map(const GridGeometry& g, double cx, double cy, double width, double amp) {
  MapField f(g, 3);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      double dx = g.hx() * i - cx, dy = g.hy() * j - cy;
      dx -= g.lx * std::round(dx / g.lx);
      dy -= g.ly * std::round(dy / g.ly);
      const double s = amp / width * std::exp(-(dx * dx + dy * dy) / (width * width));
      f(i, j, 0) = s * dx;
      f(i, j, 1) = s * dy;
      f(i, j, 2) = 1.0;
    }
  return project_to_target(f, kSphere);
}

}  // namespace

TEST_CASE("energy") {
  const auto g = torus(64);
  CHECK(energy(constant_map(g, 0, 0, 1), g) == 0.0);
  const double h = g.hx();
  const double e1 = energy(wrap_map(g), g);
  CHECK(e1 == doctest::Approx(2 * kPi * kPi * sinc2(h)).epsilon(1e-13));
  CHECK(std::abs(e1 / (2 * kPi * kPi) - 1) <= 3.3e-3);
  const double e2 = energy(wrap_map(g, 2), g);
  CHECK(e2 == doctest::Approx(2 * kPi * kPi * 4 * sinc2(2 * h)).epsilon(1e-13));
  CHECK(e2 / e1 == doctest::Approx(4 * sinc2(2 * h) / sinc2(h)).epsilon(1e-13));
}

TEST_CASE("volume") {
  const auto g = torus(32);
  CHECK(volume(ScalarField(g, 0.0), g) == doctest::Approx(4 * kPi * kPi).epsilon(1e-14));
  const double a = 1.3, t = 0.7;
  CHECK(volume(ScalarField(g, -a * t), g) == doctest::Approx(std::exp(-2 * a * t) * 4 * kPi * kPi).epsilon(1e-14));
}

TEST_CASE("volume law check") {
  const auto g = torus(16);
  SUBCASE("constant map has zero deviation") {
    const FlowParams p = params(1e-2, 1.0, 1.4, 0.6);
    std::vector<VolumeSample> series;
    for (int k = 0; k <= 100; ++k) {
      const double t = k * p.dt;
      series.push_back({t, 0.0, volume(ScalarField(g, -p.a * t), g)});
    }
    CHECK(check_volume_law(series, p) <= 1e-14);
  }
  SUBCASE("constant energy: deviation is the trapezoid error") {
    const FlowParams p = params(1e-2, 1.0);
    const double E = 3.0, v0 = 5.0;
    std::vector<VolumeSample> series;
    for (int k = 0; k <= 100; ++k) {
      const double t = k * p.dt;
      series.push_back({t, E, std::exp(-2 * t) * (v0 + 4 * E * std::expm1(2 * t) / 2)});
    }
    const double dev = check_volume_law(series, p);
    CHECK(dev > 0.0);
    CHECK(dev <= 1e-3);
  }
}

TEST_CASE("volume bound margin") {
  const FlowParams p = params(1e-3, 1.0, 2.0, 1.0);
  CHECK(volume_bound_margin(0.0, 10.0, 10.0, 3.0, p) == doctest::Approx(3.0));
  CHECK(volume_bound_margin(1.0, 20.0, 10.0, 3.0, p) < 0.0);
}

TEST_CASE("dissipation residual") {
  SUBCASE("constant map is exactly zero") {
    const auto g = torus(16);
    const FlowParams p = params(1e-3, 0.0);
    const FlowState s0 = initial_state(constant_map(g, 0, 0.6, 0.8), g);
    const FlowState s1 = step(s0, p, g, kSphere);
    CHECK(dissipation_residual(s0, s1, p, g, kSphere) == 0.0);
  }
  SUBCASE("harmonic wrap") {
    const auto g = torus(64);
    const FlowParams p = params(1e-3, 0.0);
    const FlowState s0 = initial_state(wrap_map(g), g);
    const FlowState s1 = step(s0, p, g, kSphere);
    CHECK(dissipation_residual(s0, s1, p, g, kSphere) <= 1e-5);
  }
  SUBCASE("smooth data: residual is dominated by the spatial mismatch and shrinks with h") {
    auto residual = [&](int n) {
      const auto g = torus(n);
      const FlowParams p = params(1e-5, 0.0);
      const FlowState s0 = initial_state(smooth_sphere_map(g), g);
      return dissipation_residual(s0, step(s0, p, g, kSphere), p, g, kSphere);
    };
    const double r32 = residual(32), r64 = residual(64);
    MESSAGE("residual h-ratio " << r32 / r64);
    CHECK(r32 / r64 >= 3.5);
  }
}

TEST_CASE("weighted f_t moments") {
  const auto g = torus(32);
  FlowParams p = params(1e-3, 0.0);
  FlowState s = initial_state(smooth_sphere_map(g), g);
  for (int k = 0; k < 10; ++k) s = step(s, p, g, kSphere);
  SUBCASE("p = 2 global equals the dissipation integral") {
    CHECK(weighted_ft_moment(s, p, g, kSphere, 2) == dissipation_integral(s, p, g, kSphere));
  }
  SUBCASE("matches the direct definition from the velocity") {
    const MapField ft = map_velocity(s, p, g, kSphere);
    double m2 = 0.0, m4 = 0.0;
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) {
        double v2 = 0.0;
        for (double v : ft.at(i, j)) v2 += v * v;
        m2 += std::exp(2 * s.u(i, j)) * v2;
        m4 += std::exp(2 * s.u(i, j)) * v2 * v2;
      }
    CHECK(weighted_ft_moment(s, p, g, kSphere, 2) == doctest::Approx(m2 * g.cell_area()).epsilon(1e-12));
    CHECK(weighted_ft_moment(s, p, g, kSphere, 4) == doctest::Approx(m4 * g.cell_area()).epsilon(1e-12));
  }
  SUBCASE("cutoff localizes") {
    const BallRegion ball = make_ball({8, 8}, 0.8, g);
    const double local = weighted_ft_moment(s, p, g, kSphere, 2, &ball.phi);
    CHECK(local > 0.0);
    CHECK(local < weighted_ft_moment(s, p, g, kSphere, 2));
  }
  SUBCASE("constant and harmonic data") {
    const FlowState c = initial_state(constant_map(g, 1, 0, 0), g);
    CHECK(weighted_ft_moment(c, p, g, kSphere, 4) == 0.0);
    const auto g64 = torus(64);
    const FlowState w = initial_state(wrap_map(g64), g64);
    CHECK(weighted_ft_moment(w, p, g64, kSphere, 2) <= 1e-4);
  }
  CHECK_THROWS_AS(weighted_ft_moment(s, p, g, kSphere, 3), ConfigError);
}

TEST_CASE("cutoff and balls") {
  const auto g = torus(64);
  const double r = 0.8;
  const BallRegion ball = make_ball({20, 30}, r, g);
  double max_grad = 0.0;
  bool in_range = true, inside = true, outside = true;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const double v = ball.phi(i, j);
      const double d = torus_distance({i, j}, ball.center, g);
      if (v < 0 || v > 1) in_range = false;
      if (d <= r && v != 1.0) inside = false;
      if (d >= 2 * r && v != 0.0) outside = false;
      const double gx = (ball.phi((i + 1) % g.nx, j) - v) / g.hx();
      const double gy = (ball.phi(i, (j + 1) % g.ny) - v) / g.hy();
      max_grad = std::max(max_grad, std::hypot(gx, gy));
    }
  CHECK(in_range);
  CHECK(inside);
  CHECK(outside);
  CHECK(max_grad <= 4 / r + g.hx());
  CHECK_THROWS_AS(make_ball({0, 0}, 2.0, g), ConfigError);
  CHECK_THROWS_AS(make_ball({0, 0}, 0.0, g), ConfigError);
  CHECK(torus_distance({0, 0}, {63, 0}, g) == doctest::Approx(g.hx()));
}

TEST_CASE("local energy") {
  const auto g = torus(64);
  const double r = 0.7;
  const BallRegion ball = make_ball({10, 40}, r, g);
  CHECK(local_energy(constant_map(g, 0, 1, 0), ball, g) == 0.0);
  const double le = local_energy(wrap_map(g), ball, g);
  CHECK(le >= 0.5 * kPi * r * r * (1 - 5e-3));
  CHECK(le <= 0.5 * kPi * 4 * r * r * (1 + 5e-3));
  BallRegion all{{0, 0}, 1.0, ScalarField(g, 1.0)};
  const MapField f = smooth_sphere_map(g);
  CHECK(local_energy(f, all, g) == energy(f, g));
}

TEST_CASE("local energy estimate") {
  const auto g = torus(32);
  const FlowParams p = params(1e-3, 0.0);
  SUBCASE("constant map: margin equals the right side") {
    const MapField f = constant_map(g, 0, 0, 1);
    const double m = local_estimate_margin(f, f, 0.1, 0.2, {5, 5}, 0.8, p.a, 1.0, g);
    CHECK(m == doctest::Approx(16 / (2 * 0.64) * (std::exp(0.4) - std::exp(0.2))));
  }
  SUBCASE("harmonic wrap: positive margin") {
    const MapField f = wrap_map(g);
    Trajectory traj{{0.0, f, ScalarField(g)}, {0.05, f, ScalarField(g)}};
    CHECK(check_local_estimate(traj, 0, 1, {3, 7}, 0.8, p, energy(f, g), g) > 0.0);
    CHECK_THROWS_AS(check_local_estimate(traj, 1, 1, {3, 7}, 0.8, p, 1.0, g), ConfigError);
  }
}

TEST_CASE("concentration detection") {
  const auto g = torus(64);
  const MapField bump = bump_map(g, 3.0, 2.0, 0.35, 2.5);
  const Trajectory traj{{0.0, bump, ScalarField(g)}, {0.1, bump, ScalarField(g)}};
  const double e = energy(bump, g);
  const std::vector<double> radii{0.5, 1.0};

  CHECK(detect_concentration(traj, std::numeric_limits<double>::infinity(), radii, g).empty());

  SUBCASE("a single bump gives one merged event at its center") {
    const auto events = detect_concentration(traj, e / 10, radii, g);
    REQUIRE(events.size() == 1);
    const GridPoint expect{static_cast<int>(std::lround(3.0 / g.hx())), static_cast<int>(std::lround(2.0 / g.hy()))};
    CHECK(torus_distance(events[0].location, expect, g) <= 0.5);
    CHECK(events[0].time == 0.0);
    CHECK(events[0].local_energy > events[0].threshold);
    CHECK(events[0].radius == 0.5);
  }
  SUBCASE("cardinality is non-increasing in eps1") {
    const MapField two = bump_map(g, 1.5, 1.5, 0.3, 2.5);
    MapField both = bump;
    // second bump on the opposite side of the torus
    const MapField far = shifted(two, 32, 32);
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j)
        if (torus_distance({i, j}, {16 + 32, 16 + 32}, g) < 1.6)
          for (int c = 0; c < 3; ++c) both(i, j, c) = far(i, j, c);
    const Trajectory t2{{0.0, both, ScalarField(g)}};
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (double eps : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 1e3}) {
      const std::size_t n = detect_concentration(t2, eps, radii, g).size();
      CHECK(n <= prev);
      prev = n;
    }
    CHECK(detect_concentration(t2, e / 10, radii, g).size() == 2);
  }
  SUBCASE("harmonic wrap: no events below the ball area") {
    const auto fine = torus(128);
    const Trajectory w{{0.0, wrap_map(fine), ScalarField(fine)}};
    const double r = 0.35;  // 1/2 |B_2r| = 2 pi r^2 < 1
    const std::vector<double> small{r};
    CHECK(detect_concentration(w, 1.0, small, fine).empty());
  }
  CHECK_THROWS_AS(detect_concentration(traj, 1.0, {0.1}, g), ConfigError);
}

TEST_CASE("steady state check") {
  const auto g = torus(32);
  SUBCASE("constant map skips the density check") {
    FlowParams p = params(1e-2, 1.0);
    const RunResult r = run(constant_map(g, 0, 0, 1), p, g, kSphere);
    const auto rep = steady_state_check(r.final_state, p, g);
    CHECK_FALSE(rep.density_deviation.has_value());
    CHECK(rep.conformal_deviation == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  }
  SUBCASE("a=2, b=1 on the wrap: e^{2u} -> |df|^2/2, density -> 2") {
    FlowParams p = params(1e-3, 6.0, 2.0, 1.0);
    const RunResult r = run(wrap_map(g), p, g, kSphere);
    REQUIRE_FALSE(r.failed);
    const auto rep = steady_state_check(r.final_state, p, g);
    CHECK(rep.conformal_deviation <= std::exp(-2 * p.a * p.t_end) * 1.01 + 1e-3);
    REQUIRE(rep.density_deviation.has_value());
    CHECK(*rep.density_deviation <= 1e-3);
  }
}

TEST_CASE("diagnostics recorder") {
  const auto g = torus(32);
  FlowParams p = params(1e-3, 0.2, 1.0, 1.0);
  DiagnosticsRecorder rec(p, g, kSphere, true);
  run(smooth_sphere_map(g), p, g, kSphere, rec.observer(), 10);
  const auto& rs = rec.records();
  REQUIRE(rs.size() == 21);  // steps 0, 10, ..., 200
  CHECK(rec.snapshots().size() == rs.size());
  CHECK(rs[0].dissipation_residual == 0.0);
  CHECK(rec.initial_volume() == doctest::Approx(4 * kPi * kPi));
  for (std::size_t k = 0; k < rs.size(); ++k) {
    CHECK(rs[k].E >= 0.0);
    CHECK(rs[k].V > 0.0);
    CHECK(rs[k].volume_bound_margin >= -1e-6 * rec.initial_volume());
    CHECK(rs[k].volume_law_dev <= 1e-4);
    CHECK(rs[k].min_u <= rs[k].max_u);
    CHECK(rs[k].ft2_weighted == rs[k].dissipation);
    if (k > 0) CHECK(rs[k].E <= rs[k - 1].E + 10 * rs[k].dissipation_residual * p.dt);
  }
}
