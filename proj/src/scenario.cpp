#include "chf/scenario.hpp"

#include <cmath>
#include <numbers>

#include "chf/diagnostics.hpp"
#include "chf/geometry.hpp"
#include "chf/snapshot.hpp"

namespace chf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Shortest signed offset on a circle of length l.
double wrap_offset(double d, double l) { return d - l * std::round(d / l); }

}  // namespace

MapField constant_scenario(const GridGeometry& g, const TargetManifold& target) {
  MapField f(g, target.dim);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) f(i, j, target.dim - 1) = 1.0;
  return f;
}

MapField harmonic_wrap(const GridGeometry& g, const TargetManifold& target, int k) {
  if (k < 1) throw ConfigError("wrap number must be >= 1");
  if (target.dim < 2) throw ConfigError("harmonic_wrap needs a target of dimension >= 2");
  MapField f(g, target.dim);
  for (int i = 0; i < g.nx; ++i) {
    // phase from the integer index keeps the wrap exactly periodic
    const double th = kTwoPi * static_cast<double>(k) * i / g.nx;
    for (int j = 0; j < g.ny; ++j) {
      f(i, j, 0) = std::cos(th);
      f(i, j, 1) = std::sin(th);
    }
  }
  return f;
}

MapField bubble_candidate(const GridGeometry& g, double lambda, double cx, double cy) {
  g.validate();
  if (!(lambda > 2.0 * std::max(g.hx(), g.hy()))) throw ConfigError("bubble scale must exceed 2 grid spacings");
  if (!(4.0 * lambda <= 0.5 * std::min(g.lx, g.ly))) throw ConfigError("bubble scale too large for the torus");
  MapField f(g, 3);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const double dx = wrap_offset(g.hx() * i - cx, g.lx);
      const double dy = wrap_offset(g.hy() * j - cy, g.ly);
      const double psi = cutoff_profile(std::hypot(dx, dy), 2.0 * lambda);
      const double w1 = dx / lambda, w2 = dy / lambda;
      const double w2sum = w1 * w1 + w2 * w2;
      const double den = 1.0 + w2sum;
      f(i, j, 0) = psi * 2.0 * w1 / den;
      f(i, j, 1) = psi * 2.0 * w2 / den;
      f(i, j, 2) = psi * (w2sum - 1.0) / den + (1.0 - psi);
    }
  return project_to_target(std::move(f), TargetManifold::sphere(2));
}

MapField random_smooth(const GridGeometry& g, const TargetManifold& target, std::uint64_t seed, int modes,
                       double amplitude) {
  if (modes < 1) throw ConfigError("random_smooth needs modes >= 1");
  if (!(amplitude > 0.0 && amplitude <= 0.5)) throw ConfigError("random_smooth amplitude must be in (0, 0.5]");
  const int dim = target.dim;
  const int side = 2 * modes + 1;
  SplitMix64 rng(seed);
  // coefficients drawn component by component, p then q, cosine before sine
  std::vector<double> ca(static_cast<std::size_t>(dim) * side * side), cb(ca.size());
  double bound2 = 0.0;
  for (int c = 0; c < dim; ++c) {
    double bound = 0.0;
    for (int p = -modes; p <= modes; ++p)
      for (int q = -modes; q <= modes; ++q) {
        const std::size_t idx = (static_cast<std::size_t>(c) * side + (p + modes)) * side + (q + modes);
        ca[idx] = 2.0 * rng.uniform() - 1.0;
        cb[idx] = 2.0 * rng.uniform() - 1.0;
        const double w = 1.0 / (1.0 + p * p + q * q);
        ca[idx] *= w;
        cb[idx] *= w;
        bound += std::abs(ca[idx]) + std::abs(cb[idx]);
      }
    bound2 += bound * bound;
  }
  const double scale = bound2 > 0.0 ? amplitude / std::sqrt(bound2) : 0.0;

  MapField f = constant_scenario(g, target);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int c = 0; c < dim; ++c) {
        double r = 0.0;
        for (int p = -modes; p <= modes; ++p)
          for (int q = -modes; q <= modes; ++q) {
            const std::size_t idx = (static_cast<std::size_t>(c) * side + (p + modes)) * side + (q + modes);
            const double th = kTwoPi * (static_cast<double>(p) * i / g.nx + static_cast<double>(q) * j / g.ny);
            r += ca[idx] * std::cos(th) + cb[idx] * std::sin(th);
          }
        f(i, j, c) += scale * r;
      }
  return project_to_target(std::move(f), target);
}

MapField build_initial_data(const ScenarioSpec& s, const GridGeometry& g, const TargetManifold& target) {
  g.validate();
  target.validate();
  switch (s.kind) {
    case ScenarioSpec::Kind::Constant:
      return constant_scenario(g, target);
    case ScenarioSpec::Kind::HarmonicWrap:
      return harmonic_wrap(g, target, s.k);
    case ScenarioSpec::Kind::BubbleCandidate:
      if (!target.is_sphere() || target.dim != 3) throw ConfigError("bubble_candidate needs the 2-sphere target");
      return bubble_candidate(g, s.lambda, s.center_x.value_or(0.5 * g.lx), s.center_y.value_or(0.5 * g.ly));
    case ScenarioSpec::Kind::RandomSmooth:
      return random_smooth(g, target, s.seed, s.modes, s.amplitude);
    case ScenarioSpec::Kind::Custom: {
      const SnapshotData snap = read_snapshot(s.file);
      if (snap.f.nx() != g.nx || snap.f.ny() != g.ny || snap.f.dim() != target.dim)
        throw ConfigError("snapshot " + s.file + " does not match the configured grid and target");
      return project_to_target(snap.f, target);
    }
  }
  throw ConfigError("unknown scenario");
}

}  // namespace chf
