#include "chf/reference.hpp"

#include <cmath>
#include <limits>

namespace chf::reference {

namespace {

int wrap(int k, int n) { return ((k % n) + n) % n; }

}  // namespace

ScalarField laplacian(const ScalarField& s, const GridGeometry& g) {
  require_match(s, g);
  const double ax = 1.0 / (g.hx() * g.hx());
  const double ay = 1.0 / (g.hy() * g.hy());
  ScalarField out(g);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const double c = s(i, j);
      out(i, j) = (s(wrap(i + 1, g.nx), j) - 2.0 * c + s(wrap(i - 1, g.nx), j)) * ax +
                  (s(i, wrap(j + 1, g.ny)) - 2.0 * c + s(i, wrap(j - 1, g.ny))) * ay;
    }
  return out;
}

MapField laplacian(const MapField& f, const GridGeometry& g) {
  require_match(f, g);
  const double ax = 1.0 / (g.hx() * g.hx());
  const double ay = 1.0 / (g.hy() * g.hy());
  MapField out(g, f.dim());
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int c = 0; c < f.dim(); ++c) {
        const double v = f(i, j, c);
        out(i, j, c) = (f(wrap(i + 1, g.nx), j, c) - 2.0 * v + f(wrap(i - 1, g.nx), j, c)) * ax +
                       (f(i, wrap(j + 1, g.ny), c) - 2.0 * v + f(i, wrap(j - 1, g.ny), c)) * ay;
      }
  return out;
}

ScalarField energy_density(const MapField& f, const GridGeometry& g) {
  require_match(f, g);
  const double bx = 1.0 / (2.0 * g.hx());
  const double by = 1.0 / (2.0 * g.hy());
  ScalarField out(g);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      double s = 0.0;
      for (int c = 0; c < f.dim(); ++c) {
        const double dx = (f(wrap(i + 1, g.nx), j, c) - f(wrap(i - 1, g.nx), j, c)) * bx;
        const double dy = (f(i, wrap(j + 1, g.ny), c) - f(i, wrap(j - 1, g.ny), c)) * by;
        s += dx * dx + dy * dy;
      }
      out(i, j) = s;
    }
  return out;
}

MapField tension_field(const MapField& f, const TargetManifold& target, const GridGeometry& g) {
  MapField tau = laplacian(f, g);
  if (!target.is_sphere()) return tau;
  const ScalarField e = energy_density(f, g);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int c = 0; c < f.dim(); ++c) tau(i, j, c) += e(i, j) * f(i, j, c);
  return tau;
}

MapField tangential_tension(const MapField& f, const TargetManifold& target, const GridGeometry& g) {
  MapField tau = tension_field(f, target, g);
  if (!target.is_sphere()) return tau;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      double n2 = 0.0, along = 0.0;
      for (int c = 0; c < f.dim(); ++c) {
        n2 += f(i, j, c) * f(i, j, c);
        along += tau(i, j, c) * f(i, j, c);
      }
      const double k = along / n2;
      for (int c = 0; c < f.dim(); ++c) tau(i, j, c) -= k * f(i, j, c);
    }
  return tau;
}

MapField project_to_target(MapField raw, const TargetManifold& target) {
  if (!target.is_sphere()) return raw;
  for (int i = 0; i < raw.nx(); ++i)
    for (int j = 0; j < raw.ny(); ++j) {
      double n2 = 0.0;
      for (double v : raw.at(i, j)) n2 += v * v;
      const double n = std::sqrt(n2);
      if (!(n >= 0.5)) throw ProjectionDegenerateError("reference projection: |f| < 0.5");
      if (std::abs(n - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) continue;
      for (double& v : raw.at(i, j)) v /= n;
    }
  return raw;
}

double integrate(const ScalarField& s, const GridGeometry& g) {
  double acc = 0.0;
  for (double v : s.values()) acc += v;
  return acc * g.cell_area();
}

ScalarField apply_shifted_laplacian(const ScalarField& w, double dt, const ScalarField& x, const GridGeometry& g) {
  const ScalarField lap = laplacian(x, g);
  ScalarField y(g);
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = w[k] * x[k] - dt * lap[k];
  return y;
}

}  // namespace chf::reference
