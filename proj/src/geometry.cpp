#include "chf/geometry.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "chf/parallel.hpp"

namespace chf {

namespace {

// Points already this close to unit length are left alone, which makes the
// projection idempotent bit for bit.
constexpr double kUnitSlack = 4.0 * std::numeric_limits<double>::epsilon();

struct Stencil {
  double inv_hx2;
  double inv_hy2;
  double inv_2hx;
  double inv_2hy;

  explicit Stencil(const GridGeometry& g)
      : inv_hx2(1.0 / (g.hx() * g.hx())),
        inv_hy2(1.0 / (g.hy() * g.hy())),
        inv_2hx(1.0 / (2.0 * g.hx())),
        inv_2hy(1.0 / (2.0 * g.hy())) {}
};

}  // namespace

ScalarField laplacian(const ScalarField& s, const GridGeometry& g) {
  require_match(s, g);
  const Stencil st(g);
  const int nx = g.nx, ny = g.ny;
  ScalarField out(g);
  for_rows(nx, [&](int i) {
    const int ip = (i + 1) % nx, im = (i + nx - 1) % nx;
    for (int j = 0; j < ny; ++j) {
      const int jp = (j + 1) % ny, jm = (j + ny - 1) % ny;
      const double c = s(i, j);
      out(i, j) = (s(ip, j) - 2.0 * c + s(im, j)) * st.inv_hx2 + (s(i, jp) - 2.0 * c + s(i, jm)) * st.inv_hy2;
    }
  });
  return out;
}

MapField laplacian(const MapField& f, const GridGeometry& g) {
  require_match(f, g);
  const Stencil st(g);
  const int nx = g.nx, ny = g.ny, dim = f.dim();
  MapField out(g, dim);
  for_rows(nx, [&](int i) {
    const int ip = (i + 1) % nx, im = (i + nx - 1) % nx;
    for (int j = 0; j < ny; ++j) {
      const int jp = (j + 1) % ny, jm = (j + ny - 1) % ny;
      for (int c = 0; c < dim; ++c) {
        const double v = f(i, j, c);
        out(i, j, c) = (f(ip, j, c) - 2.0 * v + f(im, j, c)) * st.inv_hx2 +
                       (f(i, jp, c) - 2.0 * v + f(i, jm, c)) * st.inv_hy2;
      }
    }
  });
  return out;
}

ScalarField energy_density(const MapField& f, const GridGeometry& g) {
  require_match(f, g);
  const Stencil st(g);
  const int nx = g.nx, ny = g.ny, dim = f.dim();
  ScalarField out(g);
  for_rows(nx, [&](int i) {
    const int ip = (i + 1) % nx, im = (i + nx - 1) % nx;
    for (int j = 0; j < ny; ++j) {
      const int jp = (j + 1) % ny, jm = (j + ny - 1) % ny;
      double s = 0.0;
      for (int c = 0; c < dim; ++c) {
        const double dx = (f(ip, j, c) - f(im, j, c)) * st.inv_2hx;
        const double dy = (f(i, jp, c) - f(i, jm, c)) * st.inv_2hy;
        s += dx * dx + dy * dy;
      }
      out(i, j) = s;
    }
  });
  return out;
}

MapField tension_field(const MapField& f, const TargetManifold& target, const GridGeometry& g,
                       double on_manifold_tol) {
  require_match(f, g);
  if (f.dim() != target.dim) throw ConfigError("map dimension does not match target embedding");
  MapField tau = laplacian(f, g);
  if (!target.is_sphere()) return tau;

  const double dev = sphere_deviation(f);
  if (!(dev <= 1e3 * on_manifold_tol))
    throw StateCorruptionError("map is off the sphere by " + std::to_string(dev));

  const ScalarField df2 = energy_density(f, g);
  const int ny = g.ny, dim = f.dim();
  for_rows(g.nx, [&](int i) {
    for (int j = 0; j < ny; ++j) {
      const double e = df2(i, j);
      for (int c = 0; c < dim; ++c) tau(i, j, c) += e * f(i, j, c);
    }
  });
  return tau;
}

MapField tangential_tension(const MapField& f, const TargetManifold& target, const GridGeometry& g,
                            double on_manifold_tol) {
  MapField tau = tension_field(f, target, g, on_manifold_tol);
  if (!target.is_sphere()) return tau;
  const int ny = g.ny, dim = f.dim();
  for_rows(g.nx, [&](int i) {
    for (int j = 0; j < ny; ++j) {
      double n2 = 0.0, along = 0.0;
      for (int c = 0; c < dim; ++c) {
        n2 += f(i, j, c) * f(i, j, c);
        along += tau(i, j, c) * f(i, j, c);
      }
      const double k = along / n2;
      for (int c = 0; c < dim; ++c) tau(i, j, c) -= k * f(i, j, c);
    }
  });
  return tau;
}

MapField project_to_target(MapField raw, const TargetManifold& target) {
  if (!target.is_sphere()) return raw;
  const int nx = raw.nx(), ny = raw.ny(), dim = raw.dim();
  const double worst = row_max(nx, [&](int i) {
    double bad = 0.0;
    for (int j = 0; j < ny; ++j) {
      auto p = raw.at(i, j);
      double n2 = 0.0;
      for (double v : p) n2 += v * v;
      const double n = std::sqrt(n2);
      if (!(n >= 0.5)) {
        bad = 1.0;
        continue;
      }
      if (std::abs(n - 1.0) <= kUnitSlack) continue;
      for (int c = 0; c < dim; ++c) p[c] /= n;
    }
    return bad;
  });
  if (worst > 0.0) throw ProjectionDegenerateError("cannot project a point with |f| < 0.5 onto the sphere");
  return raw;
}

double sphere_deviation(const MapField& f) {
  const int ny = f.ny();
  return row_max(f.nx(), [&](int i) {
    double m = 0.0;
    for (int j = 0; j < ny; ++j) {
      double n2 = 0.0;
      for (double v : f.at(i, j)) n2 += v * v;
      const double d = std::abs(std::sqrt(n2) - 1.0);
      if (!(d <= m)) m = d;  // propagates NaN
    }
    return m;
  });
}

double inner(const ScalarField& p, const ScalarField& q, const GridGeometry& g) {
  require_match(p, g);
  require_match(q, g);
  const int ny = g.ny;
  return row_sum(g.nx, [&](int i) {
    double s = 0.0;
    for (int j = 0; j < ny; ++j) s += p(i, j) * q(i, j);
    return s;
  }) * g.cell_area();
}

double forward_gradient_inner(const ScalarField& p, const ScalarField& q, const GridGeometry& g) {
  require_match(p, g);
  require_match(q, g);
  const int nx = g.nx, ny = g.ny;
  const double hx = g.hx(), hy = g.hy();
  return row_sum(nx, [&](int i) {
    const int ip = (i + 1) % nx;
    double s = 0.0;
    for (int j = 0; j < ny; ++j) {
      const int jp = (j + 1) % ny;
      const double px = (p(ip, j) - p(i, j)) / hx, qx = (q(ip, j) - q(i, j)) / hx;
      const double py = (p(i, jp) - p(i, j)) / hy, qy = (q(i, jp) - q(i, j)) / hy;
      s += px * qx + py * qy;
    }
    return s;
  }) * g.cell_area();
}

double integrate(const ScalarField& s, const GridGeometry& g) {
  require_match(s, g);
  const int ny = g.ny;
  return row_sum(g.nx, [&](int i) {
    double acc = 0.0;
    for (int j = 0; j < ny; ++j) acc += s(i, j);
    return acc;
  }) * g.cell_area();
}

double max_value(const ScalarField& s) {
  const int ny = s.ny();
  return row_max(s.nx(), [&](int i) {
    double m = s(i, 0);
    for (int j = 1; j < ny; ++j) m = std::max(m, s(i, j));
    return m;
  });
}

double min_value(const ScalarField& s) {
  const int ny = s.ny();
  return -row_max(s.nx(), [&](int i) {
    double m = -s(i, 0);
    for (int j = 1; j < ny; ++j) m = std::max(m, -s(i, j));
    return m;
  });
}

}  // namespace chf
