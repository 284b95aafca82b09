#include "chf/solver.hpp"

#include <cmath>
#include <string>

#include "chf/parallel.hpp"

namespace chf {

void apply_shifted_laplacian(const ScalarField& w, double dt, const ScalarField& x, ScalarField& y,
                             const GridGeometry& g) {
  const int nx = g.nx, ny = g.ny;
  const double ax = 1.0 / (g.hx() * g.hx());
  const double ay = 1.0 / (g.hy() * g.hy());
  for_rows(nx, [&](int i) {
    const int ip = (i + 1) % nx, im = (i + nx - 1) % nx;
    for (int j = 0; j < ny; ++j) {
      const int jp = (j + 1) % ny, jm = (j + ny - 1) % ny;
      const double c = x(i, j);
      const double lap = (x(ip, j) - 2.0 * c + x(im, j)) * ax + (x(i, jp) - 2.0 * c + x(i, jm)) * ay;
      y(i, j) = w(i, j) * c - dt * lap;
    }
  });
}

namespace {

double dot(const ScalarField& a, const ScalarField& b) {
  const int ny = a.ny();
  return row_sum(a.nx(), [&](int i) {
    double s = 0.0;
    for (int j = 0; j < ny; ++j) s += a(i, j) * b(i, j);
    return s;
  });
}

}  // namespace

CgStats solve_shifted_laplacian(const ScalarField& w, double dt, const ScalarField& rhs, ScalarField& x,
                                const GridGeometry& g, double rel_tol, int max_iter) {
  require_match(w, g);
  require_match(rhs, g);
  require_match(x, g);
  if (max_iter < 0) max_iter = 10 * g.nx * g.ny;
  const int nx = g.nx, ny = g.ny;
  const double off = 2.0 * dt * (1.0 / (g.hx() * g.hx()) + 1.0 / (g.hy() * g.hy()));

  ScalarField r(g), z(g), p(g), q(g);
  apply_shifted_laplacian(w, dt, x, q, g);
  for_rows(nx, [&](int i) {
    for (int j = 0; j < ny; ++j) {
      r(i, j) = rhs(i, j) - q(i, j);
      z(i, j) = r(i, j) / (w(i, j) + off);
      p(i, j) = z(i, j);
    }
  });

  const double bnorm = std::sqrt(dot(rhs, rhs));
  CgStats stats;
  if (bnorm == 0.0) {
    // Only solution is zero; the operator is nonsingular.
    for (double& v : x.values()) v = 0.0;
    return stats;
  }
  const double target = rel_tol * bnorm;
  double rnorm = std::sqrt(dot(r, r));
  double rz = dot(r, z);

  while (rnorm > target) {
    if (stats.iterations >= max_iter)
      throw SolverError("conjugate gradient did not converge in " + std::to_string(max_iter) +
                        " iterations (relative residual " + std::to_string(rnorm / bnorm) + ")");
    if (!std::isfinite(rnorm)) throw SolverError("conjugate gradient produced a non-finite residual");
    apply_shifted_laplacian(w, dt, p, q, g);
    const double alpha = rz / dot(p, q);
    for_rows(nx, [&](int i) {
      for (int j = 0; j < ny; ++j) {
        x(i, j) += alpha * p(i, j);
        r(i, j) -= alpha * q(i, j);
        z(i, j) = r(i, j) / (w(i, j) + off);
      }
    });
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for_rows(nx, [&](int i) {
      for (int j = 0; j < ny; ++j) p(i, j) = z(i, j) + beta * p(i, j);
    });
    rnorm = std::sqrt(dot(r, r));
    ++stats.iterations;
  }
  stats.relative_residual = rnorm / bnorm;
  return stats;
}

CgStats solve_shifted_laplacian(const ScalarField& w, double dt, const MapField& rhs, MapField& x,
                                const GridGeometry& g, double rel_tol, int max_iter) {
  require_match(rhs, g);
  require_match(x, g);
  const int dim = rhs.dim();
  CgStats worst;
  ScalarField b(g), xc(g);
  for (int c = 0; c < dim; ++c) {
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) {
        b(i, j) = rhs(i, j, c);
        xc(i, j) = x(i, j, c);
      }
    const CgStats s = solve_shifted_laplacian(w, dt, b, xc, g, rel_tol, max_iter);
    worst.iterations = std::max(worst.iterations, s.iterations);
    worst.relative_residual = std::max(worst.relative_residual, s.relative_residual);
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) x(i, j, c) = xc(i, j);
  }
  return worst;
}

}  // namespace chf
