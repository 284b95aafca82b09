#pragma once

#include "chf/field.hpp"

namespace chf {

struct CgStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// y = w*x - dt*Lap(x). With w > 0 this operator is symmetric positive definite.
void apply_shifted_laplacian(const ScalarField& w, double dt, const ScalarField& x, ScalarField& y,
                             const GridGeometry& g);

/// Solves (w - dt*Lap) x = rhs by Jacobi-preconditioned conjugate gradients,
/// matrix-free. x holds the initial guess on entry. Stops at
/// ||r|| <= rel_tol*||rhs||; throws SolverError after max_iter iterations
/// (default 10*nx*ny).
CgStats solve_shifted_laplacian(const ScalarField& w, double dt, const ScalarField& rhs, ScalarField& x,
                                const GridGeometry& g, double rel_tol = 1e-10, int max_iter = -1);

/// Componentwise version for vector fields; x holds the initial guess on entry.
CgStats solve_shifted_laplacian(const ScalarField& w, double dt, const MapField& rhs, MapField& x,
                                const GridGeometry& g, double rel_tol = 1e-10, int max_iter = -1);

}  // namespace chf
