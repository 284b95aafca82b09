#pragma once

#include <vector>

#include "chf/field.hpp"
#include "chf/flow.hpp"

namespace chf {

/// Frames at the uniform times 0, dt, ..., nt*dt.
template <class Field>
struct SpaceTimeField {
  double dt = 0.0;
  std::vector<Field> frames;

  int steps() const { return static_cast<int>(frames.size()) - 1; }
  double time(int k) const { return k * dt; }
};

using SpaceTimeMap = SpaceTimeField<MapField>;
using SpaceTimeScalar = SpaceTimeField<ScalarField>;

/// Number of steps covering [0, T]; T must be a whole multiple of dt up to roundoff.
int time_steps(double T, double dt);

/// Implicit Euler for the plain heat equation h_t = Lap h, h(0) = f0.
SpaceTimeMap heat_flow(const MapField& f0, double T, double dt, const GridGeometry& g, double cg_tol = 1e-10);

/// Linear solve with frozen coefficients, frame by frame:
///   (I - dt e^{-2u_k} Lap) h_{k+1} = h_k + dt e^{-2u_k} A_{f_k}(df_k, df_k),  h_0 = f0.
/// The output is not projected onto the target.
SpaceTimeMap s1_solve(const SpaceTimeMap& f, const SpaceTimeScalar& u, const MapField& f0, const GridGeometry& g,
                      const TargetManifold& target, double cg_tol = 1e-10);

/// v_k = trapezoid of b|df|^2 e^{-2u} - a over [0, t_k], pointwise; v_0 = 0.
SpaceTimeScalar s2_solve(const SpaceTimeMap& f, const SpaceTimeScalar& u, const FlowParams& p,
                         const GridGeometry& g);

/// Discrete space-time L^2 norm of the pair: sqrt(sum w_k hx hy (|f_k|^2 + u_k^2))
/// with trapezoid time weights w_k (dt/2 at both ends, dt inside).
double spacetime_l2_norm(const SpaceTimeMap& f, const SpaceTimeScalar& u, const GridGeometry& g);
/// Norm of the difference of two pairs on the same grids.
double spacetime_l2_distance(const SpaceTimeMap& f1, const SpaceTimeScalar& u1, const SpaceTimeMap& f2,
                             const SpaceTimeScalar& u2, const GridGeometry& g);

struct PicardReport {
  int iterations = 0;
  /// d_k = ||S^{k+1} - S^k||
  std::vector<double> differences;
  /// r_k = d_{k+1} / d_k
  std::vector<double> ratios;
  bool converged = false;
  SpaceTimeMap f;
  SpaceTimeScalar u;

  double max_ratio() const;
};

/// Picard iteration of (f, u) -> (S1(f, u), S2(f, u)) from (heat flow of f0, 0).
/// Stops once d_k <= tol; running out of iterations is reported, not thrown.
PicardReport picard_iterate(const MapField& f0, double T, double dt, const FlowParams& p, const GridGeometry& g,
                            const TargetManifold& target, double tol, int max_iter);

/// The fixed point's map frames projected onto the target.
SpaceTimeMap projected_frames(const SpaceTimeMap& f, const TargetManifold& target);

}  // namespace chf
