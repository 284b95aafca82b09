#pragma once

#include <functional>
#include <optional>
#include <string>

#include "chf/field.hpp"

namespace chf {

/// ClosedForm derives u from the history integral; DirectODE integrates u_t directly.
enum class UScheme { ClosedForm, DirectODE };
/// RK4 combined with DirectODE advances (f, u) as one coupled RK4 system.
/// SemiImplicit treats the Laplacian implicitly with u and the curvature term frozen.
enum class FScheme { Euler, RK4, SemiImplicit };

struct FlowParams {
  double a = 1.0;
  double b = 1.0;
  double dt = 1e-3;
  double t_end = 1.0;
  UScheme u_scheme = UScheme::ClosedForm;
  FScheme f_scheme = FScheme::Euler;
  /// Freeze u = 0 and run the classical harmonic map heat flow f_t = tau(f).
  bool baseline_classic = false;
  double on_manifold_tol = 1e-9;
  bool project = true;
  /// Explicit schemes split a step into substeps of at most
  /// safety * min(hx,hy)^2 / (4 max e^{-2u}).
  double safety = 0.9;
  /// Above this many substeps the guard gives up and takes the raw step.
  int max_substeps = 1000;
  double cg_tol = 1e-10;

  /// Throws ConfigError on a > 0, b > 0, dt > 0, t_end >= 0 violations.
  void validate() const;
  /// The local energy estimates assume b >= C_N^2; smaller b is allowed but flagged.
  bool below_curvature_threshold(const TargetManifold& target) const;
  long step_count() const;
};

/// Running integral J(x,t) = int_0^t e^{2as} |df|^2(x,s) ds by the trapezoidal rule.
struct HistoryAccumulator {
  ScalarField J;
  /// e^{2at}|df|^2 at the time J was last advanced.
  ScalarField last_integrand;

  /// Adds the trapezoid over [t - dt, t] given |df|^2 at the new time t.
  void advance(const ScalarField& df2, double t, double a, double dt);
};

struct FlowState {
  MapField f;
  ScalarField u;
  HistoryAccumulator history;
  double t = 0.0;
  long step = 0;
};

/// f(0) = f0, u(0) = 0, J(0) = 0.
FlowState initial_state(const MapField& f0, const GridGeometry& g);

/// u = -a t + log(1 + 2bJ)/2, i.e. e^{2u} = e^{-2at}(1 + 2bJ).
ScalarField u_closed_form(const ScalarField& J, double t, double a, double b);

/// One RK4 step of u' = b e^{-2u}|df|^2 - a with |df|^2 frozen over the step.
ScalarField step_u_ode(const ScalarField& u, const ScalarField& df2, const FlowParams& p, double dt);
/// Same, with |df|^2 interpolated linearly between the step's endpoints.
ScalarField step_u_ode(const ScalarField& u, const ScalarField& df2_start, const ScalarField& df2_end,
                       const FlowParams& p, double dt);

/// Largest explicit step allowed by the stability guard for the current u.
double stable_dt(const FlowState& s, const FlowParams& p, const GridGeometry& g);

/// Advances the coupled system by one step of p.dt. Throws DivergenceError on
/// NaN/Inf and propagates ProjectionDegenerateError / SolverError.
FlowState step(const FlowState& s, const FlowParams& p, const GridGeometry& g, const TargetManifold& target);

using Observer = std::function<void(const FlowState&)>;

struct RunResult {
  FlowState final_state;
  /// Times at which the observer was invoked.
  std::vector<double> record_times;
  bool failed = false;
  int exit_status = 0;
  long failed_step = -1;
  std::string failure;
};

/// Steps from s0 to p.t_end. The observer sees step 0 and every `cadence`
/// steps after it; with t_end = 0 it is never called. Errors stop the run and
/// are reported in the result together with the last good state.
RunResult run_from(FlowState s0, const FlowParams& p, const GridGeometry& g, const TargetManifold& target,
                   const Observer& observer = {}, int cadence = 1);

RunResult run(const MapField& f0, const FlowParams& p, const GridGeometry& g, const TargetManifold& target,
              const Observer& observer = {}, int cadence = 1);

}  // namespace chf
