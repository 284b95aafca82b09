#include "chf/flow.hpp"

#include <cmath>
#include <string>

#include "chf/geometry.hpp"
#include "chf/parallel.hpp"
#include "chf/solver.hpp"

namespace chf {

void FlowParams::validate() const {
  if (!(a > 0.0)) throw ConfigError("a must be > 0");
  if (!(b > 0.0)) throw ConfigError("b must be > 0");
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  if (!(t_end >= 0.0)) throw ConfigError("t_end must be >= 0");
  if (!(on_manifold_tol > 0.0)) throw ConfigError("on_manifold_tol must be > 0");
  if (!(safety > 0.0)) throw ConfigError("safety must be > 0");
  if (max_substeps < 1) throw ConfigError("max_substeps must be >= 1");
  if (!(cg_tol > 0.0)) throw ConfigError("cg_tol must be > 0");
}

bool FlowParams::below_curvature_threshold(const TargetManifold& target) const {
  const double cn = target.curvature_bound();
  return b < cn * cn;
}

long FlowParams::step_count() const {
  const double n = t_end / dt;
  const double r = std::round(n);
  if (std::abs(n - r) <= 1e-9 * std::max(1.0, n)) return static_cast<long>(r);
  return static_cast<long>(std::ceil(n));
}

void HistoryAccumulator::advance(const ScalarField& df2, double t, double a, double dt) {
  const double weight = std::exp(2.0 * a * t);
  const double half = 0.5 * dt;
  const int ny = J.ny();
  for_rows(J.nx(), [&](int i) {
    for (int j = 0; j < ny; ++j) {
      const double next = weight * df2(i, j);
      J(i, j) += half * (last_integrand(i, j) + next);
      last_integrand(i, j) = next;
    }
  });
}

FlowState initial_state(const MapField& f0, const GridGeometry& g) {
  require_match(f0, g);
  FlowState s;
  s.f = f0;
  s.u = ScalarField(g, 0.0);
  s.history.J = ScalarField(g, 0.0);
  s.history.last_integrand = energy_density(f0, g);
  return s;
}

ScalarField u_closed_form(const ScalarField& J, double t, double a, double b) {
  ScalarField u(J.nx(), J.ny());
  const double decay = -a * t;
  const int ny = J.ny();
  for_rows(J.nx(), [&](int i) {
    for (int j = 0; j < ny; ++j) u(i, j) = decay + 0.5 * std::log1p(2.0 * b * J(i, j));
  });
  return u;
}

namespace {

double u_rate(double u, double df2, double a, double b) { return b * std::exp(-2.0 * u) * df2 - a; }

double rk4_scalar(double u, double e0, double e1, double a, double b, double dt) {
  const double em = 0.5 * (e0 + e1);
  const double k1 = u_rate(u, e0, a, b);
  const double k2 = u_rate(u + 0.5 * dt * k1, em, a, b);
  const double k3 = u_rate(u + 0.5 * dt * k2, em, a, b);
  const double k4 = u_rate(u + dt * k3, e1, a, b);
  return u + dt * ((k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0);
}

}  // namespace

ScalarField step_u_ode(const ScalarField& u, const ScalarField& df2, const FlowParams& p, double dt) {
  return step_u_ode(u, df2, df2, p, dt);
}

ScalarField step_u_ode(const ScalarField& u, const ScalarField& df2_start, const ScalarField& df2_end,
                       const FlowParams& p, double dt) {
  ScalarField out(u.nx(), u.ny());
  const int ny = u.ny();
  for_rows(u.nx(), [&](int i) {
    for (int j = 0; j < ny; ++j) out(i, j) = rk4_scalar(u(i, j), df2_start(i, j), df2_end(i, j), p.a, p.b, dt);
  });
  if (!all_finite(out)) throw DivergenceError("u ODE step produced NaN/Inf", -1);
  return out;
}

namespace {

/// e^{-2u}, or 1 for the classic flow.
ScalarField inverse_conformal_weight(const FlowState& s, const FlowParams& p) {
  ScalarField w(s.u.nx(), s.u.ny(), 1.0);
  if (p.baseline_classic) return w;
  const int ny = w.ny();
  for_rows(w.nx(), [&](int i) {
    for (int j = 0; j < ny; ++j) w(i, j) = std::exp(-2.0 * s.u(i, j));
  });
  return w;
}

/// w * tau(f), tangential part
MapField velocity(const MapField& f, const ScalarField& w, const FlowParams& p, const GridGeometry& g,
                  const TargetManifold& target) {
  MapField v = tangential_tension(f, target, g, p.on_manifold_tol);
  const int ny = g.ny, dim = v.dim();
  for_rows(g.nx, [&](int i) {
    for (int j = 0; j < ny; ++j) {
      const double wij = w(i, j);
      for (int c = 0; c < dim; ++c) v(i, j, c) *= wij;
    }
  });
  return v;
}

/// base + h * v, projected when requested.
MapField advance(const MapField& base, double h, const MapField& v, const FlowParams& p,
                 const TargetManifold& target) {
  MapField out = base;
  auto o = out.values();
  auto vv = v.values();
  const std::size_t row = static_cast<std::size_t>(base.ny()) * base.dim();
  for_rows(base.nx(), [&](int i) {
    const std::size_t k0 = static_cast<std::size_t>(i) * row;
    for (std::size_t k = k0; k < k0 + row; ++k) o[k] += h * vv[k];
  });
  return p.project ? project_to_target(std::move(out), target) : out;
}

MapField advance_f(const FlowState& s, double h, const ScalarField& w, const FlowParams& p,
                   const GridGeometry& g, const TargetManifold& target) {
  switch (p.f_scheme) {
    case FScheme::Euler:
      return advance(s.f, h, velocity(s.f, w, p, g, target), p, target);
    case FScheme::RK4: {
      const MapField k1 = velocity(s.f, w, p, g, target);
      const MapField k2 = velocity(advance(s.f, 0.5 * h, k1, p, target), w, p, g, target);
      const MapField k3 = velocity(advance(s.f, 0.5 * h, k2, p, target), w, p, g, target);
      const MapField k4 = velocity(advance(s.f, h, k3, p, target), w, p, g, target);
      MapField sum = k1;
      auto o = sum.values();
      auto a2 = k2.values(), a3 = k3.values(), a4 = k4.values();
      for (std::size_t k = 0; k < o.size(); ++k) o[k] = (o[k] + 2.0 * a2[k] + 2.0 * a3[k] + a4[k]) / 6.0;
      return advance(s.f, h, sum, p, target);
    }
    case FScheme::SemiImplicit: {
      // (e^{2u} - h Lap) f_next = e^{2u} f + h A_f(df,df)
      ScalarField mass(g);
      for (std::size_t k = 0; k < mass.size(); ++k) mass[k] = 1.0 / w[k];
      MapField rhs = s.f;
      const ScalarField df2 = target.is_sphere() ? energy_density(s.f, g) : ScalarField(g, 0.0);
      const int ny = g.ny, dim = rhs.dim();
      for_rows(g.nx, [&](int i) {
        for (int j = 0; j < ny; ++j)
          for (int c = 0; c < dim; ++c) rhs(i, j, c) = mass(i, j) * s.f(i, j, c) + h * df2(i, j) * s.f(i, j, c);
      });
      MapField next = s.f;
      solve_shifted_laplacian(mass, h, rhs, next, g, p.cg_tol);
      return p.project ? project_to_target(std::move(next), target) : next;
    }
  }
  return s.f;
}

ScalarField exp_minus_2(const ScalarField& u) {
  ScalarField w(u.nx(), u.ny());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(-2.0 * u[k]);
  return w;
}

/// b e^{-2u}|df|^2 - a
ScalarField u_velocity(const ScalarField& u, const MapField& f, const FlowParams& p, const GridGeometry& g) {
  const ScalarField df2 = energy_density(f, g);
  ScalarField v(g);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = u_rate(u[k], df2[k], p.a, p.b);
  return v;
}

ScalarField advance_u(const ScalarField& u, double h, const ScalarField& v) {
  ScalarField out = u;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += h * v[k];
  return out;
}

/// Classical RK4 on the pair (f, u), projecting every stage.
void coupled_rk4(FlowState& s, double h, const FlowParams& p, const GridGeometry& g, const TargetManifold& target) {
  const MapField kf1 = velocity(s.f, exp_minus_2(s.u), p, g, target);
  const ScalarField ku1 = u_velocity(s.u, s.f, p, g);

  const MapField f2 = advance(s.f, 0.5 * h, kf1, p, target);
  const ScalarField u2 = advance_u(s.u, 0.5 * h, ku1);
  const MapField kf2 = velocity(f2, exp_minus_2(u2), p, g, target);
  const ScalarField ku2 = u_velocity(u2, f2, p, g);

  const MapField f3 = advance(s.f, 0.5 * h, kf2, p, target);
  const ScalarField u3 = advance_u(s.u, 0.5 * h, ku2);
  const MapField kf3 = velocity(f3, exp_minus_2(u3), p, g, target);
  const ScalarField ku3 = u_velocity(u3, f3, p, g);

  const MapField f4 = advance(s.f, h, kf3, p, target);
  const ScalarField u4 = advance_u(s.u, h, ku3);
  const MapField kf4 = velocity(f4, exp_minus_2(u4), p, g, target);
  const ScalarField ku4 = u_velocity(u4, f4, p, g);

  MapField kf = kf1;
  auto o = kf.values();
  auto a2 = kf2.values(), a3 = kf3.values(), a4 = kf4.values();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] = (o[k] + 2.0 * a2[k] + 2.0 * a3[k] + a4[k]) / 6.0;
  ScalarField ku = ku1;
  for (std::size_t k = 0; k < ku.size(); ++k) ku[k] = (ku[k] + 2.0 * ku2[k] + 2.0 * ku3[k] + ku4[k]) / 6.0;

  s.f = advance(s.f, h, kf, p, target);
  s.u = advance_u(s.u, h, ku);
}

void substep(FlowState& s, double h, double t_next, const FlowParams& p, const GridGeometry& g,
             const TargetManifold& target) {
  if (p.f_scheme == FScheme::RK4 && p.u_scheme == UScheme::DirectODE && !p.baseline_classic) {
    coupled_rk4(s, h, p, g, target);
    if (!all_finite(s.f) || !all_finite(s.u)) throw DivergenceError("state became non-finite", s.step + 1);
    s.history.advance(energy_density(s.f, g), t_next, p.a, h);
    if (!all_finite(s.history.J)) throw DivergenceError("history integral became non-finite", s.step + 1);
    s.t = t_next;
    return;
  }
  const ScalarField w = inverse_conformal_weight(s, p);
  MapField f_next = advance_f(s, h, w, p, g, target);
  if (!all_finite(f_next)) throw DivergenceError("map field became non-finite", s.step + 1);

  if (!p.baseline_classic) {
    const ScalarField df2 = energy_density(f_next, g);
    if (p.u_scheme == UScheme::DirectODE) {
      const ScalarField df2_start = energy_density(s.f, g);
      try {
        s.u = step_u_ode(s.u, df2_start, df2, p, h);
      } catch (const DivergenceError&) {
        throw DivergenceError("conformal factor ODE became non-finite", s.step + 1);
      }
      s.history.advance(df2, t_next, p.a, h);
    } else {
      s.history.advance(df2, t_next, p.a, h);
      s.u = u_closed_form(s.history.J, t_next, p.a, p.b);
    }
    if (!all_finite(s.u) || !all_finite(s.history.J))
      throw DivergenceError("conformal factor became non-finite", s.step + 1);
  }
  s.f = std::move(f_next);
  s.t = t_next;
}

}  // namespace

double stable_dt(const FlowState& s, const FlowParams& p, const GridGeometry& g) {
  const double h = std::min(g.hx(), g.hy());
  const double wmax = p.baseline_classic ? 1.0 : std::exp(-2.0 * min_value(s.u));
  return p.safety * h * h / (4.0 * wmax);
}

FlowState step(const FlowState& s, const FlowParams& p, const GridGeometry& g, const TargetManifold& target) {
  require_match(s.f, g);
  require_match(s.u, g);
  FlowState next = s;
  const double t_end = static_cast<double>(s.step + 1) * p.dt;

  long pieces = 1;
  if (p.f_scheme != FScheme::SemiImplicit) {
    const double limit = stable_dt(s, p, g);
    const double need = std::ceil(p.dt / limit);
    if (std::isfinite(need) && need > 1.0 && need <= p.max_substeps) pieces = static_cast<long>(need);
  }
  const double h = p.dt / static_cast<double>(pieces);
  for (long k = 0; k < pieces; ++k) {
    const double t_next = k + 1 == pieces ? t_end : s.t + static_cast<double>(k + 1) * h;
    substep(next, h, t_next, p, g, target);
  }
  next.step = s.step + 1;
  return next;
}

RunResult run_from(FlowState s0, const FlowParams& p, const GridGeometry& g, const TargetManifold& target,
                   const Observer& observer, int cadence) {
  p.validate();
  if (cadence < 1) throw ConfigError("record cadence must be >= 1");
  RunResult result;
  const long total = p.step_count();
  FlowState s = std::move(s0);
  if (s.step < total && observer) {
    observer(s);
    result.record_times.push_back(s.t);
  }
  while (s.step < total) {
    try {
      s = step(s, p, g, target);
    } catch (const Error& e) {
      result.failed = true;
      result.exit_status = e.exit_status();
      result.failed_step = s.step + 1;
      result.failure = e.what();
      break;
    }
    if (observer && s.step % cadence == 0) {
      observer(s);
      result.record_times.push_back(s.t);
    }
  }
  result.final_state = std::move(s);
  return result;
}

RunResult run(const MapField& f0, const FlowParams& p, const GridGeometry& g, const TargetManifold& target,
              const Observer& observer, int cadence) {
  g.validate();
  target.validate();
  if (f0.dim() != target.dim) throw ConfigError("initial map dimension does not match target");
  if (target.is_sphere() && sphere_deviation(f0) > p.on_manifold_tol)
    throw ConfigError("initial map is not on the sphere");
  return run_from(initial_state(f0, g), p, g, target, observer, cadence);
}

}  // namespace chf
