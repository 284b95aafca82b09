#include "chf/fixed_point.hpp"

#include <algorithm>
#include <cmath>

#include "chf/geometry.hpp"
#include "chf/parallel.hpp"
#include "chf/solver.hpp"

namespace chf {

int time_steps(double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0)) throw ConfigError("fixed-point horizon and step must be positive");
  const double n = T / dt;
  const double r = std::round(n);
  if (r < 1.0 || std::abs(n - r) > 1e-9 * std::max(1.0, n))
    throw ConfigError("fixed-point horizon must be a whole number of steps");
  return static_cast<int>(r);
}

SpaceTimeMap heat_flow(const MapField& f0, double T, double dt, const GridGeometry& g, double cg_tol) {
  const int nt = time_steps(T, dt);
  const ScalarField ones(g, 1.0);
  SpaceTimeMap h{dt, {f0}};
  h.frames.reserve(nt + 1);
  for (int k = 0; k < nt; ++k) {
    MapField next = h.frames.back();
    solve_shifted_laplacian(ones, dt, h.frames.back(), next, g, cg_tol);
    h.frames.push_back(std::move(next));
  }
  return h;
}

namespace {

void require_aligned(const SpaceTimeMap& f, const SpaceTimeScalar& u) {
  if (f.frames.empty() || f.frames.size() != u.frames.size() || f.dt != u.dt)
    throw ConfigError("space-time fields are not on the same time grid");
}

}  // namespace

SpaceTimeMap s1_solve(const SpaceTimeMap& f, const SpaceTimeScalar& u, const MapField& f0, const GridGeometry& g,
                      const TargetManifold& target, double cg_tol) {
  require_aligned(f, u);
  const double dt = f.dt;
  SpaceTimeMap h{dt, {f0}};
  h.frames.reserve(f.frames.size());
  const int ny = g.ny, dim = f0.dim();
  for (int k = 0; k < f.steps(); ++k) {
    // multiplied through by e^{2u_k}: (e^{2u_k} - dt Lap) h_{k+1} = e^{2u_k} h_k + dt A
    const ScalarField& uk = u.frames[k];
    const MapField& fk = f.frames[k];
    const MapField& hk = h.frames.back();
    ScalarField mass(g);
    for (std::size_t q = 0; q < mass.size(); ++q) mass[q] = 1.0 / std::exp(-2.0 * uk[q]);
    const ScalarField df2 = target.is_sphere() ? energy_density(fk, g) : ScalarField(g, 0.0);
    MapField rhs(g, dim);
    for_rows(g.nx, [&](int i) {
      for (int j = 0; j < ny; ++j)
        for (int c = 0; c < dim; ++c) rhs(i, j, c) = mass(i, j) * hk(i, j, c) + dt * df2(i, j) * fk(i, j, c);
    });
    MapField next = hk;
    solve_shifted_laplacian(mass, dt, rhs, next, g, cg_tol);
    h.frames.push_back(std::move(next));
  }
  return h;
}

SpaceTimeScalar s2_solve(const SpaceTimeMap& f, const SpaceTimeScalar& u, const FlowParams& p,
                         const GridGeometry& g) {
  require_aligned(f, u);
  auto integrand = [&](int k) {
    const ScalarField df2 = energy_density(f.frames[k], g);
    ScalarField q(g);
    for (std::size_t n = 0; n < q.size(); ++n) q[n] = p.b * df2[n] * std::exp(-2.0 * u.frames[k][n]) - p.a;
    return q;
  };
  SpaceTimeScalar v{f.dt, {ScalarField(g, 0.0)}};
  v.frames.reserve(f.frames.size());
  ScalarField q_prev = integrand(0);
  for (int k = 0; k < f.steps(); ++k) {
    ScalarField q_next = integrand(k + 1);
    ScalarField next = v.frames.back();
    for (std::size_t n = 0; n < next.size(); ++n) next[n] += 0.5 * f.dt * (q_prev[n] + q_next[n]);
    v.frames.push_back(std::move(next));
    q_prev = std::move(q_next);
  }
  return v;
}

namespace {

double sum_squares(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  if (b.empty())
    for (double x : a) s += x * x;
  else
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

double weighted_norm(const SpaceTimeMap& f1, const SpaceTimeScalar& u1, const SpaceTimeMap* f2,
                     const SpaceTimeScalar* u2, const GridGeometry& g) {
  require_aligned(f1, u1);
  const int nt = f1.steps();
  double total = 0.0;
  for (int k = 0; k <= nt; ++k) {
    const double w = (k == 0 || k == nt) && nt > 0 ? 0.5 * f1.dt : f1.dt;
    const double sf = sum_squares(f1.frames[k].values(), f2 ? f2->frames[k].values() : std::span<const double>{});
    const double su = sum_squares(u1.frames[k].values(), u2 ? u2->frames[k].values() : std::span<const double>{});
    total += w * (sf + su);
  }
  return std::sqrt(total * g.cell_area());
}

}  // namespace

double spacetime_l2_norm(const SpaceTimeMap& f, const SpaceTimeScalar& u, const GridGeometry& g) {
  return weighted_norm(f, u, nullptr, nullptr, g);
}

double spacetime_l2_distance(const SpaceTimeMap& f1, const SpaceTimeScalar& u1, const SpaceTimeMap& f2,
                             const SpaceTimeScalar& u2, const GridGeometry& g) {
  require_aligned(f2, u2);
  if (f1.frames.size() != f2.frames.size()) throw ConfigError("space-time fields have different lengths");
  return weighted_norm(f1, u1, &f2, &u2, g);
}

double PicardReport::max_ratio() const {
  return ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
}

PicardReport picard_iterate(const MapField& f0, double T, double dt, const FlowParams& p, const GridGeometry& g,
                            const TargetManifold& target, double tol, int max_iter) {
  if (!(tol > 0.0)) throw ConfigError("Picard tolerance must be positive");
  if (max_iter < 1) throw ConfigError("Picard needs at least one iteration");
  g.validate();
  target.validate();
  require_match(f0, g);

  PicardReport rep;
  rep.f = heat_flow(f0, T, dt, g, p.cg_tol);
  rep.u = SpaceTimeScalar{dt, std::vector<ScalarField>(rep.f.frames.size(), ScalarField(g, 0.0))};
  while (rep.iterations < max_iter) {
    SpaceTimeMap f_next = s1_solve(rep.f, rep.u, f0, g, target, p.cg_tol);
    SpaceTimeScalar u_next = s2_solve(rep.f, rep.u, p, g);
    const double d = spacetime_l2_distance(f_next, u_next, rep.f, rep.u, g);
    if (!std::isfinite(d)) throw DivergenceError("Picard iterate is not finite", rep.iterations);
    if (!rep.differences.empty()) rep.ratios.push_back(d / rep.differences.back());
    rep.differences.push_back(d);
    rep.f = std::move(f_next);
    rep.u = std::move(u_next);
    ++rep.iterations;
    if (d <= tol) {
      rep.converged = true;
      break;
    }
  }
  return rep;
}

SpaceTimeMap projected_frames(const SpaceTimeMap& f, const TargetManifold& target) {
  SpaceTimeMap out{f.dt, {}};
  out.frames.reserve(f.frames.size());
  for (const auto& frame : f.frames) out.frames.push_back(project_to_target(frame, target));
  return out;
}

}  // namespace chf
