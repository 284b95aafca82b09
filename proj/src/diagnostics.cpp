#include "chf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "chf/geometry.hpp"
#include "chf/parallel.hpp"

namespace chf {

double energy(const MapField& f, const GridGeometry& g) { return 0.5 * integrate(energy_density(f, g), g); }

double volume(const ScalarField& u, const GridGeometry& g) {
  require_match(u, g);
  const int ny = g.ny;
  return row_sum(g.nx, [&](int i) {
    double s = 0.0;
    for (int j = 0; j < ny; ++j) s += std::exp(2.0 * u(i, j));
    return s;
  }) * g.cell_area();
}

MapField map_velocity(const FlowState& s, const FlowParams& p, const GridGeometry& g, const TargetManifold& target) {
  MapField v = tangential_tension(s.f, target, g, p.on_manifold_tol);
  if (p.baseline_classic) return v;
  const int ny = g.ny, dim = v.dim();
  for_rows(g.nx, [&](int i) {
    for (int j = 0; j < ny; ++j) {
      const double w = std::exp(-2.0 * s.u(i, j));
      for (int c = 0; c < dim; ++c) v(i, j, c) *= w;
    }
  });
  return v;
}

namespace {

/// sum e^{2u}|e^{-2u} tau|^p phi^2 hx hy, written as e^{(2-2p)u}|tau|^p so that
/// p = 2 is literally the dissipation integrand.
double tension_moment(const FlowState& s, const FlowParams& p, const GridGeometry& g, const TargetManifold& target,
                      int power, const ScalarField* cutoff) {
  const MapField tau = tangential_tension(s.f, target, g, p.on_manifold_tol);
  const int ny = g.ny, dim = tau.dim();
  return row_sum(g.nx, [&](int i) {
    double acc = 0.0;
    for (int j = 0; j < ny; ++j) {
      double t2 = 0.0;
      for (int c = 0; c < dim; ++c) t2 += tau(i, j, c) * tau(i, j, c);
      const double w = p.baseline_classic ? 1.0 : std::exp((2.0 - 2.0 * power) * s.u(i, j));
      double term = w * (power == 2 ? t2 : t2 * t2);
      if (cutoff) term *= (*cutoff)(i, j) * (*cutoff)(i, j);
      acc += term;
    }
    return acc;
  }) * g.cell_area();
}

}  // namespace

double dissipation_integral(const FlowState& s, const FlowParams& p, const GridGeometry& g,
                            const TargetManifold& target) {
  return tension_moment(s, p, g, target, 2, nullptr);
}

double dissipation_residual(const FlowState& prev, const FlowState& next, const FlowParams& p,
                            const GridGeometry& g, const TargetManifold& target) {
  const double rate = (energy(next.f, g) - energy(prev.f, g)) / (next.t - prev.t);
  const double d = 0.5 * (dissipation_integral(prev, p, g, target) + dissipation_integral(next, p, g, target));
  return std::abs(rate + d);
}

double weighted_ft_moment(const FlowState& s, const FlowParams& p, const GridGeometry& g,
                          const TargetManifold& target, int power, const ScalarField* cutoff) {
  if (power != 2 && power != 4) throw ConfigError("weighted f_t moment is defined for p = 2 or 4");
  return tension_moment(s, p, g, target, power, cutoff);
}

double torus_distance(const GridPoint& a, const GridPoint& b, const GridGeometry& g) {
  int di = std::abs(a.i - b.i) % g.nx;
  int dj = std::abs(a.j - b.j) % g.ny;
  di = std::min(di, g.nx - di);
  dj = std::min(dj, g.ny - dj);
  return std::hypot(di * g.hx(), dj * g.hy());
}

double cutoff_profile(double dist, double r) {
  if (dist <= r) return 1.0;
  if (dist >= 2.0 * r) return 0.0;
  const double s = (dist - r) / r;
  return 1.0 - s * s * (3.0 - 2.0 * s);
}

BallRegion make_ball(const GridPoint& center, double r, const GridGeometry& g) {
  if (!(r > 0.0) || 2.0 * r > 0.5 * std::min(g.lx, g.ly))
    throw ConfigError("ball radius must satisfy 0 < 2r <= min(lx, ly)/2");
  BallRegion b{center, r, ScalarField(g)};
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) b.phi(i, j) = cutoff_profile(torus_distance({i, j}, center, g), r);
  return b;
}

double local_energy(const MapField& f, const BallRegion& ball, const GridGeometry& g) {
  const ScalarField e = energy_density(f, g);
  ScalarField w(g);
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = ball.phi[k] * ball.phi[k];
  return 0.5 * inner(e, w, g);
}

namespace {

/// Grid offsets (di, dj) within the given radius of the origin.
std::vector<GridPoint> ball_offsets(double radius, const GridGeometry& g) {
  std::vector<GridPoint> out;
  const int ri = std::min(g.nx / 2, static_cast<int>(std::ceil(radius / g.hx())));
  const int rj = std::min(g.ny / 2, static_cast<int>(std::ceil(radius / g.hy())));
  for (int di = -ri; di <= ri; ++di)
    for (int dj = -rj; dj <= rj; ++dj)
      if (std::hypot(di * g.hx(), dj * g.hy()) <= radius) out.push_back({di, dj});
  return out;
}

double ball_sum(const ScalarField& e, const GridPoint& c, const std::vector<GridPoint>& offsets,
                const GridGeometry& g) {
  double s = 0.0;
  for (const auto& o : offsets) s += e(((c.i + o.i) % g.nx + g.nx) % g.nx, ((c.j + o.j) % g.ny + g.ny) % g.ny);
  return 0.5 * s * g.cell_area();
}

}  // namespace

double ball_energy(const MapField& f, const GridPoint& center, double radius, const GridGeometry& g) {
  return ball_sum(energy_density(f, g), center, ball_offsets(radius, g), g);
}

double local_estimate_margin(const MapField& f_t1, const MapField& f_t2, double t1, double t2,
                             const GridPoint& center, double r, double a, double e0, const GridGeometry& g) {
  const double lhs = ball_energy(f_t2, center, r, g) - ball_energy(f_t1, center, 2.0 * r, g);
  const double rhs = 16.0 / (2.0 * a * r * r) * (std::exp(2.0 * a * t2) - std::exp(2.0 * a * t1)) * e0;
  return rhs - lhs;
}

double check_local_estimate(const Trajectory& traj, std::size_t k1, std::size_t k2, const GridPoint& center,
                            double r, const FlowParams& p, double e0, const GridGeometry& g) {
  if (k1 >= k2 || k2 >= traj.size()) throw ConfigError("local estimate needs t1 < t2 within the trajectory");
  // times relative to the start of the recorded run
  const double t0 = traj.front().t;
  return local_estimate_margin(traj[k1].f, traj[k2].f, traj[k1].t - t0, traj[k2].t - t0, center, r, p.a, e0, g);
}

std::vector<LocalEstimateSample> local_estimate_sweep(const Trajectory& traj, const std::vector<GridPoint>& centers,
                                                      const std::vector<double>& radii, const FlowParams& p,
                                                      double e0, const GridGeometry& g) {
  std::vector<LocalEstimateSample> out;
  if (traj.size() < 2) return out;
  for (double r : radii)
    if (!(r > 0.0) || 2.0 * r > 0.5 * std::min(g.lx, g.ly)) throw ConfigError("ball radius out of range");
  std::vector<ScalarField> dens;
  dens.reserve(traj.size());
  for (const auto& s : traj) dens.push_back(energy_density(s.f, g));

  const double t0 = traj.front().t;
  for (double r : radii) {
    const auto inner_off = ball_offsets(r, g), outer_off = ball_offsets(2.0 * r, g);
    for (const auto& c : centers) {
      std::vector<double> e_in(traj.size()), e_out(traj.size());
      for (std::size_t k = 0; k < traj.size(); ++k) {
        e_in[k] = ball_sum(dens[k], c, inner_off, g);
        e_out[k] = ball_sum(dens[k], c, outer_off, g);
      }
      for (std::size_t k1 = 0; k1 < traj.size(); ++k1)
        for (std::size_t k2 = k1 + 1; k2 < traj.size(); ++k2) {
          const double t1 = traj[k1].t - t0, t2 = traj[k2].t - t0;
          const double rhs = 16.0 / (2.0 * p.a * r * r) * (std::exp(2.0 * p.a * t2) - std::exp(2.0 * p.a * t1)) * e0;
          out.push_back({traj[k1].t, traj[k2].t, c, r, rhs - (e_in[k2] - e_out[k1])});
        }
    }
  }
  return out;
}

std::vector<GridPoint> lattice_centers(int n, const GridGeometry& g) {
  if (n < 1) throw ConfigError("ball lattice needs n >= 1");
  std::vector<GridPoint> out;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out.push_back({(2 * a + 1) * g.nx / (2 * n), (2 * b + 1) * g.ny / (2 * n)});
  return out;
}

std::vector<ConcentrationEvent> detect_concentration(const Trajectory& traj, double eps1,
                                                     const std::vector<double>& radii, const GridGeometry& g) {
  if (radii.empty()) throw ConfigError("concentration scan needs at least one radius");
  const double r = *std::min_element(radii.begin(), radii.end());
  if (r < 4.0 * std::max(g.hx(), g.hy())) throw ConfigError("concentration radius below 4 grid spacings");
  if (!(2.0 * r <= 0.5 * std::min(g.lx, g.ly))) throw ConfigError("concentration radius too large for the torus");

  const auto offsets = ball_offsets(2.0 * r, g);
  const int si = std::max(1, static_cast<int>(r / (2.0 * g.hx())));
  const int sj = std::max(1, static_cast<int>(r / (2.0 * g.hy())));
  const int li = (g.nx + si - 1) / si, lj = (g.ny + sj - 1) / sj;
  std::vector<GridPoint> lattice;
  for (int a = 0; a < li; ++a)
    for (int b = 0; b < lj; ++b) lattice.push_back({a * si, b * sj});

  struct Candidate {
    GridPoint at;
    double t;
    double e;
    std::size_t order;
  };
  std::vector<Candidate> cands;
  for (const auto& snap : traj) {
    const ScalarField e = energy_density(snap.f, g);
    std::vector<double> le(lattice.size());
    for_rows(static_cast<int>(lattice.size()), [&](int k) { le[k] = ball_sum(e, lattice[k], offsets, g); });
    // only lattice-local maxima are candidates; the shoulders of one bump
    // would otherwise spill past the 2r merge radius
    for (int a = 0; a < li; ++a)
      for (int b = 0; b < lj; ++b) {
        const std::size_t k = static_cast<std::size_t>(a) * lj + b;
        if (!(le[k] > eps1)) continue;
        bool peak = true;
        for (int da = -1; da <= 1 && peak; ++da)
          for (int db = -1; db <= 1; ++db) {
            const std::size_t n = static_cast<std::size_t>((a + da + li) % li) * lj + (b + db + lj) % lj;
            if (le[n] > le[k]) peak = false;
          }
        if (peak) cands.push_back({lattice[k], snap.t, le[k], cands.size()});
      }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.e != b.e) return a.e > b.e;
    return a.order < b.order;
  });

  std::vector<ConcentrationEvent> events;
  for (const auto& c : cands) {
    bool merged = false;
    for (auto& ev : events)
      if (torus_distance(ev.location, c.at, g) <= 2.0 * r) {
        ev.time = std::min(ev.time, c.t);
        merged = true;
        break;
      }
    if (!merged) events.push_back({c.at, c.t, r, c.e, eps1});
  }
  return events;
}

SteadyStateReport steady_state_check(const FlowState& s, const FlowParams& p, const GridGeometry& g) {
  const ScalarField df2 = energy_density(s.f, g);
  SteadyStateReport rep;
  double dens = 0.0, sup = 0.0;
  for (std::size_t k = 0; k < df2.size(); ++k) {
    const double e2u = std::exp(2.0 * s.u[k]);
    rep.conformal_deviation = std::max(rep.conformal_deviation, std::abs(e2u - p.b / p.a * df2[k]));
    dens = std::max(dens, std::abs(df2[k] / e2u - p.a / p.b));
    sup = std::max(sup, df2[k]);
  }
  if (sup > 0.0) rep.density_deviation = dens;
  return rep;
}

double check_volume_law(const std::vector<VolumeSample>& series, const FlowParams& p) {
  if (series.empty()) return 0.0;
  const double t0 = series.front().t;
  const double v0 = series.front().V;
  double integral = 0.0, worst = 0.0;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double s = series[k].t - t0;
    if (k > 0) {
      const double sp = series[k - 1].t - t0;
      integral += 0.5 * (s - sp) * (std::exp(2.0 * p.a * sp) * series[k - 1].E + std::exp(2.0 * p.a * s) * series[k].E);
    }
    const double rhs = std::exp(-2.0 * p.a * s) * (v0 + 4.0 * p.b * integral);
    worst = std::max(worst, std::abs(series[k].V - rhs) / v0);
  }
  return worst;
}

double volume_bound_margin(double t, double v, double v0, double e0, const FlowParams& p) {
  return std::exp(-2.0 * p.a * t) * v0 + 2.0 * p.b / p.a * e0 - v;
}

DiagnosticsRecorder::DiagnosticsRecorder(FlowParams p, GridGeometry g, TargetManifold target, bool keep_snapshots)
    : p_(p), g_(g), target_(target), keep_(keep_snapshots) {}

void DiagnosticsRecorder::operator()(const FlowState& s) {
  DiagnosticsRecord r;
  r.t = s.t;
  r.step = s.step;
  r.E = energy(s.f, g_);
  r.V = volume(s.u, g_);
  r.dissipation = dissipation_integral(s, p_, g_, target_);

  const ScalarField df2 = energy_density(s.f, g_);
  r.sup_df2 = max_value(df2);
  double sup_g = 0.0;
  for (std::size_t k = 0; k < df2.size(); ++k) sup_g = std::max(sup_g, std::exp(-2.0 * s.u[k]) * df2[k]);
  r.sup_df2_g = sup_g;
  r.min_u = min_value(s.u);
  r.max_u = max_value(s.u);
  r.ft2_weighted = weighted_ft_moment(s, p_, g_, target_, 2);
  r.ft4_weighted = weighted_ft_moment(s, p_, g_, target_, 4);

  if (records_.empty()) {
    e0_ = r.E;
    v0_ = r.V;
    law_integral_ = 0.0;
  } else {
    const DiagnosticsRecord& prev = records_.back();
    const double dt = r.t - prev.t;
    r.dissipation_residual = std::abs((r.E - prev.E) / dt + 0.5 * (prev.dissipation + r.dissipation));
    const double t0 = records_.front().t;
    law_integral_ += 0.5 * dt * (std::exp(2.0 * p_.a * (prev.t - t0)) * prev.E + std::exp(2.0 * p_.a * (r.t - t0)) * r.E);
  }
  const double since = records_.empty() ? 0.0 : r.t - records_.front().t;
  const double rhs = std::exp(-2.0 * p_.a * since) * (v0_ + 4.0 * p_.b * law_integral_);
  r.volume_law_dev = std::abs(r.V - rhs) / v0_;
  r.volume_bound_margin = volume_bound_margin(since, r.V, v0_, e0_, p_);

  records_.push_back(r);
  if (keep_) snapshots_.push_back({s.t, s.f, s.u});
}

}  // namespace chf
