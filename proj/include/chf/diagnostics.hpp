#pragma once

#include <optional>
#include <vector>

#include "chf/field.hpp"
#include "chf/flow.hpp"

namespace chf {

/// E = 1/2 sum |df|^2 hx hy. The 2-form |df|^2 dvol is conformally invariant,
/// so this is also the energy with respect to g = e^{2u} g0.
double energy(const MapField& f, const GridGeometry& g);

/// V = sum e^{2u} hx hy.
double volume(const ScalarField& u, const GridGeometry& g);

/// The map's velocity f_t = e^{-2u} tau(f) as used by the flow (u ignored for the classic flow).
MapField map_velocity(const FlowState& s, const FlowParams& p, const GridGeometry& g, const TargetManifold& target);

/// int e^{-2u} |tau(f)|^2, the rate at which energy is dissipated.
double dissipation_integral(const FlowState& s, const FlowParams& p, const GridGeometry& g,
                            const TargetManifold& target);

/// |(E_next - E_prev)/dt + (D_prev + D_next)/2| for two recorded states.
double dissipation_residual(const FlowState& prev, const FlowState& next, const FlowParams& p,
                            const GridGeometry& g, const TargetManifold& target);

/// int e^{2u} |f_t|^p phi^2 for p in {2, 4}; phi = 1 when no cutoff is given.
double weighted_ft_moment(const FlowState& s, const FlowParams& p, const GridGeometry& g,
                          const TargetManifold& target, int power, const ScalarField* cutoff = nullptr);

struct GridPoint {
  int i = 0;
  int j = 0;
  bool operator==(const GridPoint&) const = default;
};

/// Distance on the flat torus between two grid points.
double torus_distance(const GridPoint& a, const GridPoint& b, const GridGeometry& g);

/// Radial cutoff: 1 on B_r, 0 outside B_{2r}, C^1 cubic in between (|phi'| <= 1.5/r).
double cutoff_profile(double dist, double r);

struct BallRegion {
  GridPoint center;
  double r = 0.0;
  ScalarField phi;
};

/// Builds the cutoff for B_r(center). Throws ConfigError unless 0 < 2r <= min(lx, ly)/2.
BallRegion make_ball(const GridPoint& center, double r, const GridGeometry& g);

/// 1/2 sum |df|^2 phi^2 hx hy.
double local_energy(const MapField& f, const BallRegion& ball, const GridGeometry& g);
/// Energy in the closed ball of the given radius (sharp indicator).
double ball_energy(const MapField& f, const GridPoint& center, double radius, const GridGeometry& g);

/// Recorded map/conformal-factor pair.
struct Snapshot {
  double t = 0.0;
  MapField f;
  ScalarField u;
};
using Trajectory = std::vector<Snapshot>;

/// RHS - LHS of E(B_r, t2) - E(B_2r, t1) <= 16/(2 a r^2) (e^{2a t2} - e^{2a t1}) E0.
/// Nonnegative means the estimate holds.
double local_estimate_margin(const MapField& f_t1, const MapField& f_t2, double t1, double t2,
                             const GridPoint& center, double r, double a, double e0, const GridGeometry& g);
double check_local_estimate(const Trajectory& traj, std::size_t k1, std::size_t k2, const GridPoint& center,
                            double r, const FlowParams& p, double e0, const GridGeometry& g);

struct LocalEstimateSample {
  double t1 = 0.0;
  double t2 = 0.0;
  GridPoint center;
  double r = 0.0;
  double margin = 0.0;
};

/// Margins for every ball (each center with each radius) and every snapshot pair t1 < t2.
std::vector<LocalEstimateSample> local_estimate_sweep(const Trajectory& traj, const std::vector<GridPoint>& centers,
                                                      const std::vector<double>& radii, const FlowParams& p,
                                                      double e0, const GridGeometry& g);

/// n x n centers at the middles of an even partition of the grid.
std::vector<GridPoint> lattice_centers(int n, const GridGeometry& g);

struct ConcentrationEvent {
  GridPoint location;
  double time = 0.0;
  double radius = 0.0;
  double local_energy = 0.0;
  double threshold = 0.0;
};

/// Scans every snapshot on a lattice of centers (spacing about r/2) with the
/// smallest radius r and reports points where E(B_2r(x), t) > eps1. Candidates
/// within 2r of a stronger one are merged into it, so the result is finite and
/// its size never grows with eps1. Throws ConfigError if a radius is below 4 max(hx, hy).
std::vector<ConcentrationEvent> detect_concentration(const Trajectory& traj, double eps1,
                                                     const std::vector<double>& radii, const GridGeometry& g);

struct SteadyStateReport {
  /// max |e^{2u} - (b/a)|df|^2|
  double conformal_deviation = 0.0;
  /// max |e^{-2u}|df|^2 - a/b|; empty for a constant map.
  std::optional<double> density_deviation;
};
SteadyStateReport steady_state_check(const FlowState& s, const FlowParams& p, const GridGeometry& g);

struct VolumeSample {
  double t;
  double E;
  double V;
};
/// max over the series of |V(t) - e^{-2at}(V(0) + 4b int_0^t e^{2as} E(s) ds)| / V(0),
/// with the integral taken by the trapezoidal rule on the samples.
double check_volume_law(const std::vector<VolumeSample>& series, const FlowParams& p);

/// e^{-2at} V0 + (2b/a) E0 - V(t); nonnegative when the volume bound holds.
double volume_bound_margin(double t, double v, double v0, double e0, const FlowParams& p);

struct DiagnosticsRecord {
  double t = 0.0;
  long step = 0;
  double E = 0.0;
  double V = 0.0;
  double dissipation = 0.0;
  double dissipation_residual = 0.0;
  double sup_df2 = 0.0;
  double sup_df2_g = 0.0;
  double min_u = 0.0;
  double max_u = 0.0;
  double ft2_weighted = 0.0;
  double ft4_weighted = 0.0;
  double volume_law_dev = 0.0;
  double volume_bound_margin = 0.0;
};

/// Observer that turns recorded flow states into DiagnosticsRecords, optionally
/// keeping the snapshots for the ball scans.
class DiagnosticsRecorder {
 public:
  DiagnosticsRecorder(FlowParams p, GridGeometry g, TargetManifold target, bool keep_snapshots = false);

  void operator()(const FlowState& s);
  Observer observer() {
    return [this](const FlowState& s) { (*this)(s); };
  }

  const std::vector<DiagnosticsRecord>& records() const { return records_; }
  const Trajectory& snapshots() const { return snapshots_; }
  double initial_energy() const { return e0_; }
  double initial_volume() const { return v0_; }

 private:
  FlowParams p_;
  GridGeometry g_;
  TargetManifold target_;
  bool keep_;
  std::vector<DiagnosticsRecord> records_;
  Trajectory snapshots_;
  double e0_ = 0.0;
  double v0_ = 0.0;
  double law_integral_ = 0.0;
};

}  // namespace chf
