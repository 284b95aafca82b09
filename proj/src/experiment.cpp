#include "chf/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "chf/geometry.hpp"
#include "chf/scenario.hpp"
#include "chf/snapshot.hpp"

namespace chf {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& header) : out_(path, std::ios::trunc) {
    if (!out_) throw ConfigError("cannot write " + path.string());
    out_ << header << '\n';
  }
  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }
  void comment(const std::string& text) { out_ << "# " << text << '\n'; }
  void flush() { out_.flush(); }

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }
  std::ofstream out_;
};

fs::path prepare_dir(const RunConfig& c) {
  const fs::path dir(c.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + c.output_dir + ": " + ec.message());
  return dir;
}

std::string snapshot_name(long step) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "snapshot_%08ld.chf", step);
  return buf;
}

ExperimentResult execute(FlowState start, const RunConfig& c, const Observer& extra) {
  c.validate();
  const GridGeometry& g = c.geometry;
  const FlowParams& p = c.params;
  const fs::path dir = prepare_dir(c);
  const long total = p.step_count();

  ExperimentResult res;
  DiagnosticsRecorder recorder(p, g, c.target);
  Trajectory scanned;
  CsvWriter ts(dir / "timeseries.csv",
               "t,E,V,dissipation_residual,sup_df2,sup_df2_g,min_u,max_u,ft2_weighted,ft4_weighted,volume_law_dev,"
               "volume_bound_margin");

  auto observe = [&](const FlowState& s) {
    if (c.snapshot_every > 0 && s.step % c.snapshot_every == 0) write_snapshot((dir / snapshot_name(s.step)).string(), s);
    if (s.step % c.cadence != 0 && s.step != total && !recorder.records().empty()) return;
    const std::size_t index = recorder.records().size();
    recorder(s);
    const DiagnosticsRecord& r = recorder.records().back();
    ts.row(r.t, r.E, r.V, r.dissipation_residual, r.sup_df2, r.sup_df2_g, r.min_u, r.max_u, r.ft2_weighted,
           r.ft4_weighted, r.volume_law_dev, r.volume_bound_margin);
    if (index % static_cast<std::size_t>(c.diagnostics.scan_every) == 0 || s.step == total)
      scanned.push_back({s.t, s.f, s.u});
    if (extra) extra(s);
  };
  res.run = run_from(std::move(start), p, g, c.target, observe, 1);
  // the final state of a diverged run is the last good one; it may not have been recorded
  if (res.run.failed) {
    ts.comment("diverged step=" + std::to_string(res.run.failed_step) + ": " + res.run.failure);
    if (scanned.empty() || scanned.back().t != res.run.final_state.t)
      scanned.push_back({res.run.final_state.t, res.run.final_state.f, res.run.final_state.u});
  }
  ts.flush();
  write_snapshot((dir / "final.chf").string(), res.run.final_state);
  res.exit_status = res.run.exit_status;
  res.records = recorder.records();

  const double e0 = res.records.empty() ? energy(res.run.final_state.f, g) : recorder.initial_energy();
  res.eps1 = c.diagnostics.eps1.value_or(e0 / 10.0);
  res.events = detect_concentration(scanned, res.eps1, c.diagnostics.radii, g);
  CsvWriter ev(dir / "events.csv", "t,x,y,r,local_energy");
  for (const auto& e : res.events)
    ev.row(e.time, e.location.i * g.hx(), e.location.j * g.hy(), e.radius, e.local_energy);

  res.local_estimates =
      local_estimate_sweep(scanned, lattice_centers(c.diagnostics.ball_grid, g), c.diagnostics.radii, p, e0, g);
  CsvWriter le(dir / "local_estimates.csv", "t1,t2,x,y,r,margin");
  for (const auto& m : res.local_estimates)
    le.row(m.t1, m.t2, m.center.i * g.hx(), m.center.j * g.hy(), m.r, m.margin);

  const FlowState& fin = res.run.final_state;
  res.summary = "t=" + format_double(fin.t) + " E=" + format_double(energy(fin.f, g)) +
                " V=" + format_double(volume(fin.u, g)) + " events=" + std::to_string(res.events.size());
  if (res.run.failed) res.summary += " diverged_step=" + std::to_string(res.run.failed_step);
  return res;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& config, const Observer& extra) {
  config.validate();
  const MapField f0 = build_initial_data(config.scenario, config.geometry, config.target);
  return execute(initial_state(f0, config.geometry), config, extra);
}

ExperimentResult resume_experiment(const std::string& snapshot_path, const RunConfig& config) {
  config.validate();
  const SnapshotData snap = read_snapshot(snapshot_path);
  if (!snap.f.matches(config.geometry) || snap.f.dim() != config.target.dim)
    throw ConfigError("snapshot " + snapshot_path + " does not match the configured grid and target");
  if (!all_finite(snap.f) || !all_finite(snap.u) || !all_finite(snap.J))
    throw ConfigError("snapshot " + snapshot_path + " holds non-finite values");
  return execute(restore_state(snap, config.params, config.geometry), config, {});
}

bool ComparisonReport::postponed() const {
  if (!conformal_crossing) return true;
  return classic_crossing && *classic_crossing <= *conformal_crossing;
}

ComparisonReport compare_baseline(const RunConfig& config) {
  config.validate();
  const GridGeometry& g = config.geometry;
  const MapField f0 = build_initial_data(config.scenario, g, config.target);
  const long total = config.params.step_count();

  auto sweep = [&](bool classic) {
    FlowParams p = config.params;
    p.baseline_classic = classic;
    std::vector<std::pair<double, double>> series;
    auto observe = [&](const FlowState& s) {
      if (s.step % config.cadence != 0 && s.step != total) return;
      const ScalarField df2 = energy_density(s.f, g);
      double sup = 0.0;
      for (std::size_t k = 0; k < df2.size(); ++k)
        sup = std::max(sup, classic ? df2[k] : std::exp(-2.0 * s.u[k]) * df2[k]);
      series.emplace_back(s.t, sup);
    };
    const RunResult r = run(f0, p, g, config.target, observe, 1);
    return std::make_pair(series, r);
  };
  const auto [conf, conf_run] = sweep(false);
  const auto [base, base_run] = sweep(true);

  ComparisonReport rep;
  rep.ceiling = config.diagnostics.ceiling;
  rep.exit_status = std::max(conf_run.exit_status, base_run.exit_status);
  const std::size_t n = std::max(conf.size(), base.size());
  for (std::size_t k = 0; k < n; ++k) {
    ComparisonRow row;
    row.t = k < conf.size() ? conf[k].first : base[k].first;
    if (k < conf.size()) row.conformal_sup_g = conf[k].second;
    if (k < base.size()) row.classic_sup = base[k].second;
    if (!rep.conformal_crossing && row.conformal_sup_g && *row.conformal_sup_g > rep.ceiling)
      rep.conformal_crossing = row.t;
    if (!rep.classic_crossing && row.classic_sup && *row.classic_sup > rep.ceiling) rep.classic_crossing = row.t;
    rep.rows.push_back(row);
  }

  const fs::path dir = prepare_dir(config);
  CsvWriter out(dir / "comparison.csv", "t,conformal_sup_df2_g,classic_sup_df2");
  for (const auto& row : rep.rows) out.row(row.t, row.conformal_sup_g, row.classic_sup);
  if (conf_run.failed) out.comment("conformal diverged step=" + std::to_string(conf_run.failed_step));
  if (base_run.failed) out.comment("classic diverged step=" + std::to_string(base_run.failed_step));

  auto when = [](const std::optional<double>& t) { return t ? format_double(*t) : std::string("never"); };
  rep.summary = "ceiling=" + format_double(rep.ceiling) + " classic_crossing=" + when(rep.classic_crossing) +
                " conformal_crossing=" + when(rep.conformal_crossing) +
                " postponed=" + (rep.postponed() ? "yes" : "no");
  return rep;
}

PicardRun run_picard(const RunConfig& config) {
  config.validate();
  const GridGeometry& g = config.geometry;
  const MapField f0 = build_initial_data(config.scenario, g, config.target);
  PicardRun out;
  out.report = picard_iterate(f0, config.picard.T, config.params.dt, config.params, g, config.target,
                              config.picard.tol, config.picard.max_iter);
  const PicardReport& r = out.report;

  const fs::path dir = prepare_dir(config);
  CsvWriter csv(dir / "picard.csv", "iter,d_k,r_k");
  for (std::size_t k = 0; k < r.differences.size(); ++k)
    csv.row(k, r.differences[k], k < r.ratios.size() ? std::optional<double>(r.ratios[k]) : std::nullopt);

  out.summary = "iterations=" + std::to_string(r.iterations) + " converged=" + (r.converged ? "yes" : "no") +
                " last_d=" + format_double(r.differences.empty() ? 0.0 : r.differences.back()) +
                " max_ratio=" + format_double(r.max_ratio());
  return out;
}

}  // namespace chf
