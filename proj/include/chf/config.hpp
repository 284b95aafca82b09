#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chf/field.hpp"
#include "chf/flow.hpp"

namespace chf {

struct ScenarioSpec {
  enum class Kind { Constant, HarmonicWrap, BubbleCandidate, RandomSmooth, Custom };
  Kind kind = Kind::HarmonicWrap;
  int k = 1;
  /// bubble scale and center (physical coordinates; default is the middle of the torus)
  double lambda = 0.3;
  std::optional<double> center_x, center_y;
  std::uint64_t seed = 1;
  int modes = 3;
  double amplitude = 0.5;
  /// CHF1 snapshot whose map is used as initial data
  std::string file;
};

struct DiagnosticsSpec {
  /// concentration threshold; E0/10 when unset
  std::optional<double> eps1;
  std::vector<double> radii{0.5, 1.0};
  /// local-estimate balls sit on a ball_grid x ball_grid lattice of centers, one per radius
  int ball_grid = 3;
  /// keep every n-th record for the ball scans
  int scan_every = 10;
  /// sup-density ceiling for compare
  double ceiling = 50.0;
};

struct PicardSpec {
  double T = 0.01;
  double tol = 1e-8;
  int max_iter = 20;
};

struct RunConfig {
  GridGeometry geometry;
  TargetManifold target = TargetManifold::sphere(2);
  FlowParams params;
  ScenarioSpec scenario;
  std::string output_dir = "out";
  /// record diagnostics every `cadence` steps (and at the final step)
  int cadence = 10;
  /// write a snapshot every n steps; 0 writes only the final state
  int snapshot_every = 0;
  DiagnosticsSpec diagnostics;
  PicardSpec picard;

  /// Throws ConfigError if any part is invalid.
  void validate() const;
};

/// Parses INI text ([section] headers, key = value). `overrides` are
/// "section.key=value" strings applied on top. Unknown keys are rejected.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

std::string to_string(UScheme s);
std::string to_string(FScheme s);
std::string to_string(ScenarioSpec::Kind k);

}  // namespace chf
