#pragma once

#include <string>

#include "chf/field.hpp"
#include "chf/flow.hpp"

namespace chf {

/// Contents of a CHF1 file: "CHF1", u32 nx, ny, L, f64 t, then f (row-major,
/// component-fastest), u and J, all little-endian.
struct SnapshotData {
  double t = 0.0;
  MapField f;
  ScalarField u;
  ScalarField J;
};

void write_snapshot(const std::string& path, double t, const MapField& f, const ScalarField& u, const ScalarField& J);
void write_snapshot(const std::string& path, const FlowState& s);
/// Throws ConfigError on a missing, truncated or malformed file.
SnapshotData read_snapshot(const std::string& path);

/// Rebuilds a flow state from a snapshot. The step index is t/dt rounded; the
/// history's last integrand is recomputed from f so a resumed run continues bit-exactly.
FlowState restore_state(const SnapshotData& snap, const FlowParams& p, const GridGeometry& g);

}  // namespace chf
