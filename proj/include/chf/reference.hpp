#pragma once

// Serial reference versions of the grid kernels. They are written for
// readability and are kept only to check the OpenMP kernels against.

#include "chf/field.hpp"

namespace chf::reference {

ScalarField laplacian(const ScalarField& s, const GridGeometry& g);
MapField laplacian(const MapField& f, const GridGeometry& g);
ScalarField energy_density(const MapField& f, const GridGeometry& g);
MapField tension_field(const MapField& f, const TargetManifold& target, const GridGeometry& g);
MapField tangential_tension(const MapField& f, const TargetManifold& target, const GridGeometry& g);
MapField project_to_target(MapField raw, const TargetManifold& target);
double integrate(const ScalarField& s, const GridGeometry& g);
/// y = w*x - dt*Lap(x)
ScalarField apply_shifted_laplacian(const ScalarField& w, double dt, const ScalarField& x, const GridGeometry& g);

}  // namespace chf::reference
