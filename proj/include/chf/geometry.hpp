#pragma once

#include "chf/field.hpp"

namespace chf {

/// Periodic 5-point Laplacian, componentwise on vector fields.
ScalarField laplacian(const ScalarField& s, const GridGeometry& g);
MapField laplacian(const MapField& f, const GridGeometry& g);

/// |df|^2 with respect to the flat metric, from centered differences.
ScalarField energy_density(const MapField& f, const GridGeometry& g);

/// Embedded tension field: Lap f + |df|^2 f on the unit sphere, Lap f in flat space.
/// Throws StateCorruptionError when the map is more than 1e3 * on_manifold_tol off the sphere.
MapField tension_field(const MapField& f, const TargetManifold& target, const GridGeometry& g,
                       double on_manifold_tol = 1e-9);

/// Tension field with its component along f removed. In the continuum tau(f) is
/// already tangent; on the grid the 5-point Laplacian and the centered |df|^2
/// leave an O(h^2) normal part, which this drops. This is the velocity the flow uses.
MapField tangential_tension(const MapField& f, const TargetManifold& target, const GridGeometry& g,
                            double on_manifold_tol = 1e-9);

/// Nearest-point projection onto the target (pointwise normalization on the sphere).
/// Throws ProjectionDegenerateError if any |f(x)| < 0.5.
MapField project_to_target(MapField raw, const TargetManifold& target);

/// max over the grid of | |f(x)| - 1 |.
double sphere_deviation(const MapField& f);

/// Sum of p*q*hx*hy.
double inner(const ScalarField& p, const ScalarField& q, const GridGeometry& g);
/// Sum of <D+ p, D+ q>*hx*hy with forward differences; the partner of the
/// 5-point Laplacian in the summation-by-parts identity.
double forward_gradient_inner(const ScalarField& p, const ScalarField& q, const GridGeometry& g);
/// Sum of s*hx*hy.
double integrate(const ScalarField& s, const GridGeometry& g);
double max_value(const ScalarField& s);
double min_value(const ScalarField& s);

}  // namespace chf
