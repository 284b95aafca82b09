#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "chf/field.hpp"

namespace chf::testing {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline GridGeometry torus(int n) { return GridGeometry{n, n, kTwoPi, kTwoPi}; }

/// f = (cos(kx), sin(kx), 0) on a 2pi-periodic grid.
inline MapField wrap_map(const GridGeometry& g, int k = 1) {
  MapField f(g, 3);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const double x = kTwoPi * k * i / g.nx;
      f(i, j, 0) = std::cos(x);
      f(i, j, 1) = std::sin(x);
    }
  return f;
}

inline MapField constant_map(const GridGeometry& g, double x, double y, double z) {
  MapField f(g, 3);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      f(i, j, 0) = x;
      f(i, j, 1) = y;
      f(i, j, 2) = z;
    }
  return f;
}

inline ScalarField random_scalar(const GridGeometry& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ScalarField s(g);
  for (auto& v : s.values()) v = d(rng);
  return s;
}

/// Smooth sphere-valued map near the north pole built from a few low modes.
inline MapField smooth_sphere_map(const GridGeometry& g, double amp = 0.4) {
  MapField f(g, 3);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const double x = g.hx() * i, y = g.hy() * j;
      const double v0 = amp * (std::sin(x) + 0.5 * std::cos(2.0 * y));
      const double v1 = amp * (std::cos(y + 0.3) - 0.4 * std::sin(x + y));
      const double v2 = 1.0 + 0.2 * amp * std::cos(x - y);
      const double n = std::sqrt(v0 * v0 + v1 * v1 + v2 * v2);
      f(i, j, 0) = v0 / n;
      f(i, j, 1) = v1 / n;
      f(i, j, 2) = v2 / n;
    }
  return f;
}

inline double max_abs_diff(const MapField& a, const MapField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.values().size(); ++k) m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
  return m;
}

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline double max_norm(const MapField& a) {
  double m = 0.0;
  for (int i = 0; i < a.nx(); ++i)
    for (int j = 0; j < a.ny(); ++j) {
      double s = 0.0;
      for (double v : a.at(i, j)) s += v * v;
      m = std::max(m, std::sqrt(s));
    }
  return m;
}

/// Cyclic shift by (di, dj).
template <class Field>
Field shifted(const Field& f, int di, int dj);

template <>
inline ScalarField shifted(const ScalarField& f, int di, int dj) {
  ScalarField out(f.nx(), f.ny());
  for (int i = 0; i < f.nx(); ++i)
    for (int j = 0; j < f.ny(); ++j) out((i + di) % f.nx(), (j + dj) % f.ny()) = f(i, j);
  return out;
}

template <>
inline MapField shifted(const MapField& f, int di, int dj) {
  MapField out(f.nx(), f.ny(), f.dim());
  for (int i = 0; i < f.nx(); ++i)
    for (int j = 0; j < f.ny(); ++j)
      for (int c = 0; c < f.dim(); ++c) out((i + di) % f.nx(), (j + dj) % f.ny(), c) = f(i, j, c);
  return out;
}

}  // namespace chf::testing
