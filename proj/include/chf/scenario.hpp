#pragma once

#include <cstdint>

#include "chf/config.hpp"
#include "chf/field.hpp"

namespace chf {

/// SplitMix64. Spelled out so every implementation reproduces the same stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Initial map for the configured scenario, on the target.
MapField build_initial_data(const ScenarioSpec& s, const GridGeometry& g, const TargetManifold& target);

MapField constant_scenario(const GridGeometry& g, const TargetManifold& target);
/// (cos(2 pi k x/lx), sin(2 pi k x/lx), 0, ...)
MapField harmonic_wrap(const GridGeometry& g, const TargetManifold& target, int k);
/// Degree-one bubble of scale lambda centred at (cx, cy): inverse stereographic
/// projection of (x - c)/lambda on B_{2 lambda}, glued to the north pole outside
/// B_{4 lambda} with the cubic cutoff, then projected.
MapField bubble_candidate(const GridGeometry& g, double lambda, double cx, double cy);
/// North pole plus a random low-mode Fourier field of sup norm <= amplitude, projected.
MapField random_smooth(const GridGeometry& g, const TargetManifold& target, std::uint64_t seed, int modes,
                       double amplitude);

}  // namespace chf
