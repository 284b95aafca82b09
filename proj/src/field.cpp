#include "chf/field.hpp"

#include <cmath>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "chf/parallel.hpp"

namespace chf {

void GridGeometry::validate() const {
  if (nx < 8 || ny < 8)
    throw ConfigError("grid must be at least 8x8, got " + std::to_string(nx) + "x" + std::to_string(ny));
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
    throw ConfigError("grid side lengths must be positive and finite");
}

void TargetManifold::validate() const {
  if (dim < 1) throw ConfigError("target embedding dimension must be >= 1");
  if (is_sphere() && dim < 2) throw ConfigError("unit sphere target needs n >= 1");
}

void require_match(const ScalarField& s, const GridGeometry& g) {
  if (!s.matches(g))
    throw ConfigError("scalar field is " + std::to_string(s.nx()) + "x" + std::to_string(s.ny()) +
                      ", grid is " + std::to_string(g.nx) + "x" + std::to_string(g.ny));
}

void require_match(const MapField& f, const GridGeometry& g) {
  if (!f.matches(g))
    throw ConfigError("map field is " + std::to_string(f.nx()) + "x" + std::to_string(f.ny()) +
                      ", grid is " + std::to_string(g.nx) + "x" + std::to_string(g.ny));
}

bool all_finite(const ScalarField& s) {
  for (double v : s.values())
    if (!std::isfinite(v)) return false;
  return true;
}

bool all_finite(const MapField& f) {
  for (double v : f.values())
    if (!std::isfinite(v)) return false;
  return true;
}

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_thread_count(int n) {
#ifdef _OPENMP
  static const int initial = omp_get_max_threads();
  omp_set_num_threads(n > 0 ? n : initial);
#else
  (void)n;
#endif
}

}  // namespace chf
