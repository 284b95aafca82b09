// OpenMP kernels against the serial reference versions.

#include <benchmark/benchmark.h>

#include <cmath>

#include "chf/geometry.hpp"
#include "chf/reference.hpp"
#include "chf/solver.hpp"

namespace {

using namespace chf;

const TargetManifold kSphere = TargetManifold::sphere(2);

GridGeometry grid(const benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  return GridGeometry{n, n, 2.0 * M_PI, 2.0 * M_PI};
}

MapField sample_map(const GridGeometry& g) {
  MapField f(g, 3);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const double x = g.hx() * i, y = g.hy() * j;
      const double v0 = 0.4 * std::sin(x), v1 = 0.4 * std::cos(y + 0.3), v2 = 1.0;
      const double n = std::sqrt(v0 * v0 + v1 * v1 + v2 * v2);
      f(i, j, 0) = v0 / n;
      f(i, j, 1) = v1 / n;
      f(i, j, 2) = v2 / n;
    }
  return f;
}

void set_points(benchmark::State& st, const GridGeometry& g) {
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g.points()));
}

void BM_Laplacian(benchmark::State& st) {
  const auto g = grid(st);
  const MapField f = sample_map(g);
  for (auto _ : st) benchmark::DoNotOptimize(laplacian(f, g));
  set_points(st, g);
}
void BM_LaplacianSerial(benchmark::State& st) {
  const auto g = grid(st);
  const MapField f = sample_map(g);
  for (auto _ : st) benchmark::DoNotOptimize(reference::laplacian(f, g));
  set_points(st, g);
}

void BM_EnergyDensity(benchmark::State& st) {
  const auto g = grid(st);
  const MapField f = sample_map(g);
  for (auto _ : st) benchmark::DoNotOptimize(energy_density(f, g));
  set_points(st, g);
}
void BM_EnergyDensitySerial(benchmark::State& st) {
  const auto g = grid(st);
  const MapField f = sample_map(g);
  for (auto _ : st) benchmark::DoNotOptimize(reference::energy_density(f, g));
  set_points(st, g);
}

void BM_TangentialTension(benchmark::State& st) {
  const auto g = grid(st);
  const MapField f = sample_map(g);
  for (auto _ : st) benchmark::DoNotOptimize(tangential_tension(f, kSphere, g));
  set_points(st, g);
}
void BM_TangentialTensionSerial(benchmark::State& st) {
  const auto g = grid(st);
  const MapField f = sample_map(g);
  for (auto _ : st) benchmark::DoNotOptimize(reference::tangential_tension(f, kSphere, g));
  set_points(st, g);
}

void BM_Projection(benchmark::State& st) {
  const auto g = grid(st);
  MapField f = sample_map(g);
  for (double& v : f.values()) v *= 1.001;
  for (auto _ : st) benchmark::DoNotOptimize(project_to_target(f, kSphere));
  set_points(st, g);
}
void BM_ProjectionSerial(benchmark::State& st) {
  const auto g = grid(st);
  MapField f = sample_map(g);
  for (double& v : f.values()) v *= 1.001;
  for (auto _ : st) benchmark::DoNotOptimize(reference::project_to_target(f, kSphere));
  set_points(st, g);
}

void BM_ShiftedLaplacian(benchmark::State& st) {
  const auto g = grid(st);
  const ScalarField w(g, 1.5), x = energy_density(sample_map(g), g);
  ScalarField y(g);
  for (auto _ : st) {
    apply_shifted_laplacian(w, 1e-3, x, y, g);
    benchmark::DoNotOptimize(y.values().data());
  }
  set_points(st, g);
}
void BM_ShiftedLaplacianSerial(benchmark::State& st) {
  const auto g = grid(st);
  const ScalarField w(g, 1.5), x = energy_density(sample_map(g), g);
  for (auto _ : st) benchmark::DoNotOptimize(reference::apply_shifted_laplacian(w, 1e-3, x, g));
  set_points(st, g);
}

#define CHF_PAIR(name) \
  BENCHMARK(BM_##name)->RangeMultiplier(2)->Range(64, 512); \
  BENCHMARK(BM_##name##Serial)->RangeMultiplier(2)->Range(64, 512)

CHF_PAIR(Laplacian);
CHF_PAIR(EnergyDensity);
CHF_PAIR(TangentialTension);
CHF_PAIR(Projection);
CHF_PAIR(ShiftedLaplacian);

}  // namespace

BENCHMARK_MAIN();
