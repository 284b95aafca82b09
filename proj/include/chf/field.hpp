#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "chf/errors.hpp"

namespace chf {

/// Uniform periodic grid on the flat torus [0,lx) x [0,ly).
/// Point (i, j) sits at (i*hx, j*hy); i indexes x and is the slow (row) index.
struct GridGeometry {
  int nx = 64;
  int ny = 64;
  double lx = 6.283185307179586;
  double ly = 6.283185307179586;

  double hx() const { return lx / nx; }
  double hy() const { return ly / ny; }
  double cell_area() const { return hx() * hy(); }
  double area() const { return lx * ly; }
  std::size_t points() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * ny + j; }

  /// Throws ConfigError unless nx, ny >= 8 and the side lengths are positive.
  void validate() const;
};

struct TargetManifold {
  enum class Kind { UnitSphere, Euclidean };
  Kind kind = Kind::UnitSphere;
  /// Embedding dimension L. UnitSphere(n) has L = n + 1.
  int dim = 3;

  static TargetManifold sphere(int n) { return {Kind::UnitSphere, n + 1}; }
  static TargetManifold euclidean(int l) { return {Kind::Euclidean, l}; }

  bool is_sphere() const { return kind == Kind::UnitSphere; }
  /// Bound on the second fundamental form: 1 for the unit sphere, 0 for flat space.
  double curvature_bound() const { return is_sphere() ? 1.0 : 0.0; }
  void validate() const;
};

class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(int nx, int ny, double value = 0.0)
      : nx_(nx), ny_(ny), data_(static_cast<std::size_t>(nx) * ny, value) {}
  explicit ScalarField(const GridGeometry& g, double value = 0.0) : ScalarField(g.nx, g.ny, value) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * ny_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * ny_ + j]; }
  double& operator[](std::size_t k) { return data_[k]; }
  double operator[](std::size_t k) const { return data_[k]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool matches(const GridGeometry& g) const { return nx_ == g.nx && ny_ == g.ny; }
  bool operator==(const ScalarField&) const = default;

 private:
  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> data_;
};

/// Field of L-vectors on the grid, stored component-fastest.
class MapField {
 public:
  MapField() = default;
  MapField(int nx, int ny, int dim, double value = 0.0)
      : nx_(nx), ny_(ny), dim_(dim), data_(static_cast<std::size_t>(nx) * ny * dim, value) {}
  MapField(const GridGeometry& g, int dim, double value = 0.0) : MapField(g.nx, g.ny, dim, value) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int dim() const { return dim_; }
  std::size_t points() const { return static_cast<std::size_t>(nx_) * ny_; }

  double& operator()(int i, int j, int c) { return data_[offset(i, j) + c]; }
  double operator()(int i, int j, int c) const { return data_[offset(i, j) + c]; }

  std::span<double> at(int i, int j) { return {data_.data() + offset(i, j), static_cast<std::size_t>(dim_)}; }
  std::span<const double> at(int i, int j) const {
    return {data_.data() + offset(i, j), static_cast<std::size_t>(dim_)};
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool matches(const GridGeometry& g) const { return nx_ == g.nx && ny_ == g.ny; }
  bool operator==(const MapField&) const = default;

 private:
  std::size_t offset(int i, int j) const { return (static_cast<std::size_t>(i) * ny_ + j) * dim_; }

  int nx_ = 0;
  int ny_ = 0;
  int dim_ = 0;
  std::vector<double> data_;
};

void require_match(const ScalarField& s, const GridGeometry& g);
void require_match(const MapField& f, const GridGeometry& g);

bool all_finite(const ScalarField& s);
bool all_finite(const MapField& f);

/// Threads used by the OpenMP kernels. n <= 0 restores the default.
int thread_count();
void set_thread_count(int n);

}  // namespace chf
