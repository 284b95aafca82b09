#pragma once

#include <algorithm>
#include <limits>
#include <vector>

namespace chf {

/// Number of worker threads the kernels will use.
int thread_count();
/// Caps kernel parallelism; n <= 0 restores the runtime default.
void set_thread_count(int n);

/// Applies fn(i) to every row in parallel.
template <class Fn>
void for_rows(int rows, Fn&& fn) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < rows; ++i) fn(i);
}

/// Sums fn(i) over rows. Partials are combined serially in row order, so the
/// result does not depend on the thread count.
template <class Fn>
double row_sum(int rows, Fn&& fn) {
  std::vector<double> partial(static_cast<std::size_t>(rows));
#pragma omp parallel for schedule(static)
  for (int i = 0; i < rows; ++i) partial[i] = fn(i);
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

template <class Fn>
double row_max(int rows, Fn&& fn) {
  std::vector<double> partial(static_cast<std::size_t>(rows));
#pragma omp parallel for schedule(static)
  for (int i = 0; i < rows; ++i) partial[i] = fn(i);
  double m = -std::numeric_limits<double>::infinity();
  for (double p : partial) m = std::max(m, p);
  return m;
}

}  // namespace chf
