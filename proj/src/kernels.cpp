#include "semistab/kernels.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace semistab::kernels {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

long argmax(const std::vector<double>& values) {
  long best = -1;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) && !(values[i] == INFINITY)) continue;
    if (best < 0 || values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<long>(i);
  }
  return best;
}

double tensor_sum_serial(const TensorRule& rule, const std::function<double(const std::vector<double>&)>& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.points.size(); ++i) acc += rule.weights[i] * f(rule.points[i]);
  return acc;
}

double tensor_sum_parallel(const TensorRule& rule, const std::function<double(const std::vector<double>&)>& f) {
  const auto values = map_parallel(rule.points.size(), [&](std::size_t i) { return f(rule.points[i]); });
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) acc += rule.weights[i] * values[i];
  return acc;
}

}  // namespace semistab::kernels
