#pragma once

// Data-parallel sweeps. Every kernel has a serial reference; the OpenMP variant writes each
// result to its own slot, so both produce identical output regardless of thread count.

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

#include "semistab/quadrature.hpp"

namespace semistab::kernels {

/// Number of OpenMP threads available (1 without OpenMP).
int max_threads();

template <class Fn>
auto map_serial(std::size_t n, Fn&& fn) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
  return out;
}

template <class Fn>
auto map_parallel(std::size_t n, Fn&& fn) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out(n);
  std::exception_ptr error;
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(semistab_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

template <class Fn>
auto map(std::size_t n, bool parallel, Fn&& fn) {
  return parallel ? map_parallel(n, std::forward<Fn>(fn)) : map_serial(n, std::forward<Fn>(fn));
}

/// Index of the largest value, +inf included, NaN and -inf skipped (ties: lowest index); -1 when none qualifies.
long argmax(const std::vector<double>& values);

/// Sum of w_i f(x_i) over a tensor rule. The parallel variant evaluates in parallel and
/// reduces serially in index order.
double tensor_sum_serial(const TensorRule& rule, const std::function<double(const std::vector<double>&)>& f);
double tensor_sum_parallel(const TensorRule& rule, const std::function<double(const std::vector<double>&)>& f);

}  // namespace semistab::kernels
