#include <benchmark/benchmark.h>

#include <cmath>

#include "semistab/grid.hpp"
#include "semistab/kernels.hpp"
#include "semistab/quadrature.hpp"
#include "semistab/weights.hpp"

using namespace semistab;

namespace {

auto bench_problem(bool parallel) {
  auto pr = parse_problem("family = affine\na = 1\nb = -1\nh_expr = 0.2*abs(x - 1) - 0.5\nrho_expr = exp(-abs(x))\n");
  pr.grid.parallel = parallel;
  return pr;
}

void operator_norm_curve(benchmark::State& state, bool parallel) {
  const auto pr = bench_problem(parallel);
  const auto grid = sample_domain(pr.domain, pr.grid);
  const auto times = time_grid(10.0, static_cast<std::size_t>(state.range(0)));
  const WeightEvolution we(pr);
  for (auto _ : state) benchmark::DoNotOptimize(we.operator_norm_curve(times, grid));
  state.counters["threads"] = kernels::max_threads();
}

double heavy(std::size_t i) {
  const double x = 1e-3 * static_cast<double>(i);
  return integrate([x](double s) { return std::exp(-s * x) * std::cos(s); }, 0.0, 10.0).value;
}

void map_quadrature(benchmark::State& state, bool parallel) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::map(n, parallel, heavy));
  state.counters["threads"] = kernels::max_threads();
}

void tensor_sum(benchmark::State& state, bool parallel) {
  const Box sq{{Interval{0, 1}, Interval{0, 1}}};
  const auto rule = tensor_rule(sq, static_cast<int>(state.range(0)), 8);
  auto f = [](const std::vector<double>& x) { return std::exp(-x[0] * x[1]) * std::sin(3 * x[0]); };
  for (auto _ : state)
    benchmark::DoNotOptimize(parallel ? kernels::tensor_sum_parallel(rule, f) : kernels::tensor_sum_serial(rule, f));
}

}  // namespace

BENCHMARK_CAPTURE(operator_norm_curve, serial, false)->Arg(24)->Arg(96)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(operator_norm_curve, openmp, true)->Arg(24)->Arg(96)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(map_quadrature, serial, false)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(map_quadrature, openmp, true)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(tensor_sum, serial, false)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(tensor_sum, openmp, true)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
