#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "ihf/kernels.hpp"
#include "ihf/solver.hpp"

namespace {

using namespace ihf;

// Annulus 1 < |x| < R with spacing h; args are (1/h, m).
DomainPtr annulus(const benchmark::State& state) {
  GridSpec s;
  s.dimension = 2;
  s.spacing = 1.0 / double(state.range(0));
  s.outer_radius = 4.0;
  s.stencil_width = int(state.range(1));
  s.obstacle = BallObstacle{};
  return make_domain(s);
}

std::vector<double> start_values(const Domain& d) {
  std::vector<double> u(d.size(), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.classification(i) == NodeClass::Excluded) continue;
    const auto x = d.point(i);
    u[i] = std::hypot(x[0], x[1]) + 0.1 * std::sin(3.0 * x[0]);
  }
  return u;
}

template <double (*Sweep)(const Domain&, std::span<double>)>
void colored(benchmark::State& state) {
  const auto d = annulus(state);
  auto u = start_values(*d);
  for (auto _ : state) benchmark::DoNotOptimize(Sweep(*d, u));
  state.counters["nodes"] = double(d->size());
}

template <double (*Sweep)(const Domain&, std::span<const double>, std::span<double>)>
void jacobi(benchmark::State& state) {
  const auto d = annulus(state);
  auto u = start_values(*d);
  auto v = u;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Sweep(*d, u, v));
    u.swap(v);
  }
  state.counters["nodes"] = double(d->size());
}

template <double (*Residual)(const Domain&, std::span<const double>)>
void residual(benchmark::State& state) {
  const auto d = annulus(state);
  const auto u = start_values(*d);
  for (auto _ : state) benchmark::DoNotOptimize(Residual(*d, u));
  state.counters["nodes"] = double(d->size());
}

template <Backend B>
void solve(benchmark::State& state) {
  const auto d = annulus(state);
  const auto bc = make_boundary(*d, [](const Point&) { return 0.0; },
                                [](const Point& x) { return std::hypot(x[0], x[1]) - 1.0; });
  SolveOptions o;
  o.tol = 1e-6;
  o.backend = B;
  for (auto _ : state) benchmark::DoNotOptimize(solve_dirichlet(d, bc, o).iterations);
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int inv_h : {10, 20, 40})
    for (int m : {2, 4}) b->Args({inv_h, m});
}

}  // namespace

BENCHMARK(colored<kernels::serial::colored_sweep>)->Name("colored_sweep/serial")->Apply(sizes);
BENCHMARK(colored<kernels::omp::colored_sweep>)->Name("colored_sweep/omp")->Apply(sizes)->UseRealTime();
BENCHMARK(jacobi<kernels::serial::jacobi_sweep>)->Name("jacobi_sweep/serial")->Apply(sizes);
BENCHMARK(jacobi<kernels::omp::jacobi_sweep>)->Name("jacobi_sweep/omp")->Apply(sizes)->UseRealTime();
BENCHMARK(residual<kernels::serial::residual_max>)->Name("residual_max/serial")->Apply(sizes);
BENCHMARK(residual<kernels::omp::residual_max>)->Name("residual_max/omp")->Apply(sizes)->UseRealTime();
BENCHMARK(solve<Backend::Serial>)->Name("solve/serial")->Args({10, 2})->Args({20, 2})->Unit(benchmark::kMillisecond);
BENCHMARK(solve<Backend::Parallel>)->Name("solve/omp")->Args({10, 2})->Args({20, 2})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
