// Serial reference kernels vs. their OpenMP counterparts on a refined icosphere.

#include <random>

#include <benchmark/benchmark.h>

#include "monoiter/expression.hpp"
#include "monoiter/iteration.hpp"

using namespace monoiter;

namespace {

const DomainPtr& sphere(int s) {
  static std::vector<DomainPtr> cache(9);
  if (!cache[s]) cache[s] = build_icosphere(s, 1.0);
  return cache[s];
}

Eigen::VectorXd random_vector(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

Execution mode(const benchmark::State& state) {
  return state.range(1) ? Execution::parallel : Execution::serial;
}

void label(benchmark::State& state, int n) {
  state.SetLabel(state.range(1) ? "parallel" : "serial");
  state.counters["vertices"] = n;
}

void BM_ShiftedSpmv(benchmark::State& state) {
  const DomainPtr& d = sphere(static_cast<int>(state.range(0)));
  const int n = d->vertex_count();
  const Eigen::VectorXd x = random_vector(n, 1), shift = random_vector(n, 2);
  Eigen::VectorXd y(n);
  for (auto _ : state) {
    kernels::shifted_spmv(mode(state), d->stiffness_view(), as_span(shift), as_span(x), as_span(y));
    benchmark::DoNotOptimize(y.data());
  }
  label(state, n);
}

void BM_Dot(benchmark::State& state) {
  const int n = sphere(static_cast<int>(state.range(0)))->vertex_count();
  const Eigen::VectorXd x = random_vector(n, 3), y = random_vector(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::dot(mode(state), as_span(x), as_span(y)));
  label(state, n);
}

void BM_ApplyS(benchmark::State& state) {
  const DomainPtr& d = sphere(static_cast<int>(state.range(0)));
  const int n = d->vertex_count();
  const NonlinearProblem p(Field::constant(d, 2), Field::constant(d, 0.5), Field::constant(d, 0.5),
                           ScalarNonlinearity::power(5), ScalarNonlinearity::power(0.5), 3);
  const Field v(d, random_vector(n, 5));
  for (auto _ : state) benchmark::DoNotOptimize(apply_S(p, v, mode(state)));
  label(state, n);
}

void BM_SolveT(benchmark::State& state) {
  const DomainPtr& d = sphere(static_cast<int>(state.range(0)));
  const int n = d->vertex_count();
  const LinearProblem p(Field(d, (random_vector(n, 6).array() + 0.5).matrix()));
  const DualVector psi(d, random_vector(n, 7));
  SolveOptions opts;
  opts.execution = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(solve_T(p, psi, opts));
  label(state, n);
}

void BM_IterateMonotone(benchmark::State& state) {
  const DomainPtr& d = sphere(static_cast<int>(state.range(0)));
  const NonlinearProblem p(parse_coefficient("2+0.5*z", d), Field::constant(d, 0.5),
                           Field::constant(d, 0.5), ScalarNonlinearity::power(5),
                           ScalarNonlinearity::power(0.5), 3);
  const Bracket b{Field::constant(d, 0.01), Field::constant(d, 1.0)};
  IterationOptions opts;
  opts.execution = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(iterate_monotone(p, b, opts));
  label(state, d->vertex_count());
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int s : {5, 6, 7})
    for (int par : {0, 1}) b->Args({s, par});
}

}  // namespace

BENCHMARK(BM_ShiftedSpmv)->Apply(sizes);
BENCHMARK(BM_Dot)->Apply(sizes);
BENCHMARK(BM_ApplyS)->Apply(sizes);
BENCHMARK(BM_SolveT)->Args({5, 0})->Args({5, 1})->Args({6, 0})->Args({6, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IterateMonotone)->Args({4, 0})->Args({4, 1})->Args({5, 0})->Args({5, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
