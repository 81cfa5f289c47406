#include <random>

#include <benchmark/benchmark.h>

#include "flatshell/minimizer.hpp"

using namespace flatshell;

namespace {

DiscreteDisplacement random_state(const Grid& g) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal(0.0, 0.01);
  DiscreteDisplacement u(g);
  for (Eigen::Index k = 0; k < u.packed().size(); ++k) u.packed()[k] = normal(rng);
  u.clamp();
  return u;
}

EnergyAssembly paraboloid_assembly(const Grid& g) {
  return EnergyAssembly(geometry_field(Immersion::paraboloid(0.1), g), Material(1, 1, 0.1),
                        ForceDensity::constant(g, 0.5, -0.3, 1.0));
}

void BM_GeometryField(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Grid g(1, 1, n, n);
  for (auto _ : state) benchmark::DoNotOptimize(geometry_field(Immersion::paraboloid(0.1), g));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}

void BM_Energy(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Grid g(1, 1, n, n);
  const EnergyAssembly e = paraboloid_assembly(g);
  const DiscreteDisplacement u = random_state(g);
  for (auto _ : state) benchmark::DoNotOptimize(e.energy(u));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}

void BM_EnergyAndGradient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Grid g(1, 1, n, n);
  const EnergyAssembly e = paraboloid_assembly(g);
  const DiscreteDisplacement u = random_state(g);
  DiscreteDisplacement grad(g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(e.energy_and_gradient(u, grad));
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}

void BM_Minimize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Grid g(1, 1, n, n);
  const EnergyAssembly e = paraboloid_assembly(g);
  SolverConfig cfg;
  cfg.precondition = state.range(1) != 0;
  int iterations = 0;
  for (auto _ : state) {
    const SolveResult r = minimize(e, DiscreteDisplacement(g), cfg);
    iterations = r.diag.iterations;
    benchmark::DoNotOptimize(r.u.packed().data());
  }
  state.counters["solver_iterations"] = iterations;
}

void BM_RigidityFunctional(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Grid g(1, 1, n, n);
  const DifferenceOperators ops(g);
  const DiscreteDisplacement u = random_state(g);
  DiscreteDisplacement grad(g);
  for (auto _ : state) benchmark::DoNotOptimize(rigidity_functional(ops, u, grad));
}

}  // namespace

BENCHMARK(BM_GeometryField)->Arg(17)->Arg(33)->Arg(65);
BENCHMARK(BM_Energy)->Arg(17)->Arg(33)->Arg(65);
BENCHMARK(BM_EnergyAndGradient)->Arg(17)->Arg(33)->Arg(65);
BENCHMARK(BM_Minimize)->Args({17, 1})->Args({33, 1})->Args({33, 0})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RigidityFunctional)->Arg(17)->Arg(33);

BENCHMARK_MAIN();
