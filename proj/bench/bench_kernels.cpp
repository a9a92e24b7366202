#include <map>
#include <random>

#include <benchmark/benchmark.h>

#include "wdecay/checks.hpp"
#include "wdecay/model.hpp"
#include "wdecay/ops.hpp"

namespace {

struct Fixture {
  wdecay::Model model;
  wdecay::FockBasis basis;
  wdecay::SparseMatrix h;
  Eigen::VectorXcd x;
};

const Fixture& fixture(std::size_t shells) {
  static std::map<std::size_t, Fixture> cache;
  auto it = cache.find(shells);
  if (it != cache.end()) return it->second;
  wdecay::ModelSpec spec;
  spec.grid.shells = shells;
  spec.grid.massive_shells = 2;
  spec.caps.neutrino = 1;
  spec.caps.antineutrino = 1;
  Fixture f;
  f.model = wdecay::build_model(spec, wdecay::RunMode::Explore);
  f.basis = wdecay::FockBasis::enumerate(f.model.grid, 1, spec.caps);
  const auto h0 = wdecay::assemble_h0(f.basis, spec.physics.masses);
  f.h = wdecay::total_hamiltonian(h0, wdecay::assemble_interaction(f.basis, f.model.kernels), 1e-3);
  std::mt19937_64 rng(3);
  f.x = wdecay::random_unit_vector(f.basis.dimension(), rng);
  return cache.emplace(shells, std::move(f)).first->second;
}

wdecay::Execution exec_of(const benchmark::State& s) {
  return s.range(1) ? wdecay::Execution::Parallel : wdecay::Execution::Serial;
}

void BM_SpMV(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  const auto exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(wdecay::multiply(f.h, f.x, exec));
  state.counters["dim"] = static_cast<double>(f.basis.dimension());
  state.counters["nnz"] = static_cast<double>(f.h.nnz());
}

void BM_AssembleInteraction(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  const auto exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(wdecay::assemble_interaction(f.basis, f.model.kernels, exec));
}

void BM_Product(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  const auto exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(wdecay::product(f.h, f.h, exec));
}

}  // namespace

BENCHMARK(BM_SpMV)->ArgsProduct({{6, 12}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_AssembleInteraction)->ArgsProduct({{6, 12}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Product)->ArgsProduct({{6}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
