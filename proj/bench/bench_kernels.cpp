// Serial reference loops against the OpenMP kernels on the same inputs.

#include "sphap/bijectivity.hpp"
#include "sphap/kernels.hpp"
#include "sphap/stretch.hpp"

#include <benchmark/benchmark.h>

#include <map>

using namespace sphap;

namespace {

struct Fixture {
  SimplicialSurface mesh;
  MatrixX3 f;
  PlanarMapping h;
};

const Fixture& fixture(int level) {
  static std::map<int, Fixture> cache;
  auto it = cache.find(level);
  if (it == cache.end()) {
    auto mesh = make_bumpy_sphere(level, 0.2, 3);
    auto f = project_to_manifold(mesh.vertices());
    auto h = stereographic(f);
    it = cache.emplace(level, Fixture{std::move(mesh), f.rows(), std::move(h)}).first;
  }
  return it->second;
}

void face_terms(benchmark::State& state, Execution exec) {
  const auto& fx = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::face_terms(fx.mesh, fx.f, true, exec));
  state.SetItemsProcessed(state.iterations() * fx.mesh.num_faces());
}

void orientations(benchmark::State& state, Execution exec) {
  const auto& fx = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(exec == Execution::serial
                                 ? kernels::face_orientations_serial(fx.mesh, fx.f)
                                 : kernels::face_orientations_parallel(fx.mesh, fx.f));
  state.SetItemsProcessed(state.iterations() * fx.mesh.num_faces());
}

void ratios(benchmark::State& state, Execution exec) {
  const auto& fx = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::area_ratios(fx.mesh, fx.f, exec));
  state.SetItemsProcessed(state.iterations() * fx.mesh.num_faces());
}

void energy_gradient(benchmark::State& state, Execution exec) {
  const auto& fx = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(normalized_energy_gradient(fx.mesh, fx.f, exec));
  state.SetItemsProcessed(state.iterations() * fx.mesh.num_faces());
}

void mean_value(benchmark::State& state, Execution exec) {
  const auto& fx = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_mean_value_laplacian(fx.mesh, fx.h, exec));
  state.SetItemsProcessed(state.iterations() * fx.mesh.num_faces());
}

}  // namespace

#define SPHAP_BENCH_PAIR(fn)                                             \
  BENCHMARK_CAPTURE(fn, serial, Execution::serial)->DenseRange(4, 6, 1); \
  BENCHMARK_CAPTURE(fn, parallel, Execution::parallel)->DenseRange(4, 6, 1)

SPHAP_BENCH_PAIR(face_terms);
SPHAP_BENCH_PAIR(orientations);
SPHAP_BENCH_PAIR(ratios);
SPHAP_BENCH_PAIR(energy_gradient);
SPHAP_BENCH_PAIR(mean_value);

BENCHMARK_MAIN();
