// Serial reference vs OpenMP element kernels on structured meshes.

#include <benchmark/benchmark.h>

#include "perzyna/kernels.hpp"

using namespace perzyna;

namespace {

struct Fixture {
  Mesh mesh;
  MaterialParams params = MaterialParams::make(2.0, 1.0, 0.3, 1.0);
  ElementTensors strain, p_old, stress;
  kernels::PointResults points;

  explicit Fixture(int n) : mesh(build_rect_mesh({n, n, 1.0, 1.0})) {
    // Quadratic shear, strong enough that part of the mesh yields.
    NodalVectors u(mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i) {
      const Vec2& x = mesh.nodes[i];
      u[i] = Vec2(1.5 * x.y() * x.y(), 0.2 * x.x() * x.y());
    }
    strain = element_strains(mesh, u);
    p_old.assign(mesh.num_triangles(), SymTensor2{});
    kernels::serial::update_points(batch(), params, points);
    for (const auto& up : points.updates) stress.push_back(up.state.sigma);
  }

  kernels::PointBatch batch() const { return {strain, p_old, 0.05, 1e-2, kernels::Constitutive::perzyna, 0.0}; }
};

template <bool Parallel>
void BM_update_points(benchmark::State& state) {
  const Fixture fx(static_cast<int>(state.range(0)));
  kernels::PointResults out;
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::omp::update_points(fx.batch(), fx.params, out);
    } else {
      kernels::serial::update_points(fx.batch(), fx.params, out);
    }
    benchmark::DoNotOptimize(out.updates.data());
  }
  state.SetItemsProcessed(state.iterations() * fx.mesh.num_triangles());
  state.counters["threads"] = Parallel ? kernels::omp::max_threads() : 1;
}

template <bool Parallel>
void BM_element_contributions(benchmark::State& state) {
  const Fixture fx(static_cast<int>(state.range(0)));
  std::vector<ElementContribution> out(fx.mesh.num_triangles());
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::omp::element_contributions(fx.mesh, fx.stress, fx.points.tangents, out);
    } else {
      kernels::serial::element_contributions(fx.mesh, fx.stress, fx.points.tangents, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * fx.mesh.num_triangles());
  state.counters["threads"] = Parallel ? kernels::omp::max_threads() : 1;
}

}  // namespace

BENCHMARK(BM_update_points<false>)->Name("update_points/serial")->Arg(16)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_update_points<true>)->Name("update_points/omp")->Arg(16)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_element_contributions<false>)->Name("element_contributions/serial")->Arg(16)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_element_contributions<true>)->Name("element_contributions/omp")->Arg(16)->Arg(32)->Arg(64)->Arg(128);

BENCHMARK_MAIN();
