#include "wplab/classical.hpp"
#include "wplab/fft.hpp"
#include "wplab/field.hpp"
#include "wplab/potential.hpp"
#include "wplab/profile.hpp"
#include "wplab/solver.hpp"

#include <benchmark/benchmark.h>

using namespace wplab;

namespace {

Point axis(int dim, double a) {
  Point x = Point::Zero(dim);
  x(0) = a;
  return x;
}

void BM_Fft(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const GridSpec g = GridSpec::uniform(dim, 4.0, n);
  Fft fft(g);
  std::vector<cplx> data(g.size(), cplx(1.0, 0.5));
  for (auto _ : state) {
    fft.forward(data);
    fft.backward(data);
    benchmark::DoNotOptimize(data.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}
BENCHMARK(BM_Fft)->Args({1, 4096})->Args({2, 256})->Args({3, 64});

void BM_FullStep(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  // Both sizes satisfy the resolution and boundary checks for xi = 1.2.
  const double eps = dim == 1 ? 1.0 / 32.0 : 1.0 / 8.0;
  const auto model = models::bump_coupling(dim);
  const GridSpec g = GridSpec::uniform(dim, dim == 1 ? 3.0 : 2.5, n);
  ComplexField psi = polarize(build_wavepacket({axis(dim, dim == 1 ? -0.9 : 0.0), axis(dim, 1.2)}, eps, g), *model, Mode::plus);
  FullSystemStepper stepper(*model, g, eps, 1.0, critical_beta(dim), eps / 20.0);
  for (auto _ : state) {
    stepper.step(psi);
    benchmark::DoNotOptimize(psi.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}
BENCHMARK(BM_FullStep)->Args({1, 4096})->Args({2, 256})->Unit(benchmark::kMicrosecond);

void BM_ProfileStep(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const GridSpec yg = profile_grid(dim, n);
  ComplexField u = sample_profile_data({axis(dim, 0.0), axis(dim, 1.0)}, yg);
  ProfileStepper stepper(yg, constant_q(SymMat::Identity(dim, dim)), 1.0);
  double t = 0.0;
  for (auto _ : state) {
    stepper.step(u, t, 1e-3);
    t += 1e-3;
    benchmark::DoNotOptimize(u.values().data());
  }
}
BENCHMARK(BM_ProfileStep)->Args({1, 128})->Args({2, 128})->Unit(benchmark::kMicrosecond);

void BM_Eigen(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto model = models::bump_coupling(dim);
  const Point x = Point::Constant(dim, 0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model->eigen(x));
    benchmark::DoNotOptimize(model->hessian_lambda(x, Mode::plus));
  }
}
BENCHMARK(BM_Eigen)->DenseRange(1, 3);

void BM_Trajectory(benchmark::State& state) {
  const auto model = models::bump_coupling(1);
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate_trajectory(model, axis(1, -0.9), axis(1, 1.2), Mode::plus, 2.0));
}
BENCHMARK(BM_Trajectory)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
