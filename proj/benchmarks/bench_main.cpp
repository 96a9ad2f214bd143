#include <benchmark/benchmark.h>

#include "weaknoise/correlator.hpp"
#include "weaknoise/junction.hpp"
#include "weaknoise/oscillator.hpp"
#include "weaknoise/povm.hpp"

using namespace weaknoise;
using hilbert::Matrix;
using hilbert::Operator;

namespace {

Operator tls_h() { return Operator(Matrix(0.5 * hilbert::pauli_z().matrix())); }

void BM_GridCorrelator(benchmark::State& state) {
  const double dt = 0.04 / static_cast<double>(state.range(0));
  const Operator h = tls_h();
  const correlator::WeakCorrelatorRequest req{h,
                                              hilbert::thermal_state(h, 1.0),
                                              {{hilbert::pauli_x(), 4.0}, {hilbert::pauli_x(), 5.2}, {hilbert::pauli_y(), 6.1}},
                                              kernel::MemoryKernel::equilibrium(0.5),
                                              {dt, 0.0, 10.0}};
  for (auto _ : state) benchmark::DoNotOptimize(correlator::weak_correlator_grid(req));
}
BENCHMARK(BM_GridCorrelator)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Fig1Scan(benchmark::State& state) {
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(4.0 * i / 400.0);
  for (auto _ : state) benchmark::DoNotOptimize(junction::fig1_scan(junction::JunctionConfig{}, grid));
}
BENCHMARK(BM_Fig1Scan)->Unit(benchmark::kMillisecond);

void BM_LehmannOscillator(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const oscillator::FockSpace s(dim);
  const Operator h = s.hamiltonian(1.0);
  const auto rho = hilbert::thermal_state(h, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(correlator::lehmann_spectrum(h, rho, s.x(), s.x()));
}
BENCHMARK(BM_LehmannOscillator)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_PovmDistribution(benchmark::State& state) {
  Matrix g = Matrix::Zero(2, 2);
  g(0, 0) = 1.0;
  const povm::MeasurementPlan plan{tls_h(),
                                   hilbert::DensityMatrix(g),
                                   {{hilbert::pauli_x(), 1.0}, {hilbert::pauli_x(), 2.31}},
                                   kernel::MemoryKernel::equilibrium(0.0),
                                   0.04,
                                   0.0,
                                   3.5,
                                   0.1,
                                   {}};
  for (auto _ : state) benchmark::DoNotOptimize(povm::outcome_distribution(plan, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_PovmDistribution)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
