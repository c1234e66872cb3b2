// bench_core.cpp — timings of the dense kernels, one sweep cell and the finite-size spectrum
#include <benchmark/benchmark.h>

#include "cbec/finite_size.hpp"
#include "cbec/linalg.hpp"
#include "cbec/moments.hpp"
#include "cbec/stability.hpp"
#include "cbec/third_quantization.hpp"

using namespace cbec;

namespace {

ModelParams oscillating_phase() {
  ModelParams p;
  p.lambda_d = 6.3;
  p.lambda_s = 7.25;
  p.omega = 46.0;
  p.omega0 = 7.4;
  p.kappa = 1250.0;
  p.n_atoms = 2000.0;
  return p;
}

void BM_EigStructureMatrix(benchmark::State& state) {
  const CMatrix x = assemble_structure(build_normal_liouvillian(oscillating_phase())).x;
  for (auto _ : state) benchmark::DoNotOptimize(eig_complex(x));
}
BENCHMARK(BM_EigStructureMatrix);

void BM_EigRandom(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CMatrix m = CMatrix::Random(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(eigenvalues_complex(m));
  state.SetComplexityN(n);
}
BENCHMARK(BM_EigRandom)->RangeMultiplier(2)->Range(8, 256)->Complexity(benchmark::oNCubed);

void BM_Sylvester(benchmark::State& state) {
  const ModelParams p = ModelParams::from_polar(3.0, 40.0, 15.0, 1.0, 6.0);
  const StructureMatrices s = assemble_structure(build_normal_liouvillian(p));
  for (auto _ : state) benchmark::DoNotOptimize(solve_sylvester(s.x, s.x, s.y));
}
BENCHMARK(BM_Sylvester);

void BM_NormalPolynomialRoots(benchmark::State& state) {
  const PolyCoeffs poly = normal_rapidity_polynomial(oscillating_phase());
  for (auto _ : state) benchmark::DoNotOptimize(poly_roots(poly));
}
BENCHMARK(BM_NormalPolynomialRoots);

void BM_ShiftEquations(benchmark::State& state) {
  const ModelParams p = ModelParams::from_polar(121.65, 40.0, 150.0, 7.4, 1250.0, 2000.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_shift_equations(p));
}
BENCHMARK(BM_ShiftEquations)->Unit(benchmark::kMillisecond);

void BM_SweepCell(benchmark::State& state) {
  const ModelParams p = ModelParams::from_polar(121.65, 40.0, 150.0, 7.4, 1250.0, 2000.0);
  for (auto _ : state) benchmark::DoNotOptimize(analyse_point(p, 40.0));
}
BENCHMARK(BM_SweepCell)->Unit(benchmark::kMillisecond);

void BM_EvolveMoments(benchmark::State& state) {
  const DriftDiffusion dd = drift_and_diffusion(build_normal_liouvillian(oscillating_phase()));
  for (auto _ : state) benchmark::DoNotOptimize(evolve_moments(dd, MomentState::vacuum(0.1), 1.0, 0.001));
}
BENCHMARK(BM_EvolveMoments)->Unit(benchmark::kMillisecond);

void BM_FiniteSpectrum(benchmark::State& state) {
  FiniteModel fm;
  fm.params = ModelParams::from_polar(0.5, 45.0, 1.0, 1.0, 100.0);
  fm.n_atoms = static_cast<int>(state.range(0));
  fm.fock_cutoff = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(finite_spectrum(fm));
  state.counters["dims"] = fm.dims();
}
BENCHMARK(BM_FiniteSpectrum)->Args({1, 2})->Args({1, 4})->Args({2, 2})->Args({2, 4})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
