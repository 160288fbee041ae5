// Compares the OpenMP kernels with their single-threaded reference
// implementations: full-state coefficient sweeps and one 4D quadrature.
// Run with HGSPDC_THREADS=1 to confirm the parallel path degrades to the
// serial timing.

#include <benchmark/benchmark.h>

#include "hgspdc/oracle.hpp"
#include "hgspdc/spdc_coeffs.hpp"

namespace {

hgspdc::CrystalConfig reference_config() {
  hgspdc::CrystalConfig config;
  config.pump_wavelength = 351e-9;
  config.pump_waist = 0.1e-3;
  config.crystal_length_L = 1e-3;
  return config;
}

void BM_build_state_parallel(benchmark::State& state) {
  const auto config = reference_config();
  const auto pump = hgspdc::PumpSpec::single({0, 0});
  const int max_order = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto result =
        hgspdc::build_state(config, pump, max_order, hgspdc::Method::exact);
    benchmark::DoNotOptimize(result.amplitudes);
  }
}
BENCHMARK(BM_build_state_parallel)->Arg(12)->Arg(20)->Arg(28);

void BM_build_state_serial(benchmark::State& state) {
  const auto config = reference_config();
  const auto pump = hgspdc::PumpSpec::single({0, 0});
  const int max_order = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto result = hgspdc::build_state_serial(config, pump, max_order,
                                             hgspdc::Method::exact);
    benchmark::DoNotOptimize(result.amplitudes);
  }
}
BENCHMARK(BM_build_state_serial)->Arg(12)->Arg(20)->Arg(28);

void BM_quadrature_4d_parallel(benchmark::State& state) {
  const auto config = reference_config();
  hgspdc::QuadratureSpec spec;
  spec.points_per_axis = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto result = hgspdc::coeff_quadrature_4d(config, {0, 0}, {1, 0, 1, 0},
                                              spec);
    benchmark::DoNotOptimize(result.value);
  }
}
BENCHMARK(BM_quadrature_4d_parallel)->Arg(32)->Arg(48)->Arg(64);

void BM_quadrature_4d_serial(benchmark::State& state) {
  const auto config = reference_config();
  hgspdc::QuadratureSpec spec;
  spec.points_per_axis = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto result = hgspdc::coeff_quadrature_4d_serial(config, {0, 0},
                                                     {1, 0, 1, 0}, spec);
    benchmark::DoNotOptimize(result.value);
  }
}
BENCHMARK(BM_quadrature_4d_serial)->Arg(32)->Arg(48)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
