// Benchmarks for the two OpenMP-parallel kernels against their serial
// reference implementations: the unit-group power/commutator tabulation
// (one sift per generator pair) and the coadjoint-orbit rank sweep
// (one Gram-matrix rank per linear functional).
//
// Run with OMP_NUM_THREADS=<n> to vary the parallel width.

#include <benchmark/benchmark.h>

#include "ub0/fakedegree.hpp"
#include "ub0/nilalgebra.hpp"
#include "ub0/pcgroup.hpp"
#include "ub0/smallfield.hpp"
#include "ub0/unitgroup.hpp"

using namespace ub0;

namespace {

NilpotentAlgebra group_ideal(const char* name, std::uint64_t p, std::uint32_t n) {
  return augmentation_ideal(builtin(name), make_field(p, n));
}

void bm_unit_pcp_parallel(benchmark::State& state) {
  const NilpotentAlgebra A = group_ideal("jm14_f39", 2, 1);
  const UnitEngine E(A);
  for (auto _ : state) benchmark::DoNotOptimize(unit_pcp(E));
}

void bm_unit_pcp_serial(benchmark::State& state) {
  const NilpotentAlgebra A = group_ideal("jm14_f39", 2, 1);
  const UnitEngine E(A);
  for (auto _ : state) benchmark::DoNotOptimize(unit_pcp_serial(E));
}

void bm_unit_pcp_parallel_f4(benchmark::State& state) {
  const NilpotentAlgebra A = group_ideal("q8", 2, 2);
  const UnitEngine E(A);
  for (auto _ : state) benchmark::DoNotOptimize(unit_pcp(E));
}

void bm_unit_pcp_serial_f4(benchmark::State& state) {
  const NilpotentAlgebra A = group_ideal("q8", 2, 2);
  const UnitEngine E(A);
  for (auto _ : state) benchmark::DoNotOptimize(unit_pcp_serial(E));
}

void bm_orbit_profile_parallel(benchmark::State& state) {
  const NilpotentAlgebra A = group_ideal("d8", 2, 2);  // 4^7 functionals
  for (auto _ : state) benchmark::DoNotOptimize(coadjoint_profile(A));
}

void bm_orbit_profile_serial(benchmark::State& state) {
  const NilpotentAlgebra A = group_ideal("d8", 2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(coadjoint_profile_serial(A));
}

BENCHMARK(bm_unit_pcp_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_unit_pcp_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_unit_pcp_parallel_f4)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_unit_pcp_serial_f4)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_orbit_profile_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_orbit_profile_serial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
