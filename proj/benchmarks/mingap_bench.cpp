#include <benchmark/benchmark.h>

#include <mingap/circle.hpp>
#include <mingap/dstat.hpp>
#include <mingap/energy.hpp>
#include <mingap/sequences.hpp>

using namespace mingap;

static void BM_OrbitMinimalGap(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto seq = generate_monomial(2, n);
  std::uint64_t i = 0;
  for (auto _ : state) {
    const auto o = orbit(sample_angle(1, i++, 128), seq, n);
    benchmark::DoNotOptimize(minimal_gap(o));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_OrbitMinimalGap)->RangeMultiplier(4)->Range(256, 65536)->Complexity();

static void BM_OrbitLacunary(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto seq = generate_lacunary(2, n);
  const unsigned bits = default_bits(seq, n);
  std::uint64_t i = 0;
  for (auto _ : state) {
    const auto o = orbit(sample_angle(2, i++, bits), seq, n);
    benchmark::DoNotOptimize(minimal_gap(o));
  }
}
BENCHMARK(BM_OrbitLacunary)->Arg(128)->Arg(512)->Arg(2048);

static void BM_DStatistic(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto seq = generate_monomial(2, n);
  const auto o = orbit(sample_angle(3, 0, 128), seq, n);
  const auto& w = window(state.range(1) ? WindowKind::bump : WindowKind::triangle);
  const auto m = static_cast<std::int64_t>(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(d_statistic(o, n, m, w));
  }
}
BENCHMARK(BM_DStatistic)->ArgsProduct({{1024, 16384}, {0, 1}});

static void BM_DifferenceHistogram(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto seq = generate_primes(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(additive_energy(difference_histogram(seq, n)));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DifferenceHistogram)->RangeMultiplier(2)->Range(128, 2048)->Complexity();

static void BM_GcdSum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto hist = difference_histogram(generate_monomial(2, n), n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gcd_sum(hist));
  }
}
BENCHMARK(BM_GcdSum)->Arg(25)->Arg(50)->Arg(100);

BENCHMARK_MAIN();
