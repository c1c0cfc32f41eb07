#include <benchmark/benchmark.h>

#include "brlab/field.hpp"
#include "brlab/maximal.hpp"

using namespace brlab;

static void BM_HLMaximal(benchmark::State& state) {
  const GridSpec g(16.0, static_cast<int>(state.range(0)));
  const Field f =
      modulus_field(random_bandlimited(g, FreqRegion::annulus(1.0, 6.0), 7));
  for (auto _ : state) {
    Field m = hl_maximal(f);
    benchmark::DoNotOptimize(m.values.data());
  }
}
BENCHMARK(BM_HLMaximal)->Arg(128)->Arg(256);

static void BM_KakeyaMaximal(benchmark::State& state) {
  const GridSpec g(16.0, static_cast<int>(state.range(0)));
  const DirectionSet dirs = dyadic_directions(32);
  const RectFamily fam = dyadic_tube_family(g, g.h());
  const Field f = focusing_example(g, dirs, 1.5);
  for (auto _ : state) {
    Field m = kakeya_maximal(f, dirs, fam);
    benchmark::DoNotOptimize(m.values.data());
  }
}
BENCHMARK(BM_KakeyaMaximal)->Arg(64)->Arg(128);

BENCHMARK_MAIN();
