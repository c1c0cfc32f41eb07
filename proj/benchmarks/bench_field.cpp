#include <benchmark/benchmark.h>

#include "brlab/curve.hpp"
#include "brlab/field.hpp"
#include "brlab/operators.hpp"
#include "brlab/quadrature.hpp"
#include "brlab/symbols.hpp"

using namespace brlab;

static void BM_ForwardTransform(benchmark::State& state) {
  const GridSpec g(16.0, static_cast<int>(state.range(0)));
  const Field f = random_bandlimited(g, FreqRegion::annulus(1.0, 6.0), 7);
  for (auto _ : state) {
    Field fh = forward_transform(f);
    benchmark::DoNotOptimize(fh.values.data());
  }
}
BENCHMARK(BM_ForwardTransform)->Arg(128)->Arg(256)->Arg(512);

static void BM_ApplyMultiplier(benchmark::State& state) {
  const GridSpec g(16.0, static_cast<int>(state.range(0)));
  const Field f = random_bandlimited(g, FreqRegion::annulus(1.0, 6.0), 7);
  const Curve c = curve_preset("parabola-b1");
  const Symbol s = collar_symbol(c, collar_profile(), 0.0625);
  for (auto _ : state) {
    Field out = apply_multiplier(f, s.eval);
    benchmark::DoNotOptimize(out.values.data());
  }
}
BENCHMARK(BM_ApplyMultiplier)->Arg(128)->Arg(256);

static void BM_SquareFunction(benchmark::State& state) {
  const GridSpec g(16.0, static_cast<int>(state.range(0)));
  const Curve c = curve_preset("parabola-b1");
  const double delta = 0.0625;
  const Symbol s = collar_symbol(c, collar_profile(), delta);
  const Field f = random_bandlimited(g, FreqRegion::annulus(2.5, 3.0), 7);
  const Field fh = forward_transform(f);
  const Band band = time_band(s, fh);
  const TimeQuadrature quad = make_time_quadrature(band.lo, band.hi, 64);
  for (auto _ : state) {
    Field out = square_function(fh, s, quad);
    benchmark::DoNotOptimize(out.values.data());
  }
}
BENCHMARK(BM_SquareFunction)->Arg(128)->Arg(256);

BENCHMARK_MAIN();
