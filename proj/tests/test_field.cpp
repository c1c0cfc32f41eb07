#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <brlab/curve.hpp>
#include <brlab/errors.hpp>
#include <brlab/field.hpp>
#include <brlab/symbols.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

using namespace brlab;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double max_mod_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.values.size(); ++n)
    m = std::max(m, std::abs(a.values[n] - b.values[n]));
  return m;
}

Field plane_wave(const GridSpec& g, int i0, int j0) {
  Field f(g, Space::physical);
  const double xi1 = g.xi_at(i0), xi2 = g.xi_at(j0);
  for (int i = 0; i < g.N; ++i) {
    const double x1 = g.x_at(i);
    for (int j = 0; j < g.N; ++j) {
      const double x2 = g.x_at(j);
      f.at(i, j) = std::polar(1.0, kTwoPi * (x1 * xi1 + x2 * xi2));
    }
  }
  return f;
}

}  // namespace

TEST_CASE("forward transform of zero is zero") {
  const GridSpec g(4.0, 32);
  const Field z(g, Space::physical);
  const Field zh = forward_transform(z);
  CHECK(zh.space == Space::frequency);
  for (const cplx& v : zh.values) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("plane wave transforms to a one-hot spike of height (2 Lambda)^2") {
  const GridSpec g(4.0, 32);
  const int i0 = 20, j0 = 13;
  const Field f = plane_wave(g, i0, j0);
  const Field fh = forward_transform(f);
  const double spike = 4.0 * g.Lambda * g.Lambda;
  for (int i = 0; i < g.N; ++i)
    for (int j = 0; j < g.N; ++j) {
      const double expect = (i == i0 && j == j0) ? spike : 0.0;
      CHECK(std::abs(fh.at(i, j) - cplx(expect, 0.0)) < 1e-9 * spike);
    }
}

TEST_CASE("gaussian bump transform matches direct quadrature at probe nodes") {
  const GridSpec g(4.0, 64);
  Field f(g, Space::physical);
  for (int i = 0; i < g.N; ++i)
    for (int j = 0; j < g.N; ++j) {
      const double x1 = g.x_at(i), x2 = g.x_at(j);
      f.at(i, j) = std::exp(-(x1 * x1 + x2 * x2));
    }
  const Field fh = forward_transform(f);

  const int probes[5][2] = {{32, 32}, {33, 32}, {32, 35}, {30, 30}, {36, 33}};
  const double h2 = g.h() * g.h();
  for (const auto& p : probes) {
    const double xi1 = g.xi_at(p[0]), xi2 = g.xi_at(p[1]);
    cplx direct(0.0, 0.0);
    for (int i = 0; i < g.N; ++i) {
      const double x1 = g.x_at(i);
      for (int j = 0; j < g.N; ++j) {
        const double x2 = g.x_at(j);
        direct += f.at(i, j) *
                  std::polar(1.0, -kTwoPi * (x1 * xi1 + x2 * xi2));
      }
    }
    direct *= h2;
    CHECK(std::abs(fh.at(p[0], p[1]) - direct) < 1e-8);
  }

  // Near-even input: real, even, positive transform on the inner block.
  for (int i = 1; i < g.N; ++i)
    for (int j = 1; j < g.N; ++j) {
      CHECK(std::abs(fh.at(i, j).imag()) < 1e-5);
      CHECK(std::abs(fh.at(i, j) - fh.at(g.N - i, g.N - j)) < 1e-5);
      if (std::hypot(g.xi_at(i), g.xi_at(j)) <= 2.0)
        CHECK(fh.at(i, j).real() > 0.0);
    }
}

TEST_CASE("inverse transform round trip and one-hot synthesis") {
  const GridSpec g(4.0, 32);
  const Field f = plane_wave(g, 11, 25);
  const Field back = inverse_transform(forward_transform(f));
  CHECK(back.space == Space::physical);
  CHECK(max_mod_diff(back, f) < 1e-12);

  Field onehot(g, Space::frequency);
  onehot.at(11, 25) = cplx(4.0 * g.Lambda * g.Lambda, 0.0);
  const Field wave = inverse_transform(onehot);
  CHECK(max_mod_diff(wave, f) < 1e-10);
}

TEST_CASE("transforms reject wrong-space input") {
  const GridSpec g(4.0, 32);
  CHECK_THROWS_AS(forward_transform(Field(g, Space::frequency)),
                  grid_mismatch_error);
  CHECK_THROWS_AS(inverse_transform(Field(g, Space::physical)),
                  grid_mismatch_error);
}

TEST_CASE("lp_norm on the unit-measure torus") {
  const GridSpec g(0.5, 16);
  Field ones(g, Space::physical);
  for (cplx& v : ones.values) v = 1.0;
  for (double p : {1.0, 2.0, 4.0}) CHECK(lp_norm(ones, p) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lp_norm(ones, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(1.0).epsilon(1e-12));

  Field half(g, Space::physical);
  for (int i = 0; i < g.N; ++i)
    for (int j = 0; j < g.N; ++j) half.at(i, j) = (i < g.N / 2) ? 1.0 : 0.0;
  CHECK(lp_norm(half, 2.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

  const Field zero(g, Space::physical);
  CHECK(lp_norm(zero, 2.0) == 0.0);
  CHECK(lp_norm(3.5 * half, 2.0) ==
        doctest::Approx(3.5 * lp_norm(half, 2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(lp_norm(half, 0.5), parameter_error);
}

TEST_CASE("plancherel holds for random band-limited fields") {
  const GridSpec g(4.0, 64);
  const FreqRegion ann = FreqRegion::annulus(1.0, 3.0);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Field f = random_bandlimited(g, ann, seed);
    const Field fh = forward_transform(f);
    const double n_phys = lp_norm(f, 2.0);
    const double n_freq = lp_norm(fh, 2.0);
    CHECK(std::abs(n_phys - n_freq) < 1e-10 * n_phys);
  }
}

TEST_CASE("apply_multiplier identity, projection idempotence, eigenfunction") {
  const GridSpec g(4.0, 32);
  const Field f = random_bandlimited(g, FreqRegion::annulus(0.5, 2.5), 7);

  const auto one = [](double, double) { return 1.0; };
  CHECK(max_mod_diff(apply_multiplier(f, one), f) < 1e-12);

  const auto upper = [](double, double xi2) { return xi2 > 0.0 ? 1.0 : 0.0; };
  const Field once = apply_multiplier(f, upper);
  const Field twice = apply_multiplier(once, upper);
  CHECK(max_mod_diff(twice, once) < 1e-12);

  // Plane waves are eigenfunctions with eigenvalue = symbol value.
  const Curve c = curve_preset("parabola-b1");
  const Symbol collar = collar_symbol(c, collar_profile(), 0.0625);
  const int i0 = g.N / 2 + 1;
  const int j0 = [&] {
    for (int j = 0; j < g.N; ++j)
      if (collar.eval(g.xi_at(i0), g.xi_at(j)) > 0.1) return j;
    return -1;
  }();
  REQUIRE(j0 >= 0);
  const Field pw = plane_wave(g, i0, j0);
  const double ev = collar.eval(g.xi_at(i0), g.xi_at(j0));
  const Field out = apply_multiplier(pw, collar);
  CHECK(max_mod_diff(out, ev * pw) < 1e-10);
}

TEST_CASE("multiplier composition and shift equivariance") {
  const GridSpec g(4.0, 32);
  const Field f = random_bandlimited(g, FreqRegion::annulus(0.5, 3.0), 19);
  const auto m1 = [](double a, double b) { return std::exp(-(a * a + b * b) / 8.0); };
  const auto m2 = [](double a, double b) { return 1.0 / (1.0 + a * a + b * b); };
  const auto m12 = [&](double a, double b) { return m1(a, b) * m2(a, b); };
  const Field chained = apply_multiplier(apply_multiplier(f, m1), m2);
  const Field fused = apply_multiplier(f, m12);
  CHECK(max_mod_diff(chained, fused) < 1e-10);

  const Field shifted_then_filtered = apply_multiplier(cyclic_shift(f, 5, -3), m1);
  const Field filtered_then_shifted = cyclic_shift(apply_multiplier(f, m1), 5, -3);
  CHECK(max_mod_diff(shifted_then_filtered, filtered_then_shifted) < 1e-10);
}

TEST_CASE("multiplier rejects non-finite symbol values") {
  const GridSpec g(4.0, 16);
  Field f(g, Space::physical);
  f.at(3, 3) = 1.0;
  const auto bad = [](double a, double b) {
    return (a == 0.0 && b == 0.0) ? std::numeric_limits<double>::quiet_NaN()
                                  : 1.0;
  };
  CHECK_THROWS_AS(apply_multiplier(f, bad), symbol_evaluation_error);
}

TEST_CASE("cyclic shift composes and preserves norms") {
  const GridSpec g(4.0, 32);
  const Field f = random_bandlimited(g, FreqRegion::annulus(0.5, 2.0), 23);
  CHECK(max_mod_diff(cyclic_shift(f, 0, 0), f) == 0.0);
  const Field s = cyclic_shift(cyclic_shift(f, 3, 7), -3, -7);
  CHECK(max_mod_diff(s, f) == 0.0);
  CHECK(lp_norm(cyclic_shift(f, 9, 2), 2.0) == doctest::Approx(lp_norm(f, 2.0)).epsilon(1e-14));
  // Full-period shift is the identity.
  CHECK(max_mod_diff(cyclic_shift(f, g.N, -g.N), f) == 0.0);
}

TEST_CASE("reflections are norm-preserving involutions") {
  const GridSpec g(4.0, 32);
  const Field f = random_bandlimited(g, FreqRegion::annulus(0.5, 2.0), 29);
  for (double p : {1.0, 2.0, 4.0}) {
    CHECK(lp_norm(reflect_axis1(f), p) == doctest::Approx(lp_norm(f, p)));
    CHECK(lp_norm(reflect_axis2(f), p) == doctest::Approx(lp_norm(f, p)));
  }
  CHECK(max_mod_diff(reflect_axis1(reflect_axis1(f)), f) == 0.0);
  CHECK(max_mod_diff(reflect_axis2(reflect_axis2(f)), f) == 0.0);
}

TEST_CASE("random_bandlimited determinism, single node, annulus support") {
  const GridSpec g(4.0, 32);
  const FreqRegion ann = FreqRegion::annulus(1.0, 2.0);
  const Field a = random_bandlimited(g, ann, 42);
  const Field b = random_bandlimited(g, ann, 42);
  CHECK(max_mod_diff(a, b) == 0.0);
  const Field other = random_bandlimited(g, ann, 43);
  CHECK(max_mod_diff(a, other) > 1e-3);

  const Field pw = random_bandlimited(g, FreqRegion::single_node(1.25, 0.75), 5);
  CHECK(lp_norm(pw, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  double flat = 0.0, dev = 0.0;
  for (const cplx& v : pw.values) {
    flat = std::max(flat, std::abs(v));
    dev = std::max(dev, std::abs(std::abs(v) - std::abs(pw.values[0])));
  }
  CHECK(flat > 0.0);
  CHECK(dev < 1e-12 * flat);

  const Field fa = random_bandlimited(g, ann, 11);
  const Field fah = forward_transform(fa);
  for (int i = 0; i < g.N; ++i)
    for (int j = 0; j < g.N; ++j) {
      const double r = std::hypot(g.xi_at(i), g.xi_at(j));
      if (!(r > 1.0 && r < 2.0)) CHECK(std::abs(fah.at(i, j)) < 1e-12);
    }

  CHECK_THROWS_AS(
      random_bandlimited(g, FreqRegion::single_node(0.013, 0.0), 3),
      degenerate_input_error);
}

TEST_CASE("brf serialization round trip and header layout") {
  const GridSpec g(2.0, 16);
  const Field f = random_bandlimited(g, FreqRegion::annulus(0.25, 1.5), 77);
  const std::string path = "test_field_roundtrip.brf";
  write_brf(path, f);

  const Field back = read_brf(path);
  CHECK(back.grid == f.grid);
  CHECK(back.space == Space::physical);
  CHECK(max_mod_diff(back, f) == 0.0);

  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  char magic[4];
  in.read(magic, 4);
  CHECK(std::memcmp(magic, "BRF1", 4) == 0);
  std::uint32_t n = 0;
  in.read(reinterpret_cast<char*>(&n), 4);
  CHECK(n == 16u);
  double lambda = 0.0;
  in.read(reinterpret_cast<char*>(&lambda), 8);
  CHECK(lambda == 2.0);
  double re = 0.0, im = 0.0;
  in.read(reinterpret_cast<char*>(&re), 8);
  in.read(reinterpret_cast<char*>(&im), 8);
  CHECK(re == f.values[0].real());
  CHECK(im == f.values[0].imag());
  in.seekg(0, std::ios::end);
  CHECK(static_cast<long long>(in.tellg()) == 16 + 16LL * 16 * 16);
  in.close();
  std::remove(path.c_str());

  CHECK_THROWS_AS(read_brf("does_not_exist.brf"), format_error);
}

TEST_CASE("grid spec validation and lattice indexing") {
  CHECK_THROWS_AS(GridSpec(0.0, 32), parameter_error);
  CHECK_THROWS_AS(GridSpec(4.0, 30), parameter_error);
  CHECK_THROWS_AS(GridSpec(4.0, 8), parameter_error);

  const GridSpec g(4.0, 32);
  CHECK(g.h() == doctest::Approx(0.25));
  CHECK(g.freq_step() == doctest::Approx(0.125));
  CHECK(g.xi_max() == doctest::Approx(2.0));
  CHECK(g.x_at(g.N / 2) == 0.0);
  CHECK(g.xi_at(g.N / 2) == 0.0);
  CHECK(g.x_at(0) == doctest::Approx(-4.0));
  // Index brackets around a frequency interval cover exactly its nodes.
  const int lo = g.xi_lower_index(-0.5), hi = g.xi_upper_index(0.5);
  for (int i = lo; i < hi; ++i) {
    CHECK(g.xi_at(i) >= -0.5 - 1e-12);
    CHECK(g.xi_at(i) <= 0.5 + 1e-12);
  }
  CHECK(g.xi_at(lo - 1) < -0.5);
  CHECK(hi < g.N);
  CHECK(g.xi_at(hi) > 0.5);
}
