#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "brlab/grid.hpp"

namespace brlab {

using cplx = std::complex<double>;

enum class Space { physical, frequency };

// Complex scalar field sampled on a GridSpec, in physical or frequency space.
// Storage is row-major with the first axis slow: values[i * N + j] holds the
// sample at (x1_i, x2_j) resp. (xi1_i, xi2_j), both axes in coordinate order.
//
// Transform conventions (so that the discrete Plancherel identity holds with
// no extra factors):
//   analysis:   fhat(xi) = h^2 * sum_x f(x) exp(-2 pi i <x, xi>)
//   synthesis:  f(x) = (1/(2 Lambda))^2 * sum_xi fhat(xi) exp(+2 pi i <x, xi>)
struct Field {
  GridSpec grid;
  Space space = Space::physical;
  std::vector<cplx> values;

  Field() = default;
  Field(const GridSpec& g, Space s)
      : grid(g), space(s), values(static_cast<std::size_t>(g.node_count())) {}

  cplx& at(int i, int j) { return values[static_cast<std::size_t>(i) * grid.N + j]; }
  const cplx& at(int i, int j) const {
    return values[static_cast<std::size_t>(i) * grid.N + j];
  }
};

// Frequency-region descriptor for band-limited random fields. `contains`
// receives a centered lattice frequency (xi1, xi2).
struct FreqRegion {
  std::string name;
  std::function<bool(double, double)> contains;
  std::optional<FreqBox> bbox;  // optional scan restriction

  static FreqRegion annulus(double r1, double r2);
  static FreqRegion single_node(double xi1, double xi2);
  static FreqRegion box(const FreqBox& b);
};

// Transforms.
Field forward_transform(const Field& f);   // physical -> frequency
Field inverse_transform(const Field& f);   // frequency -> physical

// L^p norm with the measure of the field's space (h^2 per physical node,
// (1/(2 Lambda))^2 per frequency node); p = infinity means max modulus.
// Requires p >= 1.
double lp_norm(const Field& f, double p);

// Pointwise helpers.
Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& a);
Field modulus_field(const Field& a);  // same space, |values|

// Fourier multiplier: F^{-1}[ m(xi) * fhat(xi) ]. Physical input gives
// physical output; frequency input stays in frequency space (no final
// synthesis). The multiplier is evaluated at every lattice frequency and must
// be finite there. `scale` applies m(scale * xi) (scale > 0).
Field apply_multiplier(const Field& f,
                       const std::function<double(double, double)>& m,
                       double scale = 1.0);

// Cyclic shift by whole grid cells: out(x) = f(x - (s1*h, s2*h)).
Field cyclic_shift(const Field& f, int s1, int s2);

// Reflections x2 -> -x2 / x1 -> -x1 (periodic index reflection; works in
// either space and is exactly norm-preserving).
Field reflect_axis2(const Field& f);
Field reflect_axis1(const Field& f);

// Seeded Gaussian band-limited field: iid complex Gaussian coefficients on
// lattice nodes inside `region`, L^2-normalized, returned in physical space.
Field random_bandlimited(const GridSpec& g, const FreqRegion& region,
                         std::uint64_t seed);

// Serialization. 16-byte header: magic "BRF1", then N as little-endian
// uint32, then Lambda as little-endian float64; then N^2 complex float64
// (re, im) pairs in row-major order. Fields are written as stored; by
// convention .brf files hold physical-space samples.
void write_brf(const std::string& path, const Field& f);
Field read_brf(const std::string& path);

}  // namespace brlab
