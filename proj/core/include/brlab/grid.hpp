#pragma once

#include <cmath>
#include <limits>

#include "brlab/errors.hpp"

namespace brlab {

// Discrete periodic grid on the square torus [-Lambda, Lambda)^2 with N
// nodes per axis. Physical nodes x_k = -Lambda + k*h, h = 2*Lambda/N.
// Frequency nodes xi_j = (j - N/2)/(2*Lambda), j = 0..N-1, i.e. the centered
// lattice {-N/2, ..., N/2 - 1}/(2*Lambda) with spacing 1/(2*Lambda) and
// extreme representable frequency Xi_max = N/(4*Lambda).
struct GridSpec {
  double Lambda = 16.0;
  int N = 512;

  GridSpec() = default;
  GridSpec(double Lambda_, int N_) : Lambda(Lambda_), N(N_) { validate(); }

  void validate() const {
    if (!(Lambda > 0.0)) throw parameter_error("GridSpec: Lambda must be > 0");
    if (N < 16 || N % 2 != 0)
      throw parameter_error("GridSpec: N must be even and >= 16");
  }

  double h() const { return 2.0 * Lambda / N; }
  double freq_step() const { return 1.0 / (2.0 * Lambda); }
  double xi_max() const { return N / (4.0 * Lambda); }
  long long node_count() const { return 1LL * N * N; }

  double x_at(int k) const { return (k - N / 2) * h(); }
  double xi_at(int j) const { return (j - N / 2) * freq_step(); }

  // Smallest storage index j with xi_at(j) >= v, clamped to [0, N].
  int xi_lower_index(double v) const {
    const double t = v * 2.0 * Lambda + N / 2;
    int j = static_cast<int>(std::ceil(t - 1e-12));
    if (j < 0) j = 0;
    if (j > N) j = N;
    return j;
  }
  // One past the largest storage index j with xi_at(j) <= v, clamped.
  int xi_upper_index(double v) const {
    const double t = v * 2.0 * Lambda + N / 2;
    int j = static_cast<int>(std::floor(t + 1e-12)) + 1;
    if (j < 0) j = 0;
    if (j > N) j = N;
    return j;
  }

  bool operator==(const GridSpec& o) const {
    return Lambda == o.Lambda && N == o.N;
  }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

// Closed axis-aligned frequency rectangle, used to restrict symbol-support
// scans. An "everything" box is represented by infinite bounds.
struct FreqBox {
  double x1min, x1max, x2min, x2max;

  static FreqBox everything() {
    const double inf = std::numeric_limits<double>::infinity();
    return {-inf, inf, -inf, inf};
  }
  bool is_everything() const { return std::isinf(x1min); }
  FreqBox scaled(double s) const {
    // Support of xi -> m(t*xi) is (1/t) * supp(m); s = 1/t here.
    return {x1min * s, x1max * s, x2min * s, x2max * s};
  }
  FreqBox inflated(double eps) const {
    return {x1min - eps, x1max + eps, x2min - eps, x2max + eps};
  }
  bool contains(double a, double b) const {
    return a >= x1min && a <= x1max && b >= x2min && b <= x2max;
  }
};

}  // namespace brlab
