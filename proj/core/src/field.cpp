#include "brlab/field.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>

#include "brlab/numerics.hpp"

namespace brlab {

namespace {

void require_same_layout(const Field& a, const Field& b, const char* who) {
  if (a.grid != b.grid || a.space != b.space)
    throw grid_mismatch_error(std::string(who) +
                              ": operands differ in grid or space");
}

// FFTW plan cache keyed by (N, sign). Plans are created once with
// FFTW_ESTIMATE (deterministic across runs) on fftw_malloc'd scratch and
// reused via the new-array interface, which requires matching alignment, so
// per-call buffers are fftw_malloc'd too.
struct PlanCache {
  std::mutex mu;
  std::map<std::pair<int, int>, fftw_plan> plans;

  fftw_plan get(int N, int sign) {
    std::lock_guard<std::mutex> lock(mu);
    const auto key = std::make_pair(N, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    fftw_complex* in = fftw_alloc_complex(static_cast<std::size_t>(N) * N);
    fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(N) * N);
    fftw_plan p = fftw_plan_dft_2d(N, N, in, out, sign, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    plans.emplace(key, p);
    return p;
  }
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

// Shared transform core. The centered-lattice phase bookkeeping reduces to
// modulating input and output by (-1)^{i+j}; the per-axis constant
// (-1)^{N/2} squares away in two dimensions.
Field transform(const Field& f, int sign, double norm, Space out_space) {
  const int N = f.grid.N;
  const std::size_t n2 = static_cast<std::size_t>(N) * N;
  fftw_complex* in = fftw_alloc_complex(n2);
  fftw_complex* out = fftw_alloc_complex(n2);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * N + j;
      const double s = ((i + j) & 1) ? -1.0 : 1.0;
      in[idx][0] = s * f.values[idx].real();
      in[idx][1] = s * f.values[idx].imag();
    }
  }
  fftw_execute_dft(plan_cache().get(N, sign), in, out);
  Field g(f.grid, out_space);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * N + j;
      const double s = ((i + j) & 1) ? -norm : norm;
      g.values[idx] = cplx(s * out[idx][0], s * out[idx][1]);
    }
  }
  fftw_free(in);
  fftw_free(out);
  return g;
}

}  // namespace

Field forward_transform(const Field& f) {
  if (f.space != Space::physical)
    throw grid_mismatch_error("forward_transform: input must be physical");
  const double h = f.grid.h();
  return transform(f, FFTW_FORWARD, h * h, Space::frequency);
}

Field inverse_transform(const Field& f) {
  if (f.space != Space::frequency)
    throw grid_mismatch_error("inverse_transform: input must be frequency");
  const double w = f.grid.freq_step();
  return transform(f, FFTW_BACKWARD, w * w, Space::physical);
}

double lp_norm(const Field& f, double p) {
  if (p < 1.0) throw parameter_error("lp_norm: p must be >= 1 (or infinity)");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const cplx& v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  const double cell =
      (f.space == Space::physical) ? f.grid.h() : f.grid.freq_step();
  const double measure = cell * cell;
  double s = 0.0;
  if (p == 2.0) {
    for (const cplx& v : f.values) s += std::norm(v);
  } else {
    for (const cplx& v : f.values) s += std::pow(std::abs(v), p);
  }
  return std::pow(measure * s, 1.0 / p);
}

Field operator+(const Field& a, const Field& b) {
  require_same_layout(a, b, "operator+");
  Field c = a;
  for (std::size_t i = 0; i < c.values.size(); ++i) c.values[i] += b.values[i];
  return c;
}

Field operator-(const Field& a, const Field& b) {
  require_same_layout(a, b, "operator-");
  Field c = a;
  for (std::size_t i = 0; i < c.values.size(); ++i) c.values[i] -= b.values[i];
  return c;
}

Field operator*(double s, const Field& a) {
  Field c = a;
  for (cplx& v : c.values) v *= s;
  return c;
}

Field modulus_field(const Field& a) {
  Field c = a;
  for (cplx& v : c.values) v = std::abs(v);
  return c;
}

Field apply_multiplier(const Field& f,
                       const std::function<double(double, double)>& m,
                       double scale) {
  if (!(scale > 0.0)) throw parameter_error("apply_multiplier: scale must be > 0");
  const bool physical_io = (f.space == Space::physical);
  Field fhat = physical_io ? forward_transform(f) : f;
  const int N = f.grid.N;
  for (int i = 0; i < N; ++i) {
    const double xi1 = f.grid.xi_at(i);
    for (int j = 0; j < N; ++j) {
      const double xi2 = f.grid.xi_at(j);
      const double mv = m(scale * xi1, scale * xi2);
      if (!std::isfinite(mv)) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "apply_multiplier: symbol non-finite at node (%.17g, %.17g)",
                      scale * xi1, scale * xi2);
        throw symbol_evaluation_error(buf);
      }
      fhat.at(i, j) *= mv;
    }
  }
  return physical_io ? inverse_transform(fhat) : fhat;
}

Field cyclic_shift(const Field& f, int s1, int s2) {
  const int N = f.grid.N;
  Field g(f.grid, f.space);
  const int a = ((s1 % N) + N) % N;
  const int b = ((s2 % N) + N) % N;
  for (int i = 0; i < N; ++i) {
    const int si = (i + a) % N;
    for (int j = 0; j < N; ++j) g.at(si, (j + b) % N) = f.at(i, j);
  }
  return g;
}

namespace {

Field reflect_axis(const Field& f, int axis) {
  const int N = f.grid.N;
  Field g(f.grid, f.space);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const int ri = (axis == 1) ? (N - i) % N : i;
      const int rj = (axis == 2) ? (N - j) % N : j;
      g.at(ri, rj) = f.at(i, j);
    }
  }
  return g;
}

}  // namespace

Field reflect_axis1(const Field& f) { return reflect_axis(f, 1); }
Field reflect_axis2(const Field& f) { return reflect_axis(f, 2); }

FreqRegion FreqRegion::annulus(double r1, double r2) {
  if (!(0.0 <= r1 && r1 < r2))
    throw parameter_error("FreqRegion::annulus: need 0 <= r1 < r2");
  FreqRegion r;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "annulus[%g,%g]", r1, r2);
  r.name = buf;
  r.contains = [r1, r2](double a, double b) {
    const double m = std::hypot(a, b);
    return m >= r1 && m <= r2;
  };
  r.bbox = FreqBox{-r2, r2, -r2, r2};
  return r;
}

FreqRegion FreqRegion::single_node(double xi1, double xi2) {
  FreqRegion r;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "node(%g,%g)", xi1, xi2);
  r.name = buf;
  const double tol = 1e-9;
  r.contains = [xi1, xi2, tol](double a, double b) {
    return std::abs(a - xi1) < tol && std::abs(b - xi2) < tol;
  };
  r.bbox = FreqBox{xi1 - 1e-6, xi1 + 1e-6, xi2 - 1e-6, xi2 + 1e-6};
  return r;
}

FreqRegion FreqRegion::box(const FreqBox& b) {
  FreqRegion r;
  r.name = "box";
  r.contains = [b](double a, double c) { return b.contains(a, c); };
  r.bbox = b;
  return r;
}

Field random_bandlimited(const GridSpec& g, const FreqRegion& region,
                         std::uint64_t seed) {
  SeededRng rng(seed);
  Field fhat(g, Space::frequency);
  const int N = g.N;
  int i_lo = 0, i_hi = N, j_lo = 0, j_hi = N;
  if (region.bbox) {
    i_lo = g.xi_lower_index(region.bbox->x1min);
    i_hi = g.xi_upper_index(region.bbox->x1max);
    j_lo = g.xi_lower_index(region.bbox->x2min);
    j_hi = g.xi_upper_index(region.bbox->x2max);
  }
  long long hits = 0;
  double sum2 = 0.0;
  for (int i = i_lo; i < i_hi; ++i) {
    const double xi1 = g.xi_at(i);
    for (int j = j_lo; j < j_hi; ++j) {
      const double xi2 = g.xi_at(j);
      if (!region.contains(xi1, xi2)) continue;
      const cplx c(rng.normal(), rng.normal());
      fhat.at(i, j) = c;
      sum2 += std::norm(c);
      ++hits;
    }
  }
  if (hits == 0)
    throw degenerate_input_error("random_bandlimited: region '" + region.name +
                                 "' contains no lattice node");
  // Normalize ||f||_2 = 1 via the frequency-side Plancherel sum.
  const double w = g.freq_step();
  const double nrm = std::sqrt(w * w * sum2);
  for (cplx& v : fhat.values) v /= nrm;
  return inverse_transform(fhat);
}

namespace {

void put_u32_le(std::ofstream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64_le(std::ofstream& os, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  unsigned char b[8];
  for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>((u >> (8 * k)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32_le(std::ifstream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

double get_f64_le(std::ifstream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t u = 0;
  for (int k = 7; k >= 0; --k) u = (u << 8) | b[k];
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

}  // namespace

void write_brf(const std::string& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw format_error("write_brf: cannot open '" + path + "'");
  os.write("BRF1", 4);
  put_u32_le(os, static_cast<std::uint32_t>(f.grid.N));
  put_f64_le(os, f.grid.Lambda);
  for (const cplx& v : f.values) {
    put_f64_le(os, v.real());
    put_f64_le(os, v.imag());
  }
  if (!os) throw format_error("write_brf: short write to '" + path + "'");
}

Field read_brf(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw format_error("read_brf: cannot open '" + path + "'");
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "BRF1", 4) != 0)
    throw format_error("read_brf: bad magic in '" + path + "'");
  const std::uint32_t N = get_u32_le(is);
  const double Lambda = get_f64_le(is);
  if (!is) throw format_error("read_brf: truncated header in '" + path + "'");
  GridSpec g;
  try {
    g = GridSpec(Lambda, static_cast<int>(N));
  } catch (const parameter_error& e) {
    throw format_error(std::string("read_brf: invalid header: ") + e.what());
  }
  Field f(g, Space::physical);
  for (cplx& v : f.values) {
    const double re = get_f64_le(is);
    const double im = get_f64_le(is);
    v = cplx(re, im);
  }
  if (!is) throw format_error("read_brf: truncated payload in '" + path + "'");
  is.peek();
  if (!is.eof()) throw format_error("read_brf: trailing bytes in '" + path + "'");
  return f;
}

}  // namespace brlab
