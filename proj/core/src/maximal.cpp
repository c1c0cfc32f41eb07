#include "brlab/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "brlab/errors.hpp"

namespace brlab {

namespace {

std::vector<double> modulus_values(const Field& f) {
  std::vector<double> a(f.values.size());
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = std::abs(f.values[k]);
  return a;
}

// Periodic summed-area table: S[i][j] = sum over [0,i) x [0,j).
struct PrefixSum {
  int N;
  std::vector<double> S;  // (N+1) x (N+1)

  explicit PrefixSum(const std::vector<double>& a, int n) : N(n), S((n + 1) * (n + 1), 0.0) {
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        S[(i + 1) * (N + 1) + (j + 1)] = a[i * N + j] + S[i * (N + 1) + (j + 1)] +
                                         S[(i + 1) * (N + 1) + j] - S[i * (N + 1) + j];
  }

  double block(int i0, int i1, int j0, int j1) const {  // no wrap, 0 <= i0 <= i1 <= N
    return S[i1 * (N + 1) + j1] - S[i0 * (N + 1) + j1] - S[i1 * (N + 1) + j0] +
           S[i0 * (N + 1) + j0];
  }

  // Sum over the periodic window [a1, a1+w1) x [a2, a2+w2), w <= N.
  double window(int a1, int w1, int a2, int w2) const {
    a1 = ((a1 % N) + N) % N;
    a2 = ((a2 % N) + N) % N;
    const int e1 = a1 + w1, e2 = a2 + w2;
    double sum = 0.0;
    const int i_hi1 = std::min(e1, N), i_lo2 = std::max(e1 - N, 0);
    const int j_hi1 = std::min(e2, N), j_lo2 = std::max(e2 - N, 0);
    sum += block(a1, i_hi1, a2, j_hi1);
    if (i_lo2 > 0) sum += block(0, i_lo2, a2, j_hi1);
    if (j_lo2 > 0) sum += block(a1, i_hi1, 0, j_lo2);
    if (i_lo2 > 0 && j_lo2 > 0) sum += block(0, i_lo2, 0, j_lo2);
    return sum;
  }
};

std::vector<int> dyadic_radii(int N) {
  std::vector<int> r{0};
  for (int v = 1; 2 * v + 1 <= N; v *= 2) r.push_back(v);
  r.push_back(N / 2);  // full-period window
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

Field maximal_impl(const Field& f, bool strong) {
  const int N = f.grid.N;
  const auto a = modulus_values(f);
  PrefixSum ps(a, N);
  const auto radii = dyadic_radii(N);

  Field out(f.grid, Space::physical);
  std::vector<double> best(a.size(), 0.0);
  for (int r1 : radii) {
    const int w1 = std::min(2 * r1 + 1, N);
    for (int r2 : radii) {
      if (!strong && r2 != r1) continue;
      const int w2 = std::min(2 * r2 + 1, N);
      const double inv = 1.0 / (static_cast<double>(w1) * w2);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          const double avg = ps.window(i - r1, w1, j - r2, w2) * inv;
          double& b = best[static_cast<std::size_t>(i) * N + j];
          if (avg > b) b = avg;
        }
    }
  }
  for (std::size_t k = 0; k < best.size(); ++k) out.values[k] = best[k];
  return out;
}

int wrap(int i, int N) { return ((i % N) + N) % N; }

// Bilinear periodic sample of a real array at fractional cell coordinates.
double sample(const std::vector<double>& a, int N, double x, double y) {
  const double fx = std::floor(x), fy = std::floor(y);
  const int i0 = wrap(static_cast<int>(fx), N), j0 = wrap(static_cast<int>(fy), N);
  const int i1 = wrap(i0 + 1, N), j1 = wrap(j0 + 1, N);
  const double tx = x - fx, ty = y - fy;
  return (1.0 - tx) * ((1.0 - ty) * a[static_cast<std::size_t>(i0) * N + j0] +
                       ty * a[static_cast<std::size_t>(i0) * N + j1]) +
         tx * ((1.0 - ty) * a[static_cast<std::size_t>(i1) * N + j0] +
               ty * a[static_cast<std::size_t>(i1) * N + j1]);
}

// One doubling step: B(x) = (A(x - o) + A(x + o)) / 2, offsets in cell units.
std::vector<double> chain_step(const std::vector<double>& a, int N, double ox, double oy) {
  std::vector<double> b(a.size());
  const bool integral = (ox == std::floor(ox)) && (oy == std::floor(oy));
  if (integral) {
    const int si = static_cast<int>(ox), sj = static_cast<int>(oy);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        b[static_cast<std::size_t>(i) * N + j] =
            0.5 * (a[static_cast<std::size_t>(wrap(i - si, N)) * N + wrap(j - sj, N)] +
                   a[static_cast<std::size_t>(wrap(i + si, N)) * N + wrap(j + sj, N)]);
    return b;
  }
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      b[static_cast<std::size_t>(i) * N + j] =
          0.5 * (sample(a, N, i - ox, j - oy) + sample(a, N, i + ox, j + oy));
  return b;
}

// Chain of k doubling steps along the (unit) direction u: the result is the
// average over 2^k samples spaced one cell apart along u, centered.
std::vector<double> run_chain(std::vector<double> a, int N, std::array<double, 2> u, int k) {
  for (int lev = 0; lev < k; ++lev) {
    const double off = std::exp2(lev) * 0.5;  // in cells
    a = chain_step(a, N, off * u[0], off * u[1]);
  }
  return a;
}

int dyadic_level(double ratio, const char* what) {
  if (!(ratio > 0.0)) throw parameter_error(std::string(what) + ": ratio must be positive");
  const double l = std::log2(ratio);
  const int k = static_cast<int>(std::lround(l));
  if (k < 0 || std::abs(ratio - std::exp2(k)) > 1e-6 * std::exp2(k))
    throw parameter_error(std::string(what) + ": length must be a dyadic multiple of the cell");
  return k;
}

}  // namespace

Field hl_maximal(const Field& f) { return maximal_impl(f, false); }
Field strong_maximal(const Field& f) { return maximal_impl(f, true); }

Field powered_maximal(const Field& w, double s, MaximalKind kind) {
  if (!(s > 1.0)) throw parameter_error("powered_maximal: requires s > 1");
  Field ws(w.grid, w.space);
  for (std::size_t k = 0; k < w.values.size(); ++k)
    ws.values[k] = std::pow(std::abs(w.values[k]), s);
  Field m = (kind == MaximalKind::hl) ? hl_maximal(ws) : strong_maximal(ws);
  for (auto& v : m.values) v = std::pow(v.real(), 1.0 / s);
  return m;
}

DirectionSet dyadic_directions(int N) {
  if (N < 1) throw parameter_error("dyadic_directions: N must be >= 1");
  DirectionSet out;
  out.dirs.reserve(static_cast<std::size_t>(N));
  const double pi = 3.14159265358979323846;
  for (int k = 0; k < N; ++k) {
    const double a = pi * k / N;
    out.dirs.push_back({std::cos(a), std::sin(a)});
  }
  return out;
}

RectFamily dyadic_tube_family(const GridSpec& g, double width) {
  RectFamily fam;
  for (double len = width; len <= 2.0 * g.Lambda * (1.0 + 1e-12); len *= 2.0)
    fam.ecc.push_back({len, width});
  return fam;
}

Field kakeya_maximal(const Field& f, const DirectionSet& dirs, const RectFamily& rects) {
  if (dirs.dirs.empty()) throw parameter_error("kakeya_maximal: empty direction set");
  if (rects.ecc.empty()) throw parameter_error("kakeya_maximal: empty rectangle family");
  const int N = f.grid.N;
  const double h = f.grid.h();

  // (length level, width level) pairs, grouped by length level.
  std::map<int, std::vector<int>> by_len;
  for (const auto& [len, wid] : rects.ecc) {
    if (wid < h * (1.0 - 1e-9))
      throw family_error("kakeya_maximal: rectangle thinner than a grid cell");
    if (len < wid) throw family_error("kakeya_maximal: rectangle length < width");
    if (len > 2.0 * f.grid.Lambda * (1.0 + 1e-9))
      throw family_error("kakeya_maximal: rectangle longer than the period");
    int m, n;
    try {
      m = dyadic_level(len / h, "kakeya_maximal length");
      n = dyadic_level(wid / h, "kakeya_maximal width");
    } catch (const parameter_error& e) {
      throw family_error(e.what());
    }
    by_len[m].push_back(n);
  }

  const auto a0 = modulus_values(f);
  std::vector<double> best(a0.size(), 0.0);
  for (const auto& u : dirs.dirs) {
    const std::array<double, 2> perp{-u[1], u[0]};
    std::vector<double> along = a0;
    int cur_m = 0;
    for (auto& [m, widths] : by_len) {
      for (; cur_m < m; ++cur_m) {
        const double off = std::exp2(cur_m) * 0.5;
        along = chain_step(along, N, off * u[0], off * u[1]);
      }
      std::sort(widths.begin(), widths.end());
      std::vector<double> cross = along;
      int cur_n = 0;
      for (int n : widths) {
        for (; cur_n < n; ++cur_n) {
          const double off = std::exp2(cur_n) * 0.5;
          cross = chain_step(cross, N, off * perp[0], off * perp[1]);
        }
        for (std::size_t k = 0; k < best.size(); ++k)
          if (cross[k] > best[k]) best[k] = cross[k];
      }
    }
  }

  Field out(f.grid, Space::physical);
  for (std::size_t k = 0; k < best.size(); ++k) out.values[k] = best[k];
  return out;
}

Field directional_box_average(const Field& f, std::array<double, 2> direction,
                              double l1, double l2) {
  const double nrm = std::hypot(direction[0], direction[1]);
  if (!(nrm > 0.0)) throw parameter_error("directional_box_average: zero direction");
  const std::array<double, 2> u{direction[0] / nrm, direction[1] / nrm};
  const std::array<double, 2> perp{-u[1], u[0]};
  const int N = f.grid.N;
  const double h = f.grid.h();
  const int full = dyadic_level(N, "grid");

  auto level_of = [&](double l) {
    if (l >= f.grid.Lambda) return full;  // whole-period average
    return dyadic_level(2.0 * l / h, "directional_box_average side");
  };
  const int k1 = std::min(level_of(l1), full);
  const int k2 = std::min(level_of(l2), full);

  std::vector<double> re(f.values.size()), im(f.values.size());
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    re[k] = f.values[k].real();
    im[k] = f.values[k].imag();
  }
  re = run_chain(std::move(re), N, u, k1);
  im = run_chain(std::move(im), N, u, k1);
  re = run_chain(std::move(re), N, perp, k2);
  im = run_chain(std::move(im), N, perp, k2);

  Field out(f.grid, f.space);
  for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] = cplx(re[k], im[k]);
  return out;
}

Field strip_projection_sum(const Field& f, const std::vector<FreqStrip>& strips, int axis) {
  if (axis != 1 && axis != 2) throw parameter_error("strip_projection_sum: axis must be 1 or 2");
  if (strips.empty()) throw parameter_error("strip_projection_sum: empty strip list");
  const double w0 = strips[0].hi - strips[0].lo;
  if (!(w0 > 0.0)) throw parameter_error("strip_projection_sum: strip width must be positive");
  for (const auto& s : strips)
    if (std::abs((s.hi - s.lo) - w0) > 1e-9 * w0)
      throw parameter_error("strip_projection_sum: strips must have equal width");
  std::vector<FreqStrip> sorted = strips;
  std::sort(sorted.begin(), sorted.end(),
            [](const FreqStrip& a, const FreqStrip& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    if (sorted[i + 1].lo < sorted[i].hi - 1e-9 * w0)
      throw parameter_error("strip_projection_sum: overlapping strips");

  const Field fh = (f.space == Space::frequency) ? f : forward_transform(f);
  const int N = f.grid.N;

  // Coordinate range of the occupied spectrum on the strip axis.
  double c_lo = 0.0, c_hi = 0.0;
  bool any = false;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (fh.at(i, j) == cplx(0.0, 0.0)) continue;
      const double c = (axis == 1) ? f.grid.xi_at(i) : f.grid.xi_at(j);
      if (!any) {
        c_lo = c_hi = c;
        any = true;
      } else {
        c_lo = std::min(c_lo, c);
        c_hi = std::max(c_hi, c);
      }
    }

  std::vector<double> acc(f.values.size(), 0.0);
  if (any) {
    for (const auto& s : sorted) {
      if (s.hi <= c_lo || s.lo > c_hi) continue;
      Field masked(f.grid, Space::frequency);
      bool nonzero = false;
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          const cplx v = fh.at(i, j);
          if (v == cplx(0.0, 0.0)) continue;
          const double c = (axis == 1) ? f.grid.xi_at(i) : f.grid.xi_at(j);
          if (c >= s.lo && c < s.hi) {
            masked.at(i, j) = v;
            nonzero = true;
          }
        }
      if (!nonzero) continue;
      const Field ph = inverse_transform(masked);
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += std::norm(ph.values[k]);
    }
  }

  Field out(f.grid, Space::physical);
  for (std::size_t k = 0; k < acc.size(); ++k) out.values[k] = std::sqrt(acc[k]);
  return out;
}

WeightedCheck weighted_lp_check(const Field& f, const Field& w,
                                const std::vector<FreqStrip>& strips, int axis,
                                double s) {
  if (f.space != Space::physical || w.space != Space::physical)
    throw parameter_error("weighted_lp_check: fields must be physical-space");
  if (f.grid != w.grid) throw grid_mismatch_error("weighted_lp_check: grid mismatch");
  for (const auto& v : w.values)
    if (v.real() < -1e-12 || std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v.real())))
      throw parameter_error("weighted_lp_check: weight must be real and nonnegative");

  const Field proj = strip_projection_sum(f, strips, axis);
  const Field pw = powered_maximal(w, s, MaximalKind::strong);
  const double h2 = f.grid.h() * f.grid.h();

  WeightedCheck out;
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    const double wk = std::max(w.values[k].real(), 0.0);
    out.lhs += std::norm(proj.values[k]) * wk * h2;
    out.rhs += std::norm(f.values[k]) * pw.values[k].real() * h2;
  }
  out.ratio = (out.rhs > 0.0) ? out.lhs / out.rhs : 0.0;
  return out;
}

Field focusing_example(const GridSpec& g, const DirectionSet& dirs, double width_cells) {
  Field out(g, Space::physical);
  const double half = 0.5 * width_cells * g.h();
  const double period = 2.0 * g.Lambda;
  for (int i = 0; i < g.N; ++i) {
    const double x1 = g.x_at(i);
    for (int j = 0; j < g.N; ++j) {
      const double x2 = g.x_at(j);
      double count = 0.0;
      for (const auto& u : dirs.dirs) {
        const double p1 = -u[1], p2 = u[0];
        const double dot = x1 * p1 + x2 * p2;
        const double s1 = period * p1, s2 = period * p2;
        double d = std::abs(dot);
        for (int a = -1; a <= 1; ++a)
          for (int b = -1; b <= 1; ++b)
            d = std::min(d, std::abs(dot + a * s1 + b * s2));
        if (d <= half) count += 1.0;
      }
      out.at(i, j) = count;
    }
  }
  return out;
}

}  // namespace brlab
