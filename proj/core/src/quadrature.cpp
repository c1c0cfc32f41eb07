#include "brlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "brlab/errors.hpp"

namespace brlab {

namespace {

constexpr double kLn2 = 0.6931471805599453;

int mod_octave(int n, int L) { return ((n % L) + L) % L; }

bool octave_kept(int n, const std::optional<std::pair<int, int>>& residue) {
  if (!residue) return true;
  return mod_octave(n, residue->first) == residue->second;
}

}  // namespace

double TimeQuadrature::weight(std::size_t i) const {
  double w = 0.0;
  if (lhalf[i] > 0.0 && octave_kept(loct[i], residue)) w += lhalf[i];
  if (rhalf[i] > 0.0 && octave_kept(roct[i], residue)) w += rhalf[i];
  return w;
}

double TimeQuadrature::total_weight() const {
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    double y = weight(i) - comp;
    double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
  return sum;
}

TimeQuadrature TimeQuadrature::with_residue(int L, int k) const {
  if (L < 1 || k < 0 || k >= L)
    throw parameter_error("with_residue: need L >= 1 and 0 <= k < L");
  TimeQuadrature out = *this;
  out.residue = std::make_pair(L, k);
  return out;
}

TimeQuadrature TimeQuadrature::refined() const {
  TimeQuadrature out = make_time_quadrature(t_min, t_max, 2 * ppo);
  out.residue = residue;
  return out;
}

TimeQuadrature make_time_quadrature(double t_min, double t_max, int ppo) {
  if (!(t_min > 0.0) || !std::isfinite(t_min) || !std::isfinite(t_max))
    throw parameter_error("make_time_quadrature: need finite 0 < t_min <= t_max");
  if (ppo < 1) throw parameter_error("make_time_quadrature: ppo must be >= 1");
  if (!(t_min < t_max))
    throw quadrature_error("make_time_quadrature: empty dilation band");

  TimeQuadrature q;
  q.t_min = t_min;
  q.t_max = t_max;
  q.ppo = ppo;

  // Octave-aligned breakpoints 2^(m/ppo) strictly inside the band.
  const double a_idx = std::log2(t_min) * ppo;
  const double b_idx = std::log2(t_max) * ppo;
  long long m_lo = static_cast<long long>(std::ceil(a_idx)) - 1;
  long long m_hi = static_cast<long long>(std::floor(b_idx)) + 1;

  std::vector<double> nodes;
  nodes.push_back(t_min);
  for (long long m = m_lo; m <= m_hi; ++m) {
    double v = std::exp2(static_cast<double>(m) / ppo);
    if (v > t_min * (1.0 + 1e-14) && v < t_max * (1.0 - 1e-14)) nodes.push_back(v);
  }
  nodes.push_back(t_max);
  std::sort(nodes.begin(), nodes.end());

  const std::size_t n = nodes.size();
  q.t = nodes;
  q.lhalf.assign(n, 0.0);
  q.rhalf.assign(n, 0.0);
  q.loct.assign(n, std::numeric_limits<int>::min());
  q.roct.assign(n, std::numeric_limits<int>::min());

  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = std::log(nodes[i]);

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double du = u[i + 1] - u[i];
    const double umid = 0.5 * (u[i] + u[i + 1]);
    const int oct = static_cast<int>(std::floor(umid / kLn2));
    q.rhalf[i] = 0.5 * du;
    q.roct[i] = oct;
    q.lhalf[i + 1] = 0.5 * du;
    q.loct[i + 1] = oct;
  }
  return q;
}

int collar_ppo(double delta, double c_star, int base) {
  if (!(delta > 0.0) || !(c_star > 0.0))
    throw parameter_error("collar_ppo: delta and c_star must be positive");
  const double need = 4.0 * kLn2 / (c_star * delta);
  int n = static_cast<int>(std::ceil(need));
  return std::max(base, n);
}

std::pair<double, double> radial_support(const FreqBox& box) {
  if (box.is_everything())
    throw parameter_error("radial_support: unbounded frequency box");
  const double cx = std::clamp(0.0, box.x1min, box.x1max);
  const double cy = std::clamp(0.0, box.x2min, box.x2max);
  const double r_lo = std::hypot(cx, cy);
  double r_hi = 0.0;
  for (double x : {box.x1min, box.x1max})
    for (double y : {box.x2min, box.x2max}) r_hi = std::max(r_hi, std::hypot(x, y));
  return {r_lo, r_hi};
}

Band time_band(const Symbol& sym, const Field& f) {
  if (f.space != Space::frequency)
    throw parameter_error("time_band: field must be in frequency space");
  auto [s_lo, s_hi] = radial_support(sym.bbox);
  if (!(s_lo > 0.0))
    throw parameter_error(
        "time_band: symbol support touches the origin; dilation band is "
        "unbounded");

  double f_lo = std::numeric_limits<double>::infinity();
  double f_hi = 0.0;
  const int N = f.grid.N;
  for (int i = 0; i < N; ++i) {
    const double xi1 = f.grid.xi_at(i);
    for (int j = 0; j < N; ++j) {
      if (f.at(i, j) == cplx(0.0, 0.0)) continue;
      const double r = std::hypot(xi1, f.grid.xi_at(j));
      f_lo = std::min(f_lo, r);
      f_hi = std::max(f_hi, r);
    }
  }
  if (!(f_hi > 0.0))
    throw quadrature_error("time_band: field spectrum is identically zero");
  if (!(f_lo > 0.0))
    // Only the zero frequency is occupied below any positive radius; the
    // symbol never meets it, so it does not constrain the band.
    f_lo = f.grid.freq_step();
  return Band{s_lo / f_hi, s_hi / f_lo};
}

RGrid RGrid::refined() const {
  RGrid out;
  out.q = std::sqrt(q);
  out.R.reserve(R.size() * 2);
  for (std::size_t j = 0; j < R.size(); ++j) {
    out.R.push_back(R[j]);
    if (j + 1 < R.size()) out.R.push_back(std::sqrt(R[j] * R[j + 1]));
  }
  return out;
}

RGrid make_r_grid(double R_min, double q, int J) {
  if (!(R_min > 0.0) || !(q > 1.0) || J < 1)
    throw parameter_error("make_r_grid: need R_min > 0, q > 1, J >= 1");
  RGrid g;
  g.q = q;
  g.R.reserve(static_cast<std::size_t>(J) + 1);
  for (int j = 0; j <= J; ++j) g.R.push_back(R_min * std::pow(q, j));
  return g;
}

}  // namespace brlab
