#include "brlab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "brlab/errors.hpp"
#include "brlab/maximal.hpp"
#include "brlab/numerics.hpp"

namespace brlab {

namespace {

constexpr double kTwoPi = 6.283185307179586;

// Above this many active coefficients the per-node transform is cheaper than
// accumulating pair products at difference frequencies.
constexpr std::size_t kPairThreshold = 512;

Field ensure_frequency(const Field& f) {
  return f.space == Space::frequency ? f : forward_transform(f);
}

Field ensure_physical(const Field& f) {
  return f.space == Space::physical ? f : inverse_transform(f);
}

struct SpectrumNode {
  int i, j;
  double xi1, xi2;
  cplx fv;
};

std::vector<SpectrumNode> nonzero_nodes(const Field& fhat) {
  std::vector<SpectrumNode> out;
  const int N = fhat.grid.N;
  for (int i = 0; i < N; ++i) {
    const double xi1 = fhat.grid.xi_at(i);
    for (int j = 0; j < N; ++j) {
      const cplx v = fhat.at(i, j);
      if (v == cplx(0.0, 0.0)) continue;
      out.push_back({i, j, xi1, fhat.grid.xi_at(j), v});
    }
  }
  return out;
}

// m(scale * xi) * fhat(xi), evaluated only inside the rescaled support box.
Field sparse_apply(const Field& fhat, const Symbol& sym, double scale) {
  Field out(fhat.grid, Space::frequency);
  const GridSpec& g = fhat.grid;
  int i_lo = 0, i_hi = g.N, j_lo = 0, j_hi = g.N;
  if (!sym.bbox.is_everything()) {
    const FreqBox box = sym.bbox.scaled(1.0 / scale);
    i_lo = g.xi_lower_index(box.x1min);
    i_hi = g.xi_upper_index(box.x1max);
    j_lo = g.xi_lower_index(box.x2min);
    j_hi = g.xi_upper_index(box.x2max);
  }
  for (int i = i_lo; i < i_hi; ++i) {
    const double z1 = scale * g.xi_at(i);
    for (int j = j_lo; j < j_hi; ++j) {
      const cplx fv = fhat.at(i, j);
      if (fv == cplx(0.0, 0.0)) continue;
      const double v = sym.eval(z1, scale * g.xi_at(j));
      if (v != 0.0) out.at(i, j) = v * fv;
    }
  }
  return out;
}

struct SquareAccum {
  GridSpec grid;
  std::vector<cplx> spec;     // pair products at difference frequencies
  std::vector<double> space;  // direct |F_t|^2 contributions
  bool any_spec = false;

  explicit SquareAccum(const GridSpec& g)
      : grid(g),
        spec(static_cast<std::size_t>(g.node_count())),
        space(static_cast<std::size_t>(g.node_count()), 0.0) {}
};

void accumulate_square(SquareAccum& acc, const std::vector<SpectrumNode>& nodes,
                       const Symbol& sym, const TimeQuadrature& quad) {
  const int N = acc.grid.N;
  const bool bounded = !sym.bbox.is_everything();
  struct Coef {
    int i, j;
    cplx c;
  };
  std::vector<Coef> act;
  act.reserve(nodes.size());

  for (std::size_t qi = 0; qi < quad.size(); ++qi) {
    const double w = quad.weight(qi);
    if (w <= 0.0) continue;
    const double t = quad.t[qi];
    act.clear();
    int imin = N, imax = -1, jmin = N, jmax = -1;
    for (const auto& n : nodes) {
      const double z1 = t * n.xi1, z2 = t * n.xi2;
      if (bounded && !sym.bbox.contains(z1, z2)) continue;
      const double v = sym.eval(z1, z2);
      if (v == 0.0) continue;
      act.push_back({n.i, n.j, v * n.fv});
      imin = std::min(imin, n.i);
      imax = std::max(imax, n.i);
      jmin = std::min(jmin, n.j);
      jmax = std::max(jmax, n.j);
    }
    if (act.empty()) continue;

    const bool diffs_fit = (imax - imin) < N / 2 && (jmax - jmin) < N / 2;
    if (diffs_fit && act.size() <= kPairThreshold) {
      acc.any_spec = true;
      for (const auto& a : act) {
        const cplx base = w * std::conj(a.c);
        const int bi = N / 2 - a.i, bj = N / 2 - a.j;
        for (const auto& b : act)
          acc.spec[static_cast<std::size_t>(b.i + bi) * N + (b.j + bj)] += base * b.c;
      }
    } else {
      Field tmp(acc.grid, Space::frequency);
      for (const auto& a : act) tmp.at(a.i, a.j) = a.c;
      const Field ph = inverse_transform(tmp);
      for (std::size_t k = 0; k < acc.space.size(); ++k)
        acc.space[k] += w * std::norm(ph.values[k]);
    }
  }
}

Field finalize_square(SquareAccum&& acc) {
  std::vector<double> g2 = std::move(acc.space);
  if (acc.any_spec) {
    Field sf(acc.grid, Space::frequency);
    sf.values = std::move(acc.spec);
    const Field ds = inverse_transform(sf);
    const double fs2 = acc.grid.freq_step() * acc.grid.freq_step();
    for (std::size_t k = 0; k < g2.size(); ++k) g2[k] += fs2 * ds.values[k].real();
  }
  Field out(acc.grid, Space::physical);
  for (std::size_t k = 0; k < g2.size(); ++k)
    out.values[k] = std::sqrt(std::max(0.0, g2[k]));
  return out;
}

// Radial window profile of a cone window (1 on the flat annulus, supported
// in (r_lo, r_hi)), matching the construction inside cone_window_symbol.
std::function<double(double)> cone_radial_profile(const ConeWindow& w) {
  auto rise = smooth_step(w.r_lo, w.r_flat_lo);
  auto fall = smooth_step(w.r_flat_hi, w.r_hi);
  return [rise, fall](double r) { return rise(r) * (1.0 - fall(r)); };
}

struct ConePlanNode {
  int i, j;
  double slope_f, absxi, rho;
  cplx fv;
};

// Per-node data for repeated cone-operator application across R. The slope
// factor of the window is scale-invariant, so it is read off by evaluating
// the window symbol at the node's direction rescaled into the flat annulus
// (where the radial profile is exactly 1).
std::vector<ConePlanNode> build_cone_plan(const Field& fhat, const Curve& c,
                                          const Symbol& window_sym,
                                          const ConeWindow& w) {
  std::vector<ConePlanNode> plan;
  const int N = fhat.grid.N;
  const double r_mid = 0.5 * (w.r_flat_lo + w.r_flat_hi);
  for (int i = 0; i < N; ++i) {
    const double xi1 = fhat.grid.xi_at(i);
    for (int j = 0; j < N; ++j) {
      const cplx fv = fhat.at(i, j);
      if (fv == cplx(0.0, 0.0)) continue;
      const double xi2 = fhat.grid.xi_at(j);
      const double r = std::hypot(xi1, xi2);
      if (r == 0.0) continue;
      const double s = r_mid / r;
      const double slope_f = window_sym.eval(s * xi1, s * xi2);
      if (slope_f == 0.0) continue;
      plan.push_back({i, j, slope_f, r, rho_gauge(c, xi1, xi2), fv});
    }
  }
  return plan;
}

}  // namespace

Field br_partial(const Field& f, const Symbol& sym, double R) {
  if (!(R > 0.0)) throw parameter_error("br_partial: R must be positive");
  return inverse_transform(sparse_apply(ensure_frequency(f), sym, 1.0 / R));
}

Field br_maximal(const Field& f, const Symbol& sym, const RGrid& rgrid) {
  if (rgrid.R.empty()) throw parameter_error("br_maximal: empty R grid");
  const Field fhat = ensure_frequency(f);
  Field acc(f.grid, Space::physical);
  for (double R : rgrid.R) {
    const Field p = inverse_transform(sparse_apply(fhat, sym, 1.0 / R));
    for (std::size_t k = 0; k < acc.values.size(); ++k) {
      const double m = std::abs(p.values[k]);
      if (m > acc.values[k].real()) acc.values[k] = m;
    }
  }
  return acc;
}

Field square_function(const Field& f, const Symbol& sym, const TimeQuadrature& quad) {
  const Field fhat = ensure_frequency(f);
  const auto nodes = nonzero_nodes(fhat);
  SquareAccum acc(f.grid);
  accumulate_square(acc, nodes, sym, quad);
  return finalize_square(std::move(acc));
}

Field v_function(const Field& f, const std::vector<Symbol>& pieces,
                 const TimeQuadrature& quad) {
  if (pieces.empty()) throw parameter_error("v_function: empty piece list");
  const Field fhat = ensure_frequency(f);
  const auto nodes = nonzero_nodes(fhat);
  SquareAccum acc(f.grid);
  for (const auto& p : pieces) accumulate_square(acc, nodes, p, quad);
  return finalize_square(std::move(acc));
}

double square_norm2_frequency_side(const Field& f, const Symbol& sym,
                                   const TimeQuadrature& quad) {
  const Field fhat = ensure_frequency(f);
  const auto nodes = nonzero_nodes(fhat);
  if (nodes.empty()) return 0.0;

  const bool bounded = !sym.bbox.is_everything();
  double s_lo = 0.0, s_hi = 0.0;
  if (bounded) std::tie(s_lo, s_hi) = radial_support(sym.bbox);

  double acc = 0.0;
  for (const auto& n : nodes) {
    const double r = std::hypot(n.xi1, n.xi2);
    double q = 0.0;
    if (r == 0.0) {
      const double v = sym.eval(0.0, 0.0);
      q = v * v * quad.total_weight();
    } else {
      std::size_t lo = 0, hi = quad.size();
      if (bounded && s_lo > 0.0) {
        lo = static_cast<std::size_t>(
            std::lower_bound(quad.t.begin(), quad.t.end(), s_lo / r * (1.0 - 1e-12)) -
            quad.t.begin());
        hi = static_cast<std::size_t>(
            std::upper_bound(quad.t.begin(), quad.t.end(), s_hi / r * (1.0 + 1e-12)) -
            quad.t.begin());
      }
      for (std::size_t k = lo; k < hi; ++k) {
        const double w = quad.weight(k);
        if (w <= 0.0) continue;
        const double z1 = quad.t[k] * n.xi1, z2 = quad.t[k] * n.xi2;
        if (bounded && !sym.bbox.contains(z1, z2)) continue;
        const double v = sym.eval(z1, z2);
        if (v != 0.0) q += w * v * v;
      }
    }
    acc += std::norm(n.fv) * q;
  }
  return acc * f.grid.freq_step() * f.grid.freq_step();
}

double square_norm2_space_side(const Field& f, const Symbol& sym,
                               const TimeQuadrature& quad) {
  const Field fhat = ensure_frequency(f);
  const auto nodes = nonzero_nodes(fhat);
  const bool bounded = !sym.bbox.is_everything();
  const double h2 = f.grid.h() * f.grid.h();

  double acc = 0.0;
  for (std::size_t qi = 0; qi < quad.size(); ++qi) {
    const double w = quad.weight(qi);
    if (w <= 0.0) continue;
    const double t = quad.t[qi];
    Field tmp(f.grid, Space::frequency);
    bool any = false;
    for (const auto& n : nodes) {
      const double z1 = t * n.xi1, z2 = t * n.xi2;
      if (bounded && !sym.bbox.contains(z1, z2)) continue;
      const double v = sym.eval(z1, z2);
      if (v == 0.0) continue;
      tmp.at(n.i, n.j) = v * n.fv;
      any = true;
    }
    if (!any) continue;
    const Field ph = inverse_transform(tmp);
    double sumsq = 0.0;
    for (const auto& v : ph.values) sumsq += std::norm(v);
    acc += w * sumsq * h2;
  }
  return acc;
}

double node_time_energy(const Symbol& sym, double xi1, double xi2) {
  const double r = std::hypot(xi1, xi2);
  if (r == 0.0) return 0.0;
  if (sym.bbox.is_everything())
    throw parameter_error("node_time_energy: symbol support is unbounded");

  // Clip the ray {t (xi1, xi2) : t > 0} against the support box; the
  // integrand vanishes outside the clipped parameter range.
  double t_lo = 0.0, t_hi = std::numeric_limits<double>::infinity();
  auto clip = [&](double xi, double lo, double hi) {
    if (xi == 0.0) return lo <= 0.0 && 0.0 <= hi;
    double t1 = lo / xi, t2 = hi / xi;
    if (t1 > t2) std::swap(t1, t2);
    t_lo = std::max(t_lo, t1);
    t_hi = std::min(t_hi, t2);
    return true;
  };
  if (!clip(xi1, sym.bbox.x1min, sym.bbox.x1max)) return 0.0;
  if (!clip(xi2, sym.bbox.x2min, sym.bbox.x2max)) return 0.0;
  if (!(t_hi > t_lo)) return 0.0;
  if (!(t_lo > 0.0))
    throw parameter_error(
        "node_time_energy: symbol support touches the origin; the dilation "
        "range is unbounded");

  const double u_a = std::log(t_lo), u_b = std::log(t_hi);
  auto q = [&](double u) {
    const double t = std::exp(u);
    const double z1 = t * xi1, z2 = t * xi2;
    if (!sym.bbox.contains(z1, z2)) return 0.0;
    const double v = sym.eval(z1, z2);
    return v * v;
  };

  // Stage 1: locate active subintervals of the clipped range. The density
  // must resolve the thinnest radial feature of the symbol; 2^13 points over
  // the box-limited range keep a 2^-10-relative collar crossing covered by
  // several samples.
  const int n1 = 8192;
  const double du = (u_b - u_a) / n1;
  std::vector<bool> active(n1, false);
  for (int k = 0; k < n1; ++k) active[k] = q(u_a + (k + 0.5) * du) > 0.0;

  struct Run {
    int lo, hi;  // inclusive subinterval indices
  };
  std::vector<Run> runs;
  for (int k = 0; k < n1; ++k) {
    if (!active[k]) continue;
    int e = k;
    while (e + 1 < n1 && active[e + 1]) ++e;
    runs.push_back({std::max(0, k - 1), std::min(n1 - 1, e + 1)});
    k = e;
  }
  for (std::size_t m = 1; m < runs.size();) {
    if (runs[m].lo <= runs[m - 1].hi + 1) {
      runs[m - 1].hi = std::max(runs[m - 1].hi, runs[m].hi);
      runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(m));
    } else {
      ++m;
    }
  }

  // Stage 2: dense log-trapezoid over each active run.
  double total = 0.0;
  const int n2 = 4096;
  for (const auto& run : runs) {
    const double ua = u_a + run.lo * du;
    const double ub = u_a + (run.hi + 1) * du;
    const double step = (ub - ua) / n2;
    double s = 0.5 * (q(ua) + q(ub));
    for (int k = 1; k < n2; ++k) s += q(ua + k * step);
    total += s * step;
  }
  return total;
}

Field cone_partial_inside(const Field& f, const Curve& c, const ConeWindow& w,
                          double lambda, double R) {
  return br_partial(f, gauge_power_symbol(c, w, lambda, GaugeSide::inside), R);
}

Field cone_partial_outside(const Field& f, const Curve& c, const ConeWindow& w,
                           double lambda, double R) {
  return br_partial(f, gauge_power_symbol(c, w, lambda, GaugeSide::outside), R);
}

Field cone_maximal(const Field& f, const Curve& c, const ConeWindow& w,
                   double lambda, const RGrid& rgrid, GaugeSide side) {
  if (rgrid.R.empty()) throw parameter_error("cone_maximal: empty R grid");
  (void)gauge_power_symbol(c, w, lambda, side);  // window / case / exponent checks
  const Field fhat = ensure_frequency(f);
  const Symbol ws = cone_window_symbol(c, w);
  const auto plan = build_cone_plan(fhat, c, ws, w);
  const auto radial = cone_radial_profile(w);
  const double sgn = side == GaugeSide::inside ? -1.0 : 1.0;
  const int N = f.grid.N;

  Field acc(f.grid, Space::physical);
  Field tmp(f.grid, Space::frequency);
  std::vector<std::size_t> touched;
  for (double R : rgrid.R) {
    touched.clear();
    for (const auto& n : plan) {
      const double rad = radial(n.absxi / R);
      if (rad == 0.0) continue;
      const double x = sgn * (n.rho / R - 1.0);
      if (x < 1e-300) continue;
      const double v = n.slope_f * rad * (lambda == 0.0 ? 1.0 : std::pow(x, lambda));
      const std::size_t idx = static_cast<std::size_t>(n.i) * N + n.j;
      tmp.values[idx] = v * n.fv;
      touched.push_back(idx);
    }
    if (touched.empty()) continue;
    const Field ph = inverse_transform(tmp);
    for (std::size_t k = 0; k < acc.values.size(); ++k) {
      const double m = std::abs(ph.values[k]);
      if (m > acc.values[k].real()) acc.values[k] = m;
    }
    for (std::size_t idx : touched) tmp.values[idx] = cplx(0.0, 0.0);
  }
  return acc;
}

double cone_upper_gauge_constant(const Curve& c, const ConeWindow& w) {
  (void)cone_window_symbol(c, w);  // validates the window against the cone
  const int n = 4096;
  double gmin = std::numeric_limits<double>::infinity();
  bool hit = false;
  for (int k = 0; k <= n; ++k) {
    const double t = c.I3.lo + (c.I3.hi - c.I3.lo) * k / n;
    const double q = c.ratio(t);
    if (q < w.slope_lo || q > w.slope_hi) continue;
    gmin = std::min(gmin, std::hypot(t, c.psi(t)));
    hit = true;
  }
  if (!hit) {
    for (int k = 0; k <= n; ++k) {
      const double t = c.I3.lo + (c.I3.hi - c.I3.lo) * k / n;
      gmin = std::min(gmin, std::hypot(t, c.psi(t)));
    }
  }
  return 1.0 / gmin;
}

ConeWindow subordination_companion_window(const Curve& c) {
  auto sorted_ratio = [&](const Interval& I) {
    double a = c.ratio(I.lo), b = c.ratio(I.hi);
    if (a > b) std::swap(a, b);
    return std::pair<double, double>(a, b);
  };
  const auto [q2lo, q2hi] = sorted_ratio(c.I2);
  const auto [q3lo, q3hi] = sorted_ratio(c.I3);
  const double gap = std::min(q2lo - q3lo, q3hi - q2hi);
  if (!(gap > 0.0))
    throw admissibility_error(
        "subordination_companion_window: ratio range over the middle window "
        "does not sit inside the outer one");

  const int n = 4096;
  double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double t = c.I3.lo + (c.I3.hi - c.I3.lo) * k / n;
    const double r = std::hypot(t, c.psi(t));
    gmin = std::min(gmin, r);
    gmax = std::max(gmax, r);
  }

  ConeWindow w;
  w.slope_margin = 0.45 * gap;
  w.slope_lo = q2lo - w.slope_margin;
  w.slope_hi = q2hi + w.slope_margin;
  w.r_lo = gmin / 8.0;
  w.r_flat_lo = 0.225 * gmin;
  w.r_flat_hi = 1.5 * gmax;
  w.r_hi = 3.0 * gmax;
  return w;
}

std::pair<double, double> split_riesz_order(double lambda) {
  double beta = 0.75;
  if (!(lambda > 0.25)) beta = lambda + 0.3;
  const double delta = lambda - beta;
  if (!(beta > 0.5) || !(delta > -0.5))
    throw parameter_error(
        "split_riesz_order: no admissible split with beta > 1/2 and "
        "delta > -1/2 for lambda = " +
        std::to_string(lambda));
  return {delta, beta};
}

SubordinationReport subordination_check(const Field& f, const Curve& c,
                                        const ConeWindow& b_win,
                                        const ConeWindow& companion,
                                        double delta_ord, double beta, double R,
                                        int s_points) {
  if (!(beta > 0.5)) throw parameter_error("subordination_check: beta must exceed 1/2");
  if (!(delta_ord > -0.5))
    throw parameter_error("subordination_check: delta must exceed -1/2");
  if (!(R > 0.0)) throw parameter_error("subordination_check: R must be positive");
  if (s_points < 8) throw parameter_error("subordination_check: too few s points");

  const Field fhat = ensure_frequency(f);
  const Symbol bsym = cone_window_symbol(c, b_win);
  const Symbol btsym = cone_window_symbol(c, companion);
  const GridSpec& g = f.grid;
  const double fs2 = g.freq_step() * g.freq_step();

  struct Node {
    double xi1, xi2, rho;
    cplx bfv;  // b(xi / R) * fhat(xi)
  };
  std::vector<Node> act;
  {
    const FreqBox box = bsym.bbox.scaled(R);
    const int i_lo = g.xi_lower_index(box.x1min), i_hi = g.xi_upper_index(box.x1max);
    const int j_lo = g.xi_lower_index(box.x2min), j_hi = g.xi_upper_index(box.x2max);
    for (int i = i_lo; i < i_hi; ++i) {
      const double xi1 = g.xi_at(i);
      for (int j = j_lo; j < j_hi; ++j) {
        const cplx fv = fhat.at(i, j);
        if (fv == cplx(0.0, 0.0)) continue;
        const double xi2 = g.xi_at(j);
        const double bv = bsym.eval(xi1 / R, xi2 / R);
        if (bv == 0.0) continue;
        act.push_back({xi1, xi2, rho_gauge(c, xi1, xi2), bv * fv});
      }
    }
  }

  SubordinationReport rep;
  rep.delta_ord = delta_ord;
  rep.beta = beta;
  rep.R = R;
  rep.C_value = 1.0 / beta_function(delta_ord + 1.0, beta);
  rep.probes = 64;
  rep.s_points = s_points;
  if (act.empty()) return rep;

  const int P = 8;
  std::vector<double> px(P * P), py(P * P);
  for (int a = 0; a < P; ++a)
    for (int b = 0; b < P; ++b) {
      px[a * P + b] = g.x_at(a * g.N / P);
      py[a * P + b] = g.x_at(b * g.N / P);
    }
  const std::size_t K = act.size();
  const std::size_t NP = static_cast<std::size_t>(P) * P;
  std::vector<cplx> phase(NP * K);
  for (std::size_t p = 0; p < NP; ++p)
    for (std::size_t n = 0; n < K; ++n) {
      const double ph = kTwoPi * (px[p] * act[n].xi1 + py[p] * act[n].xi2);
      phase[p * K + n] = cplx(std::cos(ph), std::sin(ph));
    }

  const double order = delta_ord + beta;
  std::vector<cplx> lhs(NP, cplx(0.0, 0.0));
  for (std::size_t n = 0; n < K; ++n) {
    const double x = 1.0 - act[n].rho / R;
    if (x < 1e-300) continue;
    const cplx coef = act[n].bfv * std::pow(x, order);
    for (std::size_t p = 0; p < NP; ++p) lhs[p] += coef * phase[p * K + n];
  }
  for (auto& v : lhs) v *= fs2;

  double rho_min = std::numeric_limits<double>::infinity();
  for (const auto& n : act) rho_min = std::min(rho_min, n.rho);
  double u_start = 0.98 * rho_min / R;
  if (!(u_start < 1.0) || !(u_start > 0.0)) u_start = 0.0;

  const double schwarz_mass = beta_function(2.0 * beta - 1.0, 2.0 * delta_ord + 1.0);
  std::vector<cplx> coef(K);
  auto run_quadrature = [&](int ns, std::vector<cplx>& rhs, std::vector<double>& sumsq) {
    rhs.assign(NP, cplx(0.0, 0.0));
    sumsq.assign(NP, 0.0);

    // Each node's integrand switches on at s = rho; midpoint-sampling the
    // switch costs a full segment of beta mass, so the segment containing it
    // is integrated in closed form instead. With u = s/R and u_c = rho/R the
    // weight times the order-delta factor is u^d (1-u)^{b-1} (1-u_c/u)^d =
    // (u-u_c)^d (1-u)^{b-1}, an incomplete beta integral after the shift
    // u = u_c + (1-u_c) w.
    std::vector<std::vector<std::size_t>> straddlers(static_cast<std::size_t>(ns));
    for (std::size_t n = 0; n < K; ++n) {
      const double un = act[n].rho / R;
      if (!(un > u_start && un < 1.0)) continue;
      const double pos = (un - u_start) / (1.0 - u_start) * ns;
      const int si = std::clamp(static_cast<int>(pos), 0, ns - 1);
      straddlers[static_cast<std::size_t>(si)].push_back(n);
    }

    std::vector<std::pair<std::size_t, cplx>> fixes;
    for (int i = 0; i < ns; ++i) {
      const double u0 = u_start + (1.0 - u_start) * i / ns;
      const double u1 = u_start + (1.0 - u_start) * (i + 1) / ns;
      const double W = incomplete_beta_segment(delta_ord + 1.0, beta, u0, u1);
      const double s = R * 0.5 * (u0 + u1);
      bool any = false;
      for (std::size_t n = 0; n < K; ++n) {
        coef[n] = cplx(0.0, 0.0);
        const double x = 1.0 - act[n].rho / s;
        if (x < 1e-300) continue;
        const double btv = btsym.eval(act[n].xi1 / s, act[n].xi2 / s);
        if (btv == 0.0) continue;
        coef[n] = act[n].bfv * btv * (delta_ord == 0.0 ? 1.0 : std::pow(x, delta_ord));
        any = true;
      }

      fixes.clear();
      for (std::size_t n : straddlers[static_cast<std::size_t>(i)]) {
        const double uc = act[n].rho / R;
        if (!(u1 > uc)) continue;
        const double w1 = (u1 - uc) / (1.0 - uc);
        const double w_exact = std::pow(1.0 - uc, delta_ord + beta) *
                               incomplete_beta_segment(delta_ord + 1.0, beta,
                                                       0.0, w1);
        const double sn = R * 0.5 * (uc + u1);
        const double btv = btsym.eval(act[n].xi1 / sn, act[n].xi2 / sn);
        const cplx exact = act[n].bfv * btv * w_exact;
        fixes.emplace_back(n, exact - W * coef[n]);
        any = true;
      }
      if (!any) continue;

      for (std::size_t p = 0; p < NP; ++p) {
        cplx G(0.0, 0.0);
        const cplx* ph = &phase[p * K];
        for (std::size_t n = 0; n < K; ++n) G += coef[n] * ph[n];
        G *= fs2;
        rhs[p] += W * G;
        for (const auto& [n, corr] : fixes) rhs[p] += fs2 * corr * ph[n];
        sumsq[p] += (u1 - u0) * std::norm(G);
      }
    }
    for (auto& v : rhs) v *= rep.C_value;
  };

  double scale = 0.0;
  for (const auto& v : lhs) scale = std::max(scale, std::abs(v));
  rep.lhs_scale = scale;
  const double denom = scale > 0.0 ? scale : 1.0;

  std::vector<cplx> rhs_c, rhs_f;
  std::vector<double> ss_c, ss_f;
  run_quadrature(s_points, rhs_c, ss_c);
  run_quadrature(2 * s_points, rhs_f, ss_f);

  double res_c = 0.0, res_f = 0.0, slack = std::numeric_limits<double>::infinity();
  const double bound_factor = rep.C_value * std::sqrt(schwarz_mass);
  for (std::size_t p = 0; p < NP; ++p) {
    res_c = std::max(res_c, std::abs(lhs[p] - rhs_c[p]) / denom);
    res_f = std::max(res_f, std::abs(lhs[p] - rhs_f[p]) / denom);
    const double bound = bound_factor * std::sqrt(ss_f[p]);
    slack = std::min(slack, (bound - std::abs(rhs_f[p])) / denom);
  }
  rep.residual_coarse = res_c;
  rep.residual_fine = res_f;
  rep.schwarz_slack = slack;

  if (rep.residual_fine > 2.0 * rep.residual_coarse && rep.residual_fine > 1e-9)
    throw quadrature_error(
        "subordination_check: s-quadrature did not converge (residual " +
        std::to_string(rep.residual_fine) + " after doubling from " +
        std::to_string(rep.residual_coarse) + ")");
  return rep;
}

DominationReport maximal_domination_check(const Field& f, const Curve& c,
                                          double lambda, const RGrid& rgrid,
                                          int ppo, GaugeSide side) {
  if (ppo < 1) throw parameter_error("maximal_domination_check: ppo must be >= 1");
  const auto [delta_ord, beta] = split_riesz_order(lambda);

  DominationReport rep;
  rep.delta_ord = delta_ord;
  rep.beta = beta;

  const Field fhat = ensure_frequency(f);
  const ConeWindow b = default_cone_window(c);
  const ConeWindow bt = subordination_companion_window(c);
  rep.lhs = cone_maximal(fhat, c, b, lambda, rgrid, side);

  bool empty_spectrum = true;
  for (const auto& v : fhat.values)
    if (v != cplx(0.0, 0.0)) {
      empty_spectrum = false;
      break;
    }

  Field ratio(f.grid, Space::physical);
  if (empty_spectrum) {
    rep.ratio = ratio;
    return rep;
  }

  const Symbol sq_sym = gauge_power_symbol(c, bt, delta_ord, side);
  const Band band = time_band(sq_sym, fhat);
  Field g(f.grid, Space::physical);
  if (!band.empty()) {
    const TimeQuadrature quad = make_time_quadrature(band.lo, band.hi, ppo);
    g = square_function(fhat, sq_sym, quad);
  }
  const Field M = hl_maximal(g);

  double lhs_max = 0.0, rhs_max = 0.0, sup_ratio = 0.0;
  for (std::size_t k = 0; k < ratio.values.size(); ++k) {
    const double l = rep.lhs.values[k].real();
    const double m = M.values[k].real();
    lhs_max = std::max(lhs_max, l);
    rhs_max = std::max(rhs_max, m);
    if (m > 0.0) {
      const double r = l / m;
      ratio.values[k] = r;
      sup_ratio = std::max(sup_ratio, r);
    } else if (l > 0.0) {
      throw domination_failure_error(
          "maximal_domination_check: square function vanishes while the "
          "cone maximal operator is positive (lhs = " +
          std::to_string(l) + ")");
    }
  }
  rep.ratio = std::move(ratio);
  rep.sup_ratio = sup_ratio;
  rep.lhs_max = lhs_max;
  rep.rhs_max = rhs_max;
  return rep;
}

PieceFrame piece_frame(const Decomposition& d, int ell) {
  const int M = static_cast<int>(d.a.size()) - 1;
  if (ell < 1 || ell > M)
    throw range_error("piece_frame: sector index out of range");
  const double v = d.slab_slope(ell);
  const double nrm = std::hypot(1.0, v);
  PieceFrame fr;
  fr.t1 = 1.0 / nrm;
  fr.t2 = v / nrm;
  fr.n1 = -v / nrm;
  fr.n2 = 1.0 / nrm;
  return fr;
}

Field kernel_field(const Decomposition& d, const Curve&, const Symbol& collar,
                   int ell, double t, const GridSpec& grid) {
  if (!(t >= 1.0 && t <= 2.0))
    throw parameter_error("kernel_field: t must lie in [1, 2]");
  const int required = static_cast<int>(std::ceil(64.0 / d.sqrt_delta - 1e-9));
  if (grid.N < required)
    throw resolution_error("kernel_field: grid under-resolved; need N >= " +
                           std::to_string(required) + " at delta = " +
                           std::to_string(d.delta) + " (got N = " +
                           std::to_string(grid.N) + ")");
  const PieceSet pieces = partition_pieces(d, collar, d.delta);
  const Symbol& piece = pieces.zeta_piece(ell);

  Field fh(grid, Space::frequency);
  const FreqBox box = piece.bbox.scaled(1.0 / t);
  const int i_lo = grid.xi_lower_index(box.x1min), i_hi = grid.xi_upper_index(box.x1max);
  const int j_lo = grid.xi_lower_index(box.x2min), j_hi = grid.xi_upper_index(box.x2max);
  for (int i = i_lo; i < i_hi; ++i) {
    const double z1 = t * grid.xi_at(i);
    for (int j = j_lo; j < j_hi; ++j) {
      const double v = piece.eval(z1, t * grid.xi_at(j));
      if (v != 0.0) fh.at(i, j) = v;
    }
  }
  return inverse_transform(fh);
}

std::complex<double> kernel_probe(const Decomposition& d, const Curve& c,
                                  const BumpProfile& profile, int ell, double t,
                                  double x1, double x2) {
  const Symbol collar = collar_symbol(c, profile, d.delta);
  const PieceSet pieces = partition_pieces(d, collar, d.delta);
  const Symbol& piece = pieces.zeta_piece(ell);
  const double u_lo = d.a[static_cast<std::size_t>(ell) - 1];
  const double u_hi = d.a[static_cast<std::size_t>(ell)];

  static const GaussLegendre gl8(8);
  static const GaussLegendre gl16(16);
  const int panels = 64;
  const double delta = d.delta, c_star = profile.c_star;

  cplx acc(0.0, 0.0);
  for (int p = 0; p < panels; ++p) {
    const double a = u_lo + (u_hi - u_lo) * p / panels;
    const double b = u_lo + (u_hi - u_lo) * (p + 1) / panels;
    const double cm = 0.5 * (a + b), hw = 0.5 * (b - a);
    for (std::size_t iu = 0; iu < gl8.nodes.size(); ++iu) {
      const double u = cm + hw * gl8.nodes[iu];
      const double wu = hw * gl8.weights[iu];
      const double psi_u = c.psi(u);
      for (std::size_t iv = 0; iv < gl16.nodes.size(); ++iv) {
        const double v = 0.5 * c_star * (1.0 + gl16.nodes[iv]);
        const double wv = 0.5 * c_star * gl16.weights[iv];
        const double y = psi_u + delta * v;
        const double amp = piece.eval(u, y);
        if (amp == 0.0) continue;
        const double ph = kTwoPi * (x1 * u + x2 * y) / t;
        acc += (wu * wv * amp) * cplx(std::cos(ph), std::sin(ph));
      }
    }
  }
  return acc * (delta / (t * t));
}

KernelDecayReport kernel_decay_check(const Decomposition& d, const Curve& c,
                                     const BumpProfile& profile, int ell,
                                     double t) {
  KernelDecayReport rep;
  rep.delta = d.delta;
  rep.t = t;
  rep.ell = ell;
  rep.scale = std::pow(d.delta, 1.5) / (t * t);
  const PieceFrame fr = piece_frame(d, ell);

  const double tangential_unit = t / d.sqrt_delta;
  const double normal_unit = t / d.delta;
  const double offsets[] = {0.5, 1.0, 2.0, 4.0, 8.0};

  auto add_probe = [&](double X1, double X2) {
    const double x1 = X1 * tangential_unit * fr.t1 + X2 * normal_unit * fr.n1;
    const double x2 = X1 * tangential_unit * fr.t2 + X2 * normal_unit * fr.n2;
    KernelProbeSample s;
    s.x1 = x1;
    s.x2 = x2;
    s.X1 = X1;
    s.X2 = X2;
    s.value = kernel_probe(d, c, profile, ell, t, x1, x2);
    rep.samples.push_back(s);
    const double m = std::abs(s.value) / rep.scale;
    rep.c00 = std::max(rep.c00, m);
    if (X1 != 0.0 && X2 == 0.0)
      rep.c30 = std::max(rep.c30, m * std::pow(std::abs(X1), 3.0));
    if (X2 != 0.0 && X1 == 0.0)
      rep.c03 = std::max(rep.c03, m * std::pow(std::abs(X2), 3.0));
  };

  add_probe(0.0, 0.0);
  for (double X : offsets) {
    add_probe(X, 0.0);
    add_probe(-X, 0.0);
    add_probe(0.0, X);
    add_probe(0.0, -X);
  }
  return rep;
}

BoxDominationReport box_average_domination(const Field& f, const Decomposition& d,
                                           const Curve&, const Symbol& collar,
                                           int ell, int n, int nu_max) {
  if (nu_max < 0) throw parameter_error("box_average_domination: nu_max must be >= 0");
  const PieceSet pieces = partition_pieces(d, collar, d.delta);
  const Symbol& piece = pieces.zeta_piece(ell);
  const PieceFrame fr = piece_frame(d, ell);
  const Field fhat = ensure_frequency(f);
  const Field fphys = ensure_physical(f);

  BoxDominationReport rep{Field(f.grid, Space::physical), Field(f.grid, Space::physical), 0.0};
  const int t_samples = 16;
  for (int i = 0; i < t_samples; ++i) {
    const double tt = std::exp2(n + static_cast<double>(i) / t_samples);
    const Field ph = inverse_transform(sparse_apply(fhat, piece, tt));
    for (std::size_t k = 0; k < rep.lhs.values.size(); ++k) {
      const double m = std::abs(ph.values[k]);
      if (m > rep.lhs.values[k].real()) rep.lhs.values[k] = m;
    }
  }

  const Field af = modulus_field(fphys);
  for (int nu = 0; nu <= nu_max; ++nu) {
    const double base = std::exp2(nu + n);
    const double l1 = base / d.sqrt_delta;
    const double l2 = base / d.delta;
    const Field avg = directional_box_average(af, {fr.t1, fr.t2}, l1, l2);
    const double wgt = std::exp2(-nu);
    for (std::size_t k = 0; k < rep.rhs.values.size(); ++k)
      rep.rhs.values[k] += wgt * avg.values[k].real();
  }

  for (std::size_t k = 0; k < rep.lhs.values.size(); ++k) {
    const double l = rep.lhs.values[k].real();
    const double r = rep.rhs.values[k].real();
    if (r > 0.0) rep.fitted_C = std::max(rep.fitted_C, l / r);
  }
  return rep;
}

std::pair<double, double> vector_valued_norms(const std::vector<Field>& fs,
                                              const Symbol& sym,
                                              const std::vector<double>& Rs,
                                              double p) {
  if (fs.size() != Rs.size())
    throw parameter_error("vector_valued_norms: field and R lists differ in length");
  if (!(p >= 4.0 / 3.0 - 1e-12 && p <= 4.0 + 1e-12))
    throw parameter_error("vector_valued_norms: p must lie in [4/3, 4]");
  if (fs.empty()) return {0.0, 0.0};
  for (const auto& f : fs)
    if (f.grid != fs.front().grid)
      throw grid_mismatch_error("vector_valued_norms: mixed grids");

  const GridSpec& g = fs.front().grid;
  Field lhs(g, Space::physical), rhs(g, Space::physical);
  std::vector<double> accl(lhs.values.size(), 0.0), accr(accl);
  for (std::size_t l = 0; l < fs.size(); ++l) {
    const Field s = br_partial(fs[l], sym, Rs[l]);
    const Field fp = ensure_physical(fs[l]);
    for (std::size_t k = 0; k < accl.size(); ++k) {
      accl[k] += std::norm(s.values[k]);
      accr[k] += std::norm(fp.values[k]);
    }
  }
  for (std::size_t k = 0; k < accl.size(); ++k) {
    lhs.values[k] = std::sqrt(accl[k]);
    rhs.values[k] = std::sqrt(accr[k]);
  }
  return {lp_norm(lhs, p), lp_norm(rhs, p)};
}

}  // namespace brlab
