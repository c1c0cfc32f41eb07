#include "brlab/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "brlab/errors.hpp"
#include "brlab/numerics.hpp"

namespace brlab {

namespace {

// Master bump exp(1 - 1/(1 - s^2)) on (-1, 1) with closed-form derivatives.
double master_bump(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double q = 1.0 - s * s;
  if (q < 1e-12) return 0.0;
  return std::exp(1.0 - 1.0 / q);
}

double master_bump_deriv(double s, int m) {
  const double B = master_bump(s);
  if (B == 0.0 || m == 0) return B;
  const double q = 1.0 - s * s;
  const double v = -2.0 * s / (q * q);
  if (m == 1) return B * v;
  const double w = (-2.0 - 6.0 * s * s) / (q * q * q);
  if (m == 2) return B * (v * v + w);
  const double z = -24.0 * s * (1.0 + s * s) / (q * q * q * q);
  return B * (v * v * v + 3.0 * v * w + z);
}

double step_core(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double f = std::exp(-1.0 / u);
  const double g = std::exp(-1.0 / (1.0 - u));
  return f / (f + g);
}

struct SlopeFrame {
  // Slope coordinate per case: xi1/xi2 for band cases, xi2/xi1 for steep
  // cases; sign_ok rejects the wrong half-plane before dividing.
  CurveCase cc;
  bool sign_ok(double xi1, double xi2) const {
    switch (cc) {
      case CurveCase::B1:
        return xi2 > 0.0;
      case CurveCase::B2:
        return xi2 < 0.0;
      case CurveCase::B3:
        return xi1 > 0.0;
      case CurveCase::B4:
        return xi1 < 0.0;
    }
    return false;
  }
  double slope(double xi1, double xi2) const {
    if (cc == CurveCase::B1 || cc == CurveCase::B2) return xi1 / xi2;
    return xi2 / xi1;
  }
};

struct SortedPair {
  double lo, hi;
};

SortedPair ratio_range(const Curve& c, const Interval& I) {
  double r0 = c.ratio(I.lo);
  double r1 = c.ratio(I.hi);
  if (r0 > r1) std::swap(r0, r1);
  return {r0, r1};
}

void psi_extrema(const Curve& c, const Interval& I, double* lo, double* hi) {
  double mn = std::numeric_limits<double>::infinity();
  double mx = -mn;
  const int n = 2048;
  for (int k = 0; k <= n; ++k) {
    const double t = I.lo + (I.hi - I.lo) * k / n;
    const double v = c.psi(t);
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  *lo = mn;
  *hi = mx;
}

int delta_exponent(double delta, const char* who) {
  if (!(delta > 0.0 && delta <= 0.25)) {
    throw parameter_error(std::string(who) +
                          ": delta must lie in (0, 1/4], got " +
                          std::to_string(delta));
  }
  const double L = -std::log2(delta);
  const double Lr = std::round(L);
  if (std::abs(L - Lr) > 1e-9 || static_cast<int>(Lr) % 2 != 0) {
    throw parameter_error(std::string(who) +
                          ": delta must be 2^{-L} with L even, got " +
                          std::to_string(delta));
  }
  return static_cast<int>(Lr);
}

}  // namespace

std::function<double(double)> smooth_bump(double center, double radius) {
  if (!(radius > 0.0))
    throw parameter_error("smooth_bump: radius must be positive");
  return [center, radius](double s) {
    return master_bump((s - center) / radius);
  };
}

std::function<double(double)> smooth_step(double edge0, double edge1) {
  if (!(edge0 < edge1))
    throw parameter_error("smooth_step: edge0 must be below edge1");
  const double inv = 1.0 / (edge1 - edge0);
  return [edge0, inv](double s) { return step_core((s - edge0) * inv); };
}

std::function<double(double)> window_1d(double lo, double hi, double margin) {
  if (!(lo < hi)) throw parameter_error("window_1d: empty interval");
  if (!(margin > 0.0 && 2.0 * margin <= hi - lo))
    throw parameter_error("window_1d: margin must fit twice inside the interval");
  const double inv = 1.0 / margin;
  return [lo, hi, inv](double t) {
    const double rise = step_core((t - lo) * inv);
    if (rise == 0.0) return 0.0;
    const double fall = step_core((hi - t) * inv);
    return rise * fall;
  };
}

BumpProfile collar_profile(double c_star, bool normalized) {
  if (!(c_star > 0.0))
    throw parameter_error("collar_profile: c_star must be positive");
  BumpProfile p;
  p.c_star = c_star;
  const double chain = 2.0 / c_star;
  std::array<double, 4> base{};
  const int n = 4096;
  for (int k = 0; k <= n; ++k) {
    const double s = -1.0 + 2.0 * k / n;
    for (int m = 0; m < 4; ++m)
      base[static_cast<std::size_t>(m)] =
          std::max(base[static_cast<std::size_t>(m)],
                   std::abs(master_bump_deriv(s, m)));
  }
  double worst = 0.0;
  for (int m = 0; m < 4; ++m) {
    p.derivative_certificate[static_cast<std::size_t>(m)] =
        std::pow(chain, m) * base[static_cast<std::size_t>(m)];
    worst = std::max(worst, p.derivative_certificate[static_cast<std::size_t>(m)]);
  }
  double scale = 1.0;
  if (normalized && worst > 1.0) {
    scale = 1.0 / worst;
    for (auto& cert : p.derivative_certificate) cert *= scale;
    p.normalized = true;
  }
  p.Phi = [c_star, scale](double r) {
    return scale * master_bump(2.0 * r / c_star - 1.0);
  };
  return p;
}

Symbol dilate_symbol(const Symbol& s, double t) {
  if (!(t > 0.0)) throw parameter_error("dilate_symbol: t must be positive");
  Symbol out;
  out.name = s.name + "@" + std::to_string(t);
  auto eval = s.eval;
  out.eval = [eval, t](double x1, double x2) { return eval(t * x1, t * x2); };
  out.bbox = s.bbox.is_everything() ? s.bbox : s.bbox.scaled(1.0 / t);
  if (s.in_support) {
    auto sup = s.in_support;
    out.in_support = [sup, t](double x1, double x2) {
      return sup(t * x1, t * x2);
    };
  }
  return out;
}

Symbol standard_amplitude(const Curve& c) {
  const Interval I1 = c.I1;
  auto w1 = window_1d(I1.lo, I1.hi, I1.length() / 8.0);
  const double b2lo = c.box.x2_lo, b2hi = c.box.x2_hi;
  auto w2 = window_1d(b2lo, b2hi, (b2hi - b2lo) / 8.0);
  const SortedPair q = ratio_range(c, I1);
  auto ws = window_1d(q.lo, q.hi, (q.hi - q.lo) / 8.0);
  const SlopeFrame frame{c.declared_case};

  Symbol s;
  s.name = "a[" + c.name + "]";
  s.bbox = FreqBox{I1.lo, I1.hi, b2lo, b2hi};
  s.eval = [w1, w2, ws, frame](double x1, double x2) {
    const double a1 = w1(x1);
    if (a1 == 0.0) return 0.0;
    const double a2 = w2(x2);
    if (a2 == 0.0) return 0.0;
    if (!frame.sign_ok(x1, x2)) return 0.0;
    return a1 * a2 * ws(frame.slope(x1, x2));
  };
  s.in_support = [I1, b2lo, b2hi, q, frame](double x1, double x2) {
    if (!(x1 > I1.lo && x1 < I1.hi)) return false;
    if (!(x2 > b2lo && x2 < b2hi)) return false;
    if (!frame.sign_ok(x1, x2)) return false;
    const double sl = frame.slope(x1, x2);
    return sl > q.lo && sl < q.hi;
  };
  return s;
}

Symbol collar_window(const Curve& c) {
  const Interval I2 = c.I2;
  auto w1 = window_1d(I2.lo, I2.hi, I2.length() / 8.0);
  const double b2lo = c.box.x2_lo, b2hi = c.box.x2_hi;
  auto w2 = window_1d(b2lo, b2hi, (b2hi - b2lo) / 8.0);

  Symbol s;
  s.name = "b[" + c.name + "]";
  s.bbox = FreqBox{I2.lo, I2.hi, b2lo, b2hi};
  s.eval = [w1, w2](double x1, double x2) {
    const double a1 = w1(x1);
    if (a1 == 0.0) return 0.0;
    return a1 * w2(x2);
  };
  s.in_support = [I2, b2lo, b2hi](double x1, double x2) {
    return x1 > I2.lo && x1 < I2.hi && x2 > b2lo && x2 < b2hi;
  };
  return s;
}

Symbol collar_symbol(const Curve& c, const BumpProfile& profile, double delta) {
  const int L = delta_exponent(delta, "collar_symbol");
  const Symbol b = collar_window(c);
  double psi_lo = 0.0, psi_hi = 0.0;
  psi_extrema(c, c.I2, &psi_lo, &psi_hi);
  auto psi = c.psi;
  auto Phi = profile.Phi;
  const double c_star = profile.c_star;

  Symbol s;
  s.name = "collar[" + c.name + "]@2^-" + std::to_string(L);
  s.bbox = FreqBox{b.bbox.x1min, b.bbox.x1max,
                   std::max(b.bbox.x2min, psi_lo),
                   std::min(b.bbox.x2max, psi_hi + c_star * delta)};
  auto beval = b.eval;
  s.eval = [beval, psi, Phi, delta](double x1, double x2) {
    const double w = beval(x1, x2);
    if (w == 0.0) return 0.0;
    return w * Phi((x2 - psi(x1)) / delta);
  };
  auto bsup = b.in_support;
  s.in_support = [bsup, psi, delta, c_star](double x1, double x2) {
    if (!bsup(x1, x2)) return false;
    const double r = (x2 - psi(x1)) / delta;
    return r >= 0.0 && r <= c_star;
  };
  return s;
}

Symbol distance_power_symbol(const Curve& c, const Symbol& window,
                             double lambda, double theta, DistanceSide side) {
  if (lambda < -0.5)
    throw parameter_error("distance_power_symbol: lambda below -1/2");
  if (lambda == -0.5 && theta == 0.0)
    throw parameter_error(
        "distance_power_symbol: lambda = -1/2 needs a log power theta");
  auto psi = c.psi;
  const double sgn = side == DistanceSide::above ? 1.0 : -1.0;
  auto weval = window.eval;

  Symbol s;
  s.name = (side == DistanceSide::above ? "sigma[" : "sigma-below[") + c.name +
           "]l" + std::to_string(lambda);
  s.bbox = window.bbox;
  s.eval = [weval, psi, sgn, lambda, theta](double x1, double x2) {
    const double w = weval(x1, x2);
    if (w == 0.0) return 0.0;
    const double r = sgn * (x2 - psi(x1));
    if (r < 1e-300) return 0.0;
    double v = lambda == 0.0 ? 1.0 : std::pow(r, lambda);
    if (theta != 0.0) v *= std::pow(std::log(2.0 + 1.0 / r), -theta);
    return w * v;
  };
  auto wsup = window.in_support;
  s.in_support = [wsup, psi, sgn](double x1, double x2) {
    if (wsup && !wsup(x1, x2)) return false;
    return sgn * (x2 - psi(x1)) > 0.0;
  };
  return s;
}

ConeWindow default_cone_window(const Curve& c) {
  const SortedPair s1 = ratio_range(c, c.I1);
  const SortedPair s2 = ratio_range(c, c.I2);
  ConeWindow w;
  w.slope_lo = s2.lo;
  w.slope_hi = s2.hi;
  const double gap = std::min(s1.lo - s2.lo, s2.hi - s1.hi);
  w.slope_margin = std::min((s2.hi - s2.lo) / 8.0, 0.9 * gap);
  double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
  const int n = 1024;
  for (int k = 0; k <= n; ++k) {
    const double t = c.I3.lo + (c.I3.hi - c.I3.lo) * k / n;
    const double r = std::hypot(t, c.psi(t));
    gmin = std::min(gmin, r);
    gmax = std::max(gmax, r);
  }
  w.r_lo = gmin / 4.0;
  w.r_flat_lo = gmin / 2.0;
  w.r_flat_hi = 2.0 * gmax;
  w.r_hi = 4.0 * gmax;
  return w;
}

Symbol cone_window_symbol(const Curve& c, const ConeWindow& w) {
  if (!(w.slope_lo < w.slope_hi) || !(w.slope_margin > 0.0) ||
      !(2.0 * w.slope_margin <= w.slope_hi - w.slope_lo))
    throw parameter_error("cone_window_symbol: bad slope window");
  if (!(w.r_lo > 0.0 && w.r_lo < w.r_flat_lo && w.r_flat_lo <= w.r_flat_hi &&
        w.r_flat_hi < w.r_hi))
    throw parameter_error("cone_window_symbol: bad radial profile");
  const SortedPair s3 = ratio_range(c, c.I3);
  if (!(w.slope_lo > s3.lo && w.slope_hi < s3.hi)) {
    throw support_error(
        "cone_window_symbol: slope support [" + std::to_string(w.slope_lo) +
        ", " + std::to_string(w.slope_hi) +
        "] leaks outside the gauge cone of '" + c.name + "'");
  }
  auto ws = window_1d(w.slope_lo, w.slope_hi, w.slope_margin);
  auto rise = smooth_step(w.r_lo, w.r_flat_lo);
  auto fall = smooth_step(w.r_flat_hi, w.r_hi);
  const SlopeFrame frame{c.declared_case};
  const ConeWindow cw = w;

  // Tight support box: the main-axis coordinate m (xi2 for band cases, xi1
  // for steep ones) satisfies r_lo / sqrt(1 + q_max^2) <= |m| <= r_hi on the
  // sub-cone, and the other coordinate is slope * m. Keeping the box off the
  // origin lets dilation bands be derived from it.
  const double q_abs = std::max(std::abs(w.slope_lo), std::abs(w.slope_hi));
  const double m_lo = w.r_lo / std::sqrt(1.0 + q_abs * q_abs);
  const double m_hi = w.r_hi;
  const bool positive_axis =
      c.declared_case == CurveCase::B1 || c.declared_case == CurveCase::B3;
  const double mmin = positive_axis ? m_lo : -m_hi;
  const double mmax = positive_axis ? m_hi : -m_lo;
  double omin = std::numeric_limits<double>::infinity(), omax = -omin;
  for (double q : {w.slope_lo, w.slope_hi})
    for (double m : {mmin, mmax}) {
      omin = std::min(omin, q * m);
      omax = std::max(omax, q * m);
    }

  Symbol s;
  s.name = "cone-window[" + c.name + "]";
  if (c.declared_case == CurveCase::B1 || c.declared_case == CurveCase::B2)
    s.bbox = FreqBox{omin, omax, mmin, mmax};
  else
    s.bbox = FreqBox{mmin, mmax, omin, omax};
  s.eval = [ws, rise, fall, frame](double x1, double x2) {
    if (!frame.sign_ok(x1, x2)) return 0.0;
    const double a = ws(frame.slope(x1, x2));
    if (a == 0.0) return 0.0;
    const double r = std::hypot(x1, x2);
    return a * rise(r) * (1.0 - fall(r));
  };
  s.in_support = [cw, frame](double x1, double x2) {
    if (!frame.sign_ok(x1, x2)) return false;
    const double sl = frame.slope(x1, x2);
    if (!(sl > cw.slope_lo && sl < cw.slope_hi)) return false;
    const double r = std::hypot(x1, x2);
    return r > cw.r_lo && r < cw.r_hi;
  };
  return s;
}

Symbol gauge_power_symbol(const Curve& c, const ConeWindow& w, double expo,
                          GaugeSide side) {
  if (!(expo > -0.5))
    throw parameter_error("gauge_power_symbol: exponent must exceed -1/2");
  if (c.declared_case == CurveCase::B2 || c.declared_case == CurveCase::B4)
    throw cone_domain_error(
        "gauge_power_symbol: gauge defined for B1/B3; reduce " +
        std::string(to_string(c.declared_case)) + " by reflection");
  const Symbol bw = cone_window_symbol(c, w);
  const Curve curve = c;
  const double sgn = side == GaugeSide::inside ? -1.0 : 1.0;
  auto beval = bw.eval;

  Symbol s;
  s.name = (side == GaugeSide::inside ? "gauge-in[" : "gauge-out[") + c.name +
           "]d" + std::to_string(expo);
  s.bbox = bw.bbox;
  s.eval = [beval, curve, sgn, expo](double x1, double x2) {
    const double wv = beval(x1, x2);
    if (wv == 0.0) return 0.0;
    const double x = sgn * (rho_gauge(curve, x1, x2) - 1.0);
    if (x < 1e-300) return 0.0;
    return expo == 0.0 ? wv : wv * std::pow(x, expo);
  };
  auto bsup = bw.in_support;
  s.in_support = [bsup, curve, sgn](double x1, double x2) {
    if (!bsup(x1, x2)) return false;
    return sgn * (rho_gauge(curve, x1, x2) - 1.0) > 0.0;
  };
  return s;
}

namespace {

// Partition master profile: normalized translates of the width-1 bump at
// half-integer spacing. The denominator is positive for every x.
double partition_master(double x) {
  const double num = master_bump(2.0 * x);
  if (num == 0.0) return 0.0;
  double den = 0.0;
  const int j_lo = static_cast<int>(std::floor(2.0 * x - 1.0)) + 1;
  const int j_hi = static_cast<int>(std::ceil(2.0 * x + 1.0)) - 1;
  for (int j = j_lo; j <= j_hi; ++j) den += master_bump(2.0 * x - j);
  return num / den;
}

}  // namespace

std::function<double(double)> PieceSet::zeta_profile(int ell) const {
  const double a0c = a0, sd = sqrt_delta;
  const double center = ell - 0.5;
  return [a0c, sd, center](double s) {
    return partition_master((s - a0c) / sd - center);
  };
}

std::function<double(double)> PieceSet::zeta_tilde_profile(int ell) const {
  const double a0c = a0, sd = sqrt_delta;
  const double center = ell;
  return [a0c, sd, center](double s) {
    return partition_master((s - a0c) / sd - center);
  };
}

const Symbol& PieceSet::zeta_piece(int ell) const {
  return zeta_pieces[static_cast<std::size_t>(ell - ell_lo)];
}

const Symbol& PieceSet::zeta_tilde_piece(int ell) const {
  return zeta_tilde_pieces[static_cast<std::size_t>(ell - ell_lo)];
}

std::vector<int> PieceSet::family(int which) const {
  if (which < 1 || which > 4)
    throw parameter_error("PieceSet::family: index must be 1..4");
  std::vector<int> out;
  for (int ell = ell_lo; ell <= ell_hi; ++ell) {
    if (ell % 4 == which % 4) out.push_back(ell);
  }
  return out;
}

PieceSet partition_pieces(const Decomposition& d, const Symbol& collar,
                          double delta) {
  if (delta != d.delta) {
    throw parameter_error(
        "partition_pieces: collar delta " + std::to_string(delta) +
        " does not match decomposition delta " + std::to_string(d.delta));
  }
  PieceSet ps;
  ps.ell_lo = d.ell_lo;
  ps.ell_hi = d.ell_hi;
  ps.a0 = d.a.front();
  ps.sqrt_delta = d.sqrt_delta;

  for (int ell = ps.ell_lo; ell <= ps.ell_hi; ++ell) {
    const double alo = d.a[static_cast<std::size_t>(ell - 1)];
    const double ahi = d.a[static_cast<std::size_t>(ell)];

    auto make_piece = [&](bool tilde) {
      auto prof = tilde ? ps.zeta_tilde_profile(ell) : ps.zeta_profile(ell);
      const double slo = tilde ? ahi - 0.5 * d.sqrt_delta : alo;
      const double shi = tilde ? ahi + 0.5 * d.sqrt_delta : ahi;
      Symbol piece;
      piece.name = (tilde ? "piece~[" : "piece[") + std::to_string(ell) + "]" +
                   collar.name;
      piece.bbox = collar.bbox;
      piece.bbox.x1min = std::max(piece.bbox.x1min, slo);
      piece.bbox.x1max = std::min(piece.bbox.x1max, shi);
      auto ceval = collar.eval;
      piece.eval = [prof, ceval](double x1, double x2) {
        const double z = prof(x1);
        if (z == 0.0) return 0.0;
        return z * ceval(x1, x2);
      };
      auto csup = collar.in_support;
      piece.in_support = [csup, slo, shi](double x1, double x2) {
        if (!(x1 > slo && x1 < shi)) return false;
        return !csup || csup(x1, x2);
      };
      return piece;
    };

    ps.zeta_pieces.push_back(make_piece(false));
    ps.zeta_tilde_pieces.push_back(make_piece(true));
  }
  return ps;
}

Interval partition_cover(const Decomposition& d, int ell_lo, int ell_hi) {
  if (ell_lo < d.ell_lo || ell_hi > d.ell_hi || ell_lo > ell_hi)
    throw range_error("partition_cover: piece range outside admissible indices");
  return Interval{d.a[static_cast<std::size_t>(ell_lo - 1)] +
                      0.5 * d.sqrt_delta,
                  d.a[static_cast<std::size_t>(ell_hi)]};
}

namespace {

double d2_rho(const Curve& c, double u, double v) {
  const double dv = 1e-6 * std::max(1.0, std::abs(v));
  return (rho_gauge(c, u, v + dv) - rho_gauge(c, u, v - dv)) / (2.0 * dv);
}

}  // namespace

FactorizationCheck factorization_weight(const Curve& c, const Symbol& a_window,
                                        const GridSpec& grid) {
  const Curve curve = c;

  // The weight integrates d2_rho along the vertical segment joining each
  // support node to the graph point below it; that segment stays inside the
  // gauge cone only when the amplitude lives over the inner parameter window.
  const FreqBox bb = a_window.bbox;
  const double x1_slack = 1e-9 * c.I3.length();
  if (bb.is_everything() || bb.x1min < c.I1.lo - x1_slack ||
      bb.x1max > c.I1.hi + x1_slack) {
    throw parameter_error(
        "factorization_weight: amplitude '" + a_window.name +
        "' must be supported over I1 = [" + std::to_string(c.I1.lo) + ", " +
        std::to_string(c.I1.hi) + "]; bbox x1-range is [" +
        std::to_string(bb.x1min) + ", " + std::to_string(bb.x1max) + "]");
  }

  const GaussLegendre gl(64);

  auto g_signed = [curve, gl](double x1, double x2) {
    const double psv = curve.psi(x1);
    const double dist = x2 - psv;
    return gl.integrate(0.0, 1.0, [&](double s) {
      return d2_rho(curve, x1, psv + s * dist);
    });
  };

  FactorizationCheck out;

  // Scan supp(a) lattice nodes: establish the orientation sign, the weight
  // floor, and the identity residuals for lambda = 1/2 and 1.
  const int i_lo = grid.xi_lower_index(bb.x1min);
  const int i_hi = grid.xi_upper_index(bb.x1max);
  const int j_lo = grid.xi_lower_index(bb.x2min);
  const int j_hi = grid.xi_upper_index(bb.x2max);

  double sign = 0.0;
  double min_g = std::numeric_limits<double>::infinity();
  double worst_half = 0.0, worst_one = 0.0;
  double scale_half = 0.0, scale_one = 0.0;

  for (int i = i_lo; i < i_hi; ++i) {
    const double x1 = grid.xi_at(i);
    for (int j = j_lo; j < j_hi; ++j) {
      const double x2 = grid.xi_at(j);
      const double av = a_window.eval(x1, x2);
      if (av == 0.0) continue;
      const double g0 = g_signed(x1, x2);
      const double ag = std::abs(g0);
      if (ag < 1e-8) {
        throw degeneracy_error(
            "factorization_weight: weight magnitude " + std::to_string(ag) +
            " below 1e-8 at node (" + std::to_string(x1) + ", " +
            std::to_string(x2) + ")");
      }
      const double s = g0 > 0.0 ? 1.0 : -1.0;
      if (sign == 0.0) sign = s;
      if (s != sign) {
        throw degeneracy_error(
            "factorization_weight: weight changes sign inside supp(a) at (" +
            std::to_string(x1) + ", " + std::to_string(x2) + ")");
      }
      min_g = std::min(min_g, ag);
      const double dist = x2 - curve.psi(x1);
      const double rho = rho_gauge(curve, x1, x2);
      double x = sign * (rho - 1.0);
      // The identity forces sign agreement; excess below the gauge's own
      // noise floor on the wrong side of the curve is rounding, not signal.
      if (dist <= 0.0 && x > 0.0 && x < 1e-10) x = 0.0;
      const double dpos = std::max(dist, 0.0);
      const double xpos = std::max(x, 0.0);
      const double lhs_one = av / ag * xpos;
      const double rhs_one = av * dpos;
      worst_one = std::max(worst_one, std::abs(lhs_one - rhs_one));
      scale_one = std::max(scale_one, std::abs(rhs_one));
      const double lhs_half = av / std::sqrt(ag) * std::sqrt(xpos);
      const double rhs_half = av * std::sqrt(dpos);
      worst_half = std::max(worst_half, std::abs(lhs_half - rhs_half));
      scale_half = std::max(scale_half, std::abs(rhs_half));
    }
  }
  if (sign == 0.0) {
    throw degenerate_input_error(
        "factorization_weight: no lattice node inside supp(a)");
  }

  out.sign = sign;
  out.min_g = min_g;
  out.residual_one = scale_one > 0.0 ? worst_one / scale_one : 0.0;
  out.residual_half = scale_half > 0.0 ? worst_half / scale_half : 0.0;

  out.g.name = "g[" + c.name + "]";
  out.g.bbox = FreqBox::everything();
  out.g.eval = [g_signed, sign](double x1, double x2) {
    return sign * g_signed(x1, x2);
  };
  const Curve cc2 = c;
  out.g.in_support = [cc2](double x1, double x2) {
    return in_gauge_cone(cc2, x1, x2);
  };

  auto make_tilde = [&](double lambda, const char* tag) {
    Symbol t;
    t.name = std::string(tag) + "[" + c.name + "]";
    t.bbox = a_window.bbox;
    auto aeval = a_window.eval;
    t.eval = [aeval, g_signed, lambda](double x1, double x2) {
      const double av = aeval(x1, x2);
      if (av == 0.0) return 0.0;
      const double ag = std::abs(g_signed(x1, x2));
      if (ag < 1e-12)
        throw degeneracy_error("a~: vanishing weight inside supp(a)");
      return av / (lambda == 1.0 ? ag : std::pow(ag, lambda));
    };
    t.in_support = a_window.in_support;
    return t;
  };
  out.a_tilde_half = make_tilde(0.5, "a~half");
  out.a_tilde_one = make_tilde(1.0, "a~one");
  return out;
}

}  // namespace brlab
