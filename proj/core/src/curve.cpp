#include "brlab/curve.hpp"

#include <cmath>
#include <cstdio>

#include "brlab/numerics.hpp"

namespace brlab {

const char* to_string(CurveCase c) {
  switch (c) {
    case CurveCase::B1: return "B1";
    case CurveCase::B2: return "B2";
    case CurveCase::B3: return "B3";
    case CurveCase::B4: return "B4";
  }
  return "?";
}

namespace {

bool uses_psi_over_t(CurveCase c) {
  return c == CurveCase::B3 || c == CurveCase::B4;
}

[[noreturn]] void fail_at(const char* what, const std::string& curve, double t) {
  char buf[192];
  std::snprintf(buf, sizeof(buf), "%s (curve '%s' at t = %.17g)", what,
                curve.c_str(), t);
  throw admissibility_error(buf);
}

}  // namespace

double Curve::ratio(double t) const {
  if (uses_psi_over_t(declared_case)) {
    if (t == 0.0) throw range_error("ratio: PsiStar undefined at t = 0");
    return psi(t) / t;
  }
  const double p = psi(t);
  if (p == 0.0) throw range_error("ratio: Psi undefined where psi vanishes");
  return t / p;
}

double Curve::dratio(double t) const {
  if (uses_psi_over_t(declared_case)) {
    if (t == 0.0) throw range_error("dratio: PsiStar undefined at t = 0");
    return (t * dpsi(t) - psi(t)) / (t * t);
  }
  const double p = psi(t);
  if (p == 0.0) throw range_error("dratio: Psi undefined where psi vanishes");
  return (p - t * dpsi(t)) / (p * p);
}

CaseTag check_admissibility(const Curve& c, int samples) {
  if (samples < 3) throw parameter_error("check_admissibility: samples < 3");
  if (!(c.I.lo < c.I.hi))
    throw classification_error("check_admissibility: empty interval I");
  // Window nesting I1 c I2 c I3 c I, all strictly inside the box x1-range.
  if (!(c.I1.strictly_inside(c.I2) && c.I2.strictly_inside(c.I3)))
    throw classification_error("check_admissibility: windows not strictly nested");
  if (!(c.I3.lo >= c.I.lo && c.I3.hi <= c.I.hi))
    throw classification_error("check_admissibility: I3 not inside I");
  if (!(c.box.x1_lo < c.I.lo && c.I.hi < c.box.x1_hi))
    throw classification_error("check_admissibility: I not strictly inside box x1-range");

  switch (c.declared_case) {
    case CurveCase::B1:
      if (!(c.box.x2_lo > 0.0))
        throw classification_error("B1 box must satisfy c > 0 (graph above axis)");
      break;
    case CurveCase::B2:
      if (!(c.box.x2_hi < 0.0))
        throw classification_error("B2 box must lie below the xi1-axis");
      break;
    case CurveCase::B3:
      if (!(c.box.x1_lo > 0.0))
        throw classification_error("B3 box must satisfy 0 < a (graph right of axis)");
      break;
    case CurveCase::B4:
      if (!(c.box.x1_hi < 0.0))
        throw classification_error("B4 box must lie left of the xi2-axis");
      break;
  }

  int sign = 0;
  for (int k = 0; k < samples; ++k) {
    const double t =
        c.I.lo + (c.I.hi - c.I.lo) * static_cast<double>(k) / (samples - 1);
    const double p = c.psi(t);
    const double dp = c.dpsi(t);
    if (!std::isfinite(p) || !std::isfinite(dp) || !std::isfinite(c.ddpsi(t)))
      fail_at("check_admissibility: psi or derivative non-finite", c.name, t);
    if (std::abs(p - t * dp) < 1e-12)
      fail_at("check_admissibility: psi(t) - t psi'(t) vanishes", c.name, t);
    if (!(p > c.box.x2_lo && p < c.box.x2_hi))
      fail_at("check_admissibility: graph leaves declared box", c.name, t);
    if (uses_psi_over_t(c.declared_case) && t == 0.0)
      fail_at("check_admissibility: I crosses t = 0 in a B3/B4 case", c.name, t);
    const double dr = c.dratio(t);
    if (std::abs(dr) < 1e-12)
      fail_at("check_admissibility: ratio map not strictly monotone", c.name, t);
    const int s = dr > 0.0 ? 1 : -1;
    if (sign == 0) sign = s;
    if (s != sign)
      fail_at("check_admissibility: ratio derivative changes sign", c.name, t);
  }
  return CaseTag{c.declared_case, sign};
}

void require_curvature(const Curve& c, double threshold, int samples) {
  for (int k = 0; k < samples; ++k) {
    const double t =
        c.I.lo + (c.I.hi - c.I.lo) * static_cast<double>(k) / (samples - 1);
    if (std::abs(c.ddpsi(t)) < threshold)
      fail_at("require_curvature: psi'' vanishes", c.name, t);
  }
}

double psi_inverse(const Curve& c, double s) {
  const double r_lo = c.ratio(c.I3.lo);
  const double r_hi = c.ratio(c.I3.hi);
  const double lo = std::min(r_lo, r_hi), hi = std::max(r_lo, r_hi);
  const double slack = 1e-12 * (hi - lo);
  if (s < lo - slack || s > hi + slack) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "psi_inverse: %.17g outside ratio range [%.17g, %.17g]", s, lo,
                  hi);
    throw range_error(buf);
  }
  const double sc = std::min(std::max(s, lo), hi);
  if (sc == r_lo) return c.I3.lo;
  if (sc == r_hi) return c.I3.hi;
  // Near machine precision: the gauge gets finite-differenced with step
  // ~1e-6, so inverse noise must stay far below the difference scale.
  return bisect_monotone([&c](double t) { return c.ratio(t); }, c.I3.lo, c.I3.hi,
                         sc, 1e-15);
}

std::array<double, 2> gauge_cone_bounds(const Curve& c) {
  const double r_lo = c.ratio(c.I3.lo);
  const double r_hi = c.ratio(c.I3.hi);
  return {std::min(r_lo, r_hi), std::max(r_lo, r_hi)};
}

bool in_gauge_cone(const Curve& c, double u, double v) {
  const auto b = gauge_cone_bounds(c);
  switch (c.declared_case) {
    case CurveCase::B1:
      return v > 0.0 && u / v > b[0] && u / v < b[1];
    case CurveCase::B2:
      return v < 0.0 && u / v > b[0] && u / v < b[1];
    case CurveCase::B3:
      return u > 0.0 && v / u > b[0] && v / u < b[1];
    case CurveCase::B4:
      return u < 0.0 && v / u > b[0] && v / u < b[1];
  }
  return false;
}

double rho_gauge(const Curve& c, double u, double v) {
  const auto b = gauge_cone_bounds(c);
  char buf[160];
  switch (c.declared_case) {
    case CurveCase::B1: {
      if (!(v > 0.0) || u < b[0] * v || u > b[1] * v) {
        std::snprintf(buf, sizeof(buf),
                      "rho_gauge: (%.17g, %.17g) outside gauge cone of '%s'", u,
                      v, c.name.c_str());
        throw cone_domain_error(buf);
      }
      // rho = u / PsiInv(u/v) rewritten as v / psi(PsiInv(u/v)); the second
      // form stays well conditioned when u/t is 0/0 near the axis ray.
      const double that = psi_inverse(c, u / v);
      return v / c.psi(that);
    }
    case CurveCase::B3: {
      if (!(u > 0.0) || v < b[0] * u || v > b[1] * u) {
        std::snprintf(buf, sizeof(buf),
                      "rho_gauge: (%.17g, %.17g) outside gauge cone of '%s'", u,
                      v, c.name.c_str());
        throw cone_domain_error(buf);
      }
      const double that = psi_inverse(c, v / u);
      return u / that;
    }
    default:
      throw cone_domain_error(
          "rho_gauge: gauge defined for B1/B3 cases; reduce B2/B4 by reflection");
  }
}

namespace {

Interval windows_from(Interval I, double frac) {
  const double m = frac * I.length();
  return {I.lo + m, I.hi - m};
}

Curve build(const std::string& name, std::function<double(double)> psi,
            std::function<double(double)> dpsi,
            std::function<double(double)> ddpsi, Interval I, BoxSpec box,
            CurveCase cc) {
  Curve c;
  c.name = name;
  c.psi = std::move(psi);
  c.dpsi = std::move(dpsi);
  c.ddpsi = std::move(ddpsi);
  c.I = I;
  c.I1 = windows_from(I, 0.10);
  c.I2 = windows_from(I, 0.05);
  c.I3 = windows_from(I, 0.02);
  c.box = box;
  c.declared_case = cc;
  return c;
}

}  // namespace

Curve curve_preset(const std::string& name) {
  if (name == "parabola-b1") {
    return build(
        name, [](double t) { return 1.0 + t * t; }, [](double t) { return 2.0 * t; },
        [](double) { return 2.0; }, Interval{-0.5, 0.5},
        BoxSpec{-1.0, 1.0, 0.25, 1.5}, CurveCase::B1);
  }
  if (name == "parabola-b1-neg") {
    return build(
        name, [](double t) { return t * t; }, [](double t) { return 2.0 * t; },
        [](double) { return 2.0; }, Interval{1.0, 1.5},
        BoxSpec{-2.0, 2.0, 0.25, 2.75}, CurveCase::B1);
  }
  if (name == "cubic-flat") {
    return build(
        name, [](double t) { return 1.0 + t * t * t; },
        [](double t) { return 3.0 * t * t; }, [](double t) { return 6.0 * t; },
        Interval{-0.5, 0.5}, BoxSpec{-1.0, 1.0, 0.25, 1.5}, CurveCase::B1);
  }
  if (name == "power-b3") {
    return build(
        name, [](double t) { return t * t; }, [](double t) { return 2.0 * t; },
        [](double) { return 2.0; }, Interval{1.0, 2.0},
        BoxSpec{0.25, 2.25, -4.5, 4.5}, CurveCase::B3);
  }
  if (name == "parabola-b2") {
    return build(
        name, [](double t) { return -(1.0 + t * t); },
        [](double t) { return -2.0 * t; }, [](double) { return -2.0; },
        Interval{-0.5, 0.5}, BoxSpec{-1.0, 1.0, -1.5, -0.25}, CurveCase::B2);
  }
  if (name == "power-b4") {
    return build(
        name, [](double t) { return t * t; }, [](double t) { return 2.0 * t; },
        [](double) { return 2.0; }, Interval{-2.0, -1.0},
        BoxSpec{-2.25, -0.25, -4.5, 4.5}, CurveCase::B4);
  }
  throw parameter_error("curve_preset: unknown preset '" + name + "'");
}

std::vector<std::string> curve_preset_names() {
  return {"parabola-b1", "parabola-b1-neg", "cubic-flat",
          "power-b3",    "parabola-b2",     "power-b4"};
}

Curve make_polynomial_curve(const std::string& name,
                            const std::vector<double>& coeffs, Interval I,
                            BoxSpec box, CurveCase declared_case) {
  if (coeffs.empty())
    throw parameter_error("make_polynomial_curve: empty coefficient list");
  auto horner = [](const std::vector<double>& cs, double t) {
    double v = 0.0;
    for (std::size_t k = cs.size(); k-- > 0;) v = v * t + cs[k];
    return v;
  };
  std::vector<double> d1, d2;
  for (std::size_t k = 1; k < coeffs.size(); ++k)
    d1.push_back(coeffs[k] * static_cast<double>(k));
  for (std::size_t k = 1; k < d1.size(); ++k)
    d2.push_back(d1[k] * static_cast<double>(k));
  if (d1.empty()) d1.push_back(0.0);
  if (d2.empty()) d2.push_back(0.0);
  return build(
      name, [coeffs, horner](double t) { return horner(coeffs, t); },
      [d1, horner](double t) { return horner(d1, t); },
      [d2, horner](double t) { return horner(d2, t); }, I, box, declared_case);
}

}  // namespace brlab
