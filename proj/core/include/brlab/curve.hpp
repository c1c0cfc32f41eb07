#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "brlab/errors.hpp"

namespace brlab {

// Box classification of the curve graph:
//   B1: graph in (-b, b) x (c, d) with c > 0 (above the xi1-axis)
//   B2: graph in (-b, b) x (-d, -c)        (below the xi1-axis)
//   B3: graph in (a, b) x (-d, d), 0 < a   (right of the xi2-axis)
//   B4: graph in (-b, -a) x (-d, d)        (left of the xi2-axis)
enum class CurveCase { B1, B2, B3, B4 };

const char* to_string(CurveCase c);

struct CaseTag {
  CurveCase curve_case;
  int ratio_sign;  // sign of Psi' (B1/B2) resp. PsiStar' (B3/B4) on I
};

struct Interval {
  double lo, hi;
  double length() const { return hi - lo; }
  bool contains(double t) const { return t >= lo && t <= hi; }
  bool strictly_inside(const Interval& outer) const {
    return outer.lo < lo && hi < outer.hi;
  }
};

struct BoxSpec {
  double x1_lo, x1_hi, x2_lo, x2_hi;
};

// A smooth curve graph xi2 = psi(xi1) over the parameter interval I, with
// nested inner windows I1 c I2 c I3 c I used to place symbol supports
// strictly inside the admissible ranges. Derivatives are supplied
// analytically and spot-checked against finite differences.
struct Curve {
  std::string name;
  std::function<double(double)> psi, dpsi, ddpsi;
  Interval I;
  Interval I1, I2, I3;  // I1 innermost
  BoxSpec box;
  CurveCase declared_case;

  // Ratio map for the declared case: Psi(t) = t/psi(t) for B1/B2,
  // PsiStar(t) = psi(t)/t for B3/B4; and its analytic derivative.
  double ratio(double t) const;
  double dratio(double t) const;
};

// Validates the admissibility hypotheses on a uniform sample of I (plus
// endpoints): psi(t) - t*psi'(t) bounded away from zero, graph strictly
// inside the declared box, box consistent with the declared case, windows
// nested, ratio map strictly monotone with constant sign. Returns the case
// tag with the measured ratio sign. Throws admissibility_error or
// classification_error naming the offending sample.
CaseTag check_admissibility(const Curve& c, int samples = 10001);

// Requires min |psi''| >= threshold on I; throws admissibility_error naming
// the offending t otherwise.
void require_curvature(const Curve& c, double threshold = 1e-9,
                       int samples = 10001);

inline std::array<double, 2> gamma_point(const Curve& c, double t) {
  return {t, c.psi(t)};
}
inline double tangent_slope(const Curve& c, double t) { return c.dpsi(t); }

// Inverse of the ratio map on I3. `s` must lie in ratio(I3) (inclusive);
// bisection on the monotone ratio, driven to near machine precision so that
// downstream finite differences of the gauge stay clean.
double psi_inverse(const Curve& c, double s);

// Curve-adapted gauge, homogeneous of degree 1, equal to 1 exactly on the
// graph. For B1/B2-type ratio maps:
//     rho(u, v) = v / psi(PsiInv(u / v)),   defined on the open cone
//     C = { a1'' v < u < a2'' v, v > 0 } spanned by rays through the graph
//     over I3 (bounds ordered by the ratio sign).
// For B3/B4:
//     rho(u, v) = u / PsiStarInv(v / u) on the corresponding cone over
//     { xi1 > 0 } (resp. { xi1 < 0 }).
// Throws cone_domain_error outside the closed cone.
double rho_gauge(const Curve& c, double u, double v);

// Cone slope bounds for rho's domain: for B1/B2 the admissible u/v range,
// for B3/B4 the admissible v/u range (lo < hi).
std::array<double, 2> gauge_cone_bounds(const Curve& c);

// True if (u, v) lies in the open gauge cone.
bool in_gauge_cone(const Curve& c, double u, double v);

// Named presets (see tools/ docs): parabola-b1, parabola-b1-neg, cubic-flat,
// power-b3, parabola-b2, power-b4.
Curve curve_preset(const std::string& name);
std::vector<std::string> curve_preset_names();

// Polynomial curve psi(t) = sum coeffs[k] t^k over I with an explicitly
// supplied box and case; windows are derived from I with the standard
// (10%, 5%, 2%) end margins.
Curve make_polynomial_curve(const std::string& name,
                            const std::vector<double>& coeffs, Interval I,
                            BoxSpec box, CurveCase declared_case);

}  // namespace brlab
