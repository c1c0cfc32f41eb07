#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "brlab/curve.hpp"
#include "brlab/decomposition.hpp"
#include "brlab/grid.hpp"

namespace brlab {

// 1-D smooth profiles. The bump is exp(1 - 1/(1 - s^2)) rescaled to the
// requested support; the step is f(s)/(f(s) + f(1-s)) with f(s) = e^{-1/s},
// exactly 0 below edge0 and exactly 1 above edge1.
std::function<double(double)> smooth_bump(double center, double radius);
std::function<double(double)> smooth_step(double edge0, double edge1);

// Smooth window: exactly 1 on [lo + margin, hi - margin], supported in
// (lo, hi). Requires 0 < margin <= (hi - lo) / 2.
std::function<double(double)> window_1d(double lo, double hi, double margin);

// Radial collar profile Phi with supp(Phi) contained in [0, c_star]. When
// normalized, Phi is scaled so the measured maxima of |Phi^(m)| for m = 0..3
// are all <= 1 (the certificate stores them).
struct BumpProfile {
  std::function<double(double)> Phi;
  double c_star = 0.125;
  std::array<double, 4> derivative_certificate{};  // max |Phi^(m)|, m = 0..3
  bool normalized = false;
};
BumpProfile collar_profile(double c_star = 0.125, bool normalized = true);

// An evaluable real frequency symbol with a declared support: bbox is a
// bounding box of the support, in_support a pointwise membership superset of
// {eval != 0}.
struct Symbol {
  std::string name;
  std::function<double(double, double)> eval;
  FreqBox bbox = FreqBox::everything();
  std::function<bool(double, double)> in_support;

  double operator()(double xi1, double xi2) const { return eval(xi1, xi2); }
  bool supported_at(double xi1, double xi2) const {
    return in_support ? in_support(xi1, xi2) : true;
  }
};

// Symbol evaluating s(t * xi); support scales by 1/t.
Symbol dilate_symbol(const Symbol& s, double t);

// Canonical smooth windows attached to a curve. The slope coordinate is
// xi1/xi2 for band cases (B1/B2) and xi2/xi1 for steep cases (B3/B4), so in
// every case it equals the curve's ratio function on rays through the graph.
//
// standard_amplitude: the a-window of the distance-power symbols; confines
// the graph parameter to the innermost window I1, the transverse coordinate
// to the curve box, and the slope to the ratio range over I1, so the support
// sits strictly inside the gauge cone.
Symbol standard_amplitude(const Curve& c);
// collar_window: the b-window of the collar symbol; graph parameter in I2,
// transverse coordinate within the box with a margin. Vanishes near the
// origin because every case's box is separated from it.
Symbol collar_window(const Curve& c);

// The collar multiplier b(xi) * Phi(delta^{-1} (xi2 - psi(xi1))). Requires
// delta = 2^{-L} with L even and >= 2.
Symbol collar_symbol(const Curve& c, const BumpProfile& profile, double delta);

enum class DistanceSide { above, below };

// window(xi) * phi_{lambda,theta}(r) with r the signed distance
// +-(xi2 - psi(xi1)) and phi_{lambda,theta}(r) = r^lambda log(2 + 1/r)^{-theta}
// for r > 0, 0 otherwise. Requires lambda > -1/2, or lambda = -1/2 with a
// nonzero theta.
Symbol distance_power_symbol(const Curve& c, const Symbol& window,
                             double lambda, double theta = 0.0,
                             DistanceSide side = DistanceSide::above);

// Window confined to a sub-cone and annulus on which the gauge is defined:
// slope window is 1 on [slope_lo + slope_margin, slope_hi - slope_margin];
// the radial profile is 1 on [r_flat_lo, r_flat_hi] and supported in
// (r_lo, r_hi).
struct ConeWindow {
  double slope_lo = 0.0, slope_hi = 0.0, slope_margin = 0.0;
  double r_lo = 0.0, r_flat_lo = 0.0, r_flat_hi = 0.0, r_hi = 0.0;
};
// Default: slope range = ratio over I2 (flat part covering the ratio range
// over I1), radii bracketing the moduli of the graph over I3 with factor-2
// flat headroom on both sides.
ConeWindow default_cone_window(const Curve& c);
// The window as a Symbol; throws support_error if the slope support is not
// strictly inside the ratio range over I3 (where the gauge exists).
Symbol cone_window_symbol(const Curve& c, const ConeWindow& w);

enum class GaugeSide { inside, outside };

// b~(xi) * (1 - rho(xi))_+^expo (inside) or b~(xi) * (rho(xi) - 1)_+^expo
// (outside). Requires expo > -1/2.
Symbol gauge_power_symbol(const Curve& c, const ConeWindow& w, double expo,
                          GaugeSide side);

// Smooth partition subordinate to the parameter intervals: zeta_ell supported
// in the open interval omega_ell, zeta~_ell in omega_ell shifted by
// delta^{1/2}/2, and sum_ell (zeta_ell + zeta~_ell) = 1 exactly on the cover
// interval. Piece symbols multiply the collar by the 1-D profile in xi1.
struct PieceSet {
  int ell_lo = 0, ell_hi = 0;
  std::vector<Symbol> zeta_pieces;        // index 0 <-> ell_lo
  std::vector<Symbol> zeta_tilde_pieces;  // index 0 <-> ell_lo
  std::function<double(double)> zeta_profile(int ell) const;
  std::function<double(double)> zeta_tilde_profile(int ell) const;
  const Symbol& zeta_piece(int ell) const;
  const Symbol& zeta_tilde_piece(int ell) const;
  // Piece indices of family 1..4 (residues 1, 2, 3, 0 mod 4) within
  // [ell_lo, ell_hi].
  std::vector<int> family(int which) const;

  double a0 = 0.0, sqrt_delta = 0.0;  // partition frame (internal)
};
PieceSet partition_pieces(const Decomposition& d, const Symbol& collar,
                          double delta);
// Interval on which the restricted partition sums to 1 exactly.
Interval partition_cover(const Decomposition& d, int ell_lo, int ell_hi);

// Weight linking the distance power to the gauge power: the vertical-segment
// integral g0(xi) = int_0^1 d2_rho(xi1, s (xi2 - psi(xi1)) + psi(xi1)) ds
// satisfies rho(xi) - 1 = g0(xi) (xi2 - psi(xi1)) identically. g is |g0|,
// sign records the orientation (negative when the gauge decreases upward),
// and a/g^lambda makes window * gauge-power reproduce window * distance-power.
// Residuals are max |lhs - rhs| over supp(a) lattice nodes, relative to the
// largest |rhs| attained.
struct FactorizationCheck {
  Symbol g;
  double sign = 1.0;
  Symbol a_tilde_half;  // a / g^{1/2}
  Symbol a_tilde_one;   // a / g
  double residual_half = 0.0;
  double residual_one = 0.0;
  double min_g = 0.0;
};
FactorizationCheck factorization_weight(const Curve& c, const Symbol& a_window,
                                        const GridSpec& grid);

}  // namespace brlab
