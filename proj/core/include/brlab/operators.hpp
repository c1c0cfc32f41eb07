#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "brlab/curve.hpp"
#include "brlab/decomposition.hpp"
#include "brlab/field.hpp"
#include "brlab/quadrature.hpp"
#include "brlab/symbols.hpp"

namespace brlab {

// Partial multiplier operator at level R: F^{-1}[ sym(xi / R) fhat(xi) ],
// returned in physical space. Frequencies where the rescaled symbol vanishes
// contribute nothing; an R putting the whole lattice outside the support
// yields the zero field.
Field br_partial(const Field& f, const Symbol& sym, double R);

// Pointwise max of |br_partial| over the R grid (nonnegative real field).
Field br_maximal(const Field& f, const Symbol& sym, const RGrid& rgrid);

// Square function g(f)(x) = (sum_i w_i |F^{-1}[sym(t_i xi) fhat]|^2)^{1/2}
// over the quadrature nodes. Per node the active coefficient count decides
// the route: small sets accumulate pair products at difference frequencies
// (one synthesis at the end), large sets take the per-node transform; both
// agree to rounding.
Field square_function(const Field& f, const Symbol& sym, const TimeQuadrature& quad);

// ||g(f)||_2^2 two ways. The frequency route sums |fhat|^2 against the
// per-node time energy (exact discrete Fubini, no transforms); the space
// route runs the literal per-node pipeline and integrates |g|^2.
double square_norm2_frequency_side(const Field& f, const Symbol& sym,
                                   const TimeQuadrature& quad);
double square_norm2_space_side(const Field& f, const Symbol& sym,
                               const TimeQuadrature& quad);

// Adaptive 1-D oracle for int |sym(t xi)|^2 dt/t over the full dilation
// range of the node (derived from the symbol's radial support), independent
// of any TimeQuadrature. Zero for xi = 0.
double node_time_energy(const Symbol& sym, double xi1, double xi2);

// V(f) = (sum_ell sum_i w_i |F^{-1}[piece_ell(t_i xi) fhat]|^2)^{1/2}.
Field v_function(const Field& f, const std::vector<Symbol>& pieces,
                 const TimeQuadrature& quad);

// Cone operators: window * (1 - rho(xi)/R)_+^lambda (inside) resp.
// window * (rho(xi)/R - 1)_+^lambda (outside).
Field cone_partial_inside(const Field& f, const Curve& c, const ConeWindow& w,
                          double lambda, double R);
Field cone_partial_outside(const Field& f, const Curve& c, const ConeWindow& w,
                           double lambda, double R);
Field cone_maximal(const Field& f, const Curve& c, const ConeWindow& w,
                   double lambda, const RGrid& rgrid, GaugeSide side);

// c0 = max over the window's closed slope range of rho(e) on unit vectors
// (the reciprocal of the smallest graph modulus in the sub-cone. The outside
// operator vanishes identically, at every R, when c0 * w.r_hi < 1.)
double cone_upper_gauge_constant(const Curve& c, const ConeWindow& w);

// Companion window for the subordination identity: identically 1 on the
// slope support of the default window and on the annulus radii swept by
// xi/s for s between rho(xi) and R, for every xi in the default window's
// support at any R.
ConeWindow subordination_companion_window(const Curve& c);

// Order split lambda = delta + beta with beta > 1/2, delta > -1/2:
// beta = 3/4 when lambda > 1/4, else beta = lambda + 0.3 (so delta = -0.3).
// Throws parameter_error when no admissible split exists (lambda <= 0.2).
std::pair<double, double> split_riesz_order(double lambda);  // (delta, beta)

// Reproducing identity for the inside cone operator of order delta + beta,
//   B_R f(x) = C R^{-delta-beta} int_0^R (R-s)^{beta-1} s^delta G_s(x) ds,
//   G_s = F^{-1}[ b(xi/R) bt(xi/s) (1 - rho(xi)/s)_+^delta fhat ],
// C = Gamma(delta+beta+1) / (Gamma(delta+1) Gamma(beta)), checked at an
// 8 x 8 probe sublattice. The s-integral uses exact moment weights per
// subinterval (incomplete beta segments) with midpoint samples of G, then
// repeats at doubled density; the Schwarz bound
//   |quadrature| <= C sqrt(B(2 beta - 1, 2 delta + 1)) (R^{-1} sum ds |G|^2)^{1/2}
// is evaluated at every probe.
struct SubordinationReport {
  double delta_ord = 0.0, beta = 0.0, R = 0.0;
  double C_value = 0.0;
  double residual_coarse = 0.0;  // max over probes |lhs - rhs| / scale
  double residual_fine = 0.0;    // same at doubled s density (reported value)
  double schwarz_slack = 0.0;    // min over probes (bound - |rhs|) / scale
  double lhs_scale = 0.0;        // max |B_R f| over probes
  int probes = 0, s_points = 0;
};
SubordinationReport subordination_check(const Field& f, const Curve& c,
                                        const ConeWindow& b_win,
                                        const ConeWindow& companion,
                                        double delta_ord, double beta, double R,
                                        int s_points = 512);

// Pointwise domination of the cone maximal operator of order lambda by the
// Hardy-Littlewood maximal function of the order-(lambda - beta) square
// function, with the split from split_riesz_order. `ratio` is lhs/rhs where
// rhs > 0 (zero where both vanish); a node with rhs = 0 < lhs raises
// domination_failure_error.
struct DominationReport {
  Field lhs;    // sup_R |cone partial|
  Field ratio;  // lhs / M(g)
  double sup_ratio = 0.0;
  double lhs_max = 0.0, rhs_max = 0.0;
  double delta_ord = 0.0, beta = 0.0;
};
DominationReport maximal_domination_check(const Field& f, const Curve& c,
                                          double lambda, const RGrid& rgrid,
                                          int ppo,
                                          GaugeSide side = GaugeSide::inside);

// Unit tangent / normal frame at the piece anchor a_{ell-1}.
struct PieceFrame {
  double t1 = 0.0, t2 = 0.0;  // tangent (1, psi'(a_{ell-1})) normalized
  double n1 = 0.0, n2 = 0.0;  // normal (-psi', 1) normalized
};
PieceFrame piece_frame(const Decomposition& d, int ell);

// Inverse transform of the dilated piece symbol on the given grid. Requires
// t in [1, 2] and N >= 64 delta^{-1/2} (resolution_error names the floor).
Field kernel_field(const Decomposition& d, const Curve& c, const Symbol& collar,
                   int ell, double t, const GridSpec& grid);

// Direct 2-D quadrature of the same kernel at an arbitrary point, via the
// graph parameterization of the piece support (collar coordinates), free of
// any grid. Composite Gauss panels along the graph parameter, one Gauss rule
// across the collar.
std::complex<double> kernel_probe(const Decomposition& d, const Curve& c,
                                  const BumpProfile& profile, int ell, double t,
                                  double x1, double x2);

// Probe battery along the rotated axes with envelope fits: dimensionless
// offsets X map to x = X * t delta^{-1/2} * tangent (axis 1) resp.
// X * t delta^{-1} * normal (axis 2); scale = t^{-2} delta^{3/2}.
//   c00 = max |K| / scale           over all probes,
//   c30 = max |K| |X1|^3 / scale    over tangential probes,
//   c03 = max |K| |X2|^3 / scale    over normal probes.
struct KernelProbeSample {
  double x1 = 0.0, x2 = 0.0;  // probe position
  double X1 = 0.0, X2 = 0.0;  // dimensionless rotated offsets
  std::complex<double> value;
};
struct KernelDecayReport {
  double delta = 0.0, t = 0.0;
  int ell = 0;
  double scale = 0.0;
  double c00 = 0.0, c30 = 0.0, c03 = 0.0;
  std::vector<KernelProbeSample> samples;
};
KernelDecayReport kernel_decay_check(const Decomposition& d, const Curve& c,
                                     const BumpProfile& profile, int ell,
                                     double t);

// sup over 16 geometric t-samples in [2^n, 2^{n+1}] of |piece_t f| against
// the weighted sum over nu of rotated-box averages of |f| with half-lengths
// 2^nu 2^n delta^{-1/2} (tangential) and 2^nu 2^n delta^{-1} (normal),
// weights 2^{-nu}. fitted_C = max over nodes lhs/rhs.
struct BoxDominationReport {
  Field lhs;
  Field rhs;
  double fitted_C = 0.0;
};
BoxDominationReport box_average_domination(const Field& f, const Decomposition& d,
                                           const Curve& c, const Symbol& collar,
                                           int ell, int n, int nu_max = 8);

// (|| (sum |br_partial(f_l, R_l)|^2)^{1/2} ||_p, || (sum |f_l|^2)^{1/2} ||_p).
// Requires matching list lengths and p in [4/3, 4].
std::pair<double, double> vector_valued_norms(const std::vector<Field>& fs,
                                              const Symbol& sym,
                                              const std::vector<double>& Rs,
                                              double p);

}  // namespace brlab
