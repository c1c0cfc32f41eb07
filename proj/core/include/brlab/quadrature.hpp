#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "brlab/field.hpp"
#include "brlab/symbols.hpp"

namespace brlab {

// Log-trapezoid quadrature for integrals against dt/t over [t_min, t_max].
//
// Breakpoints are the octave-aligned points 2^(m / ppo) falling strictly
// inside the band, plus the two exact endpoints. Every subinterval therefore
// lies inside a single octave (2^n, 2^(n+1)], so restricting to a union of
// dyadic octaves keeps or drops whole subintervals: the filtered weights of
// the residue classes k = 0..L-1 partition the unfiltered weights exactly.
//
// Each node carries the half-lengths (in log t) of its two flanking
// subintervals; weight(i) is their sum, with halves whose octave falls
// outside the active residue class suppressed.
struct TimeQuadrature {
  double t_min = 0.0, t_max = 0.0;
  int ppo = 32;
  std::vector<double> t;        // nodes, strictly increasing
  std::vector<double> lhalf;    // log-length/2 of the subinterval left of node i (0 for i = 0)
  std::vector<double> rhalf;    // log-length/2 of the subinterval right of node i (0 for the last)
  std::vector<int> loct;        // octave of the left subinterval (unused when lhalf = 0)
  std::vector<int> roct;        // octave of the right subinterval
  std::optional<std::pair<int, int>> residue;  // (L, k): keep octaves n with n mod L == k

  std::size_t size() const { return t.size(); }
  double weight(std::size_t i) const;
  double total_weight() const;  // compensated sum of weight(i)
  TimeQuadrature with_residue(int L, int k) const;
  TimeQuadrature refined() const;  // same band, doubled ppo, same residue
};

// Requires 0 < t_min < t_max and ppo >= 1; throws quadrature_error on an
// empty band and parameter_error otherwise.
TimeQuadrature make_time_quadrature(double t_min, double t_max, int ppo);

// Points-per-octave needed so that consecutive nodes change t by at most a
// quarter of the relative collar thickness c_star * delta; never below base.
int collar_ppo(double delta, double c_star = 0.125, int base = 32);

// Closed dilation band: t outside [lo, hi] guarantees sym(t xi) * fhat(xi)
// vanishes identically on the lattice.
struct Band {
  double lo = 0.0, hi = 0.0;
  bool empty() const { return !(lo < hi); }
};

// Annulus radii {min |xi|, max |xi|} over a finite frequency box.
std::pair<double, double> radial_support(const FreqBox& box);

// Band from the symbol's radial support divided by the radial extent of the
// nonzero spectrum of f (f must be in frequency space). Throws
// quadrature_error if f vanishes identically and parameter_error if the
// symbol's box is unbounded or touches the origin.
Band time_band(const Symbol& sym, const Field& f);

// Geometric grid R_j = R_min * q^j, j = 0..J.
struct RGrid {
  std::vector<double> R;
  double q = 2.0;
  // Inserts the geometric midpoint of each consecutive pair; original values
  // are preserved bitwise, so maxima over the refined grid dominate maxima
  // over the original one exactly.
  RGrid refined() const;
};
RGrid make_r_grid(double R_min, double q, int J);

}  // namespace brlab
