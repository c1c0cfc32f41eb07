#pragma once

#include <vector>

#include "brlab/curve.hpp"
#include "brlab/polygon.hpp"

namespace brlab {

// Frequency decomposition at width parameter delta = 2^-L (L even, so that
// delta^{-1/2} is an exact integer and all partition endpoints are exact
// dyadic doubles):
//   * partition a_0 < ... < a_M of the box x1-range with spacing delta^{1/2}
//     (intervals omega_k = [a_{k-1}, a_k], k = 1..M),
//   * partition b_0 < ... < b_MH of the box x2-range (B1/B2: [c, d];
//     B3/B4: [-d, d]) with the same spacing (intervals H_j),
//   * angular sectors Delta_ell anchored at ratio values of successive a's,
//   * tangent slabs S^ell_h of thickness delta,
//   * cells = slab x box x fattened sector x case band.
// Built for B1/B3 curves (both ratio signs); B2/B4 reduce by reflection.
struct Decomposition {
  Curve curve;
  CaseTag tag;
  int L = 0;
  double delta = 0.0;
  double sqrt_delta = 0.0;
  std::vector<double> a;   // size M+1
  std::vector<double> bH;  // size MH+1
  int ell_lo = 0, ell_hi = 0;  // inclusive range of admissible sector indices

  int omega_count() const { return static_cast<int>(a.size()) - 1; }
  int H_count() const { return static_cast<int>(bH.size()) - 1; }

  // Family index: pieces with ell = 1, 2, 3, 0 (mod 4) belong to families
  // 1..4; nu(ell) = 4*(ell - 1) + 1 is the canonical member map for family 1.
  static int family_of(int ell) {
    const int r = ell % 4;
    return r == 0 ? 4 : r;
  }
  static long long nu_of(long long ell) { return 4 * (ell - 1) + 1; }

  double ratio_at_point(int idx) const;  // ratio(a[idx])
  double slab_slope(int ell) const;      // psi'(a_{ell-1})
  // Signed tangent functional whose level sets bound the slabs:
  // F(xi) = xi2 - psi'(a_{ell-1}) * xi1.
  double slab_functional(int ell, double xi1, double xi2) const;
};

// L must be even and >= 2; requires >= 8 intervals across the box x1-range.
Decomposition build_decomposition(const Curve& c, int L);

// Truncation radius for polygon construction: sectors and slabs are clipped
// to the square max-norm ball of radius 4 * r2, where r2 is the largest
// corner modulus of the curve box.
double truncation_radius(const Decomposition& d);

// Sector Delta_ell (needs ell in [1, M]); fattened sector spans the three
// sectors ell-1, ell, ell+1. Admissible ell (stored in ell_lo..ell_hi) keep
// all anchors inside the curve interval I.
ConvexPolygon sector_polygon(const Decomposition& d, int ell);
ConvexPolygon fat_sector_polygon(const Decomposition& d, int ell);

// Slab S^ell_h clipped to the truncation square.
ConvexPolygon slab_polygon(const Decomposition& d, int ell, long long h);

// Cell P^{ell,k,j}_h = slab x (omega_k x H_j) x fat sector x case band
// (band = R x [c, d] for B1/B2, [a, b] x R for B3/B4).
ConvexPolygon cell_polygon(const Decomposition& d, int ell, int k, int j,
                           long long h);

// Slab-sector cell P^ell_h = S^ell_h intersect fat sector (no box factor).
ConvexPolygon slab_sector_polygon(const Decomposition& d, int ell, long long h);

// Half-open membership used by the exact reconstruction identity: boxes and
// slabs take [lo, hi) bounds so lattice nodes on shared edges are counted
// once; the sector and band factors (common to all (k, j, h) of one ell) stay
// closed.
bool in_cell_halfopen(const Decomposition& d, int ell, int k, int j,
                      long long h, double xi1, double xi2);

// Closed membership in the fattened sector.
bool in_fat_sector(const Decomposition& d, int ell, double xi1, double xi2);

}  // namespace brlab
