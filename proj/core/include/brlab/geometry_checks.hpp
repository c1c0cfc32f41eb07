#pragma once

#include <array>

#include "brlab/curve.hpp"
#include "brlab/decomposition.hpp"
#include "brlab/grid.hpp"
#include "brlab/symbols.hpp"

namespace brlab {

// Containment of one partition piece inside its fat sector, checked by
// sampling the collar parametrically and testing point-in-polygon.
struct SupportContainmentReport {
  int ell = 0;
  double worst_margin = 0.0;
  std::array<double, 2> worst_point{};
  int samples = 0;
  int violations = 0;
};

SupportContainmentReport verify_support_containment(const Decomposition& d,
                                                    const Curve& c,
                                                    const Symbol& collar,
                                                    int ell,
                                                    bool enforce = true);

// Active-index cardinalities for a dilated piece: distinct slab indices
// (card_F), distinct partition boxes (card_G), plus the lattice residual of
// the cell-indicator reconstruction identity.
struct ActiveIndexReport {
  int ell = 0;
  double t = 1.0;
  int card_F = 0;
  int card_G = 0;
  double reconstruction_residual = 0.0;
};

ActiveIndexReport count_active_indices(const Decomposition& d, const Curve& c,
                                       const Symbol& collar, int ell, double t,
                                       const GridSpec& grid);

// Number of fat sectors meeting the partition box with indices (k, j).
int sector_count(const Decomposition& d, int k, int j);

// Logarithmic measure of the dilation window in which the scaled two-index
// cell meets the collar support, estimated from log-uniform t samples over
// the octave [2^n, 2^{n+1}].
double collar_time_measure(const Decomposition& d, const Curve& c,
                           const Symbol& collar, int n, int ell, int h,
                           int t_samples = 4096);

// Ray-geometry constants measured for one curve at one collar width:
//  - b1_fit:   worst |1 - ray scale| / delta over two-sided collar points;
//  - min_dratio: strict-monotonicity certificate for the ratio on I3;
//  - dilate_min_distance: sampled distance between the 1.01 and 0.99 dilates;
//  - d_fit:    worst |scale/tau - 1| / delta over boundary samples of cells
//              meeting a tau-dilated collar, tau on a 16-point grid in [1/2,1];
//  - max_cell_area: largest probed four-index cell area.
struct RayLemmaReport {
  double delta = 0.0;
  double b1_fit = 0.0;
  double min_dratio = 0.0;
  double dilate_min_distance = 0.0;
  double d_fit = 0.0;
  double max_cell_area = 0.0;
};

RayLemmaReport verify_ray_lemmas(const Curve& c, double delta);

// Scale of the ray through p hitting the curve: the unique s with p on the
// s-dilated graph, found by inverting the ratio along p's direction.
double ray_scale(const Curve& c, double x1, double x2);

}  // namespace brlab
