#pragma once

#include <array>
#include <utility>
#include <vector>

#include "brlab/field.hpp"

namespace brlab {

enum class MaximalKind { hl, strong };

// Centered maximal averages of |f| over dyadic windows on the periodic grid:
// squares of 2r+1 cells per side (hl) resp. independent per-axis radii
// (strong), r in {0, 1, 2, 4, ...} up to the full period. The r = 0 window is
// the cell itself, so Mf >= |f| everywhere.
Field hl_maximal(const Field& f);
Field strong_maximal(const Field& f);

// (M(|w|^s))^{1/s} with M of the requested kind; requires s > 1.
Field powered_maximal(const Field& w, double s, MaximalKind kind = MaximalKind::hl);

struct DirectionSet {
  std::vector<std::array<double, 2>> dirs;  // unit vectors
};
// N directions at angles pi k / N, k = 0..N-1; doubling N nests the sets.
DirectionSet dyadic_directions(int N);

// Rectangle eccentricities (full side lengths, length >= width), all dyadic
// multiples of the grid spacing.
struct RectFamily {
  std::vector<std::pair<double, double>> ecc;
};
// Tubes of the given width and every dyadic length from `width` up to the
// full period.
RectFamily dyadic_tube_family(const GridSpec& g, double width);

// Centered rotated-rectangle maximal function: max over directions and
// eccentricities of the separable chain average along/across the direction.
// Values for a given direction and eccentricity do not depend on the rest of
// the family, so enlarging either set is exactly monotone. Rectangles
// thinner than a grid cell or longer than the period raise family_error.
Field kakeya_maximal(const Field& f, const DirectionSet& dirs, const RectFamily& rects);

// Average of f over the rotated box centered at each node with half-length
// l1 along `direction` and l2 across it, built from log2(side/h) pairwise
// doubling steps with bilinear periodic sampling. Sides 2*l must be dyadic
// multiples of h (l = h/2 gives f back); l >= Lambda is clamped to the full
// period.
Field directional_box_average(const Field& f, std::array<double, 2> direction,
                              double l1, double l2);

// Half-open frequency strip [lo, hi) on one axis.
struct FreqStrip {
  double lo = 0.0, hi = 0.0;
};
// sqrt(sum_n |T_n f|^2) where T_n restricts fhat to strip n on the given
// axis (1 or 2). Strips must be pairwise non-overlapping and of equal width.
Field strip_projection_sum(const Field& f, const std::vector<FreqStrip>& strips, int axis);

struct WeightedCheck {
  double lhs = 0.0;   // int (sum_n |T_n f|^2) w
  double rhs = 0.0;   // int |f|^2 (M_strong(w^s))^{1/s}
  double ratio = 0.0;
};
WeightedCheck weighted_lp_check(const Field& f, const Field& w,
                                const std::vector<FreqStrip>& strips, int axis,
                                double s);

// Sum of indicator tubes through the origin, one per direction, of the given
// width in cells: a mass-focusing test input for kakeya_maximal.
Field focusing_example(const GridSpec& g, const DirectionSet& dirs,
                       double width_cells = 1.5);

}  // namespace brlab
