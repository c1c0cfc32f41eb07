#include "brlab/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "brlab/errors.hpp"

namespace brlab {

namespace {

constexpr double kAnchorSlack = 1e-12;

std::vector<double> dyadic_partition(double lo, double hi, double step,
                                     const char* axis, int min_count) {
  const double span = hi - lo;
  const double count = span / step;
  const double rounded = std::round(count);
  if (std::abs(count - rounded) > 1e-9 * std::max(1.0, rounded)) {
    throw parameter_error(std::string("build_decomposition: box ") + axis +
                          "-range of length " + std::to_string(span) +
                          " is not an integer multiple of delta^{1/2}");
  }
  const int m = static_cast<int>(rounded);
  if (m < min_count) {
    throw resolution_error(std::string("build_decomposition: only ") +
                           std::to_string(m) + " intervals across the " +
                           axis + "-range; need at least " +
                           std::to_string(min_count));
  }
  std::vector<double> pts(static_cast<std::size_t>(m) + 1);
  for (int k = 0; k <= m; ++k) pts[static_cast<std::size_t>(k)] = lo + k * step;
  pts.back() = hi;
  return pts;
}

// Anchor pair (low ratio, high ratio) for the sector spanned by partition
// points a[i_lo] .. a[i_hi]; the ratio is monotone on the curve interval, so
// orientation follows its sign.
struct SectorBounds {
  double lo = 0.0, hi = 0.0;
};

SectorBounds sector_bounds(const Decomposition& d, int i_lo, int i_hi) {
  double r0 = d.ratio_at_point(i_lo);
  double r1 = d.ratio_at_point(i_hi);
  if (r0 > r1) std::swap(r0, r1);
  return {r0, r1};
}

void append_sector_halfplanes(const Decomposition& d, int i_lo, int i_hi,
                              std::vector<Halfplane>* hs) {
  const SectorBounds b = sector_bounds(d, i_lo, i_hi);
  if (d.tag.curve_case == CurveCase::B1) {
    // b.lo * xi2 <= xi1 <= b.hi * xi2, xi2 >= 0.
    hs->push_back(Halfplane{{1.0, -b.hi}, 0.0});
    hs->push_back(Halfplane{{-1.0, b.lo}, 0.0});
    hs->push_back(Halfplane{{0.0, -1.0}, 0.0});
  } else {
    // b.lo * xi1 <= xi2 <= b.hi * xi1, xi1 >= 0.
    hs->push_back(Halfplane{{-b.hi, 1.0}, 0.0});
    hs->push_back(Halfplane{{b.lo, -1.0}, 0.0});
    hs->push_back(Halfplane{{-1.0, 0.0}, 0.0});
  }
}

void append_slab_halfplanes(const Decomposition& d, int ell, long long h,
                            std::vector<Halfplane>* hs) {
  const double m = d.slab_slope(ell);
  const double lo = static_cast<double>(h) * d.delta;
  const double hi = static_cast<double>(h + 1) * d.delta;
  // lo <= xi2 - m * xi1 <= hi.
  hs->push_back(Halfplane{{m, -1.0}, -lo});
  hs->push_back(Halfplane{{-m, 1.0}, hi});
}

void check_sector_index(const Decomposition& d, int ell, int pad,
                        const char* what) {
  const int m = d.omega_count();
  if (ell < 1 + pad || ell > m - pad) {
    throw range_error(std::string(what) + ": sector index " +
                      std::to_string(ell) + " outside [" +
                      std::to_string(1 + pad) + ", " +
                      std::to_string(m - pad) + "]");
  }
}

}  // namespace

double Decomposition::ratio_at_point(int idx) const {
  return curve.ratio(a[static_cast<std::size_t>(idx)]);
}

double Decomposition::slab_slope(int ell) const {
  return curve.dpsi(a[static_cast<std::size_t>(ell - 1)]);
}

double Decomposition::slab_functional(int ell, double xi1, double xi2) const {
  return xi2 - slab_slope(ell) * xi1;
}

Decomposition build_decomposition(const Curve& c, int L) {
  if (L < 2 || L % 2 != 0) {
    throw parameter_error("build_decomposition: L must be even and >= 2, got " +
                          std::to_string(L));
  }
  const CaseTag tag = check_admissibility(c);
  if (tag.curve_case == CurveCase::B2 || tag.curve_case == CurveCase::B4) {
    throw classification_error(
        std::string("build_decomposition: case ") +
        to_string(tag.curve_case) +
        " has no direct decomposition; reduce to B1/B3 by reflection");
  }
  Decomposition d;
  d.curve = c;
  d.tag = tag;
  d.L = L;
  d.delta = std::exp2(static_cast<double>(-L));
  d.sqrt_delta = std::exp2(static_cast<double>(-L / 2));
  // The at-least-8 floor applies to the partition carrying the sectors; the
  // transverse partition only needs to tile its range.
  d.a = dyadic_partition(c.box.x1_lo, c.box.x1_hi, d.sqrt_delta, "x1", 8);
  d.bH = dyadic_partition(c.box.x2_lo, c.box.x2_hi, d.sqrt_delta, "x2", 1);

  // Admissible sector indices keep the fattened anchors a_{ell-2}..a_{ell+1}
  // inside the curve interval.
  const int m = d.omega_count();
  int lo = -1, hi = -2;
  for (int ell = 2; ell <= m - 1; ++ell) {
    const double left = d.a[static_cast<std::size_t>(ell - 2)];
    const double right = d.a[static_cast<std::size_t>(ell + 1)];
    if (left >= c.I.lo - kAnchorSlack && right <= c.I.hi + kAnchorSlack) {
      if (lo < 0) lo = ell;
      hi = ell;
    }
  }
  if (lo < 0) {
    throw resolution_error(
        "build_decomposition: no admissible sector index; curve interval "
        "shorter than four partition steps at L = " +
        std::to_string(L));
  }
  d.ell_lo = lo;
  d.ell_hi = hi;
  return d;
}

double truncation_radius(const Decomposition& d) {
  const BoxSpec& b = d.curve.box;
  double r2 = 0.0;
  for (double x : {b.x1_lo, b.x1_hi}) {
    for (double y : {b.x2_lo, b.x2_hi}) {
      r2 = std::max(r2, std::hypot(x, y));
    }
  }
  return 4.0 * r2;
}

ConvexPolygon sector_polygon(const Decomposition& d, int ell) {
  check_sector_index(d, ell, 0, "sector_polygon");
  const double r = truncation_radius(d);
  std::vector<Halfplane> hs;
  append_sector_halfplanes(d, ell - 1, ell, &hs);
  return clip(box_polygon(-r, r, -r, r), hs);
}

ConvexPolygon fat_sector_polygon(const Decomposition& d, int ell) {
  check_sector_index(d, ell, 1, "fat_sector_polygon");
  const double r = truncation_radius(d);
  std::vector<Halfplane> hs;
  append_sector_halfplanes(d, ell - 2, ell + 1, &hs);
  return clip(box_polygon(-r, r, -r, r), hs);
}

ConvexPolygon slab_polygon(const Decomposition& d, int ell, long long h) {
  check_sector_index(d, ell, 0, "slab_polygon");
  const double r = truncation_radius(d);
  std::vector<Halfplane> hs;
  append_slab_halfplanes(d, ell, h, &hs);
  return clip(box_polygon(-r, r, -r, r), hs);
}

ConvexPolygon slab_sector_polygon(const Decomposition& d, int ell,
                                  long long h) {
  check_sector_index(d, ell, 1, "slab_sector_polygon");
  const double r = truncation_radius(d);
  std::vector<Halfplane> hs;
  append_sector_halfplanes(d, ell - 2, ell + 1, &hs);
  append_slab_halfplanes(d, ell, h, &hs);
  return clip(box_polygon(-r, r, -r, r), hs);
}

ConvexPolygon cell_polygon(const Decomposition& d, int ell, int k, int j,
                           long long h) {
  check_sector_index(d, ell, 1, "cell_polygon");
  if (k < 1 || k > d.omega_count() || j < 1 || j > d.H_count()) {
    throw range_error("cell_polygon: interval index (" + std::to_string(k) +
                      ", " + std::to_string(j) + ") out of range");
  }
  const double r = truncation_radius(d);
  std::vector<Halfplane> hs;
  append_sector_halfplanes(d, ell - 2, ell + 1, &hs);
  append_slab_halfplanes(d, ell, h, &hs);
  const double ak0 = d.a[static_cast<std::size_t>(k - 1)];
  const double ak1 = d.a[static_cast<std::size_t>(k)];
  const double bj0 = d.bH[static_cast<std::size_t>(j - 1)];
  const double bj1 = d.bH[static_cast<std::size_t>(j)];
  hs.push_back(Halfplane{{-1.0, 0.0}, -ak0});
  hs.push_back(Halfplane{{1.0, 0.0}, ak1});
  hs.push_back(Halfplane{{0.0, -1.0}, -bj0});
  hs.push_back(Halfplane{{0.0, 1.0}, bj1});
  const BoxSpec& b = d.curve.box;
  if (d.tag.curve_case == CurveCase::B1) {
    hs.push_back(Halfplane{{0.0, -1.0}, -b.x2_lo});
    hs.push_back(Halfplane{{0.0, 1.0}, b.x2_hi});
  } else {
    hs.push_back(Halfplane{{-1.0, 0.0}, -b.x1_lo});
    hs.push_back(Halfplane{{1.0, 0.0}, b.x1_hi});
  }
  return clip(box_polygon(-r, r, -r, r), hs);
}

bool in_fat_sector(const Decomposition& d, int ell, double xi1, double xi2) {
  check_sector_index(d, ell, 1, "in_fat_sector");
  const SectorBounds b = sector_bounds(d, ell - 2, ell + 1);
  if (d.tag.curve_case == CurveCase::B1) {
    return xi2 >= 0.0 && b.lo * xi2 <= xi1 && xi1 <= b.hi * xi2;
  }
  return xi1 >= 0.0 && b.lo * xi1 <= xi2 && xi2 <= b.hi * xi1;
}

bool in_cell_halfopen(const Decomposition& d, int ell, int k, int j,
                      long long h, double xi1, double xi2) {
  const double ak0 = d.a[static_cast<std::size_t>(k - 1)];
  const double ak1 = d.a[static_cast<std::size_t>(k)];
  const double bj0 = d.bH[static_cast<std::size_t>(j - 1)];
  const double bj1 = d.bH[static_cast<std::size_t>(j)];
  if (!(ak0 <= xi1 && xi1 < ak1)) return false;
  if (!(bj0 <= xi2 && xi2 < bj1)) return false;
  const double f = d.slab_functional(ell, xi1, xi2);
  const double lo = static_cast<double>(h) * d.delta;
  const double hi = static_cast<double>(h + 1) * d.delta;
  if (!(lo <= f && f < hi)) return false;
  if (!in_fat_sector(d, ell, xi1, xi2)) return false;
  const BoxSpec& b = d.curve.box;
  if (d.tag.curve_case == CurveCase::B1) {
    return b.x2_lo <= xi2 && xi2 <= b.x2_hi;
  }
  return b.x1_lo <= xi1 && xi1 <= b.x1_hi;
}

}  // namespace brlab
