#pragma once

#include <vector>

namespace brlab {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

// Closed halfplane { p : n . p <= c }.
struct Halfplane {
  Vec2 n;
  double c = 0.0;
  double signed_excess(const Vec2& p) const { return n.x * p.x + n.y * p.y - c; }
};

// Convex polygon as a CCW vertex loop. Degenerate (empty) polygons have no
// vertices. Clipping follows the classic edge-walk (Sutherland-Hodgman
// restricted to one halfplane at a time), with a small slack so that points
// within 1e-12 of a boundary count as inside.
struct ConvexPolygon {
  std::vector<Vec2> vertices;

  bool empty() const { return vertices.size() < 3; }
  double area() const;      // shoelace, >= 0 for CCW loops
  Vec2 centroid() const;    // area centroid (vertex mean for degenerate)

  // Signed distance-like margin: min over edges of the inward signed
  // distance from p (positive strictly inside). Requires a CCW loop.
  double inside_margin(const Vec2& p) const;
  bool contains(const Vec2& p, double slack = 1e-12) const {
    return !empty() && inside_margin(p) >= -slack;
  }
};

// Axis-aligned box as a polygon (CCW).
ConvexPolygon box_polygon(double x_lo, double x_hi, double y_lo, double y_hi);

// Clip `poly` against one halfplane; vertices within `slack` of the boundary
// are kept. Result is empty when nothing survives.
ConvexPolygon clip(const ConvexPolygon& poly, const Halfplane& h,
                   double slack = 1e-12);

// Clip against a list of halfplanes in order.
ConvexPolygon clip(const ConvexPolygon& poly, const std::vector<Halfplane>& hs,
                   double slack = 1e-12);

// True if the two convex polygons intersect with positive area (clipping one
// against the other's edges leaves a polygon of area > tol).
bool overlaps(const ConvexPolygon& a, const ConvexPolygon& b,
              double area_tol = 1e-15);

}  // namespace brlab
