#include "brlab/polygon.hpp"

#include <cmath>

namespace brlab {

double ConvexPolygon::area() const {
  if (empty()) return 0.0;
  double s = 0.0;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = vertices[i];
    const Vec2& q = vertices[(i + 1) % n];
    s += p.x * q.y - q.x * p.y;
  }
  return 0.5 * s;
}

Vec2 ConvexPolygon::centroid() const {
  const std::size_t n = vertices.size();
  if (n == 0) return {0.0, 0.0};
  const double A = area();
  if (std::abs(A) < 1e-300) {
    Vec2 m{0.0, 0.0};
    for (const Vec2& v : vertices) {
      m.x += v.x;
      m.y += v.y;
    }
    m.x /= static_cast<double>(n);
    m.y /= static_cast<double>(n);
    return m;
  }
  double cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = vertices[i];
    const Vec2& q = vertices[(i + 1) % n];
    const double cross = p.x * q.y - q.x * p.y;
    cx += (p.x + q.x) * cross;
    cy += (p.y + q.y) * cross;
  }
  return {cx / (6.0 * A), cy / (6.0 * A)};
}

double ConvexPolygon::inside_margin(const Vec2& p) const {
  if (empty()) return -1e300;
  double margin = 1e300;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = vertices[i];
    const Vec2& b = vertices[(i + 1) % n];
    const double ex = b.x - a.x, ey = b.y - a.y;
    const double len = std::hypot(ex, ey);
    if (len < 1e-300) continue;
    // Inward normal of a CCW edge is (-ey, ex)/len.
    const double d = (-(ey) * (p.x - a.x) + ex * (p.y - a.y)) / len;
    margin = std::min(margin, d);
  }
  return margin;
}

ConvexPolygon box_polygon(double x_lo, double x_hi, double y_lo, double y_hi) {
  ConvexPolygon p;
  p.vertices = {{x_lo, y_lo}, {x_hi, y_lo}, {x_hi, y_hi}, {x_lo, y_hi}};
  return p;
}

ConvexPolygon clip(const ConvexPolygon& poly, const Halfplane& h, double slack) {
  ConvexPolygon out;
  const std::size_t n = poly.vertices.size();
  if (n == 0) return out;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& cur = poly.vertices[i];
    const Vec2& nxt = poly.vertices[(i + 1) % n];
    const double dc = h.signed_excess(cur);
    const double dn = h.signed_excess(nxt);
    const bool cin = dc <= slack;
    const bool nin = dn <= slack;
    if (cin) out.vertices.push_back(cur);
    if (cin != nin) {
      const double denom = dc - dn;
      if (std::abs(denom) > 1e-300) {
        const double t = dc / denom;
        out.vertices.push_back(
            {cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
      }
    }
  }
  // A point- or edge-contact intersection survives the slack as a cluster of
  // nearly coincident vertices whose edge normals are pure roundoff; anything
  // without genuine area is empty for every downstream use.
  if (out.vertices.size() < 3 || std::abs(out.area()) < 1e-20)
    out.vertices.clear();
  return out;
}

ConvexPolygon clip(const ConvexPolygon& poly, const std::vector<Halfplane>& hs,
                   double slack) {
  ConvexPolygon p = poly;
  for (const Halfplane& h : hs) {
    p = clip(p, h, slack);
    if (p.empty()) break;
  }
  return p;
}

bool overlaps(const ConvexPolygon& a, const ConvexPolygon& b, double area_tol) {
  if (a.empty() || b.empty()) return false;
  ConvexPolygon p = a;
  const std::size_t n = b.vertices.size();
  for (std::size_t i = 0; i < n && !p.empty(); ++i) {
    const Vec2& u = b.vertices[i];
    const Vec2& v = b.vertices[(i + 1) % n];
    // CCW edge u->v: interior satisfies cross(v-u, p-u) >= 0, i.e.
    // (v.y-u.y) x - (v.x-u.x) y <= (v.y-u.y) u.x - (v.x-u.x) u.y.
    Halfplane h;
    h.n = {v.y - u.y, -(v.x - u.x)};
    h.c = h.n.x * u.x + h.n.y * u.y;
    p = clip(p, h);
  }
  return !p.empty() && p.area() > area_tol;
}

}  // namespace brlab
