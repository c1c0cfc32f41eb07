#include "brlab/geometry_checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "brlab/errors.hpp"

namespace brlab {

namespace {

// Half-open partition index: k with pts[k-1] <= x < pts[k], or 0 when x is
// outside the partition range.
int partition_index(const std::vector<double>& pts, double x) {
  const double step = pts[1] - pts[0];
  const long long k = static_cast<long long>(std::floor((x - pts.front()) / step)) + 1;
  if (k < 1 || k >= static_cast<long long>(pts.size())) return 0;
  return static_cast<int>(k);
}

long long slab_index(const Decomposition& d, int ell, double x1, double x2) {
  return static_cast<long long>(
      std::floor(d.slab_functional(ell, x1, x2) / d.delta));
}

void check_admissible(const Decomposition& d, int ell, const char* who) {
  if (ell < d.ell_lo || ell > d.ell_hi) {
    throw range_error(std::string(who) + ": sector index " +
                      std::to_string(ell) + " outside admissible range [" +
                      std::to_string(d.ell_lo) + ", " +
                      std::to_string(d.ell_hi) + "]");
  }
}

std::vector<Vec2> collar_param_samples(const Curve& c, double delta, int nu,
                                       int nv, double v_hi) {
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(nu) * nv);
  for (int i = 0; i < nu; ++i) {
    const double u = c.I2.lo + c.I2.length() * (i + 0.5) / nu;
    const double ps = c.psi(u);
    for (int j = 0; j < nv; ++j) {
      const double v = v_hi * (j + 0.5) / nv;
      pts.push_back({u, ps + delta * v});
    }
  }
  return pts;
}

}  // namespace

double ray_scale(const Curve& c, double x1, double x2) {
  double r;
  if (c.declared_case == CurveCase::B1 || c.declared_case == CurveCase::B2) {
    if (x2 == 0.0) throw range_error("ray_scale: point on the xi1-axis");
    r = x1 / x2;
  } else {
    if (x1 == 0.0) throw range_error("ray_scale: point on the xi2-axis");
    r = x2 / x1;
  }
  const double tau = psi_inverse(c, r);
  return std::hypot(x1, x2) / std::hypot(tau, c.psi(tau));
}

SupportContainmentReport verify_support_containment(const Decomposition& d,
                                                    const Curve& c,
                                                    const Symbol& collar,
                                                    int ell, bool enforce) {
  check_admissible(d, ell, "verify_support_containment");
  const ConvexPolygon fat = fat_sector_polygon(d, ell);
  const PieceSet pieces = partition_pieces(d, collar, d.delta);
  const Symbol& piece = pieces.zeta_piece(ell);
  const Symbol& tilde = pieces.zeta_tilde_piece(ell);

  SupportContainmentReport rep;
  rep.ell = ell;
  rep.worst_margin = std::numeric_limits<double>::infinity();

  const double t_lo = d.a[static_cast<std::size_t>(ell - 1)] - 0.5 * d.sqrt_delta;
  const double t_hi = d.a[static_cast<std::size_t>(ell)] + 0.5 * d.sqrt_delta;
  const int nt = 100, nk = 100;
  for (int i = 0; i < nt; ++i) {
    const double t = t_lo + (t_hi - t_lo) * (i + 0.5) / nt;
    const double ps = c.psi(t);
    for (int j = 0; j < nk; ++j) {
      // kappa sweeps slightly past the collar thickness; out-of-support
      // samples drop out through the magnitude threshold.
      const double kappa = d.delta * 0.15 * (j + 0.5) / nk;
      const Vec2 p{t, ps + kappa};
      const double v =
          std::max(std::abs(piece.eval(p.x, p.y)), std::abs(tilde.eval(p.x, p.y)));
      if (v <= 1e-12) continue;
      ++rep.samples;
      const double margin = fat.inside_margin(p);
      if (margin < rep.worst_margin) {
        rep.worst_margin = margin;
        rep.worst_point = {p.x, p.y};
      }
      if (margin < -1e-12) ++rep.violations;
    }
  }
  if (rep.samples == 0) rep.worst_margin = 0.0;
  if (enforce && rep.violations > 0) {
    throw lemma_failure_error(
        "support containment failed for sector " + std::to_string(ell) +
        ": witness (" + std::to_string(rep.worst_point[0]) + ", " +
        std::to_string(rep.worst_point[1]) + ") has margin " +
        std::to_string(rep.worst_margin));
  }
  return rep;
}

ActiveIndexReport count_active_indices(const Decomposition& d, const Curve& c,
                                       const Symbol& collar, int ell, double t,
                                       const GridSpec& grid) {
  check_admissible(d, ell, "count_active_indices");
  if (!(t >= 1.0 && t <= 2.0))
    throw parameter_error("count_active_indices: t must lie in [1, 2]");
  const PieceSet pieces = partition_pieces(d, collar, d.delta);
  const Symbol& piece = pieces.zeta_piece(ell);

  ActiveIndexReport rep;
  rep.ell = ell;
  rep.t = t;

  std::set<long long> slabs;
  std::set<std::pair<int, int>> boxes;
  // The windowed piece spills half a step into each neighbour interval, so
  // the index scan covers the full support, not just the core interval.
  const double core_lo = d.a[static_cast<std::size_t>(ell - 1)];
  const double core_hi = d.a[static_cast<std::size_t>(ell)];
  const double u_lo = core_lo - 0.5 * (core_hi - core_lo);
  const double u_hi = core_hi + 0.5 * (core_hi - core_lo);
  const int nu = 512, nv = 33;
  for (int i = 0; i < nu; ++i) {
    const double u = u_lo + (u_hi - u_lo) * (i + 0.5) / nu;
    const double ps = c.psi(u);
    for (int j = 0; j < nv; ++j) {
      const double v = 0.15 * (j + 0.5) / nv;
      const double y = ps + d.delta * v;
      if (std::abs(piece.eval(u, y)) <= 1e-12) continue;
      const double x1 = u / t, x2 = y / t;
      slabs.insert(slab_index(d, ell, x1, x2));
      const int k = partition_index(d.a, x1);
      const int jj = partition_index(d.bH, x2);
      if (k > 0 && jj > 0) boxes.insert({k, jj});
    }
  }
  rep.card_F = static_cast<int>(slabs.size());
  rep.card_G = static_cast<int>(boxes.size());

  // Lattice reconstruction: every node carrying a nonzero dilated-piece value
  // must land in exactly one cell; half-open memberships make the candidate
  // indices unique, so the residual is the value of any node that misses.
  FreqBox bb = piece.bbox.scaled(1.0 / t).inflated(1e-9);
  const int i_lo = grid.xi_lower_index(bb.x1min);
  const int i_hi = grid.xi_upper_index(bb.x1max);
  const int j_lo = grid.xi_lower_index(bb.x2min);
  const int j_hi = grid.xi_upper_index(bb.x2max);
  for (int i = i_lo; i < i_hi; ++i) {
    const double x1 = grid.xi_at(i);
    for (int j = j_lo; j < j_hi; ++j) {
      const double x2 = grid.xi_at(j);
      const double val = piece.eval(t * x1, t * x2);
      if (val == 0.0) continue;
      const int k = partition_index(d.a, x1);
      const int jj = partition_index(d.bH, x2);
      const long long h = slab_index(d, ell, x1, x2);
      const bool hit =
          k > 0 && jj > 0 && in_cell_halfopen(d, ell, k, jj, h, x1, x2);
      if (!hit)
        rep.reconstruction_residual =
            std::max(rep.reconstruction_residual, std::abs(val));
    }
  }
  return rep;
}

int sector_count(const Decomposition& d, int k, int j) {
  if (k < 1 || k > d.omega_count() || j < 1 || j > d.H_count())
    throw range_error("sector_count: box index out of range");
  const ConvexPolygon box =
      box_polygon(d.a[static_cast<std::size_t>(k - 1)],
                  d.a[static_cast<std::size_t>(k)],
                  d.bH[static_cast<std::size_t>(j - 1)],
                  d.bH[static_cast<std::size_t>(j)]);
  int count = 0;
  for (int ell = 2; ell <= d.omega_count() - 1; ++ell) {
    if (overlaps(fat_sector_polygon(d, ell), box)) ++count;
  }
  return count;
}

double collar_time_measure(const Decomposition& d, const Curve& c,
                           const Symbol& collar, int n, int ell, int h,
                           int t_samples) {
  (void)n;  // the measure is n-invariant: t 2^{-n} sweeps [1, 2] per octave
  if (t_samples < 1)
    throw parameter_error("collar_time_measure: need at least one t sample");
  const ConvexPolygon cell = slab_sector_polygon(d, ell, h);
  if (cell.empty()) return 0.0;

  std::vector<Vec2> pts = collar_param_samples(c, d.delta, 192, 16, 0.15);
  std::vector<Vec2> live;
  for (const Vec2& p : pts) {
    if (std::abs(collar.eval(p.x, p.y)) > 1e-12) live.push_back(p);
  }

  int hits = 0;
  for (int i = 0; i < t_samples; ++i) {
    const double s = std::exp2((i + 0.5) / t_samples);
    bool inside = false;
    for (const Vec2& p : live) {
      if (cell.contains({p.x / s, p.y / s})) {
        inside = true;
        break;
      }
    }
    if (inside) ++hits;
  }
  return std::log(2.0) * hits / t_samples;
}

RayLemmaReport verify_ray_lemmas(const Curve& c, double delta) {
  const double Lf = -std::log2(delta);
  const int L = static_cast<int>(std::lround(Lf));
  if (std::abs(Lf - L) > 1e-9 || L < 2 || L % 2 != 0)
    throw parameter_error("verify_ray_lemmas: delta must be 2^-L with L even");
  const Decomposition d = build_decomposition(c, L);
  const BumpProfile prof = collar_profile();

  RayLemmaReport rep;
  rep.delta = delta;

  // Monotone-ratio certificate (backs disjointness of distinct dilates).
  rep.min_dratio = std::numeric_limits<double>::infinity();
  const int nmono = 10000;
  for (int i = 0; i <= nmono; ++i) {
    const double t = c.I3.lo + c.I3.length() * i / nmono;
    rep.min_dratio = std::min(rep.min_dratio, std::abs(c.dratio(t)));
  }
  if (!(rep.min_dratio > 0.0))
    throw admissibility_error(
        "verify_ray_lemmas: ratio monotonicity regression on '" + c.name + "'");

  // Two-sided collar points resolve to ray scales within B1 * delta.
  const double kappas[] = {-1.0, -0.5, -0.25, -0.125, 0.125, 0.25, 0.5, 1.0};
  const int nt = 125;
  for (int i = 0; i < nt; ++i) {
    const double t = c.I1.lo + c.I1.length() * (i + 0.5) / nt;
    const double ps = c.psi(t);
    for (double km : kappas) {
      const double s = ray_scale(c, t, ps + km * delta);
      rep.b1_fit = std::max(rep.b1_fit, std::abs(1.0 - s) / delta);
    }
  }

  // Distinct dilates stay apart: nearest-neighbor scan of 1.01 and 0.99
  // copies of the graph.
  {
    const int ns = 1000;
    std::vector<Vec2> hi_pts, lo_pts;
    hi_pts.reserve(ns);
    lo_pts.reserve(ns);
    for (int i = 0; i < ns; ++i) {
      const double t = c.I2.lo + c.I2.length() * (i + 0.5) / ns;
      const double ps = c.psi(t);
      hi_pts.push_back({1.01 * t, 1.01 * ps});
      lo_pts.push_back({0.99 * t, 0.99 * ps});
    }
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& pa : hi_pts) {
      for (const Vec2& pb : lo_pts) {
        best = std::min(best, std::hypot(pa.x - pb.x, pa.y - pb.y));
      }
    }
    rep.dilate_min_distance = best;
  }

  // Cells meeting a tau-dilated collar sit inside a thin dilate annulus:
  // bound |scale/tau - 1| over boundary samples of every hit cell. Boundary
  // points are kept only where the point's ratio falls inside ratio(I3),
  // where the ray scale is invertible; at coarse delta the outermost sectors
  // poke past that window and those samples contribute nothing.
  {
    std::vector<Vec2> pts = collar_param_samples(c, delta, 128, 8, 0.15);
    const Symbol collar_sym = collar_symbol(c, prof, delta);
    std::vector<Vec2> live;
    for (const Vec2& p : pts) {
      if (std::abs(collar_sym.eval(p.x, p.y)) > 1e-12) live.push_back(p);
    }
    const auto rb = gauge_cone_bounds(c);
    const double r_margin = 1e-9 * (rb[1] - rb[0]);
    const auto ratio_ok = [&](double x1, double x2) {
      double r;
      if (c.declared_case == CurveCase::B1 ||
          c.declared_case == CurveCase::B2) {
        if (x2 == 0.0) return false;
        r = x1 / x2;
      } else {
        if (x1 == 0.0) return false;
        r = x2 / x1;
      }
      return r >= rb[0] + r_margin && r <= rb[1] - r_margin;
    };
    for (int ell = d.ell_lo; ell <= d.ell_hi; ++ell) {
      for (int it = 0; it < 16; ++it) {
        const double tau = 0.5 + 0.5 * it / 15.0;
        std::set<long long> hits;
        for (const Vec2& p : live) {
          const double q1 = tau * p.x, q2 = tau * p.y;
          if (!in_fat_sector(d, ell, q1, q2)) continue;
          hits.insert(slab_index(d, ell, q1, q2));
        }
        for (long long h : hits) {
          const ConvexPolygon cell = slab_sector_polygon(d, ell, h);
          if (cell.empty()) continue;
          const std::size_t nvtx = cell.vertices.size();
          for (std::size_t a = 0; a < nvtx; ++a) {
            const Vec2& v0 = cell.vertices[a];
            const Vec2& v1 = cell.vertices[(a + 1) % nvtx];
            for (int m = 0; m < 4; ++m) {
              const double w = m / 4.0;
              const double qx = v0.x + w * (v1.x - v0.x);
              const double qy = v0.y + w * (v1.y - v0.y);
              if (!ratio_ok(qx, qy)) continue;
              const double sc = ray_scale(c, qx, qy);
              rep.d_fit = std::max(rep.d_fit, std::abs(sc / tau - 1.0) / delta);
            }
          }
        }
      }
    }
  }

  // Cell-area probes: derive an active four-index cell from points on and
  // near scaled copies of the collar, and record the largest area.
  {
    const double radii[] = {0.85, 1.0, 1.15};
    const double vlevels[] = {0.2, 0.5, 0.8};
    for (int ell = d.ell_lo; ell <= d.ell_hi; ++ell) {
      const double mid = 0.5 * (d.a[static_cast<std::size_t>(ell - 1)] +
                                d.a[static_cast<std::size_t>(ell)]);
      const double ps = c.psi(mid);
      for (double r : radii) {
        for (double vl : vlevels) {
          const double x1 = r * mid;
          const double x2 = r * (ps + delta * vl * prof.c_star);
          const int k = partition_index(d.a, x1);
          const int j = partition_index(d.bH, x2);
          if (k == 0 || j == 0) continue;
          const long long h = slab_index(d, ell, x1, x2);
          const ConvexPolygon cell = cell_polygon(d, ell, k, j, h);
          if (!cell.empty())
            rep.max_cell_area = std::max(rep.max_cell_area, cell.area());
        }
      }
    }
  }
  return rep;
}

}  // namespace brlab
