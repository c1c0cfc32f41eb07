#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <brlab/curve.hpp>
#include <brlab/decomposition.hpp>
#include <brlab/errors.hpp>
#include <brlab/grid.hpp>
#include <brlab/symbols.hpp>

#include <cmath>
#include <set>
#include <vector>

using namespace brlab;

TEST_CASE("smooth bump and step hit their exact plateaus") {
  const auto bump = smooth_bump(0.3, 0.2);
  CHECK(bump(0.3) == 1.0);
  CHECK(bump(0.5) == 0.0);
  CHECK(bump(0.1) == 0.0);
  CHECK(bump(0.61) == 0.0);
  CHECK(bump(0.35) > 0.0);
  CHECK(bump(0.35) < 1.0);
  CHECK(bump(0.25) == doctest::Approx(bump(0.35)).epsilon(1e-14));

  const auto step = smooth_step(1.0, 2.0);
  CHECK(step(1.0) == 0.0);
  CHECK(step(0.0) == 0.0);
  CHECK(step(2.0) == 1.0);
  CHECK(step(5.0) == 1.0);
  const double mid = step(1.5);
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
  CHECK(mid == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(smooth_bump(0.0, 0.0), parameter_error);
  CHECK_THROWS_AS(smooth_step(2.0, 1.0), parameter_error);
}

TEST_CASE("window_1d is exactly one on the inner plateau and zero outside") {
  const auto w = window_1d(-1.0, 1.0, 0.25);
  CHECK(w(-0.75) == 1.0);
  CHECK(w(0.0) == 1.0);
  CHECK(w(0.75) == 1.0);
  CHECK(w(-1.0) == 0.0);
  CHECK(w(1.0) == 0.0);
  CHECK(w(-2.0) == 0.0);
  CHECK(w(0.9) > 0.0);
  CHECK(w(0.9) < 1.0);
  CHECK_THROWS_AS(window_1d(0.0, 1.0, 0.6), parameter_error);
  CHECK_THROWS_AS(window_1d(1.0, 0.0, 0.1), parameter_error);
}

TEST_CASE("collar profile carries a unit derivative certificate") {
  const BumpProfile p = collar_profile();
  CHECK(p.c_star == 0.125);
  CHECK(p.normalized);
  for (double cert : p.derivative_certificate) {
    CHECK(cert > 0.0);
    CHECK(cert <= 1.0);
  }
  // Support is (0, c_star) with the peak at its midpoint.
  CHECK(p.Phi(0.0) == 0.0);
  CHECK(p.Phi(p.c_star) == 0.0);
  CHECK(p.Phi(0.5) == 0.0);
  CHECK(p.Phi(-0.01) == 0.0);
  const double peak = p.Phi(0.5 * p.c_star);
  CHECK(peak > 0.0);
  CHECK(peak == doctest::Approx(p.derivative_certificate[0]).epsilon(1e-3));

  // Measured finite-difference derivatives stay within the certificate.
  for (int m = 1; m <= 3; ++m) {
    double worst = 0.0;
    const double h = 1e-4 * p.c_star;
    for (int k = 1; k < 4000; ++k) {
      const double r = p.c_star * k / 4000.0;
      double d = 0.0;
      if (m == 1)
        d = (p.Phi(r + h) - p.Phi(r - h)) / (2.0 * h);
      else if (m == 2)
        d = (p.Phi(r + h) - 2.0 * p.Phi(r) + p.Phi(r - h)) / (h * h);
      else
        d = (p.Phi(r + 2.0 * h) - 2.0 * p.Phi(r + h) + 2.0 * p.Phi(r - h) -
             p.Phi(r - 2.0 * h)) /
            (2.0 * h * h * h);
      worst = std::max(worst, std::abs(d));
    }
    CHECK(worst <= p.derivative_certificate[static_cast<std::size_t>(m)] *
                       (1.0 + 1e-3));
  }
}

TEST_CASE("collar symbol substitutes the scaled transverse distance") {
  const Curve c = curve_preset("parabola-b1");
  const BumpProfile prof = collar_profile();
  const double delta = 0.0625;
  const Symbol collar = collar_symbol(c, prof, delta);

  // At (0, 1 + delta/2) the window is flat 1, so the value is Phi(1/2).
  CHECK(collar.eval(0.0, 1.0 + 0.5 * delta) == prof.Phi(0.5));
  // Inside the profile support the window still contributes exactly 1.
  const double r_peak = 0.5 * prof.c_star;
  CHECK(collar.eval(0.0, 1.0 + r_peak * delta) ==
        doctest::Approx(prof.Phi(r_peak)).epsilon(1e-14));
  // Distance 2 delta lies beyond supp(Phi).
  CHECK(collar.eval(0.1, c.psi(0.1) + 2.0 * delta) == 0.0);
  // Parameter outside the b-window support.
  CHECK(collar.eval(0.47, 1.0) == 0.0);
  // Below the curve the profile vanishes.
  CHECK(collar.eval(0.0, 1.0 - 0.01 * delta) == 0.0);

  CHECK_THROWS_AS(collar_symbol(c, prof, 0.3), parameter_error);
  CHECK_THROWS_AS(collar_symbol(c, prof, 0.125), parameter_error);
}

TEST_CASE("symbols vanish outside their declared support on a full lattice") {
  const Curve c = curve_preset("parabola-b1");
  const GridSpec g(8.0, 128);
  const std::vector<Symbol> syms = {
      standard_amplitude(c), collar_window(c),
      collar_symbol(c, collar_profile(), 0.0625),
      cone_window_symbol(c, default_cone_window(c)),
      distance_power_symbol(c, standard_amplitude(c), 0.5),
      gauge_power_symbol(c, default_cone_window(c), 1.0, GaugeSide::inside)};
  for (const Symbol& s : syms) {
    for (int i = 0; i < g.N; ++i)
      for (int j = 0; j < g.N; ++j) {
        const double x1 = g.xi_at(i), x2 = g.xi_at(j);
        const double v = s.eval(x1, x2);
        CHECK(std::isfinite(v));
        if (v != 0.0) {
          CHECK(s.supported_at(x1, x2));
          CHECK(s.bbox.contains(x1, x2));
        }
      }
  }
}

TEST_CASE("distance power symbol evaluates the paper profile") {
  const Curve c = curve_preset("parabola-b1");
  Symbol flat;
  flat.name = "flat";
  flat.eval = [](double, double) { return 1.0; };

  const Symbol half = distance_power_symbol(c, flat, 0.5);
  // Distance 4 above the graph at x1 = 0: x2 = psi(0) + 4 = 5.
  CHECK(half.eval(0.0, 5.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(half.eval(0.0, 1.0 - 0.3) == 0.0);
  CHECK(half.eval(0.0, 1.0) == 0.0);

  const Symbol log2sym = distance_power_symbol(c, flat, -0.5, 2.0);
  const double expect = std::pow(std::log(3.0), -2.0);
  CHECK(log2sym.eval(0.0, 2.0) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(expect == doctest::Approx(0.8285).epsilon(1e-3));

  const Symbol below = distance_power_symbol(c, flat, 0.5, 0.0,
                                             DistanceSide::below);
  CHECK(below.eval(0.0, 1.0 - 4.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(below.eval(0.0, 5.0) == 0.0);

  CHECK_THROWS_AS(distance_power_symbol(c, flat, -0.6), parameter_error);
  CHECK_THROWS_AS(distance_power_symbol(c, flat, -0.5, 0.0), parameter_error);

  // lambda = 0, theta = 0 degenerates to the one-sided indicator.
  const Symbol ind = distance_power_symbol(c, standard_amplitude(c), 0.0);
  const Symbol aw = standard_amplitude(c);
  const GridSpec g(8.0, 128);
  for (int i = 0; i < g.N; ++i)
    for (int j = 0; j < g.N; ++j) {
      const double x1 = g.xi_at(i), x2 = g.xi_at(j);
      const double expect_ind =
          x2 - c.psi(x1) > 0.0 ? aw.eval(x1, x2) : 0.0;
      CHECK(ind.eval(x1, x2) == doctest::Approx(expect_ind).epsilon(1e-14));
    }
}

TEST_CASE("gauge power symbols vanish on the graph and scale off it") {
  const Curve c = curve_preset("parabola-b1");
  const ConeWindow w = default_cone_window(c);
  const Symbol inside = gauge_power_symbol(c, w, 1.0, GaugeSide::inside);
  const Symbol outside = gauge_power_symbol(c, w, 1.0, GaugeSide::outside);

  // On the graph rho equals 1 up to the inverse-map tolerance, so both
  // one-sided powers collapse to rounding level.
  for (double u : {-0.3, 0.0, 0.2, 0.4}) {
    CHECK(std::abs(inside.eval(u, c.psi(u))) < 1e-12);
    CHECK(std::abs(outside.eval(u, c.psi(u))) < 1e-12);
  }
  // Half the graph point has rho = 1/2 by homogeneity; the window is flat 1.
  CHECK(inside.eval(0.0, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(outside.eval(0.0, 0.5) == 0.0);
  CHECK(outside.eval(0.0, 1.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(inside.eval(0.0, 1.5) == 0.0);

  CHECK_THROWS_AS(gauge_power_symbol(c, w, -0.6, GaugeSide::inside),
                  parameter_error);

  // Slope support leaking past the gauge cone is rejected.
  ConeWindow leak = w;
  leak.slope_lo = c.ratio(c.I3.lo) - 0.01;
  CHECK_THROWS_AS(cone_window_symbol(c, leak), support_error);
  CHECK_THROWS_AS(gauge_power_symbol(c, leak, 1.0, GaugeSide::inside),
                  support_error);
}

TEST_CASE("partition pieces tile the cover interval") {
  const Curve c = curve_preset("parabola-b1");
  const double delta = 0.00390625;  // 2^-8
  const Decomposition d = build_decomposition(c, 8);
  const Symbol collar = collar_symbol(c, collar_profile(), delta);
  const PieceSet pieces = partition_pieces(d, collar, delta);

  const Interval cover = partition_cover(d, d.ell_lo, d.ell_hi);
  for (int k = 0; k < 1000; ++k) {
    const double s = cover.lo + cover.length() * (k + 0.5) / 1000.0;
    double total = 0.0;
    for (int ell = pieces.ell_lo; ell <= pieces.ell_hi; ++ell) {
      total += pieces.zeta_profile(ell)(s);
      total += pieces.zeta_tilde_profile(ell)(s);
    }
    CHECK(std::abs(total - 1.0) < 1e-10);
  }

  CHECK_THROWS_AS(partition_pieces(d, collar, 0.0625), parameter_error);
  CHECK_THROWS_AS(partition_cover(d, d.ell_lo - 1, d.ell_hi), range_error);
}

TEST_CASE("zeta pieces respect their interval supports") {
  const Curve c = curve_preset("parabola-b1");
  const double delta = 0.0625;
  const Decomposition d = build_decomposition(c, 4);
  const Symbol collar = collar_symbol(c, collar_profile(), delta);
  const PieceSet pieces = partition_pieces(d, collar, delta);

  const int ell = (d.ell_lo + d.ell_hi) / 2;
  const auto prof = pieces.zeta_profile(ell);
  const double lo = d.a[static_cast<std::size_t>(ell - 1)];
  const double hi = d.a[static_cast<std::size_t>(ell)];
  CHECK(prof(lo - 1e-9) == 0.0);
  CHECK(prof(hi + 1e-9) == 0.0);
  CHECK(prof(0.5 * (lo + hi)) > 0.0);

  // The piece symbol vanishes whenever x1 leaves the core interval.
  const Symbol& piece = pieces.zeta_piece(ell);
  const double mid_y = c.psi(0.5 * (lo + hi)) + 0.5 * collar_profile().c_star * delta;
  CHECK(piece.eval(lo - 0.01, mid_y) == 0.0);
  CHECK(piece.eval(hi + 0.01, mid_y) == 0.0);

  // Derivative growth delta^{-1/2}: the rescaled max slope is exactly the
  // master profile's and therefore level-independent.
  std::vector<double> rescaled;
  for (int L : {4, 6, 8}) {
    const double dl = std::exp2(-L);
    const Decomposition dd = build_decomposition(c, L);
    const Symbol col = collar_symbol(c, collar_profile(), dl);
    const PieceSet ps = partition_pieces(dd, col, dl);
    const int mid = (dd.ell_lo + dd.ell_hi) / 2;
    const auto pf = ps.zeta_profile(mid);
    const double wlo = dd.a[static_cast<std::size_t>(mid - 1)];
    const double whi = dd.a[static_cast<std::size_t>(mid)];
    double worst = 0.0;
    const double h = 1e-7;
    for (int k = 0; k <= 2000; ++k) {
      const double s = wlo + (whi - wlo) * k / 2000.0;
      worst = std::max(worst,
                       std::abs(pf(s + h) - pf(s - h)) / (2.0 * h));
    }
    rescaled.push_back(worst * std::sqrt(dl));
  }
  for (double v : rescaled) {
    CHECK(v == doctest::Approx(rescaled[0]).epsilon(1e-3));
  }
}

TEST_CASE("families split the piece indices by residue") {
  const Curve c = curve_preset("parabola-b1");
  const double delta = 0.0625;
  const Decomposition d = build_decomposition(c, 4);
  const PieceSet pieces =
      partition_pieces(d, collar_symbol(c, collar_profile(), delta), delta);

  std::set<int> seen;
  const int residues[4] = {1, 2, 3, 0};
  for (int which = 1; which <= 4; ++which) {
    for (int ell : pieces.family(which)) {
      CHECK(((ell % 4) + 4) % 4 == residues[which - 1]);
      CHECK(ell >= pieces.ell_lo);
      CHECK(ell <= pieces.ell_hi);
      CHECK(seen.insert(ell).second);
    }
  }
  CHECK(static_cast<int>(seen.size()) == pieces.ell_hi - pieces.ell_lo + 1);
}

TEST_CASE("factorization weight reproduces the distance factor") {
  const GridSpec g(16.0, 512);
  for (const char* name : {"parabola-b1", "parabola-b1-neg", "power-b3"}) {
    const Curve c = curve_preset(name);
    const Symbol aw = standard_amplitude(c);
    const FactorizationCheck fc = factorization_weight(c, aw, g);
    CHECK(fc.residual_half < 1e-6);
    CHECK(fc.residual_one < 1e-6);
    CHECK(fc.min_g >= 1e-8);
    CHECK(std::abs(fc.sign) == 1.0);
  }
}

TEST_CASE("factorization identity is pointwise, not homogeneous") {
  const GridSpec g(16.0, 512);
  const Curve c = curve_preset("parabola-b1");
  const FactorizationCheck fc =
      factorization_weight(c, standard_amplitude(c), g);

  // On the curve both factors vanish.
  const double u = 0.25;
  CHECK(rho_gauge(c, u, c.psi(u)) == doctest::Approx(1.0).epsilon(1e-12));

  // Off the curve the weight links the two factors pointwise.
  const double x1 = 0.125, x2 = c.psi(0.125) + 0.05;
  const double lhs = rho_gauge(c, x1, x2) - 1.0;
  const double rhs = fc.sign * fc.g.eval(x1, x2) * (x2 - c.psi(x1));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-7));

  // Doubling the point does not double rho - 1.
  const double lhs2 = rho_gauge(c, 2.0 * x1, 2.0 * x2) - 1.0;
  CHECK(std::abs(lhs2 - 2.0 * lhs) > 1e-3);

  // The cone-window amplitude violates the precondition: its support runs
  // far beyond the inner parameter window.
  CHECK_THROWS_AS(
      factorization_weight(c, cone_window_symbol(c, default_cone_window(c)),
                           g),
      parameter_error);
}

TEST_CASE("dilated symbols evaluate at the scaled argument") {
  const Curve c = curve_preset("parabola-b1");
  const Symbol collar = collar_symbol(c, collar_profile(), 0.0625);
  const Symbol half = dilate_symbol(collar, 0.5);
  CHECK(half.eval(0.2, 2.1) == collar.eval(0.1, 1.05));
  CHECK(half.bbox.x2max == doctest::Approx(2.0 * collar.bbox.x2max));
  CHECK_THROWS_AS(dilate_symbol(collar, 0.0), parameter_error);
}
