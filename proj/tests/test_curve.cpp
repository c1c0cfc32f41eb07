#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <brlab/curve.hpp>
#include <brlab/errors.hpp>

#include <cmath>
#include <vector>

using namespace brlab;

TEST_CASE("parabola preset classifies as B1 with positive ratio sign") {
  const Curve c = curve_preset("parabola-b1");
  CHECK(c.psi(0.0) == 1.0);
  CHECK(c.psi(0.5) == 1.25);
  CHECK(c.I.lo == doctest::Approx(-0.5));
  CHECK(c.I.hi == doctest::Approx(0.5));
  const CaseTag tag = check_admissibility(c);
  CHECK(tag.curve_case == CurveCase::B1);
  CHECK(tag.ratio_sign == 1);
  // psi - t psi' = 1 - t^2 stays >= 3/4 on I.
  for (int k = 0; k <= 100; ++k) {
    const double t = -0.5 + k * 0.01;
    CHECK(c.psi(t) - t * c.dpsi(t) >= 0.75 - 1e-12);
  }
}

TEST_CASE("power preset classifies as B3") {
  const Curve c = curve_preset("power-b3");
  const CaseTag tag = check_admissibility(c);
  CHECK(tag.curve_case == CurveCase::B3);
  CHECK(tag.ratio_sign == 1);
  CHECK(c.I.lo == doctest::Approx(1.0));
  CHECK(c.I.hi == doctest::Approx(2.0));
  // PsiStar(t) = psi(t)/t = t for the square power curve.
  CHECK(c.ratio(2.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(c.dratio(1.5) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("flat cubic passes without curvature and fails with it") {
  const Curve c = curve_preset("cubic-flat");
  const CaseTag tag = check_admissibility(c);
  CHECK(tag.curve_case == CurveCase::B1);
  // psi'' = 6t vanishes at t = 0.
  CHECK_THROWS_AS(require_curvature(c), admissibility_error);
  CHECK_NOTHROW(require_curvature(curve_preset("parabola-b1")));
  // psi - t psi' = 1 - 2 t^3 >= 3/4 on I.
  for (int k = 0; k <= 100; ++k) {
    const double t = -0.5 + k * 0.01;
    CHECK(c.psi(t) - t * c.dpsi(t) >= 0.75 - 1e-12);
  }
}

TEST_CASE("supplied derivatives match finite differences") {
  for (const std::string& name : curve_preset_names()) {
    const Curve c = curve_preset(name);
    const double step = 1e-5;
    for (int k = 0; k <= 200; ++k) {
      const double t = c.I.lo + (c.I.hi - c.I.lo) * k / 200.0;
      if (t - step < c.I.lo || t + step > c.I.hi) continue;
      const double d1 = (c.psi(t + step) - c.psi(t - step)) / (2.0 * step);
      const double d2 =
          (c.psi(t + step) - 2.0 * c.psi(t) + c.psi(t - step)) / (step * step);
      CHECK(std::abs(d1 - c.dpsi(t)) < 1e-7);
      CHECK(std::abs(d2 - c.ddpsi(t)) < 1e-5);
    }
  }
}

TEST_CASE("ratio values on the parabola") {
  const Curve c = curve_preset("parabola-b1");
  CHECK(c.ratio(0.5) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(c.ratio(0.0) == 0.0);
}

TEST_CASE("ratio map is strictly monotone on I3") {
  for (const std::string& name : curve_preset_names()) {
    const Curve c = curve_preset(name);
    const CaseTag tag = check_admissibility(c);
    double prev = c.ratio(c.I3.lo);
    for (int k = 1; k <= 10000; ++k) {
      const double t = c.I3.lo + c.I3.length() * k / 10000.0;
      const double r = c.ratio(t);
      if (tag.ratio_sign > 0)
        CHECK(r > prev);
      else
        CHECK(r < prev);
      prev = r;
    }
  }
}

TEST_CASE("psi_inverse solves the quadratic ratio equation") {
  const Curve c = curve_preset("parabola-b1");
  // Psi(t) = t/(1+t^2) = 0.4 has the in-window root (1 - 0.6)/0.8 = 0.5.
  CHECK(psi_inverse(c, 0.4) == doctest::Approx(0.5).epsilon(1e-12));
  for (int k = 0; k <= 100; ++k) {
    const double t = c.I3.lo + c.I3.length() * k / 100.0;
    CHECK(std::abs(psi_inverse(c, c.ratio(t)) - t) < 1e-10);
  }
  // Endpoints are fixed points of the round trip.
  CHECK(psi_inverse(c, c.ratio(c.I3.lo)) == doctest::Approx(c.I3.lo).epsilon(1e-12));
  CHECK(psi_inverse(c, c.ratio(c.I3.hi)) == doctest::Approx(c.I3.hi).epsilon(1e-12));
  CHECK_THROWS_AS(psi_inverse(c, 0.9), range_error);
  CHECK_THROWS_AS(psi_inverse(c, -0.9), range_error);
}

TEST_CASE("gauge equals one on the graph and extends by homogeneity") {
  const Curve c = curve_preset("parabola-b1");
  CHECK(rho_gauge(c, 0.5, 1.25) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rho_gauge(c, 1.0, 2.5) == doctest::Approx(2.0).epsilon(1e-12));
  // rho(0, v) = v / psi(0) = v for the parabola.
  CHECK(rho_gauge(c, 0.0, 0.7) == doctest::Approx(0.7).epsilon(1e-12));
  for (int k = 0; k <= 1000; ++k) {
    const double u = c.I3.lo + c.I3.length() * k / 1000.0;
    CHECK(std::abs(rho_gauge(c, u, c.psi(u)) - 1.0) < 1e-10);
  }
}

TEST_CASE("gauge homogeneity on cone points") {
  for (const std::string& name : {"parabola-b1", "power-b3"}) {
    const Curve c = curve_preset(name);
    for (int k = 0; k < 1000; ++k) {
      const double u = c.I2.lo + c.I2.length() * (k + 0.5) / 1000.0;
      const double v = c.psi(u) * (0.9 + 0.0002 * (k % 900));
      if (!in_gauge_cone(c, u, v)) continue;
      const double base = rho_gauge(c, u, v);
      for (double s : {0.5, 2.0, 7.3}) {
        CHECK(std::abs(rho_gauge(c, s * u, s * v) - s * base) / s < 1e-10);
      }
    }
  }
}

TEST_CASE("gauge rejects points outside its cone") {
  const Curve c = curve_preset("parabola-b1");
  const auto bounds = gauge_cone_bounds(c);
  CHECK(bounds[0] < bounds[1]);
  CHECK(bounds[0] == doctest::Approx(c.ratio(c.I3.lo)));
  CHECK(bounds[1] == doctest::Approx(c.ratio(c.I3.hi)));
  CHECK_THROWS_AS(rho_gauge(c, 1.0, 1.0), cone_domain_error);
  CHECK_THROWS_AS(rho_gauge(c, 0.0, -1.0), cone_domain_error);
  CHECK(!in_gauge_cone(c, 1.0, 1.0));
  CHECK(in_gauge_cone(c, 0.2, 1.0));

  // Reflected cases direct to the reduction instead of evaluating.
  const Curve b2 = curve_preset("parabola-b2");
  CHECK_THROWS_AS(rho_gauge(b2, 0.2, -1.0), cone_domain_error);
}

TEST_CASE("gamma point and tangent slope") {
  const Curve c = curve_preset("parabola-b1");
  const auto p = gamma_point(c, 0.0);
  CHECK(p[0] == 0.0);
  CHECK(p[1] == 1.0);
  CHECK(tangent_slope(c, 0.0) == 0.0);
  CHECK(tangent_slope(c, 0.5) == doctest::Approx(1.0));
}

TEST_CASE("reflected presets mirror the base presets") {
  const Curve b1 = curve_preset("parabola-b1");
  const Curve b2 = curve_preset("parabola-b2");
  CHECK(b2.declared_case == CurveCase::B2);
  for (int k = 0; k <= 50; ++k) {
    const double t = b1.I.lo + b1.I.length() * k / 50.0;
    CHECK(b2.psi(t) == doctest::Approx(-b1.psi(t)));
  }
  const Curve b3 = curve_preset("power-b3");
  const Curve b4 = curve_preset("power-b4");
  CHECK(b4.declared_case == CurveCase::B4);
  for (int k = 0; k <= 50; ++k) {
    const double t = b3.I.lo + b3.I.length() * k / 50.0;
    CHECK(b4.psi(-t) == doctest::Approx(b3.psi(t)));
  }
  CHECK_NOTHROW(check_admissibility(b2));
  CHECK_NOTHROW(check_admissibility(b4));
}

TEST_CASE("negative-ratio preset has decreasing ratio") {
  const Curve c = curve_preset("parabola-b1-neg");
  const CaseTag tag = check_admissibility(c);
  CHECK(tag.curve_case == CurveCase::B1);
  CHECK(tag.ratio_sign == -1);
}

TEST_CASE("polynomial curves derive nested windows and validate") {
  const Curve c = make_polynomial_curve(
      "wavy", {1.0, 0.1, 0.5}, Interval{-0.5, 0.5},
      BoxSpec{-1.0, 1.0, 0.5, 2.0}, CurveCase::B1);
  CHECK(c.psi(0.0) == 1.0);
  CHECK(c.dpsi(0.0) == doctest::Approx(0.1));
  CHECK(c.ddpsi(0.0) == doctest::Approx(1.0));
  CHECK(c.I1.strictly_inside(c.I2));
  CHECK(c.I2.strictly_inside(c.I3));
  CHECK(c.I3.strictly_inside(c.I));
  CHECK(c.I1.lo == doctest::Approx(-0.4));
  CHECK(c.I2.lo == doctest::Approx(-0.45));
  CHECK(c.I3.lo == doctest::Approx(-0.49));
  CHECK_NOTHROW(check_admissibility(c));

  // A graph escaping its declared box is rejected.
  const Curve bad = make_polynomial_curve(
      "escape", {1.0, 0.0, 9.0}, Interval{-0.5, 0.5},
      BoxSpec{-1.0, 1.0, 0.5, 2.0}, CurveCase::B1);
  CHECK_THROWS_AS(check_admissibility(bad), admissibility_error);

  // Box/case mismatches are classification errors.
  const Curve wrong_case = make_polynomial_curve(
      "misboxed", {1.0, 0.0, 0.5}, Interval{-0.5, 0.5},
      BoxSpec{-1.0, 1.0, 0.5, 2.0}, CurveCase::B3);
  CHECK_THROWS_AS(check_admissibility(wrong_case), classification_error);
}

TEST_CASE("admissibility rejects a curve violating the transversality bound") {
  // psi - t psi' = 1 - t^2 - 12 t^3 crosses zero inside I.
  const Curve c = make_polynomial_curve(
      "steep", {1.0, 0.0, 1.0, 6.0}, Interval{-0.6, 0.6},
      BoxSpec{-2.0, 2.0, 0.01, 3.2}, CurveCase::B1);
  CHECK_THROWS_AS(check_admissibility(c), admissibility_error);
}

TEST_CASE("unknown preset names are rejected") {
  CHECK_THROWS_AS(curve_preset("no-such-curve"), parameter_error);
  const auto names = curve_preset_names();
  CHECK(names.size() == 6);
  for (const auto& n : names) CHECK_NOTHROW(curve_preset(n));
}
