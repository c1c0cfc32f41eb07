#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace brlab {

// Deterministic Gaussian/uniform generator. Uniform draws come from
// std::mt19937_64 (bit-exact across platforms); normals use an explicit
// Box-Muller transform so the normal stream is equally portable.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}
  double uniform();  // [0, 1)
  double normal();   // standard normal
  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

// Bisection for strictly monotone f on [lo, hi]; returns t with
// f(t) ~ target, interval narrowed to rel_tol * (hi - lo).
double bisect_monotone(const std::function<double(double)>& f, double lo,
                       double hi, double target, double rel_tol = 1e-12);

// Nodes/weights of n-point Gauss-Legendre on [-1, 1], computed by Newton
// iteration on Legendre polynomials. Deterministic, ~1e-15 accurate.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
  explicit GaussLegendre(int n);
  // Integrate f over [a, b].
  double integrate(double a, double b,
                   const std::function<double(double)>& f) const;
};

// Regularized incomplete beta I_x(a, b) via Lentz continued fraction.
double reg_incomplete_beta(double a, double b, double x);

// int_{x1}^{x2} u^{a-1} (1-u)^{b-1} du (unregularized), 0 <= x1 <= x2 <= 1.
double incomplete_beta_segment(double a, double b, double x1, double x2);

// Complete beta function.
double beta_function(double a, double b);

// Ordinary least squares fit y = slope * x + intercept.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
};
LineFit ols_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace brlab
