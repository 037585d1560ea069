#pragma once

#include <functional>
#include <limits>
#include <vector>

namespace omegascale {

// A function that is smooth between consecutive breakpoints. Values exactly
// at a breakpoint are never needed by the quadratures below; pointwise
// evaluation at a breakpoint goes through right_limit().
struct Weight {
  std::function<double(double)> fn;  // empty means identically zero
  std::vector<double> breaks;        // sorted ascending
  // fn vanishes on [support_end, inf).
  double support_end = std::numeric_limits<double>::infinity();

  static Weight zero() { return {}; }
  bool is_zero() const { return !fn; }
  double operator()(double x) const { return fn ? fn(x) : 0.0; }
  double right_limit(double x) const;
  // x -> fn(x + y0)
  Weight shifted(double y0) const;
  // x -> fn(x) - c
  Weight minus(double c) const;
};

// Moments of the weight against the two hat functions of the cell [lo, hi]:
//   left  = int w(y) (hi - y)/(hi - lo) dy
//   right = int w(y) (y - lo)/(hi - lo) dy
// Integrates each smooth piece with 4-point Gauss-Legendre, exact for
// piecewise-quadratic weights.
struct HatMoments {
  double left = 0.0;
  double right = 0.0;
};
HatMoments hat_moments(const Weight& w, double lo, double hi);

// Plain integral of the weight over [lo, hi] (same rule).
double integrate(const Weight& w, double lo, double hi);

// int_lo^hi w(y) g(y) dy where g is known at the nodes ys (ascending, covering
// [lo, hi]) and interpolated linearly between them; ys may contain a
// repeated abscissa to represent a jump of g.
double integrate_weighted_linear(const Weight& w, const std::vector<double>& ys,
                                 const std::vector<double>& gs);

}  // namespace omegascale
