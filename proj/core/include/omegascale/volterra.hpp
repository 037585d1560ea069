#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "omegascale/quadrature.hpp"

namespace omegascale {

// H(x) = f(x) + int_0^x K(x - y) w(y) H(y) dy on [0, x_max], H = f on x < 0.
//
// K is the (shifted) scale function W^(delta): it must vanish on the
// negative half-line, and kernel(0) is its right limit, i.e. the atom
// W^(delta)(0). The weight is omega - delta.
struct VolterraProblem {
  std::function<double(double)> kernel;
  std::function<double(double)> forcing;
  Weight weight;
  double delta = 0.0;
  double h = 1e-3;
  double x_max = 1.0;
  // Combine the solutions on h and h/2 as (4 H_{h/2} - H_h)/3, cancelling the
  // leading h^2 error term. Linear in the forcing, but the discrete
  // comparison principle of the plain scheme is lost.
  bool extrapolate = false;
  // Optional derivatives, used only by VolterraSolution::derivative_quadrature.
  std::function<double(double)> kernel_prime;
  std::function<double(double)> forcing_prime;
};

struct VolterraShared;

class VolterraSolution {
 public:
  VolterraSolution() = default;
  explicit VolterraSolution(std::shared_ptr<const VolterraShared> data) : data_(std::move(data)) {}

  double h() const;
  double x_max() const;
  std::size_t size() const;
  const std::vector<double>& nodes() const;
  const std::vector<double>& values() const;
  const VolterraProblem& problem() const;

  // Node values are returned as stored; between nodes the equation itself is
  // used as interpolant (Nystrom). Below 0 the forcing is returned. Points
  // beyond x_max are accepted only when the weight vanishes there.
  double operator()(double x) const;

  // Central differences of the node values, one-sided second order at the
  // two ends.
  std::vector<double> fd_derivative() const;

  // H'(x) = f'(x) + K(0) w(x+) H(x) + int_0^x K'(x - y) w(y) H(y) dy,
  // using the right limit of w. Needs kernel_prime and forcing_prime.
  double derivative_quadrature(double x) const;

 private:
  friend VolterraSolution solve(const VolterraProblem& problem);
  std::shared_ptr<const VolterraShared> data_;
};

// Product integration on the uniform grid: K(x_i - y) H(y) is interpolated
// linearly on each cell and integrated exactly against w, whose breakpoints
// are honoured by the hat-moment quadrature. O(n^2) time, O(n) memory.
//
// Throws SolverGuardError when 1 - beta K(0) <= 1/2 on some row (grid too
// coarse for the weight) and NonFiniteError on overflow.
VolterraSolution solve(const VolterraProblem& problem);

// Same equation with the weight read at (. + y0).
VolterraSolution solve_shifted(const VolterraProblem& problem, double y0);

// Self-convergence order log2(|H_h - H_{h/2}| / |H_{h/2} - H_{h/4}|), maxima
// over the nodes of the coarsest grid. Empty when the differences vanish
// (for example w = 0, where the scheme is exact).
std::optional<double> richardson_order(const VolterraProblem& problem);

}  // namespace omegascale
