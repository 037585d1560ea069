#pragma once

#include <vector>

namespace omegascale {

// coef * x^power * exp(rate * x)
struct ExpTerm {
  double coef = 0.0;
  int power = 0;
  double rate = 0.0;
};

// Finite sum of ExpTerms. Closed under shifts, exponential tilts,
// differentiation, integration and convolution, which is what keeps the
// Brownian and Cramer-Lundberg closed forms free of numerical quadrature.
//
// Two rates closer than 1e-9 (relative) are treated as equal.
class ExpMixture {
 public:
  ExpMixture() = default;
  explicit ExpMixture(std::vector<ExpTerm> terms);

  static ExpMixture constant(double c);
  static ExpMixture exponential(double coef, double rate);

  double operator()(double x) const;

  ExpMixture derivative() const;
  // x -> int_lo^x f(z) dz
  ExpMixture integral_from(double lo) const;
  double integrate(double lo, double hi) const;
  // x -> f(x - s)
  ExpMixture shifted(double s) const;
  // x -> exp(rate x) f(x)
  ExpMixture tilted(double rate) const;

  ExpMixture& operator+=(const ExpMixture& other);
  ExpMixture& operator-=(const ExpMixture& other);
  ExpMixture& operator*=(double s);

  const std::vector<ExpTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

 private:
  void compact();
  std::vector<ExpTerm> terms_;
};

ExpMixture operator+(ExpMixture a, const ExpMixture& b);
ExpMixture operator-(ExpMixture a, const ExpMixture& b);
ExpMixture operator*(double s, ExpMixture a);

bool rates_equal(double a, double b);

// x -> int_lo^x k(x - z) f(z) dz, valid for x >= lo.
ExpMixture convolve_tail(const ExpMixture& k, const ExpMixture& f, double lo);

// x -> int_lo^hi k(x - z) f(z) dz, valid for x >= hi.
ExpMixture convolve_window(const ExpMixture& k, const ExpMixture& f, double lo, double hi);

}  // namespace omegascale
