#pragma once

#include <utility>
#include <vector>

#include "omegascale/exp_mixture.hpp"
#include "omegascale/levy_model.hpp"

namespace omegascale {

// Piecewise exponential mixture: pieces[k] holds on [knots[k], knots[k+1])
// (the last piece on [knots.back(), inf)) and the constant `below` left of
// knots[0].
class PiecewiseMixture {
 public:
  PiecewiseMixture() = default;
  PiecewiseMixture(double below, std::vector<double> knots, std::vector<ExpMixture> pieces);

  double operator()(double x) const;
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<ExpMixture>& pieces() const { return pieces_; }
  double below() const { return below_; }

  // x -> f(x) + s g(x) with g taken as 0 left of its first knot.
  PiecewiseMixture plus_scaled(double s, const PiecewiseMixture& g) const;
  // x -> int_lo^x k(x - z) f(z) dz for x >= lo, 0 below lo; f must have a
  // knot at or below lo.
  PiecewiseMixture convolve_from(const ExpMixture& k, double lo) const;

 private:
  double below_ = 0.0;
  std::vector<double> knots_;
  std::vector<ExpMixture> pieces_;
};

// Occupation-time building blocks for omega = p + q 1_{(a,b)}: W_a^(p,q),
// Z_a^(p,q) and H^(p,q), exact for Brownian drift and Cramer-Lundberg.
class BandScale {
 public:
  // Throws UnsupportedModelError for tabulated models, DomainError for
  // negative p, q.
  BandScale(const LevyModel& model, double p, double q, double a);

  double p() const { return p_; }
  double q() const { return q_; }
  double a() const { return a_; }

  // W^(p)(x) + q int_a^x W^(p+q)(x-y) W^(p)(y) dy
  double w(double x) const { return w_(x); }
  // W^(p+q)(x) - q int_0^a W^(p+q)(x-y) W^(p)(y) dy
  double w_first_line(double x) const { return w1_(x); }
  double z(double x) const { return z_(x); }
  double z_first_line(double x) const { return z1_(x); }
  // e^{Phi(p) x} (1 + q int_0^x e^{-Phi(p) y} W^(p+q)(y) dy)
  double h(double x) const;

  const PiecewiseMixture& w_mixture() const { return w_; }
  const PiecewiseMixture& z_mixture() const { return z_; }
  const ExpMixture& h_mixture() const { return h_; }

 private:
  double p_, q_, a_;
  double phi_p_;
  PiecewiseMixture w_, w1_, z_, z1_;
  ExpMixture h_;  // valid on x >= 0
};

double band_w(const LevyModel& model, double p, double q, double a, double x);
double band_z(const LevyModel& model, double p, double q, double a, double x);
double band_h(const LevyModel& model, double p, double q, double x);

// (W^(omega)(x), Z^(omega)(x)) for omega = p + q 1_{(a,b)}, 0 <= a <= b.
std::pair<double, double> band_composites(const LevyModel& model, double p, double q, double a, double b,
                                          double x);

// Exact omega-scale functions of the band omega = p + q 1_{(a,b)}, including
// the two-argument versions (any y) and, for a = 0, H^(omega), Xi and Theta.
class BandOmegaScale {
 public:
  BandOmegaScale(const LevyModel& model, double p, double q, double a, double b);

  double w(double x) const { return w_(x); }
  double z(double x) const { return z_(x); }
  // W^(omega)(x, y), Z^(omega)(x, y)
  double w(double x, double y) const;
  double z(double x, double y) const;
  // Requires a == 0 (omega = p on (-inf, 0]).
  double h(double x) const;
  double xi(double x, double c, double y) const;
  double theta(double x, double y) const;

 private:
  PiecewiseMixture two_arg_w(double y) const;
  PiecewiseMixture two_arg_z(double y) const;
  void require_floor() const;

  LevyModel model_;
  double p_, q_, a_, b_;
  PiecewiseMixture w_, z_;
};

// Omega model: Brownian surplus X = x + sigma B + mu t, bankruptcy rate
// omega(x) = (gamma0 + gamma1 (x + d)) 1_{[-d,0]}(x), absorption below -d.
struct OmegaModelSolution {
  double gamma0 = 0.0, gamma1 = 0.0, d = 1.0, mu = 1.0, sigma = 1.0;
  double m1 = 0.0, m2 = 0.0;
  double rho1 = 0.0, rho2 = 0.0, rho_bar = 0.0;
  double g_d = 0.0, g_prime_d = 0.0;
  double c_w_inv_inf = 0.0;  // 1/lim_c W^(omega)(c, -d)

  // g(z) = W^(omega)(z - d, -d) on [0, d] and its derivative.
  double g(double z) const;
  double g_prime(double z) const;
  // W^(omega)(x, -d) for any x (0 below -d).
  double w(double x) const;
  // Bankruptcy probability 1 - c W^(omega)(x, -d).
  double bankruptcy(double x) const;
  // For x > 0: e^{-2 mu x/sigma^2} (sigma^2 g'(d)/2mu)/(g(d) + sigma^2 g'(d)/2mu).
  double bankruptcy_positive(double x) const;
};

// Solves for m1, m2 from g(0) = 0, g'(0) = 2/sigma^2 (Airy/Bairy
// representation); gamma1 = 0 falls back to W^(gamma0). Needs mu, sigma, d > 0.
OmegaModelSolution omega_model(double gamma0, double gamma1, double d, double mu, double sigma);
double omega_model_bankruptcy(double gamma0, double gamma1, double d, double mu, double sigma, double x);

// Exponential omega = varrho e^{-xi x}.
// Brownian drift: Bessel-I forms; alpha = R/xi must not be an integer.
double selfsim_w_bm(double varrho, double xi, double mu, double sigma, double x);
double selfsim_z_bm(double varrho, double xi, double mu, double sigma, double x);
// W^(omega)(x, y) for the Brownian case.
double selfsim_w_bm_two_arg(double varrho, double xi, double mu, double sigma, double x, double y);
// Cramer-Lundberg: Kummer forms; varsigma and rho must avoid multiples of xi.
double selfsim_w_cl(double varrho, double xi, double mu, double vartheta, double rho, double x);
double selfsim_z_cl(double varrho, double xi, double mu, double vartheta, double rho, double x);

// E_x[exp(-varrho int_0^inf e^{-xi X_t} dt)] for X = sigma B + mu t, mu > 0.
double perpetual_exponential_functional(double varrho, double xi, double mu, double sigma, double x);

// Step omega = p_0 + sum_j (p_j - p_{j-1}) 1(x > x_j): W^(omega)(x, y) and
// Z^(omega)(x, y) by the level-by-level recursion on exponential mixtures.
double step_recursion_w(const std::vector<double>& levels, const std::vector<double>& cuts,
                        const LevyModel& model, double x, double y);
double step_recursion_z(const std::vector<double>& levels, const std::vector<double>& cuts,
                        const LevyModel& model, double x, double y);

}  // namespace omegascale
