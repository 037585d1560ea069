#pragma once

#include <optional>
#include <string>
#include <vector>

#include "omegascale/levy_model.hpp"
#include "omegascale/omega_spec.hpp"
#include "omegascale/volterra.hpp"

namespace omegascale {

struct Grid {
  double x_max = 1.0;
  double h = 1e-3;
};

struct BuildOptions {
  // Shift level of the renewal equation; defaults to inf omega over the
  // solve window. Any value >= 0 gives the same solution up to discretisation.
  std::optional<double> delta;
  // Richardson-combine the solves on h and h/2 (see VolterraProblem).
  bool extrapolate = false;
};

struct OmegaScaleTable {
  std::vector<double> x;
  std::vector<double> w_omega;
  std::vector<double> z_omega;
  std::vector<double> h_omega;  // empty unless built with a floor
  std::vector<double> w_prime;
  std::vector<double> z_prime;
  std::vector<double> h_prime;

  struct Provenance {
    std::string model;
    std::string omega;
    double delta = 0.0;
    double h = 0.0;
    double x_max = 0.0;
  } provenance;
};

// W^(omega), Z^(omega) and optionally H^(omega) as solved renewal equations.
// Off-grid values use the equation itself as interpolant.
class OmegaScale {
 public:
  OmegaScale(VolterraSolution w, VolterraSolution z, std::optional<VolterraSolution> h, double phi_floor,
             OmegaScaleTable::Provenance provenance);

  // 0 below 0.
  double w(double x) const { return w_(x); }
  // 1 below 0.
  double z(double x) const { return z_(x); }
  bool has_h() const { return h_.has_value(); }
  // exp(Phi(phi) x) below 0. Throws PreconditionError without a floor.
  double h(double x) const;

  // Finite differences of the Nystrom interpolant with step equal to the
  // grid step: central inside, one-sided second order near the ends.
  double w_prime(double x) const;
  double z_prime(double x) const;
  double h_prime(double x) const;

  // Derivatives by differentiating the renewal equation under the integral.
  double w_prime_quadrature(double x) const { return w_.derivative_quadrature(x); }
  double z_prime_quadrature(double x) const { return z_.derivative_quadrature(x); }

  double x_max() const { return w_.x_max(); }
  double h_step() const { return w_.h(); }
  double delta() const { return provenance_.delta; }
  const VolterraSolution& w_solution() const { return w_; }
  const VolterraSolution& z_solution() const { return z_; }

  // Grid samples with finite-difference derivatives filled in.
  OmegaScaleTable table() const;

 private:
  VolterraSolution w_;
  VolterraSolution z_;
  std::optional<VolterraSolution> h_;
  double phi_rate_ = 0.0;
  OmegaScaleTable::Provenance provenance_;
};

OmegaScale build_w_omega(const LevyModel& model, const OmegaSpec& omega, const Grid& grid,
                         const BuildOptions& opts = {});

// Also solves for H^(omega); requires omega.floor(). The shift level is the
// floor phi. Throws PreconditionError without a floor.
OmegaScale build_h_omega(const LevyModel& model, const OmegaSpec& omega, const Grid& grid);

// x -> W^(omega)(x, y) and Z^(omega)(x, y), solved on [y, x_max].
class TwoArgScale {
 public:
  TwoArgScale(double y, VolterraSolution w, VolterraSolution z) : y_(y), w_(std::move(w)), z_(std::move(z)) {}

  double y() const { return y_; }
  double x_max() const { return y_ + w_.x_max(); }
  // 0 for x < y.
  double w(double x) const { return w_(x - y_); }
  // 1 for x < y.
  double z(double x) const { return z_(x - y_); }
  double w_prime(double x) const;
  const VolterraSolution& w_solution() const { return w_; }
  const VolterraSolution& z_solution() const { return z_; }

 private:
  double y_;
  VolterraSolution w_;
  VolterraSolution z_;
};

// grid.x_max is the largest x at which the result is needed (absolute, not
// relative to y).
TwoArgScale build_two_arg(const LevyModel& model, const OmegaSpec& omega, double y, const Grid& grid,
                          const BuildOptions& opts = {});

struct LimitConstants {
  double c_w_inv_inf = 0.0;    // lim 1/W^(omega)(c)
  double c_z_over_w_inf = 0.0;  // lim Z^(omega)(c)/W^(omega)(c)
  bool converged = false;
  double c_used = 0.0;
  std::string note;
};

struct LimitOptions {
  double tol = 1e-8;
  double c_cap = 256.0;
  std::size_t max_nodes = 16000;
};

// Doubles c from grid.x_max until both sequences move by less than
// tol max(1, |value|) or c_cap is reached. Non-convergence is reported via
// `converged`, never thrown. Oscillating processes are never marked converged.
LimitConstants limit_constants(const LevyModel& model, const OmegaSpec& omega, const Grid& grid,
                               const LimitOptions& opts = {});

}  // namespace omegascale
