#pragma once

#include <memory>
#include <variant>

#include "omegascale/scale_table.hpp"

namespace omegascale {

// X_t = mu t + sigma B_t.
struct BrownianDrift {
  double mu = 0.0;
  double sigma = 1.0;
};

// X_t = mu t - (compound Poisson with intensity vartheta, Exp(rho) jumps).
struct CramerLundberg {
  double mu = 1.0;
  double vartheta = 0.0;
  double rho = 1.0;

  // Adjustment quantity rho - vartheta/mu; psi(s) = mu s (s + varsigma)/(s + rho).
  double varsigma() const { return rho - vartheta / mu; }
};

// Arbitrary spectrally negative model known only through a scale table and a
// Phi table. No Laplace exponent is available.
struct Tabulated {
  std::shared_ptr<const ScaleTable> scale;
  std::shared_ptr<const PhiTable> phi;
};

using LevyModel = std::variant<BrownianDrift, CramerLundberg, Tabulated>;

// Throws DomainError when the parameters describe the negative of a
// subordinator or are otherwise unusable.
void validate(const LevyModel& model);

const char* model_name(const LevyModel& model);

// Laplace exponent. Throws DomainError for theta < 0 and
// UnsupportedModelError for tabulated models.
double psi(const LevyModel& model, double theta);
double psi_prime(const LevyModel& model, double theta);

// Right-continuous inverse of psi. Bracketed Newton with bisection fallback;
// residual |psi(Phi(q)) - q| <= 1e-12 max(1, q). Throws ConvergenceError.
double phi_inverse(const LevyModel& model, double q);

// Phi'(q) = 1/psi'(Phi(q)).
double phi_inverse_prime(const LevyModel& model, double q);

// Closed-form models: Brownian drift and Cramer-Lundberg.
bool has_closed_form(const LevyModel& model);

// Atom of the scale function at zero: 0 with a Gaussian part, 1/mu for
// bounded variation.
double scale_atom(const LevyModel& model);

}  // namespace omegascale
