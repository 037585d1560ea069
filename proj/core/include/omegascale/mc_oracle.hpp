#pragma once

#include <cstddef>
#include <cstdint>

#include "omegascale/levy_model.hpp"
#include "omegascale/omega_spec.hpp"

namespace omegascale {

enum class Estimator {
  // weight exp(-int omega): trapezoid per step for Brownian drift, exact
  // between jumps for Cramer-Lundberg
  exponential_weight,
  // marked Poisson clock of rate lambda = sup omega + margin; a mark at time
  // T kills with probability omega(X_T)/lambda
  poisson_thinning,
};

struct SimConfig {
  LevyModel model = BrownianDrift{};
  OmegaSpec omega;
  double dt = 1e-3;  // Brownian time step; Cramer-Lundberg paths are exact
  std::size_t n_paths = 100000;
  std::uint64_t seed = 1;
  double horizon_cap = 1e3;
  Estimator estimator = Estimator::exponential_weight;
  // Brownian-bridge barrier crossing within a step; off gives plain
  // step-crossing detection with its O(sqrt(dt)) bias.
  bool bridge_correction = true;
  double thinning_margin = 0.1;

  // Throws DomainError on dt <= 0, n_paths == 0 or horizon_cap <= 0 and
  // UnsupportedModelError for tabulated models.
  void validate() const;
};

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_effective = 0;  // paths that finished before horizon_cap
  double elapsed = 0.0;         // seconds
  double truncated_fraction = 0.0;

  bool flagged() const { return truncated_fraction > 0.01; }
};

struct ExitEstimate {
  MCEstimate a;  // E_x[exp(-int omega); tau_c^+ < tau_0^-]
  MCEstimate b;  // E_x[exp(-int omega); tau_0^- < tau_c^+]
};

// Two-sided exit from [0, c] started at x.
ExitEstimate simulate_exit(const SimConfig& cfg, double x, double c);

// E_x[exp(-int_0^{T_c} omega(Y_t) dt)] for Y = X - I reflected at its
// infimum; with dual set, Y = S - X started at x and killed at omega(c - Y).
MCEstimate simulate_reflected(const SimConfig& cfg, double x, double c, bool dual = false);

// E_x[exp(-int omega); tau_c^+ < inf]. Thinning needs omega bounded on
// (-inf, c], i.e. a floor.
MCEstimate simulate_one_sided_up(const SimConfig& cfg, double x, double c);

// Bankruptcy probability of the omega model: Brownian surplus (cfg.model),
// killing rate (gamma0 + gamma1 (x + d)) on [-d, 0] and absorption below -d.
// cfg.omega is ignored. Excursions above a regeneration level L return to 0
// with their exact probability exp(-2 mu X/sigma^2), so paths end a.s.
MCEstimate simulate_bankruptcy(const SimConfig& cfg, double gamma0, double gamma1, double d, double x);

}  // namespace omegascale
