#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "omegascale/levy_model.hpp"
#include "omegascale/omega_scale.hpp"
#include "omegascale/omega_spec.hpp"

namespace omegascale {

// Everything needed to solve further renewal equations on demand (the
// two-argument scale functions behind the resolvent densities).
struct ScaleContext {
  LevyModel model;
  OmegaSpec omega;
  Grid grid;
  BuildOptions opts;
};

// Exit identities. Barriers are 0 (below) and c (above); tables must cover c.
// Throws DomainError when x > c or c lies outside the solved window.

// E_x[exp(-int omega); tau_c^+ < tau_0^-] = W(x)/W(c)
double exit_a(double x, double c, const OmegaScale& s);
// E_x[exp(-int omega); tau_0^- < tau_c^+] = Z(x) - W(x) Z(c)/W(c)
double exit_b(double x, double c, const OmegaScale& s);
// (survival without ruin, ruin) in the limit c -> infinity. Throws
// PreconditionError unless the limits converged.
std::pair<double, double> one_sided_down(double x, const OmegaScale& s, const LimitConstants& limits);
// E_x[exp(-int omega); tau_c^+ < inf] = H(x)/H(c); needs H^(omega).
double one_sided_up(double x, double c, const OmegaScale& s);
// Process reflected at its infimum: Z(x)/Z(c).
double reflected_up(double x, double c, const OmegaScale& s);
// Process reflected at its supremum, killed at omega(c - Y):
// Z(c-x) - W(c-x) Z'(c)/W'(c).
double reflected_dual(double x, double c, const OmegaScale& s);

enum class ResolventKind { U, Xi, Theta, L, LHat };

struct ResolventDensity {
  ResolventKind kind = ResolventKind::U;
  double x = 0.0;
  // Ascending; a repeated abscissa carries the left and right limits of a
  // jump of the density.
  std::vector<double> y;
  std::vector<double> density;
  std::optional<double> atom_at_zero;  // L-hat only
};

struct PanelOptions {
  std::size_t nodes = 400;
  // Lower end of the y range for Xi and Theta (which live on unbounded
  // sets); defaults to x - 10.
  std::optional<double> y_lo;
  // Upper end of the y range for Theta; defaults to x + 10.
  std::optional<double> y_hi;
  // Each y needs one renewal solve; its grid is coarsened beyond this size.
  std::size_t max_solve_nodes = 4000;
};

// Panel abscissae on [lo, hi]: uniform pieces between the required points,
// which are all included; `split` (if inside) appears twice.
std::vector<double> panel_nodes(double lo, double hi, std::size_t nodes, const std::vector<double>& required,
                                std::optional<double> split);

// u(x,y) = W(x) W(c,y)/W(c) - W(x,y), y in [0, c].
ResolventDensity resolvent_u(const ScaleContext& ctx, const OmegaScale& s, double x, double c,
                             const PanelOptions& opts = {});
// Xi(x,y) = H(x) W(c,y)/H(c) - W(x,y), y <= c. Needs H^(omega).
ResolventDensity resolvent_xi(const ScaleContext& ctx, const OmegaScale& s, double x, double c,
                              const PanelOptions& opts = {});
// Potential density without exit, for omega with a floor phi and a ceiling
// (q, upsilon); q > 0 or phi > 0. Needs H^(omega) on [0, max(x, upsilon)].
ResolventDensity resolvent_theta(const ScaleContext& ctx, const OmegaScale& s, double x,
                                 const PanelOptions& opts = {});
// l(x,y) = Z(x) W(c,y)/Z(c) - W(x,y), y in [0, c).
ResolventDensity resolvent_l(const ScaleContext& ctx, const OmegaScale& s, double x, double c,
                             const PanelOptions& opts = {});
// Dual reflected process: density W(c-x)/W'(c) d/dx W(c, c-y) - W(c-x, c-y)
// plus the atom W(c-x) W(0)/W'(c) at y = 0.
ResolventDensity resolvent_l_hat(const ScaleContext& ctx, const OmegaScale& s, double x, double c,
                                 const PanelOptions& opts = {});

// int f(y) density(y) dy with the density interpolated linearly between
// panel nodes and f integrated exactly per cell (f = omega, or any weight).
double integrate_density(const ResolventDensity& r, const Weight& f);

}  // namespace omegascale
