#include "omegascale/omega_scale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "omegascale/classical_scale.hpp"
#include "omegascale/errors.hpp"

namespace omegascale {

namespace {

const Tabulated* as_table(const LevyModel& model) { return std::get_if<Tabulated>(&model); }

double resolve_delta(const LevyModel& model, const OmegaSpec& omega, double lo, double hi,
                     const BuildOptions& opts) {
  if (const auto* t = as_table(model)) {
    const double q = t->scale->q;
    if (opts.delta && std::abs(*opts.delta - q) > 1e-12 * std::max(1.0, q))
      throw PreconditionError("tabulated model: the shift level must equal the table's killing rate");
    return q;
  }
  if (opts.delta) {
    if (!(*opts.delta >= 0.0)) throw DomainError("shift level delta must be >= 0");
    return *opts.delta;
  }
  return omega.infimum(lo, hi);
}

struct Pieces {
  ScaleFunctions scale;
  VolterraProblem w;
  VolterraProblem z;
};

Pieces make_problems(const LevyModel& model, const OmegaSpec& omega, double delta, double extent, double h,
                     bool extrapolate = false) {
  validate(model);
  ScaleFunctions sf(model, delta);
  VolterraProblem base;
  base.kernel = [sf](double x) { return sf.w(x); };
  base.kernel_prime = [sf](double x) { return sf.wprime(x); };
  base.weight = omega.weight(delta);
  base.delta = delta;
  base.h = h;
  base.x_max = extent;
  base.extrapolate = extrapolate;

  VolterraProblem w = base;
  w.forcing = base.kernel;
  w.forcing_prime = base.kernel_prime;
  VolterraProblem z = base;
  z.forcing = [sf](double x) { return sf.z(x); };
  z.forcing_prime = [sf, delta](double x) { return x < 0.0 ? 0.0 : delta * sf.w(x); };
  return {sf, std::move(w), std::move(z)};
}

double fd(const std::function<double(double)>& f, double x, double h, double x_max) {
  if (x - h < 0.0 && x >= 0.0) return (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h);
  if (x + h > x_max) return (3.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h)) / (2.0 * h);
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

std::string describe(const LevyModel& model) { return model_name(model); }

}  // namespace

OmegaScale::OmegaScale(VolterraSolution w, VolterraSolution z, std::optional<VolterraSolution> h, double phi_rate,
                       OmegaScaleTable::Provenance provenance)
    : w_(std::move(w)), z_(std::move(z)), h_(std::move(h)), phi_rate_(phi_rate), provenance_(std::move(provenance)) {}

double OmegaScale::h(double x) const {
  if (!h_) throw PreconditionError("H^(omega) needs an omega with a floor (build_h_omega)");
  return (*h_)(x);
}

double OmegaScale::w_prime(double x) const {
  if (x < 0.0) return 0.0;
  return fd([this](double u) { return w_(u); }, x, w_.h(), w_.x_max());
}

double OmegaScale::z_prime(double x) const {
  if (x < 0.0) return 0.0;
  return fd([this](double u) { return z_(u); }, x, z_.h(), z_.x_max());
}

double OmegaScale::h_prime(double x) const {
  if (!h_) throw PreconditionError("H^(omega) needs an omega with a floor (build_h_omega)");
  if (x < 0.0) return phi_rate_ * std::exp(phi_rate_ * x);
  return fd([this](double u) { return (*h_)(u); }, x, h_->h(), h_->x_max());
}

OmegaScaleTable OmegaScale::table() const {
  OmegaScaleTable t;
  t.provenance = provenance_;
  t.x = w_.nodes();
  t.w_omega = w_.values();
  t.z_omega = z_.values();
  t.w_prime = w_.fd_derivative();
  t.z_prime = z_.fd_derivative();
  if (h_) {
    t.h_omega = h_->values();
    t.h_prime = h_->fd_derivative();
  }
  return t;
}

OmegaScale build_w_omega(const LevyModel& model, const OmegaSpec& omega, const Grid& grid, const BuildOptions& opts) {
  const double delta = resolve_delta(model, omega, 0.0, grid.x_max, opts);
  Pieces p = make_problems(model, omega, delta, grid.x_max, grid.h, opts.extrapolate);
  VolterraSolution w = solve(p.w);
  VolterraSolution z = solve(p.z);
  return OmegaScale(std::move(w), std::move(z), std::nullopt, 0.0,
                    {describe(model), omega.name(), delta, grid.h, w.x_max()});
}

OmegaScale build_h_omega(const LevyModel& model, const OmegaSpec& omega, const Grid& grid) {
  const auto floor = omega.floor();
  if (!floor) throw PreconditionError("H^(omega) requires omega to be constant on (-inf, 0]");
  const double phi = *floor;
  BuildOptions opts;
  opts.delta = phi;
  const double delta = resolve_delta(model, omega, 0.0, grid.x_max, opts);
  Pieces p = make_problems(model, omega, delta, grid.x_max, grid.h, opts.extrapolate);
  double rate = 0.0;
  if (const auto* t = as_table(model)) {
    rate = t->phi->at(phi);
  } else {
    rate = phi_inverse(model, phi);
  }
  VolterraProblem hp = p.w;
  hp.forcing = [rate](double x) { return std::exp(rate * x); };
  hp.forcing_prime = [rate](double x) { return rate * std::exp(rate * x); };
  VolterraSolution w = solve(p.w);
  VolterraSolution z = solve(p.z);
  VolterraSolution hs = solve(hp);
  return OmegaScale(std::move(w), std::move(z), std::move(hs), rate,
                    {describe(model), omega.name(), delta, grid.h, w.x_max()});
}

double TwoArgScale::w_prime(double x) const {
  if (x < y_) return 0.0;
  return fd([this](double u) { return w_(u); }, x - y_, w_.h(), w_.x_max());
}

TwoArgScale build_two_arg(const LevyModel& model, const OmegaSpec& omega, double y, const Grid& grid,
                          const BuildOptions& opts) {
  const double extent = std::max(grid.x_max - y, grid.h);
  const double delta = resolve_delta(model, omega, y, y + extent, opts);
  Pieces p = make_problems(model, omega, delta, extent, grid.h, opts.extrapolate);
  VolterraSolution w = solve_shifted(p.w, y);
  VolterraSolution z = solve_shifted(p.z, y);
  return TwoArgScale(y, std::move(w), std::move(z));
}

LimitConstants limit_constants(const LevyModel& model, const OmegaSpec& omega, const Grid& grid,
                               const LimitOptions& opts) {
  LimitConstants out;
  validate(model);
  bool oscillating = false;
  if (!as_table(model)) oscillating = std::abs(psi_prime(model, 0.0)) <= 1e-14;

  // One shift level and one grid step for every level of the doubling, so
  // that successive values differ by the tail only, not by discretisation.
  const double delta = resolve_delta(model, omega, 0.0, opts.c_cap, {});
  const double support = omega.weight(delta).support_end;
  const double needed = std::min(opts.c_cap, std::max(grid.x_max, support));
  const double h = std::max(grid.h, needed / static_cast<double>(opts.max_nodes));

  double c = std::max(grid.x_max, h);
  double prev_w = std::numeric_limits<double>::quiet_NaN();
  double prev_z = prev_w;
  bool settled = false;
  while (true) {
    const double extent = std::min(c, std::max(grid.x_max, support));
    double vw, vz;
    try {
      Pieces p = make_problems(model, omega, delta, extent, h);
      const VolterraSolution w = solve(p.w);
      const VolterraSolution z = solve(p.z);
      const double wc = w(c);
      vw = 1.0 / wc;
      vz = z(c) / wc;
      if (!std::isfinite(vw) || !std::isfinite(vz)) throw NonFiniteError("non-finite ratio");
    } catch (const NonFiniteError&) {
      out.note = "scale function overflowed at c = " + std::to_string(c);
      break;
    }
    out.c_w_inv_inf = vw;
    out.c_z_over_w_inf = vz;
    out.c_used = c;
    if (!std::isnan(prev_w)) {
      const bool dw = std::abs(vw - prev_w) <= opts.tol * std::max(1.0, std::abs(vw));
      const bool dz = std::abs(vz - prev_z) <= opts.tol * std::max(1.0, std::abs(vz));
      if (dw && dz) {
        settled = true;
        break;
      }
    }
    prev_w = vw;
    prev_z = vz;
    if (c >= opts.c_cap) {
      out.note = "c_cap reached before the sequences settled";
      break;
    }
    c = std::min(2.0 * c, opts.c_cap);
  }
  out.converged = settled && !oscillating;
  if (oscillating) out.note = "process oscillates; limit not decided";
  return out;
}

}  // namespace omegascale
