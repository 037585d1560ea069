#include "omegascale/fluctuation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "omegascale/classical_scale.hpp"
#include "omegascale/errors.hpp"
#include "omegascale/exp_mixture.hpp"
#include "omegascale/volterra.hpp"
#include "parallel.hpp"

namespace omegascale {

namespace {

void check_order(double x, double c, const OmegaScale& s, const char* what) {
  if (x > c) throw DomainError(std::string(what) + ": requires x <= c");
  if (c > s.x_max() * (1.0 + 1e-12) + 1e-12)
    throw DomainError(std::string(what) + ": c lies beyond the solved window");
}

// Which side of a jump of the density a panel node represents.
enum class Side { Left, Right };

Side side_of(const std::vector<double>& ys, std::size_t i) {
  if (i + 1 < ys.size() && ys[i + 1] == ys[i]) return Side::Left;
  if (i > 0 && ys[i - 1] == ys[i]) return Side::Right;
  return i == 0 ? Side::Right : Side::Left;
}

// Solves x -> W(x, y) on [y, x_top] with a grid no finer than the context's.
TwoArgScale two_arg(const ScaleContext& ctx, double y, double x_top, const PanelOptions& opts) {
  const double extent = std::max(x_top - y, ctx.grid.h);
  const double h = std::max(ctx.grid.h, extent / static_cast<double>(opts.max_solve_nodes));
  return build_two_arg(ctx.model, ctx.omega, y, Grid{y + extent, h}, ctx.opts);
}

std::vector<double> breakpoints_in(const OmegaSpec& omega, double lo, double hi) {
  std::vector<double> out;
  for (double b : omega.breakpoints())
    if (b > lo && b < hi) out.push_back(b);
  return out;
}

// Evaluates f once per distinct abscissa (they may repeat) in parallel.
template <class F>
std::vector<double> per_node(const std::vector<double>& ys, F&& f) {
  std::vector<std::size_t> firsts;
  for (std::size_t i = 0; i < ys.size(); ++i)
    if (i == 0 || ys[i] != ys[i - 1]) firsts.push_back(i);
  std::vector<double> out(ys.size());
  detail::parallel_for(firsts.size(), [&](std::size_t k) {
    const std::size_t i = firsts[k];
    const std::size_t end = k + 1 < firsts.size() ? firsts[k + 1] : ys.size();
    f(i, end, out);
  });
  return out;
}

// With a floor phi, W^(phi)(u) = kappa e^{Phi(phi) u} + rest(u) on u >= 0. For
// y < 0 the weight omega - phi vanishes on [y, 0], so
//   W(x, y) = kappa e^{-Phi y} H(x) + S[rest(. - y)](x),
// S being the renewal solution operator on [0, x_top]. Ratios such as Xi
// cancel the growing first term exactly and only see the decaying second.
struct FloorSplit {
  double phi = 0.0;
  double kappa = 0.0;
  double rate = 0.0;
  ExpMixture rest;
};

std::optional<FloorSplit> floor_split(const ScaleContext& ctx) {
  const auto floor = ctx.omega.floor();
  if (!floor || !has_closed_form(ctx.model)) return std::nullopt;
  if (ctx.opts.delta && *ctx.opts.delta != *floor) return std::nullopt;
  FloorSplit out;
  out.phi = *floor;
  out.rate = phi_inverse(ctx.model, out.phi);
  bool found = false;
  std::vector<ExpTerm> rest;
  const ClassicalScale cs = classical_scale(ctx.model, out.phi);
  for (const ExpTerm& t : cs.w.terms()) {
    if (!rates_equal(t.rate, out.rate)) {
      if (t.power != 0) return std::nullopt;
      rest.push_back(t);
    } else if (t.power == 0 && !found) {
      out.kappa = t.coef;
      found = true;
    } else {
      return std::nullopt;  // confluent roots
    }
  }
  if (!found) return std::nullopt;
  out.rest = ExpMixture(std::move(rest));
  return out;
}

// x -> S[rest(. - y)](x) on [0, x_top]; below 0 it is the forcing itself.
VolterraSolution remainder_solve(const ScaleContext& ctx, const FloorSplit& split, double y, double x_top,
                                 const PanelOptions& opts) {
  const double extent = std::max(x_top, ctx.grid.h);
  const ScaleFunctions sf(ctx.model, split.phi);
  VolterraProblem p;
  p.kernel = [sf](double x) { return sf.w(x); };
  p.forcing = [rest = split.rest, kappa = split.kappa, rate = split.rate, y](double x) {
    const double u = x - y;
    return u >= 0.0 ? rest(u) : -kappa * std::exp(rate * u);
  };
  p.weight = ctx.omega.weight(split.phi);
  p.delta = split.phi;
  p.h = std::max(ctx.grid.h, extent / static_cast<double>(opts.max_solve_nodes));
  p.x_max = extent;
  return solve(p);
}

}  // namespace

double exit_a(double x, double c, const OmegaScale& s) {
  check_order(x, c, s, "exit_a");
  if (x < 0.0) return 0.0;
  return s.w(x) / s.w(c);
}

double exit_b(double x, double c, const OmegaScale& s) {
  check_order(x, c, s, "exit_b");
  if (x < 0.0) return 1.0;
  return s.z(x) - s.w(x) * s.z(c) / s.w(c);
}

std::pair<double, double> one_sided_down(double x, const OmegaScale& s, const LimitConstants& limits) {
  if (!limits.converged) throw PreconditionError("one_sided_down: limit constants did not converge");
  if (x < 0.0) return {0.0, 1.0};
  if (x > s.x_max() * (1.0 + 1e-12)) throw DomainError("one_sided_down: x lies beyond the solved window");
  const double w = s.w(x);
  return {limits.c_w_inv_inf * w, s.z(x) - limits.c_z_over_w_inf * w};
}

double one_sided_up(double x, double c, const OmegaScale& s) {
  check_order(x, c, s, "one_sided_up");
  return s.h(x) / s.h(c);
}

double reflected_up(double x, double c, const OmegaScale& s) {
  check_order(x, c, s, "reflected_up");
  if (x < 0.0) throw DomainError("reflected_up: requires x >= 0");
  return s.z(x) / s.z(c);
}

double reflected_dual(double x, double c, const OmegaScale& s) {
  check_order(x, c, s, "reflected_dual");
  if (x < 0.0) throw DomainError("reflected_dual: requires x >= 0");
  const double wp = s.w_prime(c);
  if (!(wp > 0.0)) throw NonFiniteError("reflected_dual: W'(c) is not positive");
  return s.z(c - x) - s.w(c - x) * s.z_prime(c) / wp;
}

std::vector<double> panel_nodes(double lo, double hi, std::size_t nodes, const std::vector<double>& required,
                                std::optional<double> split) {
  if (!(hi > lo)) throw DomainError("panel: empty y range");
  std::vector<double> knots{lo, hi};
  for (double r : required)
    if (r > lo && r < hi) knots.push_back(r);
  if (split && *split > lo && *split < hi) knots.push_back(*split);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  const std::size_t pieces = knots.size() - 1;
  const bool dup = split && *split > lo && *split < hi;
  if (nodes < knots.size() + (dup ? 1 : 0))
    throw DomainError("panel: node budget " + std::to_string(nodes) + " is below the number of required points");
  const std::size_t spare = nodes - knots.size() - (dup ? 1 : 0);
  std::vector<double> out;
  out.reserve(nodes);
  for (std::size_t k = 0; k < pieces; ++k) {
    const double a = knots[k];
    const double b = knots[k + 1];
    const auto inner = static_cast<std::size_t>(std::floor(static_cast<double>(spare) * (b - a) / (hi - lo)));
    out.push_back(a);
    if (dup && a == *split) out.push_back(a);
    for (std::size_t j = 1; j <= inner; ++j) out.push_back(a + (b - a) * static_cast<double>(j) / (inner + 1.0));
  }
  out.push_back(hi);
  return out;
}

ResolventDensity resolvent_u(const ScaleContext& ctx, const OmegaScale& s, double x, double c,
                             const PanelOptions& opts) {
  check_order(x, c, s, "resolvent_u");
  if (x < 0.0) throw DomainError("resolvent_u: requires x >= 0");
  ResolventDensity r;
  r.kind = ResolventKind::U;
  r.x = x;
  r.y = panel_nodes(0.0, c, opts.nodes, breakpoints_in(ctx.omega, 0.0, c), x);
  const double ratio = s.w(x) / s.w(c);
  r.density = per_node(r.y, [&](std::size_t i, std::size_t end, std::vector<double>& out) {
    const double y = r.y[i];
    const TwoArgScale t = two_arg(ctx, y, c, opts);
    const double wc = t.w(c);
    const double wx = y <= x ? t.w(x) : 0.0;
    for (std::size_t k = i; k < end; ++k) {
      const bool below = y < x || (y == x && side_of(r.y, k) == Side::Left);
      out[k] = ratio * wc - (below ? wx : 0.0);
    }
  });
  return r;
}

ResolventDensity resolvent_l(const ScaleContext& ctx, const OmegaScale& s, double x, double c,
                             const PanelOptions& opts) {
  check_order(x, c, s, "resolvent_l");
  if (x < 0.0) throw DomainError("resolvent_l: requires x >= 0");
  ResolventDensity r;
  r.kind = ResolventKind::L;
  r.x = x;
  r.y = panel_nodes(0.0, c, opts.nodes, breakpoints_in(ctx.omega, 0.0, c), x);
  const double ratio = s.z(x) / s.z(c);
  r.density = per_node(r.y, [&](std::size_t i, std::size_t end, std::vector<double>& out) {
    const double y = r.y[i];
    const TwoArgScale t = two_arg(ctx, y, c, opts);
    const double wc = t.w(c);
    const double wx = y <= x ? t.w(x) : 0.0;
    for (std::size_t k = i; k < end; ++k) {
      const bool below = y < x || (y == x && side_of(r.y, k) == Side::Left);
      out[k] = ratio * wc - (below ? wx : 0.0);
    }
  });
  return r;
}

ResolventDensity resolvent_xi(const ScaleContext& ctx, const OmegaScale& s, double x, double c,
                              const PanelOptions& opts) {
  check_order(x, c, s, "resolvent_xi");
  ResolventDensity r;
  r.kind = ResolventKind::Xi;
  r.x = x;
  const double lo = opts.y_lo.value_or(x - 10.0);
  if (!(lo < std::min(x, c))) throw DomainError("resolvent_xi: y_lo must lie below x");
  std::vector<double> req = breakpoints_in(ctx.omega, lo, c);
  if (lo < 0.0 && c > 0.0) req.push_back(0.0);
  r.y = panel_nodes(lo, c, opts.nodes, req, x);
  const double ratio = s.h(x) / s.h(c);
  const auto split = floor_split(ctx);
  r.density = per_node(r.y, [&](std::size_t i, std::size_t end, std::vector<double>& out) {
    const double y = r.y[i];
    double wc, wx;
    if (split && y < 0.0 && c >= 0.0) {
      const VolterraSolution rs = remainder_solve(ctx, *split, y, c, opts);
      wc = rs(c);
      wx = y <= x ? rs(x) : 0.0;
    } else {
      const TwoArgScale t = two_arg(ctx, y, c, opts);
      wc = t.w(c);
      wx = y <= x ? t.w(x) : 0.0;
    }
    for (std::size_t k = i; k < end; ++k) {
      const bool below = y < x || (y == x && side_of(r.y, k) == Side::Left);
      out[k] = ratio * wc - (below ? wx : 0.0);
    }
  });
  return r;
}

ResolventDensity resolvent_theta(const ScaleContext& ctx, const OmegaScale& s, double x,
                                 const PanelOptions& opts) {
  const auto floor = ctx.omega.floor();
  const auto ceil = ctx.omega.ceiling();
  if (!floor || !ceil) throw PreconditionError("resolvent_theta: omega needs a floor and a ceiling");
  const double phi = *floor;
  const double q = ceil->first;
  const double upsilon = ceil->second;
  if (!(q > 0.0 || phi > 0.0)) throw PreconditionError("resolvent_theta: needs q > 0 or phi > 0");
  if (std::max(x, upsilon) > s.x_max() * (1.0 + 1e-12) + 1e-12)
    throw DomainError("resolvent_theta: H^(omega) must cover max(x, upsilon)");

  const double rate_q = phi_inverse(ctx.model, q);
  double d;
  if (std::abs(phi - q) <= 1e-12 * std::max(1.0, q)) {
    d = 1.0 / phi_inverse_prime(ctx.model, phi);
  } else {
    d = (q - phi) / (rate_q - phi_inverse(ctx.model, phi));
  }

  Weight tilt;
  tilt.fn = [&ctx, rate_q, q](double z) { return std::exp(-rate_q * z) * (ctx.omega.value(z) - q); };
  tilt.breaks = ctx.omega.breakpoints();
  tilt.support_end = upsilon;

  // Samples x -> f(x) on from, from + h, ..., closed at `to`.
  auto sample = [](const auto& f, double h, double from, double to, std::vector<double>& zs,
                   std::vector<double>& gs) {
    const auto n = static_cast<std::size_t>(std::ceil((to - from) / h - 1e-9));
    for (std::size_t k = 0; k < n; ++k) {
      zs.push_back(from + static_cast<double>(k) * h);
      gs.push_back(f(zs.back()));
    }
    zs.push_back(to);
    gs.push_back(f(to));
  };

  double den = d;
  if (upsilon > 0.0) {
    std::vector<double> zs, gs;
    sample([&](double z) { return s.h(z); }, s.h_step(), 0.0, upsilon, zs, gs);
    den += integrate_weighted_linear(tilt, zs, gs);
  }

  ResolventDensity r;
  r.kind = ResolventKind::Theta;
  r.x = x;
  const double lo = opts.y_lo.value_or(x - 10.0);
  const double hi = opts.y_hi.value_or(x + 10.0);
  std::vector<double> req = breakpoints_in(ctx.omega, lo, hi);
  if (lo < 0.0 && hi > 0.0) req.push_back(0.0);
  if (upsilon > lo && upsilon < hi) req.push_back(upsilon);
  r.y = panel_nodes(lo, hi, opts.nodes, req, x);
  const double hx = s.h(x);
  const auto split = floor_split(ctx);
  r.density = per_node(r.y, [&](std::size_t i, std::size_t end, std::vector<double>& out) {
    const double y = r.y[i];
    if (split && y < 0.0) {
      // Substituting W(z, y) = kappa e^{-Phi y} H(z) + S_y(z) into the
      // numerator, the e^{-Phi y} and e^{-Phi(q) y} parts cancel against the
      // denominator and against the [y, 0] integral of the rest terms,
      // which is (phi - q) sum_k a_k e^{-r_k y}/(r_k - Phi(q)).
      double num = 0.0;
      if (phi != q)
        for (const ExpTerm& t : split->rest.terms()) num += (phi - q) * t.coef * std::exp(-t.rate * y) / (t.rate - rate_q);
      const double top = std::max(x, upsilon);
      const VolterraSolution rs = remainder_solve(ctx, *split, y, top, opts);
      if (upsilon > 0.0) {
        std::vector<double> zs, gs;
        sample([&](double z) { return rs(z); }, rs.h(), 0.0, upsilon, zs, gs);
        num += integrate_weighted_linear(tilt, zs, gs);
      }
      const double base = num / den * hx;
      const double sx = y <= x ? rs(x) : 0.0;
      const double above = split->kappa * std::exp(-split->rate * y) * hx;
      for (std::size_t k = i; k < end; ++k) {
        const bool below = y < x || (y == x && side_of(r.y, k) == Side::Left);
        out[k] = base - (below ? sx : -above);
      }
      return;
    }
    double num = std::exp(-rate_q * y);
    double wx = 0.0;
    const double top = std::max(x, upsilon);
    if (y < top) {
      const TwoArgScale t = two_arg(ctx, y, top, opts);
      if (y < upsilon) {
        std::vector<double> zs, gs;
        sample([&](double z) { return t.w(z); }, t.w_solution().h(), y, upsilon, zs, gs);
        num += integrate_weighted_linear(tilt, zs, gs);
      }
      if (y <= x) wx = t.w(x);
    } else if (y == x) {
      wx = scale_atom(ctx.model);
    }
    for (std::size_t k = i; k < end; ++k) {
      const bool below = y < x || (y == x && side_of(r.y, k) == Side::Left);
      out[k] = num / den * hx - (below ? wx : 0.0);
    }
  });
  return r;
}

ResolventDensity resolvent_l_hat(const ScaleContext& ctx, const OmegaScale& s, double x, double c,
                                 const PanelOptions& opts) {
  check_order(x, c, s, "resolvent_l_hat");
  if (x < 0.0) throw DomainError("resolvent_l_hat: requires x >= 0");
  const double wp = s.w_prime(c);
  if (!(wp > 0.0)) throw NonFiniteError("resolvent_l_hat: W'(c) is not positive");
  const double lead = s.w(c - x) / wp;

  ResolventDensity r;
  r.kind = ResolventKind::LHat;
  r.x = x;
  r.atom_at_zero = lead * s.w(0.0);
  std::vector<double> req;
  for (double b : ctx.omega.breakpoints())
    if (c - b > 0.0 && c - b < c) req.push_back(c - b);
  r.y = panel_nodes(0.0, c, opts.nodes, req, x);
  const double h = ctx.grid.h;
  r.density = per_node(r.y, [&](std::size_t i, std::size_t end, std::vector<double>& out) {
    const double y = r.y[i];
    const double base = c - y;
    // room for a central difference at c
    const TwoArgScale t = two_arg(ctx, base, c + 2.0 * h, opts);
    const double dw = t.w_prime(c);
    const double sub = y >= x ? t.w(c - x) : 0.0;
    for (std::size_t k = i; k < end; ++k) {
      const bool above = y > x || (y == x && side_of(r.y, k) == Side::Right);
      out[k] = lead * dw - (above ? sub : 0.0);
    }
  });
  return r;
}

double integrate_density(const ResolventDensity& r, const Weight& f) {
  return integrate_weighted_linear(f, r.y, r.density);
}

}  // namespace omegascale
