#include "omegascale/mc_oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "omegascale/errors.hpp"
#include "omegascale/rng.hpp"
#include "parallel.hpp"

namespace omegascale {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  double a = 0.0;
  double b = 0.0;
  bool truncated = false;
};

// Killing bookkeeping shared by both estimators.
class Killer {
 public:
  Killer(bool thinning, double lambda, PhiloxStream& rng) : thin_(thinning), lambda_(lambda), rng_(rng) {
    if (thin_) remaining_ = next_gap();
  }

  // Step length for a nominal step dt: thinning stops at the next mark.
  double step(double dt) const { return thin_ ? std::min(dt, remaining_) : dt; }
  double time_to_mark() const { return thin_ ? remaining_ : kInf; }

  // Trapezoid accumulation of int omega over a step (weight estimator only).
  void trapezoid(double w0, double w1, double s) {
    if (!thin_) log_w_ += 0.5 * (w0 + w1) * s;
  }
  void integral(double v) {
    if (!thin_) log_w_ += v;
  }

  // Advance the mark clock by s; true when a mark falls at the end.
  bool advance(double s) {
    if (!thin_) return false;
    remaining_ -= s;
    return remaining_ <= 0.0;
  }
  // Mark at the current position; true means killed.
  bool mark(double rate) {
    remaining_ = next_gap();
    return rng_.uniform() * lambda_ < rate;
  }

  double weight() const { return thin_ ? 1.0 : std::exp(-log_w_); }

 private:
  double next_gap() { return lambda_ > 0.0 ? rng_.exponential(lambda_) : kInf; }

  bool thin_;
  double lambda_;
  PhiloxStream& rng_;
  double remaining_ = kInf;
  double log_w_ = 0.0;
};

struct Context {
  const SimConfig& cfg;
  double lambda = 0.0;
  bool thinning() const { return cfg.estimator == Estimator::poisson_thinning; }
};

// Probability that a Brownian bridge from u to v (both on the same side of
// the level) over time s touches the level.
double bridge_cross(double u, double v, double level, double sigma, double s) {
  return std::exp(-2.0 * (u - level) * (v - level) / (sigma * sigma * s));
}

bool crossed(PhiloxStream& rng, const Context& ctx, double u, double v, double level, double sigma, double s) {
  if (!ctx.cfg.bridge_correction) return false;
  return rng.uniform() < bridge_cross(u, v, level, sigma, s);
}

// ---- Brownian drift ----

Outcome bm_exit(const Context& ctx, const BrownianDrift& m, PhiloxStream& rng, double x, double c, bool lower) {
  const auto& w = ctx.cfg.omega;
  Killer k(ctx.thinning(), ctx.lambda, rng);
  double X = x;
  double t = 0.0;
  double wx = w(X);
  while (true) {
    if (t >= ctx.cfg.horizon_cap) return {0.0, 0.0, true};
    const double s = k.step(ctx.cfg.dt);
    const double Xn = X + m.mu * s + m.sigma * std::sqrt(s) * rng.normal();
    const double wn = w(Xn);
    k.trapezoid(wx, wn, s);
    t += s;
    if (lower && (Xn <= 0.0 || crossed(rng, ctx, X, Xn, 0.0, m.sigma, s))) return {0.0, k.weight(), false};
    if (Xn >= c || crossed(rng, ctx, X, Xn, c, m.sigma, s)) return {k.weight(), 0.0, false};
    X = Xn;
    wx = wn;
    if (k.advance(s) && k.mark(wx)) return {};
  }
}

Outcome bm_reflected(const Context& ctx, const BrownianDrift& m, PhiloxStream& rng, double x, double c, bool dual) {
  const auto& w = ctx.cfg.omega;
  auto rate = [&](double y) { return dual ? w(c - y) : w(y); };
  const double drift = dual ? -m.mu : m.mu;
  Killer k(ctx.thinning(), ctx.lambda, rng);
  double Y = x;
  double t = 0.0;
  double wy = rate(Y);
  while (true) {
    if (t >= ctx.cfg.horizon_cap) return {0.0, 0.0, true};
    const double s = k.step(ctx.cfg.dt);
    const double free = Y + drift * s + m.sigma * std::sqrt(s) * rng.normal();
    double low = std::min(Y, free);
    if (ctx.cfg.bridge_correction) {
      const double d = free - Y;
      low = 0.5 * (Y + free - std::sqrt(d * d - 2.0 * m.sigma * m.sigma * s * std::log(rng.uniform())));
    }
    const double Yn = low < 0.0 ? free - low : free;
    const double wn = rate(Yn);
    k.trapezoid(wy, wn, s);
    t += s;
    if (Yn >= c || crossed(rng, ctx, Y, Yn, c, m.sigma, s)) return {k.weight(), 0.0, false};
    Y = Yn;
    wy = wn;
    if (k.advance(s) && k.mark(wy)) return {};
  }
}

struct Bankruptcy {
  double gamma0, gamma1, d;
  double operator()(double x) const { return (x >= -d && x <= 0.0) ? gamma0 + gamma1 * (x + d) : 0.0; }
};

Outcome bm_bankruptcy(const Context& ctx, const BrownianDrift& m, PhiloxStream& rng, const Bankruptcy& w, double x) {
  const double r = 2.0 * m.mu / (m.sigma * m.sigma);
  const double level = std::max(x, 0.0) + 1.0 + 5.0 / r;
  Killer k(ctx.thinning(), ctx.lambda, rng);
  double X = x;
  double t = 0.0;
  double wx = w(X);
  while (true) {
    if (t >= ctx.cfg.horizon_cap) return {0.0, 0.0, true};
    const double s = k.step(ctx.cfg.dt);
    const double Xn = X + m.mu * s + m.sigma * std::sqrt(s) * rng.normal();
    const double wn = w(Xn);
    k.trapezoid(wx, wn, s);
    t += s;
    if (Xn < -w.d || crossed(rng, ctx, X, Xn, -w.d, m.sigma, s)) return {1.0, 0.0, false};
    X = Xn;
    wx = wn;
    if (k.advance(s) && k.mark(wx)) return {1.0, 0.0, false};
    if (X >= level) {
      if (rng.uniform() >= std::exp(-r * X)) return {1.0 - k.weight(), 0.0, false};
      X = 0.0;
      wx = w(X);
    }
  }
}

// ---- Cramer-Lundberg (exact between jumps) ----

double next_jump(const CramerLundberg& m, PhiloxStream& rng) {
  return m.vartheta > 0.0 ? rng.exponential(m.vartheta) : kInf;
}

Outcome cl_exit(const Context& ctx, const CramerLundberg& m, PhiloxStream& rng, double x, double c, bool lower) {
  const auto& w = ctx.cfg.omega;
  Killer k(ctx.thinning(), ctx.lambda, rng);
  double X = x;
  double t = 0.0;
  while (true) {
    const double tj = next_jump(m, rng);
    const double tm = k.time_to_mark();
    const double tc = (c - X) / m.mu;
    const double s = std::min({tj, tm, tc});
    if (t + s > ctx.cfg.horizon_cap) return {0.0, 0.0, true};
    k.integral(w.integral(X, X + m.mu * s) / m.mu);
    X = s == tc ? c : X + m.mu * s;
    t += s;
    if (s == tc) return {k.weight(), 0.0, false};
    if (s == tm) {
      k.advance(s);
      if (k.mark(w(X))) return {};
      continue;
    }
    k.advance(s);
    X -= rng.exponential(m.rho);
    if (lower && X < 0.0) return {0.0, k.weight(), false};
  }
}

Outcome cl_reflected(const Context& ctx, const CramerLundberg& m, PhiloxStream& rng, double x, double c) {
  const auto& w = ctx.cfg.omega;
  Killer k(ctx.thinning(), ctx.lambda, rng);
  double Y = x;
  double t = 0.0;
  while (true) {
    const double tj = next_jump(m, rng);
    const double tm = k.time_to_mark();
    const double tc = (c - Y) / m.mu;
    const double s = std::min({tj, tm, tc});
    if (t + s > ctx.cfg.horizon_cap) return {0.0, 0.0, true};
    k.integral(w.integral(Y, Y + m.mu * s) / m.mu);
    Y = s == tc ? c : Y + m.mu * s;
    t += s;
    if (s == tc) return {k.weight(), 0.0, false};
    k.advance(s);
    if (s == tm) {
      if (k.mark(w(Y))) return {};
      continue;
    }
    Y = std::max(Y - rng.exponential(m.rho), 0.0);
  }
}

// S - X: drifts down at rate mu until it sits at 0, jumps up; killed at
// omega(c - Y).
Outcome cl_reflected_dual(const Context& ctx, const CramerLundberg& m, PhiloxStream& rng, double x, double c) {
  const auto& w = ctx.cfg.omega;
  Killer k(ctx.thinning(), ctx.lambda, rng);
  double Y = x;
  double t = 0.0;
  while (true) {
    const double tj = next_jump(m, rng);
    const double tm = k.time_to_mark();
    const double s = std::min(tj, tm);
    if (t + s > ctx.cfg.horizon_cap) return {0.0, 0.0, true};
    const double to_zero = Y / m.mu;
    if (s <= to_zero) {
      k.integral(w.integral(c - Y, c - Y + m.mu * s) / m.mu);
      Y -= m.mu * s;
    } else {
      k.integral(w.integral(c - Y, c) / m.mu + w(c) * (s - to_zero));
      Y = 0.0;
    }
    t += s;
    k.advance(s);
    if (s == tm) {
      if (k.mark(w(c - Y))) return {};
      continue;
    }
    Y += rng.exponential(m.rho);
    if (Y > c) return {k.weight(), 0.0, false};
  }
}

// ---- aggregation ----

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 64) {
    double acc = 0.0;
    for (double e : v) acc += e;
    return acc;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

MCEstimate summarize(const std::vector<double>& v, std::size_t truncated, double elapsed) {
  MCEstimate e;
  const double n = static_cast<double>(v.size());
  e.mean = pairwise_sum(v) / n;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - e.mean) * (v[i] - e.mean);
  e.std_error = v.size() > 1 ? std::sqrt(pairwise_sum(sq) / (n - 1.0) / n) : 0.0;
  e.n_effective = v.size() - truncated;
  e.truncated_fraction = static_cast<double>(truncated) / n;
  e.elapsed = elapsed;
  return e;
}

template <class Path>
std::pair<MCEstimate, MCEstimate> run(const SimConfig& cfg, Path&& path) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = cfg.n_paths;
  std::vector<double> a(n), b(n);
  std::vector<unsigned char> trunc(n);
  constexpr std::size_t block = 1024;
  detail::parallel_for((n + block - 1) / block, [&](std::size_t blk) {
    const std::size_t hi = std::min(n, (blk + 1) * block);
    for (std::size_t i = blk * block; i < hi; ++i) {
      PhiloxStream rng(cfg.seed, i);
      const Outcome o = path(rng);
      a[i] = o.a;
      b[i] = o.b;
      trunc[i] = o.truncated;
    }
  });
  const std::size_t truncated = static_cast<std::size_t>(std::count(trunc.begin(), trunc.end(), 1));
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {summarize(a, truncated, elapsed), summarize(b, truncated, elapsed)};
}

double thinning_rate(const SimConfig& cfg, double sup) {
  if (!std::isfinite(sup)) throw PreconditionError("Poisson thinning needs omega bounded on the simulation window");
  return sup + cfg.thinning_margin;
}

void check_window(double x, double c) {
  if (!(c > 0.0)) throw DomainError("simulation needs c > 0");
  if (!(x >= 0.0 && x <= c)) throw DomainError("simulation needs 0 <= x <= c");
}

}  // namespace

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw DomainError("SimConfig: dt must be positive");
  if (n_paths == 0) throw DomainError("SimConfig: n_paths must be >= 1");
  if (!(horizon_cap > 0.0)) throw DomainError("SimConfig: horizon_cap must be positive");
  if (!(thinning_margin >= 0.0)) throw DomainError("SimConfig: thinning_margin must be >= 0");
  if (std::holds_alternative<Tabulated>(model)) throw UnsupportedModelError("Monte Carlo needs a parametric model");
  omegascale::validate(model);
}

ExitEstimate simulate_exit(const SimConfig& cfg, double x, double c) {
  cfg.validate();
  check_window(x, c);
  Context ctx{cfg};
  if (ctx.thinning()) ctx.lambda = thinning_rate(cfg, cfg.omega.supremum(0.0, c));
  auto [a, b] = run(cfg, [&](PhiloxStream& rng) {
    if (const auto* bm = std::get_if<BrownianDrift>(&cfg.model)) return bm_exit(ctx, *bm, rng, x, c, true);
    return cl_exit(ctx, std::get<CramerLundberg>(cfg.model), rng, x, c, true);
  });
  return {a, b};
}

MCEstimate simulate_reflected(const SimConfig& cfg, double x, double c, bool dual) {
  cfg.validate();
  check_window(x, c);
  Context ctx{cfg};
  if (ctx.thinning()) ctx.lambda = thinning_rate(cfg, cfg.omega.supremum(0.0, c));
  return run(cfg, [&](PhiloxStream& rng) {
           if (const auto* bm = std::get_if<BrownianDrift>(&cfg.model)) return bm_reflected(ctx, *bm, rng, x, c, dual);
           const auto& cl = std::get<CramerLundberg>(cfg.model);
           return dual ? cl_reflected_dual(ctx, cl, rng, x, c) : cl_reflected(ctx, cl, rng, x, c);
         })
      .first;
}

MCEstimate simulate_one_sided_up(const SimConfig& cfg, double x, double c) {
  cfg.validate();
  if (!(x <= c)) throw DomainError("one-sided simulation needs x <= c");
  Context ctx{cfg};
  if (ctx.thinning()) {
    const auto fl = cfg.omega.floor();
    if (!fl) throw PreconditionError("Poisson thinning for upward passage needs omega constant on (-inf, 0]");
    double lo = std::min({0.0, c, x});
    for (double b : cfg.omega.breakpoints()) lo = std::min(lo, b);
    ctx.lambda = thinning_rate(cfg, std::max(*fl, cfg.omega.supremum(lo - 1.0, c)));
  }
  return run(cfg, [&](PhiloxStream& rng) {
           if (const auto* bm = std::get_if<BrownianDrift>(&cfg.model)) return bm_exit(ctx, *bm, rng, x, c, false);
           return cl_exit(ctx, std::get<CramerLundberg>(cfg.model), rng, x, c, false);
         })
      .first;
}

MCEstimate simulate_bankruptcy(const SimConfig& cfg, double gamma0, double gamma1, double d, double x) {
  cfg.validate();
  const auto* bm = std::get_if<BrownianDrift>(&cfg.model);
  if (!bm) throw UnsupportedModelError("the omega model is Brownian");
  if (!(bm->mu > 0.0)) throw DomainError("bankruptcy simulation needs mu > 0");
  if (!(gamma0 >= 0.0) || !(gamma1 >= 0.0) || !(d > 0.0)) throw DomainError("omega model needs gamma0, gamma1 >= 0, d > 0");
  const Bankruptcy w{gamma0, gamma1, d};
  Context ctx{cfg};
  if (ctx.thinning()) ctx.lambda = thinning_rate(cfg, gamma0 + gamma1 * d);
  if (x < -d) {
    MCEstimate e;
    e.mean = 1.0;
    e.n_effective = cfg.n_paths;
    return e;
  }
  return run(cfg, [&](PhiloxStream& rng) { return bm_bankruptcy(ctx, *bm, rng, w, x); }).first;
}

}  // namespace omegascale
