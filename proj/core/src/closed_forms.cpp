#include "omegascale/closed_forms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "omegascale/classical_scale.hpp"
#include "omegascale/errors.hpp"
#include "omegascale/special_fn.hpp"

namespace omegascale {

namespace {

const ClassicalScale scale_of(const LevyModel& model, double q) {
  if (!has_closed_form(model)) throw UnsupportedModelError("closed forms need a Brownian or Cramer-Lundberg model");
  validate(model);
  return classical_scale(model, q);
}

PiecewiseMixture single(double below, double knot, ExpMixture m) {
  return PiecewiseMixture(below, {knot}, {std::move(m)});
}

}  // namespace

PiecewiseMixture::PiecewiseMixture(double below, std::vector<double> knots, std::vector<ExpMixture> pieces)
    : below_(below), knots_(std::move(knots)), pieces_(std::move(pieces)) {
  if (knots_.size() != pieces_.size()) throw PreconditionError("piecewise mixture: knots and pieces differ in count");
  if (!std::is_sorted(knots_.begin(), knots_.end())) throw PreconditionError("piecewise mixture: knots unsorted");
}

double PiecewiseMixture::operator()(double x) const {
  if (knots_.empty() || x < knots_.front()) return below_;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  return pieces_[static_cast<std::size_t>(it - knots_.begin()) - 1](x);
}

PiecewiseMixture PiecewiseMixture::plus_scaled(double s, const PiecewiseMixture& g) const {
  std::vector<double> ks = knots_;
  ks.insert(ks.end(), g.knots_.begin(), g.knots_.end());
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  auto piece_at = [](const PiecewiseMixture& f, double x, bool zero_below) {
    if (f.knots_.empty() || x < f.knots_.front()) return zero_below ? ExpMixture() : ExpMixture::constant(f.below_);
    const auto it = std::upper_bound(f.knots_.begin(), f.knots_.end(), x);
    return f.pieces_[static_cast<std::size_t>(it - f.knots_.begin()) - 1];
  };
  std::vector<ExpMixture> ps;
  ps.reserve(ks.size());
  for (double k : ks) ps.push_back(piece_at(*this, k, false) + s * piece_at(g, k, true));
  return PiecewiseMixture(below_, std::move(ks), std::move(ps));
}

PiecewiseMixture PiecewiseMixture::convolve_from(const ExpMixture& k, double lo) const {
  if (knots_.empty()) throw PreconditionError("piecewise mixture: empty");
  // Segments of f on [lo, inf).
  std::vector<double> ts{lo};
  for (double kn : knots_)
    if (kn > lo) ts.push_back(kn);
  std::vector<ExpMixture> fs;
  for (double t : ts) {
    if (t < knots_.front()) {
      fs.push_back(ExpMixture::constant(below_));
    } else {
      const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
      fs.push_back(pieces_[static_cast<std::size_t>(it - knots_.begin()) - 1]);
    }
  }
  std::vector<ExpMixture> out;
  ExpMixture full;  // contributions of the completed segments
  for (std::size_t m = 0; m < ts.size(); ++m) {
    out.push_back(full + convolve_tail(k, fs[m], ts[m]));
    if (m + 1 < ts.size()) full += convolve_window(k, fs[m], ts[m], ts[m + 1]);
  }
  return PiecewiseMixture(0.0, std::move(ts), std::move(out));
}

BandScale::BandScale(const LevyModel& model, double p, double q, double a) : p_(p), q_(q), a_(a) {
  if (!(p >= 0.0) || !(q >= 0.0)) throw DomainError("band: p and q must be >= 0");
  if (!(a >= 0.0)) throw DomainError("band: a must be >= 0");
  const ClassicalScale sp = scale_of(model, p);
  const ClassicalScale spq = scale_of(model, p + q);
  phi_p_ = phi_inverse(model, p);

  const PiecewiseMixture wp = single(0.0, 0.0, sp.w);
  const PiecewiseMixture zp = single(1.0, 0.0, sp.z);
  w_ = wp.plus_scaled(q, wp.convolve_from(spq.w, a));
  z_ = zp.plus_scaled(q, zp.convolve_from(spq.w, a));

  if (a > 0.0) {
    w1_ = PiecewiseMixture(0.0, {0.0, a},
                           {spq.w - q * convolve_tail(spq.w, sp.w, 0.0), spq.w - q * convolve_window(spq.w, sp.w, 0.0, a)});
    z1_ = PiecewiseMixture(1.0, {0.0, a},
                           {spq.z - q * convolve_tail(spq.w, sp.z, 0.0), spq.z - q * convolve_window(spq.w, sp.z, 0.0, a)});
  } else {
    w1_ = single(0.0, 0.0, spq.w);
    z1_ = single(1.0, 0.0, spq.z);
  }

  h_ = ExpMixture::exponential(1.0, phi_p_) + q * spq.w.tilted(-phi_p_).integral_from(0.0).tilted(phi_p_);
}

double BandScale::h(double x) const { return x < 0.0 ? std::exp(phi_p_ * x) : h_(x); }

double band_w(const LevyModel& model, double p, double q, double a, double x) { return BandScale(model, p, q, a).w(x); }
double band_z(const LevyModel& model, double p, double q, double a, double x) { return BandScale(model, p, q, a).z(x); }
double band_h(const LevyModel& model, double p, double q, double x) { return BandScale(model, p, q, 0.0).h(x); }

std::pair<double, double> band_composites(const LevyModel& model, double p, double q, double a, double b, double x) {
  if (!(0.0 <= a && a <= b)) throw DomainError("band composites need 0 <= a <= b");
  const BandOmegaScale s(model, p, q, a, b);
  return {s.w(x), s.z(x)};
}

BandOmegaScale::BandOmegaScale(const LevyModel& model, double p, double q, double a, double b)
    : model_(model), p_(p), q_(q), a_(a), b_(b) {
  if (!(a <= b)) throw DomainError("band needs a <= b");
  w_ = two_arg_w(0.0);
  z_ = two_arg_z(0.0);
}

// In the shifted variable u = x - y the band sits on (a - y, b - y); below
// u = 0 only omega's restriction to [y, inf) matters, so a clamps at 0.
PiecewiseMixture BandOmegaScale::two_arg_w(double y) const {
  const double lo = std::max(a_ - y, 0.0);
  const double hi = b_ - y;
  const ClassicalScale sp = scale_of(model_, p_);
  if (hi <= 0.0 || q_ == 0.0) return single(0.0, 0.0, sp.w);
  const PiecewiseMixture wa = BandScale(model_, p_, q_, lo).w_mixture();
  return wa.plus_scaled(-q_, wa.convolve_from(sp.w, hi));
}

PiecewiseMixture BandOmegaScale::two_arg_z(double y) const {
  const double lo = std::max(a_ - y, 0.0);
  const double hi = b_ - y;
  const ClassicalScale sp = scale_of(model_, p_);
  if (hi <= 0.0 || q_ == 0.0) return single(1.0, 0.0, sp.z);
  const PiecewiseMixture za = BandScale(model_, p_, q_, lo).z_mixture();
  return za.plus_scaled(-q_, za.convolve_from(sp.w, hi));
}

double BandOmegaScale::w(double x, double y) const { return two_arg_w(y)(x - y); }
double BandOmegaScale::z(double x, double y) const { return two_arg_z(y)(x - y); }

void BandOmegaScale::require_floor() const {
  if (a_ != 0.0) throw PreconditionError("band H/Xi/Theta forms need a = 0");
}

double BandOmegaScale::h(double x) const {
  require_floor();
  const BandScale bs(model_, p_, q_, 0.0);
  if (x < 0.0) return bs.h(x);
  const PiecewiseMixture hp = single(0.0, 0.0, bs.h_mixture());
  const ClassicalScale sp = scale_of(model_, p_);
  return hp.plus_scaled(-q_, hp.convolve_from(sp.w, b_))(x);
}

double BandOmegaScale::xi(double x, double c, double y) const { return h(x) / h(c) * w(c, y) - w(x, y); }

double BandOmegaScale::theta(double x, double y) const {
  require_floor();
  if (!(p_ > 0.0)) throw PreconditionError("band Theta needs p > 0");
  const double phi = phi_inverse(model_, p_);
  const BandScale bs(model_, p_, q_, 0.0);

  // e^{-Phi y} + q int_0^b e^{-Phi z} W^(omega)(z, y) dz, in u = z - y
  double num = std::exp(-phi * y);
  if (y < b_) {
    const PiecewiseMixture wa = BandScale(model_, p_, q_, std::max(-y, 0.0)).w_mixture();
    const double u0 = std::max(-y, 0.0);
    const double u1 = b_ - y;
    double acc = 0.0;
    const auto& ks = wa.knots();
    for (std::size_t k = 0; k < ks.size(); ++k) {
      const double lo = std::max(u0, ks[k]);
      const double hi = std::min(u1, k + 1 < ks.size() ? ks[k + 1] : u1);
      if (hi > lo) acc += wa.pieces()[k].tilted(-phi).integrate(lo, hi);
    }
    num += q_ * std::exp(-phi * y) * acc;
  }
  const double den = 1.0 / phi_inverse_prime(model_, p_) + q_ * bs.h_mixture().tilted(-phi).integrate(0.0, b_);
  return num / den * h(x) - w(x, y);
}

double OmegaModelSolution::g(double z) const {
  if (gamma1 == 0.0) return w_q(BrownianDrift{mu, sigma}, gamma0, z);
  const double s2 = sigma * sigma;
  const double lam = 2.0 * gamma1 / s2;
  const double l3 = std::cbrt(lam);
  const double t = l3 * (z + rho_bar * rho_bar / (4.0 * lam));
  return std::exp(-mu * z / s2) * (m1 * special::airy_ai(t) + m2 * special::airy_bi(t));
}

double OmegaModelSolution::g_prime(double z) const {
  if (gamma1 == 0.0) return w_q_prime(BrownianDrift{mu, sigma}, gamma0, z);
  const double s2 = sigma * sigma;
  const double lam = 2.0 * gamma1 / s2;
  const double l3 = std::cbrt(lam);
  const double t = l3 * (z + rho_bar * rho_bar / (4.0 * lam));
  const double e = std::exp(-mu * z / s2);
  const double f = m1 * special::airy_ai(t) + m2 * special::airy_bi(t);
  const double fp = m1 * special::airy_ai_prime(t) + m2 * special::airy_bi_prime(t);
  return e * (l3 * fp - (mu / s2) * f);
}

double OmegaModelSolution::w(double x) const {
  if (x < -d) return 0.0;
  if (x <= 0.0) return g(x + d);
  const double r = 2.0 * mu / (sigma * sigma);
  return g_d + (-std::expm1(-r * x)) * g_prime_d / r;
}

double OmegaModelSolution::bankruptcy(double x) const { return 1.0 - c_w_inv_inf * w(x); }

double OmegaModelSolution::bankruptcy_positive(double x) const {
  const double r = 2.0 * mu / (sigma * sigma);
  const double tail = g_prime_d / r;
  return std::exp(-r * x) * tail / (g_d + tail);
}

OmegaModelSolution omega_model(double gamma0, double gamma1, double d, double mu, double sigma) {
  if (!(mu > 0.0) || !(sigma > 0.0) || !(d > 0.0)) throw DomainError("omega model needs mu, sigma, d > 0");
  if (!(gamma0 >= 0.0) || !(gamma1 >= 0.0)) throw DomainError("omega model needs gamma0, gamma1 >= 0");
  OmegaModelSolution s;
  s.gamma0 = gamma0;
  s.gamma1 = gamma1;
  s.d = d;
  s.mu = mu;
  s.sigma = sigma;
  const double s2 = sigma * sigma;
  const double r = 2.0 * mu / s2;
  s.rho_bar = 2.0 * std::sqrt(mu * mu + 2.0 * gamma0 * s2) / s2;
  s.rho1 = 0.5 * (s.rho_bar + r);
  s.rho2 = 0.5 * (s.rho_bar - r);
  if (gamma1 > 0.0) {
    const double lam = 2.0 * gamma1 / s2;
    const double l3 = std::cbrt(lam);
    const double t0 = s.rho_bar * s.rho_bar / (4.0 * std::pow(lam, 2.0 / 3.0));
    // m1 Ai(t0) + m2 Bi(t0) = 0 and l3 (m1 Ai'(t0) + m2 Bi'(t0)) = 2/sigma^2,
    // since the exponential prefactor is 1 at z = 0.
    const double a11 = special::airy_ai(t0), a12 = special::airy_bi(t0);
    const double a21 = l3 * special::airy_ai_prime(t0), a22 = l3 * special::airy_bi_prime(t0);
    const double det = a11 * a22 - a12 * a21;
    const double rhs2 = 2.0 / s2;
    s.m1 = -a12 * rhs2 / det;
    s.m2 = a11 * rhs2 / det;
  }
  s.g_d = s.g(d);
  s.g_prime_d = s.g_prime(d);
  s.c_w_inv_inf = 1.0 / (s.g_d + s.g_prime_d / r);
  return s;
}

double omega_model_bankruptcy(double gamma0, double gamma1, double d, double mu, double sigma, double x) {
  return omega_model(gamma0, gamma1, d, mu, sigma).bankruptcy(x);
}

namespace {

struct BesselSetup {
  double d, r, alpha, beta, gg;
};

BesselSetup bessel_setup(double varrho, double xi, double mu, double sigma) {
  if (!(sigma > 0.0) || !(xi > 0.0) || !(varrho > 0.0))
    throw DomainError("exponential omega (Brownian): needs sigma, xi, varrho > 0");
  BesselSetup b;
  b.d = 0.5 * sigma * sigma;
  b.r = 2.0 * mu / (sigma * sigma);
  b.alpha = b.r / xi;
  if (std::abs(b.alpha - std::round(b.alpha)) <= 1e-8)
    throw DomainError("exponential omega (Brownian): alpha = R/xi must not be an integer");
  b.beta = 2.0 * std::sqrt(varrho) / (xi * std::sqrt(b.d));
  b.gg = special::gamma_fn(1.0 + b.alpha) * special::gamma_fn(1.0 - b.alpha);
  return b;
}

}  // namespace

double selfsim_w_bm(double varrho, double xi, double mu, double sigma, double x) {
  return selfsim_w_bm_two_arg(varrho, xi, mu, sigma, x, 0.0);
}

double selfsim_w_bm_two_arg(double varrho, double xi, double mu, double sigma, double x, double y) {
  const BesselSetup b = bessel_setup(varrho, xi, mu, sigma);
  if (x < y) return 0.0;
  using special::bessel_i;
  const double sy = b.beta * std::exp(-xi * y / 2.0);
  const double sx = b.beta * std::exp(-xi * x / 2.0);
  return b.gg / (b.d * b.r) * std::exp(-b.r * x / 2.0) * std::exp(xi * b.alpha * y / 2.0) *
         (bessel_i(b.alpha, sy) * bessel_i(-b.alpha, sx) - bessel_i(-b.alpha, sy) * bessel_i(b.alpha, sx));
}

double selfsim_z_bm(double varrho, double xi, double mu, double sigma, double x) {
  const BesselSetup b = bessel_setup(varrho, xi, mu, sigma);
  if (x < 0.0) return 1.0;
  using special::bessel_i;
  const double sx = b.beta * std::exp(-xi * x / 2.0);
  return std::sqrt(varrho) * b.gg / (b.r * std::sqrt(b.d)) * std::exp(-b.r * x / 2.0) *
         (bessel_i(b.alpha - 1.0, b.beta) * bessel_i(-b.alpha, sx) - bessel_i(1.0 - b.alpha, b.beta) * bessel_i(b.alpha, sx));
}

namespace {

void check_cl_selfsim(double varrho, double xi, double mu, double vartheta, double rho) {
  if (!(xi > 0.0) || !(varrho >= 0.0)) throw DomainError("exponential omega (Cramer-Lundberg): needs xi > 0, varrho >= 0");
  validate(CramerLundberg{mu, vartheta, rho});
  const double vs = rho - vartheta / mu;
  for (double v : {vs, rho}) {
    const double n = v / xi;
    if (std::abs(n - std::round(n)) <= 1e-8)
      throw DomainError("exponential omega (Cramer-Lundberg): varsigma and rho must avoid multiples of xi");
  }
}

}  // namespace

double selfsim_w_cl(double varrho, double xi, double mu, double vartheta, double rho, double x) {
  check_cl_selfsim(varrho, xi, mu, vartheta, rho);
  if (x < 0.0) return 0.0;
  using special::kummer_1f1;
  const double vs = rho - vartheta / mu;
  const double k = varrho / (mu * xi);
  const double kx = -k * std::exp(-xi * x);
  const double t1 = rho / (vs * mu) * kummer_1f1((xi + rho) / xi, (xi + vs) / xi, k) *
                    kummer_1f1((xi - rho) / xi, (xi - vs) / xi, kx);
  const double t2 = (vs - rho) / (vs * mu) * std::exp(-vs * x) * kummer_1f1((xi + rho - vs) / xi, (xi - vs) / xi, k) *
                    kummer_1f1((xi + vs - rho) / xi, (xi + vs) / xi, kx);
  return t1 + t2;
}

double selfsim_z_cl(double varrho, double xi, double mu, double vartheta, double rho, double x) {
  check_cl_selfsim(varrho, xi, mu, vartheta, rho);
  if (x < 0.0) return 1.0;
  using special::kummer_1f1;
  const double vs = rho - vartheta / mu;
  const double k = varrho / (mu * xi);
  const double kx = -k * std::exp(-xi * x);
  const double t1 = kummer_1f1(rho / xi, vs / xi, k) * kummer_1f1((xi - rho) / xi, (xi - vs) / xi, kx);
  const double t2 = (rho - vs) * varrho / (vs * mu * (vs - xi)) * std::exp(-vs * x) *
                    kummer_1f1((xi + rho - vs) / xi, (2.0 * xi - vs) / xi, k) *
                    kummer_1f1((xi + vs - rho) / xi, (xi + vs) / xi, kx);
  return t1 + t2;
}

double perpetual_exponential_functional(double varrho, double xi, double mu, double sigma, double x) {
  if (!(mu > 0.0)) throw DomainError("perpetual functional needs mu > 0");
  const BesselSetup b = bessel_setup(varrho, xi, mu, sigma);
  const double z = b.beta * std::exp(-xi * x / 2.0);
  return 2.0 / special::gamma_fn(b.alpha) * std::pow(z / 2.0, b.alpha) * special::bessel_k(b.alpha, z);
}

namespace {

PiecewiseMixture step_chain(const std::vector<double>& levels, const std::vector<double>& cuts,
                            const LevyModel& model, double y, bool z_kind) {
  if (levels.size() != cuts.size() + 1) throw DomainError("step omega needs one more level than cuts");
  if (!std::is_sorted(cuts.begin(), cuts.end())) throw DomainError("step cuts must be nondecreasing");
  for (double p : levels)
    if (!(p >= 0.0)) throw DomainError("step levels must be >= 0");
  const ClassicalScale s0 = scale_of(model, levels[0]);
  PiecewiseMixture cur = z_kind ? single(1.0, y, s0.z.shifted(y)) : single(0.0, y, s0.w.shifted(y));
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    const double jump = levels[k + 1] - levels[k];
    if (jump == 0.0) continue;
    const ClassicalScale sk = scale_of(model, levels[k + 1]);
    const double lo = std::max(cuts[k], y);
    cur = cur.plus_scaled(jump, cur.convolve_from(sk.w, lo));
  }
  return cur;
}

}  // namespace

double step_recursion_w(const std::vector<double>& levels, const std::vector<double>& cuts, const LevyModel& model,
                        double x, double y) {
  return step_chain(levels, cuts, model, y, false)(x);
}

double step_recursion_z(const std::vector<double>& levels, const std::vector<double>& cuts, const LevyModel& model,
                        double x, double y) {
  return step_chain(levels, cuts, model, y, true)(x);
}

}  // namespace omegascale
