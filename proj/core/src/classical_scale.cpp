#include "omegascale/classical_scale.hpp"

#include <cmath>
#include <string>

#include "omegascale/errors.hpp"
#include "overloaded.hpp"

namespace omegascale {

namespace {

using detail::overloaded;

struct Roots {
  double hi;
  double lo;
  bool confluent;
};

Roots make_roots(double hi, double lo) {
  const bool conf = std::abs(hi - lo) <= 1e-9 * std::max(1.0, std::abs(hi));
  if (conf) {
    const double mid = 0.5 * (hi + lo);
    return {mid, mid, true};
  }
  return {hi, lo, false};
}

ClassicalScale brownian(const BrownianDrift& m, double q) {
  const double s2 = m.sigma * m.sigma;
  const double disc = std::sqrt(m.mu * m.mu + 2.0 * q * s2);
  double hi, lo;
  // Cancellation-free root pair of (s2/2) t^2 + mu t - q.
  if (m.mu >= 0.0) {
    lo = (-m.mu - disc) / s2;
    hi = lo != 0.0 ? (-2.0 * q / s2) / lo : 0.0;
  } else {
    hi = (-m.mu + disc) / s2;
    lo = (-2.0 * q / s2) / hi;
  }
  const Roots r = make_roots(hi, lo);
  ClassicalScale out;
  out.q = q;
  out.atom = 0.0;
  if (r.confluent) {
    out.w = ExpMixture({{2.0 / s2, 1, r.hi}});
  } else {
    const double a = 2.0 / (s2 * (r.hi - r.lo));
    out.w = ExpMixture({{a, 0, r.hi}, {-a, 0, r.lo}});
  }
  return out;
}

ClassicalScale cramer_lundberg(const CramerLundberg& m, double q) {
  // mu t^2 + (mu varsigma - q) t - q rho = 0
  const double b = m.mu * m.varsigma() - q;
  const double c = -q * m.rho;
  const double disc = std::sqrt(b * b - 4.0 * m.mu * c);
  double hi, lo;
  if (b >= 0.0) {
    lo = (-b - disc) / (2.0 * m.mu);
    hi = lo != 0.0 ? (c / m.mu) / lo : 0.0;
  } else {
    hi = (-b + disc) / (2.0 * m.mu);
    lo = (c / m.mu) / hi;
  }
  const Roots r = make_roots(hi, lo);
  ClassicalScale out;
  out.q = q;
  out.atom = 1.0 / m.mu;
  if (r.confluent) {
    out.w = ExpMixture({{1.0 / m.mu, 0, r.hi}, {(r.hi + m.rho) / m.mu, 1, r.hi}});
  } else {
    const double ahi = (r.hi + m.rho) / (m.mu * (r.hi - r.lo));
    const double alo = (r.lo + m.rho) / (m.mu * (r.lo - r.hi));
    out.w = ExpMixture({{ahi, 0, r.hi}, {alo, 0, r.lo}});
  }
  return out;
}

const ScaleTable& table_for(const Tabulated& t, double q) {
  if (std::abs(q - t.scale->q) > 1e-14 * std::max(1.0, q))
    throw UnsupportedModelError("tabulated model only provides W^(q) for q = " + std::to_string(t.scale->q));
  return *t.scale;
}

}  // namespace

ClassicalScale classical_scale(const LevyModel& model, double q) {
  if (!(q >= 0.0)) throw DomainError("scale function: q must be nonnegative");
  ClassicalScale out = std::visit(
      overloaded{[&](const BrownianDrift& m) { return brownian(m, q); },
                 [&](const CramerLundberg& m) { return cramer_lundberg(m, q); },
                 [](const Tabulated&) -> ClassicalScale {
                   throw UnsupportedModelError("no closed-form scale function for tabulated models");
                 }},
      model);
  out.z = ExpMixture::constant(1.0) + q * out.w.integral_from(0.0);
  out.wprime = out.w.derivative();
  return out;
}

double w_q(const LevyModel& model, double q, double x) {
  if (x < 0.0) return 0.0;
  if (const auto* t = std::get_if<Tabulated>(&model)) return table_for(*t, q).w_at(x);
  return classical_scale(model, q).w(x);
}

double z_q(const LevyModel& model, double q, double x) {
  if (x <= 0.0) return 1.0;
  if (const auto* t = std::get_if<Tabulated>(&model)) return table_for(*t, q).z_at(x);
  return classical_scale(model, q).z(x);
}

double w_q_prime(const LevyModel& model, double q, double x) {
  if (x < 0.0) return 0.0;
  if (const auto* t = std::get_if<Tabulated>(&model)) return table_for(*t, q).wprime_at(x);
  return classical_scale(model, q).wprime(x);
}

ScaleFunctions::ScaleFunctions(const LevyModel& model, double q) : q_(q) {
  if (const auto* t = std::get_if<Tabulated>(&model)) {
    table_for(*t, q);
    table_ = t->scale;
  } else {
    closed_ = classical_scale(model, q);
  }
}

double ScaleFunctions::atom() const { return closed_ ? closed_->atom : table_->w0(); }

double ScaleFunctions::w(double x) const {
  if (x < 0.0) return 0.0;
  return closed_ ? closed_->w(x) : table_->w_at(x);
}

double ScaleFunctions::z(double x) const {
  if (x <= 0.0) return 1.0;
  return closed_ ? closed_->z(x) : table_->z_at(x);
}

double ScaleFunctions::wprime(double x) const {
  if (x < 0.0) return 0.0;
  return closed_ ? closed_->wprime(x) : table_->wprime_at(x);
}

ScaleTable make_scale_table(const LevyModel& model, double q, double x_max, double h) {
  if (!(h > 0.0) || !(x_max > 0.0)) throw DomainError("scale table needs h > 0 and x_max > 0");
  const ClassicalScale cs = classical_scale(model, q);
  const auto n = static_cast<std::size_t>(std::llround(x_max / h));
  ScaleTable t;
  t.h = h;
  t.q = q;
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = static_cast<double>(i) * h;
    t.x.push_back(x);
    t.w.push_back(cs.w(x));
    t.z.push_back(cs.z(x));
    t.wprime.push_back(cs.wprime(x));
  }
  return t;
}

}  // namespace omegascale
