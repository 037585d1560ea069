#include "omegascale/exp_mixture.hpp"

#include <algorithm>
#include <cmath>

namespace omegascale {

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Antiderivative of z^p e^{s z} as a list of (coef, power) multiplying e^{s z}.
// For s == 0 it is z^{p+1}/(p+1).
struct Antiderivative {
  std::vector<std::pair<double, int>> parts;
  double s;
  bool flat;

  Antiderivative(int p, double s_) : s(s_), flat(rates_equal(s_, 0.0)) {
    if (flat) {
      parts.emplace_back(1.0 / (p + 1), p + 1);
      return;
    }
    double falling = 1.0;  // p!/(p-i)!
    double spow = s;       // s^{i+1}
    for (int i = 0; i <= p; ++i) {
      parts.emplace_back(((i % 2) ? -1.0 : 1.0) * falling / spow, p - i);
      falling *= (p - i);
      spow *= s;
    }
  }

  double operator()(double z) const {
    double acc = 0.0;
    for (const auto& [c, k] : parts) acc += c * ipow(z, k);
    return flat ? acc : acc * std::exp(s * z);
  }
};

}  // namespace

bool rates_equal(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

ExpMixture::ExpMixture(std::vector<ExpTerm> terms) : terms_(std::move(terms)) { compact(); }

ExpMixture ExpMixture::constant(double c) { return ExpMixture({{c, 0, 0.0}}); }

ExpMixture ExpMixture::exponential(double coef, double rate) { return ExpMixture({{coef, 0, rate}}); }

double ExpMixture::operator()(double x) const {
  double acc = 0.0;
  for (const auto& t : terms_) acc += t.coef * ipow(x, t.power) * std::exp(t.rate * x);
  return acc;
}

ExpMixture ExpMixture::derivative() const {
  std::vector<ExpTerm> out;
  for (const auto& t : terms_) {
    if (t.rate != 0.0) out.push_back({t.coef * t.rate, t.power, t.rate});
    if (t.power > 0) out.push_back({t.coef * t.power, t.power - 1, t.rate});
  }
  return ExpMixture(std::move(out));
}

ExpMixture ExpMixture::integral_from(double lo) const {
  std::vector<ExpTerm> out;
  double constant = 0.0;
  for (const auto& t : terms_) {
    Antiderivative a(t.power, t.rate);
    for (const auto& [c, k] : a.parts) out.push_back({t.coef * c, k, a.flat ? 0.0 : t.rate});
    constant -= t.coef * a(lo);
  }
  out.push_back({constant, 0, 0.0});
  return ExpMixture(std::move(out));
}

double ExpMixture::integrate(double lo, double hi) const {
  double acc = 0.0;
  for (const auto& t : terms_) {
    Antiderivative a(t.power, t.rate);
    acc += t.coef * (a(hi) - a(lo));
  }
  return acc;
}

ExpMixture ExpMixture::shifted(double s) const {
  std::vector<ExpTerm> out;
  for (const auto& t : terms_) {
    const double scale = t.coef * std::exp(-t.rate * s);
    for (int j = 0; j <= t.power; ++j)
      out.push_back({scale * binom(t.power, j) * ipow(-s, t.power - j), j, t.rate});
  }
  return ExpMixture(std::move(out));
}

ExpMixture ExpMixture::tilted(double rate) const {
  std::vector<ExpTerm> out = terms_;
  for (auto& t : out) t.rate += rate;
  return ExpMixture(std::move(out));
}

ExpMixture& ExpMixture::operator+=(const ExpMixture& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  compact();
  return *this;
}

ExpMixture& ExpMixture::operator-=(const ExpMixture& other) {
  for (auto t : other.terms_) {
    t.coef = -t.coef;
    terms_.push_back(t);
  }
  compact();
  return *this;
}

ExpMixture& ExpMixture::operator*=(double s) {
  for (auto& t : terms_) t.coef *= s;
  compact();
  return *this;
}

void ExpMixture::compact() {
  std::vector<ExpTerm> merged;
  for (const auto& t : terms_) {
    auto it = std::find_if(merged.begin(), merged.end(), [&](const ExpTerm& m) {
      return m.power == t.power && rates_equal(m.rate, t.rate);
    });
    if (it == merged.end())
      merged.push_back(t);
    else
      it->coef += t.coef;
  }
  std::erase_if(merged, [](const ExpTerm& t) { return t.coef == 0.0; });
  terms_ = std::move(merged);
}

ExpMixture operator+(ExpMixture a, const ExpMixture& b) { return a += b; }
ExpMixture operator-(ExpMixture a, const ExpMixture& b) { return a -= b; }
ExpMixture operator*(double s, ExpMixture a) { return a *= s; }

namespace {

// x -> int_lo^{upper} k(x - z) f(z) dz, with upper = x when tail is set.
ExpMixture convolve(const ExpMixture& k, const ExpMixture& f, double lo, double hi, bool tail) {
  std::vector<ExpTerm> out;
  for (const auto& kt : k.terms()) {
    for (const auto& ft : f.terms()) {
      const double ab = kt.coef * ft.coef;
      const double s = ft.rate - kt.rate;
      for (int j = 0; j <= kt.power; ++j) {
        const double c = ab * binom(kt.power, j) * ((j % 2) ? -1.0 : 1.0);
        const int p = j + ft.power;
        const int xpow = kt.power - j;
        Antiderivative a(p, s);
        if (tail) {
          for (const auto& [ac, ak] : a.parts) {
            if (a.flat)
              out.push_back({c * ac, xpow + ak, kt.rate});
            else
              out.push_back({c * ac, xpow + ak, ft.rate});
          }
          out.push_back({-c * a(lo), xpow, kt.rate});
        } else {
          out.push_back({c * (a(hi) - a(lo)), xpow, kt.rate});
        }
      }
    }
  }
  return ExpMixture(std::move(out));
}

}  // namespace

ExpMixture convolve_tail(const ExpMixture& k, const ExpMixture& f, double lo) {
  return convolve(k, f, lo, 0.0, true);
}

ExpMixture convolve_window(const ExpMixture& k, const ExpMixture& f, double lo, double hi) {
  if (hi <= lo) return {};
  return convolve(k, f, lo, hi, false);
}

}  // namespace omegascale
