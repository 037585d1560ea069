#include "omegascale/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "omegascale/errors.hpp"

namespace omegascale {

namespace {

constexpr std::array<double, 4> kNodes = {-0.8611363115940526, -0.3399810435848563,
                                          0.3399810435848563, 0.8611363115940526};
constexpr std::array<double, 4> kWeights = {0.3478548451374538, 0.6521451548625461,
                                            0.6521451548625461, 0.3478548451374538};

template <class F>
void for_each_piece(const Weight& w, double lo, double hi, F&& f) {
  auto it = std::upper_bound(w.breaks.begin(), w.breaks.end(), lo);
  double a = lo;
  for (; it != w.breaks.end() && *it < hi; ++it) {
    f(a, *it);
    a = *it;
  }
  f(a, hi);
}

}  // namespace

double Weight::right_limit(double x) const {
  if (!fn) return 0.0;
  if (std::binary_search(breaks.begin(), breaks.end(), x))
    return fn(x + 1e-12 * std::max(1.0, std::abs(x)));
  return fn(x);
}

Weight Weight::shifted(double y0) const {
  if (!fn) return {};
  Weight out;
  out.fn = [f = fn, y0](double x) { return f(x + y0); };
  out.breaks.reserve(breaks.size());
  for (double b : breaks) out.breaks.push_back(b - y0);
  out.support_end = support_end - y0;
  return out;
}

Weight Weight::minus(double c) const {
  Weight out;
  if (!fn) {
    if (c != 0.0) out.fn = [c](double) { return -c; };
    return out;
  }
  if (c == 0.0) return *this;
  out.fn = [f = fn, c](double x) { return f(x) - c; };
  out.breaks = breaks;
  return out;
}

HatMoments hat_moments(const Weight& w, double lo, double hi) {
  HatMoments m;
  if (!w.fn || !(hi > lo) || lo >= w.support_end) return m;
  const double len = hi - lo;
  for_each_piece(w, lo, hi, [&](double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t k = 0; k < kNodes.size(); ++k) {
      const double y = mid + half * kNodes[k];
      const double v = w.fn(y) * kWeights[k] * half;
      m.left += v * (hi - y) / len;
      m.right += v * (y - lo) / len;
    }
  });
  if (!std::isfinite(m.left) || !std::isfinite(m.right))
    throw NonFiniteError("weight is not locally bounded on the solve window");
  return m;
}

double integrate(const Weight& w, double lo, double hi) {
  if (!w.fn || !(hi > lo) || lo >= w.support_end) return 0.0;
  double acc = 0.0;
  for_each_piece(w, lo, hi, [&](double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t k = 0; k < kNodes.size(); ++k) acc += w.fn(mid + half * kNodes[k]) * kWeights[k] * half;
  });
  return acc;
}

double integrate_weighted_linear(const Weight& w, const std::vector<double>& ys,
                                 const std::vector<double>& gs) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
    if (!(ys[i + 1] > ys[i])) continue;
    const HatMoments m = hat_moments(w, ys[i], ys[i + 1]);
    acc += m.left * gs[i] + m.right * gs[i + 1];
  }
  return acc;
}

}  // namespace omegascale
