#include "omegascale/special_fn.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "omegascale/errors.hpp"

namespace omegascale::special {

namespace {

constexpr double kPi = std::numbers::pi;

constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

bool is_nonpositive_integer(double z) { return z <= 0.0 && z == std::floor(z); }

void check_ctl(const SeriesControl& ctl) {
  if (ctl.max_terms < 1 || !(ctl.rel_tol > 0.0)) throw DomainError("invalid series control");
}

// Shared Maclaurin pieces: Ai = c1 f - c2 g, Bi = sqrt(3) (c1 f + c2 g), with
// f = sum 3^k (1/3)_k x^{3k}/(3k)!, g = sum 3^k (2/3)_k x^{3k+1}/(3k+1)!.
// Accumulated in long double: the combinations cancel heavily away from 0.
struct AiryParts {
  long double f, g, fp, gp;
};

AiryParts airy_parts(double x) {
  if (!(std::abs(x) <= 15.0)) throw DomainError("Airy series window is |x| <= 15");
  const long double xl = x;
  const long double x3 = xl * xl * xl;
  long double tf = 1.0L, tg = xl;
  long double f = tf, g = tg;
  // derivatives: f' = sum over k>=1 of 3k t_k / x, g' = sum (3k+1) t_k / x
  long double fp = 0.0L, gp = 1.0L;
  for (int k = 1; k < 400; ++k) {
    const long double a = 3.0L * k;
    tf *= x3 / ((a - 1.0L) * a);
    tg *= x3 / (a * (a + 1.0L));
    f += tf;
    g += tg;
    const long double dtf = x != 0.0 ? a * tf / xl : 0.0L;
    const long double dtg = x != 0.0 ? (a + 1.0L) * tg / xl : 0.0L;
    fp += dtf;
    gp += dtg;
    if (std::abs(tf) <= 1e-21L * std::abs(f) && std::abs(tg) <= 1e-21L * std::abs(g) &&
        std::abs(dtf) <= 1e-21L * std::abs(fp) + 1e-300L && std::abs(dtg) <= 1e-21L * std::abs(gp))
      break;
  }
  return {f, g, fp, gp};
}

// Ai(0) = 3^{-2/3}/Gamma(2/3) and -Ai'(0) = 3^{-1/3}/Gamma(1/3)
constexpr long double kAiryC1 = 0.355028053887817239260063186004183176L;
constexpr long double kAiryC2 = 0.258819403792806798405183560189203963L;
constexpr long double kSqrt3 = 1.732050807568877293527446341505872367L;

}  // namespace

double gamma_fn(double z) {
  if (is_nonpositive_integer(z)) throw DomainError("gamma_fn: pole at a nonpositive integer");
  if (z < 0.5) return kPi / (std::sin(kPi * z) * gamma_fn(1.0 - z));
  z -= 1.0;
  double x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + i);
  const double t = z + 7.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

double kummer_1f1(double a, double b, double z, const SeriesControl& ctl) {
  check_ctl(ctl);
  if (is_nonpositive_integer(b)) throw DomainError("kummer_1f1: b is a nonpositive integer");
  double term = 1.0, sum = 1.0;
  for (int n = 0; n < ctl.max_terms; ++n) {
    term *= (a + n) * z / ((b + n) * (n + 1));
    sum += term;
    if (std::abs(term) <= ctl.rel_tol * std::abs(sum)) return sum;
    if (term == 0.0) return sum;  // a is a nonpositive integer: polynomial
  }
  throw ConvergenceError("kummer_1f1: series did not converge");
}

double bessel_i(double v, double z, const SeriesControl& ctl) {
  check_ctl(ctl);
  if (!(z >= 0.0)) throw DomainError("bessel_i: z must be nonnegative");
  if (z > 30.0) throw DomainError("bessel_i: z beyond the series window (30)");
  if (z == 0.0) {
    if (v == 0.0) return 1.0;
    if (v > 0.0 || is_nonpositive_integer(v)) return 0.0;
    throw DomainError("bessel_i: I_v(0) is infinite for negative non-integer v");
  }
  // Negative integer orders: I_{-n} = I_n.
  if (is_nonpositive_integer(v)) v = -v;
  const double half = 0.5 * z;
  const double q = half * half;
  double term = std::pow(half, v) / gamma_fn(v + 1.0);
  double sum = term;
  for (int n = 0; n < ctl.max_terms; ++n) {
    term *= q / ((n + 1.0) * (v + n + 1.0));
    sum += term;
    if (std::abs(term) <= ctl.rel_tol * std::abs(sum)) return sum;
  }
  throw ConvergenceError("bessel_i: series did not converge");
}

double bessel_k(double v, double z, const SeriesControl& ctl) {
  if (std::abs(v - std::round(v)) <= 1e-8) throw DomainError("bessel_k: integer order rejected");
  if (!(z > 0.0)) throw DomainError("bessel_k: z must be positive");
  return 0.5 * kPi * (bessel_i(-v, z, ctl) - bessel_i(v, z, ctl)) / std::sin(v * kPi);
}

double airy_ai(double x) {
  const auto p = airy_parts(x);
  return static_cast<double>(kAiryC1 * p.f - kAiryC2 * p.g);
}

double airy_bi(double x) {
  const auto p = airy_parts(x);
  return static_cast<double>(kSqrt3 * (kAiryC1 * p.f + kAiryC2 * p.g));
}

double airy_ai_prime(double x) {
  const auto p = airy_parts(x);
  return static_cast<double>(kAiryC1 * p.fp - kAiryC2 * p.gp);
}

double airy_bi_prime(double x) {
  const auto p = airy_parts(x);
  return static_cast<double>(kSqrt3 * (kAiryC1 * p.fp + kAiryC2 * p.gp));
}

}  // namespace omegascale::special
