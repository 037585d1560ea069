#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "omegascale/quadrature.hpp"

namespace omegascale {

// omega(x) = q
struct ConstantOmega {
  double q = 0.0;
};

// omega(x) = p + q 1_{(a,b)}(x)
struct BandOmega {
  double p = 0.0;
  double q = 0.0;
  double a = 0.0;
  double b = 0.0;
};

// omega(x) = (gamma0 + gamma1 (x + d)) 1_{[-d,0]}(x)
struct LinearBandOmega {
  double gamma0 = 0.0;
  double gamma1 = 0.0;
  double d = 1.0;
};

// omega(x) = varrho exp(-xi x)
struct ExponentialOmega {
  double varrho = 0.0;
  double xi = 1.0;
};

// omega(x) = p_0 + sum_j (p_j - p_{j-1}) 1(x > x_j), so omega = p_k on
// (x_k, x_{k+1}]. levels has one more entry than cuts.
struct StepOmega {
  std::vector<double> levels;
  std::vector<double> cuts;
};

// Right-continuous step interpolation: values[i] on [x[i], x[i+1]), values[0]
// below x[0] and values.back() beyond x.back().
struct TableOmega {
  std::vector<double> x;
  std::vector<double> values;
};

class OmegaSpec {
 public:
  using Variant =
      std::variant<ConstantOmega, BandOmega, LinearBandOmega, ExponentialOmega, StepOmega, TableOmega>;

  OmegaSpec() : v_(ConstantOmega{}) {}
  // Validates the parameters (nonnegativity, ordering); throws DomainError.
  OmegaSpec(Variant v);  // NOLINT(google-explicit-constructor)

  const Variant& variant() const { return v_; }
  std::string name() const;

  double operator()(double x) const { return value(x); }
  double value(double x) const;
  // int_lo^hi omega, exact for every variant; negative for hi < lo.
  double integral(double lo, double hi) const;
  // Points where omega or its derivative jump, ascending.
  std::vector<double> breakpoints() const;

  // Extremes on [lo, hi]. Between breakpoints every variant is monotone, so
  // the piece end values decide.
  double infimum(double lo, double hi) const;
  double supremum(double lo, double hi) const;

  // phi with omega = phi on (-inf, 0], if any.
  std::optional<double> floor() const;
  // (q, upsilon) with omega = q on [upsilon, inf), if any.
  std::optional<std::pair<double, double>> ceiling() const;

  // omega - delta as a quadrature weight, carrying the breakpoints and the
  // support end when omega settles at delta.
  Weight weight(double delta) const;

 private:
  Variant v_;
};

}  // namespace omegascale
