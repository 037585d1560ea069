#pragma once

#include <memory>
#include <optional>

#include "omegascale/exp_mixture.hpp"
#include "omegascale/levy_model.hpp"
#include "omegascale/scale_table.hpp"

namespace omegascale {

// W^(q), Z^(q), W^(q)' of a closed-form model as exponential mixtures,
// valid on x >= 0. Built from the roots of psi(s) = q (partial fractions of
// 1/(psi - q)); coincident roots switch to the x e^{rx} branch.
struct ClassicalScale {
  double q = 0.0;
  double atom = 0.0;  // W^(q)(0)
  ExpMixture w;
  ExpMixture z;
  ExpMixture wprime;
};

// Throws UnsupportedModelError for tabulated models.
ClassicalScale classical_scale(const LevyModel& model, double q);

// Point evaluators. W^(q)(x) = 0 and Z^(q)(x) = 1 for x < 0. Derivatives are
// right-derivatives (relevant at 0 for bounded-variation models). Tabulated
// models only support their own q and their own grid.
double w_q(const LevyModel& model, double q, double x);
double z_q(const LevyModel& model, double q, double x);
double w_q_prime(const LevyModel& model, double q, double x);

// Uniform evaluator over any model, cheap to copy.
class ScaleFunctions {
 public:
  ScaleFunctions(const LevyModel& model, double q);

  double q() const { return q_; }
  double atom() const;
  double w(double x) const;
  double z(double x) const;
  double wprime(double x) const;

  // Empty for tabulated models.
  const std::optional<ClassicalScale>& closed_form() const { return closed_; }

 private:
  double q_;
  std::optional<ClassicalScale> closed_;
  std::shared_ptr<const ScaleTable> table_;
};

// Samples the closed forms on 0, h, 2h, ..., x_max.
ScaleTable make_scale_table(const LevyModel& model, double q, double x_max, double h);

}  // namespace omegascale
