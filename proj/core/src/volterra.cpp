#include "omegascale/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "omegascale/errors.hpp"

namespace omegascale {

struct VolterraShared {
  VolterraProblem problem;
  std::vector<double> x;
  std::vector<double> kernel;  // K(m h)
  std::vector<double> alpha;   // left hat moment of cell j
  std::vector<double> beta;    // right hat moment of cell j
  std::vector<double> values;
  // Set for extrapolated solutions; the arrays above then hold the combined
  // node values on the coarse grid.
  std::shared_ptr<const VolterraShared> coarse;
  std::shared_ptr<const VolterraShared> fine;
};

namespace {

void check_problem(const VolterraProblem& p) {
  if (!p.kernel || !p.forcing) throw PreconditionError("volterra: kernel and forcing are required");
  if (!(p.h > 0.0) || !std::isfinite(p.h)) throw DomainError("volterra: grid step must be positive");
  if (!(p.x_max >= 0.0) || !std::isfinite(p.x_max)) throw DomainError("volterra: x_max must be finite and >= 0");
  if (p.delta < 0.0) throw DomainError("volterra: delta must be >= 0");
}

std::size_t cell_count(double x_max, double h) {
  const double n = std::ceil(x_max / h - 1e-9);
  if (n > 5e7) throw DomainError("volterra: grid too large");
  return static_cast<std::size_t>(std::max(1.0, n));
}

void guard(double diag, double x) {
  if (!(diag > 0.5))
    throw SolverGuardError("volterra: diagonal guard violated at x = " + std::to_string(x) +
                           "; reduce the grid step");
}

}  // namespace

VolterraSolution solve(const VolterraProblem& problem) {
  check_problem(problem);
  if (problem.extrapolate) {
    VolterraProblem p = problem;
    p.extrapolate = false;
    const VolterraSolution coarse = solve(p);
    p.h = problem.h / 2.0;
    const VolterraSolution fine = solve(p);
    auto data = std::make_shared<VolterraShared>();
    data->problem = coarse.problem();
    data->problem.extrapolate = true;
    data->x = coarse.nodes();
    data->values.resize(coarse.size());
    for (std::size_t i = 0; i < coarse.size(); ++i)
      data->values[i] = (4.0 * fine.values()[2 * i] - coarse.values()[i]) / 3.0;
    data->coarse = coarse.data_;
    data->fine = fine.data_;
    return VolterraSolution(std::move(data));
  }
  auto data = std::make_shared<VolterraShared>();
  data->problem = problem;
  const double h = problem.h;
  const std::size_t n = cell_count(problem.x_max, h);
  // The last node sits exactly at x_max; the cells are uniform except that
  // n h may overshoot x_max by less than 1e-9 h, which is irrelevant.
  data->problem.x_max = static_cast<double>(n) * h;

  auto& x = data->x;
  auto& K = data->kernel;
  auto& alpha = data->alpha;
  auto& beta = data->beta;
  auto& H = data->values;
  x.resize(n + 1);
  K.resize(n + 1);
  for (std::size_t m = 0; m <= n; ++m) {
    x[m] = static_cast<double>(m) * h;
    K[m] = problem.kernel(x[m]);
  }
  alpha.assign(n, 0.0);
  beta.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const HatMoments mom = hat_moments(problem.weight, x[j], x[j + 1]);
    alpha[j] = mom.left;
    beta[j] = mom.right;
  }

  // Node weights v_j = alpha_j + beta_{j-1}; a row i uses alpha only for j < i.
  std::vector<std::size_t> active;
  std::vector<double> v;
  active.reserve(n + 1);
  v.reserve(n + 1);

  H.assign(n + 1, 0.0);
  H[0] = problem.forcing(0.0);
  if (!std::isfinite(H[0])) throw NonFiniteError("volterra: forcing is not finite at 0");
  for (std::size_t i = 1; i <= n; ++i) {
    // node i-1 becomes fully known: its weight is alpha_{i-1} + beta_{i-2}
    const std::size_t j = i - 1;
    const double vj = alpha[j] + (j > 0 ? beta[j - 1] : 0.0);
    if (vj != 0.0) {
      active.push_back(j);
      v.push_back(vj);
    }
    double acc = problem.forcing(x[i]);
    for (std::size_t k = 0; k < active.size(); ++k) acc += v[k] * K[i - active[k]] * H[active[k]];
    const double diag = 1.0 - beta[i - 1] * K[0];
    guard(diag, x[i]);
    H[i] = acc / diag;
    if (!std::isfinite(H[i])) throw NonFiniteError("volterra: solution overflowed at x = " + std::to_string(x[i]));
  }
  return VolterraSolution(std::move(data));
}

VolterraSolution solve_shifted(const VolterraProblem& problem, double y0) {
  if (y0 == 0.0) return solve(problem);
  VolterraProblem p = problem;
  p.weight = problem.weight.shifted(y0);
  return solve(p);
}

double VolterraSolution::h() const { return data_->problem.h; }
double VolterraSolution::x_max() const { return data_->problem.x_max; }
std::size_t VolterraSolution::size() const { return data_->values.size(); }
const std::vector<double>& VolterraSolution::nodes() const { return data_->x; }
const std::vector<double>& VolterraSolution::values() const { return data_->values; }
const VolterraProblem& VolterraSolution::problem() const { return data_->problem; }

double VolterraSolution::operator()(double xv) const {
  const auto& d = *data_;
  if (d.fine) return (4.0 * VolterraSolution(d.fine)(xv) - VolterraSolution(d.coarse)(xv)) / 3.0;
  const auto& p = d.problem;
  if (xv < 0.0) return p.forcing(xv);
  const double h = p.h;
  const std::size_t n = d.values.size() - 1;
  const double pos = xv / h;
  const double nearest = std::round(pos);
  if (std::abs(pos - nearest) <= 1e-9 && nearest <= static_cast<double>(n))
    return d.values[static_cast<std::size_t>(nearest)];

  if (xv > p.x_max) {
    if (p.weight.support_end > p.x_max * (1.0 + 1e-12) + 1e-12 && !p.weight.is_zero())
      throw DomainError("volterra: evaluation beyond the solved window");
    double acc = p.forcing(xv);
    for (std::size_t j = 0; j <= n; ++j) {
      const double vj = (j < n ? d.alpha[j] : 0.0) + (j > 0 ? d.beta[j - 1] : 0.0);
      if (vj != 0.0) acc += vj * p.kernel(xv - d.x[j]) * d.values[j];
    }
    return acc;
  }

  const std::size_t k = std::min(static_cast<std::size_t>(std::floor(pos)), n - 1);
  const HatMoments part = hat_moments(p.weight, d.x[k], xv);
  double acc = p.forcing(xv);
  for (std::size_t j = 0; j < k; ++j) {
    const double vj = d.alpha[j] + (j > 0 ? d.beta[j - 1] : 0.0);
    if (vj != 0.0) acc += vj * p.kernel(xv - d.x[j]) * d.values[j];
  }
  const double vk = part.left + (k > 0 ? d.beta[k - 1] : 0.0);
  acc += vk * p.kernel(xv - d.x[k]) * d.values[k];
  const double diag = 1.0 - part.right * d.kernel[0];
  guard(diag, xv);
  return acc / diag;
}

std::vector<double> VolterraSolution::fd_derivative() const {
  const auto& H = data_->values;
  const double h = data_->problem.h;
  const std::size_t n = H.size();
  std::vector<double> out(n, 0.0);
  if (n < 3) {
    if (n == 2) out[0] = out[1] = (H[1] - H[0]) / h;
    return out;
  }
  out[0] = (-3.0 * H[0] + 4.0 * H[1] - H[2]) / (2.0 * h);
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (H[i + 1] - H[i - 1]) / (2.0 * h);
  out[n - 1] = (3.0 * H[n - 1] - 4.0 * H[n - 2] + H[n - 3]) / (2.0 * h);
  return out;
}

double VolterraSolution::derivative_quadrature(double xv) const {
  const auto& d = *data_;
  if (d.fine)
    return (4.0 * VolterraSolution(d.fine).derivative_quadrature(xv) -
            VolterraSolution(d.coarse).derivative_quadrature(xv)) / 3.0;
  const auto& p = d.problem;
  if (!p.kernel_prime || !p.forcing_prime)
    throw PreconditionError("volterra: derivative_quadrature needs kernel_prime and forcing_prime");
  if (xv < 0.0) return p.forcing_prime(xv);
  if (xv > p.x_max * (1.0 + 1e-12)) throw DomainError("volterra: derivative beyond the solved window");
  const double hv = (*this)(xv);
  double acc = p.forcing_prime(xv) + d.kernel[0] * p.weight.right_limit(xv) * hv;
  // Same product rule as the solver, with K' in place of K on nodes up to x.
  const double h = p.h;
  const std::size_t n = d.values.size() - 1;
  const double pos = xv / h;
  std::size_t k = std::min(static_cast<std::size_t>(std::floor(pos + 1e-9)), n);
  for (std::size_t j = 0; j < k; ++j) {
    const double vj = d.alpha[j] + (j > 0 ? d.beta[j - 1] : 0.0);
    if (vj != 0.0) acc += vj * p.kernel_prime(xv - d.x[j]) * d.values[j];
  }
  if (xv - d.x[k] > 1e-9 * h) {
    const HatMoments part = hat_moments(p.weight, d.x[k], xv);
    const double vk = part.left + (k > 0 ? d.beta[k - 1] : 0.0);
    acc += vk * p.kernel_prime(xv - d.x[k]) * d.values[k] + part.right * p.kernel_prime(0.0) * hv;
  } else if (k > 0) {
    acc += d.beta[k - 1] * p.kernel_prime(0.0) * d.values[k];
  }
  return acc;
}

std::optional<double> richardson_order(const VolterraProblem& problem) {
  VolterraProblem p = problem;
  p.extrapolate = false;
  const VolterraSolution s1 = solve(p);
  p.h = problem.h / 2.0;
  const VolterraSolution s2 = solve(p);
  p.h = problem.h / 4.0;
  const VolterraSolution s4 = solve(p);
  double e1 = 0.0;
  double e2 = 0.0;
  for (std::size_t i = 0; i < s1.size(); ++i) {
    if (2 * i >= s2.size() || 4 * i >= s4.size()) break;
    e1 = std::max(e1, std::abs(s1.values()[i] - s2.values()[2 * i]));
    e2 = std::max(e2, std::abs(s2.values()[2 * i] - s4.values()[4 * i]));
  }
  if (e1 == 0.0 || e2 == 0.0) return std::nullopt;
  return std::log2(e1 / e2);
}

}  // namespace omegascale
