#include <cmath>

#include "doctest.h"
#include "omegascale/classical_scale.hpp"
#include "omegascale/errors.hpp"
#include "omegascale/omega_spec.hpp"
#include "omegascale/volterra.hpp"
#include "test_util.hpp"

using namespace omegascale;

namespace {

const LevyModel bm = BrownianDrift{1.0, std::sqrt(2.0)};
const LevyModel cl = CramerLundberg{1.0, 1.0, 2.0};

// The renewal equation for W^(omega) (forcing W^(delta)) or Z^(omega)
// (forcing Z^(delta)) with kernel W^(delta).
VolterraProblem problem(const LevyModel& m, const OmegaSpec& omega, double delta, bool z, double h = 1e-3,
                        double x_max = 2.0) {
  VolterraProblem p;
  p.kernel = [m, delta](double x) { return w_q(m, delta, x); };
  if (z)
    p.forcing = [m, delta](double x) { return z_q(m, delta, x); };
  else
    p.forcing = p.kernel;
  p.kernel_prime = [m, delta](double x) { return w_q_prime(m, delta, x); };
  p.forcing_prime = z ? std::function<double(double)>([m, delta](double x) { return delta * w_q(m, delta, x); })
                      : p.kernel_prime;
  p.weight = omega.weight(delta);
  p.delta = delta;
  p.h = h;
  p.x_max = x_max;
  return p;
}

double max_abs_error(const VolterraSolution& s, const std::function<double(double)>& exact) {
  double e = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) e = std::max(e, std::abs(s.values()[i] - exact(s.nodes()[i])));
  return e;
}

}  // namespace

TEST_CASE("zero weight returns the forcing exactly") {
  for (const LevyModel& m : {bm, cl}) {
    const auto p = problem(m, OmegaSpec(ConstantOmega{0.0}), 0.0, false);
    const auto s = solve(p);
    CHECK(s.size() == 2001);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.values()[i] == p.forcing(s.nodes()[i]));
    CHECK(s(-0.3) == p.forcing(-0.3));
  }
}

TEST_CASE("constant omega reproduces W^(q) and Z^(q)") {
  for (double q : {0.5, 1.0}) {
    const OmegaSpec omega(ConstantOmega{q});
    CHECK(max_abs_error(solve(problem(bm, omega, 0.0, false)), [q](double x) { return w_q(bm, q, x); }) <= 1e-6);
    CHECK(max_abs_error(solve(problem(bm, omega, 0.0, true)), [q](double x) { return z_q(bm, q, x); }) <= 1e-6);
  }
  // The plain scheme's error constant grows with W^(q); at q = 6 the
  // extrapolated scheme is needed for 1e-6.
  const OmegaSpec omega(ConstantOmega{6.0});
  auto pw = problem(bm, omega, 0.0, false);
  auto pz = problem(bm, omega, 0.0, true);
  CHECK(max_abs_error(solve(pw), [](double x) { return w_q(bm, 6.0, x); }) <= 1e-4);
  pw.extrapolate = pz.extrapolate = true;
  CHECK(max_abs_error(solve(pw), [](double x) { return w_q(bm, 6.0, x); }) <= 1e-6);
  CHECK(max_abs_error(solve(pz), [](double x) { return z_q(bm, 6.0, x); }) <= 1e-6);
}

TEST_CASE("Cramer-Lundberg constant omega") {
  const OmegaSpec omega(ConstantOmega{1.0});
  const auto s = solve(problem(cl, omega, 0.0, false));
  CHECK(s.values()[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(max_abs_error(s, [](double x) { return w_q(cl, 1.0, x); }) <= 1e-6);
}

TEST_CASE("shift level invariance") {
  const OmegaSpec omega(ConstantOmega{1.0});
  const auto s0 = solve(problem(bm, omega, 0.0, false));
  const auto s1 = solve(problem(bm, omega, 1.0, false));
  for (std::size_t i = 0; i < s0.size(); ++i) CHECK(std::abs(s0.values()[i] - s1.values()[i]) <= 5e-6);
  const OmegaSpec band(BandOmega{0.3, 1.0, 0.5, 1.2});
  const auto b0 = solve(problem(bm, band, 0.0, true));
  const auto b1 = solve(problem(bm, band, 0.3, true));
  for (std::size_t i = 0; i < b0.size(); ++i) CHECK(std::abs(b0.values()[i] - b1.values()[i]) <= 5e-6);
}

TEST_CASE("linearity in the forcing") {
  const OmegaSpec band(BandOmega{0.3, 1.0, 0.5, 1.2});
  auto p1 = problem(cl, band, 0.3, false);
  auto p2 = problem(cl, band, 0.3, true);
  auto p12 = p1;
  p12.forcing = [f1 = p1.forcing, f2 = p2.forcing](double x) { return f1(x) + f2(x); };
  const auto s1 = solve(p1), s2 = solve(p2), s12 = solve(p12);
  for (std::size_t i = 0; i < s1.size(); ++i) {
    const double sum = s1.values()[i] + s2.values()[i];
    CHECK(std::abs(s12.values()[i] - sum) <= 1e-12 * std::max(1.0, std::abs(sum)));
  }
}

TEST_CASE("shifted solves") {
  const OmegaSpec band(BandOmega{0.3, 1.0, 0.5, 1.2});
  const auto p = problem(bm, band, 0.3, false);
  const auto plain = solve(p);
  const auto zero_shift = solve_shifted(p, 0.0);
  for (std::size_t i = 0; i < plain.size(); ++i) CHECK(plain.values()[i] == zero_shift.values()[i]);

  const auto pc = problem(bm, OmegaSpec(ConstantOmega{0.8}), 0.0, false);
  const auto c0 = solve(pc);
  const auto c1 = solve_shifted(pc, 3.7);
  for (std::size_t i = 0; i < c0.size(); ++i) CHECK(std::abs(c0.values()[i] - c1.values()[i]) <= 1e-14);

  const auto moved = solve(problem(bm, OmegaSpec(BandOmega{0.3, 1.0, 0.0, 0.7}), 0.3, false));
  const auto shifted = solve_shifted(p, 0.5);
  for (std::size_t i = 0; i < moved.size(); ++i)
    CHECK(std::abs(moved.values()[i] - shifted.values()[i]) <= 1e-12 * std::max(1.0, moved.values()[i]));
}

TEST_CASE("self-convergence order") {
  const OmegaSpec omega(ConstantOmega{1.0});
  const auto ob = richardson_order(problem(bm, omega, 0.0, false, 1e-2));
  REQUIRE(ob.has_value());
  CHECK(*ob >= 1.8);
  const auto oc = richardson_order(problem(cl, omega, 0.0, false, 1e-2));
  REQUIRE(oc.has_value());
  CHECK(*oc >= 0.9);
  CHECK_FALSE(richardson_order(problem(bm, OmegaSpec(ConstantOmega{0.0}), 0.0, false, 1e-2)).has_value());
}

TEST_CASE("diagonal guard") {
  auto p = problem(cl, OmegaSpec(ConstantOmega{1000.0}), 0.0, false, 1e-2, 1.0);
  CHECK_THROWS_AS(solve(p), SolverGuardError);
}

TEST_CASE("comparison principle") {
  testutil::Draws d(99);
  for (int trial = 0; trial < 10; ++trial) {
    const double p = d.uniform(0.0, 1.0), q = d.uniform(0.0, 2.0), a = d.uniform(0.0, 1.0), b = a + d.uniform(0.1, 1.0);
    const OmegaSpec lo(BandOmega{p, q, a, b});
    const OmegaSpec hi(BandOmega{p, q + d.uniform(0.1, 1.0), a, b});
    for (const LevyModel& m : {bm, cl}) {
      const auto s1 = solve(problem(m, lo, 0.0, false, 1e-2));
      const auto s2 = solve(problem(m, hi, 0.0, false, 1e-2));
      for (std::size_t i = 0; i < s1.size(); ++i) CHECK(s1.values()[i] <= s2.values()[i] + 1e-12);
      CHECK(s1.values().back() < s2.values().back());
    }
  }
}

TEST_CASE("off-grid evaluation and derivatives") {
  const OmegaSpec omega(ConstantOmega{1.0});
  const auto s = solve(problem(bm, omega, 0.0, false));
  for (double x : {0.12345, 1.00051, 1.9999}) {
    CHECK(std::abs(s(x) - w_q(bm, 1.0, x)) <= 1e-6);
    CHECK(std::abs(s.derivative_quadrature(x) - w_q_prime(bm, 1.0, x)) <= 1e-5);
  }
  const auto fd = s.fd_derivative();
  for (std::size_t i = 0; i < s.size(); i += 100)
    CHECK(std::abs(fd[i] - w_q_prime(bm, 1.0, s.nodes()[i])) <= 1e-5);
  CHECK_THROWS(s(2.5));
}
