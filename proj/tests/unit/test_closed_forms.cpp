#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"
#include "omegascale/classical_scale.hpp"
#include "omegascale/closed_forms.hpp"
#include "omegascale/errors.hpp"
#include "omegascale/omega_scale.hpp"
#include "test_util.hpp"

using namespace omegascale;
using testutil::rel_err;

namespace {

const LevyModel bm = BrownianDrift{1.0, std::sqrt(2.0)};
const LevyModel cl = CramerLundberg{1.0, 1.0, 2.0};

double gamma_density_oracle(double varrho, double mu) {
  // E[exp(-(varrho/2)/G)], G ~ Gamma(mu, 1)
  auto f = [&](double g) { return std::exp(-0.5 * varrho / g - g + (mu - 1) * std::log(g) - boost::math::lgamma(mu)); };
  return boost::math::quadrature::exp_sinh<double>().integrate(f, 0.0, INFINITY);
}

}  // namespace

TEST_CASE("piecewise mixtures") {
  const PiecewiseMixture f(1.0, {0.0, 1.0}, {ExpMixture::constant(2.0), ExpMixture::exponential(1.0, 1.0)});
  CHECK(f(-0.5) == 1.0);
  CHECK(f(0.5) == 2.0);
  CHECK(f(1.5) == doctest::Approx(std::exp(1.5)));
  const auto g = f.plus_scaled(2.0, PiecewiseMixture(0.0, {0.5}, {ExpMixture::constant(1.0)}));
  CHECK(g(0.25) == 2.0);
  CHECK(g(0.75) == 4.0);
  CHECK(g(2.0) == doctest::Approx(std::exp(2.0) + 2.0));
  // int_0^x e^{-(x - z)} f(z) dz against a direct evaluation
  const auto c = f.convolve_from(ExpMixture::exponential(1.0, -1.0), 0.0);
  const double x = 1.8;
  const double want = 2.0 * (std::exp(-(x - 1.0)) - std::exp(-x)) + std::exp(-x) * (std::exp(2 * x) - std::exp(2.0)) / 2;
  CHECK(c(x) == doctest::Approx(want).epsilon(1e-13));
  CHECK_THROWS_AS(PiecewiseMixture(0.0, {1.0, 0.0}, {ExpMixture(), ExpMixture()}), PreconditionError);
}

TEST_CASE("band scale functions: both representations agree") {
  for (const LevyModel& m : {bm, cl}) {
    const BandScale s(m, 0.3, 1.0, 0.5);
    for (int i = 0; i < 50; ++i) {
      const double x = 3.0 * i / 49.0;
      CHECK(std::abs(s.w(x) - s.w_first_line(x)) <= 1e-10 * std::max(1.0, s.w(x)));
      CHECK(std::abs(s.z(x) - s.z_first_line(x)) <= 1e-10 * std::max(1.0, s.z(x)));
    }
  }
}

TEST_CASE("band scale functions: degenerate cases") {
  for (const LevyModel& m : {bm, cl}) {
    for (double x : {0.0, 0.2, 0.5}) {
      CHECK(band_w(m, 0.3, 1.0, 0.5, x) == doctest::Approx(w_q(m, 0.3, x)).epsilon(1e-13));
      CHECK(band_z(m, 0.3, 1.0, 0.5, x) == doctest::Approx(z_q(m, 0.3, x)).epsilon(1e-13));
    }
    for (double x : {0.7, 2.0}) CHECK(band_w(m, 0.3, 0.0, 0.5, x) == doctest::Approx(w_q(m, 0.3, x)).epsilon(1e-13));
    // a = 0 turns the band into a constant p + q
    CHECK(band_w(m, 0.3, 1.0, 0.0, 1.4) == doctest::Approx(w_q(m, 1.3, 1.4)).epsilon(1e-12));
    CHECK(band_h(m, 0.3, 0.0, 1.4) == doctest::Approx(std::exp(phi_inverse(m, 0.3) * 1.4)).epsilon(1e-12));
    for (double x : {0.3, 1.0, 1.2}) {
      const auto [w, z] = band_composites(m, 0.3, 1.0, 0.5, 1.2, x);
      CHECK(w == doctest::Approx(band_w(m, 0.3, 1.0, 0.5, x)).epsilon(1e-14));
      CHECK(z == doctest::Approx(band_z(m, 0.3, 1.0, 0.5, x)).epsilon(1e-14));
    }
  }
  CHECK_THROWS_AS(band_composites(bm, 0.3, 1.0, 1.0, 0.5, 1.0), DomainError);
  CHECK_THROWS_AS(BandScale(bm, -0.1, 1.0, 0.5), DomainError);
}

TEST_CASE("band with a floor") {
  const BandOmegaScale s(cl, 0.3, 1.0, 0.0, 1.2);
  CHECK(s.h(-1.0) == doctest::Approx(std::exp(-phi_inverse(cl, 0.3))));
  CHECK(s.w(0.8, 0.8) == doctest::Approx(w_q(cl, 0.0, 0.0)));
  CHECK(s.z(0.8, 0.8) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.xi(2.0, 2.0, 0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(BandOmegaScale(cl, 0.3, 1.0, 0.5, 1.2).h(1.0), PreconditionError);
}

TEST_CASE("omega model boundary conditions") {
  for (auto [g0, g1] : {std::pair{0.2, 0.5}, std::pair{1.0, 2.0}, std::pair{0.0, 0.7}}) {
    const auto s = omega_model(g0, g1, 1.0, 1.0, 1.0);
    CHECK(std::abs(s.g(0.0)) <= 1e-10);
    CHECK(std::abs(s.g_prime(0.0) - 2.0) <= 1e-10);
    CHECK(s.w(-1.5) == 0.0);
    for (double x : {0.3, 2.0}) CHECK(rel_err(s.bankruptcy_positive(x), s.bankruptcy(x)) <= 1e-10);
    CHECK(s.bankruptcy(-1.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("omega model without killing") {
  const double mu = 1.0, sigma = 1.0, d = 1.0, R = 2 * mu / (sigma * sigma);
  for (double x : {0.0, 0.5, 1.0, 3.0})
    CHECK(rel_err(omega_model_bankruptcy(0.0, 0.0, d, mu, sigma, x), std::exp(-R * (x + d))) <= 1e-10);
}

TEST_CASE("omega model against the generic shifted solve") {
  for (auto [g0, g1] : {std::pair{0.2, 0.5}, std::pair{0.8, 0.0}}) {
    const double d = 1.0, mu = 1.0, sigma = 1.0;
    const auto s = omega_model(g0, g1, d, mu, sigma);
    const LevyModel m = BrownianDrift{mu, sigma};
    const auto t = build_two_arg(m, OmegaSpec(LinearBandOmega{g0, g1, d}), -d, Grid{1.0, 1e-3});
    for (double x = -d + 0.05; x <= 1.0; x += 0.05) CHECK(rel_err(s.w(x), t.w(x)) <= 1e-4);
  }
}

TEST_CASE("omega model bankruptcy is monotone in the killing rate") {
  double prev = omega_model_bankruptcy(0.0, 0.0, 1.0, 1.0, 1.0, 0.5);
  for (double g : {0.1, 0.5, 1.0, 3.0}) {
    const double v = omega_model_bankruptcy(g, g, 1.0, 1.0, 1.0, 0.5);
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS(omega_model(0.2, 0.5, 1.0, -1.0, 1.0), DomainError);
}

TEST_CASE("self-similar Brownian forms") {
  const double varrho = 0.7, xi = 1.0, mu = 0.6, sigma = 1.0;
  CHECK(std::abs(selfsim_w_bm(varrho, xi, mu, sigma, 0.0)) <= 1e-10);
  CHECK(std::abs(selfsim_z_bm(varrho, xi, mu, sigma, 0.0) - 1.0) <= 1e-10);
  const LevyModel m = BrownianDrift{mu, sigma};
  const OmegaSpec omega(ExponentialOmega{varrho, xi});
  const auto s = build_w_omega(m, omega, Grid{3.0, 1e-3});
  for (double x = 0.1; x <= 3.0; x += 0.1) {
    CHECK(rel_err(s.w(x), selfsim_w_bm(varrho, xi, mu, sigma, x)) <= 1e-4);
    CHECK(rel_err(s.z(x), selfsim_z_bm(varrho, xi, mu, sigma, x)) <= 1e-4);
  }
  const auto t = build_two_arg(m, omega, -1.0, Grid{2.0, 1e-3});
  for (double x : {-0.5, 0.5, 2.0}) CHECK(rel_err(t.w(x), selfsim_w_bm_two_arg(varrho, xi, mu, sigma, x, -1.0)) <= 1e-4);
  CHECK_THROWS_AS(selfsim_w_bm(varrho, 1.2, mu, sigma, 1.0), DomainError);  // alpha = 1
}

TEST_CASE("self-similar Cramer-Lundberg forms") {
  const double varrho = 0.7, xi = 0.7, mu = 1.0, vartheta = 1.0, rho = 2.0;
  CHECK(std::abs(selfsim_w_cl(varrho, xi, mu, vartheta, rho, 0.0) - 1.0 / mu) <= 1e-10);
  CHECK(std::abs(selfsim_z_cl(varrho, xi, mu, vartheta, rho, 0.0) - 1.0) <= 1e-10);
  const LevyModel m = CramerLundberg{mu, vartheta, rho};
  const auto s = build_w_omega(m, OmegaSpec(ExponentialOmega{varrho, xi}), Grid{3.0, 1e-3});
  for (double x = 0.0; x <= 3.0; x += 0.1) {
    CHECK(rel_err(s.w(x), selfsim_w_cl(varrho, xi, mu, vartheta, rho, x)) <= 1e-4);
    CHECK(rel_err(s.z(x), selfsim_z_cl(varrho, xi, mu, vartheta, rho, x)) <= 1e-4);
  }
  // varsigma = 1 = xi
  CHECK_THROWS_AS(selfsim_w_cl(varrho, 1.0, mu, vartheta, rho, 1.0), DomainError);
}

TEST_CASE("perpetual exponential functional") {
  for (double mu : {0.7, 1.3})
    for (double varrho : {0.5, 2.0})
      CHECK(rel_err(perpetual_exponential_functional(varrho, 2.0, mu, 1.0, 0.0), gamma_density_oracle(varrho, mu)) <=
            1e-6);
  double prev = 0.0;
  for (double x = -1.0; x <= 8.0; x += 1.0) {
    const double v = perpetual_exponential_functional(0.7, 1.0, 0.6, 1.0, x);
    CHECK(v > prev);
    CHECK(v < 1.0);
    prev = v;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_THROWS_AS(perpetual_exponential_functional(0.7, 1.0, -0.5, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(perpetual_exponential_functional(0.7, 2.0, 1.0, 1.0, 0.0), DomainError);  // alpha = 1
}

TEST_CASE("step recursion") {
  for (const LevyModel& m : {bm, cl}) {
    for (double x : {0.0, 0.6, 2.0}) {
      CHECK(step_recursion_w({0.4}, {}, m, x, -0.3) == doctest::Approx(w_q(m, 0.4, x + 0.3)).epsilon(1e-14));
      CHECK(step_recursion_z({0.4}, {}, m, x, -0.3) == doctest::Approx(z_q(m, 0.4, x + 0.3)).epsilon(1e-14));
    }
    const BandScale single(m, 0.3, 0.8, 0.5);
    for (double x : {0.2, 0.5, 1.0, 2.5}) {
      CHECK(rel_err(step_recursion_w({0.3, 1.1}, {0.5}, m, x, 0.0), single.w(x)) <= 1e-12);
      CHECK(rel_err(step_recursion_z({0.3, 1.1}, {0.5}, m, x, 0.0), single.z(x)) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(step_recursion_w({0.3}, {0.5}, bm, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(step_recursion_w({0.3, 0.1, 0.2}, {0.5, 0.2}, bm, 1.0, 0.0), DomainError);
}

TEST_CASE("step recursion against the generic solver") {
  testutil::Draws d(5);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<double> levels{d.uniform(0, 2)}, cuts;
    double cut = d.uniform(-0.5, 0.5);
    for (int k = 0; k < 3; ++k) {
      cuts.push_back(cut);
      levels.push_back(d.uniform(0, 2));
      cut += d.uniform(0.1, 0.8);
    }
    for (const LevyModel& m : {bm, cl}) {
      const double y = -0.2;
      const auto t = build_two_arg(m, OmegaSpec(StepOmega{levels, cuts}), y, Grid{2.5, 1e-3});
      for (double x = y + 0.05; x <= 2.5; x += 0.05) CHECK(rel_err(t.w(x), step_recursion_w(levels, cuts, m, x, y)) <= 1e-5);
    }
  }
}
