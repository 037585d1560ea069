#include <cmath>

#include "doctest.h"
#include "omegascale/classical_scale.hpp"
#include "omegascale/errors.hpp"
#include "omegascale/mc_oracle.hpp"
#include "omegascale/rng.hpp"

using namespace omegascale;

namespace {

const LevyModel bm = BrownianDrift{1.0, std::sqrt(2.0)};
const LevyModel cl = CramerLundberg{1.0, 1.0, 2.0};

SimConfig config(const LevyModel& m, OmegaSpec omega, std::size_t n = 20000) {
  SimConfig cfg;
  cfg.model = m;
  cfg.omega = std::move(omega);
  cfg.n_paths = n;
  cfg.dt = 1e-3;
  return cfg;
}

// |estimate - want| within k standard errors plus an absolute slack
bool within(const MCEstimate& e, double want, double k = 4.0, double slack = 2e-3) {
  return std::abs(e.mean - want) <= k * e.std_error + slack;
}

}  // namespace

TEST_CASE("Philox known-answer vectors") {
  using A = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        A{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        A{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("Philox streams") {
  PhiloxStream a(7, 3), b(7, 3), c(7, 4);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u != c.uniform());
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
  PhiloxStream s(11, 0);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.01);
}

TEST_CASE("estimates are reproducible") {
  const auto cfg = config(bm, OmegaSpec(BandOmega{0.2, 1.0, 0.3, 0.8}), 2000);
  const auto e1 = simulate_exit(cfg, 0.5, 1.0);
  const auto e2 = simulate_exit(cfg, 0.5, 1.0);
  CHECK(e1.a.mean == e2.a.mean);
  CHECK(e1.b.mean == e2.b.mean);
  CHECK(e1.a.std_error == e2.a.std_error);
  auto other = cfg;
  other.seed = 2;
  CHECK(simulate_exit(other, 0.5, 1.0).a.mean != e1.a.mean);
}

TEST_CASE("exit without killing matches the scale-function ratio") {
  for (const LevyModel& m : {bm, cl}) {
    const auto e = simulate_exit(config(m, OmegaSpec(ConstantOmega{0.0})), 0.5, 1.5);
    const double a = w_q(m, 0.0, 0.5) / w_q(m, 0.0, 1.5);
    CHECK(within(e.a, a));
    CHECK(within(e.b, 1.0 - a));
    CHECK(e.a.n_effective == 20000);
    CHECK_FALSE(e.a.flagged());
  }
}

TEST_CASE("exit with constant killing") {
  const double q = 0.8, x = 0.4, c = 1.2;
  for (const LevyModel& m : {bm, cl}) {
    const auto e = simulate_exit(config(m, OmegaSpec(ConstantOmega{q})), x, c);
    const double a = w_q(m, q, x) / w_q(m, q, c);
    CHECK(within(e.a, a));
    CHECK(within(e.b, z_q(m, q, x) - z_q(m, q, c) * a));
  }
}

TEST_CASE("reflected processes") {
  for (const LevyModel& m : {bm, cl}) {
    const auto zero = simulate_reflected(config(m, OmegaSpec(ConstantOmega{0.0}), 500), 0.3, 1.0);
    CHECK(zero.mean == 1.0);
    CHECK(zero.std_error == 0.0);
    const double q = 0.5, x = 0.3, c = 1.0;
    const auto cfg = config(m, OmegaSpec(ConstantOmega{q}));
    CHECK(within(simulate_reflected(cfg, x, c), z_q(m, q, x) / z_q(m, q, c)));
    const double dual = z_q(m, q, c - x) - q * w_q(m, q, c - x) * w_q(m, q, c) / w_q_prime(m, q, c);
    CHECK(within(simulate_reflected(cfg, x, c, true), dual));
  }
}

TEST_CASE("one-sided upward passage") {
  const double q = 0.6;
  for (const LevyModel& m : {bm, cl}) {
    const auto e = simulate_one_sided_up(config(m, OmegaSpec(ConstantOmega{q})), 0.2, 1.0);
    CHECK(within(e, std::exp(-phi_inverse(m, q) * 0.8)));
  }
}

TEST_CASE("the two estimators agree") {
  for (const LevyModel& m : {bm, cl}) {
    auto cfg = config(m, OmegaSpec(BandOmega{0.3, 1.5, 0.4, 0.9}));
    const auto w = simulate_exit(cfg, 0.5, 1.2);
    cfg.estimator = Estimator::poisson_thinning;
    const auto t = simulate_exit(cfg, 0.5, 1.2);
    for (auto [u, v] : {std::pair{w.a, t.a}, std::pair{w.b, t.b}})
      CHECK(std::abs(u.mean - v.mean) <= 4.0 * std::hypot(u.std_error, v.std_error) + 2e-3);
  }
}

TEST_CASE("bridge correction removes the step-crossing bias") {
  const double q = 0.6;
  auto cfg = config(bm, OmegaSpec(ConstantOmega{q}), 20000);
  cfg.dt = 1e-2;
  const double want = std::exp(-phi_inverse(bm, q) * 0.8);
  const auto bridged = simulate_one_sided_up(cfg, 0.2, 1.0);
  CHECK(within(bridged, want));
  cfg.bridge_correction = false;
  const auto plain = simulate_one_sided_up(cfg, 0.2, 1.0);
  // missed crossings delay the passage, so the discount is overstated
  CHECK(plain.mean < want - 3.0 * plain.std_error);
}

TEST_CASE("halving dt leaves the bridged estimate unchanged") {
  auto cfg = config(bm, OmegaSpec(BandOmega{0.2, 1.0, 0.3, 0.8}), 10000);
  cfg.dt = 4e-3;
  const auto coarse = simulate_exit(cfg, 0.5, 1.0);
  cfg.dt = 2e-3;
  const auto fine = simulate_exit(cfg, 0.5, 1.0);
  CHECK(std::abs(coarse.a.mean - fine.a.mean) <= 4.0 * std::hypot(coarse.a.std_error, fine.a.std_error) + 2e-3);
}

TEST_CASE("bankruptcy of the omega model") {
  auto cfg = config(BrownianDrift{1.0, 1.0}, OmegaSpec(ConstantOmega{0.0}), 10000);
  const double R = 2.0;
  for (double x : {0.0, 0.5}) CHECK(within(simulate_bankruptcy(cfg, 0.0, 0.0, 1.0, x), std::exp(-R * (x + 1.0))));
  double prev = 0.0;
  for (double g : {0.0, 0.5, 2.0}) {
    const auto e = simulate_bankruptcy(cfg, g, g, 1.0, 0.3);
    CHECK(e.mean > prev);
    prev = e.mean;
  }
  CHECK(simulate_bankruptcy(cfg, 0.2, 0.5, 1.0, -2.0).mean == 1.0);
  CHECK_THROWS_AS(simulate_bankruptcy(config(cl, OmegaSpec(ConstantOmega{0.0})), 0.2, 0.5, 1.0, 0.0),
                  UnsupportedModelError);
  CHECK_THROWS_AS(simulate_bankruptcy(cfg, -0.2, 0.5, 1.0, 0.0), DomainError);
  cfg.model = BrownianDrift{-1.0, 1.0};
  CHECK_THROWS_AS(simulate_bankruptcy(cfg, 0.2, 0.5, 1.0, 0.0), DomainError);
}

TEST_CASE("horizon truncation is flagged") {
  auto cfg = config(BrownianDrift{0.0, 0.1}, OmegaSpec(ConstantOmega{0.1}), 200);
  cfg.horizon_cap = 0.05;
  const auto e = simulate_exit(cfg, 1.0, 2.0);
  CHECK(e.a.truncated_fraction > 0.5);
  CHECK(e.a.n_effective < 200);
  CHECK(e.a.flagged());
}

TEST_CASE("configuration errors") {
  auto cfg = config(bm, OmegaSpec(ConstantOmega{0.1}), 10);
  CHECK_THROWS_AS(simulate_exit(cfg, 1.5, 1.0), DomainError);
  CHECK_THROWS_AS(simulate_exit(cfg, 0.5, 0.0), DomainError);
  CHECK_THROWS_AS(simulate_one_sided_up(cfg, 2.0, 1.0), DomainError);
  auto bad = cfg;
  bad.dt = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = cfg;
  bad.n_paths = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = cfg;
  bad.horizon_cap = -1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = cfg;
  bad.model = Tabulated{};
  CHECK_THROWS_AS(bad.validate(), UnsupportedModelError);
  bad = cfg;
  bad.omega = OmegaSpec(ExponentialOmega{1.0, 1.0});
  bad.estimator = Estimator::poisson_thinning;
  CHECK_THROWS_AS(simulate_one_sided_up(bad, 0.2, 1.0), PreconditionError);
}
