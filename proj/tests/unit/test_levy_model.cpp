#include <cmath>
#include <memory>

#include "doctest.h"
#include "omegascale/errors.hpp"
#include "omegascale/levy_model.hpp"
#include "omegascale/scale_table.hpp"
#include "test_util.hpp"

using namespace omegascale;

namespace {

const LevyModel bm = BrownianDrift{1.0, std::sqrt(2.0)};
const LevyModel cl = CramerLundberg{1.0, 1.0, 2.0};

}  // namespace

TEST_CASE("psi at zero vanishes") {
  CHECK(psi(bm, 0.0) == 0.0);
  CHECK(psi(cl, 0.0) == 0.0);
  CHECK(psi(BrownianDrift{-0.7, 0.3}, 0.0) == 0.0);
}

TEST_CASE("psi spot values") {
  CHECK(psi(bm, 2.0) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(psi(cl, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("psi rejects negative arguments and tabulated models") {
  CHECK_THROWS_AS(psi(bm, -1.0), DomainError);
  Tabulated t{std::make_shared<ScaleTable>(), std::make_shared<PhiTable>()};
  CHECK_THROWS_AS(psi(t, 1.0), UnsupportedModelError);
}

TEST_CASE("psi' matches central differences") {
  for (const LevyModel& m : {bm, cl}) {
    for (double th : {0.3, 1.0, 4.5}) {
      const double e = 1e-6;
      const double fd = (psi(m, th + e) - psi(m, th - e)) / (2 * e);
      CHECK(psi_prime(m, th) == doctest::Approx(fd).epsilon(1e-8));
    }
  }
}

TEST_CASE("Phi spot values") {
  CHECK(phi_inverse(bm, 0.0) == 0.0);
  CHECK(phi_inverse(bm, 6.0) == doctest::Approx(2.0).epsilon(1e-13));
  // negative drift: Phi(0) is the positive root of s^2 - s = 0
  CHECK(phi_inverse(BrownianDrift{-1.0, std::sqrt(2.0)}, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  // CL with negative safety loading: psi(s) = s (s + vs)/(s + 2), vs = -1
  CHECK(phi_inverse(CramerLundberg{1.0, 3.0, 2.0}, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Phi round trip on random q") {
  testutil::Draws d(11);
  for (const LevyModel& m : {bm, cl, LevyModel(CramerLundberg{0.8, 2.5, 1.3})}) {
    for (int i = 0; i < 100; ++i) {
      const double q = d.uniform(1e-9, 100.0);
      const double s = phi_inverse(m, q);
      CHECK(std::abs(psi(m, s) - q) <= 1e-12 * std::max(1.0, q));
    }
  }
}

TEST_CASE("Phi is nondecreasing and psi is convex, increasing beyond Phi(0)") {
  for (const LevyModel& m : {bm, cl, LevyModel(CramerLundberg{1.0, 3.0, 2.0})}) {
    double prev = phi_inverse(m, 0.0);
    for (double q = 0.25; q <= 20.0; q += 0.25) {
      const double s = phi_inverse(m, q);
      CHECK(s >= prev);
      prev = s;
    }
    const double s0 = phi_inverse(m, 0.0);
    for (double s1 = s0; s1 < s0 + 10.0; s1 += 0.5) {
      const double s2 = s1 + 0.37;
      CHECK(psi(m, s2) > psi(m, s1));
      CHECK(psi(m, 0.5 * (s1 + s2)) <= 0.5 * (psi(m, s1) + psi(m, s2)) + 1e-14);
    }
  }
}

TEST_CASE("model validation") {
  CHECK_NOTHROW(validate(bm));
  CHECK_THROWS_AS(validate(BrownianDrift{1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(validate(CramerLundberg{0.0, 1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(validate(CramerLundberg{1.0, -1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(validate(CramerLundberg{1.0, 1.0, 0.0}), DomainError);
  CHECK(std::get<CramerLundberg>(cl).varsigma() == doctest::Approx(1.0));
}

TEST_CASE("model names, atoms and closed-form flags") {
  CHECK(std::string(model_name(bm)) == "bm");
  CHECK(std::string(model_name(cl)) == "cl");
  CHECK(scale_atom(bm) == 0.0);
  CHECK(scale_atom(CramerLundberg{2.0, 1.0, 1.0}) == 0.5);
  CHECK(has_closed_form(cl));
}

TEST_CASE("tabulated model from CSV") {
  const std::string dir = OMEGASCALE_TEST_DATA;
  auto scale = std::make_shared<ScaleTable>(load_scale_table_csv(dir + "/scale_table.csv", 0.0));
  auto phi = std::make_shared<PhiTable>(load_phi_table_csv(dir + "/phi_table.csv"));
  const LevyModel t = Tabulated{scale, phi};
  CHECK_NOTHROW(validate(t));
  CHECK(std::string(model_name(t)) == "table");
  CHECK_FALSE(has_closed_form(t));
  CHECK(phi_inverse(t, 1.0) == doctest::Approx(0.6180339887498949));
  CHECK(phi_inverse(t, 1.5) == doctest::Approx(0.5 * (0.6180339887498949 + 1.0)));
  CHECK_THROWS_AS(phi_inverse(t, 3.0), DomainError);
  CHECK(scale->w_at(-1.0) == 0.0);
  CHECK(scale->z_at(-1.0) == 1.0);
  CHECK(scale->w_at(0.25) == doctest::Approx(0.5 * 0.39346934028736658));
  CHECK_THROWS_AS(scale->w_at(2.5), DomainError);
}

TEST_CASE("scale table validation") {
  ScaleTable t;
  t.h = 0.5;
  t.x = {0.0, 0.5, 1.0};
  t.w = {0.0, 0.4, 0.3};
  t.z = {1.0, 1.0, 1.0};
  t.wprime = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(t.validate(), ConfigError);
  t.w = {0.0, 0.3, 0.4};
  CHECK_NOTHROW(t.validate());
  t.x[2] = 1.2;
  CHECK_THROWS_AS(t.validate(), ConfigError);
  CHECK_THROWS_AS(load_scale_table_csv("/nonexistent/scale.csv", 0.0), ConfigError);
}
