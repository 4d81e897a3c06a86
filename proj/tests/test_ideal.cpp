#include "doctest.h"

#include <cmath>
#include <random>

#include "peh/ideal.hpp"
#include "peh/system.hpp"

using namespace peh;

TEST_CASE("resonant power ratio peaks at 1/4 for eta = 1") {
  CHECK(beta_r(1.0) == 0.25);
  CHECK(beta_r(0.0) == 0.0);
  CHECK(beta_r(0.5) < 0.25);
  CHECK(beta_r(2.0) < 0.25);
  // symmetry under eta -> 1/eta
  CHECK(beta_r(3.0) == doctest::Approx(beta_r(1.0 / 3.0)).epsilon(1e-15));
}

TEST_CASE("off-resonance power reduces to 1 at resonance") {
  CHECK(beta_o({0.02, 1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(beta_o({0.02, 1.0, 0.9}) < 1.0);
  CHECK(beta_o({0.02, 1.0, 1.1}) < 1.0);
}

TEST_CASE("closed-form bandwidth matches numeric half-power roots") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> eta_d(0.0, 5.0);
  std::uniform_real_distribution<double> zeta_d(1e-3, 0.05);
  for (int i = 0; i < 100; ++i) {
    const double eta = eta_d(rng);
    const double zeta = zeta_d(rng);
    const auto roots = half_power_roots(eta, zeta);
    REQUIRE(roots.two_sided);
    const double numeric = roots.upper - roots.lower;
    const double closed = half_power_bandwidth(eta, zeta);
    CHECK(std::abs(numeric - closed) <= 1e-9 * closed);
  }
}

TEST_CASE("half-power roots are exact algebraically") {
  // beta_o = 1/2 at w^2 -+ 2(1+eta) zeta w - 1 = 0
  const double eta = 1.7, zeta = 0.03;
  const auto roots = half_power_roots(eta, zeta);
  const double c = (1.0 + eta) * zeta;
  CHECK(roots.lower ==
        doctest::Approx(-c + std::sqrt(c * c + 1.0)).epsilon(1e-10));
  CHECK(roots.upper ==
        doctest::Approx(c + std::sqrt(c * c + 1.0)).epsilon(1e-10));
  CHECK(beta_o({zeta, eta, roots.lower}) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(beta_o({zeta, eta, roots.upper}) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("strong preset power limit") {
  const PehSystem sys = strong_preset();
  const auto lim = power_limits(sys);
  const double f = sys.force_magnitude();
  CHECK(lim.p_m_max == doctest::Approx(f * f / (2.0 * sys.damping())));
  CHECK(lim.p_h_max == doctest::Approx(lim.p_m_max / 4.0));
  CHECK(lim.p_h_max == doctest::Approx(1.723e-3).epsilon(1e-3));
}

TEST_CASE("conjugate match recovers the power limit at any frequency") {
  const PehSystem sys = strong_preset();
  const double f = sys.force_magnitude();
  const double p_max = f * f / (8.0 * sys.damping());
  const double wn = sys.natural_frequency();
  for (int i = 0; i < 20; ++i) {
    const double w = wn * (0.5 + 0.1 * i);
    const auto cm = conjugate_match(sys, w);
    CHECK(cm.d_h == sys.damping());
    CHECK(cm.k_e == doctest::Approx(w * w * sys.mass() - sys.stiffness()));
    const double p = ideal_harvested_power(sys, w, cm.d_h, cm.k_e);
    CHECK(std::abs(p - p_max) <= 1e-12 * p_max);
  }
}

TEST_CASE("mistuned loads harvest strictly less than the conjugate match") {
  const PehSystem sys = strong_preset();
  const double w = 1.07 * sys.natural_frequency();
  const auto cm = conjugate_match(sys, w);
  const double best = ideal_harvested_power(sys, w, cm.d_h, cm.k_e);
  CHECK(ideal_harvested_power(sys, w, 2.0 * cm.d_h, cm.k_e) < best);
  CHECK(ideal_harvested_power(sys, w, cm.d_h, 0.5 * cm.k_e) < best);
  CHECK(ideal_harvested_power(sys, w, 0.3 * cm.d_h, 1.2 * cm.k_e) < best);
}
