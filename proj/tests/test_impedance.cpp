#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "peh/impedance.hpp"
#include "peh/system.hpp"
#include "peh/waveform.hpp"

using namespace peh;

namespace {
constexpr double kPi = 3.14159265358979323846;

TuningPoint random_tuning(std::mt19937& rng) {
  std::uniform_int_distribution<int> top_d(0, 3);
  std::uniform_real_distribution<double> phi_d(-kPi / 2, kPi / 2);
  std::uniform_real_distribution<double> s_d(0.0, 1.0);
  const Topology top = static_cast<Topology>(top_d(rng));
  return map_tuning(top, phi_d(rng), s_d(rng));
}
}  // namespace

TEST_CASE("pure capacitor waveform gives -j/(w Cp)") {
  // SEH blocking entirely: v = -Voc cos(wt)
  const auto wave = synthesize_vp({Topology::Seh, 0.0, 2.0}, -0.6, 1.0);
  const auto vf = fundamental_harmonic(wave);
  CHECK(vf.real() == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(vf.imag() == doctest::Approx(-1.0).epsilon(1e-14));

  const PehSystem sys =
      weak_preset().with_rp(std::numeric_limits<double>::infinity());
  const double w = sys.natural_frequency();
  const auto ze = equivalent_impedance(sys, {Topology::Seh, 0.0, 2.0}, w);
  CHECK(ze.z_elec.real() == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(ze.z_elec.imag() ==
        doctest::Approx(-1.0 / (w * sys.cp())).epsilon(1e-12));
  CHECK(ze.c_e == doctest::Approx(sys.cp()).epsilon(1e-12));
}

TEST_CASE("series-SSHI normalized impedance at the shorted extreme") {
  // phi = 0, Vr = 0, gamma = -0.6: Z~ = 16/pi - j
  const auto wave = synthesize_vp({Topology::SeriesSshi, 0.0, 0.0}, -0.6, 1.0);
  const auto vf = fundamental_harmonic(wave);
  CHECK(vf.real() == doctest::Approx(16.0 / kPi).epsilon(1e-14));
  CHECK(vf.imag() == doctest::Approx(-1.0).epsilon(1e-13));
}

TEST_CASE("SECE normalized impedance at phi = 0") {
  // Z~ = 4/pi - j
  const auto wave = synthesize_vp({Topology::Sece, 0.0, 0.0}, -0.6, 1.0);
  const auto vf = fundamental_harmonic(wave);
  CHECK(vf.real() == doctest::Approx(4.0 / kPi).epsilon(1e-14));
  CHECK(vf.imag() == doctest::Approx(-1.0).epsilon(1e-13));
}

TEST_CASE("analytic fundamentals agree with adaptive quadrature") {
  std::mt19937 rng(123);
  for (int i = 0; i < 300; ++i) {
    const TuningPoint t = random_tuning(rng);
    const auto wave = synthesize_vp(t, -0.6, 1.0);
    const auto a = fundamental_harmonic(wave);
    const auto q = fundamental_harmonic_quadrature(wave);
    const double scale = std::max(std::abs(a), 1.0);
    CHECK(std::abs(a - q) <= 1e-9 * scale);
  }
}

TEST_CASE("impedance decomposition: r_h + r_d = Re(z_elec)") {
  std::mt19937 rng(321);
  const PehSystem sys = strong_preset();
  const double w = sys.natural_frequency();
  for (int i = 0; i < 100; ++i) {
    const TuningPoint t = random_tuning(rng);
    const auto ze = equivalent_impedance(sys, t, w);
    CHECK(ze.r_h + ze.r_d ==
          doctest::Approx(ze.z_elec.real()).epsilon(1e-9));
    CHECK(ze.r_h >= -1e-12);
    CHECK(ze.r_d >= -1e-9 * std::max(1.0, std::abs(ze.z_elec.real())));
    CHECK(ze.z_mech.real() ==
          doctest::Approx(sys.alpha() * sys.alpha() * ze.z_elec.real())
              .epsilon(1e-12));
  }
}

TEST_CASE("extreme-load bounds sit on the closed-form circles") {
  const PehSystem sys = strong_preset();
  const double w = sys.natural_frequency();
  const double norm = w * sys.cp() / (sys.alpha() * sys.alpha());
  const std::complex<double> center_sshi{8.0 / kPi, -1.0};
  const std::complex<double> center_sece{2.0 / kPi, -1.0};
  for (int i = 0; i <= 180; ++i) {
    const double phi = -kPi / 2 + kPi * i / 180.0;
    const auto zs = ze_bound_pv_sshi(w, phi, -0.6, sys) * norm;
    CHECK(std::abs(std::abs(zs - center_sshi) - 8.0 / kPi) < 1e-9);
    const auto zc = ze_bound_pv_sece(w, phi, sys) * norm;
    CHECK(std::abs(std::abs(zc - center_sece) - 2.0 / kPi) < 1e-9);
    // SECE bound is the gamma = 0 SSHI bound
    const auto z0 = ze_bound_pv_sshi(w, phi, 0.0, sys) * norm;
    CHECK(std::abs(z0 - zc) < 1e-12 * std::abs(zc));
  }
}

TEST_CASE("attainable region kinds") {
  const PehSystem sys = strong_preset();
  const double w = sys.natural_frequency();
  const auto pt = attainable_region(sys, Topology::Sece, w, false, 31, 31);
  CHECK(pt.kind == AttainableRegion::Kind::Point);
  CHECK(pt.samples.size() == 1);

  const auto curve = attainable_region(sys, Topology::Seh, w, false, 31, 41);
  CHECK(curve.kind == AttainableRegion::Kind::Curve);
  CHECK(curve.samples.size() == 41);

  const auto region =
      attainable_region(sys, Topology::SeriesSshi, w, true, 31, 31);
  CHECK(region.kind == AttainableRegion::Kind::Region);
  CHECK(region.samples.size() == 31 * 31);
  REQUIRE(region.circle.has_value());
  // every attainable sample lies inside or on the bounding circle
  for (const auto& z : region.samples) {
    CHECK(std::abs(z - region.circle->first) <=
          region.circle->second * (1.0 + 1e-9));
  }
  CHECK_THROWS_AS(
      (void)attainable_region(sys, Topology::Seh, w, false, 8, 8),
      std::invalid_argument);
}

TEST_CASE("matching target reduces to the conjugate without leakage") {
  const PehSystem sys =
      strong_preset().with_rp(std::numeric_limits<double>::infinity());
  const double w = 1.05 * sys.natural_frequency();
  const auto zm = sys.mechanical_impedance(w).value;
  const auto target = matching_target(sys, w);
  CHECK(target.real() == doctest::Approx(zm.real()).epsilon(1e-12));
  CHECK(target.imag() == doctest::Approx(-zm.imag()).epsilon(1e-12));
}

TEST_CASE("matching target compensates the leakage branch") {
  const PehSystem sys = strong_preset();
  const double w = 1.02 * sys.natural_frequency();
  const auto zm = sys.mechanical_impedance(w).value;
  const double dp = sys.dielectric_damping();
  const auto ze = matching_target(sys, w);
  // Dp || Ze must equal the conjugate of Zm
  const auto par = ze * dp / (ze + dp);
  CHECK(par.real() == doctest::Approx(zm.real()).epsilon(1e-10));
  CHECK(par.imag() == doctest::Approx(-zm.imag()).epsilon(1e-10));
}

TEST_CASE("strong SEH curve crosses the matching target twice") {
  const PehSystem sys = strong_preset();
  const double wn = sys.natural_frequency();
  const int n = seh_intersection_count(sys, 0.85 * wn, 1.25 * wn);
  CHECK(n == 2);
}

TEST_CASE("match report for the phase-variable region") {
  const PehSystem sys = strong_preset();
  const double w = 1.05 * sys.natural_frequency();
  const auto rep = match_report(sys, Topology::SeriesSshi, w, true);
  CHECK(rep.distance >= 0.0);
  CHECK(rep.tolerance > 0.0);
  CHECK_FALSE(rep.seh_intersections.has_value());
  const auto seh = match_report(sys, Topology::Seh, w, true);
  CHECK(seh.seh_intersections.has_value());
}
