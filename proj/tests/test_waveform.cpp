#include "doctest.h"

#include <cmath>
#include <random>

#include "peh/waveform.hpp"

using namespace peh;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

TEST_CASE("series interior voltages at phi = 0") {
  // lossless rectifier shorted: Vr = 0
  auto iv = solve_interior_s_sshi(0.0, 0.0, -0.6);
  CHECK(iv.v0 == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(iv.v1 == doctest::Approx(-3.0).epsilon(1e-14));
  // blocking at open circuit: Vr = Voc
  iv = solve_interior_s_sshi(0.0, 1.0, -0.6);
  CHECK(iv.v0 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(iv.v1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS((void)solve_interior_s_sshi(0.0, 0.0, -1.0),
                  std::invalid_argument);
}

TEST_CASE("parallel blocking-angle domain") {
  const Interval lead = p_sshi_theta_domain(-0.3);
  CHECK(lead.lo == doctest::Approx(0.3));
  CHECK(lead.hi == doctest::Approx(kPi - 0.3));
  const Interval lag = p_sshi_theta_domain(0.3);
  CHECK(lag.lo == doctest::Approx(std::acos(2.0 * std::cos(0.3) - 1.0)));
  CHECK(lag.hi == doctest::Approx(kPi));
  CHECK(p_sshi_theta_domain(0.0).lo == doctest::Approx(0.0));
  CHECK(p_sshi_theta_domain(0.0).hi == doctest::Approx(kPi));
}

TEST_CASE("tuning validation names the violated bound") {
  CHECK_THROWS_AS(validate({Topology::Seh, 0.1, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(validate({Topology::Seh, 0.0, -0.1}), std::invalid_argument);
  CHECK_THROWS_AS(validate({Topology::Sece, 2.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate({Topology::SeriesSshi, 0.0, -0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate({Topology::ParallelSshi, -0.3, 0.1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate({Topology::ParallelSshi, 0.3, 3.2}),
                  std::invalid_argument);
  CHECK_NOTHROW(validate({Topology::ParallelSshi, -0.3, 1.0}));
  CHECK_NOTHROW(validate({Topology::Seh, 0.0, 1.5}));
}

TEST_CASE("SEH waveform clamps at the conduction angle") {
  const double vr = 0.3;
  const auto wave = synthesize_vp({Topology::Seh, 0.0, vr}, -0.6, 2.0);
  const double theta = std::acos(1.0 - 2.0 * vr);
  CHECK_FALSE(wave.open_circuit_fallback);
  // clamped at +Vr over [theta, pi)
  CHECK(wave.normalized(0.5 * (theta + kPi)) == doctest::Approx(vr));
  CHECK(wave.normalized(theta + 1e-9) == doctest::Approx(vr));
  // charging from -Vr at 0
  CHECK(wave.normalized(0.0) == doctest::Approx(-vr));
  // antisymmetric
  for (double u : {0.3, 1.0, 2.5, 4.0}) {
    CHECK(wave.normalized(u + kPi) == doctest::Approx(-wave.normalized(u)));
  }
  CHECK(wave.value(1.0) == doctest::Approx(2.0 * wave.normalized(1.0)));
}

TEST_CASE("SEH with Vr above Voc falls back to open circuit") {
  const auto wave = synthesize_vp({Topology::Seh, 0.0, 1.2}, -0.6, 1.0);
  CHECK(wave.open_circuit_fallback);
  // pure capacitor charging: v = -cos(u)
  for (double u : {0.0, 0.7, 2.0, 3.9, 5.5}) {
    CHECK(wave.normalized(u) == doctest::Approx(-std::cos(u)).epsilon(1e-14));
  }
}

TEST_CASE("SECE waveform jumps to zero at the switch instants") {
  const double phi = 0.25;
  const auto wave = synthesize_vp({Topology::Sece, phi, 0.0}, -0.6, 1.0);
  // restarts from 0 right after phi
  CHECK(wave.normalized(phi) == doctest::Approx(0.0).epsilon(1e-12));
  // peak right before the flip: 2 cos(phi)
  const double before = wave.normalized(phi + kPi - 1e-9);
  CHECK(before == doctest::Approx(2.0 * std::cos(phi)).epsilon(1e-6));
  for (double u : {0.5, 1.5, 3.0}) {
    CHECK(wave.normalized(u + kPi) == doctest::Approx(-wave.normalized(u)));
  }
}

TEST_CASE("parallel extremes reduce to the series zero-Vr waveform") {
  for (double phi : {-0.4, 0.0}) {
    const double theta = kPi + phi;  // lead-side extreme
    const auto p = synthesize_vp({Topology::ParallelSshi, phi, theta}, -0.6,
                                 1.0);
    const auto s = synthesize_vp({Topology::SeriesSshi, phi, 0.0}, -0.6, 1.0);
    for (int i = 0; i < 40; ++i) {
      const double u = phi + kTwoPi * i / 40.0 + 1e-7;
      CHECK(p.normalized(u) == doctest::Approx(s.normalized(u)).epsilon(1e-9));
    }
  }
  // lag-side extreme theta = pi
  const double phi = 0.35;
  const auto p = synthesize_vp({Topology::ParallelSshi, phi, kPi}, -0.6, 1.0);
  const auto s = synthesize_vp({Topology::SeriesSshi, phi, 0.0}, -0.6, 1.0);
  for (int i = 0; i < 40; ++i) {
    const double u = phi + kTwoPi * i / 40.0 + 1e-7;
    CHECK(p.normalized(u) == doctest::Approx(s.normalized(u)).epsilon(1e-9));
  }
}

TEST_CASE("parallel waveform is continuous except at flips") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> phi_d(-kPi / 2, kPi / 2);
  std::uniform_real_distribution<double> s_d(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const TuningPoint t =
        map_tuning(Topology::ParallelSshi, phi_d(rng), s_d(rng));
    const auto wave = synthesize_vp(t, -0.6, 1.0);
    // adjacent segments agree at interior joints that are not flip instants
    for (std::size_t i = 0; i + 1 < wave.segments.size(); ++i) {
      const double u = wave.segments[i].end;
      const bool is_flip =
          std::abs(u - (kPi + t.phi)) < 1e-9 ||
          std::abs(u - (kTwoPi + t.phi)) < 1e-9;
      if (is_flip) continue;
      const auto& a = wave.segments[i];
      const auto& b = wave.segments[i + 1];
      CHECK(a.offset + a.cosine * std::cos(u) ==
            doctest::Approx(b.offset + b.cosine * std::cos(u))
                .epsilon(1e-9));
    }
  }
}

TEST_CASE("waveform evaluation is 2*pi periodic") {
  const auto wave =
      synthesize_vp({Topology::SeriesSshi, -0.2, 0.4}, -0.6, 1.0);
  for (double u : {-5.0, 0.0, 1.3, 8.0}) {
    CHECK(wave.normalized(u + kTwoPi) == doctest::Approx(wave.normalized(u)));
    CHECK(wave.normalized(u - kTwoPi) == doctest::Approx(wave.normalized(u)));
  }
}

TEST_CASE("map_tuning always lands in the valid domain") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> phi_d(-kPi / 2, kPi / 2);
  std::uniform_real_distribution<double> s_d(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    for (Topology top : {Topology::Seh, Topology::Sece, Topology::SeriesSshi,
                         Topology::ParallelSshi}) {
      CHECK_NOTHROW(validate(map_tuning(top, phi_d(rng), s_d(rng))));
    }
  }
}

TEST_CASE("rectified voltage per topology") {
  CHECK(rectified_voltage({Topology::Seh, 0.0, 0.4}, -0.6, 3.0) ==
        doctest::Approx(1.2));
  CHECK(rectified_voltage({Topology::Sece, 0.2, 0.0}, -0.6, 3.0) == 0.0);
  CHECK(rectified_voltage({Topology::SeriesSshi, 0.0, 0.5}, -0.6, 2.0) ==
        doctest::Approx(1.0));
  // parallel at the late extreme the clamp level reaches the flip peak
  {
    const TuningPoint t{Topology::ParallelSshi, -0.3, kPi - 0.3};
    const auto iv = solve_interior_p_sshi(t.phi, t.second, -0.6);
    CHECK(rectified_voltage(t, -0.6, 1.0) ==
          doctest::Approx(iv.v0).epsilon(1e-12));
  }
  // at the early extreme the diodes conduct from the start: zero clamp level
  CHECK(std::abs(rectified_voltage({Topology::ParallelSshi, -0.3, 0.3}, -0.6,
                                   1.0)) < 1e-12);
}

TEST_CASE("energy split: SECE is all-harvest, splits sum to the total") {
  const double omega = 350.0, i_h = 1e-3;
  {
    const TuningPoint t{Topology::Sece, 0.3, 0.0};
    const auto wave = synthesize_vp(t, -0.6, 1.0);
    const auto split = energy_split(wave, t, -0.6, 0.0, i_h, omega);
    CHECK(std::abs(split.e_d) <= 1e-12 * split.e_h);
    CHECK(split.e_h > 0.0);
  }
  {
    // SEH harvests everything it extracts (ideal diodes)
    const TuningPoint t{Topology::Seh, 0.0, 0.45};
    const double voc = 2.5;
    const auto wave = synthesize_vp(t, -0.6, voc);
    const auto split = energy_split(wave, t, -0.6, t.second * voc, i_h, omega);
    CHECK(std::abs(split.e_d) <= 1e-9 * split.e_h);
  }
  {
    // series flips burn part of the extraction when |gamma| < 1
    const TuningPoint t{Topology::SeriesSshi, 0.0, 0.5};
    const auto wave = synthesize_vp(t, -0.6, 2.0);
    const auto split = energy_split(wave, t, -0.6, 0.5 * 2.0, i_h, omega);
    CHECK(split.e_h > 0.0);
    CHECK(split.e_d > 0.0);
  }
}
