#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "peh/system.hpp"
#include "peh/waveform.hpp"

namespace peh {

/// Complex fundamental of v_p referenced to i_h = I_h sin(wt): the returned
/// phasor V satisfies v_p,f(t) = Re(V) sin(wt) + Im(V) cos(wt), in volts.
/// Computed analytically per segment.
std::complex<double> fundamental_harmonic(const PiecewiseVoltage& wave);

/// Adaptive-quadrature fallback used to cross-check the analytic path.
std::complex<double> fundamental_harmonic_quadrature(
    const PiecewiseVoltage& wave, double tol = 1e-13);

/// Describing-function impedance of the Cp + interface combination, with the
/// regenerative/dissipative/reactive decomposition.
struct EquivalentImpedance {
  std::complex<double> z_elec;  // ohm
  std::complex<double> z_mech;  // N*s/m, = alpha^2 * z_elec
  double r_h = 0.0;  // ohm, regenerative share of Re(z_elec)
  double r_d = 0.0;  // ohm, dissipative share
  double c_e = 0.0;  // F, -1/(w c_e) = Im(z_elec)
  double alpha = 0.0;
  double omega = 0.0;

  double d_h() const { return alpha * alpha * r_h; }      // N*s/m
  double d_d() const { return alpha * alpha * r_d; }      // N*s/m
  double k_e() const { return -omega * z_mech.imag(); }   // N/m
};

EquivalentImpedance equivalent_impedance(const PehSystem& sys,
                                         const TuningPoint& tuning,
                                         double omega);

/// Extreme-load impedance bound of the phase-variable SSHI family
/// (mechanical domain).
std::complex<double> ze_bound_pv_sshi(double omega, double phi, double gamma,
                                      const PehSystem& sys);

/// Extreme bound of phase-variable SECE (mechanical domain).
std::complex<double> ze_bound_pv_sece(double omega, double phi,
                                      const PehSystem& sys);

struct AttainableRegion {
  enum class Kind { Point, Curve, Region };
  Kind kind = Kind::Point;
  /// Normalized impedances, in units of alpha^2/(w Cp) (mechanical) or
  /// equivalently 1/(w Cp) (electrical).
  std::vector<std::complex<double>> samples;
  /// The tuning behind each sample, index-aligned with `samples`.
  std::vector<TuningPoint> tunings;
  std::optional<std::pair<std::complex<double>, double>> circle;  // center, r
};

AttainableRegion attainable_region(const PehSystem& sys, Topology topology,
                                   double omega, bool pv_enabled,
                                   std::size_t phi_resolution = 181,
                                   std::size_t second_resolution = 201);

/// Mechanical-domain Z_e that makes D_p || Z_e equal the conjugate of Z_m;
/// reduces to conj(Z_m) when the leakage branch is absent.
std::complex<double> matching_target(const PehSystem& sys, double omega);

struct MatchReport {
  std::complex<double> z_m;          // source impedance at omega (mech)
  std::complex<double> target_mech;  // Z_e needed so Dp || Z_e = Z_m*
  double distance = 0.0;             // min gap to attainable region, N*s/m
  double tolerance = 0.0;            // feasibility threshold, N*s/m
  bool feasible = false;
  TuningPoint best_tuning{};
  std::optional<int> seh_intersections;  // only for Topology::Seh
};

MatchReport match_report(const PehSystem& sys, Topology topology, double omega,
                         bool pv_enabled, double tol_fraction = 0.01);

/// Number of frequencies in [omega_lo, omega_hi] at which the SEH curve
/// passes through the matching target (local minima of the gap refined by
/// golden-section search and thresholded).
int seh_intersection_count(const PehSystem& sys, double omega_lo,
                           double omega_hi, double tol_fraction = 0.01);

}  // namespace peh
