#pragma once

#include "peh/system.hpp"

namespace peh {

/// Normalized description of the ideal kinetic harvester: mechanical damping
/// ratio zeta, harvesting-to-mechanical damping quotient eta = D_h/D, and
/// normalized frequency omega_tilde = omega/omega_n.
struct IdealParams {
  double zeta;
  double eta;
  double omega_tilde;
};

/// Resonant power ratio eta/(1+eta)^2; peaks at 1/4 when eta = 1.
double beta_r(double eta);

/// Normalized off-resonance power of the harvesting damper, in (0, 1].
double beta_o(const IdealParams& p);

/// Closed-form normalized half-power bandwidth 2(1+eta)zeta.
double half_power_bandwidth(double eta, double zeta);

/// Numeric half-power roots of beta_o = 1/2, bracketed around resonance.
/// `two_sided` is false when no lower root exists in (0, 1).
struct HalfPowerRoots {
  double lower = 0.0;
  double upper = 0.0;
  bool two_sided = true;
};
HalfPowerRoots half_power_roots(double eta, double zeta);

struct PowerLimits {
  double p_m_max;  // W, absorbed by the mechanical damper at resonance
  double p_h_max;  // W, = p_m_max / 4
};
PowerLimits power_limits(const PehSystem& sys);

/// Conjugate-matched load for the two-parameter ideal model:
/// D_h = D and K_e = w^2 M - K (negative values act as equivalent mass).
struct ConjugateMatch {
  double d_h;  // N*s/m
  double k_e;  // N/m
};
ConjugateMatch conjugate_match(const PehSystem& sys, double omega);

/// Harvested power of the ideal two-parameter model with load
/// Z_load = D_h - j K_e / w facing the mechanical source impedance.
double ideal_harvested_power(const PehSystem& sys, double omega, double d_h,
                             double k_e);

}  // namespace peh
