#pragma once

#include <complex>
#include <span>
#include <vector>

#include "peh/impedance.hpp"
#include "peh/system.hpp"
#include "peh/waveform.hpp"

namespace peh {

/// Harvested power through the three-branch mechanical network: the force
/// source faces Z_m in series with Z_e parallel to the dielectric damping
/// D_p (pass +inf when the leakage branch is absent).
double harvested_power(std::complex<double> z_m, const EquivalentImpedance& ze,
                       double d_p, double force);

/// Convenience overload evaluating Z_m and Z_e from a system + tuning.
double harvested_power(const PehSystem& sys, const TuningPoint& tuning,
                       double omega);

struct PowerMap {
  std::vector<double> omega_grid;  // rad/s
  std::vector<double> phi_grid;    // rad
  std::vector<double> s_grid;      // normalized second-parameter coordinate

  // flattened [omega][phi][s]
  std::vector<double> p_h;            // W
  std::vector<double> second_actual;  // Vr_tilde or theta per point
  std::vector<double> d_h, d_d, k_e;  // mechanical-domain diagnostics

  std::size_t index(std::size_t iw, std::size_t ip, std::size_t is) const {
    return (iw * phi_grid.size() + ip) * s_grid.size() + is;
  }
};

PowerMap sweep(const PehSystem& sys, Topology topology, bool pv_enabled,
               std::span<const double> omega_grid,
               std::span<const double> phi_grid,
               std::span<const double> s_grid, unsigned threads = 0);

struct OptimalTuning {
  TuningPoint tuning;
  double power;  // W
};

/// Coarse grid search over the valid tuning domain followed by coordinate
/// descent refinement (3 rounds, range shrink 0.2 per round).
OptimalTuning optimal_at_frequency(const PehSystem& sys, Topology topology,
                                   bool pv_enabled, double omega,
                                   std::size_t coarse = 33);

/// Same optimizer run on the ideal two-parameter model (D_h, K_e); used to
/// check that it recovers the conjugate-match optimum.
struct IdealOptimal {
  double d_h, k_e, power;
};
IdealOptimal ideal_optimal_at_frequency(const PehSystem& sys, double omega);

struct PowerCurve {
  std::vector<double> omega;  // rad/s
  std::vector<double> p;      // W
  std::vector<TuningPoint> tuning;
};

/// Per-frequency optimal power envelope.
PowerCurve envelope(const PehSystem& sys, Topology topology, bool pv_enabled,
                    std::span<const double> omega_grid, unsigned threads = 0);

struct BandwidthReport {
  double peak_power = 0.0;       // W
  double peak_omega = 0.0;       // rad/s
  double delta_omega_hm = 0.0;   // rad/s, span with P >= peak/2
  double delta_omega_sr = 0.0;   // rad/s, span with P >= (SEH peak)/2
  double broadening_ratio = 0.0; // filled by callers comparing PV vs phi=0
  bool hm_clipped = false;       // half-power span reaches the grid edge
  bool sr_clipped = false;
};

BandwidthReport bandwidth_metrics(const PowerCurve& curve,
                                  const PowerCurve& seh_baseline);

/// Width of the region where P >= peak/2, crossings by linear interpolation.
/// Returns the clipped flag through the second element.
std::pair<double, bool> half_power_span(const PowerCurve& curve,
                                        double threshold);

}  // namespace peh
