#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "peh/system.hpp"

namespace peh {

enum class Topology { Seh, Sece, SeriesSshi, ParallelSshi };

const char* topology_name(Topology t);

/// One operating point of an interface circuit.  `phi` is the synchronized
/// switch phase in radians (always 0 for SEH).  `second` is the
/// topology-specific tunable: normalized rectified voltage Vr/Voc for SEH
/// and S-SSHI, rectifier blocking angle theta for P-SSHI, unused for SECE.
struct TuningPoint {
  Topology topology = Topology::Seh;
  double phi = 0.0;
  double second = 0.0;
};

/// Throws std::invalid_argument naming the violated bound.
void validate(const TuningPoint& t);

/// Valid blocking-angle interval for P-SSHI at a given switch phase.
struct Interval {
  double lo, hi;
};
Interval p_sshi_theta_domain(double phi);

struct InteriorVoltages {
  double v0;  // normalized pre-flip voltage
  double v1;  // normalized end voltage of the positive-to-negative flip
};

InteriorVoltages solve_interior_s_sshi(double phi, double vr_tilde,
                                       double gamma);
InteriorVoltages solve_interior_p_sshi(double phi, double theta, double gamma);

/// One angular piece of the steady-state voltage: v_p/Voc = offset +
/// cosine * cos(u) on [begin, end).  cosine is -1 on open-circuit charging
/// pieces and 0 on clamped/blocked pieces.
struct Segment {
  double begin, end;
  double offset, cosine;
};

/// Steady-state piezoelectric voltage over one period, as segments tiling
/// [phi, phi + 2*pi).
struct PiecewiseVoltage {
  std::vector<Segment> segments;
  double voc = 1.0;     // V, nominal open-circuit voltage I_h/(w Cp)
  double phase = 0.0;   // period start angle (= phi)
  bool open_circuit_fallback = false;  // SEH with Vr/Voc > 1

  /// v_p in volts at angle u (any real; reduced modulo 2*pi).
  double value(double u) const;
  /// v_p / Voc at angle u.
  double normalized(double u) const;
};

PiecewiseVoltage synthesize_vp(const TuningPoint& tuning, double gamma,
                               double voc);

/// Rectified voltage V_r in volts implied by a tuning point (the clamp level
/// for P-SSHI, Vr_tilde * Voc for SEH and S-SSHI, 0 for SECE).
double rectified_voltage(const TuningPoint& tuning, double gamma, double voc);

/// Map a normalized coordinate pair (phi, s in [0,1]) onto a valid tuning
/// point: s spans [0, cos(phi)] in Vr_tilde for S-SSHI, the blocking-angle
/// interval for P-SSHI, [0, 1] for SEH; SECE ignores s.
TuningPoint map_tuning(Topology topology, double phi, double s);

struct WorkCycle {
  std::vector<std::array<double, 2>> trajectory;  // (v_p, q) samples
  double area;  // J per cycle extracted from the mechanical side
};

WorkCycle work_cycle(const PiecewiseVoltage& wave, double i_h_mag, double omega,
                     std::size_t samples = 4096);

struct EnergySplit {
  double e_h;
  double e_d;
};

/// Harvested/dissipated split of the per-cycle extracted energy.
/// SEH and P-SSHI harvest through rectifier conduction, S-SSHI through the
/// flip path, SECE by full extraction (lossless conversion assumed).
EnergySplit energy_split(const PiecewiseVoltage& wave,
                         const TuningPoint& tuning, double gamma,
                         double vr_volts, double i_h_mag, double omega);

}  // namespace peh
