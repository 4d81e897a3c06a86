#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "peh/system.hpp"
#include "peh/waveform.hpp"

namespace peh {

struct SimOptions {
  std::size_t steps_per_cycle = 4096;
  std::size_t max_cycles = 400;
  double power_tol = 1e-3;       // cycle-to-cycle relative power change
  bool record_full_trace = false;
  double diode_drop = 0.0;       // V, constant-drop diode model (0 = ideal)
  std::size_t averaging_cycles = 10;
  double event_tol_fraction = 1e-10;  // of the period, for bisection
};

/// Per-cycle energy ledger, all in joules.
struct CycleLedger {
  double input = 0.0;            // work done by the excitation force
  double mech_loss = 0.0;        // dissipated in D
  double dielectric_loss = 0.0;  // dissipated in Rp
  double flip_loss = 0.0;        // lost in bias-flip / extraction actions
  double harvested = 0.0;        // delivered to the storage side
  double stored_delta = 0.0;     // change of kinetic+elastic+capacitive energy
};

enum class EventKind { SwitchAction, ConductionOnset, ConductionEnd };

struct SimEvent {
  double t;
  EventKind kind;
};

struct SimTrace {
  bool converged = false;
  std::size_t cycles = 0;
  double omega = 0.0;
  double period = 0.0;
  double vr = 0.0;          // rectified voltage used in the final cycles, V
  double velocity_amp = 0.0;

  // sampled state; holds the final averaging window (or everything when
  // record_full_trace is set)
  std::vector<double> t, x, xdot, vp;

  std::vector<SimEvent> events;
  std::vector<CycleLedger> ledger;  // one entry per simulated cycle

  // system scalars needed by post-processing
  double cp = 0.0, rp = 0.0, alpha = 0.0, force = 0.0;
  std::size_t averaging_cycles = 10;
};

/// Time-domain integration of the coupled electromechanical ODE with
/// synchronized-switch events; RK4 fixed step with event bisection.
SimTrace simulate(const PehSystem& sys, const TuningPoint& tuning, double omega,
                  const SimOptions& options = {});

struct SteadyPower {
  double p_h = 0.0;       // W
  double p_d_flip = 0.0;  // W
  double p_rp = 0.0;      // W
  double thd_ih = 0.0;    // total harmonic distortion of i_eq = alpha*xdot
};

/// Averages over the final cycles; rejects non-converged traces.
SteadyPower steady_state_power(const SimTrace& trace);

/// Fundamental of the simulated v_p divided by the fundamental of the
/// simulated current into the Cp + interface branch.
std::complex<double> oracle_impedance(const SimTrace& trace, double omega);

}  // namespace peh
