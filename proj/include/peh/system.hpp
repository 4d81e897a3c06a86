#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace peh {

/// Impedance value tagged with the domain it lives in.  Mechanical values
/// are in N*s/m, electrical values in ohms; the two are related by the
/// square of the force-voltage factor.
enum class Domain { Mechanical, Electrical };

struct DomainImpedance {
  std::complex<double> value{};
  Domain domain = Domain::Mechanical;

  DomainImpedance to(Domain target, double alpha) const {
    if (target == domain) return *this;
    const double a2 = alpha * alpha;
    if (target == Domain::Mechanical) return {value * a2, target};
    return {value / a2, target};
  }
};

/// How the external drive is specified: base acceleration (inertial
/// excitation, f = M*a) or a force magnitude directly.
struct Excitation {
  enum class Kind { BaseAcceleration, Force };
  Kind kind = Kind::BaseAcceleration;
  double value = 0.0;  // m/s^2 or N

  static Excitation base_acceleration(double a) {
    return {Kind::BaseAcceleration, a};
  }
  static Excitation force(double f) { return {Kind::Force, f}; }
};

struct ElectricalAnalog {
  double r;  // ohm
  double l;  // henry
  double c;  // farad
};

/// Lumped electromechanical description of a piezoelectric harvester:
/// a mass-spring-damper vibrator coupled through the force-voltage factor
/// to the clamped capacitance Cp with leakage Rp.  The flip inductance and
/// storage capacitance only matter for time-domain simulation.
class PehSystem {
 public:
  PehSystem(double mass, double stiffness, double damping, double alpha,
            double cp, double rp, double gamma, Excitation excitation,
            double flip_inductance = 47e-3,
            double storage_capacitance = 10e-6);

  /// Build from the electrical analog triple (R, L, C); the stored triple
  /// is returned verbatim by electrical_analog().
  static PehSystem from_electrical(double r, double l, double c, double alpha,
                                   double cp, double rp, double gamma,
                                   Excitation excitation,
                                   double flip_inductance = 47e-3,
                                   double storage_capacitance = 10e-6);

  double mass() const { return mass_; }
  double stiffness() const { return stiffness_; }
  double damping() const { return damping_; }
  double alpha() const { return alpha_; }
  double cp() const { return cp_; }
  double rp() const { return rp_; }
  bool rp_infinite() const { return std::isinf(rp_); }
  double gamma() const { return gamma_; }
  double flip_inductance() const { return flip_inductance_; }
  double storage_capacitance() const { return storage_capacitance_; }
  const Excitation& excitation() const { return excitation_; }

  double natural_frequency() const;  // rad/s

  ElectricalAnalog electrical_analog() const;

  /// Z_m = D + j(w M - K / w), mechanical domain.  Rejects w <= 0.
  DomainImpedance mechanical_impedance(double omega) const;

  /// Excitation force magnitude in newtons (M*A_Y under base excitation).
  double force_magnitude() const;

  /// Mechanical-domain image of the leakage resistance, D_p = alpha^2 Rp.
  /// Infinite Rp maps to an infinite (absent) branch.
  double dielectric_damping() const;

  PehSystem with_rp(double rp) const;
  PehSystem with_excitation(Excitation e) const;

 private:
  double mass_, stiffness_, damping_, alpha_, cp_, rp_, gamma_;
  Excitation excitation_;
  double flip_inductance_, storage_capacitance_;
  bool has_exact_analog_ = false;
  ElectricalAnalog exact_analog_{};
};

/// Table-derived presets for the two measured cantilevers.
PehSystem strong_preset();
PehSystem weak_preset();
double strong_preset_drive_frequency();  // rad/s
double weak_preset_drive_frequency();    // rad/s

}  // namespace peh
