#include "peh/system.hpp"

#include <cmath>

namespace peh {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

PehSystem::PehSystem(double mass, double stiffness, double damping,
                     double alpha, double cp, double rp, double gamma,
                     Excitation excitation, double flip_inductance,
                     double storage_capacitance)
    : mass_(mass),
      stiffness_(stiffness),
      damping_(damping),
      alpha_(alpha),
      cp_(cp),
      rp_(rp),
      gamma_(gamma),
      excitation_(excitation),
      flip_inductance_(flip_inductance),
      storage_capacitance_(storage_capacitance) {
  require(mass_ > 0.0, "PehSystem: mass must be > 0");
  require(stiffness_ > 0.0, "PehSystem: stiffness must be > 0");
  require(damping_ > 0.0, "PehSystem: damping must be > 0");
  require(alpha_ != 0.0, "PehSystem: alpha must be nonzero");
  require(cp_ > 0.0, "PehSystem: Cp must be > 0");
  require(rp_ > 0.0, "PehSystem: Rp must be > 0 (may be infinite)");
  require(gamma_ > -1.0 && gamma_ <= 1.0, "PehSystem: gamma must be in (-1, 1]");
}

PehSystem PehSystem::from_electrical(double r, double l, double c, double alpha,
                                     double cp, double rp, double gamma,
                                     Excitation excitation,
                                     double flip_inductance,
                                     double storage_capacitance) {
  const double a2 = alpha * alpha;
  PehSystem sys(a2 * l, a2 / c, a2 * r, alpha, cp, rp, gamma, excitation,
                flip_inductance, storage_capacitance);
  sys.has_exact_analog_ = true;
  sys.exact_analog_ = {r, l, c};
  return sys;
}

double PehSystem::natural_frequency() const {
  return std::sqrt(stiffness_ / mass_);
}

ElectricalAnalog PehSystem::electrical_analog() const {
  if (has_exact_analog_) return exact_analog_;
  const double a2 = alpha_ * alpha_;
  return {damping_ / a2, mass_ / a2, a2 / stiffness_};
}

DomainImpedance PehSystem::mechanical_impedance(double omega) const {
  if (!(omega > 0.0))
    throw std::invalid_argument("mechanical_impedance: omega must be > 0");
  return {{damping_, omega * mass_ - stiffness_ / omega}, Domain::Mechanical};
}

double PehSystem::force_magnitude() const {
  if (excitation_.kind == Excitation::Kind::Force) return excitation_.value;
  return mass_ * excitation_.value;
}

double PehSystem::dielectric_damping() const {
  if (rp_infinite()) return std::numeric_limits<double>::infinity();
  return alpha_ * alpha_ * rp_;
}

PehSystem PehSystem::with_rp(double rp) const {
  PehSystem s = *this;
  require(rp > 0.0, "PehSystem: Rp must be > 0 (may be infinite)");
  s.rp_ = rp;
  return s;
}

PehSystem PehSystem::with_excitation(Excitation e) const {
  PehSystem s = *this;
  s.excitation_ = e;
  return s;
}

// Measured parameters of the two cantilever prototypes (electrical analog
// triple, coupling, capacitances, leakage, flip factor).
PehSystem strong_preset() {
  return PehSystem::from_electrical(
      24.93e3, 1.61e3, 5.03e-9, 2.35e-3, 22.33e-9, 2174.61e3, -0.6,
      Excitation::base_acceleration(4.9), 47e-3, 10e-6);
}

PehSystem weak_preset() {
  return PehSystem::from_electrical(
      345.47e3, 31.18e3, 0.27e-9, 0.37e-3, 45.7e-9, 1533.47e3, -0.6,
      Excitation::base_acceleration(4.9), 47e-3, 10e-6);
}

double strong_preset_drive_frequency() { return 2.0 * M_PI * 55.8; }
double weak_preset_drive_frequency() { return 2.0 * M_PI * 54.8; }

}  // namespace peh
