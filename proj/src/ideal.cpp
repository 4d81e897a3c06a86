#include "peh/ideal.hpp"

#include <cmath>
#include <stdexcept>

namespace peh {

double beta_r(double eta) {
  if (eta < 0.0) throw std::invalid_argument("beta_r: eta must be >= 0");
  const double s = 1.0 + eta;
  return eta / (s * s);
}

double beta_o(const IdealParams& p) {
  if (!(p.zeta > 0.0) || p.eta < 0.0 || !(p.omega_tilde > 0.0))
    throw std::invalid_argument("beta_o: invalid IdealParams");
  const double w = p.omega_tilde;
  const double num = 2.0 * w * (1.0 + p.eta) * p.zeta;
  const double det = 1.0 - w * w;
  return num * num / (det * det + num * num);
}

double half_power_bandwidth(double eta, double zeta) {
  if (eta < 0.0 || !(zeta > 0.0))
    throw std::invalid_argument("half_power_bandwidth: invalid arguments");
  return 2.0 * (1.0 + eta) * zeta;
}

namespace {

// Bisection of f on [a, b] with f(a)*f(b) < 0, to 1e-12 in the abscissa.
double bisect(double a, double b, double fa, auto&& f) {
  for (int i = 0; i < 200 && b - a > 1e-12; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fa < 0.0) == (fm < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

HalfPowerRoots half_power_roots(double eta, double zeta) {
  auto g = [&](double w) {
    return beta_o({zeta, eta, w}) - 0.5;
  };
  HalfPowerRoots out;
  // beta_o rises monotonically to 1 at resonance on (0, 1) and decays on
  // (1, inf); each bracket holds at most one root.
  const double eps = 1e-9;
  double fl = g(eps);
  double f1 = g(1.0);
  if (fl < 0.0 && f1 > 0.0) {
    out.lower = bisect(eps, 1.0, fl, g);
  } else {
    out.two_sided = false;
    out.lower = 0.0;
  }
  const double hi = 4.0;
  if (f1 > 0.0 && g(hi) < 0.0) {
    out.upper = bisect(1.0, hi, f1, g);
  } else {
    out.two_sided = false;
    out.upper = hi;
  }
  return out;
}

PowerLimits power_limits(const PehSystem& sys) {
  const double f = sys.force_magnitude();
  const double d = sys.damping();
  return {f * f / (2.0 * d), f * f / (8.0 * d)};
}

ConjugateMatch conjugate_match(const PehSystem& sys, double omega) {
  if (!(omega > 0.0))
    throw std::invalid_argument("conjugate_match: omega must be > 0");
  return {sys.damping(), omega * omega * sys.mass() - sys.stiffness()};
}

double ideal_harvested_power(const PehSystem& sys, double omega, double d_h,
                             double k_e) {
  const std::complex<double> zm = sys.mechanical_impedance(omega).value;
  const std::complex<double> zl{d_h, -k_e / omega};
  const double f = sys.force_magnitude();
  const double flow = f / std::abs(zm + zl);
  return 0.5 * d_h * flow * flow;
}

}  // namespace peh
