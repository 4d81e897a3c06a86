#include "peh/impedance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace peh {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double simpson(const std::function<double(double)>& f, double a, double b,
               double fa, double fm, double fb, double whole, double tol,
               int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

double golden_min(const std::function<double(double)>& f, double a, double b,
                  int iters = 80) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::complex<double> fundamental_harmonic(const PiecewiseVoltage& wave) {
  double s = 0.0, c = 0.0;
  for (const auto& seg : wave.segments) {
    const double u1 = seg.begin, u2 = seg.end;
    s += seg.offset * (std::cos(u1) - std::cos(u2)) +
         seg.cosine * (std::cos(2.0 * u1) - std::cos(2.0 * u2)) / 4.0;
    c += seg.offset * (std::sin(u2) - std::sin(u1)) +
         seg.cosine * ((u2 - u1) / 2.0 +
                       (std::sin(2.0 * u2) - std::sin(2.0 * u1)) / 4.0);
  }
  return {wave.voc * s / kPi, wave.voc * c / kPi};
}

std::complex<double> fundamental_harmonic_quadrature(
    const PiecewiseVoltage& wave, double tol) {
  double s = 0.0, c = 0.0;
  for (const auto& seg : wave.segments) {
    auto v = [&](double u) { return seg.offset + seg.cosine * std::cos(u); };
    s += adaptive_simpson([&](double u) { return v(u) * std::sin(u); },
                          seg.begin, seg.end, tol);
    c += adaptive_simpson([&](double u) { return v(u) * std::cos(u); },
                          seg.begin, seg.end, tol);
  }
  return {wave.voc * s / kPi, wave.voc * c / kPi};
}

EquivalentImpedance equivalent_impedance(const PehSystem& sys,
                                         const TuningPoint& tuning,
                                         double omega) {
  if (!(omega > 0.0))
    throw std::invalid_argument("equivalent_impedance: omega must be > 0");
  const double voc = 1.0;
  const double i_mag = omega * sys.cp() * voc;
  const PiecewiseVoltage wave = synthesize_vp(tuning, sys.gamma(), voc);
  const std::complex<double> vf = fundamental_harmonic(wave);

  EquivalentImpedance out;
  out.alpha = sys.alpha();
  out.omega = omega;
  out.z_elec = vf / i_mag;
  out.z_mech = out.z_elec * (sys.alpha() * sys.alpha());

  const double vr = rectified_voltage(tuning, sys.gamma(), voc);
  const EnergySplit es =
      energy_split(wave, tuning, sys.gamma(), vr, i_mag, omega);
  const double period = kTwoPi / omega;
  out.r_h = 2.0 * es.e_h / (period * i_mag * i_mag);
  out.r_d = 2.0 * es.e_d / (period * i_mag * i_mag);
  out.c_e = out.z_elec.imag() == 0.0
                ? std::numeric_limits<double>::infinity()
                : -1.0 / (omega * out.z_elec.imag());
  return out;
}

std::complex<double> ze_bound_pv_sshi(double omega, double phi, double gamma,
                                      const PehSystem& sys) {
  if (gamma <= -1.0)
    throw std::invalid_argument("ze_bound_pv_sshi: gamma = -1 is singular");
  if (!(phi >= -kPi / 2 && phi <= kPi / 2))
    throw std::invalid_argument("ze_bound_pv_sshi: phi outside [-pi/2, pi/2]");
  const double scale =
      sys.alpha() * sys.alpha() / (omega * sys.cp());
  const double g = (1.0 - gamma) / (1.0 + gamma);
  const std::complex<double> core =
      (2.0 / kPi) * g *
      std::complex<double>(1.0 + std::cos(2.0 * phi), -std::sin(2.0 * phi));
  return scale * (core - std::complex<double>(0.0, 1.0));
}

std::complex<double> ze_bound_pv_sece(double omega, double phi,
                                      const PehSystem& sys) {
  if (!(phi >= -kPi / 2 && phi <= kPi / 2))
    throw std::invalid_argument("ze_bound_pv_sece: phi outside [-pi/2, pi/2]");
  const double scale = sys.alpha() * sys.alpha() / (omega * sys.cp());
  const std::complex<double> core =
      (2.0 / kPi) *
      std::complex<double>(1.0 + std::cos(2.0 * phi), -std::sin(2.0 * phi));
  return scale * (core - std::complex<double>(0.0, 1.0));
}

namespace {

// Normalized equivalent impedance of a tuning point; amplitude-free.
std::complex<double> ze_normalized(const TuningPoint& t, double gamma) {
  const PiecewiseVoltage wave = synthesize_vp(t, gamma, 1.0);
  return fundamental_harmonic(wave);  // voc = 1 and I/(w Cp) = voc cancel
}

}  // namespace

AttainableRegion attainable_region(const PehSystem& sys, Topology topology,
                                   double omega, bool pv_enabled,
                                   std::size_t phi_resolution,
                                   std::size_t second_resolution) {
  if (phi_resolution < 16 || second_resolution < 16)
    throw std::invalid_argument("attainable_region: resolution must be >= 16");
  (void)omega;  // samples are normalized, hence frequency-independent
  AttainableRegion out;
  const double gamma = sys.gamma();

  auto add = [&](const TuningPoint& t) {
    out.tunings.push_back(t);
    out.samples.push_back(ze_normalized(t, gamma));
  };

  auto linspace_phi = [&](std::size_t n, auto&& fn) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(-kPi / 2 + kPi * double(i) / double(n - 1));
    }
  };

  const bool two_d = pv_enabled && (topology == Topology::SeriesSshi ||
                                    topology == Topology::ParallelSshi);
  if (topology == Topology::Sece && !pv_enabled) {
    out.kind = AttainableRegion::Kind::Point;
    add({Topology::Sece, 0.0, 0.0});
  } else if (topology == Topology::Sece) {
    out.kind = AttainableRegion::Kind::Curve;
    linspace_phi(phi_resolution,
                 [&](double phi) { add({Topology::Sece, phi, 0.0}); });
    out.circle = {{2.0 / kPi, -1.0}, 2.0 / kPi};
  } else if (!two_d) {
    out.kind = AttainableRegion::Kind::Curve;
    for (std::size_t i = 0; i < second_resolution; ++i) {
      const double s = double(i) / double(second_resolution - 1);
      add(map_tuning(topology, 0.0, s));
    }
  } else {
    out.kind = AttainableRegion::Kind::Region;
    linspace_phi(phi_resolution, [&](double phi) {
      for (std::size_t i = 0; i < second_resolution; ++i) {
        const double s = double(i) / double(second_resolution - 1);
        add(map_tuning(topology, phi, s));
      }
    });
    const double g = (1.0 - gamma) / (1.0 + gamma);
    out.circle = {{2.0 / kPi * g, -1.0}, 2.0 / kPi * g};
  }
  return out;
}

std::complex<double> matching_target(const PehSystem& sys, double omega) {
  const std::complex<double> zm_conj =
      std::conj(sys.mechanical_impedance(omega).value);
  if (sys.rp_infinite()) return zm_conj;
  const double dp = sys.dielectric_damping();
  return zm_conj * dp / (dp - zm_conj);
}

namespace {

// Gap between the matching target and the SEH curve at one frequency,
// minimized over the rectified-voltage parameter.
double seh_gap(const PehSystem& sys, double omega) {
  const double scale = sys.alpha() * sys.alpha() / (omega * sys.cp());
  const std::complex<double> target = matching_target(sys, omega) / scale;
  auto gap = [&](double vr) {
    return std::abs(ze_normalized({Topology::Seh, 0.0, vr}, sys.gamma()) -
                    target);
  };
  double best_vr = 0.0, best = gap(0.0);
  const int n = 201;
  for (int i = 1; i < n; ++i) {
    const double vr = double(i) / double(n - 1);
    const double g = gap(vr);
    if (g < best) {
      best = g;
      best_vr = vr;
    }
  }
  const double lo = std::max(0.0, best_vr - 1.0 / (n - 1));
  const double hi = std::min(1.0, best_vr + 1.0 / (n - 1));
  return gap(golden_min(gap, lo, hi)) * scale;
}

}  // namespace

int seh_intersection_count(const PehSystem& sys, double omega_lo,
                           double omega_hi, double tol_fraction) {
  const int n = 301;
  std::vector<double> w(n), g(n);
  for (int i = 0; i < n; ++i) {
    w[i] = omega_lo + (omega_hi - omega_lo) * double(i) / double(n - 1);
    g[i] = seh_gap(sys, w[i]);
  }
  int count = 0;
  for (int i = 1; i + 1 < n; ++i) {
    if (g[i] <= g[i - 1] && g[i] <= g[i + 1]) {
      const double wm = golden_min([&](double x) { return seh_gap(sys, x); },
                                   w[i - 1], w[i + 1], 60);
      const double tol =
          tol_fraction * std::abs(sys.mechanical_impedance(wm).value);
      if (seh_gap(sys, wm) <= tol) ++count;
    }
  }
  return count;
}

MatchReport match_report(const PehSystem& sys, Topology topology, double omega,
                         bool pv_enabled, double tol_fraction) {
  MatchReport rep;
  rep.z_m = sys.mechanical_impedance(omega).value;
  rep.target_mech = matching_target(sys, omega);
  const double scale = sys.alpha() * sys.alpha() / (omega * sys.cp());
  const std::complex<double> target_norm = rep.target_mech / scale;

  const AttainableRegion region =
      attainable_region(sys, topology, omega, pv_enabled);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < region.samples.size(); ++i) {
    const double d = std::abs(region.samples[i] - target_norm);
    if (d < best) {
      best = d;
      best_i = i;
    }
  }
  rep.distance = best * scale;
  rep.best_tuning = region.tunings[best_i];
  rep.tolerance = tol_fraction * std::abs(rep.z_m);
  rep.feasible = rep.distance <= rep.tolerance;
  if (topology == Topology::Seh) {
    const double wn = sys.natural_frequency();
    rep.seh_intersections =
        seh_intersection_count(sys, 0.85 * wn, 1.25 * wn, tol_fraction);
  }
  return rep;
}

}  // namespace peh
