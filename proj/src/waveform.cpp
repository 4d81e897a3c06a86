#include "peh/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "peh/impedance.hpp"

namespace peh {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

void push_segment(std::vector<Segment>& out, double begin, double end, double a,
                  double b) {
  if (end > begin) out.push_back({begin, end, a, b});
}

}  // namespace

const char* topology_name(Topology t) {
  switch (t) {
    case Topology::Seh: return "seh";
    case Topology::Sece: return "sece";
    case Topology::SeriesSshi: return "s-sshi";
    case Topology::ParallelSshi: return "p-sshi";
  }
  return "?";
}

Interval p_sshi_theta_domain(double phi) {
  if (phi <= 0.0) return {-phi, kPi + phi};
  return {std::acos(2.0 * std::cos(phi) - 1.0), kPi};
}

void validate(const TuningPoint& t) {
  const double tol = 1e-12;
  if (t.topology == Topology::Seh) {
    if (t.phi != 0.0) fail("SEH tuning: phi must be 0");
    if (t.second < 0.0) fail("SEH tuning: Vr_tilde must be >= 0");
    return;
  }
  if (!(t.phi >= -kPi / 2 - tol && t.phi <= kPi / 2 + tol))
    fail("tuning: phi must lie in [-pi/2, pi/2]");
  switch (t.topology) {
    case Topology::Sece:
      break;
    case Topology::SeriesSshi:
      if (t.second < 0.0) fail("S-SSHI tuning: Vr_tilde must be >= 0");
      break;
    case Topology::ParallelSshi: {
      const Interval dom = p_sshi_theta_domain(t.phi);
      if (t.second < dom.lo - tol) {
        std::ostringstream os;
        os << "P-SSHI tuning: theta below lower bound " << dom.lo;
        fail(os.str());
      }
      if (t.second > dom.hi + tol) {
        std::ostringstream os;
        os << "P-SSHI tuning: theta above upper bound " << dom.hi;
        fail(os.str());
      }
      break;
    }
    default:
      break;
  }
}

InteriorVoltages solve_interior_s_sshi(double phi, double vr_tilde,
                                       double gamma) {
  if (gamma <= -1.0) fail("solve_interior_s_sshi: gamma = -1 is singular");
  // [1 1; g -1][V0; V1] = [2 cos(phi); (g-1) Vr]
  const double v0 =
      (2.0 * std::cos(phi) + (gamma - 1.0) * vr_tilde) / (1.0 + gamma);
  return {v0, 2.0 * std::cos(phi) - v0};
}

InteriorVoltages solve_interior_p_sshi(double phi, double theta, double gamma) {
  if (gamma <= -1.0) fail("solve_interior_p_sshi: gamma = -1 is singular");
  validate({Topology::ParallelSshi, phi, theta});
  const double rhs = (phi <= 0.0)
                         ? std::cos(phi) - std::cos(theta)
                         : 2.0 * std::cos(phi) - std::cos(theta) - 1.0;
  const double v0 = rhs / (1.0 + gamma);
  return {v0, gamma * v0};
}

PiecewiseVoltage synthesize_vp(const TuningPoint& tuning, double gamma,
                               double voc) {
  validate(tuning);
  if (!(voc > 0.0)) fail("synthesize_vp: voc must be > 0");
  PiecewiseVoltage wave;
  wave.voc = voc;
  wave.phase = tuning.phi;
  const double phi = tuning.phi;
  const double cphi = std::cos(phi);
  auto& seg = wave.segments;

  switch (tuning.topology) {
    case Topology::Seh: {
      const double vr = tuning.second;
      if (vr > 1.0) {
        // diodes never conduct; fall back to the open-circuit waveform
        wave.open_circuit_fallback = true;
        seg.push_back({0.0, kTwoPi, 0.0, -1.0});
        break;
      }
      const double theta = std::acos(1.0 - 2.0 * vr);
      push_segment(seg, 0.0, theta, 1.0 - vr, -1.0);
      push_segment(seg, theta, kPi, vr, 0.0);
      push_segment(seg, kPi, kPi + theta, vr - 1.0, -1.0);
      push_segment(seg, kPi + theta, kTwoPi, -vr, 0.0);
      break;
    }
    case Topology::Sece: {
      seg.push_back({phi, kPi + phi, cphi, -1.0});
      seg.push_back({kPi + phi, kTwoPi + phi, -cphi, -1.0});
      break;
    }
    case Topology::SeriesSshi: {
      const auto iv = solve_interior_s_sshi(phi, tuning.second, gamma);
      seg.push_back({phi, kPi + phi, -iv.v1 + cphi, -1.0});
      seg.push_back({kPi + phi, kTwoPi + phi, iv.v1 - cphi, -1.0});
      break;
    }
    case Topology::ParallelSshi: {
      const double theta = tuning.second;
      const double ctheta = std::cos(theta);
      const auto iv = solve_interior_p_sshi(phi, theta, gamma);
      const double a = -iv.v1 + cphi;
      if (phi <= 0.0) {
        push_segment(seg, phi, theta, a, -1.0);
        push_segment(seg, theta, kPi + phi, a - ctheta, 0.0);
        push_segment(seg, kPi + phi, kPi + theta, -a, -1.0);
        push_segment(seg, kPi + theta, kTwoPi + phi, -a + ctheta, 0.0);
      } else {
        push_segment(seg, phi, theta, a, -1.0);
        push_segment(seg, theta, kPi, a - ctheta, 0.0);
        push_segment(seg, kPi, kPi + phi, a - ctheta - 1.0, -1.0);
        push_segment(seg, kPi + phi, kPi + theta, -a, -1.0);
        push_segment(seg, kPi + theta, kTwoPi, -a + ctheta, 0.0);
        push_segment(seg, kTwoPi, kTwoPi + phi, -a + ctheta + 1.0, -1.0);
      }
      break;
    }
  }
  return wave;
}

double PiecewiseVoltage::normalized(double u) const {
  double w = u - phase;
  w -= kTwoPi * std::floor(w / kTwoPi);
  w += phase;
  for (const auto& s : segments) {
    if (w >= s.begin && w < s.end) return s.offset + s.cosine * std::cos(w);
  }
  const auto& s = segments.back();
  return s.offset + s.cosine * std::cos(w);
}

double PiecewiseVoltage::value(double u) const { return voc * normalized(u); }

TuningPoint map_tuning(Topology topology, double phi, double s) {
  switch (topology) {
    case Topology::Seh:
      return {topology, 0.0, s};
    case Topology::Sece:
      return {topology, phi, 0.0};
    case Topology::SeriesSshi:
      return {topology, phi, s * std::cos(phi)};
    case Topology::ParallelSshi: {
      const Interval dom = p_sshi_theta_domain(phi);
      return {topology, phi, dom.lo + s * (dom.hi - dom.lo)};
    }
  }
  return {};
}

double rectified_voltage(const TuningPoint& tuning, double gamma, double voc) {
  switch (tuning.topology) {
    case Topology::Seh:
      return tuning.second * voc;
    case Topology::Sece:
      return 0.0;
    case Topology::SeriesSshi:
      return tuning.second * voc;
    case Topology::ParallelSshi: {
      const auto iv = solve_interior_p_sshi(tuning.phi, tuning.second, gamma);
      return voc * (-iv.v1 + std::cos(tuning.phi) - std::cos(tuning.second));
    }
  }
  return 0.0;
}

WorkCycle work_cycle(const PiecewiseVoltage& wave, double i_h_mag, double omega,
                     std::size_t samples) {
  if (wave.segments.empty()) fail("work_cycle: empty waveform");
  samples = std::max<std::size_t>(samples, 1024);
  WorkCycle out;
  const double q0 = i_h_mag / omega;
  auto& traj = out.trajectory;
  for (const auto& s : wave.segments) {
    const std::size_t n = std::max<std::size_t>(
        2, static_cast<std::size_t>(
               std::ceil(samples * (s.end - s.begin) / kTwoPi)) + 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = s.begin + (s.end - s.begin) * double(i) / double(n - 1);
      const double v = wave.voc * (s.offset + s.cosine * std::cos(u));
      traj.push_back({v, -q0 * std::cos(u)});
    }
  }
  // closed loop integral of v dq; segment-boundary jumps happen at constant
  // charge and contribute nothing.
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    area += 0.5 * (traj[i][0] + traj[i + 1][0]) * (traj[i + 1][1] - traj[i][1]);
  }
  area += 0.5 * (traj.back()[0] + traj.front()[0]) *
          (traj.front()[1] - traj.back()[1]);
  out.area = area;
  return out;
}

EnergySplit energy_split(const PiecewiseVoltage& wave,
                         const TuningPoint& tuning, double gamma,
                         double vr_volts, double i_h_mag, double omega) {
  const double period = kTwoPi / omega;
  const std::complex<double> vf = fundamental_harmonic(wave);
  // total extraction per cycle from the average-power identity
  const double e_tot = 0.5 * period * i_h_mag * vf.real();
  EnergySplit out{0.0, 0.0};
  switch (tuning.topology) {
    case Topology::Seh: {
      if (wave.open_circuit_fallback) return {0.0, 0.0};
      const double theta = std::acos(1.0 - 2.0 * tuning.second);
      const double dq = (i_h_mag / omega) * (1.0 + std::cos(theta));
      out.e_h = 2.0 * vr_volts * dq;
      break;
    }
    case Topology::Sece:
      out.e_h = e_tot;
      break;
    case Topology::SeriesSshi: {
      const auto iv = solve_interior_s_sshi(tuning.phi, tuning.second, gamma);
      // charge through the rectifier during each flip: Cp |V0 - V1|
      out.e_h = 2.0 * vr_volts * (i_h_mag / omega) * std::abs(iv.v0 - iv.v1);
      break;
    }
    case Topology::ParallelSshi: {
      const double theta = tuning.second;
      const double dq =
          (tuning.phi <= 0.0)
              ? (i_h_mag / omega) * (std::cos(theta) + std::cos(tuning.phi))
              : (i_h_mag / omega) * (std::cos(theta) + 1.0);
      out.e_h = 2.0 * vr_volts * dq;
      break;
    }
  }
  out.e_d = e_tot - out.e_h;
  const double tiny = 1e-9 * std::max(std::abs(e_tot), 1e-300);
  if (out.e_d < 0.0 && out.e_d > -tiny) out.e_d = 0.0;
  if (out.e_h < 0.0 && out.e_h > -tiny) out.e_h = 0.0;
  return out;
}

}  // namespace peh
