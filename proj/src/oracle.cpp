#include "peh/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "peh/impedance.hpp"

namespace peh {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

struct State {
  double x = 0.0;  // displacement
  double v = 0.0;  // velocity
  double u = 0.0;  // piezo voltage
};

enum class Mode { Free, ClampPos, ClampNeg };

struct PendingFlip {
  double t;
  int dir;  // +1: positive-to-negative action, -1: the mirror action
};

class Simulator {
 public:
  Simulator(const PehSystem& sys, const TuningPoint& tuning, double omega,
            const SimOptions& opt)
      : sys_(sys),
        tuning_(tuning),
        opt_(opt),
        omega_(omega),
        period_(kTwoPi / omega),
        m_(sys.mass()),
        k_(sys.stiffness()),
        d_(sys.damping()),
        alpha_(sys.alpha()),
        cp_(sys.cp()),
        rp_(sys.rp()),
        force_(sys.force_magnitude()) {
    has_switch_ = tuning.topology != Topology::Seh;
    has_clamp_ = tuning.topology == Topology::Seh ||
                 tuning.topology == Topology::ParallelSshi;
    switch (tuning.topology) {
      case Topology::Seh:
      case Topology::SeriesSshi:
        vr_tilde_ = tuning.second;
        break;
      case Topology::ParallelSshi: {
        const auto iv =
            solve_interior_p_sshi(tuning.phi, tuning.second, sys.gamma());
        vr_tilde_ = -iv.v1 + std::cos(tuning.phi) - std::cos(tuning.second);
        break;
      }
      case Topology::Sece:
        vr_tilde_ = 0.0;
        break;
    }
  }

  SimTrace run();

 private:
  double rp_current(double u) const {
    return std::isinf(rp_) ? 0.0 : u / rp_;
  }

  State deriv(double t, const State& s) const {
    State ds;
    ds.x = s.v;
    ds.v = (force_ * std::sin(omega_ * t) - d_ * s.v - k_ * s.x -
            alpha_ * s.u) /
           m_;
    if (mode_ == Mode::Free) {
      ds.u = (alpha_ * s.v - rp_current(s.u)) / cp_;
    } else {
      ds.u = 0.0;
    }
    return ds;
  }

  State rk4(double t, const State& s, double h) const {
    const State k1 = deriv(t, s);
    State s2{s.x + 0.5 * h * k1.x, s.v + 0.5 * h * k1.v, s.u + 0.5 * h * k1.u};
    const State k2 = deriv(t + 0.5 * h, s2);
    State s3{s.x + 0.5 * h * k2.x, s.v + 0.5 * h * k2.v, s.u + 0.5 * h * k2.u};
    const State k3 = deriv(t + 0.5 * h, s3);
    State s4{s.x + h * k3.x, s.v + h * k3.v, s.u + h * k3.u};
    const State k4 = deriv(t + h, s4);
    return {s.x + h / 6.0 * (k1.x + 2.0 * (k2.x + k3.x) + k4.x),
            s.v + h / 6.0 * (k1.v + 2.0 * (k2.v + k3.v) + k4.v),
            s.u + h / 6.0 * (k1.u + 2.0 * (k2.u + k3.u) + k4.u)};
  }

  // rectifier current while clamped (positive means conducting)
  double clamp_current(const State& s) const {
    const double vc = clamp_level();
    if (mode_ == Mode::ClampPos) return alpha_ * s.v - rp_current(vc);
    return -alpha_ * s.v - rp_current(vc);
  }

  double clamp_level() const { return vr_ + 2.0 * opt_.diode_drop; }

  // signed event functions at a given state; crossing from negative to
  // positive (or any sign change for velocity) triggers
  double g_velocity(const State& s) const { return s.v; }
  double g_onset_pos(const State& s) const { return s.u - clamp_level(); }
  double g_onset_neg(const State& s) const { return -s.u - clamp_level(); }
  double g_conduction_end(const State& s) const { return clamp_current(s); }

  void apply_flip(double t, int dir, SimTrace& trace);
  void schedule_flip(double t_cross, int dir);
  void accumulate(double t0, const State& s0, double t1, const State& s1);
  double stored_energy(const State& s) const {
    return 0.5 * m_ * s.v * s.v + 0.5 * k_ * s.x * s.x + 0.5 * cp_ * s.u * s.u;
  }

  void warm_start();

  const PehSystem& sys_;
  TuningPoint tuning_;
  SimOptions opt_;
  double omega_, period_;
  double m_, k_, d_, alpha_, cp_, rp_, force_;
  bool has_switch_ = false;
  bool has_clamp_ = false;

  Mode mode_ = Mode::Free;
  State s_{};
  double t_ = 0.0;
  double vr_ = 0.0;        // current rectified voltage, V
  double vr_tilde_ = 0.0;  // target Vr / Voc
  bool vr_frozen_ = false;
  std::vector<PendingFlip> pending_;

  // per-cycle accumulators
  CycleLedger cyc_{};
  double cyc_vmax_ = 0.0;
  // fundamental trackers: the switch phase and the Vr normalization are
  // referenced to the branch current alpha*xdot - vp/Rp, matching the
  // frequency-domain definition of the interface waveform
  std::complex<double> acc_vel_{}, acc_ib_{};
  double delta_psi_ = 0.0;  // branch-current phase minus velocity phase
  double i1_ = 0.0;         // branch-current fundamental amplitude
};

void Simulator::schedule_flip(double t_cross, int dir) {
  const double tf = t_cross + (kPi + tuning_.phi - delta_psi_) / omega_;
  for (const auto& p : pending_) {
    if (p.dir == dir && std::abs(p.t - tf) < period_ / 8.0) return;
  }
  pending_.push_back({tf, dir});
  std::sort(pending_.begin(), pending_.end(),
            [](const PendingFlip& a, const PendingFlip& b) { return a.t < b.t; });
}

void Simulator::apply_flip(double t, int dir, SimTrace& trace) {
  const double before = s_.u;
  switch (tuning_.topology) {
    case Topology::Sece: {
      cyc_.harvested += 0.5 * cp_ * before * before;
      s_.u = 0.0;
      break;
    }
    case Topology::SeriesSshi: {
      const double ref = dir > 0 ? vr_ : -vr_;
      const double after = sys_.gamma() * (before - ref) + ref;
      const double dq = cp_ * std::abs(before - after);
      cyc_.harvested += vr_ * dq;
      cyc_.flip_loss +=
          0.5 * cp_ * (before * before - after * after) - vr_ * dq;
      s_.u = after;
      break;
    }
    case Topology::ParallelSshi: {
      mode_ = Mode::Free;
      const double after = sys_.gamma() * before;
      cyc_.flip_loss += 0.5 * cp_ * (before * before - after * after);
      s_.u = after;
      break;
    }
    case Topology::Seh:
      return;
  }
  trace.events.push_back({t, EventKind::SwitchAction});
}

void Simulator::accumulate(double t0, const State& s0, double t1,
                           const State& s1) {
  const double h = t1 - t0;
  if (h <= 0.0) return;
  auto input = [&](double t, const State& s) {
    return force_ * std::sin(omega_ * t) * s.v;
  };
  auto mech = [&](const State& s) { return d_ * s.v * s.v; };
  auto diel = [&](const State& s) {
    return std::isinf(rp_) ? 0.0 : s.u * s.u / rp_;
  };
  cyc_.input += 0.5 * h * (input(t0, s0) + input(t1, s1));
  cyc_.mech_loss += 0.5 * h * (mech(s0) + mech(s1));
  cyc_.dielectric_loss += 0.5 * h * (diel(s0) + diel(s1));
  if (mode_ != Mode::Free) {
    const double i0 = std::max(0.0, clamp_current(s0));
    const double i1 = std::max(0.0, clamp_current(s1));
    cyc_.harvested += 0.5 * h * vr_ * (i0 + i1);
    if (opt_.diode_drop > 0.0)
      cyc_.flip_loss += 0.5 * h * 2.0 * opt_.diode_drop * (i0 + i1);
  }
  cyc_vmax_ = std::max({cyc_vmax_, std::abs(s0.v), std::abs(s1.v)});

  auto ib = [&](const State& s) { return alpha_ * s.v - rp_current(s.u); };
  const std::complex<double> e0 = std::polar(1.0, -omega_ * t0);
  const std::complex<double> e1 = std::polar(1.0, -omega_ * t1);
  acc_vel_ += 0.5 * h * (s0.v * e0 + s1.v * e1);
  acc_ib_ += 0.5 * h * (ib(s0) * e0 + ib(s1) * e1);
}

void Simulator::warm_start() {
  const auto ze = equivalent_impedance(sys_, tuning_, omega_);
  const std::complex<double> zm = sys_.mechanical_impedance(omega_).value;
  const double dp = sys_.dielectric_damping();
  std::complex<double> zpar = ze.z_mech;
  std::complex<double> split{1.0, 0.0};
  if (!std::isinf(dp)) {
    zpar = ze.z_mech * dp / (ze.z_mech + dp);
    split = dp / (ze.z_mech + dp);
  }
  const std::complex<double> vel = force_ / (zm + zpar);
  const std::complex<double> ih = alpha_ * vel * split;
  const std::complex<double> j{0.0, 1.0};
  const std::complex<double> xph = vel / (j * omega_);
  const std::complex<double> uph = ih * ze.z_elec;

  s_.x = xph.imag();
  s_.v = vel.imag();
  s_.u = uph.imag();
  const double i_mag = std::abs(ih);
  i1_ = i_mag;
  vr_ = vr_tilde_ * i_mag / (omega_ * cp_);
  if (i_mag > 0.0 && std::abs(vel) > 0.0) {
    double dps = std::atan2(ih.imag(), ih.real()) -
                 std::atan2(vel.imag(), vel.real());
    if (dps > kPi) dps -= kTwoPi;
    if (dps < -kPi) dps += kTwoPi;
    delta_psi_ = dps;
  }

  // seed the switch schedule from the predicted velocity phase
  if (has_switch_) {
    const double psi = std::atan2(vel.imag(), vel.real());
    auto wrap = [&](double a) {
      return a - kTwoPi * std::floor(a / kTwoPi);
    };
    const double up = wrap(-psi) / omega_;
    const double down = wrap(kPi - psi) / omega_;
    for (int k = 0; k < 2; ++k) {
      schedule_flip(up + k * period_, +1);
      schedule_flip(down + k * period_, -1);
    }
  }

  // start inside a conduction interval when the initial state demands it
  if (has_clamp_) {
    if (s_.u >= clamp_level() && alpha_ * s_.v > rp_current(clamp_level())) {
      mode_ = Mode::ClampPos;
      s_.u = clamp_level();
    } else if (-s_.u >= clamp_level() &&
               -alpha_ * s_.v > rp_current(clamp_level())) {
      mode_ = Mode::ClampNeg;
      s_.u = -clamp_level();
    }
  }
}

SimTrace Simulator::run() {
  SimTrace trace;
  trace.omega = omega_;
  trace.period = period_;
  trace.cp = cp_;
  trace.rp = rp_;
  trace.alpha = alpha_;
  trace.force = force_;
  trace.averaging_cycles = opt_.averaging_cycles;

  warm_start();

  const double h_nom = period_ / double(opt_.steps_per_cycle);
  const double event_tol = opt_.event_tol_fraction * period_;

  auto record = [&](double t, const State& s) {
    trace.t.push_back(t);
    trace.x.push_back(s.x);
    trace.xdot.push_back(s.v);
    trace.vp.push_back(mode_ == Mode::Free
                           ? s.u
                           : (mode_ == Mode::ClampPos ? clamp_level()
                                                      : -clamp_level()));
  };
  record(0.0, s_);

  double prev_harvested = -1.0, prev_vamp = -1.0;
  std::size_t settle_count = 0;
  std::size_t freeze_cycles_left = 0;
  bool done = false;
  bool budget_exhausted = false;

  const std::size_t cycle_budget = opt_.max_cycles + opt_.averaging_cycles + 2;
  for (std::size_t cycle = 0; cycle < cycle_budget && !done; ++cycle) {
    cyc_ = CycleLedger{};
    cyc_vmax_ = 0.0;
    const double t_cycle_end = double(cycle + 1) * period_;
    const double e0 = stored_energy(s_);

    while (t_ < t_cycle_end - 1e-15 * period_) {
      // release the clamp if the rectifier current is already reversed (the
      // crossing detector can land a hair past the zero when the conduction
      // end coincides with another event, e.g. the velocity zero at Rp = inf)
      if (mode_ != Mode::Free && clamp_current(s_) < 0.0) {
        mode_ = Mode::Free;
        trace.events.push_back({t_, EventKind::ConductionEnd});
      }
      // next stop: nominal grid point, cycle end, or a scheduled action
      double t_stop = std::min(t_ + h_nom, t_cycle_end);
      bool stop_is_flip = false;
      if (!pending_.empty() && pending_.front().t <= t_stop + 1e-15) {
        t_stop = std::max(pending_.front().t, t_);
        stop_is_flip = true;
      }
      const double h = t_stop - t_;
      const State s0 = s_;
      const double t0 = t_;
      State s1 = h > 0.0 ? rk4(t0, s0, h) : s0;

      // look for the earliest state event inside the step
      struct Crossing {
        double delta;
        int what;  // 0: velocity, 1: onset+, 2: onset-, 3: conduction end
        int dir;
      };
      std::vector<Crossing> hits;
      auto check = [&](int what, auto&& g, bool both_directions,
                       bool upward_only) {
        const double ga = g(s0), gb = g(s1);
        if (ga == 0.0) return;
        const bool crossed =
            (ga < 0.0 && gb >= 0.0) || (ga > 0.0 && gb <= 0.0);
        if (!crossed) return;
        const int dir = ga < 0.0 ? +1 : -1;
        if (upward_only && dir < 0) return;
        if (!both_directions && !upward_only && dir > 0) return;
        // bisect on the substep size
        double lo = 0.0, hi = h;
        for (int it = 0; it < 64 && hi - lo > event_tol; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double gm = g(rk4(t0, s0, mid));
          if ((gm < 0.0) == (ga < 0.0))
            lo = mid;
          else
            hi = mid;
        }
        hits.push_back({0.5 * (lo + hi), what, dir});
      };

      if (h > 0.0) {
        check(0, [&](const State& s) { return g_velocity(s); }, true, false);
        if (has_clamp_ && mode_ == Mode::Free) {
          check(1, [&](const State& s) { return g_onset_pos(s); }, false,
                true);
          check(2, [&](const State& s) { return g_onset_neg(s); }, false,
                true);
        }
        if (mode_ != Mode::Free) {
          check(3, [&](const State& s) { return g_conduction_end(s); }, false,
                false);
        }
      }

      if (!hits.empty()) {
        const auto ev = *std::min_element(
            hits.begin(), hits.end(),
            [](const Crossing& a, const Crossing& b) { return a.delta < b.delta; });
        const State se = rk4(t0, s0, ev.delta);
        accumulate(t0, s0, t0 + ev.delta, se);
        s_ = se;
        t_ = t0 + ev.delta;
        switch (ev.what) {
          case 0:
            if (has_switch_) schedule_flip(t_, ev.dir);
            break;
          case 1:
            mode_ = Mode::ClampPos;
            s_.u = clamp_level();
            trace.events.push_back({t_, EventKind::ConductionOnset});
            break;
          case 2:
            mode_ = Mode::ClampNeg;
            s_.u = -clamp_level();
            trace.events.push_back({t_, EventKind::ConductionOnset});
            break;
          case 3:
            mode_ = Mode::Free;
            trace.events.push_back({t_, EventKind::ConductionEnd});
            break;
        }
        record(t_, s_);
        continue;
      }

      accumulate(t0, s0, t_stop, s1);
      s_ = s1;
      t_ = t_stop;
      record(t_, s_);
      if (stop_is_flip) {
        const PendingFlip f = pending_.front();
        pending_.erase(pending_.begin());
        apply_flip(t_, f.dir, trace);
        record(t_, s_);
      }
    }

    cyc_.stored_delta = stored_energy(s_) - e0;
    trace.ledger.push_back(cyc_);
    trace.cycles = cycle + 1;

    // refresh the branch-current fundamental trackers
    if (std::abs(acc_ib_) > 0.0) i1_ = 2.0 * std::abs(acc_ib_) / period_;
    if (std::abs(acc_ib_) > 0.0 && std::abs(acc_vel_) > 0.0)
      delta_psi_ = std::arg(acc_ib_ / acc_vel_);
    acc_vel_ = acc_ib_ = {};

    // adapt the rectified voltage toward the normalized target
    if (!vr_frozen_ && vr_tilde_ > 0.0) {
      const double i_ref = i1_ > 0.0 ? i1_ : alpha_ * cyc_vmax_;
      const double voc = i_ref / (omega_ * cp_);
      vr_ = 0.5 * vr_ + 0.5 * vr_tilde_ * voc;
    }

    if (freeze_cycles_left > 0) {
      if (--freeze_cycles_left == 0) {
        trace.converged = !budget_exhausted;
        done = true;
      }
    } else {
      const double eh = cyc_.harvested;
      bool settled;
      if (std::abs(eh) > 1e-18) {
        settled = prev_harvested >= 0.0 &&
                  std::abs(eh - prev_harvested) <=
                      opt_.power_tol * std::max(std::abs(eh), 1e-300);
      } else {
        settled = prev_vamp >= 0.0 &&
                  std::abs(cyc_vmax_ - prev_vamp) <=
                      opt_.power_tol * std::max(cyc_vmax_, 1e-300);
      }
      if (settled && ++settle_count >= 2 && cycle >= 4) {
        vr_frozen_ = true;
        freeze_cycles_left = opt_.averaging_cycles;
      } else if (!settled) {
        settle_count = 0;
      }
      if (cycle + 1 >= opt_.max_cycles && freeze_cycles_left == 0) {
        // out of budget: freeze and average anyway, flagged non-converged
        vr_frozen_ = true;
        freeze_cycles_left = opt_.averaging_cycles;
        budget_exhausted = true;
      }
      prev_harvested = eh;
      prev_vamp = cyc_vmax_;
    }

    // keep memory bounded when the full trace is not requested
    if (!opt_.record_full_trace) {
      const double keep_from =
          t_ - double(opt_.averaging_cycles + 2) * period_;
      if (!trace.t.empty() && trace.t.front() < keep_from - 2.0 * period_) {
        const auto it =
            std::lower_bound(trace.t.begin(), trace.t.end(), keep_from);
        const std::size_t n = std::distance(trace.t.begin(), it);
        trace.t.erase(trace.t.begin(), trace.t.begin() + n);
        trace.x.erase(trace.x.begin(), trace.x.begin() + n);
        trace.xdot.erase(trace.xdot.begin(), trace.xdot.begin() + n);
        trace.vp.erase(trace.vp.begin(), trace.vp.begin() + n);
      }
    }

    trace.vr = vr_;
    trace.velocity_amp = cyc_vmax_;
  }

  return trace;
}

}  // namespace

SimTrace simulate(const PehSystem& sys, const TuningPoint& tuning, double omega,
                  const SimOptions& options) {
  validate(tuning);
  if (!(omega > 0.0))
    throw std::invalid_argument("simulate: omega must be > 0");
  Simulator sim(sys, tuning, omega, options);
  return sim.run();
}

namespace {

// trapezoid integral of f(t_i) * e^{-j k w t} over the final `cycles` periods
std::complex<double> fourier(const SimTrace& trace,
                             const std::vector<double>& f, int k,
                             std::size_t cycles) {
  const double t_end = trace.t.back();
  const double t_begin = t_end - double(cycles) * trace.period;
  std::complex<double> acc{0.0, 0.0};
  const double w = trace.omega * double(k);
  for (std::size_t i = 0; i + 1 < trace.t.size(); ++i) {
    if (trace.t[i] < t_begin) continue;
    const double h = trace.t[i + 1] - trace.t[i];
    if (h <= 0.0) continue;
    const std::complex<double> e0 =
        std::polar(1.0, -w * trace.t[i]);
    const std::complex<double> e1 = std::polar(1.0, -w * trace.t[i + 1]);
    acc += 0.5 * h * (f[i] * e0 + f[i + 1] * e1);
  }
  return acc * (2.0 / (double(cycles) * trace.period));
}

void require_converged(const SimTrace& trace, const char* who) {
  if (!trace.converged)
    throw std::runtime_error(std::string(who) +
                             ": trace did not converge to steady state");
  if (trace.t.size() < 8)
    throw std::runtime_error(std::string(who) + ": trace too short");
}

}  // namespace

SteadyPower steady_state_power(const SimTrace& trace) {
  require_converged(trace, "steady_state_power");
  const std::size_t n = std::min<std::size_t>(trace.averaging_cycles,
                                              trace.ledger.size());
  SteadyPower out;
  for (std::size_t i = trace.ledger.size() - n; i < trace.ledger.size(); ++i) {
    out.p_h += trace.ledger[i].harvested;
    out.p_d_flip += trace.ledger[i].flip_loss;
    out.p_rp += trace.ledger[i].dielectric_loss;
  }
  const double span = double(n) * trace.period;
  out.p_h /= span;
  out.p_d_flip /= span;
  out.p_rp /= span;

  // harmonic distortion of i_eq = alpha * xdot
  std::vector<double> ieq(trace.xdot.size());
  for (std::size_t i = 0; i < ieq.size(); ++i)
    ieq[i] = trace.alpha * trace.xdot[i];
  const std::complex<double> c1 = fourier(trace, ieq, 1, n);
  double hsum = 0.0;
  for (int k = 2; k <= 10; ++k) {
    hsum += std::norm(fourier(trace, ieq, k, n));
  }
  out.thd_ih = std::abs(c1) > 0.0 ? std::sqrt(hsum) / std::abs(c1) : 0.0;
  return out;
}

std::complex<double> oracle_impedance(const SimTrace& trace, double omega) {
  require_converged(trace, "oracle_impedance");
  (void)omega;
  const std::size_t n = std::min<std::size_t>(trace.averaging_cycles,
                                              trace.ledger.size());
  // current into the Cp + interface branch (leakage excluded)
  std::vector<double> ih(trace.xdot.size());
  const bool finite_rp = !std::isinf(trace.rp);
  for (std::size_t i = 0; i < ih.size(); ++i) {
    ih[i] = trace.alpha * trace.xdot[i] -
            (finite_rp ? trace.vp[i] / trace.rp : 0.0);
  }
  const std::complex<double> u1 = fourier(trace, trace.vp, 1, n);
  const std::complex<double> i1 = fourier(trace, ih, 1, n);
  return u1 / i1;
}

}  // namespace peh
