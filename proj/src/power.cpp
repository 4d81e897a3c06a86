#include "peh/power.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

namespace peh {

namespace {

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested ? requested : std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  return static_cast<unsigned>(std::min<std::size_t>(n, jobs ? jobs : 1));
}

// Deterministic parallel for: static index striping, results by index.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
  const unsigned n = worker_count(threads, count);
  if (n <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) {
    pool.emplace_back([=, &body] {
      for (std::size_t i = t; i < count; i += n) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

double harvested_power(std::complex<double> z_m, const EquivalentImpedance& ze,
                       double d_p, double force) {
  if (force < 0.0)
    throw std::invalid_argument("harvested_power: force must be >= 0");
  const double d_h = ze.d_h();
  if (d_h <= 0.0) return 0.0;
  std::complex<double> denom;
  if (std::isinf(d_p)) {
    denom = z_m + ze.z_mech;
  } else {
    denom = (z_m * d_p + z_m * ze.z_mech + ze.z_mech * d_p) / d_p;
  }
  const double mag = std::abs(denom);
  if (mag == 0.0) return 0.0;  // unreachable for passive branches
  const double flow = force / mag;
  return 0.5 * d_h * flow * flow;
}

double harvested_power(const PehSystem& sys, const TuningPoint& tuning,
                       double omega) {
  const auto ze = equivalent_impedance(sys, tuning, omega);
  return harvested_power(sys.mechanical_impedance(omega).value, ze,
                         sys.dielectric_damping(), sys.force_magnitude());
}

PowerMap sweep(const PehSystem& sys, Topology topology, bool pv_enabled,
               std::span<const double> omega_grid,
               std::span<const double> phi_grid,
               std::span<const double> s_grid, unsigned threads) {
  if (omega_grid.empty())
    throw std::invalid_argument("sweep: omega grid must be non-empty");
  PowerMap map;
  map.omega_grid.assign(omega_grid.begin(), omega_grid.end());
  if (!pv_enabled || topology == Topology::Seh) {
    map.phi_grid = {0.0};
  } else {
    map.phi_grid.assign(phi_grid.begin(), phi_grid.end());
    if (map.phi_grid.empty())
      throw std::invalid_argument("sweep: phi grid must be non-empty");
  }
  if (topology == Topology::Sece) {
    map.s_grid = {0.0};
  } else {
    map.s_grid.assign(s_grid.begin(), s_grid.end());
    if (map.s_grid.empty())
      throw std::invalid_argument("sweep: second-parameter grid must be non-empty");
  }

  const std::size_t total =
      map.omega_grid.size() * map.phi_grid.size() * map.s_grid.size();
  map.p_h.resize(total);
  map.second_actual.resize(total);
  map.d_h.resize(total);
  map.d_d.resize(total);
  map.k_e.resize(total);

  const double force = sys.force_magnitude();
  const double d_p = sys.dielectric_damping();
  parallel_for(total, threads, [&](std::size_t idx) {
    const std::size_t is = idx % map.s_grid.size();
    const std::size_t ip = (idx / map.s_grid.size()) % map.phi_grid.size();
    const std::size_t iw = idx / (map.s_grid.size() * map.phi_grid.size());
    const TuningPoint t =
        map_tuning(topology, map.phi_grid[ip], map.s_grid[is]);
    const auto ze = equivalent_impedance(sys, t, map.omega_grid[iw]);
    map.p_h[idx] =
        harvested_power(sys.mechanical_impedance(map.omega_grid[iw]).value, ze,
                        d_p, force);
    map.second_actual[idx] = t.second;
    map.d_h[idx] = ze.d_h();
    map.d_d[idx] = ze.d_d();
    map.k_e[idx] = ze.k_e();
  });
  return map;
}

namespace {

struct Box {
  double lo, hi;
};

// Grid search + coordinate descent over up to two coordinates.
template <typename F>
std::pair<std::array<double, 2>, double> optimize_box(
    F&& f, std::vector<Box> box, std::size_t coarse) {
  const std::size_t dims = box.size();
  std::array<double, 2> best{0.0, 0.0};
  double best_val = -std::numeric_limits<double>::infinity();

  auto eval = [&](double a, double b) {
    const double v = f(a, b);
    return v;
  };

  if (dims == 0) return {best, eval(0.0, 0.0)};

  auto grid = [&](const Box& b, std::size_t n, std::size_t i) {
    return n == 1 ? b.lo : b.lo + (b.hi - b.lo) * double(i) / double(n - 1);
  };

  // coarse scan
  const std::size_t n0 = coarse;
  const std::size_t n1 = dims == 2 ? coarse : 1;
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      const double a = grid(box[0], n0, i);
      const double b = dims == 2 ? grid(box[1], n1, j) : 0.0;
      const double v = eval(a, b);
      if (v > best_val) {
        best_val = v;
        best = {a, b};
      }
    }
  }

  // coordinate descent refinement
  std::vector<double> span(dims);
  for (std::size_t d = 0; d < dims; ++d) span[d] = box[d].hi - box[d].lo;
  const double shrink = 0.2;
  for (int round = 0; round < 3; ++round) {
    for (std::size_t d = 0; d < dims; ++d) span[d] *= shrink;
    for (std::size_t d = 0; d < dims; ++d) {
      const double lo = std::max(box[d].lo, best[d] - 0.5 * span[d]);
      const double hi = std::min(box[d].hi, best[d] + 0.5 * span[d]);
      const std::size_t n = 17;
      for (std::size_t i = 0; i < n; ++i) {
        const double x = lo + (hi - lo) * double(i) / double(n - 1);
        std::array<double, 2> cand = best;
        cand[d] = x;
        const double v = eval(cand[0], dims == 2 ? cand[1] : 0.0);
        if (v > best_val) {
          best_val = v;
          best = cand;
        }
      }
    }
  }
  return {best, best_val};
}

constexpr double kHalfPi = 1.57079632679489661923;

}  // namespace

OptimalTuning optimal_at_frequency(const PehSystem& sys, Topology topology,
                                   bool pv_enabled, double omega,
                                   std::size_t coarse) {
  const bool has_phi = pv_enabled && topology != Topology::Seh;
  const bool has_second = topology != Topology::Sece;

  std::vector<Box> box;
  if (has_phi) box.push_back({-kHalfPi, kHalfPi});
  if (has_second) box.push_back({0.0, 1.0});

  auto value = [&](double a, double b) {
    double phi = 0.0, s = 0.0;
    if (has_phi) {
      phi = a;
      s = has_second ? b : 0.0;
    } else {
      s = has_second ? a : 0.0;
    }
    return harvested_power(sys, map_tuning(topology, phi, s), omega);
  };

  // single-coordinate problems get mapped onto the first slot
  std::vector<Box> actual = box;
  auto [best, val] = optimize_box(
      [&](double a, double b) {
        if (box.size() == 2) return value(a, b);
        if (box.size() == 1) return value(a, 0.0);
        return value(0.0, 0.0);
      },
      actual, coarse);

  double phi = 0.0, s = 0.0;
  if (has_phi && has_second) {
    phi = best[0];
    s = best[1];
  } else if (has_phi) {
    phi = best[0];
  } else if (has_second) {
    s = best[0];
  }
  return {map_tuning(topology, phi, s), val};
}

IdealOptimal ideal_optimal_at_frequency(const PehSystem& sys, double omega) {
  const double d = sys.damping();
  const double k_center = omega * omega * sys.mass() - sys.stiffness();
  const double k_span = 4.0 * sys.stiffness() + std::abs(k_center);
  std::vector<Box> box{{0.0, 8.0 * d}, {k_center - k_span, k_center + k_span}};
  const std::complex<double> zm = sys.mechanical_impedance(omega).value;
  const double force = sys.force_magnitude();
  const double d_p = sys.dielectric_damping();
  auto [best, val] = optimize_box(
      [&](double d_h, double k_e) {
        if (d_h <= 0.0) return 0.0;
        std::complex<double> zl{d_h, -k_e / omega};
        std::complex<double> denom = zm + zl;
        if (!std::isinf(d_p)) denom += zm * zl / d_p;
        const double flow = force / std::abs(denom);
        return 0.5 * d_h * flow * flow;
      },
      box, 65);
  return {best[0], best[1], val};
}

PowerCurve envelope(const PehSystem& sys, Topology topology, bool pv_enabled,
                    std::span<const double> omega_grid, unsigned threads) {
  PowerCurve curve;
  curve.omega.assign(omega_grid.begin(), omega_grid.end());
  curve.p.resize(curve.omega.size());
  curve.tuning.resize(curve.omega.size());
  parallel_for(curve.omega.size(), threads, [&](std::size_t i) {
    const OptimalTuning opt =
        optimal_at_frequency(sys, topology, pv_enabled, curve.omega[i]);
    curve.p[i] = opt.power;
    curve.tuning[i] = opt.tuning;
  });
  return curve;
}

std::pair<double, bool> half_power_span(const PowerCurve& curve,
                                        double threshold) {
  const auto& w = curve.omega;
  const auto& p = curve.p;
  const std::size_t n = w.size();
  double span = 0.0;
  bool clipped = false;
  // accumulate all sub-intervals where p >= threshold (the span may be
  // disconnected for double-peaked curves; the half-power "bandwidth" is the
  // total width above threshold)
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const bool a = p[i] >= threshold, b = p[i + 1] >= threshold;
    if (a && b) {
      span += w[i + 1] - w[i];
    } else if (a != b) {
      const double frac = (threshold - p[i]) / (p[i + 1] - p[i]);
      const double wc = w[i] + frac * (w[i + 1] - w[i]);
      span += a ? (wc - w[i]) : (w[i + 1] - wc);
    }
  }
  if (n > 0 && (p.front() >= threshold || p.back() >= threshold))
    clipped = true;
  return {span, clipped};
}

BandwidthReport bandwidth_metrics(const PowerCurve& curve,
                                  const PowerCurve& seh_baseline) {
  if (curve.omega.size() < 3 || curve.omega.size() != curve.p.size())
    throw std::invalid_argument("bandwidth_metrics: degenerate power curve");
  BandwidthReport rep;
  const auto it = std::max_element(curve.p.begin(), curve.p.end());
  rep.peak_power = *it;
  rep.peak_omega = curve.omega[std::distance(curve.p.begin(), it)];
  if (!(rep.peak_power > 0.0))
    throw std::invalid_argument("bandwidth_metrics: flat power curve");
  std::tie(rep.delta_omega_hm, rep.hm_clipped) =
      half_power_span(curve, 0.5 * rep.peak_power);
  if (!seh_baseline.p.empty()) {
    const double base_peak =
        *std::max_element(seh_baseline.p.begin(), seh_baseline.p.end());
    std::tie(rep.delta_omega_sr, rep.sr_clipped) =
        half_power_span(curve, 0.5 * base_peak);
  }
  return rep;
}

}  // namespace peh
