#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "peh/config.hpp"
#include "peh/ideal.hpp"
#include "peh/impedance.hpp"
#include "peh/oracle.hpp"
#include "peh/power.hpp"
#include "peh/system.hpp"
#include "peh/waveform.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNoConverge = 3;

using peh::format_g9;

std::ofstream open_artifact(const peh::RunConfig& cfg,
                            const std::string& suffix) {
  std::filesystem::create_directories(cfg.out_dir);
  const auto path =
      std::filesystem::path(cfg.out_dir) / (cfg.basename + suffix);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path.string());
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

// analytic steady-state equivalent-current magnitude at a tuning + frequency
double flow_current(const peh::PehSystem& sys, const peh::TuningPoint& tuning,
                    double omega) {
  const auto ze = peh::equivalent_impedance(sys, tuning, omega);
  const std::complex<double> zm = sys.mechanical_impedance(omega).value;
  const double dp = sys.dielectric_damping();
  std::complex<double> zpar = ze.z_mech;
  std::complex<double> split{1.0, 0.0};
  if (!std::isinf(dp)) {
    zpar = ze.z_mech * dp / (ze.z_mech + dp);
    split = dp / (ze.z_mech + dp);
  }
  const std::complex<double> vel = sys.force_magnitude() / (zm + zpar);
  return std::abs(sys.alpha() * vel * split);
}

int run_ideal(const peh::RunConfig& cfg) {
  auto csv = open_artifact(cfg, "_ideal.csv");
  write_row(csv, {"eta", "zeta", "beta_r", "bandwidth"});
  for (double eta : cfg.eta_grid) {
    for (double zeta : cfg.zeta_grid) {
      write_row(csv, {format_g9(eta), format_g9(zeta),
                      format_g9(peh::beta_r(eta)),
                      format_g9(peh::half_power_bandwidth(eta, zeta))});
    }
  }
  return kExitOk;
}

double drive_omega(const peh::RunConfig& cfg, double freq_hz_opt) {
  if (freq_hz_opt > 0.0) return 2.0 * kPi * freq_hz_opt;
  if (cfg.preset == "strong") return peh::strong_preset_drive_frequency();
  if (cfg.preset == "weak") return peh::weak_preset_drive_frequency();
  return cfg.sys().natural_frequency();
}

int run_waveform(const peh::RunConfig& cfg, double freq_hz) {
  const auto& sys = cfg.sys();
  const double omega = drive_omega(cfg, freq_hz);
  const peh::TuningPoint tuning = cfg.tuning();
  const double i_h = flow_current(sys, tuning, omega);
  const double voc = i_h / (omega * sys.cp());
  const auto wave = peh::synthesize_vp(tuning, sys.gamma(), voc);
  const auto vf = peh::fundamental_harmonic(wave);

  auto csv = open_artifact(cfg, "_waveform.csv");
  write_row(csv, {"omega_t_rad", "vp_v", "vp_fund_v", "q_c"});
  const int n = 720;
  for (int i = 0; i <= n; ++i) {
    const double u = tuning.phi + 2.0 * kPi * double(i) / double(n);
    const double vp = wave.value(u);
    const double vpf = vf.real() * std::sin(u) + vf.imag() * std::cos(u);
    const double q = -(i_h / omega) * std::cos(u);
    write_row(csv, {format_g9(u), format_g9(vp), format_g9(vpf),
                    format_g9(q)});
  }
  return kExitOk;
}

int run_region(const peh::RunConfig& cfg, double freq_hz) {
  const auto& sys = cfg.sys();
  const double omega = drive_omega(cfg, freq_hz);
  const auto region =
      peh::attainable_region(sys, cfg.topology, omega, cfg.pv_enabled);

  auto csv = open_artifact(cfg, "_region.csv");
  write_row(csv, {"re_z_norm", "im_z_norm", "phi_deg", "second"});
  for (std::size_t i = 0; i < region.samples.size(); ++i) {
    const auto& t = region.tunings[i];
    write_row(csv, {format_g9(region.samples[i].real()),
                    format_g9(region.samples[i].imag()),
                    format_g9(t.phi * 180.0 / kPi), format_g9(t.second)});
  }

  nlohmann::ordered_json summary;
  summary["schema_version"] = 1;
  summary["topology"] = peh::topology_name(cfg.topology);
  summary["pv_enabled"] = cfg.pv_enabled;
  summary["freq_hz"] = format_g9(omega / (2.0 * kPi));
  summary["kind"] = region.kind == peh::AttainableRegion::Kind::Point
                        ? "point"
                        : region.kind == peh::AttainableRegion::Kind::Curve
                              ? "curve"
                              : "region";
  if (region.circle) {
    summary["circle_center_re"] = format_g9(region.circle->first.real());
    summary["circle_center_im"] = format_g9(region.circle->first.imag());
    summary["circle_radius"] = format_g9(region.circle->second);
  }
  auto js = open_artifact(cfg, "_region.json");
  js << summary.dump(2) << '\n';
  return kExitOk;
}

int run_sweep(const peh::RunConfig& cfg) {
  const auto& sys = cfg.sys();
  const auto map =
      peh::sweep(sys, cfg.topology, cfg.pv_enabled, cfg.omega_grid,
                 cfg.phi_grid, cfg.s_grid, cfg.threads);
  auto csv = open_artifact(cfg, "_sweep.csv");
  write_row(csv, {"omega_hz", "phi_deg", "second_param", "p_h_mw"});
  for (std::size_t iw = 0; iw < map.omega_grid.size(); ++iw) {
    for (std::size_t ip = 0; ip < map.phi_grid.size(); ++ip) {
      for (std::size_t is = 0; is < map.s_grid.size(); ++is) {
        const std::size_t idx = map.index(iw, ip, is);
        write_row(csv,
                  {format_g9(map.omega_grid[iw] / (2.0 * kPi)),
                   format_g9(map.phi_grid[ip] * 180.0 / kPi),
                   format_g9(map.second_actual[idx]),
                   format_g9(map.p_h[idx] * 1e3)});
      }
    }
  }
  return kExitOk;
}

int run_bandwidth(const peh::RunConfig& cfg) {
  const auto& sys = cfg.sys();
  const auto curve = peh::envelope(sys, cfg.topology, cfg.pv_enabled,
                                  cfg.omega_grid, cfg.threads);
  const auto base_curve =
      peh::envelope(sys, peh::Topology::Seh, false, cfg.omega_grid,
                    cfg.threads);
  auto rep = peh::bandwidth_metrics(curve, base_curve);
  if (cfg.pv_enabled && cfg.topology != peh::Topology::Seh) {
    const auto fixed = peh::envelope(sys, cfg.topology, false, cfg.omega_grid,
                                     cfg.threads);
    const auto fixed_rep = peh::bandwidth_metrics(fixed, base_curve);
    if (fixed_rep.delta_omega_hm > 0.0)
      rep.broadening_ratio = rep.delta_omega_hm / fixed_rep.delta_omega_hm;
  }

  auto csv = open_artifact(cfg, "_bandwidth.csv");
  write_row(csv, {"omega_hz", "phi_deg", "second_param", "p_h_mw"});
  for (std::size_t i = 0; i < curve.omega.size(); ++i) {
    write_row(csv, {format_g9(curve.omega[i] / (2.0 * kPi)),
                    format_g9(curve.tuning[i].phi * 180.0 / kPi),
                    format_g9(curve.tuning[i].second),
                    format_g9(curve.p[i] * 1e3)});
  }

  nlohmann::ordered_json summary;
  summary["schema_version"] = 1;
  summary["topology"] = peh::topology_name(cfg.topology);
  summary["pv_enabled"] = cfg.pv_enabled;
  summary["peak_power_w"] = format_g9(rep.peak_power);
  summary["peak_freq_hz"] = format_g9(rep.peak_omega / (2.0 * kPi));
  summary["delta_omega_hm_hz"] = format_g9(rep.delta_omega_hm / (2.0 * kPi));
  summary["delta_omega_sr_hz"] = format_g9(rep.delta_omega_sr / (2.0 * kPi));
  summary["broadening_ratio"] = format_g9(rep.broadening_ratio);
  summary["oracle_discrepancy_pct"] = nullptr;
  summary["hm_clipped"] = rep.hm_clipped;
  summary["sr_clipped"] = rep.sr_clipped;
  auto js = open_artifact(cfg, "_bandwidth.json");
  js << summary.dump(2) << '\n';
  return kExitOk;
}

int run_oracle(const peh::RunConfig& cfg, double freq_hz) {
  const auto& sys = cfg.sys();
  const double omega = drive_omega(cfg, freq_hz);
  const peh::TuningPoint tuning = cfg.tuning();
  const auto trace = peh::simulate(sys, tuning, omega, cfg.oracle);

  auto csv = open_artifact(cfg, "_oracle.csv");
  write_row(csv, {"t_s", "x_m", "xdot_m_per_s", "vp_v", "vr_v"});
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    write_row(csv, {format_g9(trace.t[i]), format_g9(trace.x[i]),
                    format_g9(trace.xdot[i]), format_g9(trace.vp[i]),
                    format_g9(trace.vr)});
  }

  nlohmann::ordered_json summary;
  summary["schema_version"] = 1;
  summary["topology"] = peh::topology_name(cfg.topology);
  summary["freq_hz"] = format_g9(omega / (2.0 * kPi));
  summary["converged"] = trace.converged;
  summary["cycles"] = trace.cycles;
  summary["vr_v"] = format_g9(trace.vr);
  if (trace.converged) {
    const auto p = peh::steady_state_power(trace);
    summary["p_h_w"] = format_g9(p.p_h);
    summary["p_flip_w"] = format_g9(p.p_d_flip);
    summary["p_rp_w"] = format_g9(p.p_rp);
    summary["thd_ih"] = format_g9(p.thd_ih);
  }
  if (!trace.ledger.empty()) {
    const auto& led = trace.ledger.back();
    nlohmann::ordered_json lj;
    lj["input_j"] = format_g9(led.input);
    lj["mech_loss_j"] = format_g9(led.mech_loss);
    lj["dielectric_loss_j"] = format_g9(led.dielectric_loss);
    lj["flip_loss_j"] = format_g9(led.flip_loss);
    lj["harvested_j"] = format_g9(led.harvested);
    lj["stored_delta_j"] = format_g9(led.stored_delta);
    summary["last_cycle"] = lj;
  }
  auto js = open_artifact(cfg, "_oracle.json");
  js << summary.dump(2) << '\n';
  return trace.converged ? kExitOk : kExitNoConverge;
}

int run_compare(const peh::RunConfig& cfg) {
  const auto& sys = cfg.sys();
  const peh::TuningPoint tuning = cfg.tuning();

  auto csv = open_artifact(cfg, "_compare.csv");
  write_row(csv, {"freq_hz", "p_h_analytic_w", "p_h_oracle_w",
                  "discrepancy_pct"});
  double worst = 0.0;
  bool all_converged = true;
  for (double omega : cfg.omega_grid) {
    const double analytic = peh::harvested_power(sys, tuning, omega);
    const auto trace = peh::simulate(sys, tuning, omega, cfg.oracle);
    double oracle_p = std::numeric_limits<double>::quiet_NaN();
    double disc = std::numeric_limits<double>::quiet_NaN();
    if (trace.converged) {
      oracle_p = peh::steady_state_power(trace).p_h;
      const double denom = std::max(std::abs(oracle_p), 1e-300);
      disc = 100.0 * std::abs(analytic - oracle_p) / denom;
      worst = std::max(worst, disc);
    } else {
      all_converged = false;
    }
    write_row(csv, {format_g9(omega / (2.0 * kPi)), format_g9(analytic),
                    format_g9(oracle_p), format_g9(disc)});
  }

  nlohmann::ordered_json summary;
  summary["schema_version"] = 1;
  summary["topology"] = peh::topology_name(cfg.topology);
  summary["oracle_discrepancy_pct"] = format_g9(worst);
  summary["all_converged"] = all_converged;
  auto js = open_artifact(cfg, "_compare.json");
  js << summary.dump(2) << '\n';
  return all_converged ? kExitOk : kExitNoConverge;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Piezoelectric energy-harvester impedance and power toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  double freq_hz = 0.0;

  app.add_option("-c,--config", config_path, "JSON config file")
      ->required();
  app.add_option("-o,--out", out_override, "output directory override");
  app.add_option("-f,--freq-hz", freq_hz,
                 "drive frequency for single-point subcommands");

  auto* c_ideal = app.add_subcommand("ideal", "ideal-model sweep tables");
  auto* c_wave = app.add_subcommand("waveform", "piecewise v_p waveform dump");
  auto* c_region =
      app.add_subcommand("region", "attainable impedance region samples");
  auto* c_sweep = app.add_subcommand("sweep", "harvested-power grid sweep");
  auto* c_bw =
      app.add_subcommand("bandwidth", "per-frequency optimum and bandwidth");
  auto* c_oracle = app.add_subcommand("oracle", "time-domain simulation");
  auto* c_cmp =
      app.add_subcommand("compare", "analytic vs oracle discrepancy table");

  CLI11_PARSE(app, argc, argv);

  try {
    peh::RunConfig cfg = peh::load_config(config_path);
    if (!out_override.empty()) cfg.out_dir = out_override;

    if (c_ideal->parsed()) return run_ideal(cfg);
    if (c_wave->parsed()) return run_waveform(cfg, freq_hz);
    if (c_region->parsed()) return run_region(cfg, freq_hz);
    if (c_sweep->parsed()) return run_sweep(cfg);
    if (c_bw->parsed()) return run_bandwidth(cfg);
    if (c_oracle->parsed()) return run_oracle(cfg, freq_hz);
    if (c_cmp->parsed()) return run_compare(cfg);
  } catch (const peh::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
