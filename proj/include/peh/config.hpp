#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "peh/oracle.hpp"
#include "peh/system.hpp"
#include "peh/waveform.hpp"

namespace peh {

/// Invalid or malformed configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct RunConfig {
  int schema_version = 1;
  std::string preset;  // "strong", "weak" or "" when inline parameters given
  std::optional<PehSystem> system;

  Topology topology = Topology::Seh;
  bool pv_enabled = false;

  // single tuning point, used by waveform / oracle / compare
  double phi = 0.0;     // rad
  double second = 0.5;  // normalized coordinate in [0, 1]

  // grids (already converted to internal units)
  std::vector<double> omega_grid;  // rad/s
  std::vector<double> phi_grid;    // rad
  std::vector<double> s_grid;      // normalized [0, 1]

  // ideal-model sweep grids
  std::vector<double> eta_grid;
  std::vector<double> zeta_grid;
  double omega_tilde = 1.0;

  SimOptions oracle;
  unsigned threads = 0;  // 0 = hardware default

  std::string out_dir = ".";
  std::string basename = "peh";

  const PehSystem& sys() const {
    if (!system) throw ConfigError("config: no system specified");
    return *system;
  }
  TuningPoint tuning() const { return map_tuning(topology, phi, second); }
};

/// Parse a JSON config document; unknown keys are rejected with a
/// field-level message.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Fixed float formatting used by every artifact: 9 significant digits.
std::string format_g9(double v);

}  // namespace peh
