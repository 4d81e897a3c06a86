#include "peh/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace peh {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("config: " + where + ": " + what);
}

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) fail(where + "." + key, "unknown key");
  }
}

double number(const json& obj, const std::string& where,
              const std::string& key) {
  if (!obj.contains(key)) fail(where + "." + key, "missing required number");
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(where + "." + key, "expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& where,
                 const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(where + "." + key, "expected a number");
  return v.get<double>();
}

// a resistance entry may be the string "inf"
double resistance(const json& obj, const std::string& where,
                  const std::string& key) {
  if (!obj.contains(key)) fail(where + "." + key, "missing required value");
  const auto& v = obj.at(key);
  if (v.is_string()) {
    if (v.get<std::string>() == "inf")
      return std::numeric_limits<double>::infinity();
    fail(where + "." + key, "expected a number or \"inf\"");
  }
  if (!v.is_number()) fail(where + "." + key, "expected a number or \"inf\"");
  return v.get<double>();
}

std::vector<double> grid(const json& obj, const std::string& where) {
  if (obj.is_array()) {
    std::vector<double> out;
    for (const auto& v : obj) {
      if (!v.is_number()) fail(where, "grid entries must be numbers");
      out.push_back(v.get<double>());
    }
    if (out.empty()) fail(where, "grid must be non-empty");
    return out;
  }
  require_keys(obj, where, {"min", "max", "count"});
  const double lo = number(obj, where, "min");
  const double hi = number(obj, where, "max");
  if (!obj.contains("count") || !obj.at("count").is_number_integer())
    fail(where + ".count", "expected an integer");
  const long n = obj.at("count").get<long>();
  if (n < 1) fail(where + ".count", "must be >= 1");
  if (n == 1) return {lo};
  if (!(hi > lo)) fail(where, "max must be > min");
  std::vector<double> out(n);
  for (long i = 0; i < n; ++i)
    out[i] = lo + (hi - lo) * double(i) / double(n - 1);
  return out;
}

PehSystem parse_system(const json& obj, std::string& preset_out) {
  const std::string where = "system";
  if (obj.contains("preset")) {
    require_keys(obj, where, {"preset", "Rp_ohm", "accel_m_per_s2"});
    const std::string name = obj.at("preset").get<std::string>();
    PehSystem sys = [&] {
      if (name == "strong") return strong_preset();
      if (name == "weak") return weak_preset();
      fail(where + ".preset", "unknown preset '" + name + "'");
    }();
    preset_out = name;
    if (obj.contains("Rp_ohm"))
      sys = sys.with_rp(resistance(obj, where, "Rp_ohm"));
    if (obj.contains("accel_m_per_s2"))
      sys = sys.with_excitation(Excitation::base_acceleration(
          number(obj, where, "accel_m_per_s2")));
    return sys;
  }
  require_keys(obj, where,
               {"M_kg", "K_n_per_m", "D_ns_per_m", "alpha_n_per_v", "Cp_f",
                "Rp_ohm", "gamma", "accel_m_per_s2", "force_n", "Li_h",
                "Cr_f"});
  const bool has_accel = obj.contains("accel_m_per_s2");
  const bool has_force = obj.contains("force_n");
  if (has_accel == has_force)
    fail(where, "exactly one of accel_m_per_s2 / force_n is required");
  const Excitation exc =
      has_accel
          ? Excitation::base_acceleration(number(obj, where, "accel_m_per_s2"))
          : Excitation::force(number(obj, where, "force_n"));
  try {
    return PehSystem(number(obj, where, "M_kg"),
                     number(obj, where, "K_n_per_m"),
                     number(obj, where, "D_ns_per_m"),
                     number(obj, where, "alpha_n_per_v"),
                     number(obj, where, "Cp_f"),
                     resistance(obj, where, "Rp_ohm"),
                     number_or(obj, where, "gamma", -0.6), exc,
                     number_or(obj, where, "Li_h", 47e-3),
                     number_or(obj, where, "Cr_f", 10e-6));
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
}

Topology parse_topology(const json& v) {
  const std::string s = v.get<std::string>();
  if (s == "seh") return Topology::Seh;
  if (s == "sece") return Topology::Sece;
  if (s == "s-sshi") return Topology::SeriesSshi;
  if (s == "p-sshi") return Topology::ParallelSshi;
  fail("topology", "unknown topology '" + s + "'");
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  require_keys(root, "<root>",
               {"schema_version", "system", "topology", "pv_enabled", "tuning",
                "grids", "ideal", "oracle", "threads", "output"});
  if (!root.contains("schema_version") ||
      !root.at("schema_version").is_number_integer())
    fail("schema_version", "missing required integer");

  RunConfig cfg;
  cfg.schema_version = root.at("schema_version").get<int>();
  if (cfg.schema_version != 1)
    fail("schema_version", "unsupported version (expected 1)");

  if (root.contains("system"))
    cfg.system = parse_system(root.at("system"), cfg.preset);

  if (root.contains("topology"))
    cfg.topology = parse_topology(root.at("topology"));
  if (root.contains("pv_enabled")) {
    if (!root.at("pv_enabled").is_boolean())
      fail("pv_enabled", "expected a boolean");
    cfg.pv_enabled = root.at("pv_enabled").get<bool>();
  }

  if (root.contains("tuning")) {
    const auto& t = root.at("tuning");
    require_keys(t, "tuning", {"phi_deg", "second"});
    cfg.phi = number_or(t, "tuning", "phi_deg", 0.0) * kPi / 180.0;
    cfg.second = number_or(t, "tuning", "second", 0.5);
    if (cfg.second < 0.0 || cfg.second > 1.0)
      fail("tuning.second", "must lie in [0, 1]");
  }

  // default grids are anchored on the natural frequency when a system exists
  double fn_hz = 0.0;
  if (cfg.system)
    fn_hz = cfg.system->natural_frequency() / (2.0 * kPi);
  if (root.contains("grids")) {
    const auto& g = root.at("grids");
    require_keys(g, "grids", {"freq_hz", "phi_deg", "second"});
    if (g.contains("freq_hz")) {
      for (double f : grid(g.at("freq_hz"), "grids.freq_hz")) {
        if (!(f > 0.0)) fail("grids.freq_hz", "frequencies must be > 0");
        cfg.omega_grid.push_back(2.0 * kPi * f);
      }
    }
    if (g.contains("phi_deg")) {
      for (double d : grid(g.at("phi_deg"), "grids.phi_deg")) {
        if (d < -90.0 || d > 90.0)
          fail("grids.phi_deg", "phi must lie in [-90, 90] degrees");
        cfg.phi_grid.push_back(d * kPi / 180.0);
      }
    }
    if (g.contains("second")) {
      for (double s : grid(g.at("second"), "grids.second")) {
        if (s < 0.0 || s > 1.0)
          fail("grids.second", "entries must lie in [0, 1]");
        cfg.s_grid.push_back(s);
      }
    }
  }
  if (cfg.omega_grid.empty() && fn_hz > 0.0) {
    for (int i = 0; i < 121; ++i)
      cfg.omega_grid.push_back(2.0 * kPi * fn_hz *
                               (0.8 + 0.5 * double(i) / 120.0));
  }
  if (cfg.phi_grid.empty()) {
    for (int i = 0; i < 13; ++i)
      cfg.phi_grid.push_back((-90.0 + 15.0 * i) * kPi / 180.0);
  }
  if (cfg.s_grid.empty()) {
    for (int i = 0; i < 21; ++i) cfg.s_grid.push_back(double(i) / 20.0);
  }

  if (root.contains("ideal")) {
    const auto& id = root.at("ideal");
    require_keys(id, "ideal", {"eta", "zeta", "omega_tilde"});
    if (id.contains("eta")) cfg.eta_grid = grid(id.at("eta"), "ideal.eta");
    if (id.contains("zeta")) cfg.zeta_grid = grid(id.at("zeta"), "ideal.zeta");
    cfg.omega_tilde = number_or(id, "ideal", "omega_tilde", 1.0);
  }
  if (cfg.eta_grid.empty()) {
    for (int i = 0; i <= 50; ++i) cfg.eta_grid.push_back(0.1 * i);
  }
  if (cfg.zeta_grid.empty()) cfg.zeta_grid = {0.01, 0.02, 0.05};

  if (root.contains("oracle")) {
    const auto& o = root.at("oracle");
    require_keys(o, "oracle",
                 {"steps_per_cycle", "max_cycles", "power_tol", "diode_drop_v",
                  "record_full_trace", "averaging_cycles"});
    auto uint_or = [&](const char* key, std::size_t fallback) -> std::size_t {
      if (!o.contains(key)) return fallback;
      if (!o.at(key).is_number_integer() || o.at(key).get<long>() < 1)
        fail(std::string("oracle.") + key, "expected a positive integer");
      return o.at(key).get<std::size_t>();
    };
    cfg.oracle.steps_per_cycle = uint_or("steps_per_cycle", 4096);
    cfg.oracle.max_cycles = uint_or("max_cycles", 400);
    cfg.oracle.averaging_cycles = uint_or("averaging_cycles", 10);
    cfg.oracle.power_tol = number_or(o, "oracle", "power_tol", 1e-3);
    cfg.oracle.diode_drop = number_or(o, "oracle", "diode_drop_v", 0.0);
    if (o.contains("record_full_trace")) {
      if (!o.at("record_full_trace").is_boolean())
        fail("oracle.record_full_trace", "expected a boolean");
      cfg.oracle.record_full_trace = o.at("record_full_trace").get<bool>();
    }
  }

  if (root.contains("threads")) {
    if (!root.at("threads").is_number_integer() ||
        root.at("threads").get<long>() < 0)
      fail("threads", "expected a non-negative integer");
    cfg.threads = root.at("threads").get<unsigned>();
  }

  if (root.contains("output")) {
    const auto& out = root.at("output");
    require_keys(out, "output", {"dir", "basename"});
    if (out.contains("dir")) cfg.out_dir = out.at("dir").get<std::string>();
    if (out.contains("basename"))
      cfg.basename = out.at("basename").get<std::string>();
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_g9(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace peh
