#include "doctest.h"

#include <cmath>
#include <string>

#include "peh/config.hpp"

using namespace peh;

namespace {
const char* kMinimal = R"({
  "schema_version": 1,
  "system": {"preset": "strong"},
  "topology": "s-sshi",
  "pv_enabled": true
})";
}

TEST_CASE("minimal preset config parses with defaults") {
  const RunConfig cfg = parse_config(kMinimal);
  CHECK(cfg.preset == "strong");
  CHECK(cfg.topology == Topology::SeriesSshi);
  CHECK(cfg.pv_enabled);
  CHECK(cfg.sys().cp() == 22.33e-9);
  CHECK(cfg.omega_grid.size() == 121);
  CHECK(cfg.phi_grid.size() == 13);
  CHECK(cfg.s_grid.size() == 21);
  CHECK(cfg.oracle.steps_per_cycle == 4096);
}

TEST_CASE("unknown keys are rejected with a field path") {
  const char* bad = R"({
    "schema_version": 1,
    "system": {"preset": "strong", "bogus": 1},
    "topology": "seh"
  })";
  auto message_of = [](const char* text) -> std::string {
    try {
      (void)parse_config(text);
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message_of(bad).find("system.bogus") != std::string::npos);
  const char* bad_top = R"({"schema_version": 1, "frobnicate": true})";
  CHECK(message_of(bad_top).find("frobnicate") != std::string::npos);
}

TEST_CASE("schema version is mandatory and pinned") {
  CHECK_THROWS_AS(parse_config(R"({"topology": "seh"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 2})"), ConfigError);
  CHECK_THROWS_AS(parse_config("not json at all"), ConfigError);
}

TEST_CASE("inline system with explicit units") {
  const char* inline_cfg = R"({
    "schema_version": 1,
    "system": {
      "M_kg": 4.2686e-3,
      "K_n_per_m": 507.0,
      "D_ns_per_m": 4.73e-2,
      "alpha_n_per_v": 0.37e-3,
      "Cp_f": 45.7e-9,
      "Rp_ohm": "inf",
      "gamma": -0.6,
      "accel_m_per_s2": 4.9
    },
    "topology": "sece"
  })";
  const RunConfig cfg = parse_config(inline_cfg);
  CHECK(cfg.sys().rp_infinite());
  CHECK(cfg.sys().mass() == 4.2686e-3);
  CHECK(cfg.preset.empty());
}

TEST_CASE("excitation must be specified exactly once") {
  const char* both = R"({
    "schema_version": 1,
    "system": {
      "M_kg": 1e-3, "K_n_per_m": 500, "D_ns_per_m": 0.05,
      "alpha_n_per_v": 1e-3, "Cp_f": 2e-8, "Rp_ohm": 1e6,
      "accel_m_per_s2": 4.9, "force_n": 0.01
    }
  })";
  CHECK_THROWS_AS(parse_config(both), ConfigError);
}

TEST_CASE("grids convert units and validate ranges") {
  const char* cfg_text = R"({
    "schema_version": 1,
    "system": {"preset": "weak"},
    "grids": {
      "freq_hz": {"min": 50, "max": 60, "count": 3},
      "phi_deg": [-45, 0, 45],
      "second": {"min": 0, "max": 1, "count": 5}
    },
    "tuning": {"phi_deg": 30, "second": 0.25}
  })";
  const RunConfig cfg = parse_config(cfg_text);
  REQUIRE(cfg.omega_grid.size() == 3);
  CHECK(cfg.omega_grid[0] ==
        doctest::Approx(2 * 3.14159265358979 * 50).epsilon(1e-12));
  REQUIRE(cfg.phi_grid.size() == 3);
  CHECK(cfg.phi_grid[0] ==
        doctest::Approx(-3.14159265358979 / 4).epsilon(1e-12));
  CHECK(cfg.s_grid.size() == 5);
  CHECK(cfg.phi == doctest::Approx(3.14159265358979 / 6).epsilon(1e-12));
  CHECK(cfg.second == 0.25);

  CHECK_THROWS_AS(parse_config(R"({
    "schema_version": 1,
    "grids": {"freq_hz": {"min": -1, "max": 10, "count": 2}}
  })"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({
    "schema_version": 1,
    "grids": {"phi_deg": [100]}
  })"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({
    "schema_version": 1,
    "grids": {"second": []}
  })"),
                  ConfigError);
}

TEST_CASE("unknown preset and topology fail loudly") {
  CHECK_THROWS_AS(parse_config(R"({
    "schema_version": 1,
    "system": {"preset": "mystery"}
  })"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({
    "schema_version": 1,
    "topology": "sshi"
  })"),
                  ConfigError);
}

TEST_CASE("fixed float formatting uses 9 significant digits") {
  CHECK(format_g9(0.25) == "0.25");
  CHECK(format_g9(1.0 / 3.0) == "0.333333333");
  CHECK(format_g9(1.23456789012e-7) == "1.23456789e-07");
  CHECK(format_g9(-0.0) == "-0");
}
