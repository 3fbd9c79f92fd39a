#pragma once

// Scenario files.
//
// Plain text, one `key = value` per line, `#` starts a comment. Top-level keys
// (before the first section) are `name` and `seed`. Sections:
//
//   [lattice]          n_t n_x dt dx boundary
//   [system]           mass, state = vacuum | coherent FUNCTION SCALE
//   [region NAME]      rect = {t0, t1, x0, x1}        (repeat for unions)
//   [function NAME]    term = gaussian_bump {t0, x0, sigma_t, sigma_x, amplitude, BOX}
//                      term = point {t, x, amplitude}  (terms add)
//   [probe NAME]       mass, strength, shape = FUNCTION,
//                      preparation = vacuum | ultralocal SLICE NU
//   [effect NAME]      probe = PROBE, g = FUNCTION, theta   or  kind = unit | half
//   [green] [sorkin] [scatter] [measure] [causal] [verify]   task blocks
//
// BOX is a region name or an inline {t0, t1, x0, x1}. Names resolve against
// sections anywhere in the file.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qftm/instruments.hpp"
#include "qftm/sorkin.hpp"

namespace qftm {

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct ConfigSection {
  std::string kind;
  std::string name;
  int line = 0;
  std::vector<ConfigEntry> entries;

  const ConfigEntry* find(const std::string& key) const;
  std::vector<const ConfigEntry*> all(const std::string& key) const;
};

struct RawConfig {
  std::vector<ConfigEntry> top;
  std::vector<ConfigSection> sections;
};

/// Syntax only. Throws ConfigError with the line number.
RawConfig parse_config_text(const std::string& text);

struct EffectSpec {
  std::string name;
  std::string probe;
  std::string function;  // empty for unit / half
  std::string kind = "cosine";
  double theta = 0.0;
};

struct GreenTask {
  std::vector<std::string> functions;
  bool dump = false;
};

struct SorkinTask {
  SorkinConfig layout;
  bool search = false;
  double search_sigma_t = 1.5;
  double search_sigma_x = 5.0;
  double min_gap = 1e-3;
  bool dump = false;
};

struct ScatterTask {
  std::vector<std::string> probes;
  int samples = 12;
  bool dump = false;
};

struct MeasureTask {
  std::vector<std::string> probes;   // past to future
  std::vector<std::string> effects;  // one per probe
  std::string observable;            // system test function
  std::vector<std::string> regions;  // O1 O2 O3, optional
};

struct CausalExpectation {
  std::string relation;  // spacelike | precedes | convex | not_convex
  std::vector<std::string> regions;
  int line = 0;
};

struct CausalTask {
  std::vector<std::string> regions;
  std::vector<CausalExpectation> expect;
};

struct VerifyTask {
  std::vector<std::string> suites;  // empty: all
  int commutator_pairs = 50;
  int green_functions = 20;
  int locality_points = 12;
  int induced_samples = 20;
  int induced_states = 10;
  int update_scenarios = 20;
  int swap_scenarios = 10;
  int impossible_geometries = 20;
  int unsharpness_samples = 50;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  FieldParams system;
  std::string state_kind = "vacuum";
  std::string state_function;
  double state_scale = 0.0;

  std::vector<std::string> region_order, function_order, probe_order, effect_order;
  std::map<std::string, Region> regions;
  std::map<std::string, TestFunction> functions;
  std::map<std::string, ProbeSpec> probes;
  std::map<std::string, EffectSpec> effects;

  std::optional<GreenTask> green;
  std::optional<SorkinTask> sorkin;
  std::optional<ScatterTask> scatter;
  std::optional<MeasureTask> measure;
  std::optional<CausalTask> causal;
  std::optional<VerifyTask> verify;

  /// The configured system state.
  StateFunctional system_state() const;
  Effect effect(const std::string& name) const;
};

/// Resolves names, builds regions and test functions, re-checks causal
/// preconditions. Throws ConfigError naming the line and field.
ScenarioConfig build_scenario(const RawConfig& raw);
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);

}  // namespace qftm
