#include "qftm/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "qftm/errors.hpp"

namespace qftm {

namespace {

const std::set<std::string> kNamed{"region", "function", "probe", "effect"};
const std::set<std::string> kPlain{"lattice", "system", "green", "sorkin", "scatter", "measure", "causal", "verify"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Whitespace tokens with braces and commas treated as separators.
std::vector<std::string> tokens(const std::string& s) {
  std::string t = s;
  for (char& c : t)
    if (c == '{' || c == '}' || c == ',') c = ' ';
  std::istringstream in(t);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

double to_double(const std::string& s, const ConfigEntry& e) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ConfigError(e.line, fmt::format("field '{}': expected a number, got '{}'", e.key, s));
  return v;
}

long long to_int(const std::string& s, const ConfigEntry& e) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ConfigError(e.line, fmt::format("field '{}': expected an integer, got '{}'", e.key, s));
  return v;
}

bool to_bool(const ConfigEntry& e) {
  if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
  if (e.value == "false" || e.value == "no" || e.value == "0") return false;
  throw ConfigError(e.line, fmt::format("field '{}': expected true or false, got '{}'", e.key, e.value));
}

void check_keys(const ConfigSection& s, std::initializer_list<const char*> allowed) {
  for (const auto& e : s.entries) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return e.key == k; }))
      throw ConfigError(e.line, fmt::format("unknown field '{}' in [{}{}{}]", e.key, s.kind, s.name.empty() ? "" : " ",
                                            s.name));
  }
}

const ConfigEntry& require(const ConfigSection& s, const std::string& key) {
  const ConfigEntry* e = s.find(key);
  if (!e) throw ConfigError(s.line, fmt::format("[{} {}] is missing field '{}'", s.kind, s.name, key));
  return *e;
}

Region rect_from(const std::vector<std::string>& t, std::size_t at, const LatticeSpec& spec, const ConfigEntry& e) {
  if (t.size() < at + 4) throw ConfigError(e.line, fmt::format("field '{}': a rectangle needs t0 t1 x0 x1", e.key));
  const int t0 = static_cast<int>(to_int(t[at], e)), t1 = static_cast<int>(to_int(t[at + 1], e));
  const int x0 = static_cast<int>(to_int(t[at + 2], e)), x1 = static_cast<int>(to_int(t[at + 3], e));
  if (t1 < t0) throw ConfigError(e.line, fmt::format("field '{}': t1 = {} < t0 = {}", e.key, t1, t0));
  if (x1 < x0) throw ConfigError(e.line, fmt::format("field '{}': x1 = {} < x0 = {}", e.key, x1, x0));
  try {
    return Region::rectangle(spec, t0, t1, x0, x1);
  } catch (const DomainError& err) {
    throw ConfigError(e.line, fmt::format("field '{}': {}", e.key, err.what()));
  }
}

std::vector<std::string> name_list(const ConfigEntry& e, const std::map<std::string, int>& known, const char* what) {
  std::vector<std::string> out = tokens(e.value);
  for (const auto& n : out)
    if (!known.count(n)) throw ConfigError(e.line, fmt::format("field '{}': unknown {} '{}'", e.key, what, n));
  return out;
}

template <class T>
std::map<std::string, int> keys_of(const std::map<std::string, T>& m) {
  std::map<std::string, int> out;
  for (const auto& [k, v] : m) out[k] = 1;
  return out;
}

}  // namespace

const ConfigEntry* ConfigSection::find(const std::string& key) const {
  const ConfigEntry* found = nullptr;
  for (const auto& e : entries)
    if (e.key == key) found = &e;
  return found;
}

std::vector<const ConfigEntry*> ConfigSection::all(const std::string& key) const {
  std::vector<const ConfigEntry*> out;
  for (const auto& e : entries)
    if (e.key == key) out.push_back(&e);
  return out;
}

RawConfig parse_config_text(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(n, "section header without closing ']'");
      const auto words = tokens(line.substr(1, line.size() - 2));
      if (words.empty()) throw ConfigError(n, "empty section header");
      ConfigSection s{words[0], words.size() > 1 ? words[1] : "", n, {}};
      if (kNamed.count(s.kind)) {
        if (words.size() != 2) throw ConfigError(n, fmt::format("[{}] needs exactly one name", s.kind));
      } else if (kPlain.count(s.kind)) {
        if (words.size() != 1) throw ConfigError(n, fmt::format("[{}] takes no name", s.kind));
      } else {
        throw ConfigError(n, fmt::format("unknown section [{}]", s.kind));
      }
      const std::string key = s.kind + " " + s.name;
      if (!seen.insert(key).second) throw ConfigError(n, fmt::format("duplicate section [{}]", trim(key)));
      raw.sections.push_back(std::move(s));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(n, fmt::format("expected 'key = value', got '{}'", line));
    ConfigEntry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), n};
    if (e.key.empty()) throw ConfigError(n, "empty key");
    if (e.value.empty()) throw ConfigError(n, fmt::format("field '{}' has no value", e.key));
    if (raw.sections.empty())
      raw.top.push_back(std::move(e));
    else
      raw.sections.back().entries.push_back(std::move(e));
  }
  return raw;
}

StateFunctional ScenarioConfig::system_state() const {
  QuasiFreeState s = vacuum_state(system);
  if (state_kind == "coherent") {
    const Eigen::VectorXd v = s.space.generator(functions.at(state_function));
    s = displaced(std::move(s), s.space.omega() * v * state_scale);
  }
  return StateFunctional(s);
}

Effect ScenarioConfig::effect(const std::string& name) const {
  const EffectSpec& e = effects.at(name);
  const ProbeSpec& p = probes.at(e.probe);
  const PhaseSpace space = p.preparation.space;
  if (e.kind == "unit") return Effect::unit(space);
  if (e.kind == "half") return Effect::half(space);
  return Effect::cosine(space, space.generator(functions.at(e.function)), e.theta);
}

ScenarioConfig build_scenario(const RawConfig& raw) {
  ScenarioConfig cfg;
  for (const auto& e : raw.top) {
    if (e.key == "name")
      cfg.name = e.value;
    else if (e.key == "seed")
      cfg.seed = static_cast<std::uint64_t>(to_int(e.value, e));
    else
      throw ConfigError(e.line, fmt::format("unknown top-level field '{}'", e.key));
  }

  auto section = [&](const std::string& kind) -> const ConfigSection* {
    for (const auto& s : raw.sections)
      if (s.kind == kind) return &s;
    return nullptr;
  };

  LatticeSpec& spec = cfg.system.spec;
  if (const ConfigSection* s = section("lattice")) {
    check_keys(*s, {"n_t", "n_x", "dt", "dx", "boundary"});
    for (const auto& e : s->entries) {
      if (e.key == "n_t") spec.n_t = static_cast<int>(to_int(e.value, e));
      if (e.key == "n_x") spec.n_x = static_cast<int>(to_int(e.value, e));
      if (e.key == "dt") spec.dt = to_double(e.value, e);
      if (e.key == "dx") spec.dx = to_double(e.value, e);
      if (e.key == "boundary") {
        try {
          spec.boundary = boundary_from_string(e.value);
        } catch (const std::exception& err) {
          throw ConfigError(e.line, err.what());
        }
      }
    }
    try {
      spec.validate();
    } catch (const std::exception& err) {
      throw ConfigError(s->line, fmt::format("[lattice]: {}", err.what()));
    }
  }

  const ConfigEntry* state_entry = nullptr;
  if (const ConfigSection* s = section("system")) {
    check_keys(*s, {"mass", "state"});
    if (const ConfigEntry* e = s->find("mass")) cfg.system.mass = to_double(e->value, *e);
    state_entry = s->find("state");
    try {
      cfg.system.validate();
    } catch (const std::exception& err) {
      throw ConfigError(s->line, fmt::format("[system]: {}", err.what()));
    }
  }

  for (const auto& s : raw.sections) {
    if (s.kind != "region") continue;
    check_keys(s, {"rect"});
    const auto rects = s.all("rect");
    if (rects.empty()) throw ConfigError(s.line, fmt::format("region '{}' has no rect", s.name));
    Region r(spec);
    for (const ConfigEntry* e : rects) {
      const auto t = tokens(e->value);
      if (t.size() != 4) throw ConfigError(e->line, "field 'rect': expected {t0, t1, x0, x1}");
      r = r | rect_from(t, 0, spec, *e);
    }
    cfg.regions.emplace(s.name, r);
    cfg.region_order.push_back(s.name);
  }

  for (const auto& s : raw.sections) {
    if (s.kind != "function") continue;
    check_keys(s, {"term"});
    const auto terms = s.all("term");
    if (terms.empty()) throw ConfigError(s.line, fmt::format("function '{}' has no term", s.name));
    TestFunction f(spec);
    for (const ConfigEntry* e : terms) {
      const auto t = tokens(e->value);
      if (t.empty()) throw ConfigError(e->line, "empty term");
      if (t[0] == "point") {
        if (t.size() != 4) throw ConfigError(e->line, "field 'term': point takes {t, x, amplitude}");
        const int tt = static_cast<int>(to_int(t[1], *e)), xx = static_cast<int>(to_int(t[2], *e));
        try {
          f = f + TestFunction::point(spec, tt, xx, to_double(t[3], *e));
        } catch (const DomainError& err) {
          throw ConfigError(e->line, err.what());
        }
      } else if (t[0] == "gaussian_bump") {
        if (t.size() != 7 && t.size() != 10)
          throw ConfigError(e->line,
                            "field 'term': gaussian_bump takes {t0, x0, sigma_t, sigma_x, amplitude, BOX} with BOX a "
                            "region name or t0 t1 x0 x1");
        Region box(spec);
        if (t.size() == 7) {
          const auto it = cfg.regions.find(t[6]);
          if (it == cfg.regions.end()) throw ConfigError(e->line, fmt::format("unknown region '{}'", t[6]));
          box = it->second;
        } else {
          box = rect_from(t, 6, spec, *e);
        }
        const double st = to_double(t[3], *e), sx = to_double(t[4], *e);
        if (st <= 0 || sx <= 0) throw ConfigError(e->line, "gaussian_bump widths must be positive");
        f = f + TestFunction::gaussian_bump(box, to_double(t[1], *e), to_double(t[2], *e), st, sx, to_double(t[5], *e));
      } else {
        throw ConfigError(e->line, fmt::format("unknown test function literal '{}'", t[0]));
      }
    }
    cfg.functions.emplace(s.name, f);
    cfg.function_order.push_back(s.name);
  }
  const auto known_functions = keys_of(cfg.functions);
  const auto known_regions = keys_of(cfg.regions);
  auto function_ref = [&](const ConfigEntry& e) -> const TestFunction& {
    const auto it = cfg.functions.find(e.value);
    if (it == cfg.functions.end()) throw ConfigError(e.line, fmt::format("field '{}': unknown function '{}'", e.key, e.value));
    return it->second;
  };
  auto region_ref = [&](const ConfigEntry& e) -> const Region& {
    const auto it = cfg.regions.find(e.value);
    if (it == cfg.regions.end()) throw ConfigError(e.line, fmt::format("field '{}': unknown region '{}'", e.key, e.value));
    return it->second;
  };

  if (state_entry) {
    const auto t = tokens(state_entry->value);
    if (t.size() == 1 && t[0] == "vacuum") {
      cfg.state_kind = "vacuum";
    } else if (t.size() == 3 && t[0] == "coherent") {
      if (!cfg.functions.count(t[1])) throw ConfigError(state_entry->line, fmt::format("unknown function '{}'", t[1]));
      cfg.state_kind = "coherent";
      cfg.state_function = t[1];
      cfg.state_scale = to_double(t[2], *state_entry);
    } else {
      throw ConfigError(state_entry->line, "field 'state': expected 'vacuum' or 'coherent FUNCTION SCALE'");
    }
  }

  for (const auto& s : raw.sections) {
    if (s.kind != "probe") continue;
    check_keys(s, {"mass", "strength", "shape", "preparation"});
    FieldParams p = cfg.system;
    if (const ConfigEntry* e = s.find("mass")) p.mass = to_double(e->value, *e);
    const ConfigEntry& se = require(s, "strength");
    const double strength = to_double(se.value, se);
    const ConfigEntry& shape = require(s, "shape");
    CouplingProfile coupling{strength, function_ref(shape)};
    try {
      p.validate();
      coupling.validate();
    } catch (const std::exception& err) {
      throw ConfigError(shape.line, fmt::format("probe '{}': {}", s.name, err.what()));
    }
    QuasiFreeState prep = vacuum_state(p, s.name);
    if (const ConfigEntry* e = s.find("preparation")) {
      const auto t = tokens(e->value);
      if (t.size() == 3 && t[0] == "ultralocal") {
        const int slice = static_cast<int>(to_int(t[1], *e));
        const double nu = to_double(t[2], *e);
        try {
          prep = ultralocal_state(p, slice, nu, s.name);
        } catch (const std::exception& err) {
          throw ConfigError(e->line, err.what());
        }
      } else if (!(t.size() == 1 && t[0] == "vacuum")) {
        throw ConfigError(e->line, "field 'preparation': expected 'vacuum' or 'ultralocal SLICE NU'");
      }
    }
    cfg.probes.emplace(s.name, ProbeSpec{s.name, p, std::move(prep), std::move(coupling)});
    cfg.probe_order.push_back(s.name);
  }
  const auto known_probes = keys_of(cfg.probes);

  for (const auto& s : raw.sections) {
    if (s.kind != "effect") continue;
    check_keys(s, {"probe", "g", "theta", "kind"});
    EffectSpec e;
    e.name = s.name;
    const ConfigEntry& pe = require(s, "probe");
    if (!cfg.probes.count(pe.value)) throw ConfigError(pe.line, fmt::format("unknown probe '{}'", pe.value));
    e.probe = pe.value;
    if (const ConfigEntry* k = s.find("kind")) {
      if (k->value != "cosine" && k->value != "unit" && k->value != "half")
        throw ConfigError(k->line, "field 'kind': expected cosine, unit or half");
      e.kind = k->value;
    }
    if (e.kind == "cosine") {
      const ConfigEntry& g = require(s, "g");
      function_ref(g);
      e.function = g.value;
      if (const ConfigEntry* th = s.find("theta")) e.theta = to_double(th->value, *th);
    }
    cfg.effects.emplace(s.name, e);
    cfg.effect_order.push_back(s.name);
  }
  const auto known_effects = keys_of(cfg.effects);

  if (const ConfigSection* s = section("green")) {
    check_keys(*s, {"functions", "dump"});
    GreenTask g;
    g.functions = name_list(require(*s, "functions"), known_functions, "function");
    if (const ConfigEntry* e = s->find("dump")) g.dump = to_bool(*e);
    cfg.green = g;
  }

  if (const ConfigSection* s = section("sorkin")) {
    check_keys(*s, {"o1", "o2", "o3", "f", "g", "h", "search", "search_sigma_t", "search_sigma_x", "min_gap", "dump"});
    SorkinTask t{SorkinConfig{cfg.system, region_ref(require(*s, "o1")), region_ref(require(*s, "o2")),
                              region_ref(require(*s, "o3")), function_ref(require(*s, "f")),
                              function_ref(require(*s, "g")), function_ref(require(*s, "h")), std::nullopt}};
    if (const ConfigEntry* e = s->find("search")) t.search = to_bool(*e);
    if (const ConfigEntry* e = s->find("search_sigma_t")) t.search_sigma_t = to_double(e->value, *e);
    if (const ConfigEntry* e = s->find("search_sigma_x")) t.search_sigma_x = to_double(e->value, *e);
    if (const ConfigEntry* e = s->find("min_gap")) t.min_gap = to_double(e->value, *e);
    if (const ConfigEntry* e = s->find("dump")) t.dump = to_bool(*e);
    try {
      validate(t.layout);
    } catch (const GeometryError& err) {
      throw ConfigError(s->line, fmt::format("[sorkin]: {}", err.what()));
    }
    cfg.sorkin = std::move(t);
  }

  if (const ConfigSection* s = section("scatter")) {
    check_keys(*s, {"probes", "samples", "dump"});
    ScatterTask t;
    t.probes = name_list(require(*s, "probes"), known_probes, "probe");
    if (const ConfigEntry* e = s->find("samples")) t.samples = static_cast<int>(to_int(e->value, *e));
    if (const ConfigEntry* e = s->find("dump")) t.dump = to_bool(*e);
    cfg.scatter = t;
  }

  if (const ConfigSection* s = section("measure")) {
    check_keys(*s, {"probes", "effects", "observable", "regions"});
    MeasureTask t;
    const ConfigEntry& pe = require(*s, "probes");
    t.probes = name_list(pe, known_probes, "probe");
    const ConfigEntry& ee = require(*s, "effects");
    t.effects = name_list(ee, known_effects, "effect");
    if (t.effects.size() != t.probes.size())
      throw ConfigError(ee.line, fmt::format("{} effects for {} probes", t.effects.size(), t.probes.size()));
    for (std::size_t j = 0; j < t.probes.size(); ++j)
      if (cfg.effects.at(t.effects[j]).probe != t.probes[j])
        throw ConfigError(ee.line, fmt::format("effect '{}' belongs to probe '{}', listed against '{}'", t.effects[j],
                                               cfg.effects.at(t.effects[j]).probe, t.probes[j]));
    for (std::size_t j = 1; j < t.probes.size(); ++j) {
      const CouplingZone a = cfg.probes.at(t.probes[j - 1]).coupling.zone();
      const CouplingZone b = cfg.probes.at(t.probes[j]).coupling.zone();
      if (!precedes(a, b))
        throw ConfigError(pe.line,
                          fmt::format("causal order violated: K({}) precedes K({})", t.probes[j - 1], t.probes[j]));
    }
    const ConfigEntry& oe = require(*s, "observable");
    function_ref(oe);
    t.observable = oe.value;
    if (const ConfigEntry* e = s->find("regions")) {
      t.regions = name_list(*e, known_regions, "region");
      if (t.regions.size() != 3) throw ConfigError(e->line, "field 'regions': expected O1 O2 O3");
      if (t.probes.size() != 2) throw ConfigError(e->line, "field 'regions' needs exactly two probes (Alice, Bob)");
    }
    cfg.measure = t;
  }

  if (const ConfigSection* s = section("causal")) {
    check_keys(*s, {"regions", "expect"});
    CausalTask t;
    t.regions = name_list(require(*s, "regions"), known_regions, "region");
    for (const ConfigEntry* e : s->all("expect")) {
      auto w = tokens(e->value);
      if (w.empty()) throw ConfigError(e->line, "empty expectation");
      CausalExpectation x{w[0], std::vector<std::string>(w.begin() + 1, w.end()), e->line};
      const bool pair = x.relation == "spacelike" || x.relation == "precedes";
      const bool single = x.relation == "convex" || x.relation == "not_convex";
      if (!pair && !single) throw ConfigError(e->line, fmt::format("unknown causal relation '{}'", x.relation));
      if (x.regions.size() != (pair ? 2u : 1u))
        throw ConfigError(e->line, fmt::format("'{}' takes {} region(s)", x.relation, pair ? 2 : 1));
      for (const auto& n : x.regions)
        if (!cfg.regions.count(n)) throw ConfigError(e->line, fmt::format("unknown region '{}'", n));
      t.expect.push_back(std::move(x));
    }
    cfg.causal = t;
  }

  if (const ConfigSection* s = section("verify")) {
    check_keys(*s, {"suites", "commutator_pairs", "green_functions", "locality_points", "induced_samples",
                    "induced_states", "update_scenarios", "swap_scenarios", "impossible_geometries",
                    "unsharpness_samples"});
    VerifyTask t;
    for (const auto& e : s->entries) {
      if (e.key == "suites") {
        t.suites = tokens(e.value);
        continue;
      }
      const int v = static_cast<int>(to_int(e.value, e));
      if (v < 1) throw ConfigError(e.line, fmt::format("field '{}' must be positive", e.key));
      if (e.key == "commutator_pairs") t.commutator_pairs = v;
      if (e.key == "green_functions") t.green_functions = v;
      if (e.key == "locality_points") t.locality_points = v;
      if (e.key == "induced_samples") t.induced_samples = v;
      if (e.key == "induced_states") t.induced_states = v;
      if (e.key == "update_scenarios") t.update_scenarios = v;
      if (e.key == "swap_scenarios") t.swap_scenarios = v;
      if (e.key == "impossible_geometries") t.impossible_geometries = v;
      if (e.key == "unsharpness_samples") t.unsharpness_samples = v;
    }
    cfg.verify = t;
  }
  return cfg;
}

ScenarioConfig parse_scenario(const std::string& text) { return build_scenario(parse_config_text(text)); }

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, fmt::format("cannot read config '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

}  // namespace qftm
