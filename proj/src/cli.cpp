#include "qftm/cli.hpp"

#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <random>

#include "json.hpp"
#include "qftm/errors.hpp"
#include "qftm/suites.hpp"

namespace qftm {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct Output {
  fs::path dir;
  std::string sub;
  std::vector<std::string> files;

  void write(const std::string& name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", (dir / name).string()));
    out << text;
    files.push_back(name);
  }
};

std::string grid_csv(const Grid& u) {
  std::string out;
  for (int t = 0; t < u.rows(); ++t) {
    for (int x = 0; x < u.cols(); ++x) out += fmt::format("{}{:.17g}", x ? "," : "", u(t, x));
    out += '\n';
  }
  return out;
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) out += fmt::format("{}{:.17g}", j ? "," : "", m(i, j));
    out += '\n';
  }
  return out;
}

ordered_json rows_json(const std::vector<CheckRow>& rows) {
  ordered_json a = ordered_json::array();
  for (const auto& r : rows)
    a.push_back({{"scenario", r.scenario},
                 {"quantity", r.quantity},
                 {"value", r.value},
                 {"relation", r.relation},
                 {"tolerance", r.tolerance},
                 {"pass", r.pass}});
  return a;
}

Report green_task(const ScenarioConfig& cfg, Output& out, double scale) {
  GreenTask task = cfg.green ? *cfg.green : GreenTask{cfg.function_order, false};
  if (task.functions.empty()) throw ConfigError(0, "green: no functions declared");
  const FieldParams& p = cfg.system;
  Report r(scale);
  for (const auto& name : task.functions) {
    const TestFunction& f = cfg.functions.at(name);
    const Solution ret = retarded(f, p);
    const Solution adv = advanced(f, p);
    r.at_most(name, "retarded residual", klein_gordon_residual(ret.values, f, p), 1e-10);
    r.at_most(name, "advanced residual", klein_gordon_residual(adv.values, f, p), 1e-10);
    const double outside = static_cast<double>((grid_support(ret.values, p.spec) - causal_future(f.support())).size() +
                                               (grid_support(adv.values, p.spec) - causal_past(f.support())).size());
    r.equals(name, "solution points outside the cone", outside, 0.0);
    if (task.dump) {
      out.write(fmt::format("green_{}_retarded.csv", name), grid_csv(ret.values));
      out.write(fmt::format("green_{}_advanced.csv", name), grid_csv(adv.values));
    }
  }
  std::string table = "f,g,E(f;g),spacelike\n";
  for (std::size_t i = 0; i < task.functions.size(); ++i) {
    for (std::size_t j = 0; j < task.functions.size(); ++j) {
      const TestFunction& f = cfg.functions.at(task.functions[i]);
      const TestFunction& g = cfg.functions.at(task.functions[j]);
      const double e = commutator_form(f, g, p);
      const bool spacelike = g.support().subset_of(causal_complement(f.support()));
      table += fmt::format("{},{},{:.17g},{}\n", task.functions[i], task.functions[j], e, spacelike ? 1 : 0);
      const std::string pair = task.functions[i] + " " + task.functions[j];
      if (spacelike) r.at_most(pair, "|E(f;g)| spacelike", std::abs(e), 1e-12);
      if (i < j) r.at_most(pair, "|E(f;g) + E(g;f)|", std::abs(e + commutator_form(g, f, p)), 1e-10);
    }
  }
  out.write("green.csv", table);
  return r;
}

Report sorkin_task(const ScenarioConfig& cfg, Output& out, double scale) {
  SorkinTask task = cfg.sorkin ? *cfg.sorkin : SorkinTask{default_sorkin_layout(cfg.system)};
  SorkinConfig& layout = task.layout;
  if (task.search) {
    layout.g = find_signaling_g(layout.f, layout.h, layout.o2, layout.params, task.search_sigma_t, task.search_sigma_x);
    validate(layout);
  }
  layout.state = cfg.system_state();
  const FieldParams& p = layout.params;
  const CharlieExpectations c = charlie_expectations(layout);
  out.write("sorkin.csv", fmt::format("e_fg,e_gh,mean_b,mean_ba,gap,gap_weyl_route\n{:.17g},{:.17g},{:.17g},{:.17g},"
                                      "{:.17g},{:.17g}\n",
                                      c.e_fg, c.e_gh, c.mean_b, c.mean_ba, c.gap, c.gap_weyl_route));
  const Grid ret_f = retarded(layout.f, p).values;
  const Grid adv_h = advanced(layout.h, p).values;
  if (task.dump) {
    out.write("sorkin_retarded_f.csv", grid_csv(ret_f));
    out.write("sorkin_advanced_h.csv", grid_csv(adv_h));
  }
  const Grid adv_f = advanced(layout.f, p).values;
  const Grid ret_h = retarded(layout.h, p).values;
  const double efg = -layout.g.values().cwiseProduct(adv_f - ret_f).sum() * p.spec.dvol();
  const double egh = layout.g.values().cwiseProduct(adv_h - ret_h).sum() * p.spec.dvol();
  Report r(scale);
  r.at_most("sorkin", "|gap - 2 E(g;h) E(f;g)| against Green oracle", std::abs(c.gap - 2.0 * egh * efg), 1e-10);
  r.at_most("sorkin", "|gap - Weyl route|", std::abs(c.gap - c.gap_weyl_route), 1e-10);
  r.at_least("sorkin", "|gap|", std::abs(c.gap), task.min_gap);
  return r;
}

Report scatter_task(const ScenarioConfig& cfg, Output& out, double scale, std::uint64_t seed) {
  if (!cfg.scatter) throw ConfigError(0, "scatter: the config has no [scatter] block");
  const ScatterTask& task = *cfg.scatter;
  std::vector<ProbeSpec> probes;
  Region zone(cfg.system.spec);
  for (const auto& n : task.probes) {
    probes.push_back(cfg.probes.at(n));
    zone = zone | probes.back().coupling.shape.support();
  }
  const ScatteringMap m = scattering_map(cfg.system, probes);
  Report r(scale);
  r.at_most("scatter", "symplecticity defect", m.symplecticity_defect(), 1e-8);
  r.at_most("scatter", "inverse defect", m.inverse_defect(), 1e-9);

  std::mt19937_64 rng(seed);
  const LatticeSpec& spec = cfg.system.spec;
  const auto pts = (causal_complement(zone) & Region::rectangle(spec, 2, spec.n_t - 3, 0, spec.n_x - 1)).points();
  if (pts.empty()) throw GeometryError("scatter: K-perp has no interior points");
  std::string table = "t,x,sector,|Sv - v|,|Tv - v|\n";
  double loc = 0.0;
  for (int k = 0; k < task.samples; ++k) {
    const LatticePoint q = pts[std::uniform_int_distribution<std::size_t>(0, pts.size() - 1)(rng)];
    for (int sector = 0; sector < m.space().sector_count(); ++sector) {
      const Eigen::VectorXd v = m.space().generator(TestFunction::point(spec, q.t, q.x, 1.0), sector);
      const double ds = (m.S() * v - v).cwiseAbs().maxCoeff();
      const double dt = (m.T() * v - v).cwiseAbs().maxCoeff();
      table += fmt::format("{},{},{},{:.17g},{:.17g}\n", q.t, q.x, sector, ds, dt);
      loc = std::max({loc, ds, dt});
    }
  }
  out.write("scatter_locality.csv", table);
  r.at_most("scatter", "max locality defect on K-perp point data", loc, 1e-9);
  if (task.dump) out.write("scatter_S.csv", matrix_csv(m.S()));

  for (auto& p : probes) p.coupling.strength = 0.0;
  const ScatteringMap off = scattering_map(cfg.system, probes);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(off.space().dim(), off.space().dim());
  r.at_most("scatter zero coupling", "max |S - I|", (off.S() - id).cwiseAbs().maxCoeff(), 1e-12);
  return r;
}

Report measure_task(const ScenarioConfig& cfg, Output& out, double scale) {
  if (!cfg.measure) throw ConfigError(0, "measure: the config has no [measure] block");
  const MeasureTask& task = *cfg.measure;
  const FieldParams& sys = cfg.system;
  const StateFunctional omega = cfg.system_state();
  const PhaseSpace space = omega.space();
  const Eigen::VectorXd gh = space.generator(cfg.functions.at(task.observable));
  const AlgebraElement wh = AlgebraElement::weyl(space, gh);

  std::vector<PreInstrument> pis;
  std::vector<Effect> effects;
  for (std::size_t j = 0; j < task.probes.size(); ++j) {
    pis.push_back(make_pre_instrument(sys, {cfg.probes.at(task.probes[j])}));
    effects.push_back(cfg.effect(task.effects[j]));
  }
  Report r(scale);
  std::string table = "step,probe,effect,conditional_probability,joint_probability,mean_phi_h,weyl_h_re,weyl_h_im\n";
  table += fmt::format("0,,,1,1,{:.17g},{:.17g},{:.17g}\n", field_moment(omega, {gh}).real(), omega.evaluate(wh).real(),
                       omega.evaluate(wh).imag());
  StateFunctional state = omega;
  double joint = 1.0;
  for (std::size_t j = 0; j < pis.size(); ++j) {
    const double p = apply_pre_instrument(pis[j], effects[j], state).norm().real();
    r.at_least(task.probes[j], "outcome probability", p, -1e-12);
    r.at_most(task.probes[j], "outcome probability - 1", p - 1.0, 1e-12);
    r.at_most(task.probes[j], "POVM additivity defect",
              povm_decomposition_check(pis[j], binary_povm(effects[j]), state, {gh}), 1e-10);
    state = selective_update(state, effects[j], pis[j]);
    joint *= p;
    const Complex w = state.evaluate(wh);
    table += fmt::format("{},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", j + 1, task.probes[j], task.effects[j], p,
                         joint, field_moment(state, {gh}).real(), w.real(), w.imag());
  }
  out.write("measure.csv", table);

  for (std::size_t j = 1; j < pis.size(); ++j) {
    const CompositeProbes c = compose_probes(pis[j - 1], pis[j]);
    const StateFunctional seq = apply_pre_instrument(pis[j], effects[j], apply_pre_instrument(pis[j - 1], effects[j - 1], omega));
    const StateFunctional comb = apply_pre_instrument(c.combined, tensor(effects[j - 1], effects[j]), omega);
    const double d = std::max(std::abs(seq.norm() - comb.norm()), std::abs(seq.characteristic(gh) - comb.characteristic(gh)));
    r.at_most(task.probes[j - 1] + " then " + task.probes[j], "composition defect", d, 1e-9);
  }

  if (!task.regions.empty()) {
    const ImpossibleMeasurementReport rep =
        impossible_measurement_test(pis[0], pis[1], cfg.functions.at(task.observable), cfg.regions.at(task.regions[0]),
                                    cfg.regions.at(task.regions[1]), cfg.regions.at(task.regions[2]), omega);
    out.write("measure_impossible.csv",
              fmt::format("with_alice_phi,without_alice_phi,with_alice_weyl_re,without_alice_weyl_re,gap,"
                          "unitary_kick_gap\n{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                          rep.with_alice_field.real(), rep.without_alice_field.real(), rep.with_alice_weyl.real(),
                          rep.without_alice_weyl.real(), rep.gap, rep.sorkin_gap));
    r.at_most("impossible measurement", "gap with and without Alice", rep.gap, 1e-8);
    r.at_least("impossible measurement", "|unitary-kick gap| on the same geometry", std::abs(rep.sorkin_gap), 1e-3);
  }
  return r;
}

Report causal_task(const ScenarioConfig& cfg, Output& out, double scale) {
  CausalTask task = cfg.causal ? *cfg.causal : CausalTask{cfg.region_order, {}};
  if (task.regions.empty()) throw ConfigError(0, "causal: no regions declared");
  std::string table = "a,b,spacelike,a_precedes_b\n";
  std::vector<Region> regions;
  for (const auto& a : task.regions) {
    regions.push_back(cfg.regions.at(a));
    for (const auto& b : task.regions) {
      if (a == b) continue;
      const Region& ra = cfg.regions.at(a);
      const Region& rb = cfg.regions.at(b);
      table += fmt::format("{},{},{},{}\n", a, b, rb.subset_of(causal_complement(ra)) ? 1 : 0,
                           precedes(CouplingZone(ra), CouplingZone(rb)) ? 1 : 0);
    }
  }
  out.write("causal_pairs.csv", table);
  std::string single = "region,points,causally_convex,hull_points\n";
  for (const auto& a : task.regions) {
    const Region& ra = cfg.regions.at(a);
    single += fmt::format("{},{},{},{}\n", a, ra.size(), is_causally_convex(ra) ? 1 : 0, causal_hull(ra).size());
  }
  out.write("causal_regions.csv", single);

  if (!cfg.probe_order.empty()) {
    std::vector<CouplingZone> zones;
    for (const auto& n : cfg.probe_order) zones.push_back(cfg.probes.at(n).coupling.zone());
    std::string orders = "order\n";
    for (const auto& o : enumerate_causal_orders(zones)) {
      std::string line;
      for (std::size_t k = 0; k < o.size(); ++k) line += (k ? " " : "") + cfg.probe_order[o[k]];
      orders += line + "\n";
    }
    out.write("causal_orders.csv", orders);
  }

  Report r(scale);
  r.equals("regions", "cones free of wrap-around", wraparound_free(regions) ? 1.0 : 0.0, 1.0);
  for (const auto& e : task.expect) {
    const Region& a = cfg.regions.at(e.regions[0]);
    double v = 0.0;
    std::string what = e.relation + " " + e.regions[0];
    if (e.relation == "spacelike") {
      v = cfg.regions.at(e.regions[1]).subset_of(causal_complement(a)) ? 1.0 : 0.0;
      what += " " + e.regions[1];
    } else if (e.relation == "precedes") {
      v = precedes(CouplingZone(a), CouplingZone(cfg.regions.at(e.regions[1]))) ? 1.0 : 0.0;
      what += " " + e.regions[1];
    } else if (e.relation == "convex") {
      v = is_causally_convex(a) ? 1.0 : 0.0;
    } else {
      v = is_causally_convex(a) ? 0.0 : 1.0;
    }
    r.equals(fmt::format("expect (line {})", e.line), what, v, 1.0);
  }
  return r;
}

}  // namespace

int run(const std::string& config_path, const std::string& subcommand, const std::string& out_dir,
        const RunOptions& options, std::ostream& log) {
  static const std::vector<std::string> subs{"green", "sorkin", "scatter", "measure", "causal", "verify"};
  Output out{out_dir, subcommand, {}};
  ordered_json summary;
  summary["subcommand"] = subcommand;
  summary["config"] = config_path;
  summary["tolerance_scale"] = options.tolerance_scale;

  int code = 0;
  try {
    fs::create_directories(out.dir);
  } catch (const std::exception& e) {
    log << "error: cannot create output directory " << out_dir << ": " << e.what() << "\n";
    return 2;
  }
  try {
    if (std::find(subs.begin(), subs.end(), subcommand) == subs.end())
      throw ConfigError(0, fmt::format("unknown subcommand '{}'", subcommand));
    const ScenarioConfig cfg = load_scenario(config_path);
    const std::uint64_t seed = options.seed.value_or(cfg.seed);
    summary["scenario"] = cfg.name;
    summary["seed"] = seed;

    std::vector<CheckRow> rows;
    if (subcommand == "verify") {
      const VerifyTask task = cfg.verify.value_or(VerifyTask{});
      const auto results = run_verify(cfg, task, SuiteOptions{seed, options.tolerance_scale, options.parallel});
      ordered_json suites = ordered_json::array();
      for (const auto& s : results) {
        for (CheckRow row : s.report.rows()) {
          row.scenario = s.name + ": " + row.scenario;
          rows.push_back(row);
        }
        suites.push_back({{"name", s.name}, {"pass", s.report.passed()}, {"checks", s.report.rows().size()}});
        log << fmt::format("{:<12} {}\n", s.name, s.report.passed() ? "pass" : "FAIL");
      }
      summary["suites"] = suites;
    } else {
      Report r(options.tolerance_scale);
      if (subcommand == "green") r = green_task(cfg, out, options.tolerance_scale);
      if (subcommand == "sorkin") r = sorkin_task(cfg, out, options.tolerance_scale);
      if (subcommand == "scatter") r = scatter_task(cfg, out, options.tolerance_scale, seed);
      if (subcommand == "measure") r = measure_task(cfg, out, options.tolerance_scale);
      if (subcommand == "causal") r = causal_task(cfg, out, options.tolerance_scale);
      rows = r.rows();
    }
    out.write(subcommand + "_checks.csv", rows_csv(rows));
    const auto failed = std::count_if(rows.begin(), rows.end(), [](const CheckRow& r) { return !r.pass; });
    for (const auto& row : rows)
      if (!row.pass)
        log << fmt::format("FAIL {} / {}: {:.6g} {} {:.3g}\n", row.scenario, row.quantity, row.value, row.relation,
                           row.tolerance);
    summary["status"] = failed ? "fail" : "pass";
    summary["checks"] = rows.size();
    summary["failed"] = failed;
    summary["rows"] = rows_json(rows);
    code = failed ? 1 : 0;
  } catch (const ConfigError& e) {
    summary["status"] = "error";
    summary["error"] = fmt::format("config error: {}", e.what());
    code = 2;
  } catch (const GeometryError& e) {
    summary["status"] = "error";
    summary["error"] = fmt::format("geometry error: {}", e.what());
    code = 2;
  } catch (const std::exception& e) {
    summary["status"] = "error";
    summary["error"] = e.what();
    code = 2;
  }
  if (code == 2) log << "error: " << summary["error"].get<std::string>() << "\n";
  summary["files"] = out.files;
  try {
    out.write(subcommand + "_summary.json", summary.dump(2) + "\n");
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }
  log << fmt::format("{}: {} ({})\n", subcommand, summary["status"].get<std::string>(), (out.dir / (subcommand + "_summary.json")).string());
  return code;
}

}  // namespace qftm
