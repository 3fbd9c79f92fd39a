#include "qftm/suites.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <future>
#include <random>

#include "qftm/errors.hpp"
#include "qftm/sampling.hpp"

namespace qftm {

void Report::at_most(const std::string& scenario, const std::string& quantity, double value, double tolerance) {
  const double tol = tolerance * scale_;
  rows_.push_back({scenario, quantity, value, "<=", tol, value <= tol});
}

void Report::at_least(const std::string& scenario, const std::string& quantity, double value, double bound) {
  rows_.push_back({scenario, quantity, value, ">=", bound, value >= bound});
}

void Report::equals(const std::string& scenario, const std::string& quantity, double value, double expected) {
  rows_.push_back({scenario, quantity, value, "==", expected, value == expected});
}

void Report::append(const Report& other) { rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end()); }

bool Report::passed() const {
  return std::all_of(rows_.begin(), rows_.end(), [](const CheckRow& r) { return r.pass; });
}

std::string rows_csv(const std::vector<CheckRow>& rows) {
  const auto clean = [](std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    return s;
  };
  std::string out = "scenario,quantity,value,relation,tolerance,pass\n";
  for (const auto& r : rows)
    out += fmt::format("{},{},{:.17g},{},{:.17g},{}\n", clean(r.scenario), clean(r.quantity), r.value, r.relation,
                       r.tolerance, r.pass ? "pass" : "fail");
  return out;
}

namespace {

using sampling::uniform;
using sampling::uniform_int;
using Rng = std::mt19937_64;

Region interior(const LatticeSpec& spec) { return Region::rectangle(spec, 2, spec.n_t - 3, 0, spec.n_x - 1); }

/// Random rectangle of the given size inside `allowed`, by rejection. Throws if none is found.
Region box_inside(Rng& rng, const Region& allowed, int h, int w, int tries = 2000) {
  const LatticeSpec& spec = allowed.spec();
  for (int k = 0; k < tries; ++k) {
    const int t0 = uniform_int(rng, 2, spec.n_t - 2 - h);
    const int x0 = uniform_int(rng, 0, spec.n_x - w);
    const Region r = Region::rectangle(spec, t0, t0 + h - 1, x0, x0 + w - 1);
    if (r.subset_of(allowed)) return r;
  }
  throw GeometryError(fmt::format("no {} x {} box fits inside the allowed region", h, w));
}

ProbeSpec random_probe(Rng& rng, const std::string& label, const FieldParams& sys, const Region& zone) {
  FieldParams p = sys;
  p.mass = uniform(rng, 0.8, 1.6);
  return sampling::vacuum_probe(label, p, zone, uniform(rng, 0.3, 0.8));
}

Effect random_effect(Rng& rng, const PhaseSpace& space, const Region& box, int sector = 0) {
  return Effect::cosine(space, sampling::random_generator(rng, space, box, sector, 2.0), uniform(rng, 0.0, 2 * M_PI));
}

double max_char_defect(const StateFunctional& a, const StateFunctional& b, const std::vector<Eigen::VectorXd>& points) {
  double d = std::abs(a.norm() - b.norm());
  for (const auto& f : points) d = std::max(d, std::abs(a.characteristic(f) - b.characteristic(f)));
  return d;
}

std::vector<Eigen::VectorXd> sample_points(Rng& rng, const PhaseSpace& space, int n) {
  std::vector<Eigen::VectorXd> out;
  for (int j = 0; j < n; ++j) out.push_back(sampling::random_generator(rng, space, interior(space.sector(0).params.spec), 0, 2.0));
  return out;
}

void require_size(const LatticeSpec& spec) {
  if (spec.n_t < 48 || spec.n_x < 48) throw DomainError("the verify suites need at least a 48 x 48 lattice");
}

// --- suites -------------------------------------------------------------------

Report commutator_suite(Rng& rng, const ScenarioConfig& cfg, const VerifyTask& task, double scale) {
  Report r(scale);
  const FieldParams& p = cfg.system;
  const LatticeSpec& spec = p.spec;
  double worst = 0.0;
  int pairs = 0;
  for (int i = 0; i < task.commutator_pairs; ++i) {
    const TestFunction f = sampling::random_patch(rng, spec, 2, spec.n_t - 3);
    const Region perp = causal_complement(f.support()) & interior(spec);
    const Region box = box_inside(rng, perp, uniform_int(rng, 1, 4), uniform_int(rng, 1, 4));
    Grid v = Grid::Zero(spec.n_t, spec.n_x);
    for (const auto& q : box.points()) v(q.t, q.x) = uniform(rng, -1.0, 1.0);
    const TestFunction g(spec, std::move(v));
    worst = std::max(worst, std::abs(commutator_form(f, g, p)));
    ++pairs;
  }
  r.at_most("causally disjoint pairs", "max |E(f;g)|", worst, 1e-12);
  r.at_least("causally disjoint pairs", "pairs", pairs, task.commutator_pairs);

  double anti = 0.0;
  for (int i = 0; i < task.commutator_pairs; ++i) {
    const TestFunction f = sampling::random_patch(rng, spec, 2, spec.n_t - 3);
    const TestFunction g = sampling::random_patch(rng, spec, 2, spec.n_t - 3);
    anti = std::max(anti, std::abs(commutator_form(f, g, p) + commutator_form(g, f, p)));
  }
  r.at_most("random pairs", "max |E(f;g) + E(g;f)|", anti, 1e-10);
  return r;
}

Report green_suite(Rng& rng, const ScenarioConfig& cfg, const VerifyTask& task, double scale) {
  Report r(scale);
  const FieldParams& p = cfg.system;
  const LatticeSpec& spec = p.spec;
  double res_ret = 0.0, res_adv = 0.0;
  double outside = 0.0;
  for (int i = 0; i < task.green_functions; ++i) {
    const TestFunction f = sampling::random_patch(rng, spec, 2, spec.n_t - 3, 5);
    const Solution ret = retarded(f, p);
    const Solution adv = advanced(f, p);
    res_ret = std::max(res_ret, klein_gordon_residual(ret.values, f, p));
    res_adv = std::max(res_adv, klein_gordon_residual(adv.values, f, p));
    outside += static_cast<double>((grid_support(ret.values, spec) - causal_future(f.support())).size());
    outside += static_cast<double>((grid_support(adv.values, spec) - causal_past(f.support())).size());
  }
  r.at_most("random sources", "max retarded residual", res_ret, 1e-10);
  r.at_most("random sources", "max advanced residual", res_adv, 1e-10);
  r.equals("random sources", "solution points outside the cone", outside, 0.0);
  r.at_least("random sources", "sources", task.green_functions, task.green_functions);
  return r;
}

Report sorkin_suite(Rng& rng, const ScenarioConfig& cfg, const VerifyTask&, double scale) {
  Report r(scale);
  SorkinConfig layout = cfg.sorkin ? cfg.sorkin->layout : default_sorkin_layout(cfg.system);
  const double min_gap = cfg.sorkin ? cfg.sorkin->min_gap : 1e-3;
  const FieldParams& p = layout.params;
  const CharlieExpectations c = charlie_expectations(layout);

  const Grid eg = advanced(layout.g, p).values - retarded(layout.g, p).values;
  const Grid eh = advanced(layout.h, p).values - retarded(layout.h, p).values;
  const double efg = layout.f.values().cwiseProduct(eg).sum() * p.spec.dvol();
  const double egh = layout.g.values().cwiseProduct(eh).sum() * p.spec.dvol();
  const std::string s = "sorkin layout";
  r.at_most(s, "|gap - 2 E(g;h) E(f;g)| against Green oracle", std::abs(c.gap - 2.0 * egh * efg), 1e-10);
  r.at_most(s, "|gap - Weyl route|", std::abs(c.gap - c.gap_weyl_route), 1e-10);
  r.at_most(s, "|mean_BA - mean_B - gap|", std::abs(c.mean_ba - c.mean_b - c.gap), 1e-10);
  r.at_least(s, "|gap|", std::abs(c.gap), min_gap);

  layout.state = StateFunctional(sampling::random_state(rng, p, interior(p.spec)));
  const CharlieExpectations other = charlie_expectations(layout);
  r.at_most(s, "|gap(random state) - gap(vacuum)|", std::abs(other.gap_weyl_route - c.gap), 1e-10);
  return r;
}

Region centre_zone(const LatticeSpec& spec) {
  const int t = spec.n_t / 2, x = spec.n_x / 2;
  return Region::rectangle(spec, t - 3, t + 3, x - 3, x + 3);
}

Report scattering_suite(Rng& rng, const ScenarioConfig& cfg, const VerifyTask& task, double scale) {
  Report r(scale);
  const FieldParams& sys = cfg.system;
  const Region zone = centre_zone(sys.spec);
  ProbeSpec probe = random_probe(rng, "probe", sys, zone);
  const ScatteringMap m = scattering_map(sys, {probe});
  const std::string s = "centre probe";
  r.at_most(s, "symplecticity defect", m.symplecticity_defect(), 1e-8);
  r.at_most(s, "inverse defect", m.inverse_defect(), 1e-9);

  const Region perp = causal_complement(zone) & interior(sys.spec);
  const auto pts = perp.points();
  double loc = 0.0;
  int count = 0;
  for (int k = 0; k < task.locality_points; ++k) {
    const LatticePoint q = pts[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(pts.size()) - 1))];
    for (int sector : {0, 1}) {
      const Eigen::VectorXd v = m.space().generator(TestFunction::point(sys.spec, q.t, q.x, 1.0), sector);
      loc = std::max({loc, (m.S() * v - v).cwiseAbs().maxCoeff(), (m.T() * v - v).cwiseAbs().maxCoeff()});
      ++count;
    }
  }
  r.at_most(s, "max |S v - v| for K-perp point data", loc, 1e-9);
  r.at_least(s, "K-perp basis vectors", count, 2 * task.locality_points);

  probe.coupling.strength = 0.0;
  const ScatteringMap off = scattering_map(sys, {probe});
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(off.space().dim(), off.space().dim());
  r.at_most("zero coupling", "max |S - I|", (off.S() - id).cwiseAbs().maxCoeff(), 1e-12);
  return r;
}

Report induced_suite(Rng& rng, const ScenarioConfig& cfg, const VerifyTask& task, double scale) {
  Report r(scale);
  const FieldParams& sys = cfg.system;
  const Region zone = centre_zone(sys.spec);
  const PreInstrument pi = make_pre_instrument(sys, {random_probe(rng, "probe", sys, zone)});
  const PhaseSpace prb = pi.probe_space();
  const PhaseSpace space = pi.system_space();
  const Region perp = causal_complement(zone) & interior(sys.spec);

  double away = 0.0;
  for (int k = 0; k < task.induced_states; ++k) {
    const Region box = box_inside(rng, perp, 3, 3);
    const AlgebraElement b = random_effect(rng, prb, box).element();
    const Complex sb = StateFunctional(pi.sigma).evaluate(b);
    const AlgebraElement eps = induced_observable(pi.sigma, pi.map, b);
    const StateFunctional omega(sampling::random_state(rng, sys, interior(sys.spec)));
    away = std::max({away, eps.distance(AlgebraElement::unit(space, sb)), std::abs(omega.evaluate(eps) - sb)});
  }
  r.at_most("probe effect in K-perp", "max |eps(B) - sigma(B) 1|", away, 1e-10);
  r.at_least("probe effect in K-perp", "states", task.induced_states, task.induced_states);

  double route = 0.0;
  for (int k = 0; k < task.induced_samples; ++k) {
    const StateFunctional omega(sampling::random_state(rng, sys, interior(sys.spec)));
    const Eigen::VectorXd g = sampling::random_generator(rng, prb, interior(sys.spec), 0, 2.0);
    const Complex one = omega.evaluate(induced_observable(pi.sigma, pi.map, AlgebraElement::weyl(prb, g)));
    Eigen::VectorXd joint = Eigen::VectorXd::Zero(pi.map.space().dim());
    joint.tail(prb.dim()) = g;
    const Complex two = tensor(omega, StateFunctional(pi.sigma)).characteristic(pi.map.T() * joint);
    route = std::max(route, std::abs(one - two));
  }
  r.at_most("random (omega; g)", "max two-route expectation defect", route, 1e-10);
  r.at_least("random (omega; g)", "samples", task.induced_samples, task.induced_samples);
  return r;
}

/// Coupling zones ordered in time: a band of slices per zone.
std::vector<Region> ordered_zones(Rng& rng, const LatticeSpec& spec, int n) {
  std::vector<Region> out;
  const int band = (spec.n_t - 8) / n;
  for (int j = 0; j < n; ++j) {
    const int h = uniform_int(rng, 3, std::min(5, band - 2));
    const int t0 = 4 + j * band + uniform_int(rng, 0, band - h - 1);
    const int w = uniform_int(rng, 3, 6);
    const int x0 = uniform_int(rng, spec.n_x / 4, 3 * spec.n_x / 4 - w);
    out.push_back(Region::rectangle(spec, t0, t0 + h - 1, x0, x0 + w - 1));
  }
  return out;
}

Report updates_suite(Rng& rng, const ScenarioConfig& cfg, const VerifyTask& task, double scale) {
  Report r(scale);
  const FieldParams& sys = cfg.system;
  const LatticeSpec& spec = sys.spec;
  double compose = 0.0, successive = 0.0, povm = 0.0, invisible = 0.0;
  double p_min = 1.0, p_max = 0.0;
  for (int k = 0; k < task.update_scenarios; ++k) {
    const auto zones = ordered_zones(rng, spec, 2);
    const PreInstrument pi1 = make_pre_instrument(sys, {random_probe(rng, "p1", sys, zones[0])});
    const PreInstrument pi2 = make_pre_instrument(sys, {random_probe(rng, "p2", sys, zones[1])});
    const CompositeProbes c = compose_probes(pi1, pi2);
    const StateFunctional omega(sampling::random_state(rng, sys, interior(spec)));
    const Effect b1 = random_effect(rng, pi1.probe_space(), zones[0]);
    const Effect b2 = random_effect(rng, pi2.probe_space(), zones[1]);
    const auto points = sample_points(rng, omega.space(), 3);

    const StateFunctional seq = apply_pre_instrument(pi2, b2, apply_pre_instrument(pi1, b1, omega));
    const StateFunctional joint = apply_pre_instrument(c.combined, tensor(b1, b2), omega);
    compose = std::max(compose, max_char_defect(seq, joint, points));
    p_min = std::min(p_min, joint.norm().real());
    p_max = std::max(p_max, joint.norm().real());

    const StateFunctional s12 = selective_update(selective_update(omega, b1, pi1), b2, pi2);
    const StateFunctional sj = selective_update(omega, tensor(b1, b2), c.combined);
    successive = std::max(successive, max_char_defect(s12, sj, points));

    const Effect e2 = random_effect(rng, pi1.probe_space(), zones[0]);
    const POVM four{{{"a", Effect::convex({{0.5, b1}})},
                     {"b", Effect::convex({{0.5, e2}})},
                     {"c", Effect::convex({{0.5, b1.complement()}})},
                     {"d", Effect::convex({{0.5, e2.complement()}})}}};
    povm = std::max({povm, povm_decomposition_check(pi1, binary_povm(b1), omega, points),
                     povm_decomposition_check(pi1, four, omega, points)});

    const Region perp = causal_complement(zones[0]) & interior(spec);
    const StateFunctional ns = nonselective_update(omega, pi1);
    for (int j = 0; j < 3; ++j) {
      const Eigen::VectorXd a = sampling::random_generator(rng, omega.space(), box_inside(rng, perp, 3, 3), 0, 2.0);
      invisible = std::max(invisible, std::abs(ns.characteristic(a) - omega.characteristic(a)));
    }
  }
  const std::string s = "random ordered two-probe scenarios";
  r.at_most(s, "instrument composition defect", compose, 1e-9);
  r.at_most(s, "successive selective update defect", successive, 1e-9);
  r.at_most(s, "POVM additivity defect", povm, 1e-10);
  r.at_most(s, "nonselective update seen from K-perp", invisible, 1e-10);
  r.at_least(s, "min joint outcome probability", p_min, -1e-12);
  r.at_most(s, "max joint outcome probability - 1", p_max - 1.0, 1e-12);
  r.at_least(s, "scenarios", task.update_scenarios, task.update_scenarios);

  double swap = 0.0;
  for (int k = 0; k < task.swap_scenarios; ++k) {
    const int t0 = uniform_int(rng, spec.n_t / 3, spec.n_t / 2);
    const int x1 = uniform_int(rng, 0, spec.n_x - 6);
    const Region z1 = Region::rectangle(spec, t0, t0 + 3, x1, x1 + 4);
    const Region z2 = box_inside(rng, causal_complement(z1) & Region::rectangle(spec, t0 - 2, t0 + 5, 0, spec.n_x - 1), 4, 5);
    const PreInstrument pi1 = make_pre_instrument(sys, {random_probe(rng, "p1", sys, z1)});
    const PreInstrument pi2 = make_pre_instrument(sys, {random_probe(rng, "p2", sys, z2)});
    compose_probes(pi1, pi2);
    compose_probes(pi2, pi1);
    const StateFunctional omega(sampling::random_state(rng, sys, interior(spec)));
    const Effect b1 = random_effect(rng, pi1.probe_space(), z1);
    const Effect b2 = random_effect(rng, pi2.probe_space(), z2);
    const auto points = sample_points(rng, omega.space(), 3);
    const StateFunctional a = apply_pre_instrument(pi2, b2, apply_pre_instrument(pi1, b1, omega));
    const StateFunctional b = apply_pre_instrument(pi1, b1, apply_pre_instrument(pi2, b2, omega));
    swap = std::max(swap, max_char_defect(a, b, points));
  }
  r.at_most("spacelike zones", "order swap defect", swap, 1e-9);

  // Four time-ordered probes: conditional expectations and the chain.
  const auto zones = ordered_zones(rng, spec, 4);
  std::vector<ProbeSpec> probes;
  std::vector<PreInstrument> single;
  std::vector<Effect> effects;
  for (int j = 0; j < 4; ++j) {
    probes.push_back(random_probe(rng, fmt::format("p{}", j + 1), sys, zones[j]));
    single.push_back(make_pre_instrument(sys, {probes.back()}));
    effects.push_back(random_effect(rng, single.back().probe_space(), zones[j]));
  }
  const StateFunctional omega(sampling::random_state(rng, sys, interior(spec)));
  double conditional = 0.0;
  StateFunctional nested = omega;
  Effect joint_b = effects[0];
  for (int n = 1; n <= 3; ++n) {
    nested = selective_update(nested, effects[n - 1], single[n - 1]);
    if (n > 1) joint_b = tensor(joint_b, effects[n - 1]);
    const PreInstrument all = make_pre_instrument(sys, std::vector<ProbeSpec>(probes.begin(), probes.begin() + n + 1));
    const double num = apply_pre_instrument(all, tensor(joint_b, effects[n]), omega).norm().real();
    const double den =
        apply_pre_instrument(all, tensor(joint_b, Effect::unit(single[n].probe_space())), omega).norm().real();
    const double nested_value = apply_pre_instrument(single[n], effects[n], nested).norm().real();
    conditional = std::max(conditional, std::abs(num / den - nested_value));
  }
  r.at_most("four ordered probes", "max conditional expectation defect for N <= 3", conditional, 1e-9);

  // Chain p1 < p2 < p3 with p2 nonselective: p1's statistics ignore p3.
  ProbeSpec off3 = probes[2];
  off3.coupling.strength = 0.0;
  const PreInstrument chain = make_pre_instrument(sys, {probes[0], probes[1], probes[2]});
  const PreInstrument chain_off = make_pre_instrument(sys, {probes[0], probes[1], off3});
  const Effect b_first = tensor(tensor(effects[0], Effect::unit(single[1].probe_space())),
                                Effect::unit(single[2].probe_space()));
  const double on = apply_pre_instrument(chain, b_first, omega).norm().real();
  const double offv = apply_pre_instrument(chain_off, b_first, omega).norm().real();
  r.at_most("three-probe chain", "|P(B1) with - without the future probe|", std::abs(on - offv), 1e-8);
  return r;
}

Report impossible_suite(Rng& rng, const ScenarioConfig& cfg, const VerifyTask& task, double scale) {
  Report r(scale);
  const FieldParams& sys = cfg.system;
  const LatticeSpec& spec = sys.spec;
  double worst = 0.0;
  double weakest = std::numeric_limits<double>::infinity();
  int accepted = 0, attempts = 0;
  const int max_attempts = 500 * task.impossible_geometries;
  while (accepted < task.impossible_geometries && attempts < max_attempts) {
    ++attempts;
    const int a0 = uniform_int(rng, 3, 6), a1 = a0 + uniform_int(rng, 3, 5);
    const int ax = uniform_int(rng, 0, spec.n_x - 8), aw = uniform_int(rng, 4, 7);
    const int b0 = a1 + uniform_int(rng, 2, 5), b1 = b0 + uniform_int(rng, 5, 8);
    const int bw = uniform_int(rng, 12, std::min(30, spec.n_x - 2));
    const int bx = uniform_int(rng, 0, spec.n_x - bw);
    const int c0 = b1 + uniform_int(rng, 2, 5), c1 = c0 + uniform_int(rng, 3, 5);
    const int cw = uniform_int(rng, 4, 6), cx = uniform_int(rng, 0, spec.n_x - cw);
    if (c1 > spec.n_t - 3) continue;
    const Region o1 = Region::rectangle(spec, a0, a1, ax, ax + aw - 1);
    const Region o2 = Region::rectangle(spec, b0, b1, bx, bx + bw - 1);
    const Region o3 = Region::rectangle(spec, c0, c1, cx, cx + cw - 1);
    if (!o3.subset_of(causal_complement(o1))) continue;
    if (!wraparound_free(std::vector<Region>{o1, o2, o3})) continue;

    const TestFunction rho1 = TestFunction::gaussian_bump(o1, 0.5 * (a0 + a1), ax + 0.5 * (aw - 1), 1.5, 1.5, 1.0);
    const TestFunction h = TestFunction::gaussian_bump(o3, 0.5 * (c0 + c1), cx + 0.5 * (cw - 1), 1.5, 1.5, 1.0);
    const TestFunction rho2 = TestFunction::gaussian_bump(o2, uniform(rng, b0, b1), uniform(rng, bx, bx + bw - 1), 1.5,
                                                          uniform(rng, 2.0, 6.0), 1.0);
    const double sorkin_gap = 2.0 * commutator_form(rho2, h, sys) * commutator_form(rho1, rho2, sys);
    if (std::abs(sorkin_gap) <= 1e-3) continue;

    FieldParams pa = sys, pb = sys;
    pa.mass = uniform(rng, 0.8, 1.5);
    pb.mass = uniform(rng, 0.8, 1.5);
    const PreInstrument alice = make_pre_instrument(
        sys, {ProbeSpec{"alice", pa, vacuum_state(pa, "alice"), CouplingProfile{uniform(rng, 0.3, 0.7), rho1}}});
    const PreInstrument bob = make_pre_instrument(
        sys, {ProbeSpec{"bob", pb, vacuum_state(pb, "bob"), CouplingProfile{uniform(rng, 0.3, 0.7), rho2}}});
    QuasiFreeState st = sampling::random_state(rng, sys, interior(spec));
    st = displaced(st, st.space.omega() * st.space.generator(h) * uniform(rng, 1.0, 3.0));
    const ImpossibleMeasurementReport rep = impossible_measurement_test(alice, bob, h, o1, o2, o3, StateFunctional(st));
    worst = std::max(worst, rep.gap);
    weakest = std::min(weakest, std::abs(rep.sorkin_gap));
    ++accepted;
  }
  const std::string s = "random admissible geometries";
  r.at_most(s, "max impossible-measurement gap", worst, 1e-8);
  r.at_least(s, "min |unitary-kick gap| on the same geometries", accepted ? weakest : 0.0, 1e-3);
  r.at_least(s, "geometries", accepted, task.impossible_geometries);
  return r;
}

Report unsharpness_suite(Rng& rng, const ScenarioConfig& cfg, const VerifyTask& task, double scale) {
  Report r(scale);
  const FieldParams& sys = cfg.system;
  const LatticeSpec& spec = sys.spec;
  const PhaseSpace space = PhaseSpace::single("system", sys);

  // Closed form in the vacuum.
  {
    const Eigen::VectorXd g = sampling::random_generator(rng, space, interior(spec), 0, 2.0);
    const double w = g.dot(vacuum_state(sys).covariance * g);
    const double th = uniform(rng, 0.0, 2 * M_PI);
    const double pe = 0.5 + 0.5 * std::exp(-w / 2) * std::cos(th);
    const double pe2 = 0.25 + 0.5 * std::exp(-w / 2) * std::cos(th) + (1.0 + std::exp(-2 * w) * std::cos(2 * th)) / 8;
    const NoiseStatistics n = noise_statistics(Effect::cosine(space, g, th), StateFunctional(vacuum_state(sys)));
    r.at_most("vacuum cosine effect", "|noise - closed form|", std::abs(n.noise - (pe - pe2)), 1e-12);
  }

  double min_noise = std::numeric_limits<double>::infinity();
  for (int k = 0; k < task.unsharpness_samples; ++k) {
    const StateFunctional omega(sampling::random_state(rng, sys, interior(spec)));
    Effect e = random_effect(rng, space, interior(spec));
    if (k % 2 == 1) {
      const double w = uniform(rng, 0.0, 1.0);
      e = Effect::convex({{w, e}, {1.0 - w, random_effect(rng, space, interior(spec))}});
    }
    min_noise = std::min(min_noise, noise_statistics(e, omega).noise);
  }
  r.at_least("random effects and states", "min omega(E - E^2)", min_noise, -1e-10);
  r.at_least("random effects and states", "samples", task.unsharpness_samples, task.unsharpness_samples);

  const Region zone = centre_zone(spec);
  const PreInstrument pi = make_pre_instrument(sys, {random_probe(rng, "probe", sys, zone)});
  double ordering = std::numeric_limits<double>::infinity();
  for (int k = 0; k < task.unsharpness_samples; ++k) {
    const StateFunctional omega(sampling::random_state(rng, sys, interior(spec)));
    const VarianceOrdering v = variance_ordering(pi, random_effect(rng, pi.probe_space(), zone), omega);
    ordering = std::min(ordering, v.actual - v.induced);
  }
  r.at_least("probe effects", "min (actual - induced variance)", ordering, -1e-10);
  return r;
}

using SuiteFn = Report (*)(Rng&, const ScenarioConfig&, const VerifyTask&, double);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r{
      {"commutator", commutator_suite}, {"green", green_suite},     {"sorkin", sorkin_suite},
      {"scattering", scattering_suite}, {"induced", induced_suite}, {"updates", updates_suite},
      {"impossible", impossible_suite}, {"unsharpness", unsharpness_suite}};
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, fn] : registry()) n.push_back(name);
    return n;
  }();
  return names;
}

SuiteResult run_suite(const std::string& name, const ScenarioConfig& cfg, const VerifyTask& task,
                      const SuiteOptions& options) {
  require_size(cfg.system.spec);
  const auto& reg = registry();
  for (std::size_t i = 0; i < reg.size(); ++i) {
    if (reg[i].first != name) continue;
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(i)};
    Rng rng(seq);
    return SuiteResult{name, reg[i].second(rng, cfg, task, options.tolerance_scale)};
  }
  throw DomainError(fmt::format("unknown suite '{}'", name));
}

std::vector<SuiteResult> run_verify(const ScenarioConfig& cfg, const VerifyTask& task, const SuiteOptions& options) {
  const std::vector<std::string> names = task.suites.empty() ? suite_names() : task.suites;
  for (const auto& n : names)
    if (std::find(suite_names().begin(), suite_names().end(), n) == suite_names().end())
      throw DomainError(fmt::format("unknown suite '{}'", n));
  std::vector<SuiteResult> out;
  if (!options.parallel) {
    for (const auto& n : names) out.push_back(run_suite(n, cfg, task, options));
    return out;
  }
  std::vector<std::future<SuiteResult>> jobs;
  for (const auto& n : names)
    jobs.push_back(std::async(std::launch::async, [&, n] { return run_suite(n, cfg, task, options); }));
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace qftm
