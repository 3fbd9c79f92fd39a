#include "qftm/instruments.hpp"

#include <fmt/format.h>

#include <cmath>

#include "qftm/errors.hpp"

namespace qftm {

Effect Effect::cosine(const PhaseSpace& space, const Eigen::VectorXd& g, double theta) {
  AlgebraElement e = AlgebraElement::unit(space, 0.5);
  e.add_term(0.25 * std::polar(1.0, theta), g);
  e.add_term(0.25 * std::polar(1.0, -theta), -g);
  return Effect(std::move(e));
}

Effect Effect::unit(const PhaseSpace& space) { return Effect(AlgebraElement::unit(space)); }
Effect Effect::half(const PhaseSpace& space) { return Effect(AlgebraElement::unit(space, 0.5)); }
Effect Effect::zero(const PhaseSpace& space) { return Effect(AlgebraElement::zero(space)); }

Effect Effect::convex(const std::vector<std::pair<double, Effect>>& parts) {
  if (parts.empty()) throw DomainError("convex combination of no effects");
  double total = 0.0;
  AlgebraElement e = AlgebraElement::zero(parts.front().second.space());
  for (const auto& [w, part] : parts) {
    if (w < 0.0) throw DomainError("convex weights must be nonnegative");
    total += w;
    e = e + part.element() * w;
  }
  if (total > 1.0 + 1e-12) throw DomainError(fmt::format("convex weights sum to {} > 1", total));
  return Effect(std::move(e));
}

Effect Effect::complement() const { return Effect(AlgebraElement::unit(space()) - element_); }

Effect tensor(const Effect& a, const Effect& b) { return Effect(tensor(a.element_, b.element_)); }

double POVM::unit_defect() const {
  if (outcomes.empty()) throw DomainError("empty POVM");
  const PhaseSpace& space = outcomes.front().second.space();
  AlgebraElement sum = AlgebraElement::zero(space);
  for (const auto& [label, e] : outcomes) sum = sum + e.element();
  return sum.distance(AlgebraElement::unit(space));
}

POVM binary_povm(const Effect& e, const std::string& yes, const std::string& no) {
  return POVM{{{yes, e}, {no, e.complement()}}};
}

Region PreInstrument::zone() const {
  Region r(system.spec);
  for (const auto& p : probes) r = r | p.coupling.shape.support();
  return r;
}

PreInstrument make_pre_instrument(const FieldParams& system, const std::vector<ProbeSpec>& probes) {
  if (probes.empty()) throw DomainError("pre-instrument needs at least one probe");
  QuasiFreeState sigma = probes.front().preparation;
  for (std::size_t j = 1; j < probes.size(); ++j) sigma = tensor(sigma, probes[j].preparation);
  ScatteringMap map = scattering_map(system, probes);
  if (!(sigma.space == map.space().slice(1, map.space().sector_count() - 1)))
    throw DomainError("probe preparations live on " + sigma.space.describe() + ", expected " +
                      map.space().slice(1, map.space().sector_count() - 1).describe());
  return PreInstrument{system, probes, std::move(map), std::move(sigma)};
}

StateFunctional apply_pre_instrument(const PreInstrument& pi, const AlgebraElement& b, const StateFunctional& omega) {
  const PhaseSpace sys = pi.system_space();
  if (!(omega.space() == sys))
    throw DomainError("state lives on " + omega.space().describe() + ", pre-instrument acts on " + sys.describe());
  if (!(b.space() == pi.probe_space()))
    throw DomainError("effect lives on " + b.space().describe() + ", probe is " + pi.probe_space().describe());
  const StateFunctional joint = tensor(omega, StateFunctional(pi.sigma));
  const Eigen::MatrixXd& t = pi.map.T();
  const int ds = sys.dim();
  const int dp = pi.probe_space().dim();
  std::vector<std::pair<Complex, Eigen::VectorXd>> offsets;
  for (const auto& term : b.terms()) offsets.emplace_back(term.coeff, t.rightCols(dp) * term.generator);
  return joint.pull_back(t.leftCols(ds), sys, offsets);
}

StateFunctional apply_pre_instrument(const PreInstrument& pi, const Effect& b, const StateFunctional& omega) {
  return apply_pre_instrument(pi, b.element(), omega);
}

double conditional_probability(const Effect& a, const Effect& b, const StateFunctional& omega, const PreInstrument& pi) {
  const StateFunctional s = apply_pre_instrument(pi, b, omega);
  const double p = s.norm().real();
  if (p <= 1e-12) throw NullConditioningError(fmt::format("conditioning on an outcome of probability {:.3g}", p));
  return s.evaluate(a.element()).real() / p;
}

StateFunctional selective_update(const StateFunctional& omega, const Effect& b, const PreInstrument& pi) {
  return apply_pre_instrument(pi, b, omega).normalized(1e-12);
}

StateFunctional nonselective_update(const StateFunctional& omega, const PreInstrument& pi) {
  return apply_pre_instrument(pi, Effect::unit(pi.probe_space()), omega);
}

double povm_decomposition_check(const PreInstrument& pi, const POVM& p, const StateFunctional& omega,
                                const std::vector<Eigen::VectorXd>& samples) {
  double defect = p.unit_defect();
  std::vector<StateFunctional> parts;
  for (const auto& [label, e] : p.outcomes) parts.push_back(apply_pre_instrument(pi, e, omega));
  const StateFunctional whole = nonselective_update(omega, pi);
  std::vector<Eigen::VectorXd> points = samples;
  points.push_back(Eigen::VectorXd::Zero(omega.space().dim()));
  for (const auto& F : points) {
    Complex sum = 0.0;
    for (const auto& s : parts) sum += s.characteristic(F);
    defect = std::max(defect, std::abs(sum - whole.characteristic(F)));
  }
  return defect;
}

CompositeProbes compose_probes(const PreInstrument& first, const PreInstrument& second) {
  if (!(first.system == second.system)) throw CompositionError("probes couple to different system fields");
  if (!precedes(CouplingZone(first.zone()), CouplingZone(second.zone())))
    throw CompositionError("coupling zones are not causally ordered: J-(K1) meets J+(K2)");
  std::vector<ProbeSpec> all = first.probes;
  all.insert(all.end(), second.probes.begin(), second.probes.end());
  return CompositeProbes{first, second, make_pre_instrument(first.system, all)};
}

ImpossibleMeasurementReport impossible_measurement_test(const PreInstrument& alice, const PreInstrument& bob,
                                                        const TestFunction& h, const Region& o1, const Region& o2,
                                                        const Region& o3, const StateFunctional& omega) {
  const auto require = [](bool ok, const char* predicate) {
    if (!ok) throw GeometryError(std::string("impossible-measurement layout violates: ") + predicate);
  };
  const Region k1 = alice.zone();
  const Region k2 = bob.zone();
  require(k1.subset_of(o1), "K1 within O1");
  require(k2.subset_of(o2), "K2 within O2");
  require(!h.is_zero() && h.support().subset_of(o3), "supp h within O3");
  require(o3.subset_of(causal_complement(o1)), "O3 within the causal complement of O1");
  require(precedes(CouplingZone(k1), CouplingZone(k2)), "K1 precedes K2");
  require(precedes(CouplingZone(k2), CouplingZone(causal_hull(h.support()))), "K2 precedes the hull of supp h");

  const PhaseSpace sys = alice.system_space();
  const Eigen::VectorXd gh = sys.generator(h);
  const AlgebraElement wh = AlgebraElement::weyl(sys, gh);

  const StateFunctional both = nonselective_update(nonselective_update(omega, alice), bob);
  const StateFunctional bob_only = nonselective_update(omega, bob);

  ImpossibleMeasurementReport r;
  r.with_alice_weyl = both.evaluate(wh);
  r.with_alice_field = field_moment(both, {gh});
  r.without_alice_weyl = bob_only.evaluate(wh);
  r.without_alice_field = field_moment(bob_only, {gh});
  r.gap = std::max(std::abs(r.with_alice_weyl - r.without_alice_weyl),
                   std::abs(r.with_alice_field - r.without_alice_field));

  const TestFunction& rho1 = alice.probes.front().coupling.shape;
  const TestFunction& rho2 = bob.probes.front().coupling.shape;
  r.sorkin_gap = 2.0 * commutator_form(rho2, h, alice.system) * commutator_form(rho1, rho2, alice.system);
  return r;
}

NoiseStatistics noise_statistics(const Effect& e, const StateFunctional& omega) {
  const double p = omega.evaluate(e.element()).real();
  const double p2 = omega.evaluate(weyl_multiply(e.element(), e.element())).real();
  NoiseStatistics n;
  n.variance = p - p * p;
  n.dispersion_sq = p2 - p * p;
  n.noise = p - p2;
  return n;
}

VarianceOrdering variance_ordering(const PreInstrument& pi, const Effect& b, const StateFunctional& omega) {
  const AlgebraElement eps = induced_observable(pi.sigma, pi.map, b.element());
  const double p = apply_pre_instrument(pi, b, omega).norm().real();
  const double q = omega.evaluate(weyl_multiply(eps, eps)).real();
  return {p - p * p, q - p * p};
}

}  // namespace qftm
