#pragma once

// Probe-based measurement: effects built from Weyl generators, pre-instruments
// I_sigma(B)(omega) : A -> (omega (x) sigma)(Theta(A (x) B)), selective and
// nonselective updates, composition of causally ordered probes, and the
// three-region no-signalling check.

#include <string>
#include <utility>
#include <vector>

#include "qftm/scattering.hpp"

namespace qftm {

/// Self-adjoint element with spectrum in [0, 1]: the cosine family
/// 1/2 + e^{i theta} W(g) / 4 + e^{-i theta} W(-g) / 4 = (1 + cos(phi(g) + theta)) / 2,
/// the constants 0, 1/2, 1, complements, convex combinations and tensor products.
class Effect {
 public:
  static Effect cosine(const PhaseSpace& space, const Eigen::VectorXd& g, double theta);
  static Effect unit(const PhaseSpace& space);
  static Effect half(const PhaseSpace& space);
  static Effect zero(const PhaseSpace& space);
  /// sum_i w_i E_i with w_i >= 0 and sum w_i <= 1 (checked to 1e-12).
  static Effect convex(const std::vector<std::pair<double, Effect>>& parts);

  const AlgebraElement& element() const { return element_; }
  const PhaseSpace& space() const { return element_.space(); }
  /// 1 - E.
  Effect complement() const;

  friend Effect tensor(const Effect& a, const Effect& b);

 private:
  explicit Effect(AlgebraElement e) : element_(std::move(e)) {}
  AlgebraElement element_;
};

struct POVM {
  std::vector<std::pair<std::string, Effect>> outcomes;

  /// max coefficient of (sum_i E_i - 1).
  double unit_defect() const;
};

/// Binary {E, 1 - E}.
POVM binary_povm(const Effect& e, const std::string& yes = "yes", const std::string& no = "no");

struct PreInstrument {
  FieldParams system;
  std::vector<ProbeSpec> probes;
  ScatteringMap map;
  /// Tensor product of the probe preparations.
  QuasiFreeState sigma;

  PhaseSpace system_space() const { return map.space().slice(0, 1); }
  PhaseSpace probe_space() const { return sigma.space; }
  /// Union of the probe coupling zones.
  Region zone() const;
};

PreInstrument make_pre_instrument(const FieldParams& system, const std::vector<ProbeSpec>& probes);

/// I_sigma(B)(omega) as a sub-state on the system.
StateFunctional apply_pre_instrument(const PreInstrument& pi, const Effect& b, const StateFunctional& omega);
/// Same with an arbitrary probe algebra element in place of an effect.
StateFunctional apply_pre_instrument(const PreInstrument& pi, const AlgebraElement& b, const StateFunctional& omega);

/// (I(B) omega)(A) / (I(B) omega)(1). Throws NullConditioningError if the denominator is <= 1e-12.
double conditional_probability(const Effect& a, const Effect& b, const StateFunctional& omega, const PreInstrument& pi);

StateFunctional selective_update(const StateFunctional& omega, const Effect& b, const PreInstrument& pi);
StateFunctional nonselective_update(const StateFunctional& omega, const PreInstrument& pi);

/// max over the sampled generators F of |sum_i I(E_i)(omega)(W(F)) - I(1)(omega)(W(F))|,
/// also folding in the POVM's own unit defect.
double povm_decomposition_check(const PreInstrument& pi, const POVM& p, const StateFunctional& omega,
                                const std::vector<Eigen::VectorXd>& samples);

struct CompositeProbes {
  PreInstrument first;
  PreInstrument second;
  /// Both couplings active, probes ordered (first..., second...).
  PreInstrument combined;
};

/// Throws CompositionError unless first.zone() may be ordered before second.zone().
CompositeProbes compose_probes(const PreInstrument& first, const PreInstrument& second);

struct ImpossibleMeasurementReport {
  /// <C> after Alice's and Bob's nonselective updates.
  Complex with_alice_weyl, with_alice_field;
  /// <C> after Bob's update alone.
  Complex without_alice_weyl, without_alice_field;
  /// max of the two absolute differences.
  double gap = 0.0;
  /// 2 E(rho_2, h) E(rho_1, rho_2): the unitary-kick gap for the same geometry.
  double sorkin_gap = 0.0;
};

/// Charlie's observables are W(h) and phi(h). Throws GeometryError naming the
/// violated predicate: zones inside O1 and O2, supp h inside O3, O3 inside the
/// causal complement of O1, K1 before K2, K2 before the causal hull of supp h.
ImpossibleMeasurementReport impossible_measurement_test(const PreInstrument& alice, const PreInstrument& bob,
                                                        const TestFunction& h, const Region& o1, const Region& o2,
                                                        const Region& o3, const StateFunctional& omega);

struct NoiseStatistics {
  double variance = 0.0;       // omega(E) - omega(E)^2
  double dispersion_sq = 0.0;  // omega(E^2) - omega(E)^2
  double noise = 0.0;          // omega(E - E^2)
};

NoiseStatistics noise_statistics(const Effect& e, const StateFunctional& omega);

struct VarianceOrdering {
  /// Variance of the yes/no outcome of the actual probe measurement, p - p^2.
  double actual = 0.0;
  /// omega(eps(B)^2) - p^2 for the induced observable.
  double induced = 0.0;
};

VarianceOrdering variance_ordering(const PreInstrument& pi, const Effect& b, const StateFunctional& omega);

}  // namespace qftm
