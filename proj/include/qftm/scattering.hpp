#pragma once

// System field phi coupled to one or more probe fields psi_j through
//
//   (L_sys phi)     = -sum_j lambda_j rho_j psi_j,
//   (L_j   psi_j)   = -lambda_j rho_j phi,
//
// with the cross sources evaluated on the current slice of the explicit update,
// so every step is a symplectic map of the combined Cauchy data. All sectors
// share one lattice; masses may differ.
//
// Scattering map: S = (free evolution late -> early) o (coupled evolution early
// -> late) on the combined Cauchy data at slice 0. Its inverse T acts on Weyl
// generators, Theta(W(F)) = W(T F); with this convention successive probes
// factorize as Theta = Theta_1 o Theta_2 for K1 ordered before K2.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "qftm/state.hpp"

namespace qftm {

struct CouplingProfile {
  double strength = 0.0;
  /// rho >= 0; its support is the coupling zone.
  TestFunction shape;

  /// Throws DomainError for negative rho, an empty zone, or a zone outside slices [2, n_t - 3].
  void validate() const;
  CouplingZone zone() const { return CouplingZone(shape.support()); }
};

struct ProbeSpec {
  std::string label;
  FieldParams params;
  QuasiFreeState preparation;
  CouplingProfile coupling;
};

class ScatteringMap {
 public:
  ScatteringMap(PhaseSpace space, Eigen::MatrixXd s, Eigen::MatrixXd t, std::vector<CouplingZone> zones);

  const PhaseSpace& space() const { return space_; }
  const Eigen::MatrixXd& S() const { return s_; }
  /// Inverse of S, computed by direct evolution.
  const Eigen::MatrixXd& T() const { return t_; }
  Eigen::MatrixXd omega() const { return space_.omega(); }
  const std::vector<CouplingZone>& zones() const { return zones_; }

  /// max |S^T Omega S - Omega|.
  double symplecticity_defect() const;
  /// max |S T - I|.
  double inverse_defect() const;

 private:
  PhaseSpace space_;
  Eigen::MatrixXd s_;
  Eigen::MatrixXd t_;
  std::vector<CouplingZone> zones_;
};

/// Phase space system + probes, in that order.
PhaseSpace combined_space(const FieldParams& system, const std::vector<ProbeSpec>& probes,
                          const std::string& system_label = "system");

/// Evolves the columns of `data` (combined Cauchy data on slice from_t) to slice
/// to_t in either direction. With `coupled` false the sectors evolve freely.
Eigen::MatrixXd propagate(const PhaseSpace& space, const std::vector<CouplingProfile>& couplings,
                          const Eigen::MatrixXd& data, int from_t, int to_t, bool coupled = true);

/// Coupled evolution of combined data from slice 0 to slice n_t - 2.
Eigen::VectorXd coupled_evolve(const Eigen::VectorXd& early, const FieldParams& system,
                               const std::vector<ProbeSpec>& probes);

ScatteringMap scattering_map(const FieldParams& system, const std::vector<ProbeSpec>& probes);

/// T F.
Eigen::VectorXd theta_on_weyl(const ScatteringMap& map, const Eigen::VectorXd& F);
/// T F with F = f_0 + f_1 + ... (one test function per sector), returned as
/// test functions on slices {2, 3} of each sector.
std::vector<TestFunction> theta_on_weyl(const ScatteringMap& map, const std::vector<TestFunction>& F);

/// Theta applied term by term.
AlgebraElement apply_theta(const ScatteringMap& map, const AlgebraElement& a);

/// Each term W(F + G) -> sigma(W(G)) W(F), where F lives on the first
/// `system_sectors` sectors and sigma on the rest.
AlgebraElement eta(const QuasiFreeState& sigma, const AlgebraElement& a, int system_sectors = 1);

/// eta_sigma(Theta(1 (x) B)).
AlgebraElement induced_observable(const QuasiFreeState& sigma, const ScatteringMap& map, const AlgebraElement& b,
                                  int system_sectors = 1);

}  // namespace qftm
