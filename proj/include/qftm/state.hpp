#pragma once

// Quasi-free states and finite displaced-Gaussian combinations over them.
//
// A quasi-free state on a PhaseSpace is fixed by a real mean mu and a real
// symmetric covariance C on phase-space generators:
//
//   omega(W(F)) = exp(i mu.F - F^T C F / 2),
//
// and it is a state iff C + (i/2) Omega is positive semidefinite.
//
// A StateFunctional is a finite sum of components (c_j, z_j) over one such base,
//
//   s(W(F)) = sum_j c_j exp(i mu.F + z_j.F - F^T C F / 2),
//
// with c_j complex and z_j a complex phase-space vector. Weyl conjugation,
// symplectic pull-backs and effect-conditioned updates all stay in this class.

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qftm/phase_space.hpp"
#include "qftm/weyl.hpp"

namespace qftm {

struct QuasiFreeState {
  PhaseSpace space;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  /// exp(i mu.F - F^T C F / 2).
  Complex characteristic(const Eigen::VectorXd& F) const;
  /// Minimum eigenvalue of C + (i/2) Omega.
  double positivity_margin() const;
};

/// Ground state of the free lattice dynamics in every sector. Throws DomainError for mass <= 0.
QuasiFreeState vacuum_state(const PhaseSpace& space);
QuasiFreeState vacuum_state(const FieldParams& params, const std::string& label = "system");

/// Two-point function W(f, f') = F^T C F' of the vacuum, with F = generator of f.
double vacuum_two_point(const FieldParams& params, const TestFunction& f, const TestFunction& g);

/// Linear map taking Cauchy data on slice `from_t` to Cauchy data on slice `to_t`.
Eigen::MatrixXd free_propagator(const FieldParams& params, int from_t, int to_t);

/// Single-sector state whose covariance on slice t is the ultralocal product
/// diag(kappa / (2 nu), kappa nu / 2) per site. Pure, and uncorrelated between sites on slice t.
QuasiFreeState ultralocal_state(const FieldParams& params, int t, double nu, const std::string& label = "system");

/// Adds gamma * v v^T to the covariance (stays a state for gamma >= 0).
QuasiFreeState with_extra_covariance(QuasiFreeState s, const Eigen::VectorXd& v, double gamma);

/// Shifts the mean by mu.
QuasiFreeState displaced(QuasiFreeState s, const Eigen::VectorXd& mu);

QuasiFreeState tensor(const QuasiFreeState& a, const QuasiFreeState& b);

struct Component {
  Complex weight;
  Eigen::VectorXcd z;
};

class StateFunctional {
 public:
  StateFunctional() = default;
  /// The quasi-free state itself: one component with weight 1 and z = 0.
  explicit StateFunctional(QuasiFreeState base);
  StateFunctional(QuasiFreeState base, std::vector<Component> components);

  const QuasiFreeState& base() const { return base_; }
  const PhaseSpace& space() const { return base_.space; }
  const std::vector<Component>& components() const { return components_; }

  Complex characteristic(const Eigen::VectorXd& F) const;
  Complex evaluate(const AlgebraElement& a) const;
  /// Value at the unit.
  Complex norm() const;
  /// Divides by norm(); throws NullConditioningError if |norm| <= threshold.
  StateFunctional normalized(double threshold = 1e-12) const;
  StateFunctional operator*(Complex s) const;
  StateFunctional operator+(const StateFunctional& other) const;

  /// A -> s(W(-f) A W(f)), i.e. the state after the unitary W(f).
  StateFunctional conjugated_by_weyl(const Eigen::VectorXd& f) const;

  /// F -> sum_l b_l s(W(M F + X_l)) as a functional on `target`.
  /// M maps target vectors into this space.
  StateFunctional pull_back(const Eigen::MatrixXd& M, const PhaseSpace& target,
                            const std::vector<std::pair<Complex, Eigen::VectorXd>>& offsets) const;

  /// Restriction to the sectors [first, first + count).
  StateFunctional marginal(int first, int count) const;

  /// Merges components with equal z.
  void compress();

 private:
  QuasiFreeState base_;
  std::vector<Component> components_;
};

StateFunctional tensor(const StateFunctional& a, const StateFunctional& b);

/// G_ij = s(W(F_i)* W(F_j)).
Eigen::MatrixXcd gram_matrix(const StateFunctional& s, const std::vector<Eigen::VectorXd>& generators);
/// Minimum eigenvalue of the Hermitian part of the Gram matrix.
double gram_min_eigenvalue(const StateFunctional& s, const std::vector<Eigen::VectorXd>& generators);

/// s(phi(F_1) ... phi(F_k)) for k <= 4, from derivatives of the characteristic
/// functional. Throws UnsupportedError for larger k.
Complex field_moment(const StateFunctional& s, const std::vector<Eigen::VectorXd>& generators);

// --- record format ----------------------------------------------------------
//
//   qftm-state 1
//   sector <label> <mass> <n_t> <n_x> <dx> <dt> <boundary>     (one per sector)
//   mean <D numbers>
//   covariance                                                 (D rows follow)
//   components <N>
//   <re> <im> <2D numbers: re/im pairs of z>                   (N rows)
//
// Numbers use %.17g so a round trip is exact.

void write_record(std::ostream& out, const StateFunctional& s);
StateFunctional read_record(std::istream& in);

}  // namespace qftm
