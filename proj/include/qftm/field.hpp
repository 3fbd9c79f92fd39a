#pragma once

// Discrete Klein-Gordon dynamics on a LatticeSpec.
//
// Stencil (row t of a grid is the time slice t):
//
//   (L u)_t = (u_{t+1} - 2 u_t + u_{t-1}) / dt^2 - (D u)_t + m^2 (u_{t+1} + u_{t-1}) / 2
//
// with D the three-point spatial Laplacian (periodic wrap, or a mirrored ghost
// site u_{-1} = u_0 for reflecting walls). The mass term is averaged over the
// neighbouring slices; this keeps the explicit update unconditionally stable at
// dt == dx for every m > 0 and reduces to the textbook leapfrog for m = 0.
//
// Retarded update: u_{t+1} = (B u_t + f_t) / a - u_{t-1},
//   a = 1/dt^2 + m^2/2,  B = 2/dt^2 + D.
// The source on slice t enters slice t+1 with weight 1/a (= dt^2 for m = 0).

#include <Eigen/Dense>

#include "qftm/lattice.hpp"

namespace qftm {

/// Lattice array, row t = time slice t.
using Grid = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct FieldParams {
  double mass = 1.0;
  LatticeSpec spec;

  void validate() const;
  /// Coefficient of u_{t+1} + u_{t-1} in the stencil.
  double stencil_a() const { return 1.0 / (spec.dt * spec.dt) + 0.5 * mass * mass; }
  /// Scale of the conserved symplectic form in (phi, pi) coordinates.
  double symplectic_scale() const { return spec.dx * spec.dt * spec.dt * stencil_a(); }

  friend bool operator==(const FieldParams&, const FieldParams&) = default;
};

Grid zero_grid(const LatticeSpec& spec);

/// Compactly supported real lattice function with its support recorded.
class TestFunction {
 public:
  explicit TestFunction(const LatticeSpec& spec);
  /// Support is taken to be the set of nonzero entries.
  TestFunction(const LatticeSpec& spec, Grid values);

  /// Gaussian amplitude*exp(-((t-t0)^2/(2 st^2) + d(x,x0)^2/(2 sx^2))) truncated to `box`.
  /// Centres and widths are in lattice units (sites / slices).
  static TestFunction gaussian_bump(const Region& box, double t0, double x0, double sigma_t, double sigma_x,
                                    double amplitude);
  static TestFunction point(const LatticeSpec& spec, int t, int x, double amplitude);

  const LatticeSpec& spec() const { return spec_; }
  const Grid& values() const { return values_; }
  const Region& support() const { return support_; }
  bool is_zero() const { return support_.empty(); }
  double operator()(int t, int x) const { return values_(t, x); }

  TestFunction operator+(const TestFunction& other) const;
  TestFunction operator-(const TestFunction& other) const;
  TestFunction operator*(double s) const;
  friend TestFunction operator*(double s, const TestFunction& f) { return f * s; }
  TestFunction operator-() const { return *this * -1.0; }

  /// Sum of f * g * dvol over the lattice.
  double dot(const TestFunction& other) const;

 private:
  LatticeSpec spec_;
  Grid values_;
  Region support_;
};

enum class SolutionKind { retarded, advanced };

struct Solution {
  Grid values;
  SolutionKind kind;
  TestFunction source;
};

/// Rows 0 and n_t-1 (where the stencil is undefined) are NaN.
Grid apply_klein_gordon(const Grid& u, const FieldParams& params);

/// Maximum of |(L u) - f| over interior slices.
double klein_gordon_residual(const Grid& u, const TestFunction& f, const FieldParams& params);

/// Spatial Laplacian of one slice.
Eigen::VectorXd spatial_laplacian(const Eigen::Ref<const Eigen::VectorXd>& row, const LatticeSpec& spec);

/// Requires supp f on slices <= n_t-3. Throws DomainError naming the padding otherwise.
Solution retarded(const TestFunction& f, const FieldParams& params);
/// Requires supp f on slices >= 2.
Solution advanced(const TestFunction& f, const FieldParams& params);
/// E f = E^adv f - E^ret f, a homogeneous solution on the whole grid.
Grid pauli_jordan(const TestFunction& f, const FieldParams& params);
/// E(f, g) = sum f (E^adv g - E^ret g) dt dx.
double commutator_form(const TestFunction& f, const TestFunction& g, const FieldParams& params);

/// Nonzero entries of a grid, with |u| > threshold * max|u|.
Region grid_support(const Grid& u, const LatticeSpec& spec, double relative_threshold = 0.0);

// --- Cauchy data -----------------------------------------------------------
//
// Cauchy data on slice t are (phi, pi) = (u_t, (u_{t+1} - u_t) / dt), stacked
// into a vector of length 2 n_x. The conserved symplectic form is
//   sigma(U, V) = kappa (phi_U . pi_V - pi_U . phi_V),  kappa = dx (1 + dt^2 m^2 / 2),
// and sigma(Cauchy(E f), Cauchy(E g)) = E(f, g).

Eigen::VectorXd cauchy_data(const Grid& u, int t, const FieldParams& params);
/// Free homogeneous solution on the whole grid with the given data on slice t.
Grid solution_from_cauchy(const Eigen::VectorXd& data, int t, const FieldParams& params);
/// Free evolution of Cauchy data between slices (either direction).
Eigen::VectorXd evolve_free(const Eigen::VectorXd& data, int from_t, int to_t, const FieldParams& params);
/// kappa * [[0, I], [-I, 0]].
Eigen::MatrixXd symplectic_matrix(const FieldParams& params);
/// sigma(Cauchy(E f), Cauchy(E g)) evaluated on the given slice.
double symplectic_pairing(const Grid& u, const Grid& v, int t, const FieldParams& params);

/// Test function on slices {2, 3} whose Pauli-Jordan solution has the given
/// Cauchy data on slice 0: h = -L(chi u) with chi the step switching on after slice 2.
TestFunction time_slice_source(const Eigen::VectorXd& early_data, const FieldParams& params);

}  // namespace qftm
