#include "qftm/field.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qftm/errors.hpp"

namespace qftm {

void FieldParams::validate() const {
  spec.validate();
  if (!(mass >= 0.0)) throw DomainError("mass must be nonnegative");
}

Grid zero_grid(const LatticeSpec& spec) { return Grid::Zero(spec.n_t, spec.n_x); }

TestFunction::TestFunction(const LatticeSpec& spec) : spec_(spec), values_(zero_grid(spec)), support_(spec) {}

TestFunction::TestFunction(const LatticeSpec& spec, Grid values)
    : spec_(spec), values_(std::move(values)), support_(spec) {
  if (values_.rows() != spec.n_t || values_.cols() != spec.n_x)
    throw DomainError("test function grid does not match the lattice shape");
  support_ = grid_support(values_, spec_);
}

TestFunction TestFunction::gaussian_bump(const Region& box, double t0, double x0, double sigma_t, double sigma_x,
                                         double amplitude) {
  if (!(sigma_t > 0.0) || !(sigma_x > 0.0)) throw DomainError("gaussian bump widths must be positive");
  const LatticeSpec& spec = box.spec();
  Grid v = zero_grid(spec);
  for (const auto& p : box.points()) {
    const double dtt = p.t - t0;
    double dxx = std::abs(p.x - x0);
    if (spec.boundary == Boundary::periodic) dxx = std::min(dxx, spec.n_x - dxx);
    v(p.t, p.x) = amplitude * std::exp(-0.5 * (dtt * dtt / (sigma_t * sigma_t) + dxx * dxx / (sigma_x * sigma_x)));
  }
  return TestFunction(spec, std::move(v));
}

TestFunction TestFunction::point(const LatticeSpec& spec, int t, int x, double amplitude) {
  if (t < 0 || t >= spec.n_t || x < 0 || x >= spec.n_x) throw DomainError("point source out of bounds");
  Grid v = zero_grid(spec);
  v(t, x) = amplitude;
  return TestFunction(spec, std::move(v));
}

TestFunction TestFunction::operator+(const TestFunction& other) const {
  if (!(spec_ == other.spec_)) throw DomainError("test functions on different lattices");
  return TestFunction(spec_, values_ + other.values_);
}

TestFunction TestFunction::operator-(const TestFunction& other) const {
  if (!(spec_ == other.spec_)) throw DomainError("test functions on different lattices");
  return TestFunction(spec_, values_ - other.values_);
}

TestFunction TestFunction::operator*(double s) const { return TestFunction(spec_, values_ * s); }

double TestFunction::dot(const TestFunction& other) const {
  return values_.cwiseProduct(other.values_).sum() * spec_.dvol();
}

Region grid_support(const Grid& u, const LatticeSpec& spec, double relative_threshold) {
  Region r(spec);
  const double cut = relative_threshold > 0.0 ? relative_threshold * u.cwiseAbs().maxCoeff() : 0.0;
  for (int t = 0; t < spec.n_t; ++t)
    for (int x = 0; x < spec.n_x; ++x)
      if (std::abs(u(t, x)) > cut) r.insert_index(spec.index(t, x));
  return r;
}

Eigen::VectorXd spatial_laplacian(const Eigen::Ref<const Eigen::VectorXd>& row, const LatticeSpec& spec) {
  const int n = spec.n_x;
  const double inv = 1.0 / (spec.dx * spec.dx);
  Eigen::VectorXd out(n);
  const bool periodic = spec.boundary == Boundary::periodic;
  for (int x = 0; x < n; ++x) {
    const double left = x > 0 ? row[x - 1] : (periodic ? row[n - 1] : row[0]);
    const double right = x + 1 < n ? row[x + 1] : (periodic ? row[0] : row[n - 1]);
    out[x] = (left - 2.0 * row[x] + right) * inv;
  }
  return out;
}

namespace {

// B u = (2/dt^2) u + D u.
Eigen::VectorXd apply_b(const Eigen::VectorXd& u, const FieldParams& p) {
  return (2.0 / (p.spec.dt * p.spec.dt)) * u + spatial_laplacian(u, p.spec);
}

void check_shape(const Grid& u, const LatticeSpec& spec) {
  if (u.rows() != spec.n_t || u.cols() != spec.n_x) throw DomainError("lattice array shape mismatch");
}

}  // namespace

Grid apply_klein_gordon(const Grid& u, const FieldParams& params) {
  const LatticeSpec& spec = params.spec;
  check_shape(u, spec);
  const double a = params.stencil_a();
  Grid out(spec.n_t, spec.n_x);
  out.row(0).setConstant(std::numeric_limits<double>::quiet_NaN());
  out.row(spec.n_t - 1).setConstant(std::numeric_limits<double>::quiet_NaN());
  for (int t = 1; t + 1 < spec.n_t; ++t) {
    const Eigen::VectorXd ut = u.row(t).transpose();
    out.row(t) = (a * (u.row(t + 1) + u.row(t - 1)).transpose() - apply_b(ut, params)).transpose();
  }
  return out;
}

double klein_gordon_residual(const Grid& u, const TestFunction& f, const FieldParams& params) {
  const Grid lu = apply_klein_gordon(u, params);
  const int n_t = params.spec.n_t;
  return (lu.middleRows(1, n_t - 2) - f.values().middleRows(1, n_t - 2)).cwiseAbs().maxCoeff();
}

Solution retarded(const TestFunction& f, const FieldParams& params) {
  const LatticeSpec& spec = params.spec;
  Grid u = zero_grid(spec);
  if (f.is_zero()) return {u, SolutionKind::retarded, f};
  const int max_t = f.support().max_t();
  if (max_t > spec.n_t - 3)
    throw DomainError("retarded solve needs supp f on slices <= " + std::to_string(spec.n_t - 3) +
                      " (two padding slices at the top); source reaches slice " + std::to_string(max_t));
  const double a = params.stencil_a();
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(spec.n_x);
  for (int t = 0; t + 1 < spec.n_t; ++t) {
    const Eigen::VectorXd ut = u.row(t).transpose();
    const Eigen::VectorXd next = (apply_b(ut, params) + f.values().row(t).transpose()) / a - prev;
    u.row(t + 1) = next.transpose();
    prev = ut;
  }
  return {std::move(u), SolutionKind::retarded, f};
}

Solution advanced(const TestFunction& f, const FieldParams& params) {
  const LatticeSpec& spec = params.spec;
  Grid u = zero_grid(spec);
  if (f.is_zero()) return {u, SolutionKind::advanced, f};
  const int min_t = f.support().min_t();
  if (min_t < 2)
    throw DomainError("advanced solve needs supp f on slices >= 2 (two padding slices at the bottom); source reaches slice " +
                      std::to_string(min_t));
  const double a = params.stencil_a();
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(spec.n_x);
  for (int t = spec.n_t - 1; t >= 1; --t) {
    const Eigen::VectorXd ut = u.row(t).transpose();
    const Eigen::VectorXd next = (apply_b(ut, params) + f.values().row(t).transpose()) / a - prev;
    u.row(t - 1) = next.transpose();
    prev = ut;
  }
  return {std::move(u), SolutionKind::advanced, f};
}

Grid pauli_jordan(const TestFunction& f, const FieldParams& params) {
  return advanced(f, params).values - retarded(f, params).values;
}

double commutator_form(const TestFunction& f, const TestFunction& g, const FieldParams& params) {
  if (f.is_zero() || g.is_zero()) return 0.0;
  const Grid eg = pauli_jordan(g, params);
  return f.values().cwiseProduct(eg).sum() * params.spec.dvol();
}

Eigen::VectorXd cauchy_data(const Grid& u, int t, const FieldParams& params) {
  check_shape(u, params.spec);
  if (t < 0 || t + 1 >= u.rows()) throw DomainError("Cauchy data need slices t and t+1 on the grid");
  const int n = static_cast<int>(u.cols());
  Eigen::VectorXd d(2 * n);
  d.head(n) = u.row(t).transpose();
  d.tail(n) = (u.row(t + 1) - u.row(t)).transpose() / params.spec.dt;
  return d;
}

namespace {

Eigen::VectorXd to_slices(const Eigen::VectorXd& data, double dt) {
  // (phi, pi) -> (u_t, u_{t+1})
  const Eigen::Index n = data.size() / 2;
  Eigen::VectorXd s(2 * n);
  s.head(n) = data.head(n);
  s.tail(n) = data.head(n) + dt * data.tail(n);
  return s;
}

Eigen::VectorXd from_slices(const Eigen::VectorXd& s, double dt) {
  const Eigen::Index n = s.size() / 2;
  Eigen::VectorXd d(2 * n);
  d.head(n) = s.head(n);
  d.tail(n) = (s.tail(n) - s.head(n)) / dt;
  return d;
}

void check_data(const Eigen::VectorXd& data, const LatticeSpec& spec) {
  if (data.size() != 2 * spec.n_x) throw DomainError("Cauchy data must have length 2 n_x");
}

}  // namespace

Grid solution_from_cauchy(const Eigen::VectorXd& data, int t, const FieldParams& params) {
  const LatticeSpec& spec = params.spec;
  check_data(data, spec);
  if (t < 0 || t + 1 >= spec.n_t) throw DomainError("reference slice out of range");
  const int n = spec.n_x;
  const double a = params.stencil_a();
  const Eigen::VectorXd s = to_slices(data, spec.dt);
  Grid u(spec.n_t, n);
  u.row(t) = s.head(n).transpose();
  u.row(t + 1) = s.tail(n).transpose();
  for (int k = t + 1; k + 1 < spec.n_t; ++k) {
    const Eigen::VectorXd uk = u.row(k).transpose();
    u.row(k + 1) = (apply_b(uk, params) / a - u.row(k - 1).transpose()).transpose();
  }
  for (int k = t; k >= 1; --k) {
    const Eigen::VectorXd uk = u.row(k).transpose();
    u.row(k - 1) = (apply_b(uk, params) / a - u.row(k + 1).transpose()).transpose();
  }
  return u;
}

Eigen::VectorXd evolve_free(const Eigen::VectorXd& data, int from_t, int to_t, const FieldParams& params) {
  const LatticeSpec& spec = params.spec;
  check_data(data, spec);
  if (from_t < 0 || to_t < 0 || from_t + 1 >= spec.n_t || to_t + 1 >= spec.n_t)
    throw DomainError("evolve_free: slice out of range");
  const int n = spec.n_x;
  const double a = params.stencil_a();
  const Eigen::VectorXd s = to_slices(data, spec.dt);
  Eigen::VectorXd lo = s.head(n), hi = s.tail(n);  // slices (k, k+1)
  for (int k = from_t; k < to_t; ++k) {
    Eigen::VectorXd next = apply_b(hi, params) / a - lo;
    lo = std::move(hi);
    hi = std::move(next);
  }
  for (int k = from_t; k > to_t; --k) {
    Eigen::VectorXd below = apply_b(lo, params) / a - hi;
    hi = std::move(lo);
    lo = std::move(below);
  }
  Eigen::VectorXd out(2 * n);
  out << lo, hi;
  return from_slices(out, spec.dt);
}

Eigen::MatrixXd symplectic_matrix(const FieldParams& params) {
  const int n = params.spec.n_x;
  const double kappa = params.symplectic_scale();
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  omega.topRightCorner(n, n) = kappa * Eigen::MatrixXd::Identity(n, n);
  omega.bottomLeftCorner(n, n) = -kappa * Eigen::MatrixXd::Identity(n, n);
  return omega;
}

double symplectic_pairing(const Grid& u, const Grid& v, int t, const FieldParams& params) {
  const double s = params.stencil_a() * params.spec.dt * params.spec.dx;
  return s * (u.row(t).dot(v.row(t + 1)) - u.row(t + 1).dot(v.row(t)));
}

TestFunction time_slice_source(const Eigen::VectorXd& early_data, const FieldParams& params) {
  const LatticeSpec& spec = params.spec;
  check_data(early_data, spec);
  if (spec.n_t < 6) throw DomainError("time-slice pull-back needs n_t >= 6");
  const int n = spec.n_x;
  const double a = params.stencil_a();
  const Eigen::VectorXd d2 = to_slices(evolve_free(early_data, 0, 2, params), spec.dt);
  Grid h = zero_grid(spec);
  h.row(2) = (-a * d2.tail(n)).transpose();
  h.row(3) = (a * d2.head(n)).transpose();
  return TestFunction(spec, std::move(h));
}

}  // namespace qftm
