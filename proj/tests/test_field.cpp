#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qftm/errors.hpp"
#include "qftm/field.hpp"
#include "support.hpp"

using namespace qftm;

namespace {

FieldParams default_params(double mass = 1.0) {
  FieldParams p;
  p.mass = mass;
  return p;
}

}  // namespace

// Massless, dt == dx: the retarded response to a point source is dt^2 on every
// other site of the interior of the forward cone.
TEST(Field, MasslessPointSourceFillsCheckerboard) {
  const FieldParams p = default_params(0.0);
  const int t0 = 5, x0 = 30;
  const double amp = 1.7;
  const Grid u = retarded(TestFunction::point(p.spec, t0, x0, amp), p).values;
  const double dt2 = p.spec.dt * p.spec.dt;
  for (int t = 0; t < t0 + 30; ++t) {
    for (int x = 0; x < p.spec.n_x; ++x) {
      const int s = t - t0 - 1;
      const int d = std::abs(x - x0);
      const double expected = (s >= 0 && d <= s && (s - d) % 2 == 0) ? amp * dt2 : 0.0;
      ASSERT_NEAR(u(t, x), expected, 1e-14) << "t=" << t << " x=" << x;
    }
  }
}

TEST(Field, PlaneWaveObeysDiscreteDispersion) {
  for (double mass : {0.5, 1.0, 3.0}) {
    const FieldParams p = default_params(mass);
    const double a = p.stencil_a();
    for (int j : {0, 1, 5, 17, 32}) {
      const double k = 2.0 * std::numbers::pi * j / p.spec.n_x;
      const double kappa2 = 4.0 / (p.spec.dx * p.spec.dx) * std::pow(std::sin(k / 2.0), 2);
      const double theta = std::acos(0.5 * (2.0 / (p.spec.dt * p.spec.dt) - kappa2) / a);
      Grid u(p.spec.n_t, p.spec.n_x);
      for (int t = 0; t < p.spec.n_t; ++t)
        for (int x = 0; x < p.spec.n_x; ++x) u(t, x) = std::cos(k * x - theta * t);
      EXPECT_LT(klein_gordon_residual(u, TestFunction(p.spec), p), 1e-10) << "m=" << mass << " j=" << j;
    }
  }
}

TEST(Field, GreenResidualAndConeContainment) {
  std::mt19937_64 rng(3);
  for (Boundary b : {Boundary::periodic, Boundary::reflecting}) {
    FieldParams p = default_params();
    p.spec.boundary = b;
    for (int trial = 0; trial < 10; ++trial) {
      const TestFunction f = support::random_patch(rng, p.spec, 2, p.spec.n_t - 3);
      const Grid ret = retarded(f, p).values;
      const Grid adv = advanced(f, p).values;
      EXPECT_LT(klein_gordon_residual(ret, f, p), 1e-10);
      EXPECT_LT(klein_gordon_residual(adv, f, p), 1e-10);
      EXPECT_TRUE(grid_support(ret, p.spec).subset_of(causal_future(f.support())));
      EXPECT_TRUE(grid_support(adv, p.spec).subset_of(causal_past(f.support())));
      EXPECT_LT(klein_gordon_residual(pauli_jordan(f, p), TestFunction(p.spec), p), 1e-10);
    }
  }
}

TEST(Field, CommutatorFormIsSymplecticPairing) {
  std::mt19937_64 rng(4);
  const FieldParams p = default_params();
  for (int trial = 0; trial < 10; ++trial) {
    const TestFunction f = support::random_patch(rng, p.spec, 2, p.spec.n_t - 3);
    const TestFunction g = support::random_patch(rng, p.spec, 2, p.spec.n_t - 3);
    const double e = commutator_form(f, g, p);
    EXPECT_NEAR(e, -commutator_form(g, f, p), 1e-12);
    const Grid ef = pauli_jordan(f, p), eg = pauli_jordan(g, p);
    for (int t : {0, 17, p.spec.n_t - 2}) {
      const double sigma = cauchy_data(ef, t, p).dot(symplectic_matrix(p) * cauchy_data(eg, t, p));
      EXPECT_NEAR(sigma, e, 1e-10 * std::max(1.0, std::abs(e)));
      EXPECT_NEAR(symplectic_pairing(ef, eg, t, p), e, 1e-10 * std::max(1.0, std::abs(e)));
    }
  }
}

TEST(Field, CommutatorVanishesForSpacelikeSupports) {
  const FieldParams p = default_params();
  const TestFunction f = TestFunction::gaussian_bump(Region::rectangle(p.spec, 20, 24, 5, 9), 22, 7, 1, 1, 1);
  const TestFunction g = TestFunction::gaussian_bump(Region::rectangle(p.spec, 20, 24, 30, 34), 22, 32, 1, 1, 1);
  EXPECT_EQ(commutator_form(f, g, p), 0.0);
}

TEST(Field, CauchyRoundTrips) {
  std::mt19937_64 rng(9);
  const FieldParams p = default_params(0.7);
  const TestFunction f = support::random_patch(rng, p.spec, 10, 20);
  const Grid u = pauli_jordan(f, p);
  const Eigen::VectorXd d0 = cauchy_data(u, 0, p);
  const Grid v = solution_from_cauchy(d0, 0, p);
  EXPECT_LT((u - v).cwiseAbs().maxCoeff(), 1e-10);
  const Eigen::VectorXd late = evolve_free(d0, 0, 50, p);
  EXPECT_LT((late - cauchy_data(u, 50, p)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((evolve_free(late, 50, 0, p) - d0).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Field, TimeSliceSourceReproducesSolution) {
  std::mt19937_64 rng(10);
  for (Boundary b : {Boundary::periodic, Boundary::reflecting}) {
    FieldParams p = default_params();
    p.spec.boundary = b;
    const TestFunction f = support::random_patch(rng, p.spec, 30, 40);
    const Eigen::VectorXd d0 = cauchy_data(pauli_jordan(f, p), 0, p);
    const TestFunction h = time_slice_source(d0, p);
    EXPECT_GE(h.support().min_t(), 2);
    EXPECT_LE(h.support().max_t(), 3);
    EXPECT_LT((pauli_jordan(h, p) - pauli_jordan(f, p)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Field, PaddingErrors) {
  const FieldParams p = default_params();
  EXPECT_THROW(retarded(TestFunction::point(p.spec, p.spec.n_t - 2, 3, 1.0), p), DomainError);
  EXPECT_THROW(advanced(TestFunction::point(p.spec, 1, 3, 1.0), p), DomainError);
  EXPECT_NO_THROW(retarded(TestFunction::point(p.spec, p.spec.n_t - 3, 3, 1.0), p));
  EXPECT_NO_THROW(advanced(TestFunction::point(p.spec, 2, 3, 1.0), p));
  EXPECT_TRUE(retarded(TestFunction(p.spec), p).values.isZero(0.0));
}
