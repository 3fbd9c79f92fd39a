#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qftm/errors.hpp"
#include "qftm/state.hpp"
#include "support.hpp"

using namespace qftm;

namespace {

constexpr Complex I{0.0, 1.0};

// Mode sum over plane waves e^{ikx}/sqrt(n) of the periodic lattice:
// W(f, f) = sum_k dx dt |R_k|^2 / (2 a sin theta_k), R_k = sum_t <e_k, f_t> e^{i theta_k t}.
double mode_sum_two_point(const TestFunction& f, const FieldParams& p) {
  const int n = p.spec.n_x;
  const double a = p.stencil_a();
  double w = 0.0;
  for (int j = 0; j < n; ++j) {
    const double k = 2.0 * std::numbers::pi * j / n;
    const double kappa2 = 4.0 / (p.spec.dx * p.spec.dx) * std::pow(std::sin(k / 2.0), 2);
    const double theta = std::acos(0.5 * (2.0 / (p.spec.dt * p.spec.dt) - kappa2) / a);
    Complex r = 0.0;
    for (int t = 0; t < p.spec.n_t; ++t) {
      Complex proj = 0.0;
      for (int x = 0; x < n; ++x) proj += f(t, x) * std::polar(1.0 / std::sqrt(n), -k * x);
      r += proj * std::polar(1.0, theta * t);
    }
    w += p.spec.dx * p.spec.dt * std::norm(r) / (2.0 * a * std::sin(theta));
  }
  return w;
}

FieldParams small_params(double mass = 1.0) {
  FieldParams p;
  p.mass = mass;
  p.spec.n_t = 32;
  p.spec.n_x = 24;
  return p;
}

}  // namespace

TEST(Vacuum, MatchesModeSum) {
  std::mt19937_64 rng(21);
  for (double mass : {0.5, 1.0, 2.0}) {
    const FieldParams p = small_params(mass);
    for (int trial = 0; trial < 5; ++trial) {
      const TestFunction f = support::random_patch(rng, p.spec, 2, p.spec.n_t - 3, 5);
      const double expected = mode_sum_two_point(f, p);
      EXPECT_NEAR(vacuum_two_point(p, f, f), expected, 1e-10 * std::max(1.0, expected)) << "m=" << mass;
    }
  }
}

TEST(Vacuum, SingleModeTwoPoint) {
  const FieldParams p = small_params();
  Grid v = Grid::Zero(p.spec.n_t, p.spec.n_x);
  for (int x = 0; x < p.spec.n_x; ++x) v(10, x) = std::cos(2.0 * std::numbers::pi * 3 * x / p.spec.n_x);
  const TestFunction f(p.spec, v);
  // Only modes +-3 contribute: |<e_k, f_10>|^2 = n/4 each.
  const double k = 2.0 * std::numbers::pi * 3 / p.spec.n_x;
  const double kappa2 = 4.0 / (p.spec.dx * p.spec.dx) * std::pow(std::sin(k / 2.0), 2);
  const double a = p.stencil_a();
  const double theta = std::acos(0.5 * (2.0 / (p.spec.dt * p.spec.dt) - kappa2) / a);
  const double expected = 2.0 * p.spec.dx * p.spec.dt * (p.spec.n_x / 4.0) / (2.0 * a * std::sin(theta));
  EXPECT_NEAR(vacuum_two_point(p, f, f), expected, 1e-10);
}

TEST(Vacuum, TranslationInvarianceAndStationarity) {
  std::mt19937_64 rng(22);
  const FieldParams p = small_params();
  const TestFunction f = support::random_patch(rng, p.spec, 4, 10);
  Grid shifted = Grid::Zero(p.spec.n_t, p.spec.n_x);
  for (int t = 0; t + 5 < p.spec.n_t; ++t)
    for (int x = 0; x < p.spec.n_x; ++x) shifted(t + 5, (x + 7) % p.spec.n_x) = f(t, x);
  EXPECT_NEAR(vacuum_two_point(p, f, f), vacuum_two_point(p, TestFunction(p.spec, shifted), TestFunction(p.spec, shifted)),
              1e-10);
  const QuasiFreeState v = vacuum_state(p);
  const Eigen::MatrixXd prop = free_propagator(p, 0, 13);
  EXPECT_LT((prop.transpose() * v.covariance * prop - v.covariance).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Vacuum, PureAndPositive) {
  const QuasiFreeState v = vacuum_state(small_params());
  const double margin = v.positivity_margin();
  EXPECT_GT(margin, -1e-10);
  EXPECT_LT(margin, 1e-8);  // pure: the bound is saturated
  FieldParams reflecting = small_params();
  reflecting.spec.boundary = Boundary::reflecting;
  EXPECT_GT(vacuum_state(reflecting).positivity_margin(), -1e-10);
}

TEST(Vacuum, MasslessIsRejected) { EXPECT_THROW(vacuum_state(small_params(0.0)), DomainError); }

TEST(Vacuum, UncertaintyBoundOnPairs) {
  std::mt19937_64 rng(23);
  const FieldParams p = small_params();
  const QuasiFreeState v = vacuum_state(p);
  for (int trial = 0; trial < 20; ++trial) {
    const TestFunction f = support::random_patch(rng, p.spec, 2, p.spec.n_t - 3);
    const TestFunction g = support::random_patch(rng, p.spec, 2, p.spec.n_t - 3);
    const double wff = vacuum_two_point(p, f, f), wgg = vacuum_two_point(p, g, g);
    const double e = commutator_form(f, g, p);
    EXPECT_GE(wff * wgg + 1e-12, 0.25 * e * e);
  }
}

TEST(Weyl, GroupLawAndAssociativity) {
  std::mt19937_64 rng(24);
  const FieldParams p = small_params();
  const PhaseSpace space = PhaseSpace::single("system", p);
  const Region box = Region::rectangle(p.spec, 4, 26, 0, p.spec.n_x - 1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = AlgebraElement::weyl(space, support::random_generator(rng, space, box), support::uniform(rng, -1, 1));
    const auto b = AlgebraElement::weyl(space, support::random_generator(rng, space, box), Complex(0.3, -0.2)) +
                   AlgebraElement::unit(space, 0.5);
    const auto c = AlgebraElement::weyl(space, support::random_generator(rng, space, box));
    EXPECT_LT(weyl_multiply(weyl_multiply(a, b), c).distance(weyl_multiply(a, weyl_multiply(b, c))), 1e-10);
    EXPECT_LT(a.adjoint().adjoint().distance(a), 1e-15);
  }
  const Eigen::VectorXd f = support::random_generator(rng, space, box);
  const auto prod = weyl_multiply(AlgebraElement::weyl(space, f), AlgebraElement::weyl(space, Eigen::VectorXd(-f)));
  EXPECT_LT(prod.distance(AlgebraElement::unit(space)), 1e-15);
}

TEST(Weyl, PhaseFromCommutatorForm) {
  const FieldParams p = small_params();
  const PhaseSpace space = PhaseSpace::single("system", p);
  const TestFunction f = TestFunction::gaussian_bump(Region::rectangle(p.spec, 5, 9, 5, 9), 7, 7, 1, 1, 1);
  const TestFunction g = TestFunction::gaussian_bump(Region::rectangle(p.spec, 12, 16, 8, 12), 14, 10, 1, 1, 1);
  const auto prod = weyl_multiply(AlgebraElement::weyl(space, f), AlgebraElement::weyl(space, g));
  ASSERT_EQ(prod.terms().size(), 1u);
  const double e = commutator_form(f, g, p);
  EXPECT_NEAR(std::arg(prod.terms()[0].coeff), -0.5 * e, 1e-12);
  EXPECT_THROW(weyl_multiply(AlgebraElement::unit(space), AlgebraElement::unit(PhaseSpace::single("probe", p))),
               DomainError);
}

TEST(States, PositivityOfSquares) {
  std::mt19937_64 rng(25);
  const FieldParams p = small_params();
  const Region box = Region::rectangle(p.spec, 4, 26, 0, p.spec.n_x - 1);
  for (int trial = 0; trial < 10; ++trial) {
    const StateFunctional s(support::random_state(rng, p, box));
    AlgebraElement a(s.space());
    for (int j = 0; j < 4; ++j)
      a = a + AlgebraElement::weyl(s.space(), support::random_generator(rng, s.space(), box, 0, 2.0),
                                   Complex(support::uniform(rng, -1, 1), support::uniform(rng, -1, 1)));
    const Complex v = s.evaluate(weyl_multiply(a.adjoint(), a));
    EXPECT_GT(v.real(), -1e-10);
    EXPECT_LT(std::abs(v.imag()), 1e-10);
    std::vector<Eigen::VectorXd> gens;
    for (int j = 0; j < 6; ++j) gens.push_back(support::random_generator(rng, s.space(), box, 0, 2.0));
    EXPECT_GT(gram_min_eigenvalue(s, gens), -1e-8);
    EXPECT_LE(std::abs(s.characteristic(gens[0])), 1.0 + 1e-12);
  }
}

TEST(States, CoherentDisplacementRatio) {
  std::mt19937_64 rng(26);
  const FieldParams p = small_params();
  const Region box = Region::rectangle(p.spec, 4, 26, 0, p.spec.n_x - 1);
  const StateFunctional vac(vacuum_state(p));
  const Eigen::VectorXd f = support::random_generator(rng, vac.space(), box);
  const StateFunctional kicked = vac.conjugated_by_weyl(f);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXd g = support::random_generator(rng, vac.space(), box);
    const Complex ratio = kicked.characteristic(g) / vac.characteristic(g);
    EXPECT_LT(std::abs(ratio - std::polar(1.0, vac.space().sigma(f, g))), 1e-12);
    // The same state as a shifted mean.
    const StateFunctional shifted(displaced(vac.base(), vac.space().omega().transpose() * f));
    EXPECT_LT(std::abs(kicked.characteristic(g) - shifted.characteristic(g)), 1e-12);
  }
}

TEST(Moments, WickAndMeans) {
  std::mt19937_64 rng(27);
  const FieldParams p = small_params();
  const Region box = Region::rectangle(p.spec, 4, 26, 0, p.spec.n_x - 1);
  const StateFunctional vac(vacuum_state(p));
  const TestFunction h = support::random_bump(rng, box);
  const Eigen::VectorXd H = vac.space().generator(h);
  const double w = vacuum_two_point(p, h, h);
  EXPECT_LT(std::abs(field_moment(vac, {H})), 1e-15);
  EXPECT_NEAR(field_moment(vac, {H, H}).real(), w, 1e-12);
  EXPECT_NEAR(field_moment(vac, {H, H, H, H}).real(), 3.0 * w * w, 1e-9);
  EXPECT_LT(std::abs(field_moment(vac, {H, H, H})), 1e-12);
  EXPECT_THROW(field_moment(vac, {H, H, H, H, H}), UnsupportedError);

  // Two distinct smearings: <phi(f) phi(g)> - <phi(g) phi(f)> = i E(f, g).
  const TestFunction g = support::random_bump(rng, box);
  const Eigen::VectorXd G = vac.space().generator(g);
  const Complex comm = field_moment(vac, {H, G}) - field_moment(vac, {G, H});
  EXPECT_LT(std::abs(comm - I * commutator_form(h, g, p)), 1e-12);

  // Displaced: <phi(h)> = mean.H, and moments match finite-order Wick with the mean.
  const Eigen::VectorXd mu = vac.space().omega() * G;
  const StateFunctional d(displaced(vac.base(), mu));
  const double m = mu.dot(H);
  EXPECT_NEAR(field_moment(d, {H}).real(), m, 1e-12);
  EXPECT_NEAR(field_moment(d, {H, H}).real(), w + m * m, 1e-12);
  EXPECT_NEAR(field_moment(d, {H, H, H, H}).real(), 3 * w * w + 6 * w * m * m + m * m * m * m, 1e-9);
}

TEST(States, PullBackMatchesDirectEvaluation) {
  std::mt19937_64 rng(28);
  const FieldParams p = small_params();
  const Region box = Region::rectangle(p.spec, 4, 26, 0, p.spec.n_x - 1);
  const StateFunctional a(support::random_state(rng, p, box, "a"));
  const StateFunctional b(support::random_state(rng, p, box, "b"));
  const StateFunctional ab = tensor(a, b).conjugated_by_weyl(Eigen::VectorXd::Random(2 * a.space().dim()));
  const int d = a.space().dim();
  const Eigen::MatrixXd M = Eigen::MatrixXd::Random(2 * d, d) * 0.1;
  const Eigen::VectorXd x0 = Eigen::VectorXd::Random(2 * d);
  const Eigen::VectorXd x1 = Eigen::VectorXd::Random(2 * d);
  const StateFunctional pb = ab.pull_back(M, a.space(), {{Complex(0.3, 0.1), x0}, {0.7, x1}});
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXd F = support::random_generator(rng, a.space(), box);
    const Complex direct = Complex(0.3, 0.1) * ab.characteristic(M * F + x0) + 0.7 * ab.characteristic(M * F + x1);
    EXPECT_LT(std::abs(pb.characteristic(F) - direct), 1e-12);
  }
  const StateFunctional marg = tensor(a, b).marginal(1, 1);
  const Eigen::VectorXd G = support::random_generator(rng, b.space(), box);
  EXPECT_LT(std::abs(marg.characteristic(G) - b.characteristic(G)), 1e-14);
}

TEST(States, RecordRoundTrip) {
  std::mt19937_64 rng(29);
  FieldParams p = small_params();
  p.spec.n_x = 6;
  p.spec.n_t = 10;
  const Region box = Region::rectangle(p.spec, 2, 7, 0, 5);
  const StateFunctional s = StateFunctional(support::random_state(rng, p, box)).conjugated_by_weyl(
      support::random_generator(rng, PhaseSpace::single("system", p), box));
  std::stringstream buf;
  write_record(buf, s);
  const StateFunctional r = read_record(buf);
  EXPECT_EQ(r.base().covariance, s.base().covariance);
  EXPECT_EQ(r.base().mean, s.base().mean);
  ASSERT_EQ(r.components().size(), s.components().size());
  EXPECT_EQ(r.components()[0].z, s.components()[0].z);
  std::stringstream again;
  write_record(again, r);
  std::stringstream first;
  write_record(first, s);
  EXPECT_EQ(again.str(), first.str());
}

TEST(States, NormalizationGuardsNull) {
  const StateFunctional s(vacuum_state(small_params()));
  EXPECT_THROW((s * 1e-13).normalized(), NullConditioningError);
  EXPECT_NEAR((s * 0.25).normalized().norm().real(), 1.0, 1e-15);
}

// Frozen record of a small displaced, Weyl-conjugated vacuum. Regenerate with
// QFTM_UPDATE_GOLDEN=1 after an intentional format change.
TEST(States, RecordMatchesGoldenFile) {
  FieldParams p;
  p.spec.n_t = 8;
  p.spec.n_x = 4;
  const PhaseSpace space = PhaseSpace::single("system", p);
  const QuasiFreeState vac = vacuum_state(p);
  const StateFunctional s =
      StateFunctional(displaced(vac, space.omega() * space.generator(TestFunction::point(p.spec, 4, 1, 1.0))))
          .conjugated_by_weyl(space.generator(TestFunction::point(p.spec, 3, 2, 0.5)));
  std::stringstream out;
  write_record(out, s);
  const std::string path = std::string(QFTM_GOLDEN_DIR) + "/state_record_8x4.txt";
  if (std::getenv("QFTM_UPDATE_GOLDEN")) std::ofstream(path) << out.str();
  std::ifstream in(path);
  ASSERT_TRUE(in.good()) << path;
  std::stringstream golden;
  golden << in.rdbuf();
  EXPECT_EQ(out.str(), golden.str());
  std::istringstream back(golden.str());
  const StateFunctional r = read_record(back);
  const Eigen::VectorXd f = space.generator(TestFunction::point(p.spec, 5, 0, 0.7));
  EXPECT_EQ(r.characteristic(f), s.characteristic(f));
}
