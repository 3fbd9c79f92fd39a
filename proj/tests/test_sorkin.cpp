#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qftm/errors.hpp"
#include "qftm/sorkin.hpp"
#include "support.hpp"

using namespace qftm;

TEST(Sorkin, DefaultLayoutGap) {
  const SorkinConfig cfg = default_sorkin_layout();
  const CharlieExpectations r = charlie_expectations(cfg);
  // Green oracle: E(f, g) as sum f (E^adv g - E^ret g) dvol from independent solves.
  const FieldParams& p = cfg.params;
  const Grid eg = advanced(cfg.g, p).values - retarded(cfg.g, p).values;
  const double efg = cfg.f.values().cwiseProduct(eg).sum() * p.spec.dvol();
  const Grid eh = advanced(cfg.h, p).values - retarded(cfg.h, p).values;
  const double egh = cfg.g.values().cwiseProduct(eh).sum() * p.spec.dvol();
  EXPECT_NEAR(r.e_fg, efg, 1e-14);
  EXPECT_NEAR(r.e_gh, egh, 1e-14);
  EXPECT_NEAR(r.gap, 2.0 * egh * efg, 1e-14);
  EXPECT_NEAR(r.gap, r.gap_weyl_route, 1e-10);
  EXPECT_GT(std::abs(r.gap), 1e-3);
  EXPECT_NEAR(r.mean_ba - r.mean_b, r.gap, 1e-10);
}

TEST(Sorkin, GapIsStateIndependentAndBilinear) {
  std::mt19937_64 rng(31);
  SorkinConfig cfg = default_sorkin_layout();
  const CharlieExpectations base = charlie_expectations(cfg);
  cfg.state = StateFunctional(support::random_state(rng, cfg.params, Region::rectangle(cfg.params.spec, 4, 59, 0, 63)));
  const CharlieExpectations other = charlie_expectations(cfg);
  EXPECT_NEAR(other.gap_weyl_route, base.gap, 1e-10);
  EXPECT_GT(std::abs(other.mean_b - base.mean_b), 1e-6);  // the means themselves do depend on the state

  SorkinConfig scaled = default_sorkin_layout();
  scaled.f = 2.0 * scaled.f;
  EXPECT_NEAR(charlie_expectations(scaled).gap, 2.0 * base.gap, 1e-12);
  scaled.h = -0.5 * scaled.h;
  EXPECT_NEAR(charlie_expectations(scaled).gap, -base.gap, 1e-12);
}

TEST(Sorkin, ConjugatedObservableLeavesO3) {
  const SorkinConfig cfg = default_sorkin_layout();
  const TestFunction h_eff = conjugate_weyl_by_quadratic(cfg.g, cfg.h, cfg.params);
  EXPECT_FALSE(h_eff.support().subset_of(cfg.o3));
  EXPECT_TRUE(h_eff.support().intersects(cfg.o2));
  EXPECT_LT((conjugate_weyl_by_quadratic(cfg.g, cfg.g, cfg.params).values() - cfg.g.values()).cwiseAbs().maxCoeff(),
            1e-15);
}

TEST(Sorkin, VanishingGapWhenAPairIsSpacelike) {
  SorkinConfig cfg = default_sorkin_layout();
  const LatticeSpec& spec = cfg.params.spec;
  // g far from both cones inside a widened O2.
  cfg.o2 = Region::rectangle(spec, 13, 20, 10, 60);
  cfg.g = TestFunction::gaussian_bump(Region::rectangle(spec, 15, 17, 48, 50), 16, 49, 1, 1, 1);
  const CharlieExpectations r = charlie_expectations(cfg);
  EXPECT_EQ(r.e_fg, 0.0);
  EXPECT_EQ(r.gap, 0.0);
  EXPECT_NEAR(r.gap_weyl_route, 0.0, 1e-12);
}

TEST(Sorkin, SignalingSearch) {
  const SorkinConfig cfg = default_sorkin_layout();
  const TestFunction g = find_signaling_g(cfg.f, cfg.h, cfg.o2, cfg.params, 1.5, 5.0);
  EXPECT_TRUE(g.support().subset_of(cfg.o2));
  EXPECT_GT(std::abs(commutator_form(cfg.f, g, cfg.params)), 1e-6);
  EXPECT_GT(std::abs(commutator_form(g, cfg.h, cfg.params)), 1e-6);

  const LatticeSpec& spec = cfg.params.spec;
  const Region far = Region::rectangle(spec, 13, 20, 32, 40);
  EXPECT_THROW(find_signaling_g(cfg.f, cfg.h, far, cfg.params, 1.5, 5.0), GeometryError);
}

TEST(Sorkin, GeometryViolationsAreNamed) {
  SorkinConfig cfg = default_sorkin_layout();
  cfg.o3 = Region::rectangle(cfg.params.spec, 24, 29, 14, 20);
  cfg.h = TestFunction::gaussian_bump(cfg.o3, 26, 17, 1, 1, 1);
  try {
    charlie_expectations(cfg);
    FAIL() << "expected a geometry error";
  } catch (const GeometryError& e) {
    EXPECT_NE(std::string(e.what()).find("causal complement of O1"), std::string::npos);
  }
}
