#include <gtest/gtest.h>

#include <deque>
#include <random>

#include "qftm/errors.hpp"
#include "qftm/lattice.hpp"
#include "support.hpp"

using namespace qftm;

namespace {

// Breadth-first search along the stencil's one-step neighbours (t+1, x-1..x+1).
Region bfs_future(const Region& s) {
  const LatticeSpec& spec = s.spec();
  Region out = s;
  std::deque<LatticePoint> queue;
  for (const auto& p : s.points()) queue.push_back(p);
  while (!queue.empty()) {
    const LatticePoint p = queue.front();
    queue.pop_front();
    if (p.t + 1 >= spec.n_t) continue;
    for (int dx = -1; dx <= 1; ++dx) {
      int x = p.x + dx;
      if (spec.boundary == Boundary::periodic) {
        x = (x + spec.n_x) % spec.n_x;
      } else if (x < 0 || x >= spec.n_x) {
        continue;
      }
      const LatticePoint q{p.t + 1, x};
      if (!out.contains(q)) {
        out.insert(q);
        queue.push_back(q);
      }
    }
  }
  return out;
}

Region random_region(std::mt19937_64& rng, const LatticeSpec& spec, int n) {
  Region r(spec);
  for (int i = 0; i < n; ++i)
    r.insert({support::uniform_int(rng, 0, spec.n_t - 1), support::uniform_int(rng, 0, spec.n_x - 1)});
  return r;
}

// Brute-force hull: points lying between two points of s.
Region brute_hull(const Region& s) {
  const LatticeSpec& spec = s.spec();
  Region out(spec);
  const auto pts = s.points();
  for (int t = 0; t < spec.n_t; ++t)
    for (int x = 0; x < spec.n_x; ++x) {
      const LatticePoint p{t, x};
      bool below = false, above = false;
      for (const auto& q : pts) {
        below = below || causally_precedes(spec, q, p);
        above = above || causally_precedes(spec, p, q);
      }
      if (below && above) out.insert(p);
    }
  return out;
}

}  // namespace

TEST(Lattice, FutureMatchesBreadthFirstSearch) {
  std::mt19937_64 rng(11);
  for (Boundary b : {Boundary::periodic, Boundary::reflecting}) {
    LatticeSpec spec{24, 17, 0.25, 0.25, b};
    for (int trial = 0; trial < 20; ++trial) {
      const Region s = random_region(rng, spec, support::uniform_int(rng, 1, 4));
      EXPECT_EQ(causal_future(s), bfs_future(s));
    }
  }
}

TEST(Lattice, PastIsTimeReflectedFuture) {
  LatticeSpec spec{16, 16, 0.25, 0.25, Boundary::periodic};
  const Region p = Region::from_points(spec, std::vector<LatticePoint>{{10, 3}});
  const Region past = causal_past(p);
  for (const auto& q : past.points()) EXPECT_TRUE(causally_precedes(spec, q, {10, 3}));
  EXPECT_EQ(past.size(), causal_future(Region::from_points(spec, std::vector<LatticePoint>{{5, 3}})).size());
}

TEST(Lattice, HullMatchesBruteForceOnSmallGrids) {
  std::mt19937_64 rng(5);
  for (Boundary b : {Boundary::periodic, Boundary::reflecting}) {
    LatticeSpec spec{8, 8, 0.25, 0.25, b};
    for (int trial = 0; trial < 40; ++trial) {
      const Region s = random_region(rng, spec, support::uniform_int(rng, 1, 3));
      const Region h = causal_hull(s);
      EXPECT_EQ(h, brute_hull(s));
      EXPECT_TRUE(is_causally_convex(h));
      EXPECT_TRUE(s.subset_of(h));
    }
  }
}

TEST(Lattice, ComplementExcludesCones) {
  LatticeSpec spec{32, 32, 0.25, 0.25, Boundary::periodic};
  const Region k = Region::rectangle(spec, 10, 12, 10, 12);
  const Region perp = causal_complement(k);
  EXPECT_FALSE(perp.contains({11, 11}));
  EXPECT_TRUE(perp.contains({11, 20}));
  EXPECT_FALSE(perp.contains({20, 20}));
  EXPECT_FALSE(perp.intersects(causal_future(k)));
  EXPECT_FALSE(perp.intersects(causal_past(k)));
}

TEST(Lattice, ConvexityOfRectanglesAndCones) {
  LatticeSpec spec{16, 16, 0.25, 0.25, Boundary::reflecting};
  // A rectangle is not convex: a zig-zag between its left corners leaves it.
  const Region rect = Region::rectangle(spec, 3, 7, 2, 9);
  EXPECT_FALSE(is_causally_convex(rect));
  EXPECT_TRUE(is_causally_convex(causal_hull(rect)));
  EXPECT_TRUE(is_causally_convex(causal_future(rect)));
  Region two(spec);
  two.insert({2, 5});
  two.insert({6, 5});
  EXPECT_FALSE(is_causally_convex(two));
}

TEST(Lattice, PrecedesAndOrders) {
  LatticeSpec spec{40, 40, 0.25, 0.25, Boundary::periodic};
  const CouplingZone early(Region::rectangle(spec, 4, 6, 10, 12));
  const CouplingZone late(Region::rectangle(spec, 20, 22, 10, 12));
  const CouplingZone aside(Region::rectangle(spec, 4, 6, 30, 32));
  EXPECT_TRUE(precedes(early, late));
  EXPECT_FALSE(precedes(late, early));
  EXPECT_TRUE(precedes(early, aside));
  EXPECT_TRUE(precedes(aside, early));

  const std::vector<CouplingZone> zones{late, early, aside};
  const auto orders = enumerate_causal_orders(zones);
  // early before late; aside anywhere compatible with its relation to late.
  for (const auto& o : orders) {
    std::size_t pos_early = 0, pos_late = 0;
    for (std::size_t i = 0; i < o.size(); ++i) {
      if (o[i] == 1) pos_early = i;
      if (o[i] == 0) pos_late = i;
    }
    EXPECT_LT(pos_early, pos_late);
  }
  EXPECT_FALSE(orders.empty());

  const CouplingZone overlap(Region::rectangle(spec, 5, 21, 11, 11));
  const std::vector<CouplingZone> bad{overlap, early, late};
  EXPECT_TRUE(enumerate_causal_orders(bad).empty());
}

TEST(Lattice, WraparoundDetection) {
  LatticeSpec spec{64, 16, 0.25, 0.25, Boundary::periodic};
  const Region a = Region::rectangle(spec, 0, 1, 0, 1);
  const Region b = Region::rectangle(spec, 7, 8, 12, 13);
  const std::vector<Region> regions{a, b};
  EXPECT_FALSE(wraparound_free(regions));
  const std::vector<Region> small{Region::rectangle(spec, 0, 1, 0, 1), Region::rectangle(spec, 2, 3, 2, 3)};
  EXPECT_TRUE(wraparound_free(small));
}

TEST(Lattice, Errors) {
  LatticeSpec spec{8, 8, 0.25, 0.25, Boundary::periodic};
  EXPECT_THROW(Region::rectangle(spec, 3, 2, 0, 1), DomainError);
  EXPECT_THROW(Region::rectangle(spec, 0, 1, 0, 9), DomainError);
  EXPECT_THROW(causal_complement(Region(spec)), DomainError);
  EXPECT_THROW(CouplingZone(Region(spec)), DomainError);
  LatticeSpec bad = spec;
  bad.dt = 0.5;
  EXPECT_THROW(bad.validate(), DomainError);
  EXPECT_THROW(boundary_from_string("twisted"), DomainError);
}
