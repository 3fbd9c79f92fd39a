#pragma once

// The three-region unitary-kick scenario: Alice applies U1 = W(f) in O1, Bob
// applies a unitary quadratic in phi(g) in O2, Charlie measures phi(h) in O3.
// Bob's unitary acts on Charlie's field as
//
//   U2* exp(i phi(h)) U2 = exp(i phi(h + 2 E(g, h) g)),
//
// so Alice's kick shifts Charlie's mean by 2 E(g, h) E(f, g) even though O1 and
// O3 are causally disjoint.

#include <optional>

#include "qftm/state.hpp"

namespace qftm {

struct SorkinConfig {
  FieldParams params;
  Region o1, o2, o3;
  TestFunction f, g, h;
  /// Defaults to the vacuum when empty.
  std::optional<StateFunctional> state;
};

/// Throws GeometryError naming the first failed predicate: supports inside
/// their regions, O3 inside the causal complement of O1, J+(O1) meeting O2,
/// J+(O2) meeting O3.
void validate(const SorkinConfig& cfg);

/// h + 2 E(g, h) g.
TestFunction conjugate_weyl_by_quadratic(const TestFunction& g, const TestFunction& h, const FieldParams& params);

struct CharlieExpectations {
  double e_fg = 0.0;
  double e_gh = 0.0;
  /// <U2* phi(h) U2> without Alice.
  double mean_b = 0.0;
  /// <U1* U2* phi(h) U2 U1> with Alice.
  double mean_ba = 0.0;
  /// 2 E(g, h) E(f, g).
  double gap = 0.0;
  /// mean_ba - mean_b, from the state conjugated by W(f) and the field moment of h + 2 E(g, h) g.
  double gap_weyl_route = 0.0;
};

CharlieExpectations charlie_expectations(const SorkinConfig& cfg);

/// Gaussian bump in O2 with |E(f, g)| and |E(g, h)| both above `threshold`,
/// choosing among centres on a stride grid the one that maximizes the smaller
/// of the two. Throws GeometryError ("no signaling geometry") if E^ret f or
/// E^adv h misses O2, or if no candidate clears the threshold.
TestFunction find_signaling_g(const TestFunction& f, const TestFunction& h, const Region& o2, const FieldParams& params,
                              double sigma_t, double sigma_x, int stride = 2, double threshold = 1e-6);

/// The bundled layout on the default 64 x 64 lattice.
SorkinConfig default_sorkin_layout(const FieldParams& params = {});

}  // namespace qftm
