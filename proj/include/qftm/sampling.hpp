#pragma once

// Seeded random test functions, states and probes for the test binaries and verify suites.

#include <random>

#include "qftm/instruments.hpp"
#include "qftm/lattice.hpp"

namespace qftm::sampling {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// Random values on a random rectangle of the given size range inside slices [t_lo, t_hi].
inline TestFunction random_patch(std::mt19937_64& rng, const LatticeSpec& spec, int t_lo, int t_hi, int max_w = 4) {
  const int w_t = uniform_int(rng, 1, max_w);
  const int w_x = uniform_int(rng, 1, max_w);
  const int t0 = uniform_int(rng, t_lo, t_hi - w_t + 1);
  const int x0 = uniform_int(rng, 0, spec.n_x - w_x);
  Grid v = Grid::Zero(spec.n_t, spec.n_x);
  for (int t = t0; t < t0 + w_t; ++t)
    for (int x = x0; x < x0 + w_x; ++x) v(t, x) = uniform(rng, -1.0, 1.0);
  return TestFunction(spec, std::move(v));
}

/// Gaussian bump with a random centre inside `box`.
inline TestFunction random_bump(std::mt19937_64& rng, const Region& box, double amplitude = 1.0) {
  const auto pts = box.points();
  const auto& c = pts[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(pts.size()) - 1))];
  return TestFunction::gaussian_bump(box, c.t, c.x, uniform(rng, 0.8, 2.0), uniform(rng, 0.8, 2.0), amplitude);
}

/// Random vector of generators of bumps in the given sector.
inline Eigen::VectorXd random_generator(std::mt19937_64& rng, const PhaseSpace& space, const Region& box,
                                        int sector = 0, double amplitude = 1.0) {
  return space.generator(random_bump(rng, box, uniform(rng, -amplitude, amplitude)), sector);
}

/// Vacuum displaced by a random mean, optionally with an extra rank-one covariance.
inline QuasiFreeState random_state(std::mt19937_64& rng, const FieldParams& params, const Region& box,
                                   const std::string& label = "system") {
  QuasiFreeState s = vacuum_state(params, label);
  const Eigen::VectorXd v = random_generator(rng, s.space, box);
  const Eigen::VectorXd w = random_generator(rng, s.space, box);
  s = displaced(std::move(s), s.space.omega() * v);
  return with_extra_covariance(std::move(s), s.space.omega() * w, uniform(rng, 0.0, 0.5));
}

/// Probe with a Gaussian coupling profile on `zone` and the vacuum as preparation.
inline ProbeSpec vacuum_probe(const std::string& label, const FieldParams& params, const Region& zone, double strength,
                              double width = 1.5) {
  double t0 = 0.0, x0 = 0.0;
  const auto pts = zone.points();
  for (const auto& p : pts) {
    t0 += p.t;
    x0 += p.x;
  }
  t0 /= static_cast<double>(pts.size());
  x0 /= static_cast<double>(pts.size());
  return ProbeSpec{label, params, vacuum_state(params, label),
                   CouplingProfile{strength, TestFunction::gaussian_bump(zone, t0, x0, width, width, 1.0)}};
}

}  // namespace qftm::sampling
