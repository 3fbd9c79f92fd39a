#include "qftm/sorkin.hpp"

#include <fmt/format.h>

#include <cmath>

#include "qftm/errors.hpp"

namespace qftm {

void validate(const SorkinConfig& cfg) {
  const auto require = [](bool ok, const char* predicate) {
    if (!ok) throw GeometryError(std::string("sorkin layout violates: ") + predicate);
  };
  require(cfg.f.support().subset_of(cfg.o1), "supp f within O1");
  require(cfg.g.support().subset_of(cfg.o2), "supp g within O2");
  require(cfg.h.support().subset_of(cfg.o3), "supp h within O3");
  require(cfg.o3.subset_of(causal_complement(cfg.o1)), "O3 within the causal complement of O1");
  require(causal_future(cfg.o1).intersects(cfg.o2), "J+(O1) meets O2");
  require(causal_future(cfg.o2).intersects(cfg.o3), "J+(O2) meets O3");
}

TestFunction conjugate_weyl_by_quadratic(const TestFunction& g, const TestFunction& h, const FieldParams& params) {
  return h + 2.0 * commutator_form(g, h, params) * g;
}

CharlieExpectations charlie_expectations(const SorkinConfig& cfg) {
  validate(cfg);
  const FieldParams& p = cfg.params;
  const StateFunctional omega = cfg.state ? *cfg.state : StateFunctional(vacuum_state(p));
  const PhaseSpace& space = omega.space();
  if (space.sector_count() != 1 || !(space.sector(0).params == p))
    throw DomainError("sorkin state must live on the single system sector");

  CharlieExpectations r;
  r.e_fg = commutator_form(cfg.f, cfg.g, p);
  r.e_gh = commutator_form(cfg.g, cfg.h, p);
  r.gap = 2.0 * r.e_gh * r.e_fg;

  const Eigen::VectorXd gh = space.generator(cfg.h);
  const Eigen::VectorXd gg = space.generator(cfg.g);
  const Eigen::VectorXd h_eff = gh + 2.0 * r.e_gh * gg;

  r.mean_b = (field_moment(omega, {gh}) + 2.0 * r.e_gh * field_moment(omega, {gg})).real();
  const Complex without = field_moment(omega, {h_eff});
  const Complex with = field_moment(omega.conjugated_by_weyl(space.generator(cfg.f)), {h_eff});
  r.mean_ba = with.real();
  r.gap_weyl_route = (with - without).real();
  return r;
}

TestFunction find_signaling_g(const TestFunction& f, const TestFunction& h, const Region& o2, const FieldParams& params,
                              double sigma_t, double sigma_x, int stride, double threshold) {
  if (stride < 1) throw DomainError("scan stride must be positive");
  const LatticeSpec& spec = params.spec;
  if (!grid_support(retarded(f, params).values, spec).intersects(o2))
    throw GeometryError("no signaling geometry: supp E^ret f misses O2");
  if (!grid_support(advanced(h, params).values, spec).intersects(o2))
    throw GeometryError("no signaling geometry: supp E^adv h misses O2");

  // E(f, g) = -sum g (E f) dvol and E(g, h) = sum g (E h) dvol.
  const Grid ef = pauli_jordan(f, params);
  const Grid eh = pauli_jordan(h, params);
  double best = -1.0;
  std::optional<TestFunction> best_g;
  for (const auto& c : o2.points()) {
    if ((c.t - o2.min_t()) % stride != 0 || c.x % stride != 0) continue;
    TestFunction g = TestFunction::gaussian_bump(o2, c.t, c.x, sigma_t, sigma_x, 1.0);
    const double efg = -g.values().cwiseProduct(ef).sum() * spec.dvol();
    const double egh = g.values().cwiseProduct(eh).sum() * spec.dvol();
    const double score = std::min(std::abs(efg), std::abs(egh));
    if (score > best) {
      best = score;
      best_g = std::move(g);
    }
  }
  if (!best_g || best <= threshold)
    throw GeometryError(fmt::format("no signaling geometry: best bump in O2 reaches min(|E(f,g)|, |E(g,h)|) = {:.3g}", best));
  return *best_g;
}

SorkinConfig default_sorkin_layout(const FieldParams& params) {
  const LatticeSpec& spec = params.spec;
  if (spec.n_t < 32 || spec.n_x < 48) throw DomainError("the bundled sorkin layout needs at least a 32 x 48 lattice");
  const Region o1 = Region::rectangle(spec, 4, 9, 6, 13);
  const Region o2 = Region::rectangle(spec, 13, 20, 10, 40);
  const Region o3 = Region::rectangle(spec, 24, 29, 39, 44);
  SorkinConfig cfg{params,
                   o1,
                   o2,
                   o3,
                   TestFunction::gaussian_bump(o1, 6.5, 9.5, 1.5, 1.5, 1.0),
                   TestFunction::gaussian_bump(o2, 16.0, 25.0, 1.5, 5.0, 1.0),
                   TestFunction::gaussian_bump(o3, 26.5, 41.5, 1.5, 1.5, 1.0),
                   std::nullopt};
  return cfg;
}

}  // namespace qftm
