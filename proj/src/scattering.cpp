#include "qftm/scattering.hpp"

#include <fmt/format.h>

#include <cmath>

#include "qftm/errors.hpp"

namespace qftm {

namespace {

// B X = (2/dt^2) X + D X applied to every column of an n_x x c block.
Eigen::MatrixXd apply_b(const Eigen::MatrixXd& x, const FieldParams& p) {
  const LatticeSpec& spec = p.spec;
  const int n = spec.n_x;
  const double inv = 1.0 / (spec.dx * spec.dx);
  const bool periodic = spec.boundary == Boundary::periodic;
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (int i = 0; i < n; ++i) {
    const int l = i > 0 ? i - 1 : (periodic ? n - 1 : 0);
    const int r = i + 1 < n ? i + 1 : (periodic ? 0 : n - 1);
    out.row(i) = (x.row(l) - 2.0 * x.row(i) + x.row(r)) * inv;
  }
  out += (2.0 / (spec.dt * spec.dt)) * x;
  return out;
}

struct Slices {
  std::vector<Eigen::MatrixXd> lo, hi;  // per sector, slices (k, k+1)
};

Slices to_slices(const PhaseSpace& space, const Eigen::MatrixXd& data) {
  Slices s;
  for (int i = 0; i < space.sector_count(); ++i) {
    const int n = space.sector(i).params.spec.n_x;
    const double dt = space.sector(i).params.spec.dt;
    const auto phi = data.middleRows(space.offset(i), n);
    const auto pi = data.middleRows(space.offset(i) + n, n);
    s.lo.emplace_back(phi);
    s.hi.emplace_back(phi + dt * pi);
  }
  return s;
}

Eigen::MatrixXd from_slices(const PhaseSpace& space, const Slices& s, Eigen::Index cols) {
  Eigen::MatrixXd out(space.dim(), cols);
  for (int i = 0; i < space.sector_count(); ++i) {
    const int n = space.sector(i).params.spec.n_x;
    const double dt = space.sector(i).params.spec.dt;
    out.middleRows(space.offset(i), n) = s.lo[static_cast<std::size_t>(i)];
    out.middleRows(space.offset(i) + n, n) = (s.hi[static_cast<std::size_t>(i)] - s.lo[static_cast<std::size_t>(i)]) / dt;
  }
  return out;
}

// Cross sources on slice t given the field values u on that slice.
std::vector<Eigen::MatrixXd> sources(const std::vector<CouplingProfile>& couplings, const std::vector<Eigen::MatrixXd>& u,
                                     int t) {
  std::vector<Eigen::MatrixXd> src;
  for (const auto& x : u) src.push_back(Eigen::MatrixXd::Zero(x.rows(), x.cols()));
  for (std::size_t j = 0; j < couplings.size(); ++j) {
    const CouplingProfile& c = couplings[j];
    if (c.strength == 0.0) continue;
    const Eigen::VectorXd rho = c.shape.values().row(t).transpose();
    if (rho.isZero(0.0)) continue;
    src[0].noalias() -= c.strength * (rho.asDiagonal() * u[j + 1]);
    src[j + 1].noalias() -= c.strength * (rho.asDiagonal() * u[0]);
  }
  return src;
}

void check_couplings(const PhaseSpace& space, const std::vector<CouplingProfile>& couplings) {
  if (static_cast<int>(couplings.size()) + 1 != space.sector_count())
    throw DomainError(fmt::format("{} couplings for {} sectors (need one per probe)", couplings.size(),
                                  space.sector_count()));
  const LatticeSpec& spec = space.sector(0).params.spec;
  for (const auto& s : space.sectors())
    if (!(s.params.spec == spec)) throw DomainError("all coupled sectors must share one lattice");
  for (const auto& c : couplings) {
    if (!(c.shape.spec() == spec)) throw DomainError("coupling profile lives on a different lattice");
    c.validate();
  }
}

}  // namespace

void CouplingProfile::validate() const {
  const LatticeSpec& spec = shape.spec();
  if (shape.is_zero()) throw DomainError("coupling profile has an empty zone");
  if (shape.values().minCoeff() < 0.0) throw DomainError("coupling profile must be nonnegative");
  if (shape.support().min_t() < 2 || shape.support().max_t() > spec.n_t - 3)
    throw DomainError(fmt::format("coupling zone spans slices [{}, {}]; it must stay within [2, {}] so that the "
                                  "early and late reference slices lie outside its shadows",
                                  shape.support().min_t(), shape.support().max_t(), spec.n_t - 3));
  if (!std::isfinite(strength)) throw DomainError("coupling strength must be finite");
}

ScatteringMap::ScatteringMap(PhaseSpace space, Eigen::MatrixXd s, Eigen::MatrixXd t, std::vector<CouplingZone> zones)
    : space_(std::move(space)), s_(std::move(s)), t_(std::move(t)), zones_(std::move(zones)) {
  if (s_.rows() != space_.dim() || s_.cols() != space_.dim() || t_.rows() != space_.dim() || t_.cols() != space_.dim())
    throw DomainError("scattering matrices do not match the phase space");
}

double ScatteringMap::symplecticity_defect() const {
  const Eigen::MatrixXd om = omega();
  return (s_.transpose() * om * s_ - om).cwiseAbs().maxCoeff();
}

double ScatteringMap::inverse_defect() const {
  return (s_ * t_ - Eigen::MatrixXd::Identity(s_.rows(), s_.cols())).cwiseAbs().maxCoeff();
}

PhaseSpace combined_space(const FieldParams& system, const std::vector<ProbeSpec>& probes,
                          const std::string& system_label) {
  std::vector<Sector> sectors{{system_label, system}};
  for (const auto& p : probes) sectors.push_back({p.label, p.params});
  return PhaseSpace(std::move(sectors));
}

Eigen::MatrixXd propagate(const PhaseSpace& space, const std::vector<CouplingProfile>& couplings,
                          const Eigen::MatrixXd& data, int from_t, int to_t, bool coupled) {
  if (coupled) check_couplings(space, couplings);
  if (data.rows() != space.dim()) throw DomainError("combined data has the wrong dimension");
  const int n_t = space.sector(0).params.spec.n_t;
  if (from_t < 0 || to_t < 0 || from_t + 1 >= n_t || to_t + 1 >= n_t) throw DomainError("propagate: slice out of range");

  const auto sector_count = static_cast<std::size_t>(space.sector_count());
  const std::vector<CouplingProfile> none;
  const auto& active = coupled ? couplings : none;
  Slices s = to_slices(space, data);
  for (int k = from_t; k < to_t; ++k) {
    const auto src = sources(active, s.hi, k + 1);
    for (std::size_t i = 0; i < sector_count; ++i) {
      const FieldParams& p = space.sector(static_cast<int>(i)).params;
      Eigen::MatrixXd next = (apply_b(s.hi[i], p) + src[i]) / p.stencil_a() - s.lo[i];
      s.lo[i] = std::move(s.hi[i]);
      s.hi[i] = std::move(next);
    }
  }
  for (int k = from_t; k > to_t; --k) {
    const auto src = sources(active, s.lo, k);
    for (std::size_t i = 0; i < sector_count; ++i) {
      const FieldParams& p = space.sector(static_cast<int>(i)).params;
      Eigen::MatrixXd below = (apply_b(s.lo[i], p) + src[i]) / p.stencil_a() - s.hi[i];
      s.hi[i] = std::move(s.lo[i]);
      s.lo[i] = std::move(below);
    }
  }
  return from_slices(space, s, data.cols());
}

namespace {

std::vector<CouplingProfile> profiles(const std::vector<ProbeSpec>& probes) {
  std::vector<CouplingProfile> out;
  for (const auto& p : probes) out.push_back(p.coupling);
  return out;
}

}  // namespace

Eigen::VectorXd coupled_evolve(const Eigen::VectorXd& early, const FieldParams& system,
                               const std::vector<ProbeSpec>& probes) {
  const PhaseSpace space = combined_space(system, probes);
  return propagate(space, profiles(probes), early, 0, system.spec.n_t - 2);
}

ScatteringMap scattering_map(const FieldParams& system, const std::vector<ProbeSpec>& probes) {
  if (probes.empty()) throw DomainError("scattering map needs at least one probe");
  const PhaseSpace space = combined_space(system, probes);
  const auto couplings = profiles(probes);
  const int late = system.spec.n_t - 2;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(space.dim(), space.dim());

  Eigen::MatrixXd s = propagate(space, couplings, id, 0, late, true);
  s = propagate(space, couplings, s, late, 0, false);
  Eigen::MatrixXd t = propagate(space, couplings, id, 0, late, false);
  t = propagate(space, couplings, t, late, 0, true);

  std::vector<CouplingZone> zones;
  for (const auto& c : couplings) zones.push_back(c.zone());
  return ScatteringMap(space, std::move(s), std::move(t), std::move(zones));
}

Eigen::VectorXd theta_on_weyl(const ScatteringMap& map, const Eigen::VectorXd& F) {
  map.space().check_vector(F);
  return map.T() * F;
}

std::vector<TestFunction> theta_on_weyl(const ScatteringMap& map, const std::vector<TestFunction>& F) {
  const PhaseSpace& space = map.space();
  if (static_cast<int>(F.size()) != space.sector_count())
    throw DomainError("theta_on_weyl needs one test function per sector");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(space.dim());
  for (int i = 0; i < space.sector_count(); ++i) v += space.generator(F[static_cast<std::size_t>(i)], i);
  const Eigen::VectorXd tv = map.T() * v;
  std::vector<TestFunction> out;
  for (int i = 0; i < space.sector_count(); ++i)
    out.push_back(time_slice_source(tv.segment(space.offset(i), space.sector_dim(i)), space.sector(i).params));
  return out;
}

AlgebraElement apply_theta(const ScatteringMap& map, const AlgebraElement& a) {
  if (!(a.space() == map.space())) throw DomainError("Theta acts on " + map.space().describe());
  AlgebraElement out(a.space());
  for (const auto& t : a.terms()) out.add_term(t.coeff, map.T() * t.generator);
  return out;
}

AlgebraElement eta(const QuasiFreeState& sigma, const AlgebraElement& a, int system_sectors) {
  const PhaseSpace& space = a.space();
  const PhaseSpace sys = space.slice(0, system_sectors);
  const PhaseSpace probe = space.slice(system_sectors, space.sector_count() - system_sectors);
  if (!(sigma.space == probe))
    throw DomainError("probe state lives on " + sigma.space.describe() + ", expected " + probe.describe());
  AlgebraElement out(sys);
  for (const auto& t : a.terms())
    out.add_term(t.coeff * sigma.characteristic(t.generator.tail(probe.dim())), t.generator.head(sys.dim()));
  return out;
}

AlgebraElement induced_observable(const QuasiFreeState& sigma, const ScatteringMap& map, const AlgebraElement& b,
                                  int system_sectors) {
  const AlgebraElement lifted = lift(b, map.space(), system_sectors);
  return eta(sigma, apply_theta(map, lifted), system_sectors);
}

}  // namespace qftm
