#include "qftm/state.hpp"

#include <fmt/format.h>

#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "qftm/errors.hpp"

namespace qftm {

namespace {

constexpr Complex I{0.0, 1.0};

Eigen::MatrixXd laplacian_matrix(const LatticeSpec& spec) {
  const int n = spec.n_x;
  Eigen::MatrixXd lap(n, n);
  for (int j = 0; j < n; ++j) lap.col(j) = spatial_laplacian(Eigen::VectorXd::Unit(n, j), spec);
  return 0.5 * (lap + lap.transpose());
}

Eigen::MatrixXd sector_vacuum(const FieldParams& p) {
  p.validate();
  if (!(p.mass > 0.0)) throw DomainError("vacuum state needs mass > 0 (the massless 1+1D vacuum is IR divergent)");
  const int n = p.spec.n_x;
  const double dt = p.spec.dt;
  const double a = p.stencil_a();
  const double s = a * dt * p.spec.dx;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-laplacian_matrix(p.spec));
  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd off = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double k2 = std::max(es.eigenvalues()(k), 0.0);
    const double c = 0.5 * (2.0 / (dt * dt) - k2) / a;
    if (std::abs(c) >= 1.0) throw DomainError(fmt::format("mode {} is not oscillatory (cos theta = {})", k, c));
    const double lam = s / (2.0 * std::sqrt(1.0 - c * c));
    const Eigen::VectorXd e = es.eigenvectors().col(k);
    diag.noalias() += lam * e * e.transpose();
    off.noalias() -= lam * c * e * e.transpose();
  }
  // Covariance on generators written in slice coordinates (u_0, u_1), then
  // moved to (phi, pi) with u_0 = phi, u_1 = phi + dt pi.
  Eigen::MatrixXd cu(2 * n, 2 * n);
  cu << diag, off, off, diag;
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  r.topLeftCorner(n, n).setIdentity();
  r.bottomLeftCorner(n, n).setIdentity();
  r.bottomRightCorner(n, n) = dt * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd c = r.transpose() * cu * r;
  return 0.5 * (c + c.transpose());
}

bool same_base(const QuasiFreeState& a, const QuasiFreeState& b) {
  return a.space == b.space && a.mean == b.mean && a.covariance == b.covariance;
}

bool same_z(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  return (a - b).cwiseAbs().maxCoeff() <= 1e-13 * scale;
}

}  // namespace

Complex QuasiFreeState::characteristic(const Eigen::VectorXd& F) const {
  space.check_vector(F);
  return std::exp(I * mean.dot(F) - 0.5 * F.dot(covariance * F));
}

double QuasiFreeState::positivity_margin() const {
  const Eigen::MatrixXcd h = covariance.cast<Complex>() + 0.5 * I * space.omega().cast<Complex>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

QuasiFreeState vacuum_state(const PhaseSpace& space) {
  QuasiFreeState s{space, Eigen::VectorXd::Zero(space.dim()), Eigen::MatrixXd::Zero(space.dim(), space.dim())};
  for (int i = 0; i < space.sector_count(); ++i) {
    const int d = space.sector_dim(i);
    s.covariance.block(space.offset(i), space.offset(i), d, d) = sector_vacuum(space.sector(i).params);
  }
  return s;
}

QuasiFreeState vacuum_state(const FieldParams& params, const std::string& label) {
  return vacuum_state(PhaseSpace::single(label, params));
}

double vacuum_two_point(const FieldParams& params, const TestFunction& f, const TestFunction& g) {
  const PhaseSpace space = PhaseSpace::single("system", params);
  const Eigen::MatrixXd c = sector_vacuum(params);
  return space.generator(f).dot(c * space.generator(g));
}

Eigen::MatrixXd free_propagator(const FieldParams& params, int from_t, int to_t) {
  const int d = 2 * params.spec.n_x;
  Eigen::MatrixXd p(d, d);
  for (int j = 0; j < d; ++j) p.col(j) = evolve_free(Eigen::VectorXd::Unit(d, j), from_t, to_t, params);
  return p;
}

QuasiFreeState ultralocal_state(const FieldParams& params, int t, double nu, const std::string& label) {
  if (!(nu > 0.0)) throw DomainError("ultralocal state needs nu > 0");
  const int n = params.spec.n_x;
  const double kappa = params.symplectic_scale();
  Eigen::VectorXd d(2 * n);
  d.head(n).setConstant(kappa / (2.0 * nu));
  d.tail(n).setConstant(kappa * nu / 2.0);
  const Eigen::MatrixXd p = free_propagator(params, 0, t);
  Eigen::MatrixXd c = p.transpose() * d.asDiagonal() * p;
  c = 0.5 * (c + c.transpose());
  return {PhaseSpace::single(label, params), Eigen::VectorXd::Zero(2 * n), c};
}

QuasiFreeState with_extra_covariance(QuasiFreeState s, const Eigen::VectorXd& v, double gamma) {
  s.space.check_vector(v);
  s.covariance += gamma * v * v.transpose();
  return s;
}

QuasiFreeState displaced(QuasiFreeState s, const Eigen::VectorXd& mu) {
  s.space.check_vector(mu);
  s.mean += mu;
  return s;
}

QuasiFreeState tensor(const QuasiFreeState& a, const QuasiFreeState& b) {
  const int da = a.space.dim();
  const int db = b.space.dim();
  QuasiFreeState s{a.space + b.space, Eigen::VectorXd(da + db), Eigen::MatrixXd::Zero(da + db, da + db)};
  s.mean << a.mean, b.mean;
  s.covariance.topLeftCorner(da, da) = a.covariance;
  s.covariance.bottomRightCorner(db, db) = b.covariance;
  return s;
}

StateFunctional::StateFunctional(QuasiFreeState base) : base_(std::move(base)) {
  components_.push_back({1.0, Eigen::VectorXcd::Zero(base_.space.dim())});
}

StateFunctional::StateFunctional(QuasiFreeState base, std::vector<Component> components)
    : base_(std::move(base)), components_(std::move(components)) {
  for (const auto& c : components_)
    if (c.z.size() != base_.space.dim()) throw DomainError("component displacement has the wrong dimension");
}

Complex StateFunctional::characteristic(const Eigen::VectorXd& F) const {
  space().check_vector(F);
  const Complex common = I * base_.mean.dot(F) - 0.5 * F.dot(base_.covariance * F);
  const Eigen::VectorXcd fc = F.cast<Complex>();
  Complex sum = 0.0;
  for (const auto& c : components_) sum += c.weight * std::exp(common + c.z.cwiseProduct(fc).sum());
  return sum;
}

Complex StateFunctional::evaluate(const AlgebraElement& a) const {
  if (!(a.space() == space()))
    throw DomainError("state on " + space().describe() + " cannot evaluate an element of " + a.space().describe());
  Complex sum = 0.0;
  for (const auto& t : a.terms()) sum += t.coeff * characteristic(t.generator);
  return sum;
}

Complex StateFunctional::norm() const {
  Complex sum = 0.0;
  for (const auto& c : components_) sum += c.weight;
  return sum;
}

StateFunctional StateFunctional::normalized(double threshold) const {
  const Complex n = norm();
  if (std::abs(n) <= threshold)
    throw NullConditioningError(fmt::format("conditioning on an outcome of probability {:.3g}", std::abs(n)));
  return *this * (1.0 / n);
}

StateFunctional StateFunctional::operator*(Complex s) const {
  StateFunctional out = *this;
  for (auto& c : out.components_) c.weight *= s;
  return out;
}

StateFunctional StateFunctional::operator+(const StateFunctional& other) const {
  if (!same_base(base_, other.base_)) throw DomainError("state functionals over different quasi-free bases");
  StateFunctional out = *this;
  out.components_.insert(out.components_.end(), other.components_.begin(), other.components_.end());
  out.compress();
  return out;
}

StateFunctional StateFunctional::conjugated_by_weyl(const Eigen::VectorXd& f) const {
  space().check_vector(f);
  // W(-f) W(G) W(f) = exp(i sigma(f, G)) W(G), and sigma(f, G) = (Omega^T f).G.
  const Eigen::VectorXcd shift = I * (space().omega().transpose() * f).cast<Complex>();
  StateFunctional out = *this;
  for (auto& c : out.components_) c.z += shift;
  return out;
}

StateFunctional StateFunctional::pull_back(const Eigen::MatrixXd& M, const PhaseSpace& target,
                                           const std::vector<std::pair<Complex, Eigen::VectorXd>>& offsets) const {
  if (M.rows() != space().dim() || M.cols() != target.dim())
    throw DomainError(fmt::format("pull-back matrix is {}x{} but maps {} into {}", M.rows(), M.cols(),
                                  target.describe(), space().describe()));
  const Eigen::MatrixXd mt = M.transpose();
  QuasiFreeState base{target, mt * base_.mean, mt * base_.covariance * M};
  base.covariance = 0.5 * (base.covariance + base.covariance.transpose());

  std::vector<Component> comps;
  comps.reserve(offsets.size() * components_.size());
  for (const auto& [b, x0] : offsets) {
    space().check_vector(x0);
    const Eigen::VectorXd cx0 = base_.covariance * x0;
    const Complex common = I * base_.mean.dot(x0) - 0.5 * x0.dot(cx0);
    const Eigen::VectorXcd shift = -(mt * cx0).cast<Complex>();
    const Eigen::VectorXcd x0c = x0.cast<Complex>();
    for (const auto& c : components_) {
      const Complex zx = c.z.cwiseProduct(x0c).sum();
      comps.push_back({b * c.weight * std::exp(common + zx), mt.cast<Complex>() * c.z + shift});
    }
  }
  StateFunctional out(std::move(base), std::move(comps));
  out.compress();
  return out;
}

StateFunctional StateFunctional::marginal(int first, int count) const {
  const PhaseSpace sub = space().slice(first, count);
  const int o = space().offset(first);
  const int d = sub.dim();
  QuasiFreeState base{sub, base_.mean.segment(o, d), base_.covariance.block(o, o, d, d)};
  std::vector<Component> comps;
  for (const auto& c : components_) comps.push_back({c.weight, c.z.segment(o, d)});
  StateFunctional out(std::move(base), std::move(comps));
  out.compress();
  return out;
}

void StateFunctional::compress() {
  std::vector<Component> merged;
  for (const auto& c : components_) {
    bool found = false;
    for (auto& m : merged) {
      if (same_z(m.z, c.z)) {
        m.weight += c.weight;
        found = true;
        break;
      }
    }
    if (!found) merged.push_back(c);
  }
  std::erase_if(merged, [](const Component& c) { return c.weight == Complex(0.0, 0.0); });
  components_ = std::move(merged);
}

StateFunctional tensor(const StateFunctional& a, const StateFunctional& b) {
  const int da = a.space().dim();
  const int db = b.space().dim();
  std::vector<Component> comps;
  for (const auto& ca : a.components()) {
    for (const auto& cb : b.components()) {
      Eigen::VectorXcd z(da + db);
      z << ca.z, cb.z;
      comps.push_back({ca.weight * cb.weight, z});
    }
  }
  return StateFunctional(tensor(a.base(), b.base()), std::move(comps));
}

Eigen::MatrixXcd gram_matrix(const StateFunctional& s, const std::vector<Eigen::VectorXd>& generators) {
  const auto n = static_cast<Eigen::Index>(generators.size());
  Eigen::MatrixXcd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& fi = generators[static_cast<std::size_t>(i)];
      const auto& fj = generators[static_cast<std::size_t>(j)];
      // W(F_i)* W(F_j) = W(-F_i) W(F_j) = exp(i sigma(F_i, F_j) / 2) W(F_j - F_i).
      g(i, j) = std::polar(1.0, 0.5 * s.space().sigma(fi, fj)) * s.characteristic(fj - fi);
    }
  }
  return g;
}

double gram_min_eigenvalue(const StateFunctional& s, const std::vector<Eigen::VectorXd>& generators) {
  const Eigen::MatrixXcd g = gram_matrix(s, generators);
  const Eigen::MatrixXcd h = 0.5 * (g + g.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Complex field_moment(const StateFunctional& s, const std::vector<Eigen::VectorXd>& generators) {
  const int k = static_cast<int>(generators.size());
  if (k > 4) throw UnsupportedError(fmt::format("field moments are implemented up to order 4, got {}", k));
  for (const auto& f : generators) s.space().check_vector(f);
  if (k == 0) return s.norm();

  // s(W(t_1 F_1) ... W(t_k F_k)) = sum_j c_j exp(sum_i t_i alpha_i - sum_{i<l} t_i t_l Gamma_il - ...)
  // with Gamma_il = C(F_i, F_l) + (i/2) sigma(F_i, F_l); the mixed derivative at t = 0
  // sums over partitions of {1..k} into singletons (alpha_i) and pairs (-Gamma_il).
  const QuasiFreeState& b = s.base();
  Eigen::MatrixXcd gamma(k, k);
  for (int i = 0; i < k; ++i)
    for (int l = 0; l < k; ++l)
      gamma(i, l) = generators[static_cast<std::size_t>(i)].dot(b.covariance * generators[static_cast<std::size_t>(l)]) +
                    0.5 * I * s.space().sigma(generators[static_cast<std::size_t>(i)], generators[static_cast<std::size_t>(l)]);

  Complex total = 0.0;
  std::vector<Complex> alpha(static_cast<std::size_t>(k));
  for (const auto& c : s.components()) {
    for (int i = 0; i < k; ++i) {
      const auto& f = generators[static_cast<std::size_t>(i)];
      alpha[static_cast<std::size_t>(i)] = I * b.mean.dot(f) + c.z.cwiseProduct(f.cast<Complex>()).sum();
    }
    std::function<Complex(unsigned)> expand = [&](unsigned remaining) -> Complex {
      if (remaining == 0) return 1.0;
      int i = 0;
      while (!(remaining & (1u << i))) ++i;
      const unsigned rest = remaining & ~(1u << i);
      Complex sum = alpha[static_cast<std::size_t>(i)] * expand(rest);
      for (int l = i + 1; l < k; ++l)
        if (rest & (1u << l)) sum += -gamma(i, l) * expand(rest & ~(1u << l));
      return sum;
    };
    total += c.weight * expand((1u << k) - 1u);
  }
  return std::pow(-I, k) * total;
}

void write_record(std::ostream& out, const StateFunctional& s) {
  const PhaseSpace& space = s.space();
  const int d = space.dim();
  out << "qftm-state 1\n";
  for (const auto& sec : space.sectors()) {
    const auto& p = sec.params;
    out << fmt::format("sector {} {:.17g} {} {} {:.17g} {:.17g} {}\n", sec.label, p.mass, p.spec.n_t, p.spec.n_x,
                       p.spec.dx, p.spec.dt, to_string(p.spec.boundary));
  }
  out << "mean";
  for (int i = 0; i < d; ++i) out << fmt::format(" {:.17g}", s.base().mean(i));
  out << "\ncovariance\n";
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) out << (j ? " " : "") << fmt::format("{:.17g}", s.base().covariance(i, j));
    out << '\n';
  }
  out << "components " << s.components().size() << '\n';
  for (const auto& c : s.components()) {
    out << fmt::format("{:.17g} {:.17g}", c.weight.real(), c.weight.imag());
    for (int i = 0; i < d; ++i) out << fmt::format(" {:.17g} {:.17g}", c.z(i).real(), c.z(i).imag());
    out << '\n';
  }
}

StateFunctional read_record(std::istream& in) {
  std::string line;
  auto next = [&](const char* what) {
    while (std::getline(in, line))
      if (!line.empty()) return;
    throw DomainError(std::string("state record ended before ") + what);
  };
  next("header");
  if (line != "qftm-state 1") throw DomainError("not a state record: '" + line + "'");

  std::vector<Sector> sectors;
  next("mean");
  while (line.rfind("sector ", 0) == 0) {
    std::istringstream ls(line.substr(7));
    Sector sec;
    std::string boundary;
    if (!(ls >> sec.label >> sec.params.mass >> sec.params.spec.n_t >> sec.params.spec.n_x >> sec.params.spec.dx >>
          sec.params.spec.dt >> boundary))
      throw DomainError("malformed sector line: '" + line + "'");
    sec.params.spec.boundary = boundary_from_string(boundary);
    sectors.push_back(sec);
    next("mean");
  }
  const PhaseSpace space(std::move(sectors));
  const int d = space.dim();

  QuasiFreeState base{space, Eigen::VectorXd(d), Eigen::MatrixXd(d, d)};
  if (line.rfind("mean", 0) != 0) throw DomainError("expected mean line in state record");
  {
    std::istringstream ls(line.substr(4));
    for (int i = 0; i < d; ++i)
      if (!(ls >> base.mean(i))) throw DomainError("mean line too short");
  }
  next("covariance");
  if (line != "covariance") throw DomainError("expected covariance block in state record");
  for (int i = 0; i < d; ++i) {
    next("covariance row");
    std::istringstream ls(line);
    for (int j = 0; j < d; ++j)
      if (!(ls >> base.covariance(i, j))) throw DomainError(fmt::format("covariance row {} too short", i));
  }
  next("components");
  std::size_t n = 0;
  if (std::sscanf(line.c_str(), "components %zu", &n) != 1) throw DomainError("expected components line");
  std::vector<Component> comps;
  for (std::size_t j = 0; j < n; ++j) {
    next("component");
    std::istringstream ls(line);
    double re = 0.0, im = 0.0;
    Component c{0.0, Eigen::VectorXcd(d)};
    if (!(ls >> re >> im)) throw DomainError("malformed component weight");
    c.weight = {re, im};
    for (int i = 0; i < d; ++i) {
      if (!(ls >> re >> im)) throw DomainError("component displacement too short");
      c.z(i) = {re, im};
    }
    comps.push_back(std::move(c));
  }
  return StateFunctional(std::move(base), std::move(comps));
}

}  // namespace qftm
