#include "qftm/phase_space.hpp"

#include <fmt/format.h>

#include "qftm/errors.hpp"

namespace qftm {

PhaseSpace::PhaseSpace(std::vector<Sector> sectors) : sectors_(std::move(sectors)) {
  for (const auto& s : sectors_) {
    offsets_.push_back(dim_);
    dim_ += 2 * s.params.spec.n_x;
  }
}

PhaseSpace PhaseSpace::single(std::string label, const FieldParams& params) {
  return PhaseSpace({Sector{std::move(label), params}});
}

int PhaseSpace::find(const std::string& label) const {
  for (int i = 0; i < sector_count(); ++i)
    if (sectors_[static_cast<std::size_t>(i)].label == label) return i;
  throw DomainError("phase space has no sector '" + label + "'");
}

Eigen::MatrixXd PhaseSpace::omega() const {
  Eigen::MatrixXd om = Eigen::MatrixXd::Zero(dim_, dim_);
  for (int i = 0; i < sector_count(); ++i) {
    const int d = sector_dim(i);
    om.block(offset(i), offset(i), d, d) = symplectic_matrix(sector(i).params);
  }
  return om;
}

double PhaseSpace::sigma(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  double s = 0.0;
  for (int i = 0; i < sector_count(); ++i) {
    const int n = sector(i).params.spec.n_x;
    const int o = offset(i);
    const double kappa = sector(i).params.symplectic_scale();
    s += kappa * (a.segment(o, n).dot(b.segment(o + n, n)) - a.segment(o + n, n).dot(b.segment(o, n)));
  }
  return s;
}

PhaseSpace PhaseSpace::slice(int first, int count) const {
  if (first < 0 || count < 0 || first + count > sector_count()) throw DomainError("phase-space slice out of range");
  return PhaseSpace(std::vector<Sector>(sectors_.begin() + first, sectors_.begin() + first + count));
}

Eigen::VectorXd PhaseSpace::generator(const TestFunction& f, int sector) const {
  const FieldParams& p = this->sector(sector).params;
  if (!(f.spec() == p.spec)) throw DomainError("test function lattice differs from the sector lattice");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
  if (!f.is_zero()) v.segment(offset(sector), sector_dim(sector)) = cauchy_data(pauli_jordan(f, p), 0, p);
  return v;
}

Eigen::VectorXd PhaseSpace::embed(const Eigen::VectorXd& v, int first) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
  if (first < 0 || first >= sector_count() || offset(first) + v.size() > dim_)
    throw DomainError("embedding does not fit the phase space");
  out.segment(offset(first), v.size()) = v;
  return out;
}

void PhaseSpace::check_vector(const Eigen::VectorXd& v) const {
  if (v.size() != dim_)
    throw DomainError(fmt::format("phase-space vector has length {} but the space has dimension {}", v.size(), dim_));
}

PhaseSpace operator+(const PhaseSpace& a, const PhaseSpace& b) {
  std::vector<Sector> s = a.sectors_;
  s.insert(s.end(), b.sectors_.begin(), b.sectors_.end());
  return PhaseSpace(std::move(s));
}

std::string PhaseSpace::describe() const {
  std::string out;
  for (const auto& s : sectors_) {
    if (!out.empty()) out += " + ";
    out += fmt::format("{}(m={:g},n_x={})", s.label, s.params.mass, s.params.spec.n_x);
  }
  return out;
}

}  // namespace qftm
