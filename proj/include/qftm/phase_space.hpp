#pragma once

// Phase space of one or more free scalar fields on a common lattice. Each
// sector carries Cauchy data (phi, pi) on the early reference slice t = 0, so a
// sector has dimension 2 n_x; sectors are stacked in order. Smeared fields and
// Weyl generators are labelled by phase-space vectors: the test function f is
// represented by the Cauchy data of its Pauli-Jordan solution E f.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "qftm/field.hpp"

namespace qftm {

struct Sector {
  std::string label;
  FieldParams params;

  friend bool operator==(const Sector&, const Sector&) = default;
};

class PhaseSpace {
 public:
  PhaseSpace() = default;
  explicit PhaseSpace(std::vector<Sector> sectors);
  static PhaseSpace single(std::string label, const FieldParams& params);

  int dim() const { return dim_; }
  int sector_count() const { return static_cast<int>(sectors_.size()); }
  const Sector& sector(int i) const { return sectors_.at(static_cast<std::size_t>(i)); }
  const std::vector<Sector>& sectors() const { return sectors_; }
  int offset(int i) const { return offsets_.at(static_cast<std::size_t>(i)); }
  int sector_dim(int i) const { return 2 * sector(i).params.spec.n_x; }
  /// Index of the sector with this label; throws DomainError if absent.
  int find(const std::string& label) const;

  /// Block-diagonal symplectic matrix.
  Eigen::MatrixXd omega() const;
  /// sigma(a, b) = a^T Omega b without forming Omega.
  double sigma(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

  /// Sub-space made of `count` consecutive sectors starting at `first`.
  PhaseSpace slice(int first, int count) const;

  /// Phase-space vector of f placed in sector `sector` (zero elsewhere).
  Eigen::VectorXd generator(const TestFunction& f, int sector = 0) const;
  /// Embed a vector of `sub` (a slice of this space starting at sector `first`).
  Eigen::VectorXd embed(const Eigen::VectorXd& v, int first) const;

  void check_vector(const Eigen::VectorXd& v) const;

  friend bool operator==(const PhaseSpace& a, const PhaseSpace& b) { return a.sectors_ == b.sectors_; }
  friend PhaseSpace operator+(const PhaseSpace& a, const PhaseSpace& b);

  std::string describe() const;

 private:
  std::vector<Sector> sectors_;
  std::vector<int> offsets_;
  int dim_ = 0;
};

}  // namespace qftm
