#pragma once

// Finite linear combinations of Weyl generators W(F) = exp(i phi(F)) over a
// PhaseSpace, with the product fixed by the Weyl relation
//
//   W(F) W(G) = exp(-i sigma(F, G) / 2) W(F + G),
//
// where sigma(Cauchy(E f), Cauchy(E g)) = E(f, g) is the commutator form.
// Sectors of a direct sum pair trivially with each other.

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qftm/phase_space.hpp"

namespace qftm {

using Complex = std::complex<double>;

struct WeylTerm {
  Complex coeff;
  Eigen::VectorXd generator;
};

class AlgebraElement {
 public:
  explicit AlgebraElement(PhaseSpace space);

  static AlgebraElement zero(const PhaseSpace& space) { return AlgebraElement(space); }
  static AlgebraElement unit(const PhaseSpace& space, Complex c = 1.0);
  static AlgebraElement weyl(const PhaseSpace& space, const Eigen::VectorXd& generator, Complex c = 1.0);
  static AlgebraElement weyl(const PhaseSpace& space, const TestFunction& f, int sector = 0, Complex c = 1.0);

  const PhaseSpace& space() const { return space_; }
  const std::vector<WeylTerm>& terms() const { return terms_; }

  /// Adds c W(F), merging with an existing term of (numerically) equal generator.
  void add_term(Complex c, const Eigen::VectorXd& generator);

  /// Coefficient of W(0).
  Complex unit_coefficient() const;

  AlgebraElement operator+(const AlgebraElement& other) const;
  AlgebraElement operator-(const AlgebraElement& other) const;
  AlgebraElement operator*(Complex s) const;
  friend AlgebraElement operator*(Complex s, const AlgebraElement& a) { return a * s; }

  /// W(F)* = W(-F), coefficients conjugated.
  AlgebraElement adjoint() const;

  /// max over terms of |coefficient| after subtracting `other`.
  double distance(const AlgebraElement& other) const;

 private:
  PhaseSpace space_;
  std::vector<WeylTerm> terms_;
};

/// Bilinear expansion with the Weyl phase. Throws DomainError on sector mismatch.
AlgebraElement weyl_multiply(const AlgebraElement& a, const AlgebraElement& b);

/// a (x) b on space(a) + space(b).
AlgebraElement tensor(const AlgebraElement& a, const AlgebraElement& b);

/// a (x) 1 or 1 (x) a inside a larger direct sum, with `a` occupying the
/// sectors starting at `first`.
AlgebraElement lift(const AlgebraElement& a, const PhaseSpace& target, int first);

}  // namespace qftm
