#include "qftm/weyl.hpp"

#include <cmath>

#include "qftm/errors.hpp"

namespace qftm {

namespace {

bool same_generator(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  return (a - b).cwiseAbs().maxCoeff() <= 1e-13 * scale;
}

void check_same_space(const AlgebraElement& a, const AlgebraElement& b) {
  if (!(a.space() == b.space()))
    throw DomainError("algebra elements live on different sectors: " + a.space().describe() + " vs " +
                      b.space().describe());
}

}  // namespace

AlgebraElement::AlgebraElement(PhaseSpace space) : space_(std::move(space)) {}

AlgebraElement AlgebraElement::unit(const PhaseSpace& space, Complex c) {
  AlgebraElement a(space);
  a.add_term(c, Eigen::VectorXd::Zero(space.dim()));
  return a;
}

AlgebraElement AlgebraElement::weyl(const PhaseSpace& space, const Eigen::VectorXd& generator, Complex c) {
  space.check_vector(generator);
  AlgebraElement a(space);
  a.add_term(c, generator);
  return a;
}

AlgebraElement AlgebraElement::weyl(const PhaseSpace& space, const TestFunction& f, int sector, Complex c) {
  return weyl(space, space.generator(f, sector), c);
}

void AlgebraElement::add_term(Complex c, const Eigen::VectorXd& generator) {
  for (auto it = terms_.begin(); it != terms_.end(); ++it) {
    if (same_generator(it->generator, generator)) {
      it->coeff += c;
      if (it->coeff == Complex(0.0, 0.0)) terms_.erase(it);
      return;
    }
  }
  if (c != Complex(0.0, 0.0)) terms_.push_back({c, generator});
}

Complex AlgebraElement::unit_coefficient() const {
  for (const auto& t : terms_)
    if (t.generator.isZero(0.0)) return t.coeff;
  return 0.0;
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& other) const {
  check_same_space(*this, other);
  AlgebraElement out = *this;
  for (const auto& t : other.terms_) out.add_term(t.coeff, t.generator);
  return out;
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& other) const { return *this + other * -1.0; }

AlgebraElement AlgebraElement::operator*(Complex s) const {
  AlgebraElement out(space_);
  for (const auto& t : terms_) out.add_term(s * t.coeff, t.generator);
  return out;
}

AlgebraElement AlgebraElement::adjoint() const {
  AlgebraElement out(space_);
  for (const auto& t : terms_) out.add_term(std::conj(t.coeff), -t.generator);
  return out;
}

double AlgebraElement::distance(const AlgebraElement& other) const {
  const AlgebraElement d = *this - other;
  double m = 0.0;
  for (const auto& t : d.terms()) m = std::max(m, std::abs(t.coeff));
  return m;
}

AlgebraElement weyl_multiply(const AlgebraElement& a, const AlgebraElement& b) {
  check_same_space(a, b);
  const PhaseSpace& space = a.space();
  AlgebraElement out(space);
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      const double phase = -0.5 * space.sigma(ta.generator, tb.generator);
      out.add_term(ta.coeff * tb.coeff * std::polar(1.0, phase), ta.generator + tb.generator);
    }
  }
  return out;
}

AlgebraElement tensor(const AlgebraElement& a, const AlgebraElement& b) {
  const PhaseSpace space = a.space() + b.space();
  AlgebraElement out(space);
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      Eigen::VectorXd g(space.dim());
      g << ta.generator, tb.generator;
      out.add_term(ta.coeff * tb.coeff, g);
    }
  }
  return out;
}

AlgebraElement lift(const AlgebraElement& a, const PhaseSpace& target, int first) {
  if (!(target.slice(first, a.space().sector_count()) == a.space()))
    throw DomainError("cannot lift " + a.space().describe() + " into " + target.describe());
  AlgebraElement out(target);
  for (const auto& t : a.terms()) out.add_term(t.coeff, target.embed(t.generator, first));
  return out;
}

}  // namespace qftm
