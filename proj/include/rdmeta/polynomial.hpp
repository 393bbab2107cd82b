#pragma once

#include <rdmeta/types.hpp>

#include <vector>

namespace rdmeta {

/// Dense univariate polynomial, coefficients stored in ascending degree order.
/// Trailing coefficients far below the magnitude of the largest one are trimmed.
class Polynomial {
 public:
  Polynomial() : c_(Vector::Zero(1)) {}
  explicit Polynomial(Vector coeffs);
  Polynomial(std::initializer_list<Real> coeffs);

  static Polynomial constant(Real a);

  Index degree() const { return c_.size() - 1; }
  const Vector& coeffs() const { return c_; }
  Real coeff(Index k) const { return k < c_.size() ? c_[k] : 0.0; }
  bool is_zero() const { return c_.size() == 1 && c_[0] == 0.0; }

  Real operator()(Real x) const;

  Polynomial derivative() const;
  /// Primitive P of this polynomial with P(at) = value.
  Polynomial antiderivative(Real at, Real value) const;
  /// Synthetic division by (x - root); the remainder is discarded.
  Polynomial deflate(Real root) const;

  Real max_abs_coeff() const { return c_.cwiseAbs().maxCoeff(); }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Real s, const Polynomial& a);
  Polynomial& operator+=(const Polynomial& b) { return *this = *this + b; }
  Polynomial& operator-=(const Polynomial& b) { return *this = *this - b; }

 private:
  Vector c_;
};

/// Distinct real roots of p in [lo,hi], ascending, located to +-tol.
/// Uses Sturm-sequence isolation followed by bisection, so roots of even
/// multiplicity are found as well.
std::vector<Real> real_roots_in(const Polynomial& p, Real lo, Real hi, Real tol = 1e-12);

/// max over [lo,hi] of |p| (checks endpoints and the critical points of p).
Real max_abs_on(const Polynomial& p, Real lo, Real hi);

/// max over [lo,hi] of p.
Real max_on(const Polynomial& p, Real lo, Real hi);

}  // namespace rdmeta
