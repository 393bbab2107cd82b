#include <rdmeta/polynomial.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rdmeta {

namespace {

Vector trim(Vector c) {
  const Real scale = c.cwiseAbs().maxCoeff();
  const Real cut = scale * 1e-14;
  Index last = 0;
  for (Index k = 0; k < c.size(); ++k)
    if (std::abs(c[k]) > cut) last = k;
  if (scale == 0.0) return Vector::Zero(1);
  return c.head(last + 1).eval();
}

}  // namespace

Polynomial::Polynomial(Vector coeffs) : c_(trim(std::move(coeffs))) {}

Polynomial::Polynomial(std::initializer_list<Real> coeffs) {
  Vector v(static_cast<Index>(coeffs.size()));
  Index i = 0;
  for (Real x : coeffs) v[i++] = x;
  c_ = trim(std::move(v));
}

Polynomial Polynomial::constant(Real a) {
  Vector v(1);
  v[0] = a;
  return Polynomial(std::move(v));
}

Real Polynomial::operator()(Real x) const {
  Real y = 0.0;
  for (Index k = c_.size() - 1; k >= 0; --k) y = y * x + c_[k];
  return y;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() == 1) return Polynomial::constant(0.0);
  Vector d(c_.size() - 1);
  for (Index k = 1; k < c_.size(); ++k) d[k - 1] = Real(k) * c_[k];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::antiderivative(Real at, Real value) const {
  Vector p(c_.size() + 1);
  p[0] = 0.0;
  for (Index k = 0; k < c_.size(); ++k) p[k + 1] = c_[k] / Real(k + 1);
  Polynomial out(std::move(p));
  Vector shifted = out.c_;
  shifted[0] = value - out(at);
  return Polynomial(std::move(shifted));
}

Polynomial Polynomial::deflate(Real root) const {
  if (c_.size() == 1) return Polynomial::constant(0.0);
  Vector q(c_.size() - 1);
  Real carry = c_[c_.size() - 1];
  for (Index k = c_.size() - 2; k >= 0; --k) {
    q[k] = carry;
    carry = c_[k] + root * carry;
  }
  return Polynomial(std::move(q));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  Vector c = Vector::Zero(std::max(a.c_.size(), b.c_.size()));
  c.head(a.c_.size()) += a.c_;
  c.head(b.c_.size()) += b.c_;
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-1.0) * b; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Vector c = Vector::Zero(a.c_.size() + b.c_.size() - 1);
  for (Index i = 0; i < a.c_.size(); ++i)
    for (Index j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  return Polynomial(std::move(c));
}

Polynomial operator*(Real s, const Polynomial& a) { return Polynomial((s * a.c_).eval()); }

namespace {

// Remainder of a by b, coefficients normalized by the divisor's leading term.
Vector poly_rem(Vector a, const Vector& b) {
  const Index db = b.size() - 1;
  while (a.size() - 1 >= db && a.size() > 1) {
    const Index da = a.size() - 1;
    const Real q = a[da] / b[db];
    for (Index k = 0; k <= db; ++k) a[da - db + k] -= q * b[k];
    a.conservativeResize(da);
    // trim numerically dead leading entries
    Index last = 0;
    const Real cut = a.cwiseAbs().maxCoeff() * 1e-14;
    for (Index k = 0; k < a.size(); ++k)
      if (std::abs(a[k]) > cut) last = k;
    a.conservativeResize(std::max<Index>(last + 1, 1));
    if (a.cwiseAbs().maxCoeff() == 0.0) return Vector::Zero(1);
  }
  return a;
}

std::vector<Vector> sturm_sequence(const Polynomial& p) {
  std::vector<Vector> seq;
  Vector p0 = p.coeffs() / std::max(p.max_abs_coeff(), 1e-300);
  seq.push_back(p0);
  if (p.degree() == 0) return seq;
  seq.push_back(Polynomial(p0).derivative().coeffs());
  while (seq.back().size() > 1) {
    Vector r = poly_rem(seq[seq.size() - 2], seq.back());
    r = -r;
    const Real scale = r.cwiseAbs().maxCoeff();
    if (scale < 1e-10) break;  // gcd reached (up to noise): repeated roots upstream
    seq.push_back(r / scale);
    if (seq.size() > 64) break;
  }
  return seq;
}

Real eval(const Vector& c, Real x) {
  Real y = 0.0;
  for (Index k = c.size() - 1; k >= 0; --k) y = y * x + c[k];
  return y;
}

int sign_changes(const std::vector<Vector>& seq, Real x) {
  int changes = 0;
  int prev = 0;
  for (const Vector& c : seq) {
    const Real v = eval(c, x);
    const int s = (v > 0.0) - (v < 0.0);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++changes;
    prev = s;
  }
  return changes;
}

}  // namespace

std::vector<Real> real_roots_in(const Polynomial& p, Real lo, Real hi, Real tol) {
  std::vector<Real> roots;
  if (p.degree() == 0) return roots;
  const auto seq = sturm_sequence(p);
  // nudge the endpoints so roots sitting exactly on them are counted
  const Real eps = 1e-13 * std::max({std::abs(lo), std::abs(hi), 1.0});
  const auto count = [&](Real a, Real b) { return sign_changes(seq, a) - sign_changes(seq, b); };

  struct Span {
    Real a, b;
    int n;
  };
  std::vector<Span> work{{lo - eps, hi + eps, count(lo - eps, hi + eps)}};
  while (!work.empty()) {
    Span s = work.back();
    work.pop_back();
    if (s.n <= 0) continue;
    if (s.n == 1 || s.b - s.a < tol) {
      Real a = s.a, b = s.b;
      while (b - a > tol) {
        const Real m = 0.5 * (a + b);
        if (count(a, m) >= 1)
          b = m;
        else
          a = m;
      }
      roots.push_back(0.5 * (a + b));
      continue;
    }
    const Real m = 0.5 * (s.a + s.b);
    const int left = count(s.a, m);
    work.push_back({s.a, m, left});
    work.push_back({m, s.b, s.n - left});
  }
  std::sort(roots.begin(), roots.end());
  // collapse near-duplicates produced by endpoint nudging
  std::vector<Real> out;
  for (Real r : roots) {
    r = std::clamp(r, lo, hi);
    if (out.empty() || std::abs(r - out.back()) > std::max(4 * tol, 1e-8)) out.push_back(r);
  }
  return out;
}

Real max_abs_on(const Polynomial& p, Real lo, Real hi) {
  Real best = std::max(std::abs(p(lo)), std::abs(p(hi)));
  for (Real r : real_roots_in(p.derivative(), lo, hi)) best = std::max(best, std::abs(p(r)));
  return best;
}

Real max_on(const Polynomial& p, Real lo, Real hi) {
  Real best = std::max(p(lo), p(hi));
  for (Real r : real_roots_in(p.derivative(), lo, hi)) best = std::max(best, p(r));
  return best;
}

}  // namespace rdmeta
