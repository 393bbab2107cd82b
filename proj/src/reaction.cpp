#include <rdmeta/reaction.hpp>

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rdmeta {

namespace {

Real min_on_grid(const Polynomial& p, int samples = 2048) {
  Real best = p(0.0);
  for (int i = 1; i <= samples; ++i) best = std::min(best, p(Real(i) / samples));
  return best;
}

}  // namespace

ReactionPolynomials bd_polynomials(const CylinderRate& rates) {
  const int r = rates.radius();
  const int width = 2 * r + 1;
  const int patterns = 1 << width;

  // powers of rho and (1 - rho)
  std::vector<Polynomial> rho_pow(width + 1), vac_pow(width + 1);
  rho_pow[0] = Polynomial::constant(1.0);
  vac_pow[0] = Polynomial::constant(1.0);
  const Polynomial rho{0.0, 1.0}, vac{1.0, -1.0};
  for (int k = 1; k <= width; ++k) {
    rho_pow[k] = rho_pow[k - 1] * rho;
    vac_pow[k] = vac_pow[k - 1] * vac;
  }

  ReactionPolynomials out;
  for (int p = 0; p < patterns; ++p) {
    const Real c = rates.table()[p];
    const int ones = std::popcount(static_cast<unsigned>(p));
    const int zeros = width - ones;
    const bool center = (p >> r) & 1;
    if (!center) {
      out.B += c * (rho_pow[ones] * vac_pow[zeros]);
      out.Bhat += c * (rho_pow[ones] * vac_pow[zeros - 1]);
    } else {
      out.D += c * (rho_pow[ones] * vac_pow[zeros]);
      out.Dhat += c * (rho_pow[ones - 1] * vac_pow[zeros]);
    }
  }
  out.F = out.B - out.D;
  out.V = (-1.0 * out.F).antiderivative(0.5, 0.0);
  const Polynomial Fp = out.F.derivative();
  out.lipschitz_F = max_abs_on(Fp, 0.0, 1.0);
  out.max_abs_F = max_abs_on(out.F, 0.0, 1.0);
  out.max_abs_FpF = max_abs_on(Fp * out.F, 0.0, 1.0);
  out.triple = rates.triple();

  // factorization invariants of the strictly positive table
  std::ostringstream diag;
  const Real bhat_min = min_on_grid(out.Bhat), dhat_min = min_on_grid(out.Dhat);
  if (bhat_min <= 0.0 || dhat_min <= 0.0)
    diag << "Bhat/Dhat not strictly positive on [0,1]: " << bhat_min << ", " << dhat_min << "; ";
  const Polynomial b_residual = out.B - Polynomial{1.0, -1.0} * out.Bhat;
  const Polynomial d_residual = out.D - Polynomial{0.0, 1.0} * out.Dhat;
  const Real scale = std::max(out.B.max_abs_coeff(), out.D.max_abs_coeff());
  if (b_residual.max_abs_coeff() > 1e-12 * scale || d_residual.max_abs_coeff() > 1e-12 * scale)
    diag << "factorization residual too large; ";
  if (out.F(0.0) <= 0.0 || out.F(1.0) >= 0.0)
    diag << "F(0) > 0 > F(1) violated: F(0)=" << out.F(0.0) << " F(1)=" << out.F(1.0) << "; ";
  if (!diag.str().empty())
    throw std::runtime_error("bd_polynomials invariant violation: " + diag.str());
  return out;
}

WellStructure classify_wells(const ReactionPolynomials& poly) {
  if (poly.F.degree() < 1) throw std::invalid_argument("F must have degree >= 1");
  const Polynomial Fp = poly.F.derivative();
  WellStructure w;
  w.roots = real_roots_in(poly.F, 0.0, 1.0);
  const Real scale = std::max(1.0, poly.lipschitz_F);
  for (Real r : w.roots) {
    const Real slope = Fp(r);
    if (std::abs(slope) < 1e-7 * scale) {
      std::ostringstream msg;
      msg << "degenerate root of F at rho=" << r << " (|F'|=" << std::abs(slope)
          << "); classification refused";
      throw std::invalid_argument(msg.str());
    }
    const bool minimum = slope < 0.0;  // V'' = -F' > 0
    (minimum ? w.minima : w.maxima).push_back(r);
    w.attractor.push_back(minimum);
  }
  // minima and maxima interlace: m_1 < M_1 < ... < M_{n-1} < m_n
  if (w.minima.empty() || w.minima.size() != w.maxima.size() + 1)
    throw std::runtime_error("well structure does not interlace");
  for (std::size_t j = 0; j < w.maxima.size(); ++j)
    if (!(w.minima[j] < w.maxima[j] && w.maxima[j] < w.minima[j + 1]))
      throw std::runtime_error("well structure does not interlace");
  return w;
}

ConcavityReport concavity_check(const ReactionPolynomials& poly) {
  const auto concave = [](const Polynomial& p) {
    const Polynomial p2 = p.derivative().derivative();
    const Real tol = 1e-9 * std::max(1.0, p2.max_abs_coeff());
    return max_on(p2, 0.0, 1.0) <= tol;
  };
  ConcavityReport rep;
  rep.B_concave = concave(poly.B);
  rep.D_concave = concave(poly.D);
  if (poly.triple) {
    const auto [a0, a1, a2] = *poly.triple;
    const Real tol = 1e-9 * std::max({a0, a1, a2});
    const bool closed = (3 * a1 + a0 <= 4 * a2 + tol) && (a2 <= a0 + tol);
    if (closed != rep.B_concave || closed != rep.D_concave)
      throw std::runtime_error("closed concavity criterion disagrees with the B'' test");
  }
  return rep;
}

ChafeeInfanteModel chafee_infante_params(Real fa, Real fb, std::optional<Real> a2_choice) {
  if (!(0.0 < fa && fa < fb)) throw std::invalid_argument("require 0 < fa < fb");
  const Real a2 = a2_choice.value_or(fa + 2.0 * fb);
  if (a2 < fa + 2.0 * fb - 1e-12) throw std::invalid_argument("require a2 >= fa + 2 fb");

  ChafeeInfanteModel m{.a0 = 2.0 * a2 + 4.0 * fb - fa,
                       .a1 = fa,
                       .a2 = a2,
                       .a = (fb - fa) / 2.0,
                       .b = fb / 2.0,
                       .lambda = 32.0 * kPi * kPi * (fb - fa) / 2.0,
                       .rates = build_rate_table(2.0 * a2 + 4.0 * fb - fa, fa, a2),
                       .poly = {}};
  m.poly = bd_polynomials(m.rates);

  // F must equal (fb - fa)(2 rho - 1) - fb (2 rho - 1)^3 coefficientwise
  const Polynomial u{-1.0, 2.0};
  const Polynomial expected = (fb - fa) * u - fb * (u * u * u);
  const Polynomial residual = m.poly.F - expected;
  if (residual.max_abs_coeff() > 1e-9 * std::max(1.0, expected.max_abs_coeff()))
    throw std::runtime_error("derived F does not match the double-well form");
  return m;
}

}  // namespace rdmeta
