#pragma once

#include <rdmeta/model.hpp>
#include <rdmeta/polynomial.hpp>

#include <vector>

namespace rdmeta {

/// Macroscopic ingredients of the hydrodynamic equation, derived from a
/// flip-rate table by exact expectation under Bernoulli product measures.
/// B(rho) = (1-rho) Bhat(rho) and D(rho) = rho Dhat(rho) with Bhat, Dhat > 0
/// on [0,1]; consequently F(0) > 0 > F(1).
struct ReactionPolynomials {
  Polynomial B, D;
  Polynomial F;     // B - D
  Polynomial V;     // V' = -F, normalized by V(1/2) = 0
  Polynomial Bhat, Dhat;
  Real lipschitz_F = 0.0;   // max |F'| on [0,1]
  Real max_abs_F = 0.0;     // max |F| on [0,1]
  Real max_abs_FpF = 0.0;   // max |F' F| on [0,1]; limits the explicit reaction step

  std::optional<std::array<Real, 3>> triple;  // (a0,a1,a2) when radius-1 family
};

struct WellStructure {
  std::vector<Real> roots;    // roots of F in [0,1], ascending
  std::vector<Real> minima;   // local minima of V among the roots
  std::vector<Real> maxima;   // local maxima of V among the roots
  std::vector<bool> attractor;  // per root: stable fixed point of xdot = F(x)
};

/// Exact polynomial expectation of the rate table under nu_rho, summing the
/// 2^(2r+1) local patterns with weight rho^#ones (1-rho)^#zeros.
ReactionPolynomials bd_polynomials(const CylinderRate& rates);

/// Roots of F classified through the sign of V''; repeated roots are refused.
WellStructure classify_wells(const ReactionPolynomials& poly);

struct ConcavityReport {
  bool B_concave = false;
  bool D_concave = false;
};

/// Second-derivative test on [0,1], evaluated at the roots of the third
/// derivative and the endpoints. For radius-1 triples the closed criterion
/// 3 a1 + a0 <= 4 a2 <= 4 a0 is cross-checked against the numeric answer.
ConcavityReport concavity_check(const ReactionPolynomials& poly);

struct ChafeeInfanteModel {
  Real a0 = 0, a1 = 0, a2 = 0;
  Real a = 0, b = 0;       // potential parameters: V = (b/4)(2rho-1)^4 - (a/2)(2rho-1)^2
  Real lambda = 0;         // 32 pi^2 a, instability threshold in rescaled variables
  CylinderRate rates;
  ReactionPolynomials poly;
};

/// Rate triple realizing the double-well reaction term
/// F(rho) = (fb - fa)(2rho - 1) - fb (2rho - 1)^3, for 0 < fa < fb.
/// a2 defaults to the smallest admissible value fa + 2 fb.
ChafeeInfanteModel chafee_infante_params(Real fa, Real fb, std::optional<Real> a2_choice = {});

}  // namespace rdmeta
