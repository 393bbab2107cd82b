#pragma once

#include <rdmeta/pde.hpp>

#include <limits>

namespace rdmeta {

/// Test function G(t, theta) on the discretization of a path. Values may be
/// sampled at the path's slice times (K+1 columns) or staggered at the
/// interval midpoints (K columns); the functionals below accept both.
struct TestField {
  Real dt = 0.0;
  Matrix values;
};

/// Trapezoidal time integral of || grad rho_t ||_2^2.
Real energy_QT(const DensityPath& path);

/// The path and test field are read as piecewise linear in time, so all time
/// integrals reduce to interval midpoints and the discrete summation by parts
/// is exact. With the mobility averaged onto cell midpoints, J_{T,G} <= I_T
/// holds for every G with equality at the optimizer returned by solve_H.
Real J_functional(const DensityPath& path, const TestField& g, const ReactionPolynomials& poly);

struct NewtonOptions {
  Real residual_tol = 1e-10;
  int max_iters = 120;
  int max_halvings = 60;
  /// When finite, every interval starts Newton from this constant instead of
  /// warm-starting from the previous interval.
  Real init_constant = std::numeric_limits<Real>::quiet_NaN();
};

struct HSolution {
  TestField H;           // staggered: one column per interval midpoint
  Real max_residual = 0.0;
};

/// Per-interval Newton solve of the nonlinear elliptic problem
///   -div(chi(rho) grad H) + B(rho) e^H - D(rho) e^{-H} = w,
/// where w = d_t rho - (1/2) Lap rho at the interval midpoint. The Jacobian
/// is cyclic tridiagonal and solved with the Sherman-Morrison corner trick.
/// Rejects paths touching {0,1}.
HSolution solve_H(const DensityPath& path, const ReactionPolynomials& poly,
                  const NewtonOptions& opts = {});

/// Dynamical rate functional via the explicit formula
///   I = int { (1/2) <chi (grad H)^2> + <B, 1 - e^H + H e^H> + <D, 1 - e^-H - H e^-H> }.
/// Paths touching {0,1} get the +infinity sentinel.
Real rate_I(const DensityPath& path, const ReactionPolynomials& poly,
            const NewtonOptions& opts = {});

/// Pointwise maximizer of Phi(w, rho, G) = w G - B (e^G - 1) - D (e^{-G} - 1):
/// G = log[(w + sqrt(w^2 + 4 B D)) / (2 B)], evaluated cancellation-free.
Real pointwise_maximizer(Real w, Real rho, const ReactionPolynomials& poly);

/// True when every node of every slice lies strictly inside (0,1).
bool path_strictly_inside(const DensityPath& path, Real margin = 1e-12);

}  // namespace rdmeta
