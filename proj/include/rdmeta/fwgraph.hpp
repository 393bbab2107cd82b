#pragma once

#include <rdmeta/types.hpp>

#include <utility>
#include <vector>

namespace rdmeta {

struct Arborescence {
  Real weight = 0.0;
  /// Edges (child, parent), sorted by child; every non-root vertex appears once.
  std::vector<std::pair<int, int>> edges;
};

/// Minimum-weight spanning in-tree into `root` over the complete directed
/// graph with edge (child m, parent n) weighted v(m, n), by the standard
/// contraction algorithm. Ties are broken lexicographically.
Arborescence min_arborescence(const Matrix& v, int root);

struct TreeWeights {
  Vector w;                // per-family minimal tree weight
  Real w_min = 0.0;        // min over families
  Vector w_bar;            // w - w_min, nonnegative with at least one zero
  std::vector<int> argmin;
  std::vector<Arborescence> trees;
};

/// Runs min_arborescence for every root and checks w_i <= w_j + v(j,i).
TreeWeights tree_weights(const Matrix& v);

/// Static rate function W(rho) = min_i { w_bar_i + V_i(rho) }.
Real W_eval(const Vector& v_costs, const TreeWeights& tw);

/// Tree polynomial Q_i = sum over in-trees rooted at i of the edge products.
/// Computed both by direct enumeration (l <= 9) and through the principal
/// minor of the weighted Laplacian; the two routes must agree to 1e-10
/// relative, and the determinant value is returned.
Real tree_polynomial_Q(const Matrix& p, int root);

/// Enumeration route alone (exposed for cross-checks).
Real tree_polynomial_Q_enumerated(const Matrix& p, int root);

struct SandwichBounds {
  Vector lower, upper;
};

/// Bounds on nu(Omega_i) for any invariant measure of a chain whose
/// transition masses satisfy (1/a) p_low <= P(x, Omega_j) <= a p_high:
///   a^{-2(l-1)} Q_i / sum Q~_j  <=  nu(Omega_i)  <=  a^{2(l-1)} Q~_i / sum Q_j.
SandwichBounds invariant_sandwich(const Matrix& p_low, const Matrix& p_high, Real a);

}  // namespace rdmeta
