#include <doctest.h>

#include <rdmeta/fwgraph.hpp>
#include <rdmeta/rng.hpp>

#include "oracles.hpp"

#include <Eigen/Dense>

#include <cmath>

using namespace rdmeta;

namespace {

Matrix random_costs(CounterRng& rng, int l, Real lo = 0.0, Real hi = 5.0) {
  Matrix v = Matrix::Zero(l, l);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j)
      if (i != j) v(i, j) = rng.next_range(lo, hi);
  return v;
}

}  // namespace

TEST_SUITE("fwgraph") {
  TEST_CASE("two families have single-edge trees") {
    Matrix v(2, 2);
    v << 0.0, 1.7, 0.4, 0.0;
    const auto t0 = min_arborescence(v, 0);
    const auto t1 = min_arborescence(v, 1);
    CHECK(t0.weight == doctest::Approx(0.4));  // edge (1 -> 0)
    CHECK(t1.weight == doctest::Approx(1.7));  // edge (0 -> 1)
    REQUIRE(t0.edges.size() == 1);
    CHECK(t0.edges[0] == std::make_pair(1, 0));
    CHECK(t1.edges[0] == std::make_pair(0, 1));
  }

  TEST_CASE("contraction equals exhaustive enumeration on random graphs") {
    CounterRng rng(99);
    for (int l = 2; l <= 7; ++l) {
      for (int trial = 0; trial < 60; ++trial) {
        const Matrix v = random_costs(rng, l);
        for (int root = 0; root < l; ++root) {
          const auto tree = min_arborescence(v, root);
          const Real brute = oracles::brute_force_arborescence(v, root);
          CHECK(tree.weight == doctest::Approx(brute).epsilon(1e-12));
          // returned edges form a valid in-tree of that weight
          Real total = 0.0;
          std::vector<int> parent(static_cast<std::size_t>(l), -1);
          for (const auto& [c, p] : tree.edges) {
            total += v(c, p);
            parent[static_cast<std::size_t>(c)] = p;
          }
          CHECK(total == doctest::Approx(tree.weight));
          for (int node = 0; node < l; ++node) {
            if (node == root) continue;
            int walk = node, hops = 0;
            while (walk != root && hops++ <= l) walk = parent[static_cast<std::size_t>(walk)];
            CHECK(walk == root);
          }
        }
      }
    }
  }

  TEST_CASE("tree weights satisfy the exchange inequality") {
    CounterRng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
      const int l = 2 + static_cast<int>(rng.next_below(5));
      const auto tw = tree_weights(random_costs(rng, l));  // validates w_i <= w_j + v(j,i)
      CHECK(tw.w_bar.minCoeff() == 0.0);
      CHECK(!tw.argmin.empty());
    }
  }

  TEST_CASE("double-well shaped matrix puts the argmin on the stable wells") {
    // families ordered (rho_-, 1/2, rho_+): zero edges out of the middle
    Matrix v(3, 3);
    v << 0.0, 0.9, 1.1,   // exits from rho_-
        0.0, 0.0, 0.0,    // the unstable constant falls for free
        1.3, 1.0, 0.0;    // exits from rho_+
    const auto tw = tree_weights(v);
    CHECK(tw.w[1] > tw.w[0]);
    CHECK(tw.w[1] > tw.w[2]);
    for (int i : tw.argmin) CHECK((i == 0 || i == 2));
    // rooted at rho_+: both rho_- routes compete through the middle
    CHECK(tw.w[2] == doctest::Approx(0.9));  // rho_- -> 1/2 (0.9) + 1/2 -> rho_+ (0)
  }

  TEST_CASE("W evaluation identities") {
    CounterRng rng(8);
    const int l = 4;
    const Matrix v = random_costs(rng, l);
    const auto tw = tree_weights(v);
    // at a base point: V_j(rho_i) = v(j, i), V_i = 0, and W returns w_bar_i
    for (int i = 0; i < l; ++i) {
      Vector vi(l);
      for (int j = 0; j < l; ++j) vi[j] = j == i ? 0.0 : v(j, i);
      CHECK(W_eval(vi, tw) == doctest::Approx(tw.w_bar[i]).epsilon(1e-12));
    }
    // min property
    Vector costs(l);
    for (int j = 0; j < l; ++j) costs[j] = rng.next_range(0.0, 2.0);
    const Real w = W_eval(costs, tw);
    for (int j = 0; j < l; ++j) CHECK(w <= tw.w_bar[j] + costs[j] + 1e-12);
  }

  TEST_CASE("tree polynomial routes agree") {
    Matrix p(2, 2);
    p << 0.0, 0.6, 0.25, 0.0;
    CHECK(tree_polynomial_Q(p, 0) == doctest::Approx(0.25));
    CHECK(tree_polynomial_Q(p, 1) == doctest::Approx(0.6));

    CounterRng rng(9);
    for (int l = 3; l <= 6; ++l)
      for (int trial = 0; trial < 20; ++trial) {
        const Matrix q = random_costs(rng, l, 0.01, 2.0);
        for (int root = 0; root < l; ++root) {
          const Real det_route = tree_polynomial_Q(q, root);  // self-checks vs enumeration
          CHECK(det_route ==
                doctest::Approx(tree_polynomial_Q_enumerated(q, root)).epsilon(1e-10));
        }
      }

    // unreachable root: no outgoing mass from one node kills every tree
    Matrix blocked = random_costs(rng, 3, 0.5, 1.0);
    blocked.row(2).setZero();
    CHECK(tree_polynomial_Q(blocked, 0) == doctest::Approx(0.0));
  }

  TEST_CASE("collapsed sandwich recovers the tree-theorem stationary mass") {
    CounterRng rng(10);
    const int l = 3;
    const Matrix p = random_costs(rng, l, 0.1, 1.0);
    const auto bounds = invariant_sandwich(p, p, 1.0);
    Vector q(l);
    for (int i = 0; i < l; ++i) q[i] = tree_polynomial_Q(p, i);
    for (int i = 0; i < l; ++i) {
      CHECK(bounds.lower[i] == doctest::Approx(q[i] / q.sum()).epsilon(1e-12));
      CHECK(bounds.upper[i] == doctest::Approx(q[i] / q.sum()).epsilon(1e-12));
    }
  }

  TEST_CASE("two-state chain lies inside the sandwich") {
    Matrix p(2, 2);
    p << 0.0, 0.3, 0.7, 0.0;
    const Real nu0 = 0.7 / (0.3 + 0.7);
    for (Real a : {1.05, 1.3, 2.0}) {
      const auto bounds = invariant_sandwich(p, p, a);
      CHECK(bounds.lower[0] <= nu0 + 1e-12);
      CHECK(nu0 <= bounds.upper[0] + 1e-12);
    }
  }

  TEST_CASE("random four-state chains respect the invariant-measure sandwich") {
    CounterRng rng(11);
    const int l = 4;
    const Real a = 1.2;
    for (int trial = 0; trial < 100; ++trial) {
      // random row-stochastic kernel with positive off-diagonal entries
      Matrix kernel(l, l);
      for (int i = 0; i < l; ++i) {
        Real row = 0.0;
        for (int j = 0; j < l; ++j) {
          kernel(i, j) = j == i ? 0.0 : rng.next_range(0.05, 1.0);
          row += kernel(i, j);
        }
        kernel.row(i) /= row;
      }
      // envelopes p and p~ with (1/a) p <= P <= a p~
      Matrix p_low = kernel, p_high = kernel;
      for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j)
          if (i != j) {
            p_low(i, j) *= rng.next_range(1.0 / a, a);
            p_high(i, j) *= rng.next_range(1.0 / a, a);
          }

      // exact stationary vector
      Matrix system = kernel.transpose() - Matrix::Identity(l, l);
      system.row(l - 1).setOnes();
      Vector rhs = Vector::Zero(l);
      rhs[l - 1] = 1.0;
      const Vector nu = system.fullPivLu().solve(rhs);

      const auto bounds = invariant_sandwich(p_low, p_high, a);
      for (int i = 0; i < l; ++i) {
        CHECK(bounds.lower[i] <= nu[i] + 1e-12);
        CHECK(nu[i] <= bounds.upper[i] + 1e-12);
      }
    }
  }
}
