#include <rdmeta/fwgraph.hpp>

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rdmeta {

namespace {

struct Edge {
  int child, parent;  // ids at the current contraction level
  Real w;
  int id;             // index into the original edge list
};

bool better(const Edge& a, const Edge& b) {
  if (a.w != b.w) return a.w < b.w;
  return a.id < b.id;  // original edges are listed lexicographically
}

// Recursive cycle-contraction on the "each non-root picks a parent" problem.
// Returns the tree weight and the chosen original edge ids.
std::pair<Real, std::vector<int>> contract(int n_ids, const std::vector<int>& nodes,
                                           const std::vector<Edge>& edges, int root) {
  std::vector<Edge> best(static_cast<std::size_t>(n_ids),
                         Edge{-1, -1, std::numeric_limits<Real>::infinity(), -1});
  for (const Edge& e : edges)
    if (e.child != root && better(e, best[static_cast<std::size_t>(e.child)]))
      best[static_cast<std::size_t>(e.child)] = e;
  for (int v : nodes)
    if (v != root && best[static_cast<std::size_t>(v)].child < 0)
      throw std::invalid_argument("graph has a node with no admissible parent");

  // hunt for a cycle in the selection
  std::vector<int> state(static_cast<std::size_t>(n_ids), 0);
  std::vector<int> cycle;
  for (int start : nodes) {
    if (state[static_cast<std::size_t>(start)] != 0 || start == root) continue;
    std::vector<int> trail;
    int v = start;
    while (v != root && state[static_cast<std::size_t>(v)] == 0) {
      state[static_cast<std::size_t>(v)] = 1;
      trail.push_back(v);
      v = best[static_cast<std::size_t>(v)].parent;
    }
    if (v != root && state[static_cast<std::size_t>(v)] == 1) {
      auto it = std::find(trail.begin(), trail.end(), v);
      cycle.assign(it, trail.end());
    }
    for (int u : trail) state[static_cast<std::size_t>(u)] = 2;
    if (!cycle.empty()) break;
  }

  if (cycle.empty()) {
    Real total = 0.0;
    std::vector<int> chosen;
    for (int v : nodes)
      if (v != root) {
        total += best[static_cast<std::size_t>(v)].w;
        chosen.push_back(best[static_cast<std::size_t>(v)].id);
      }
    return {total, std::move(chosen)};
  }

  std::vector<bool> in_cycle(static_cast<std::size_t>(n_ids), false);
  Real cycle_weight = 0.0;
  for (int v : cycle) {
    in_cycle[static_cast<std::size_t>(v)] = true;
    cycle_weight += best[static_cast<std::size_t>(v)].w;
  }
  const int super = n_ids;

  std::vector<int> sub_nodes{super};
  for (int v : nodes)
    if (!in_cycle[static_cast<std::size_t>(v)]) sub_nodes.push_back(v);
  std::vector<Edge> sub_edges;
  std::vector<std::pair<int, int>> exit_edge;  // (original id, this-level child in the cycle)
  for (const Edge& e : edges) {
    const bool c_in = in_cycle[static_cast<std::size_t>(e.child)];
    const bool p_in = in_cycle[static_cast<std::size_t>(e.parent)];
    if (!c_in && !p_in) {
      sub_edges.push_back(e);
    } else if (!c_in && p_in) {
      sub_edges.push_back({e.child, super, e.w, e.id});
    } else if (c_in && !p_in) {
      sub_edges.push_back({super, e.parent, e.w - best[static_cast<std::size_t>(e.child)].w,
                           e.id});
      exit_edge.emplace_back(e.id, e.child);
    }
  }

  auto [sub_weight, chosen] = contract(n_ids + 1, sub_nodes, sub_edges, root);

  // the supernode's outgoing edge identifies which cycle member repointed
  int repointed = -1;
  for (int id : chosen)
    for (const auto& [eid, child] : exit_edge)
      if (eid == id) repointed = child;
  if (repointed < 0) throw std::logic_error("contracted tree lost the cycle exit edge");

  for (int v : cycle)
    if (v != repointed) chosen.push_back(best[static_cast<std::size_t>(v)].id);
  return {sub_weight + cycle_weight, std::move(chosen)};
}

}  // namespace

Arborescence min_arborescence(const Matrix& v, int root) {
  const int l = static_cast<int>(v.rows());
  if (v.cols() != l) throw std::invalid_argument("cost matrix must be square");
  if (root < 0 || root >= l) throw std::invalid_argument("root out of range");

  std::vector<int> nodes(static_cast<std::size_t>(l));
  for (int i = 0; i < l; ++i) nodes[static_cast<std::size_t>(i)] = i;
  std::vector<Edge> edges;
  std::vector<std::pair<int, int>> endpoints;
  for (int c = 0; c < l; ++c)
    for (int p = 0; p < l; ++p)
      if (c != p && std::isfinite(v(c, p))) {
        edges.push_back({c, p, v(c, p), static_cast<int>(endpoints.size())});
        endpoints.emplace_back(c, p);
      }

  auto [weight, chosen] = contract(l, nodes, edges, root);
  Arborescence out;
  out.weight = weight;
  for (int id : chosen) out.edges.push_back(endpoints[static_cast<std::size_t>(id)]);
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

TreeWeights tree_weights(const Matrix& v) {
  const int l = static_cast<int>(v.rows());
  TreeWeights tw;
  tw.w.resize(l);
  tw.trees.reserve(static_cast<std::size_t>(l));
  for (int i = 0; i < l; ++i) {
    tw.trees.push_back(min_arborescence(v, i));
    tw.w[i] = tw.trees.back().weight;
  }
  tw.w_min = tw.w.minCoeff();
  tw.w_bar = tw.w.array() - tw.w_min;
  for (int i = 0; i < l; ++i)
    if (tw.w_bar[i] <= 0.0) tw.argmin.push_back(i);
  const Real scale = 1e-9 * std::max(1.0, tw.w.cwiseAbs().maxCoeff());
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j)
      if (i != j && tw.w[i] > tw.w[j] + v(j, i) + scale)
        throw std::runtime_error("tree weights violate w_i <= w_j + v(j,i)");
  return tw;
}

Real W_eval(const Vector& v_costs, const TreeWeights& tw) {
  if (v_costs.size() != tw.w.size())
    throw std::invalid_argument("per-family cost vector size mismatch");
  Real best = std::numeric_limits<Real>::infinity();
  for (Index i = 0; i < v_costs.size(); ++i) best = std::min(best, tw.w_bar[i] + v_costs[i]);
  return best;
}

namespace {

void enumerate_trees(const Matrix& p, int root, int node, std::vector<int>& parent, Real product,
                     Real& total) {
  const int l = static_cast<int>(p.rows());
  if (node == l) {
    total += product;
    return;
  }
  if (node == root) {
    enumerate_trees(p, root, node + 1, parent, product, total);
    return;
  }
  for (int cand = 0; cand < l; ++cand) {
    if (cand == node) continue;
    // reject immediately if the new edge closes a cycle among assigned nodes
    int walk = cand;
    bool cycle = false;
    while (walk != root && walk != -1) {
      if (walk == node) {
        cycle = true;
        break;
      }
      walk = parent[static_cast<std::size_t>(walk)];
    }
    if (cycle) continue;
    parent[static_cast<std::size_t>(node)] = cand;
    enumerate_trees(p, root, node + 1, parent, product * p(node, cand), total);
    parent[static_cast<std::size_t>(node)] = -1;
  }
}

}  // namespace

Real tree_polynomial_Q_enumerated(const Matrix& p, int root) {
  const int l = static_cast<int>(p.rows());
  if (l > 9) throw std::invalid_argument("tree enumeration is limited to l <= 9");
  std::vector<int> parent(static_cast<std::size_t>(l), -1);
  Real total = 0.0;
  enumerate_trees(p, root, 0, parent, 1.0, total);
  return total;
}

Real tree_polynomial_Q(const Matrix& p, int root) {
  const int l = static_cast<int>(p.rows());
  if (p.cols() != l) throw std::invalid_argument("matrix must be square");
  if (root < 0 || root >= l) throw std::invalid_argument("root out of range");

  // Markov-chain tree theorem: principal minor of the out-degree Laplacian
  Matrix lap = Matrix::Zero(l, l);
  for (int m = 0; m < l; ++m)
    for (int n = 0; n < l; ++n)
      if (m != n) {
        lap(m, m) += p(m, n);
        lap(m, n) -= p(m, n);
      }
  Matrix minor(l - 1, l - 1);
  for (int i = 0, ii = 0; i < l; ++i) {
    if (i == root) continue;
    for (int j = 0, jj = 0; j < l; ++j) {
      if (j == root) continue;
      minor(ii, jj) = lap(i, j);
      ++jj;
    }
    ++ii;
  }
  const Real det = l == 1 ? 1.0 : minor.determinant();

  if (l <= 9) {
    const Real enumerated = tree_polynomial_Q_enumerated(p, root);
    const Real scale = std::max({std::abs(det), std::abs(enumerated), 1e-300});
    if (std::abs(det - enumerated) > 1e-10 * scale)
      throw std::runtime_error("tree-theorem determinant disagrees with enumeration");
  }
  return det;
}

SandwichBounds invariant_sandwich(const Matrix& p_low, const Matrix& p_high, Real a) {
  if (a < 1.0) throw std::invalid_argument("the envelope factor must satisfy a >= 1");
  const int l = static_cast<int>(p_low.rows());
  if (p_high.rows() != l || p_low.cols() != l || p_high.cols() != l)
    throw std::invalid_argument("matrices must be square and matched");
  Vector q(l), qt(l);
  for (int i = 0; i < l; ++i) {
    q[i] = tree_polynomial_Q(p_low, i);
    qt[i] = tree_polynomial_Q(p_high, i);
  }
  const Real factor = std::pow(a, 2.0 * (l - 1));
  SandwichBounds out;
  out.lower = q / (factor * qt.sum());
  out.upper = factor * qt / q.sum();
  return out;
}

}  // namespace rdmeta
