#include <rdmeta/kmc.hpp>
#include <rdmeta/rng.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rdmeta {

SumTree::SumTree(int n) : n_(n) {
  cap_ = 1;
  while (cap_ < n_) cap_ <<= 1;
  tree_.assign(static_cast<std::size_t>(2 * cap_), 0.0);
}

void SumTree::set(int i, Real v) {
  int node = cap_ + i;
  tree_[static_cast<std::size_t>(node)] = v;
  for (node >>= 1; node >= 1; node >>= 1)
    tree_[static_cast<std::size_t>(node)] =
        tree_[static_cast<std::size_t>(2 * node)] + tree_[static_cast<std::size_t>(2 * node + 1)];
}

int SumTree::sample(Real u) const {
  int node = 1;
  while (node < cap_) {
    const Real left = tree_[static_cast<std::size_t>(2 * node)];
    if (u < left) {
      node = 2 * node;
    } else {
      u -= left;
      node = 2 * node + 1;
    }
  }
  int leaf = node - cap_;
  // guard against roundoff walking past the last positive leaf
  if (leaf >= n_ || tree_[static_cast<std::size_t>(node)] <= 0.0) {
    leaf = n_ - 1;
    while (leaf > 0 && tree_[static_cast<std::size_t>(cap_ + leaf)] <= 0.0) --leaf;
  }
  return leaf;
}

namespace {

struct Simulator {
  const KmcOptions opts;
  const int n;
  const int radius;
  const Real exchange_rate;  // N^2 / 2 per active bond
  std::vector<Real> table;
  std::vector<std::uint8_t> occ;
  SumTree tree;

  Simulator(const LatticeConfig& init, const CylinderRate& r, const KmcOptions& o)
      : opts(o), n(init.n_sites()), radius(r.radius()),
        exchange_rate(0.5 * Real(init.n_sites()) * Real(init.n_sites())),
        table(r.table().data(), r.table().data() + r.table().size()),
        occ(init.occupancy), tree(2 * init.n_sites()) {
    if (n <= 2 * radius)
      throw std::invalid_argument("lattice must be larger than twice the rate window radius");
    for (int x = 0; x < n; ++x) refresh_site(x);
    for (int b = 0; b < n; ++b) refresh_bond(b);
  }

  int wrap(int x) const {
    if (x >= n) x -= n;
    if (x < 0) x += n;
    return x;
  }

  void refresh_site(int x) {
    if (!opts.flips_enabled) {
      tree.set(x, 0.0);
      return;
    }
    int pattern = 0;
    int y = wrap(x - radius);
    for (int bit = 0; bit <= 2 * radius; ++bit) {
      pattern |= occ[static_cast<std::size_t>(y)] << bit;
      ++y;
      if (y == n) y = 0;
    }
    tree.set(x, table[static_cast<std::size_t>(pattern)]);
  }

  void refresh_bond(int b) {
    const int x = b, y = b + 1 == n ? 0 : b + 1;
    const bool active = opts.exchanges_enabled &&
                        occ[static_cast<std::size_t>(x)] != occ[static_cast<std::size_t>(y)];
    tree.set(n + b, active ? exchange_rate : 0.0);
  }

  void flip_site(int x) {
    auto& v = occ[static_cast<std::size_t>(x)];
    v = static_cast<std::uint8_t>(1 - v);
    for (int k = -radius; k <= radius; ++k) refresh_site(wrap(x + k));
    refresh_bond(wrap(x - 1));
    refresh_bond(x);
  }

  void exchange_bond(int b) {
    const int x = b, y = b + 1 == n ? 0 : b + 1;
    std::swap(occ[static_cast<std::size_t>(x)], occ[static_cast<std::size_t>(y)]);
    for (int k = -radius; k <= radius + 1; ++k) refresh_site(wrap(x + k));
    refresh_bond(wrap(b - 1));
    refresh_bond(b);
    refresh_bond(wrap(b + 1));
  }

  void apply(int event) {
    if (event < n)
      flip_site(event);
    else
      exchange_bond(event - n);
  }

  LatticeConfig config() const {
    LatticeConfig c;
    c.occupancy = occ;
    return c;
  }
};

}  // namespace

KmcResult kmc_run(const LatticeConfig& init, const CylinderRate& rates, Real horizon,
                  std::uint64_t seed, const std::vector<Real>& observe_at,
                  const KmcOptions& options, std::uint64_t stream) {
  if (horizon < 0.0) throw std::invalid_argument("horizon must be nonnegative");
  for (std::size_t i = 0; i < observe_at.size(); ++i) {
    if (observe_at[i] < 0.0 || observe_at[i] > horizon)
      throw std::invalid_argument("observation times must lie in [0, horizon]");
    if (i > 0 && observe_at[i] < observe_at[i - 1])
      throw std::invalid_argument("observation times must be sorted");
  }

  Simulator sim(init, rates, options);
  CounterRng rng(seed, stream);
  KmcResult result;
  result.times = observe_at;
  result.snapshots.reserve(observe_at.size());
  result.first_event_time = std::numeric_limits<Real>::infinity();

  Real t = 0.0;
  std::size_t obs = 0;
  while (true) {
    const Real total = sim.tree.total();
    Real t_next = horizon;
    bool have_event = false;
    if (total > 0.0) {
      t_next = t + rng.next_exp(total);
      have_event = t_next <= horizon;
    }
    const Real flush_until = have_event ? t_next : horizon;
    while (obs < observe_at.size() && observe_at[obs] < flush_until) {
      result.snapshots.push_back(sim.config());
      ++obs;
    }
    if (!have_event) break;
    t = t_next;
    if (result.n_events == 0) result.first_event_time = t;
    const int event = sim.tree.sample(rng.next_unit() * total);
    sim.apply(event);
    ++result.n_events;
  }
  while (obs < observe_at.size()) {
    result.snapshots.push_back(sim.config());
    ++obs;
  }
  return result;
}

KmcDebugState kmc_debug_run(const LatticeConfig& init, const CylinderRate& rates, Real horizon,
                            std::uint64_t seed, const KmcOptions& options, std::uint64_t stream) {
  Simulator sim(init, rates, options);
  CounterRng rng(seed, stream);
  Real t = 0.0;
  while (true) {
    const Real total = sim.tree.total();
    if (total <= 0.0) break;
    t += rng.next_exp(total);
    if (t > horizon) break;
    sim.apply(sim.tree.sample(rng.next_unit() * total));
  }
  KmcDebugState state;
  state.rates.resize(static_cast<std::size_t>(2 * sim.n));
  for (int i = 0; i < 2 * sim.n; ++i) state.rates[static_cast<std::size_t>(i)] = sim.tree.leaf(i);
  state.final_config = sim.config();
  return state;
}

std::vector<Real> kmc_rates_from_scratch(const LatticeConfig& config, const CylinderRate& rates,
                                         const KmcOptions& options) {
  Simulator sim(config, rates, options);
  std::vector<Real> out(static_cast<std::size_t>(2 * sim.n));
  for (int i = 0; i < 2 * sim.n; ++i) out[static_cast<std::size_t>(i)] = sim.tree.leaf(i);
  return out;
}

}  // namespace rdmeta
