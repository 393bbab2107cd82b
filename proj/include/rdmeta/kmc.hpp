#pragma once

#include <rdmeta/model.hpp>

#include <cstdint>
#include <vector>

namespace rdmeta {

/// Event-rate container: a binary sum tree with exactly stored leaves.
/// Leaves are assigned (never accumulated), so they can be compared bitwise
/// against rates recomputed from scratch.
class SumTree {
 public:
  explicit SumTree(int n);
  void set(int i, Real v);
  Real leaf(int i) const { return tree_[cap_ + i]; }
  Real total() const { return tree_[1]; }
  /// First leaf index whose prefix sum exceeds u; requires 0 <= u < total().
  int sample(Real u) const;
  int size() const { return n_; }

 private:
  int n_;
  int cap_;
  std::vector<Real> tree_;
};

struct KmcOptions {
  bool exchanges_enabled = true;
  /// Disabling flips gives the pure stirring dynamics (test harness only;
  /// the model proper requires strictly positive flip rates).
  bool flips_enabled = true;
};

struct KmcResult {
  std::vector<Real> times;
  std::vector<LatticeConfig> snapshots;
  std::uint64_t n_events = 0;
  /// Time of the first event, or +infinity when none occurred by the horizon.
  Real first_event_time = 0.0;
};

/// Exact-in-law simulation of the superposition generator: every bond (x,x+1)
/// exchanges at rate N^2/2 and every site flips at rate c(tau_x eta).
/// Identical (seed, stream, inputs) reproduce identical output.
KmcResult kmc_run(const LatticeConfig& init, const CylinderRate& rates, Real horizon,
                  std::uint64_t seed, const std::vector<Real>& observe_at,
                  const KmcOptions& options = {}, std::uint64_t stream = 0);

/// Access to the incrementally maintained event rates after a run, for
/// bookkeeping checks: entry x is the flip rate of site x, entry N + x the
/// exchange rate of bond (x, x+1).
struct KmcDebugState {
  std::vector<Real> rates;
  LatticeConfig final_config;
};
KmcDebugState kmc_debug_run(const LatticeConfig& init, const CylinderRate& rates, Real horizon,
                            std::uint64_t seed, const KmcOptions& options = {},
                            std::uint64_t stream = 0);

/// Rates recomputed from scratch for a configuration, same layout as above.
std::vector<Real> kmc_rates_from_scratch(const LatticeConfig& config, const CylinderRate& rates,
                                         const KmcOptions& options = {});

}  // namespace rdmeta
