#pragma once

#include <rdmeta/io.hpp>

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace rdmeta {

/// Configuration shared by the desk-scale experiments. Parsed from JSON with
/// a versioned schema; every run embeds the config hash in its report.
struct ExperimentConfig {
  int schema_version = 1;

  // model: either the double-well family (fa, fb) or an explicit rate triple
  std::optional<std::pair<Real, Real>> fab = std::make_pair(1.0, 2.0);
  std::optional<std::array<Real, 3>> rate_triple;

  int n_sites = 256;
  std::vector<int> n_values = {64, 128, 256};
  Index grid = 256;
  Real dt = 0.0;          // 0 = stiffness-scaled default
  Real horizon = 0.5;
  Real burn_in = 10.0;
  int samples = 10000;
  Real thinning = 0.1;    // sampling interval for stationary runs
  int replicas = 100;
  std::uint64_t seed = 1;
  int truncation = 20;
  Real delta = 0.05;      // neighborhood radius in the d metric
  int threads = 1;
  std::string out_dir = "out";
  std::string initial_profile = "half";  // "half" | "cosine" | "constant:<v>"

  Index census_grid = 512;
  int fourier_modes = 96;
  std::vector<Real> T_grid = {1.0, 2.0, 4.0, 8.0};
  Index mam_slices = 48;
  Index mam_grid = 64;
  int w_landscape_points = 17;
  std::vector<std::pair<Real, Real>> census_sweep = {{1.0, 2.0}, {1.0, 12.0}};
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Builds the model polynomials named by the config.
ChafeeInfanteModel config_model(const ExperimentConfig& cfg);

/// Sampled density profile used for initial data.
Vector config_initial_profile(const ExperimentConfig& cfg, Index grid);

/// Runs fn(0..n-1) on the requested number of threads; results must be
/// written to preallocated slots so the merge stays deterministic.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

/// Convergence of the empirical measure toward the hydrodynamic solution:
/// median d-distance per lattice size, replica table in CSV.
nlohmann::json experiment_hydrodynamics(const ExperimentConfig& cfg);

/// Stationary-state concentration: fractions of thinned samples within delta
/// of the stationary families, the well split, and the N-sweep of the mass
/// near the unstable constant.
nlohmann::json experiment_hydrostatics(const ExperimentConfig& cfg);

/// Census size and branch profiles across the parameter sweep; logs both the
/// time-map admissibility count and the literal m^2 < lambda count.
nlohmann::json experiment_census(const ExperimentConfig& cfg);

/// Full pipeline census -> cost matrix -> tree weights -> W landscape along
/// the family of constant targets.
nlohmann::json experiment_quasipotential(const ExperimentConfig& cfg);

nlohmann::json run_experiment(const std::string& name, const ExperimentConfig& cfg);

}  // namespace rdmeta
