#include <rdmeta/experiments.hpp>
#include <rdmeta/ldp.hpp>
#include <rdmeta/rng.hpp>
#include <rdmeta/version.hpp>

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace rdmeta;

ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return ExperimentConfig{};
  return config_from_json(nlohmann::json::parse(read_text_file(path)));
}

void apply_overrides(ExperimentConfig& cfg, std::uint64_t seed, bool seed_set,
                     const std::string& out, int threads) {
  if (seed_set) cfg.seed = seed;
  if (!out.empty()) cfg.out_dir = out;
  if (threads > 0) cfg.threads = threads;
}

int cmd_simulate(const ExperimentConfig& cfg) {
  const ChafeeInfanteModel model = config_model(cfg);
  CounterRng init_rng(cfg.seed, 0xC0FFEE);
  const Vector gamma = config_initial_profile(cfg, cfg.n_sites);
  LatticeConfig init;
  init.occupancy.resize(static_cast<std::size_t>(cfg.n_sites));
  for (int x = 0; x < cfg.n_sites; ++x)
    init.occupancy[static_cast<std::size_t>(x)] = init_rng.next_unit() < gamma[x] ? 1 : 0;

  std::vector<Real> observe;
  for (Real t = 0.0; t <= cfg.horizon + 1e-12; t += cfg.thinning) observe.push_back(t);
  const KmcResult run = kmc_run(init, model.rates, cfg.horizon, cfg.seed, observe);
  write_text_file(cfg.out_dir + "/snapshots.txt", snapshots_to_text(run));
  std::cout << "snapshots: " << run.snapshots.size() << ", events: " << run.n_events << "\n";
  return 0;
}

int cmd_hydro(const ExperimentConfig& cfg) {
  const ChafeeInfanteModel model = config_model(cfg);
  const Vector gamma = config_initial_profile(cfg, cfg.grid);
  HydroOptions opts;
  const Real dt = cfg.dt > 0.0 ? cfg.dt : default_dt(model.poly);
  const Index steps = static_cast<Index>(std::ceil(cfg.horizon / dt));
  opts.record_stride = std::max<Index>(1, steps / 500);
  const DensityPath path = hydro_solve(make_density_field(gamma), cfg.horizon, dt, model.poly,
                                       opts);
  write_text_file(cfg.out_dir + "/path.csv", path_to_csv(path));
  std::cout << "slices: " << path.slices.cols() << ", dt: " << path.dt << "\n";
  return 0;
}

int cmd_census(const ExperimentConfig& cfg) {
  const ChafeeInfanteModel model = config_model(cfg);
  CensusOptions opts;
  opts.grid = cfg.census_grid;
  opts.fourier_modes = cfg.fourier_modes;
  const auto census = stationary_census(model.poly, opts);
  const nlohmann::json j = census_to_json(census, model.poly, cfg.out_dir + "/profiles");
  write_text_file(cfg.out_dir + "/census.json", j.dump(2));
  std::cout << "families: " << census.size() << "\n";
  return 0;
}

int cmd_rate_eval(const ExperimentConfig& cfg, const std::string& path_file) {
  const ChafeeInfanteModel model = config_model(cfg);
  const DensityPath path = path_from_csv(read_text_file(path_file));
  const HSolution sol = solve_H(path, model.poly);
  const nlohmann::json report{{"T", path.horizon()},
                              {"dt", path.dt},
                              {"M", path.grid_size()},
                              {"I_T", rate_I(path, model.poly)},
                              {"Q_T", energy_QT(path)},
                              {"max_residual", sol.max_residual}};
  write_text_file(cfg.out_dir + "/rate_eval.json", report.dump(2));
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_qp(const ExperimentConfig& cfg) {
  const ChafeeInfanteModel model = config_model(cfg);
  CensusOptions census_opts;
  census_opts.grid = cfg.census_grid;
  census_opts.fourier_modes = cfg.fourier_modes;
  const auto census = stationary_census(model.poly, census_opts);
  VMatrixOptions vopts;
  vopts.mam.T_grid = cfg.T_grid;
  vopts.mam.slices = cfg.mam_slices;
  vopts.mam.grid = cfg.mam_grid;
  const CostMatrix cm = v_matrix(census, model.poly, vopts);
  write_text_file(cfg.out_dir + "/cost_matrix.json", cost_matrix_to_json(cm).dump(2));
  std::cout << cost_matrix_to_json(cm).dump(2) << "\n";
  return 0;
}

int cmd_fw(const ExperimentConfig& cfg, const std::string& costs_file) {
  const CostMatrix cm = cost_matrix_from_json(nlohmann::json::parse(read_text_file(costs_file)));
  const TreeWeights tw = tree_weights(cm.v);
  const nlohmann::json j = tree_report_to_json(tw, cm.v);
  write_text_file(cfg.out_dir + "/tree_report.json", j.dump(2));
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reaction-diffusion metastability toolkit"};
  app.set_version_flag("--version", rdmeta::kVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir, path_file, costs_file, experiment_name;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
      seed_set = true;
    });
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads");
  };

  auto* simulate = app.add_subcommand("simulate", "event-driven lattice simulation");
  add_common(simulate);
  auto* hydro = app.add_subcommand("hydro", "solve the reaction-diffusion equation");
  add_common(hydro);
  auto* census = app.add_subcommand("census", "stationary-solution census");
  add_common(census);
  auto* rate_eval = app.add_subcommand("rate-eval", "evaluate the rate functional on a path");
  add_common(rate_eval);
  rate_eval->add_option("--path", path_file, "path CSV file")->required();
  auto* qp = app.add_subcommand("qp", "assemble the quasi-potential cost matrix");
  add_common(qp);
  auto* fw = app.add_subcommand("fw", "tree weights from a cost matrix");
  add_common(fw);
  fw->add_option("--costs", costs_file, "cost matrix JSON")->required();
  auto* experiment = app.add_subcommand("experiment", "run a named experiment");
  add_common(experiment);
  experiment->add_option("name", experiment_name, "hydrodynamics|hydrostatics|census|quasipotential")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    rdmeta::ExperimentConfig cfg = load_config(config_path);
    apply_overrides(cfg, seed, seed_set, out_dir, threads);
    if (simulate->parsed()) return cmd_simulate(cfg);
    if (hydro->parsed()) return cmd_hydro(cfg);
    if (census->parsed()) return cmd_census(cfg);
    if (rate_eval->parsed()) return cmd_rate_eval(cfg, path_file);
    if (qp->parsed()) return cmd_qp(cfg);
    if (fw->parsed()) return cmd_fw(cfg, costs_file);
    if (experiment->parsed()) {
      const nlohmann::json report = rdmeta::run_experiment(experiment_name, cfg);
      std::cout << report.dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
