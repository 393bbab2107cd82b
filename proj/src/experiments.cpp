#include <rdmeta/experiments.hpp>
#include <rdmeta/rng.hpp>
#include <rdmeta/version.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rdmeta {

namespace {

constexpr std::uint64_t kHydroSalt = 0x48594452ULL;
constexpr std::uint64_t kStatSalt = 0x53544154ULL;

Real median(std::vector<Real> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool flip_symmetric(const CylinderRate& rates) {
  const int bits = 2 * rates.radius() + 1;
  const int mask = (1 << bits) - 1;
  for (int p = 0; p < (1 << bits); ++p)
    if (std::abs(rates.table()[p] - rates.table()[(~p) & mask]) > 1e-12) return false;
  return true;
}

LatticeConfig sample_product(const Vector& density, CounterRng& rng) {
  LatticeConfig c;
  c.occupancy.resize(static_cast<std::size_t>(density.size()));
  for (Index x = 0; x < density.size(); ++x)
    c.occupancy[static_cast<std::size_t>(x)] = rng.next_unit() < density[x] ? 1 : 0;
  return c;
}

// precomputed basis table: entry (k + K, x) = e_k(x / N)
Matrix basis_table(int truncation, int n) {
  Matrix table(2 * truncation + 1, n);
  for (int x = 0; x < n; ++x) {
    const Real theta = Real(x) / Real(n);
    table(truncation, x) = 1.0;
    for (int k = 1; k <= truncation; ++k) {
      table(truncation + k, x) = std::sqrt(2.0) * std::cos(2.0 * kPi * k * theta);
      table(truncation - k, x) = std::sqrt(2.0) * std::sin(2.0 * kPi * k * theta);
    }
  }
  return table;
}

Vector coords_of(const LatticeConfig& config, const Matrix& table) {
  Vector c = Vector::Zero(table.rows());
  for (int x = 0; x < config.n_sites(); ++x)
    if (config.occupancy[static_cast<std::size_t>(x)]) c += table.col(x);
  return c / Real(config.n_sites());
}

Real coords_distance(const Vector& a, const Vector& b, int truncation) {
  Real d = 0.0;
  for (int k = -truncation; k <= truncation; ++k)
    d += std::pow(2.0, -std::abs(k)) * std::abs(a[k + truncation] - b[k + truncation]);
  return d;
}

// coordinates of every grid translate for non-constant families
std::vector<Vector> family_translate_coords(const StationaryProfile& fam, int truncation) {
  std::vector<Vector> out;
  if (fam.is_constant()) {
    Vector c = Vector::Zero(2 * truncation + 1);
    c[truncation] = fam.field.values[0];
    out.push_back(std::move(c));
    return out;
  }
  const Index m = fam.field.grid_size();
  for (Index s = 0; s < m; ++s)
    out.push_back(measure_coords(rotate(fam.field.values, s), truncation).coeffs);
  return out;
}

Real family_coord_distance(const Vector& sample, const std::vector<Vector>& translates,
                           int truncation) {
  Real best = std::numeric_limits<Real>::infinity();
  for (const Vector& t : translates) best = std::min(best, coords_distance(sample, t, truncation));
  return best;
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (j.contains("schema_version")) cfg.schema_version = j.at("schema_version").get<int>();
  if (cfg.schema_version != 1) throw std::invalid_argument("unsupported config schema version");
  if (j.contains("model")) {
    const auto& m = j.at("model");
    if (m.contains("fa")) {
      cfg.fab = std::make_pair(m.at("fa").get<Real>(), m.at("fb").get<Real>());
      cfg.rate_triple.reset();
    } else if (m.contains("rates")) {
      const auto r = m.at("rates");
      cfg.rate_triple = {r[0].get<Real>(), r[1].get<Real>(), r[2].get<Real>()};
      cfg.fab.reset();
    }
  }
  const auto get = [&](const char* key, auto& slot) {
    using T = std::decay_t<decltype(slot)>;
    if (j.contains(key)) slot = j.at(key).get<T>();
  };
  get("n_sites", cfg.n_sites);
  get("n_values", cfg.n_values);
  Index grid = cfg.grid;
  if (j.contains("grid")) grid = j.at("grid").get<Index>();
  cfg.grid = grid;
  get("dt", cfg.dt);
  get("horizon", cfg.horizon);
  get("burn_in", cfg.burn_in);
  get("samples", cfg.samples);
  get("thinning", cfg.thinning);
  get("replicas", cfg.replicas);
  get("seed", cfg.seed);
  get("truncation", cfg.truncation);
  get("delta", cfg.delta);
  get("threads", cfg.threads);
  get("out_dir", cfg.out_dir);
  get("initial_profile", cfg.initial_profile);
  if (j.contains("census_grid")) cfg.census_grid = j.at("census_grid").get<Index>();
  get("fourier_modes", cfg.fourier_modes);
  get("T_grid", cfg.T_grid);
  if (j.contains("mam_slices")) cfg.mam_slices = j.at("mam_slices").get<Index>();
  if (j.contains("mam_grid")) cfg.mam_grid = j.at("mam_grid").get<Index>();
  get("w_landscape_points", cfg.w_landscape_points);
  if (j.contains("census_sweep")) {
    cfg.census_sweep.clear();
    for (const auto& pair : j.at("census_sweep"))
      cfg.census_sweep.emplace_back(pair[0].get<Real>(), pair[1].get<Real>());
  }

  if (cfg.n_sites < 4 || cfg.samples < 1 || cfg.replicas < 1 || cfg.thinning <= 0.0 ||
      cfg.burn_in < 0.0 || cfg.truncation < 0 || cfg.delta <= 0.0 || cfg.horizon < 0.0 ||
      cfg.threads < 1 || cfg.grid < 16)
    throw std::invalid_argument("experiment config violates a positivity constraint");
  return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["schema_version"] = cfg.schema_version;
  if (cfg.fab) j["model"] = {{"fa", cfg.fab->first}, {"fb", cfg.fab->second}};
  if (cfg.rate_triple)
    j["model"] = {{"rates", {(*cfg.rate_triple)[0], (*cfg.rate_triple)[1], (*cfg.rate_triple)[2]}}};
  j["n_sites"] = cfg.n_sites;
  j["n_values"] = cfg.n_values;
  j["grid"] = cfg.grid;
  j["dt"] = cfg.dt;
  j["horizon"] = cfg.horizon;
  j["burn_in"] = cfg.burn_in;
  j["samples"] = cfg.samples;
  j["thinning"] = cfg.thinning;
  j["replicas"] = cfg.replicas;
  j["seed"] = cfg.seed;
  j["truncation"] = cfg.truncation;
  j["delta"] = cfg.delta;
  j["threads"] = cfg.threads;
  j["out_dir"] = cfg.out_dir;
  j["initial_profile"] = cfg.initial_profile;
  j["census_grid"] = cfg.census_grid;
  j["fourier_modes"] = cfg.fourier_modes;
  j["T_grid"] = cfg.T_grid;
  j["mam_slices"] = cfg.mam_slices;
  j["mam_grid"] = cfg.mam_grid;
  j["w_landscape_points"] = cfg.w_landscape_points;
  j["census_sweep"] = cfg.census_sweep;
  return j;
}

ChafeeInfanteModel config_model(const ExperimentConfig& cfg) {
  if (cfg.fab) return chafee_infante_params(cfg.fab->first, cfg.fab->second);
  if (cfg.rate_triple) {
    const auto [a0, a1, a2] = *cfg.rate_triple;
    ChafeeInfanteModel m{.a0 = a0, .a1 = a1, .a2 = a2, .a = 0, .b = 0, .lambda = 0,
                         .rates = build_rate_table(a0, a1, a2), .poly = {}};
    m.poly = bd_polynomials(m.rates);
    return m;
  }
  throw std::invalid_argument("config names no model");
}

Vector config_initial_profile(const ExperimentConfig& cfg, Index grid) {
  Vector v(grid);
  if (cfg.initial_profile == "half") {
    v.setConstant(0.5);
  } else if (cfg.initial_profile == "cosine") {
    for (Index j = 0; j < grid; ++j)
      v[j] = 0.5 + 0.25 * std::cos(2.0 * kPi * Real(j) / Real(grid));
  } else if (cfg.initial_profile.rfind("constant:", 0) == 0) {
    v.setConstant(std::stod(cfg.initial_profile.substr(9)));
  } else {
    throw std::invalid_argument("unknown initial profile: " + cfg.initial_profile);
  }
  return v;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (int i = t; i < n; i += threads) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

nlohmann::json experiment_hydrodynamics(const ExperimentConfig& cfg) {
  const ChafeeInfanteModel model = config_model(cfg);
  const nlohmann::json cfg_json = config_to_json(cfg);

  // macroscopic reference at the observation time
  const Vector gamma_grid = config_initial_profile(cfg, cfg.grid);
  const DensityPath pde =
      hydro_solve(make_density_field(gamma_grid), cfg.horizon, cfg.dt, model.poly);
  const MeasureCoords ref = measure_coords(pde.slices.col(pde.slices.cols() - 1), cfg.truncation);

  std::ostringstream csv;
  csv << "N,replica,distance,tail_bound\n";
  nlohmann::json per_n = nlohmann::json::array();
  std::vector<Real> medians;
  for (const int n : cfg.n_values) {
    const Vector gamma_n = config_initial_profile(cfg, n);
    const Matrix table = basis_table(cfg.truncation, n);
    std::vector<Real> dist(static_cast<std::size_t>(cfg.replicas), 0.0);
    parallel_for(cfg.replicas, cfg.threads, [&](int r) {
      CounterRng init_rng(cfg.seed, kHydroSalt ^ (std::uint64_t(n) << 20) ^ std::uint64_t(r));
      const LatticeConfig init = sample_product(gamma_n, init_rng);
      const KmcResult run = kmc_run(init, model.rates, cfg.horizon, cfg.seed, {cfg.horizon}, {},
                                    kHydroSalt ^ (std::uint64_t(n) << 20) ^ std::uint64_t(r));
      const Vector coords = coords_of(run.snapshots.back(), table);
      dist[static_cast<std::size_t>(r)] = coords_distance(coords, ref.coeffs, cfg.truncation);
    });
    const Real tail = 2.0 * 2.0 * std::sqrt(2.0) * std::pow(2.0, -cfg.truncation);
    for (int r = 0; r < cfg.replicas; ++r)
      csv << n << "," << r << "," << format_real(dist[static_cast<std::size_t>(r)]) << ","
          << format_real(tail) << "\n";
    const Real med = median(dist);
    medians.push_back(med);
    per_n.push_back({{"N", n}, {"median_distance", med}});
  }

  bool monotone = true;
  for (std::size_t i = 1; i < medians.size(); ++i)
    if (medians[i] > medians[i - 1]) monotone = false;

  write_text_file(cfg.out_dir + "/hydrodynamics.csv", csv.str());
  nlohmann::json report{{"experiment", "hydrodynamics"},
                        {"config", cfg_json},
                        {"config_hash", fnv1a64(cfg_json.dump())},
                        {"versions", module_versions()},
                        {"per_N", per_n},
                        {"median_monotone_decreasing", monotone}};
  write_text_file(cfg.out_dir + "/hydrodynamics.json", report.dump(2));
  return report;
}

nlohmann::json experiment_hydrostatics(const ExperimentConfig& cfg) {
  const ChafeeInfanteModel model = config_model(cfg);
  const nlohmann::json cfg_json = config_to_json(cfg);
  const bool symmetric = flip_symmetric(model.rates);

  CensusOptions census_opts;
  census_opts.grid = cfg.census_grid;
  census_opts.fourier_modes = cfg.fourier_modes;
  const auto census = stationary_census(model.poly, census_opts);

  std::vector<std::vector<Vector>> family_coords;
  std::vector<int> stable_ids, unstable_const_ids;
  for (const auto& fam : census) {
    family_coords.push_back(family_translate_coords(fam, cfg.truncation));
    if (fam.kind == StationaryProfile::Kind::StableConstant) stable_ids.push_back(fam.family_id);
    if (fam.kind == StationaryProfile::Kind::UnstableConstant)
      unstable_const_ids.push_back(fam.family_id);
  }

  std::vector<int> n_values = cfg.n_values;
  if (std::find(n_values.begin(), n_values.end(), cfg.n_sites) == n_values.end())
    n_values.push_back(cfg.n_sites);

  std::ostringstream csv;
  csv << "N,replica,sample,d_stable,d_all,d_unstable,nearest_stable\n";
  nlohmann::json per_n = nlohmann::json::array();
  Real main_frac_stable = 0.0, main_frac_all = 0.0, main_split = 0.0;
  std::vector<Real> unstable_mass;

  for (const int n : n_values) {
    const Matrix table = basis_table(cfg.truncation, n);
    const int spr = (cfg.samples + cfg.replicas - 1) / cfg.replicas;
    const int total_samples = spr * cfg.replicas;

    struct Row {
      Real d_stable, d_all, d_unstable;
      int nearest_stable;
    };
    std::vector<Row> rows(static_cast<std::size_t>(total_samples));

    parallel_for(cfg.replicas, cfg.threads, [&](int r) {
      const std::uint64_t stream = kStatSalt ^ (std::uint64_t(n) << 20) ^ std::uint64_t(r);
      CounterRng init_rng(cfg.seed, stream ^ 0xABCDULL);
      const LatticeConfig init = sample_product(Vector::Constant(n, 0.5), init_rng);
      std::vector<Real> observe(static_cast<std::size_t>(spr));
      for (int s = 0; s < spr; ++s) observe[static_cast<std::size_t>(s)] =
          cfg.burn_in + cfg.thinning * Real(s + 1);
      const KmcResult run = kmc_run(init, model.rates, observe.back(), cfg.seed, observe, {},
                                    stream);
      for (int s = 0; s < spr; ++s) {
        const Vector coords = coords_of(run.snapshots[static_cast<std::size_t>(s)], table);
        Row row{1e18, 1e18, 1e18, -1};
        for (const auto& fam : census) {
          const Real d = family_coord_distance(coords, family_coords[fam.family_id],
                                               cfg.truncation);
          row.d_all = std::min(row.d_all, d);
          if (fam.kind == StationaryProfile::Kind::StableConstant && d < row.d_stable) {
            row.d_stable = d;
            row.nearest_stable = fam.family_id;
          }
          if (fam.kind == StationaryProfile::Kind::UnstableConstant)
            row.d_unstable = std::min(row.d_unstable, d);
        }
        rows[static_cast<std::size_t>(r * spr + s)] = row;
      }
    });

    int in_stable = 0, in_all = 0, in_unstable = 0, upper_well = 0;
    for (int i = 0; i < total_samples; ++i) {
      const Row& row = rows[static_cast<std::size_t>(i)];
      if (row.d_stable <= cfg.delta) ++in_stable;
      if (row.d_all <= cfg.delta) ++in_all;
      if (row.d_unstable <= cfg.delta) ++in_unstable;
      if (row.nearest_stable == stable_ids.back()) ++upper_well;
      csv << n << "," << i / spr << "," << i % spr << "," << format_real(row.d_stable) << ","
          << format_real(row.d_all) << "," << format_real(row.d_unstable) << ","
          << row.nearest_stable << "\n";
    }
    const Real frac_stable = Real(in_stable) / total_samples;
    const Real frac_all = Real(in_all) / total_samples;
    const Real frac_unstable = Real(in_unstable) / total_samples;
    const Real split = Real(upper_well) / total_samples;
    unstable_mass.push_back(frac_unstable);
    per_n.push_back({{"N", n},
                     {"samples", total_samples},
                     {"frac_within_delta_stable", frac_stable},
                     {"frac_within_delta_sol", frac_all},
                     {"frac_within_delta_unstable", frac_unstable},
                     {"upper_well_fraction", split}});
    if (n == cfg.n_sites) {
      main_frac_stable = frac_stable;
      main_frac_all = frac_all;
      main_split = split;
    }
  }

  bool unstable_decreasing = true;
  for (std::size_t i = 1; i < unstable_mass.size(); ++i)
    if (unstable_mass[i] > unstable_mass[i - 1] + 1e-12) unstable_decreasing = false;

  write_text_file(cfg.out_dir + "/hydrostatics.csv", csv.str());
  nlohmann::json report{{"experiment", "hydrostatics"},
                        {"config", cfg_json},
                        {"config_hash", fnv1a64(cfg_json.dump())},
                        {"versions", module_versions()},
                        {"flip_symmetric", symmetric},
                        {"per_N", per_n},
                        {"main_frac_within_delta_stable", main_frac_stable},
                        {"main_frac_within_delta_sol", main_frac_all},
                        {"main_upper_well_fraction", main_split},
                        {"unstable_mass_decreasing", unstable_decreasing}};
  write_text_file(cfg.out_dir + "/hydrostatics.json", report.dump(2));
  return report;
}

nlohmann::json experiment_census(const ExperimentConfig& cfg) {
  const nlohmann::json cfg_json = config_to_json(cfg);
  nlohmann::json sweeps = nlohmann::json::array();
  int last_count = 0;
  bool nondecreasing = true;
  for (const auto& [fa, fb] : cfg.census_sweep) {
    const ChafeeInfanteModel model = chafee_infante_params(fa, fb);
    CensusOptions opts;
    opts.grid = cfg.census_grid;
    opts.fourier_modes = cfg.fourier_modes;
    const auto census = stationary_census(model.poly, opts);

    // both admissibility thresholds (they disagree by a fixed factor; the
    // time-map count is the one the census trusts)
    const Real t_min = kPi * std::sqrt(2.0 / model.poly.F.derivative()(0.5));
    const int count_time_map = std::max(0, static_cast<int>(std::ceil(1.0 / t_min) - 1));
    const int count_literal =
        std::max(0, static_cast<int>(std::ceil(std::sqrt(model.lambda)) - 1));

    const std::string dir = cfg.out_dir + "/census_a" + format_real(model.a);
    sweeps.push_back({{"fa", fa},
                      {"fb", fb},
                      {"a", model.a},
                      {"b", model.b},
                      {"lambda", model.lambda},
                      {"families", census_to_json(census, model.poly, dir)},
                      {"count", census.size()},
                      {"branch_count_time_map", count_time_map},
                      {"branch_count_literal_lambda", count_literal}});
    if (static_cast<int>(census.size()) < last_count) nondecreasing = false;
    last_count = static_cast<int>(census.size());
  }
  nlohmann::json report{{"experiment", "census"},
                        {"config", cfg_json},
                        {"config_hash", fnv1a64(cfg_json.dump())},
                        {"versions", module_versions()},
                        {"sweep", sweeps},
                        {"count_nondecreasing", nondecreasing}};
  write_text_file(cfg.out_dir + "/census.json", report.dump(2));
  return report;
}

nlohmann::json experiment_quasipotential(const ExperimentConfig& cfg) {
  const ChafeeInfanteModel model = config_model(cfg);
  const nlohmann::json cfg_json = config_to_json(cfg);

  CensusOptions census_opts;
  census_opts.grid = cfg.census_grid;
  census_opts.fourier_modes = cfg.fourier_modes;
  const auto census = stationary_census(model.poly, census_opts);

  VMatrixOptions vopts;
  vopts.mam.T_grid = cfg.T_grid;
  vopts.mam.slices = cfg.mam_slices;
  vopts.mam.grid = cfg.mam_grid;
  const CostMatrix cm = v_matrix(census, model.poly, vopts);
  const TreeWeights tw = tree_weights(cm.v);

  // argmin families must be stable ones; W at the base points returns w_bar
  bool argmin_stable = true;
  for (int i : tw.argmin)
    if (census[static_cast<std::size_t>(i)].kind != StationaryProfile::Kind::StableConstant)
      argmin_stable = false;
  bool base_identity = true;
  for (Index i = 0; i < cm.size(); ++i) {
    Vector vi(cm.size());
    for (Index jj = 0; jj < cm.size(); ++jj) vi[jj] = jj == i ? 0.0 : cm.v(jj, i);
    if (std::abs(W_eval(vi, tw) - tw.w_bar[i]) > 1e-9 * (1.0 + tw.w_bar[i]))
      base_identity = false;
  }

  std::ostringstream csv;
  csv << "c";
  for (Index i = 0; i < cm.size(); ++i) csv << ",V_" << i;
  csv << ",W\n";
  MamOptions mam = vopts.mam;
  for (int p = 0; p < cfg.w_landscape_points; ++p) {
    const Real c = 0.1 + 0.8 * Real(p) / Real(std::max(1, cfg.w_landscape_points - 1));
    const DensityField target{Vector::Constant(cfg.mam_grid, c)};
    Vector vi(cm.size());
    for (Index i = 0; i < cm.size(); ++i) {
      const Real mam_value = mam_minimize(census[static_cast<std::size_t>(i)], target,
                                          model.poly, mam).value;
      const Real ub = best_interpolation_cost(census[static_cast<std::size_t>(i)], target,
                                              model.poly);
      vi[i] = std::min(mam_value, ub);
    }
    csv << format_real(c);
    for (Index i = 0; i < cm.size(); ++i) csv << "," << format_real(vi[i]);
    csv << "," << format_real(W_eval(vi, tw)) << "\n";
  }

  write_text_file(cfg.out_dir + "/w_landscape.csv", csv.str());
  write_text_file(cfg.out_dir + "/cost_matrix.json", cost_matrix_to_json(cm).dump(2));
  write_text_file(cfg.out_dir + "/tree_report.json", tree_report_to_json(tw, cm.v).dump(2));
  nlohmann::json report{{"experiment", "quasipotential"},
                        {"config", cfg_json},
                        {"config_hash", fnv1a64(cfg_json.dump())},
                        {"versions", module_versions()},
                        {"cost_matrix", cost_matrix_to_json(cm)},
                        {"tree_report", tree_report_to_json(tw, cm.v)},
                        {"argmin_in_stable_families", argmin_stable},
                        {"w_base_identity", base_identity}};
  write_text_file(cfg.out_dir + "/quasipotential.json", report.dump(2));
  return report;
}

nlohmann::json run_experiment(const std::string& name, const ExperimentConfig& cfg) {
  if (name == "hydrodynamics") return experiment_hydrodynamics(cfg);
  if (name == "hydrostatics") return experiment_hydrostatics(cfg);
  if (name == "census") return experiment_census(cfg);
  if (name == "quasipotential") return experiment_quasipotential(cfg);
  throw std::invalid_argument("unknown experiment: " + name);
}

}  // namespace rdmeta
