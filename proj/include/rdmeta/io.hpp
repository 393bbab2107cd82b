#pragma once

#include <rdmeta/elliptic.hpp>
#include <rdmeta/fwgraph.hpp>
#include <rdmeta/kmc.hpp>
#include <rdmeta/quasipotential.hpp>

#include <json.hpp>

#include <string>

namespace rdmeta {

/// Fixed "%.17g" formatting so equal doubles always print identically.
std::string format_real(Real x);

/// Path dump: header `t,theta_0,...,theta_{M-1}`, one row per slice.
std::string path_to_csv(const DensityPath& path);
DensityPath path_from_csv(const std::string& csv);

/// Snapshot dump: one line per snapshot, `t=<time> <N chars of 0/1>`.
std::string snapshots_to_text(const KmcResult& result);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// FNV-1a over the canonical JSON dump; embedded in every experiment report.
std::uint64_t fnv1a64(const std::string& data);

nlohmann::json polynomials_to_json(const ReactionPolynomials& poly);
nlohmann::json census_to_json(const std::vector<StationaryProfile>& census,
                              const ReactionPolynomials& poly, const std::string& profile_dir);
nlohmann::json cost_matrix_to_json(const CostMatrix& cm);
CostMatrix cost_matrix_from_json(const nlohmann::json& j);
nlohmann::json tree_report_to_json(const TreeWeights& tw, const Matrix& v);

}  // namespace rdmeta
