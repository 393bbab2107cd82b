#include <rdmeta/io.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rdmeta {

std::string format_real(Real x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string path_to_csv(const DensityPath& path) {
  std::ostringstream out;
  out << "t";
  for (Index j = 0; j < path.grid_size(); ++j) out << ",theta_" << j;
  out << "\n";
  for (Index k = 0; k < path.slices.cols(); ++k) {
    out << format_real(path.dt * Real(k));
    for (Index j = 0; j < path.grid_size(); ++j) out << "," << format_real(path.slices(j, k));
    out << "\n";
  }
  return out.str();
}

DensityPath path_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty path CSV");
  Index m = -1;
  std::vector<std::vector<Real>> rows;
  std::vector<Real> times;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<Real> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() < 3) throw std::invalid_argument("malformed path CSV row");
    times.push_back(row.front());
    row.erase(row.begin());
    if (m < 0) m = static_cast<Index>(row.size());
    if (static_cast<Index>(row.size()) != m)
      throw std::invalid_argument("ragged path CSV");
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw std::invalid_argument("path CSV needs at least two slices");
  DensityPath path;
  path.dt = times[1] - times[0];
  path.slices.resize(m, static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (Index j = 0; j < m; ++j) path.slices(j, static_cast<Index>(k)) = rows[k][j];
  return path;
}

std::string snapshots_to_text(const KmcResult& result) {
  std::ostringstream out;
  for (std::size_t i = 0; i < result.snapshots.size(); ++i)
    out << "t=" << format_real(result.times[i]) << " " << result.snapshots[i].to_string() << "\n";
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

namespace {

nlohmann::json coeffs_to_json(const Polynomial& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (Index k = 0; k < p.coeffs().size(); ++k) arr.push_back(p.coeffs()[k]);
  return arr;
}

}  // namespace

nlohmann::json polynomials_to_json(const ReactionPolynomials& poly) {
  return {{"B", coeffs_to_json(poly.B)},       {"D", coeffs_to_json(poly.D)},
          {"F", coeffs_to_json(poly.F)},       {"V", coeffs_to_json(poly.V)},
          {"lipschitz_F", poly.lipschitz_F},   {"max_abs_F", poly.max_abs_F}};
}

nlohmann::json census_to_json(const std::vector<StationaryProfile>& census,
                              const ReactionPolynomials& poly, const std::string& profile_dir) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& fam : census) {
    const Spectrum spec = linearization_spectrum(fam, poly, 1);
    std::string kind;
    switch (fam.kind) {
      case StationaryProfile::Kind::StableConstant: kind = "stable-constant"; break;
      case StationaryProfile::Kind::UnstableConstant: kind = "unstable-constant"; break;
      case StationaryProfile::Kind::Nonconstant: kind = "nonconstant"; break;
    }
    std::string csv_path;
    if (!profile_dir.empty()) {
      csv_path = profile_dir + "/family_" + std::to_string(fam.family_id) + ".csv";
      std::ostringstream csv;
      csv << "theta,rho\n";
      for (Index j = 0; j < fam.field.grid_size(); ++j)
        csv << format_real(Real(j) / Real(fam.field.grid_size())) << ","
            << format_real(fam.field.values[j]) << "\n";
      write_text_file(csv_path, csv.str());
    }
    arr.push_back({{"family_id", fam.family_id},
                   {"kind", kind},
                   {"periods", fam.periods},
                   {"top_eigenvalue", spec.eigenvalues[0]},
                   {"profile_csv_path", csv_path}});
  }
  return arr;
}

nlohmann::json cost_matrix_to_json(const CostMatrix& cm) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < cm.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < cm.size(); ++j)
      row.push_back({{"v", cm.v(i, j)}, {"provenance", to_string(cm.provenance[i][j])}});
    rows.push_back(row);
  }
  return {{"l", cm.size()}, {"entries", rows}};
}

CostMatrix cost_matrix_from_json(const nlohmann::json& j) {
  const Index l = j.at("l").get<Index>();
  CostMatrix cm;
  cm.v = Matrix::Zero(l, l);
  cm.provenance.assign(l, std::vector<CostProvenance>(l, CostProvenance::UpperBound));
  for (Index i = 0; i < l; ++i)
    for (Index jj = 0; jj < l; ++jj) {
      const auto& cell = j.at("entries")[i][jj];
      cm.v(i, jj) = cell.at("v").get<Real>();
      const std::string prov = cell.at("provenance").get<std::string>();
      cm.provenance[i][jj] = prov == "heteroclinic-zero" ? CostProvenance::HeteroclinicZero
                             : prov == "mam"             ? CostProvenance::Mam
                                                         : CostProvenance::UpperBound;
    }
  return cm;
}

nlohmann::json tree_report_to_json(const TreeWeights& tw, const Matrix& v) {
  nlohmann::json roots = nlohmann::json::array();
  for (std::size_t i = 0; i < tw.trees.size(); ++i) {
    nlohmann::json edges = nlohmann::json::array();
    Real lower = 0.0;
    for (const auto& [child, parent] : tw.trees[i].edges) {
      edges.push_back({{"child", child}, {"parent", parent}, {"weight", v(child, parent)}});
    }
    roots.push_back({{"root", i},
                     {"weight", tw.trees[i].weight},
                     {"weight_interval", {lower, tw.trees[i].weight}},
                     {"edges", edges}});
  }
  nlohmann::json wbar = nlohmann::json::array();
  for (Index i = 0; i < tw.w_bar.size(); ++i) wbar.push_back(tw.w_bar[i]);
  return {{"trees", roots}, {"w_min", tw.w_min}, {"w_bar", wbar}, {"argmin", tw.argmin}};
}

}  // namespace rdmeta
