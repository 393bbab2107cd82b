#pragma once

#include <rdmeta/types.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rdmeta {

/// Occupancy bits on the discrete torus Z/NZ.
struct LatticeConfig {
  std::vector<std::uint8_t> occupancy;

  int n_sites() const { return static_cast<int>(occupancy.size()); }
  int at(int x) const {
    const int n = n_sites();
    return occupancy[static_cast<std::size_t>(((x % n) + n) % n)];
  }
  int particle_count() const;

  static LatticeConfig constant(int n, int value);
  static LatticeConfig from_string(const std::string& bits);
  std::string to_string() const;

  bool operator==(const LatticeConfig&) const = default;
};

/// Local flip-rate table c(eta) over the window [-r, r].
/// Every entry must be strictly positive; lookups are translation-covariant.
class CylinderRate {
 public:
  CylinderRate(int radius, Vector table);

  int radius() const { return radius_; }
  const Vector& table() const { return table_; }
  Real min_rate() const { return table_.minCoeff(); }

  /// Pattern index of the window centered at `site`; bit (k+r) holds eta(site+k).
  int pattern_at(const LatticeConfig& c, int site) const;
  Real rate_at(const LatticeConfig& c, int site) const { return table_[pattern_at(c, site)]; }

  /// Set when the table was built from the three-parameter radius-1 family.
  const std::optional<std::array<Real, 3>>& triple() const { return triple_; }

 private:
  friend CylinderRate build_rate_table(Real a0, Real a1, Real a2);
  int radius_;
  Vector table_;
  std::optional<std::array<Real, 3>> triple_;
};

/// Radius-1 family: a2 if eta(-1) != eta(1), a1 if eta(-1) = eta(1) = eta(0),
/// a0 if eta(-1) = eta(1) != eta(0). All three must be positive.
CylinderRate build_rate_table(Real a0, Real a1, Real a2);
/// General table of 2^(2r+1) strictly positive entries.
CylinderRate build_rate_table(int radius, Vector table);

/// Truncated Fourier coordinates <rho, e_k>, |k| <= K, with e_0 = 1,
/// e_k = sqrt(2) cos(2 pi k theta), e_{-k} = sqrt(2) sin(2 pi k theta).
struct MeasureCoords {
  int truncation = 0;
  Vector coeffs;  // index (k + K) holds <rho, e_k>, k = -K..K

  Real coeff(int k) const { return coeffs[k + truncation]; }
};

/// Coordinates of the empirical measure assigning mass 1/N to each particle.
MeasureCoords empirical_measure(const LatticeConfig& config, int truncation);

/// Coordinates of a density profile sampled on a uniform grid.
MeasureCoords measure_coords(const Vector& grid_density, int truncation);

struct MeasureDistance {
  Real value = 0.0;       // sum over |k| <= K of 2^-|k| |coeff difference|
  Real tail_bound = 0.0;  // rigorous bound on the omitted |k| > K terms
};

MeasureDistance measure_distance(const MeasureCoords& m1, const MeasureCoords& m2);

}  // namespace rdmeta
