#pragma once

#include <rdmeta/pde.hpp>

#include <vector>

namespace rdmeta {

/// Representative of a translation family of stationary solutions of
/// (1/2) Lap rho + F(rho) = 0. Non-constant representatives are canonicalized
/// with their global maximum at theta = 0.
struct StationaryProfile {
  enum class Kind { StableConstant, UnstableConstant, Nonconstant };

  DensityField field;
  Kind kind = Kind::StableConstant;
  int periods = 0;    // 0 for constants
  int family_id = -1;

  bool is_constant() const { return kind != Kind::Nonconstant; }
};

struct CensusOptions {
  Index grid = 512;
  int fourier_modes = 96;
  Real residual_tol = 1e-8;
  Real newton_tol = 1e-12;
};

/// One constant profile per root of F; stability from the sign of V''.
std::vector<StationaryProfile> constant_solutions(const ReactionPolynomials& poly,
                                                  const CensusOptions& opts = {});

/// Period of the Hamiltonian orbit of (1/2) rho'' + F(rho) = 0 around the
/// center M_j at energy A below the local top of V: turning points solve
/// V(rho) = V(M_j) - A. Requires 0 < A < V(M_j) - max(V(m_j), V(m_j+1)).
Real time_map(const ReactionPolynomials& poly, int well_index, Real amplitude,
              int quadrature_nodes = 96);

/// All branches phi_m with m full periods fitting the unit torus, found by
/// the time-map criterion m T(A) = 1 and polished by Newton on the grid.
std::vector<StationaryProfile> nonconstant_solutions(const ReactionPolynomials& poly,
                                                     const CensusOptions& opts = {});

/// Constants followed by branches, family ids assigned in that order.
std::vector<StationaryProfile> stationary_census(const ReactionPolynomials& poly,
                                                 const CensusOptions& opts = {});

struct Spectrum {
  Vector eigenvalues;      // descending
  Matrix eigenfunctions;   // grid samples, one column per eigenvalue
};

/// Spectrum of L_phi h = (1/2) Lap h - V''(phi) h in a truncated Fourier
/// basis (the Laplacian is represented exactly mode by mode). For
/// non-constant phi the zero eigenvalue carried by grad(phi) is asserted.
Spectrum linearization_spectrum(const StationaryProfile& phi, const ReactionPolynomials& poly,
                                int n_modes, int fourier_modes = 96);

/// Perturbs an unstable profile along its principal eigenfunction, integrates
/// the reaction-diffusion flow, and returns the classified omega-limit.
StationaryProfile heteroclinic_trace(const StationaryProfile& phi, int sign, Real eps,
                                     const ReactionPolynomials& poly,
                                     const CensusOptions& opts = {});

/// Residual check + classification of a field as a stationary profile;
/// constants are snapped to the root of F, non-constant profiles polished by
/// Newton and canonicalized.
StationaryProfile classify_profile(const DensityField& field, const ReactionPolynomials& poly,
                                   const CensusOptions& opts = {});

/// Stationarity defect || (1/2) Lap phi + F(phi) ||_inf on the grid.
Real stationary_residual(const Vector& values, const ReactionPolynomials& poly);

/// L2 distance to the translation family of `profile` (min over grid shifts).
Real family_distance(const Vector& values, const StationaryProfile& profile);

/// Index of the census family closest to `values`, or -1 if none is within tol.
int match_family(const Vector& values, const std::vector<StationaryProfile>& census,
                 Real tol = 1e-3);

/// Relaxation with classification: integrates until the flow stalls, then
/// polishes and classifies the limit.
std::pair<StationaryProfile, Real> relax_to_stationary(const DensityField& gamma,
                                                       const ReactionPolynomials& poly, Real tol,
                                                       const CensusOptions& opts = {},
                                                       Real time_cap = 500.0);

}  // namespace rdmeta
