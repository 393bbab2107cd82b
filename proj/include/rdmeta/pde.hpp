#pragma once

#include <rdmeta/reaction.hpp>

namespace rdmeta {

/// Macroscopic profile rho(theta_j), theta_j = j/M, values in [0,1].
struct DensityField {
  Vector values;
  Index grid_size() const { return values.size(); }
};

/// Validating constructor for DensityField.
DensityField make_density_field(Vector values);

/// Time-indexed path: column k holds the slice at time k*dt.
struct DensityPath {
  Real dt = 0.0;
  Matrix slices;  // M x (K+1)
  Index grid_size() const { return slices.rows(); }
  Index intervals() const { return slices.cols() - 1; }
  Real horizon() const { return dt * Real(intervals()); }
};

DensityPath reverse_path(const DensityPath& path);

// -- discrete operators on the unit torus -----------------------------------

/// Periodic second difference, scaled by M^2.
Vector laplacian_periodic(const Vector& u);
/// Forward difference scaled by M; entry j lives at the midpoint j + 1/2.
Vector gradient_forward(const Vector& u);
/// || grad u ||_2^2 with the forward-difference gradient.
Real grad_energy(const Vector& u);
/// Periodic linear resampling onto a new grid size.
Vector resample_linear(const Vector& u, Index m_new);
/// Cyclic rotation by `shift` cells (positive shifts move content left).
Vector rotate(const Vector& u, Index shift);

/// Solves the cyclic tridiagonal system via Thomas elimination with the
/// Sherman-Morrison corner correction. sub[i] = A(i,i-1) for i >= 1,
/// sup[i] = A(i,i+1) for i < n-1, corner_top = A(0,n-1), corner_bot = A(n-1,0).
Vector solve_cyclic_tridiag(const Vector& sub, const Vector& diag, const Vector& sup,
                            Real corner_top, Real corner_bot, const Vector& rhs);

// -- solvers -----------------------------------------------------------------

struct HydroOptions {
  Real max_principle_tol = 1e-8;
  bool check_max_principle = true;
  int record_stride = 1;
};

/// Largest step satisfying both the monotonicity requirement dt <= 1/(2 C_F)
/// and the per-step comparison-ODE defect budget of the maximum principle.
Real default_dt(const ReactionPolynomials& poly);

/// One IMEX step rho <- (I - (dt/2) Lap)^{-1} (rho + dt F(rho)): implicit
/// diffusion through the cyclic tridiagonal solve, explicit reaction.
class HydroStepper {
 public:
  HydroStepper(Index grid, Real dt, const ReactionPolynomials& poly, const HydroOptions& opts);
  void step(Vector& rho) const;
  Real dt() const { return dt_; }

 private:
  Real dt_;
  const ReactionPolynomials& poly_;
  HydroOptions opts_;
  Vector sub_, diag_, sup_;
  Real corner_;
};

/// Integrates the Cauchy problem drho/dt = (1/2) Lap rho + F(rho) from gamma
/// up to time T. The discrete maximum principle is asserted every step:
/// min rho_{k+1} >= x_{min rho_k}(dt) - tol and symmetrically for the max,
/// where x is the comparison ODE flow. A breach aborts with step diagnostics.
DensityPath hydro_solve(const DensityField& gamma, Real T, Real dt,
                        const ReactionPolynomials& poly, const HydroOptions& opts = {});

/// Flow of xdot = F(x) by adaptive embedded RK4 (step doubling).
Real ode_flow(Real x0, Real t, const ReactionPolynomials& poly, Real tol = 1e-12);

struct RelaxResult {
  DensityField field;
  Real time = 0.0;
};

/// Integrates until || rho_{k+1} - rho_k ||_2 < tol * dt; errors out at the
/// time cap, which would contradict relaxation and signals misconfiguration.
RelaxResult relax_field(const DensityField& gamma, const ReactionPolynomials& poly, Real tol,
                        Real time_cap = 500.0, Real dt = 0.0);

/// Heat semigroup exp(t (1/2) Lap): Fourier mode k is damped by
/// exp(-2 pi^2 k^2 t).
DensityField heat_semigroup(const DensityField& gamma, Real t);

/// Same flow on an arbitrary grid function (no [0,1] constraint).
Vector heat_flow(const Vector& u, Real t);

}  // namespace rdmeta
