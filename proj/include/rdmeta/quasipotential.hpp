#pragma once

#include <rdmeta/elliptic.hpp>
#include <rdmeta/ldp.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rdmeta {

enum class CostProvenance { HeteroclinicZero, Mam, UpperBound };

/// Inter-family costs v_ij with per-entry provenance. Diagonal is zero and a
/// traced heteroclinic i -> j certifies v_ij = 0.
struct CostMatrix {
  Matrix v;
  std::vector<std::vector<CostProvenance>> provenance;
  Index size() const { return v.rows(); }
};

std::string to_string(CostProvenance p);

/// Cost of the interpolation path (1 - alpha(t)) source + alpha(t) target on
/// [0,1]; a certified upper bound on the quasi-potential of the target.
/// Targets failing the smoothness/interior conditions are pre-smoothed with a
/// short hydrodynamic run whose reversed cost is added.
Real interpolation_cost(const StationaryProfile& source, const DensityField& target,
                        const std::function<Real(Real)>& alpha_schedule,
                        const ReactionPolynomials& poly, Index slices = 200);

/// Minimum of interpolation_cost over the default schedules t, t^2 and the
/// smoothstep 3t^2 - 2t^3.
Real best_interpolation_cost(const StationaryProfile& source, const DensityField& target,
                             const ReactionPolynomials& poly, Index slices = 200);

struct ReversedCost {
  Real cost = 0.0;
  Real envelope = 0.0;  // frozen-constant bound C0 (T + |rho_T - bar|_1 + |rho_0 - bar|_1)
};

/// Cost of the time-reversed relaxation path started from gamma.
ReversedCost reversed_relaxation_cost(const DensityField& gamma, Real T,
                                      const ReactionPolynomials& poly);

struct MamOptions {
  std::vector<Real> T_grid = {1.0, 2.0, 4.0, 8.0, 16.0};
  Index slices = 64;            // K
  Index grid = 64;              // M
  int max_iters = 400;
  Real grad_tol = 1e-9;
  Real clip = 1e-6;             // path kept inside [clip, 1-clip]
  std::optional<DensityPath> init;  // resampled onto (grid, slices) when given
};

struct MamResult {
  DensityPath path;
  Real value = 0.0;
  Real T = 0.0;
  bool converged = false;
};

/// Minimum-action estimate of V_i(target): for each T in the grid, minimizes
/// the discretized rate functional over interior slices with endpoints pinned
/// at (source, target). L-BFGS with an envelope-theorem gradient (the inner
/// maximizer H is stationary, so only the explicit density dependence
/// differentiates); the gradient is cross-checked against finite differences
/// in the test suite.
MamResult mam_minimize(const StationaryProfile& source, const DensityField& target,
                       const ReactionPolynomials& poly, const MamOptions& opts = {});

/// Rate functional value and its gradient with respect to all slice values.
std::pair<Real, Matrix> rate_value_and_grad(const DensityPath& path,
                                            const ReactionPolynomials& poly);

struct VMatrixOptions {
  MamOptions mam;
  Real instability_threshold = 1e-6;
  Real stable_exit_floor = 1e-3;  // v out of a stable constant must exceed this
};

/// Assembles the full cost matrix over a census: zero edges from traced
/// heteroclinics, minimum of MAM value and constructive upper bound elsewhere.
CostMatrix v_matrix(const std::vector<StationaryProfile>& census,
                    const ReactionPolynomials& poly, const VMatrixOptions& opts = {});

/// Cost of rotating a non-constant profile through angle 1/2 at speed a
/// (one grid cell per time step, so slices are exact translates).
Real translation_cost_check(const StationaryProfile& phi, Real speed,
                            const ReactionPolynomials& poly);

}  // namespace rdmeta
