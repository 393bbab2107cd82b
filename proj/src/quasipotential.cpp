#include <rdmeta/quasipotential.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace rdmeta {

namespace {

constexpr Real kEnvelopeC0 = 25.0;
constexpr Real kInteriorFloor = 1e-3;   // condition (B) threshold delta
constexpr Real kGradEnergyCap = 100.0;  // condition (A) threshold h

Real chi_prime(Real r) { return 1.0 - 2.0 * r; }

DensityPath interpolation_path(const Vector& source, const Vector& target,
                               const std::function<Real(Real)>& alpha, Index slices) {
  DensityPath path;
  path.dt = 1.0 / Real(slices);
  path.slices.resize(source.size(), slices + 1);
  for (Index k = 0; k <= slices; ++k) {
    Real a = alpha(Real(k) / Real(slices));
    a = std::clamp(a, 0.0, 1.0);
    path.slices.col(k) = (1.0 - a) * source + a * target;
  }
  return path;
}

}  // namespace

std::string to_string(CostProvenance p) {
  switch (p) {
    case CostProvenance::HeteroclinicZero: return "heteroclinic-zero";
    case CostProvenance::Mam: return "mam";
    case CostProvenance::UpperBound: return "upper-bound";
  }
  return "?";
}

Real interpolation_cost(const StationaryProfile& source, const DensityField& target,
                        const std::function<Real(Real)>& alpha_schedule,
                        const ReactionPolynomials& poly, Index slices) {
  Vector src = source.field.values;
  if (src.size() != target.grid_size()) src = resample_linear(src, target.grid_size());

  const Real lo = target.values.minCoeff(), hi = target.values.maxCoeff();
  const bool interior_ok = lo >= kInteriorFloor && hi <= 1.0 - kInteriorFloor;
  const bool energy_ok = grad_energy(target.values) <= kGradEnergyCap;
  if (!interior_ok || !energy_ok) {
    if (lo <= 1e-12 || hi >= 1.0 - 1e-12)
      throw std::invalid_argument(
          "target touches {0,1}; pre-regularize with a short hydrodynamic run");
    // smooth with the flow for a short time and connect backward
    const Real eps = 1e-2;
    DensityPath fwd = hydro_solve(target, eps, 0.0, poly);
    const Real back = rate_I(reverse_path(fwd), poly);
    const DensityField smoothed{fwd.slices.col(fwd.slices.cols() - 1)};
    return interpolation_cost(source, smoothed, alpha_schedule, poly, slices) + back;
  }
  const DensityPath path = interpolation_path(src, target.values, alpha_schedule, slices);
  return rate_I(path, poly);
}

Real best_interpolation_cost(const StationaryProfile& source, const DensityField& target,
                             const ReactionPolynomials& poly, Index slices) {
  const std::vector<std::function<Real(Real)>> schedules = {
      [](Real t) { return t; },
      [](Real t) { return t * t; },
      [](Real t) { return t * t * (3.0 - 2.0 * t); },
  };
  Real best = std::numeric_limits<Real>::infinity();
  for (const auto& alpha : schedules)
    best = std::min(best, interpolation_cost(source, target, alpha, poly, slices));
  return best;
}

ReversedCost reversed_relaxation_cost(const DensityField& gamma, Real T,
                                      const ReactionPolynomials& poly) {
  if (T <= 0.0) throw std::invalid_argument("T must be positive");
  HydroOptions opts;
  opts.record_stride = 4;
  const DensityPath fwd = hydro_solve(gamma, T, 0.0, poly, opts);
  ReversedCost out;
  out.cost = rate_I(reverse_path(fwd), poly);
  const auto relaxed = relax_field(gamma, poly, 1e-8, 2000.0,
                                   std::min(2e-3, 0.4 / poly.lipschitz_F));
  const Vector& bar = relaxed.field.values;
  out.envelope = kEnvelopeC0 * (T + grid_l1_norm(fwd.slices.col(fwd.slices.cols() - 1) - bar) +
                                grid_l1_norm(gamma.values - bar));
  return out;
}

std::pair<Real, Matrix> rate_value_and_grad(const DensityPath& path,
                                            const ReactionPolynomials& poly) {
  const Index kk = path.intervals();
  const Index m = path.grid_size();
  const Real dt = path.dt;
  const Polynomial Bp = poly.B.derivative(), Dp = poly.D.derivative();

  Matrix grad = Matrix::Zero(m, kk + 1);
  Real total = 0.0;
  const HSolution sol = solve_H(path, poly);

  for (Index k = 0; k < kk; ++k) {
    const Vector rho_bar = 0.5 * (path.slices.col(k) + path.slices.col(k + 1));
    const Vector h = sol.H.values.col(k);
    const Vector grad_h = gradient_forward(h);
    const Vector lap_h = laplacian_periodic(h);

    Vector chi_mid(m), b(m), d(m);
    for (Index j = 0; j < m; ++j) {
      const Index jp = j + 1 == m ? 0 : j + 1;
      chi_mid[j] = 0.5 * (rho_bar[j] * (1.0 - rho_bar[j]) + rho_bar[jp] * (1.0 - rho_bar[jp]));
      b[j] = poly.B(rho_bar[j]);
      d[j] = poly.D(rho_bar[j]);
    }

    Real acc = 0.0;
    Vector psi(m);
    for (Index j = 0; j < m; ++j) {
      const Index jm = j == 0 ? m - 1 : j - 1;
      acc += 0.5 * chi_mid[j] * grad_h[j] * grad_h[j];
      acc += b[j] * (h[j] * std::exp(h[j]) - std::expm1(h[j]));
      acc += d[j] * (-std::expm1(-h[j]) - h[j] * std::exp(-h[j]));
      psi[j] = -0.25 * lap_h[j] -
               0.125 * chi_prime(rho_bar[j]) * (grad_h[jm] * grad_h[jm] + grad_h[j] * grad_h[j]) -
               0.5 * (Bp(rho_bar[j]) * std::expm1(h[j]) + Dp(rho_bar[j]) * std::expm1(-h[j]));
    }
    total += dt * acc / Real(m);

    grad.col(k) += (dt / Real(m)) * (psi - h / dt);
    grad.col(k + 1) += (dt / Real(m)) * (psi + h / dt);
  }
  return {total, grad};
}

namespace {

// Projected L-BFGS over the interior slices; endpoints stay pinned.
struct PathOptimizer {
  const ReactionPolynomials& poly;
  const MamOptions& opts;
  Index m, kk;

  Real eval(DensityPath& path, Matrix& grad) const {
    auto [value, g] = rate_value_and_grad(path, poly);
    g.col(0).setZero();
    g.col(kk).setZero();
    grad = std::move(g);
    return value;
  }

  void project(DensityPath& path) const {
    path.slices = path.slices.cwiseMax(opts.clip).cwiseMin(1.0 - opts.clip);
  }

  bool minimize(DensityPath& path, Real& value) const {
    constexpr int kMemory = 10;
    std::deque<Matrix> s_hist, y_hist;
    Matrix grad;
    value = eval(path, grad);
    int stall = 0;
    for (int it = 0; it < opts.max_iters; ++it) {
      if (grad.cwiseAbs().maxCoeff() < opts.grad_tol) return true;

      // two-loop recursion on flattened matrices
      Matrix q = grad;
      std::vector<Real> alpha(s_hist.size());
      for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
        const Real rho_i = 1.0 / (y_hist[i].cwiseProduct(s_hist[i]).sum());
        alpha[i] = rho_i * s_hist[i].cwiseProduct(q).sum();
        q -= alpha[i] * y_hist[i];
      }
      if (!s_hist.empty()) {
        const Matrix& s = s_hist.back();
        const Matrix& y = y_hist.back();
        q *= s.cwiseProduct(y).sum() / y.cwiseProduct(y).sum();
      }
      for (std::size_t i = 0; i < s_hist.size(); ++i) {
        const Real rho_i = 1.0 / (y_hist[i].cwiseProduct(s_hist[i]).sum());
        const Real beta = rho_i * y_hist[i].cwiseProduct(q).sum();
        q += (alpha[i] - beta) * s_hist[i];
      }
      Matrix direction = -q;

      const Real slope = grad.cwiseProduct(direction).sum();
      if (slope >= 0.0) {  // bad curvature; restart with steepest descent
        direction = -grad;
        s_hist.clear();
        y_hist.clear();
      }

      Real step = 1.0;
      DensityPath trial = path;
      Matrix trial_grad;
      Real trial_value = value;
      bool accepted = false;
      for (int ls = 0; ls < 40; ++ls) {
        trial.slices = path.slices + step * direction;
        project(trial);
        try {
          trial_value = eval(trial, trial_grad);
        } catch (const std::exception&) {
          step *= 0.5;
          continue;
        }
        if (trial_value < value - 1e-4 * step * std::abs(slope) ||
            trial_value < value * (1.0 - 1e-12)) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) return false;  // stagnated; caller keeps best-so-far

      const Matrix s = trial.slices - path.slices;
      const Matrix y = trial_grad - grad;
      if (s.cwiseProduct(y).sum() > 1e-14) {
        s_hist.push_back(s);
        y_hist.push_back(y);
        if (s_hist.size() > kMemory) {
          s_hist.pop_front();
          y_hist.pop_front();
        }
      }
      const Real improvement = value - trial_value;
      path = std::move(trial);
      grad = std::move(trial_grad);
      value = trial_value;
      if (improvement < 1e-13 * (1.0 + std::abs(value)) && ++stall > 4) return true;
    }
    return false;
  }
};

}  // namespace

MamResult mam_minimize(const StationaryProfile& source, const DensityField& target,
                       const ReactionPolynomials& poly, const MamOptions& opts) {
  const Index m = opts.grid;
  Vector src = resample_linear(source.field.values, m);
  Vector tgt = resample_linear(target.values, m);
  tgt = tgt.cwiseMax(opts.clip).cwiseMin(1.0 - opts.clip);
  src = src.cwiseMax(opts.clip).cwiseMin(1.0 - opts.clip);

  MamResult best;
  best.value = std::numeric_limits<Real>::infinity();
  for (const Real T : opts.T_grid) {
    DensityPath path;
    path.dt = T / Real(opts.slices);
    if (opts.init) {
      path.slices.resize(m, opts.slices + 1);
      const Matrix& src_slices = opts.init->slices;
      for (Index k = 0; k <= opts.slices; ++k) {
        // resample the initial path in time and space
        const Real pos = Real(k) / Real(opts.slices) * Real(src_slices.cols() - 1);
        const Index k0 = std::min<Index>(static_cast<Index>(pos), src_slices.cols() - 2);
        const Real wgt = pos - Real(k0);
        const Vector slice =
            (1.0 - wgt) * src_slices.col(k0) + wgt * src_slices.col(k0 + 1);
        path.slices.col(k) = resample_linear(slice, m);
      }
      path.slices.col(0) = src;
      path.slices.col(opts.slices) = tgt;
    } else {
      path = interpolation_path(src, tgt, [](Real t) { return t; }, opts.slices);
      // one smoothing sweep keeps the start interior and cheap to evaluate
      HydroOptions hopts;
      hopts.check_max_principle = false;
      const Real dts = std::min(2e-4, 0.4 / poly.lipschitz_F);
      HydroStepper stepper(m, dts, poly, hopts);
      for (Index k = 1; k < opts.slices; ++k) {
        Vector slice = path.slices.col(k);
        stepper.step(slice);
        path.slices.col(k) = slice;
      }
    }
    path.slices = path.slices.cwiseMax(opts.clip).cwiseMin(1.0 - opts.clip);

    Real value = 0.0;
    const bool converged = PathOptimizer{poly, opts, m, opts.slices}.minimize(path, value);
    if (value < best.value) {
      best.value = value;
      best.path = path;
      best.T = T;
      best.converged = converged;
    }
  }
  return best;
}

CostMatrix v_matrix(const std::vector<StationaryProfile>& census,
                    const ReactionPolynomials& poly, const VMatrixOptions& opts) {
  if (census.empty()) throw std::invalid_argument("census must be nonempty");
  const Index l = static_cast<Index>(census.size());
  CostMatrix cm;
  cm.v = Matrix::Zero(l, l);
  cm.provenance.assign(l, std::vector<CostProvenance>(l, CostProvenance::UpperBound));
  for (Index i = 0; i < l; ++i) cm.provenance[i][i] = CostProvenance::HeteroclinicZero;

  // zero-cost edges from traced heteroclinic connections
  Matrix traced = Matrix::Zero(l, l);
  for (Index i = 0; i < l; ++i) {
    const auto& fam = census[i];
    const Spectrum spec = linearization_spectrum(fam, poly, 1);
    if (spec.eigenvalues[0] <= opts.instability_threshold) continue;
    for (int sign : {+1, -1}) {
      const StationaryProfile limit = heteroclinic_trace(fam, sign, 1e-3, poly);
      const int j = match_family(limit.field.values, census, 1e-3);
      if (j >= 0 && j != i) traced(i, j) = 1.0;
    }
  }

  for (Index i = 0; i < l; ++i) {
    for (Index j = 0; j < l; ++j) {
      if (i == j) continue;
      if (traced(i, j) > 0.0) {
        cm.v(i, j) = 0.0;
        cm.provenance[i][j] = CostProvenance::HeteroclinicZero;
        continue;
      }
      const Real ub = best_interpolation_cost(census[i], census[j].field, poly);
      const MamResult mam = mam_minimize(census[i], census[j].field, poly, opts.mam);
      if (mam.value <= ub) {
        cm.v(i, j) = mam.value;
        cm.provenance[i][j] = CostProvenance::Mam;
      } else {
        cm.v(i, j) = ub;
        cm.provenance[i][j] = CostProvenance::UpperBound;
      }
    }
  }

  for (Index i = 0; i < l; ++i) {
    if (census[i].kind != StationaryProfile::Kind::StableConstant) continue;
    for (Index j = 0; j < l; ++j)
      if (i != j && cm.v(i, j) <= opts.stable_exit_floor) {
        std::ostringstream msg;
        msg << "exit cost out of stable family " << i << " toward " << j << " is "
            << cm.v(i, j) << ", below the positivity floor";
        throw std::runtime_error(msg.str());
      }
  }
  return cm;
}

Real translation_cost_check(const StationaryProfile& phi, Real speed,
                            const ReactionPolynomials& poly) {
  if (phi.is_constant())
    throw std::invalid_argument("rotation of a constant profile is vacuous");
  if (speed <= 0.0) throw std::invalid_argument("speed must be positive");
  const Index m = phi.field.grid_size();
  const Index steps = m / 2;  // rotate through angle 1/2, one cell per step
  DensityPath path;
  path.dt = 1.0 / (Real(m) * speed);
  path.slices.resize(m, steps + 1);
  for (Index k = 0; k <= steps; ++k) path.slices.col(k) = rotate(phi.field.values, k);
  return rate_I(path, poly);
}

}  // namespace rdmeta
