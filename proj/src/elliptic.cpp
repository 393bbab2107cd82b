#include <rdmeta/elliptic.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rdmeta {

namespace {

Real bisect(const std::function<Real(Real)>& f, Real lo, Real hi, int iters = 200) {
  Real flo = f(lo);
  for (int i = 0; i < iters && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++i) {
    const Real mid = 0.5 * (lo + hi);
    const Real fm = f(mid);
    if ((flo <= 0.0) == (fm <= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Gauss-Legendre nodes/weights on [-1,1] by Newton on the Legendre recurrence.
void gauss_legendre(int n, std::vector<Real>& x, std::vector<Real>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Real z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    Real pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      Real p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const Real p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const Real dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

Vector grid_thetas(Index m) {
  Vector t(m);
  for (Index j = 0; j < m; ++j) t[j] = Real(j) / Real(m);
  return t;
}

// Fourier basis sampled on the grid, rows ordered [0, +1, -1, +2, -2, ...].
struct FourierBasis {
  std::vector<int> wavenumbers;  // signed k per row
  Matrix rows;                   // nb x M

  FourierBasis(int kmax, Index m) {
    const int nb = 2 * kmax + 1;
    wavenumbers.resize(nb);
    rows.resize(nb, m);
    const Vector theta = grid_thetas(m);
    wavenumbers[0] = 0;
    rows.row(0).setOnes();
    int r = 1;
    for (int k = 1; k <= kmax; ++k) {
      wavenumbers[r] = k;
      wavenumbers[r + 1] = -k;
      for (Index j = 0; j < m; ++j) {
        rows(r, j) = std::sqrt(2.0) * std::cos(2.0 * kPi * k * theta[j]);
        rows(r + 1, j) = std::sqrt(2.0) * std::sin(2.0 * kPi * k * theta[j]);
      }
      r += 2;
    }
  }

  Vector analyze(const Vector& u) const { return rows * u / Real(u.size()); }
  Vector synthesize(const Vector& coeffs) const { return rows.transpose() * coeffs; }

  Vector derivative_grid(const Vector& u) const {
    const Vector c = analyze(u);
    Vector d = Vector::Zero(c.size());
    for (std::size_t p = 1; p + 1 < wavenumbers.size(); p += 2) {
      const int k = wavenumbers[p];
      d[p] = 2.0 * kPi * k * c[p + 1];        // cos row gets +2 pi k * sin coeff
      d[p + 1] = -2.0 * kPi * k * c[p];       // sin row gets -2 pi k * cos coeff
    }
    return synthesize(d);
  }
};

Vector canonical_rotate(const Vector& u) {
  Index best = 0;
  for (Index j = 1; j < u.size(); ++j)
    if (u[j] > u[best]) best = j;
  return rotate(u, best);
}

// Newton polish of the Fourier-Galerkin stationary system with a phase
// condition pinning translations. Solving in the same truncated basis that
// represents the linearization keeps grad(phi) an exact kernel vector of the
// spectral operator at the solution.
Vector newton_polish(Vector phi, const ReactionPolynomials& poly, Real tol, int kmax,
                     int max_iters = 60) {
  const Index m = phi.size();
  kmax = std::min<int>(kmax, static_cast<int>((m - 2) / 2));
  const FourierBasis basis(kmax, m);
  const int nb = static_cast<int>(basis.wavenumbers.size());
  const Polynomial Fp = poly.F.derivative();

  Vector c = basis.analyze(phi);
  const Vector c0 = c;
  // phase direction: coefficients of grad(phi0)
  Vector dir = Vector::Zero(nb);
  for (int p = 1; p + 1 < nb; p += 2) {
    const Real k = basis.wavenumbers[p];
    dir[p] = 2.0 * kPi * k * c0[p + 1];
    dir[p + 1] = -2.0 * kPi * k * c0[p];
  }
  if (dir.cwiseAbs().maxCoeff() < 1e-14) dir.setOnes();

  for (int it = 0; it < max_iters; ++it) {
    const Vector phi_grid = basis.synthesize(c);
    Vector f_grid(m), fp_grid(m);
    for (Index j = 0; j < m; ++j) {
      f_grid[j] = poly.F(phi_grid[j]);
      fp_grid[j] = Fp(phi_grid[j]);
    }
    Vector residual = basis.rows * f_grid / Real(m);
    for (int p = 0; p < nb; ++p) {
      const Real k = basis.wavenumbers[p];
      residual[p] += -2.0 * kPi * kPi * k * k * c[p];
    }
    const Real phase = dir.dot(c - c0);
    if (residual.cwiseAbs().maxCoeff() < tol && std::abs(phase) < tol)
      return basis.synthesize(c);

    Matrix big = Matrix::Zero(nb + 1, nb + 1);
    big.topLeftCorner(nb, nb) =
        (basis.rows * fp_grid.asDiagonal() * basis.rows.transpose()) / Real(m);
    for (int p = 0; p < nb; ++p) {
      const Real k = basis.wavenumbers[p];
      big(p, p) += -2.0 * kPi * kPi * k * k;
      big(p, nb) = dir[p];
      big(nb, p) = dir[p];
    }
    Vector rhs(nb + 1);
    rhs.head(nb) = -residual;
    rhs[nb] = -phase;
    const Vector delta = big.partialPivLu().solve(rhs);
    c += delta.head(nb);
  }
  throw std::runtime_error("stationary Newton polish did not converge");
}

}  // namespace

Real stationary_residual(const Vector& values, const ReactionPolynomials& poly) {
  const Index m = values.size();
  // cap the bandwidth: the k^2 symbol amplifies coefficient roundoff, and
  // classified profiles are analytic with negligible tails
  const int kmax = std::min<int>(64, static_cast<int>((m - 2) / 2));
  const FourierBasis basis(kmax, m);
  Vector c = basis.analyze(values);
  for (std::size_t p = 0; p < basis.wavenumbers.size(); ++p) {
    const Real k = basis.wavenumbers[p];
    c[static_cast<Index>(p)] *= -2.0 * kPi * kPi * k * k;
  }
  Vector g = basis.synthesize(c);
  for (Index j = 0; j < m; ++j) g[j] += poly.F(values[j]);
  return g.cwiseAbs().maxCoeff();
}

std::vector<StationaryProfile> constant_solutions(const ReactionPolynomials& poly,
                                                  const CensusOptions& opts) {
  const WellStructure wells = classify_wells(poly);
  std::vector<StationaryProfile> out;
  for (std::size_t i = 0; i < wells.roots.size(); ++i) {
    StationaryProfile p;
    p.field = DensityField{Vector::Constant(opts.grid, wells.roots[i])};
    p.kind = wells.attractor[i] ? StationaryProfile::Kind::StableConstant
                                : StationaryProfile::Kind::UnstableConstant;
    p.periods = 0;
    out.push_back(std::move(p));
  }
  return out;
}

Real time_map(const ReactionPolynomials& poly, int well_index, Real amplitude,
              int quadrature_nodes) {
  const WellStructure wells = classify_wells(poly);
  if (well_index < 0 || well_index >= static_cast<int>(wells.maxima.size()))
    throw std::invalid_argument("well index out of range");
  const Real mj = wells.minima[well_index];
  const Real Mj = wells.maxima[well_index];
  const Real mj1 = wells.minima[well_index + 1];
  const Real a_max = poly.V(Mj) - std::max(poly.V(mj), poly.V(mj1));
  if (!(amplitude > 0.0 && amplitude < a_max))
    throw std::invalid_argument("orbit amplitude outside the well");

  const Real level = poly.V(Mj) - amplitude;
  const auto vv = [&](Real x) { return poly.V(x) - level; };
  const Real rl = bisect(vv, mj, Mj);   // V increasing on [m_j, M_j]
  const Real rr = bisect(vv, Mj, mj1);  // V decreasing on [M_j, m_j+1]

  // V - level = (rho - rl)(rr - rho) q with q > 0 on the orbit
  const Polynomial p = poly.V - Polynomial::constant(level);
  const Polynomial q = -1.0 * p.deflate(rl).deflate(rr);

  std::vector<Real> x, w;
  gauss_legendre(quadrature_nodes, x, w);
  const Real c = 0.5 * (rl + rr), halfw = 0.5 * (rr - rl);
  Real period = 0.0;
  for (int i = 0; i < quadrature_nodes; ++i) {
    const Real phi = 0.5 * kPi * x[i];
    const Real rho = c + halfw * std::sin(phi);
    period += 0.5 * kPi * w[i] / std::sqrt(std::max(q(rho), 1e-300));
  }
  return period;
}

std::vector<StationaryProfile> nonconstant_solutions(const ReactionPolynomials& poly,
                                                     const CensusOptions& opts) {
  const WellStructure wells = classify_wells(poly);
  std::vector<StationaryProfile> out;
  for (int j = 0; j < static_cast<int>(wells.maxima.size()); ++j) {
    const Real Mj = wells.maxima[j];
    const Real a_max =
        poly.V(Mj) - std::max(poly.V(wells.minima[j]), poly.V(wells.minima[j + 1]));
    const Real t_min = kPi * std::sqrt(2.0 / poly.F.derivative()(Mj));
    for (int m = 1; Real(m) * t_min < 1.0; ++m) {
      // T(A) increases from t_min and diverges at the separatrix
      const auto gap = [&](Real a) { return time_map(poly, j, a) - 1.0 / Real(m); };
      Real a_lo = 1e-10 * a_max, a_hi = a_max * (1.0 - 1e-12);
      if (gap(a_lo) >= 0.0) continue;  // numerical guard; t_min said admissible
      const Real a_star = bisect(gap, a_lo, a_hi);

      // integrate the Hamiltonian orbit from its maximum and sample the grid
      const Real level = poly.V(Mj) - a_star;
      const auto vv = [&](Real x) { return poly.V(x) - level; };
      const Real rr = bisect(vv, Mj, wells.minima[j + 1]);
      const Index grid = opts.grid;
      const int sub = 64;
      const Real h = 1.0 / Real(sub * grid);
      Vector phi_grid(grid);
      Real rho = rr, psi = 0.0;
      for (Index step = 0; step < sub * grid; ++step) {
        if (step % sub == 0) phi_grid[step / sub] = rho;
        // RK4 on rho' = psi, psi' = -2 F(rho)
        const auto fr = [&](Real r, Real p_) { return p_; };
        const auto fp = [&](Real r, Real p_) { return -2.0 * poly.F(r); };
        const Real k1r = fr(rho, psi), k1p = fp(rho, psi);
        const Real k2r = fr(rho + 0.5 * h * k1r, psi + 0.5 * h * k1p),
                   k2p = fp(rho + 0.5 * h * k1r, psi + 0.5 * h * k1p);
        const Real k3r = fr(rho + 0.5 * h * k2r, psi + 0.5 * h * k2p),
                   k3p = fp(rho + 0.5 * h * k2r, psi + 0.5 * h * k2p);
        const Real k4r = fr(rho + h * k3r, psi + h * k3p),
                   k4p = fp(rho + h * k3r, psi + h * k3p);
        rho += h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
        psi += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
      }

      Vector polished = canonical_rotate(
          newton_polish(phi_grid, poly, opts.newton_tol, opts.fourier_modes));
      const Real res = stationary_residual(polished, poly);
      if (res > opts.residual_tol) {
        std::ostringstream msg;
        msg << "branch m=" << m << " residual " << res << " exceeds tolerance";
        throw std::runtime_error(msg.str());
      }
      StationaryProfile p;
      p.field = make_density_field(std::move(polished));
      p.kind = StationaryProfile::Kind::Nonconstant;
      p.periods = m;
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<StationaryProfile> stationary_census(const ReactionPolynomials& poly,
                                                 const CensusOptions& opts) {
  std::vector<StationaryProfile> census = constant_solutions(poly, opts);
  for (auto& branch : nonconstant_solutions(poly, opts)) census.push_back(std::move(branch));
  for (std::size_t i = 0; i < census.size(); ++i) census[i].family_id = static_cast<int>(i);
  return census;
}

Spectrum linearization_spectrum(const StationaryProfile& phi, const ReactionPolynomials& poly,
                                int n_modes, int fourier_modes) {
  const Index m = phi.field.grid_size();
  const int kmax = std::min<int>(fourier_modes, static_cast<int>((m - 2) / 2));
  const FourierBasis basis(kmax, m);
  const int nb = static_cast<int>(basis.wavenumbers.size());

  Vector vpp(m);
  const Polynomial Fp = poly.F.derivative();
  for (Index j = 0; j < m; ++j) vpp[j] = -Fp(phi.field.values[j]);  // V'' = -F'

  Matrix a = Matrix::Zero(nb, nb);
  a.noalias() = -(basis.rows * vpp.asDiagonal() * basis.rows.transpose()) / Real(m);
  for (int p = 0; p < nb; ++p) {
    const Real k = basis.wavenumbers[p];
    a(p, p) += -2.0 * kPi * kPi * k * k;
  }
  a = 0.5 * (a + a.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  const int total = nb;
  const int keep = std::min(n_modes, total);
  Spectrum spec;
  spec.eigenvalues.resize(keep);
  spec.eigenfunctions.resize(m, keep);
  for (int i = 0; i < keep; ++i) {
    const int src = total - 1 - i;  // descending
    spec.eigenvalues[i] = solver.eigenvalues()[src];
    Vector grid_fn = basis.synthesize(solver.eigenvectors().col(src));
    spec.eigenfunctions.col(i) = grid_fn / std::sqrt(grid_inner(grid_fn, grid_fn));
  }

  if (!phi.is_constant()) {
    // grad(phi) spans the kernel coming from translations; scan the full
    // spectrum regardless of how many modes the caller keeps
    int zero_idx = -1;
    Real best = 1e9;
    for (int i = 0; i < total; ++i)
      if (std::abs(solver.eigenvalues()[i]) < best) {
        best = std::abs(solver.eigenvalues()[i]);
        zero_idx = i;
      }
    if (best > 1e-6)
      throw std::runtime_error("missing zero eigenvalue for a non-constant profile");
    const Vector grad = basis.derivative_grid(phi.field.values);
    const Vector ef = basis.synthesize(solver.eigenvectors().col(zero_idx));
    const Real align = std::abs(grid_inner(grad, ef)) /
                       std::sqrt(grid_inner(grad, grad) * grid_inner(ef, ef));
    if (align < 1.0 - 1e-6)
      throw std::runtime_error("zero eigenfunction is not parallel to grad(phi)");
  }
  return spec;
}

StationaryProfile classify_profile(const DensityField& field, const ReactionPolynomials& poly,
                                   const CensusOptions& opts) {
  Vector values = field.values;
  const Real spread = values.maxCoeff() - values.minCoeff();
  StationaryProfile p;
  if (spread < 1e-5) {
    // snap to the nearest root of F
    const WellStructure wells = classify_wells(poly);
    const Real mean = values.mean();
    Real best = 1e18;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < wells.roots.size(); ++i)
      if (std::abs(wells.roots[i] - mean) < best) {
        best = std::abs(wells.roots[i] - mean);
        idx = i;
      }
    if (best > 1e-4) throw std::runtime_error("near-constant profile is far from any root of F");
    p.field = DensityField{Vector::Constant(values.size(), wells.roots[idx])};
    p.kind = wells.attractor[idx] ? StationaryProfile::Kind::StableConstant
                                  : StationaryProfile::Kind::UnstableConstant;
    p.periods = 0;
  } else {
    Vector polished =
        canonical_rotate(newton_polish(values, poly, opts.newton_tol, opts.fourier_modes));
    p.field = make_density_field(std::move(polished));
    p.kind = StationaryProfile::Kind::Nonconstant;
    int maxima = 0;
    const Vector& u = p.field.values;
    for (Index j = 0; j < u.size(); ++j) {
      const Real prev = u[(j + u.size() - 1) % u.size()], next = u[(j + 1) % u.size()];
      if (u[j] > prev && u[j] >= next) ++maxima;
    }
    p.periods = maxima;
  }
  const Real res = stationary_residual(p.field.values, poly);
  if (res > opts.residual_tol) {
    std::ostringstream msg;
    msg << "profile residual " << res << " exceeds " << opts.residual_tol;
    throw std::runtime_error(msg.str());
  }
  return p;
}

Real family_distance(const Vector& values, const StationaryProfile& profile) {
  Vector ref = profile.field.values;
  if (ref.size() != values.size()) ref = resample_linear(ref, values.size());
  if (profile.is_constant()) return grid_l2_norm(values - ref);
  Real best = 1e18;
  for (Index s = 0; s < values.size(); ++s)
    best = std::min(best, grid_l2_norm(values - rotate(ref, s)));
  return best;
}

int match_family(const Vector& values, const std::vector<StationaryProfile>& census, Real tol) {
  int best_idx = -1;
  Real best = tol;
  for (const auto& fam : census) {
    const Real d = family_distance(values, fam);
    if (d < best) {
      best = d;
      best_idx = fam.family_id;
    }
  }
  return best_idx;
}

StationaryProfile heteroclinic_trace(const StationaryProfile& phi, int sign, Real eps,
                                     const ReactionPolynomials& poly,
                                     const CensusOptions& opts) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  const Spectrum spec = linearization_spectrum(phi, poly, 1, opts.fourier_modes);
  if (spec.eigenvalues[0] <= 1e-6)
    throw std::invalid_argument("profile is not unstable; no heteroclinic to trace");
  Vector dir = spec.eigenfunctions.col(0);
  dir /= dir.cwiseAbs().maxCoeff();
  const Vector start = phi.field.values + Real(sign) * eps * dir;
  const auto relaxed = relax_field(make_density_field(start), poly, 1e-8, 2000.0,
                                   std::min(2e-3, 0.4 / poly.lipschitz_F));
  return classify_profile(relaxed.field, poly, opts);
}

std::pair<StationaryProfile, Real> relax_to_stationary(const DensityField& gamma,
                                                       const ReactionPolynomials& poly, Real tol,
                                                       const CensusOptions& opts, Real time_cap) {
  // a field that already solves the stationary equation is its own limit; the
  // discrete flow would otherwise drift off unstable profiles
  if (stationary_residual(gamma.values, poly) < opts.residual_tol)
    return {classify_profile(gamma, poly, opts), 0.0};
  const auto relaxed =
      relax_field(gamma, poly, tol, time_cap, std::min(2e-3, 0.4 / poly.lipschitz_F));
  return {classify_profile(relaxed.field, poly, opts), relaxed.time};
}

}  // namespace rdmeta
