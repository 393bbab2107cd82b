#include <rdmeta/pde.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rdmeta {

DensityField make_density_field(Vector values) {
  if (values.size() < 2) throw std::invalid_argument("density field needs at least 2 nodes");
  if (values.minCoeff() < -1e-12 || values.maxCoeff() > 1.0 + 1e-12)
    throw std::invalid_argument("density field must take values in [0,1]");
  return DensityField{std::move(values)};
}

DensityPath reverse_path(const DensityPath& path) {
  DensityPath out;
  out.dt = path.dt;
  out.slices = path.slices.rowwise().reverse();
  return out;
}

Vector laplacian_periodic(const Vector& u) {
  const Index m = u.size();
  const Real m2 = Real(m) * Real(m);
  Vector out(m);
  for (Index j = 0; j < m; ++j) {
    const Index jp = j + 1 == m ? 0 : j + 1;
    const Index jm = j == 0 ? m - 1 : j - 1;
    out[j] = m2 * (u[jp] - 2.0 * u[j] + u[jm]);
  }
  return out;
}

Vector gradient_forward(const Vector& u) {
  const Index m = u.size();
  Vector out(m);
  for (Index j = 0; j < m; ++j) {
    const Index jp = j + 1 == m ? 0 : j + 1;
    out[j] = Real(m) * (u[jp] - u[j]);
  }
  return out;
}

Real grad_energy(const Vector& u) {
  const Vector g = gradient_forward(u);
  return g.squaredNorm() / Real(u.size());
}

Vector resample_linear(const Vector& u, Index m_new) {
  const Index m = u.size();
  if (m_new == m) return u;
  Vector out(m_new);
  for (Index j = 0; j < m_new; ++j) {
    const Real x = Real(j) * Real(m) / Real(m_new);
    const Index i0 = static_cast<Index>(std::floor(x)) % m;
    const Index i1 = (i0 + 1) % m;
    const Real w = x - std::floor(x);
    out[j] = (1.0 - w) * u[i0] + w * u[i1];
  }
  return out;
}

Vector rotate(const Vector& u, Index shift) {
  const Index m = u.size();
  Vector out(m);
  const Index s = ((shift % m) + m) % m;
  for (Index j = 0; j < m; ++j) out[j] = u[(j + s) % m];
  return out;
}

Vector solve_cyclic_tridiag(const Vector& sub, const Vector& diag, const Vector& sup,
                            Real corner_top, Real corner_bot, const Vector& rhs) {
  const Index n = diag.size();
  if (n < 3) throw std::invalid_argument("cyclic tridiagonal solve needs n >= 3");

  const auto thomas = [&](const Vector& d, const Vector& b) {
    Vector c(n), x(n);
    Real beta = d[0];
    x[0] = b[0] / beta;
    for (Index i = 1; i < n; ++i) {
      c[i] = sup[i - 1] / beta;
      beta = d[i] - sub[i] * c[i];
      x[i] = (b[i] - sub[i] * x[i - 1]) / beta;
    }
    for (Index i = n - 2; i >= 0; --i) x[i] -= c[i + 1] * x[i + 1];
    return x;
  };

  // A = T + u v^T with u = (gamma, 0, ..., corner_bot), v = (1, 0, ..., corner_top/gamma)
  const Real gamma = -diag[0];
  Vector d = diag;
  d[0] -= gamma;
  d[n - 1] -= corner_top * corner_bot / gamma;

  Vector u = Vector::Zero(n);
  u[0] = gamma;
  u[n - 1] = corner_bot;

  const Vector y = thomas(d, rhs);
  const Vector z = thomas(d, u);
  const Real vy = y[0] + corner_top / gamma * y[n - 1];
  const Real vz = z[0] + corner_top / gamma * z[n - 1];
  return y - z * (vy / (1.0 + vz));
}

Real default_dt(const ReactionPolynomials& poly) {
  const Real monotone = 0.45 / std::max(poly.lipschitz_F, 1e-12);
  const Real defect = std::sqrt(1.6e-8 / std::max(poly.max_abs_FpF, 1e-12));
  return std::max(1e-7, std::min({1e-4, monotone, defect}));
}

namespace {

Real rk4_step(Real x, Real h, const Polynomial& f) {
  const Real k1 = f(x);
  const Real k2 = f(x + 0.5 * h * k1);
  const Real k3 = f(x + 0.5 * h * k2);
  const Real k4 = f(x + h * k3);
  return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

HydroStepper::HydroStepper(Index grid, Real dt, const ReactionPolynomials& poly,
                           const HydroOptions& opts)
    : dt_(dt), poly_(poly), opts_(opts) {
  if (grid < 16) throw std::invalid_argument("hydro grid must have M >= 16 nodes");
  if (dt_ <= 0.0) throw std::invalid_argument("dt must be positive");
  if (dt_ > 0.5 / poly.lipschitz_F + 1e-15)
    throw std::invalid_argument("dt exceeds the stability bound 1/(2 C_F)");
  const Real m2 = Real(grid) * Real(grid);
  diag_ = Vector::Constant(grid, 1.0 + dt_ * m2);
  sub_ = Vector::Constant(grid, -0.5 * dt_ * m2);
  sup_ = sub_;
  corner_ = -0.5 * dt_ * m2;
}

void HydroStepper::step(Vector& rho) const {
  const Real lo = rho.minCoeff(), hi = rho.maxCoeff();
  Vector rhs = rho;
  for (Index j = 0; j < rho.size(); ++j) rhs[j] += dt_ * poly_.F(rho[j]);
  rho = solve_cyclic_tridiag(sub_, diag_, sup_, corner_, corner_, rhs);
  if (opts_.check_max_principle) {
    const Real x_lo = rk4_step(lo, dt_, poly_.F);
    const Real x_hi = rk4_step(hi, dt_, poly_.F);
    const Real tol = opts_.max_principle_tol;
    if (rho.minCoeff() < x_lo - tol || rho.maxCoeff() > x_hi + tol) {
      std::ostringstream msg;
      msg << "maximum principle breached: dt=" << dt_ << " min=" << rho.minCoeff()
          << " (bound " << x_lo << ") max=" << rho.maxCoeff() << " (bound " << x_hi
          << "); dt too large for this reaction term";
      throw std::runtime_error(msg.str());
    }
  }
}

DensityPath hydro_solve(const DensityField& gamma, Real T, Real dt,
                        const ReactionPolynomials& poly, const HydroOptions& opts) {
  if (T < 0.0) throw std::invalid_argument("horizon must be nonnegative");
  if (dt <= 0.0) dt = default_dt(poly);
  if (T == 0.0) {
    DensityPath path;
    path.dt = dt;
    path.slices = gamma.values;
    return path;
  }
  const int stride = std::max(1, opts.record_stride);
  Index steps = std::max<Index>(1, static_cast<Index>(std::ceil(T / dt - 1e-12)));
  steps = ((steps + stride - 1) / stride) * stride;
  const Real dt_eff = T / Real(steps);

  HydroStepper stepper(gamma.grid_size(), dt_eff, poly, opts);
  DensityPath path;
  path.dt = dt_eff * stride;
  path.slices.resize(gamma.grid_size(), steps / stride + 1);
  Vector rho = gamma.values;
  path.slices.col(0) = rho;
  for (Index k = 1; k <= steps; ++k) {
    stepper.step(rho);
    if (k % stride == 0) path.slices.col(k / stride) = rho;
  }
  return path;
}

Real ode_flow(Real x0, Real t, const ReactionPolynomials& poly, Real tol) {
  if (t == 0.0) return x0;
  Real x = x0, done = 0.0;
  Real h = std::min(t, 0.01 / (1.0 + poly.lipschitz_F));
  int guard = 0;
  while (done < t) {
    if (++guard > 100000000) throw std::runtime_error("ode_flow failed to advance");
    h = std::min(h, t - done);
    const Real full = rk4_step(x, h, poly.F);
    const Real half = rk4_step(rk4_step(x, 0.5 * h, poly.F), 0.5 * h, poly.F);
    const Real err = std::abs(half - full) / 15.0;
    const Real budget = tol * (1.0 + std::abs(x)) * std::max(h / t, 1e-6);
    if (err <= budget) {
      x = half + (half - full) / 15.0;
      done += h;
      if (err < 0.1 * budget) h *= 1.7;
    } else {
      h *= 0.5;
    }
  }
  return x;
}

RelaxResult relax_field(const DensityField& gamma, const ReactionPolynomials& poly, Real tol,
                        Real time_cap, Real dt) {
  if (tol <= 0.0) throw std::invalid_argument("relaxation tolerance must be positive");
  if (dt <= 0.0) dt = default_dt(poly);
  // the fixed point of the IMEX map is the discrete stationary equation for
  // any dt, so relaxation may run at the coarse monotone step
  HydroOptions opts;
  opts.check_max_principle = false;
  HydroStepper stepper(gamma.grid_size(), dt, poly, opts);
  Vector rho = gamma.values;
  Real t = 0.0;
  while (t < time_cap) {
    Vector prev = rho;
    stepper.step(rho);
    t += dt;
    if (grid_l2_norm(rho - prev) < tol * dt) return {DensityField{std::move(rho)}, t};
  }
  throw std::runtime_error("relaxation did not converge by the time cap; solver misconfigured");
}

DensityField heat_semigroup(const DensityField& gamma, Real t) {
  return DensityField{heat_flow(gamma.values, t)};
}

Vector heat_flow(const Vector& u, Real t) {
  if (t < 0.0) throw std::invalid_argument("heat semigroup needs t >= 0");
  const Index m = u.size();
  Vector out = Vector::Zero(m);
  const Index half = m / 2;
  // real DFT, mode-by-mode decay with the continuum symbol
  for (Index k = 0; k <= half; ++k) {
    Real a = 0.0, b = 0.0;
    for (Index j = 0; j < m; ++j) {
      const Real phase = 2.0 * kPi * Real(k) * Real(j) / Real(m);
      a += u[j] * std::cos(phase);
      b += u[j] * std::sin(phase);
    }
    const Real decay = std::exp(-2.0 * kPi * kPi * Real(k) * Real(k) * t);
    const bool nyquist = (m % 2 == 0) && k == half;
    const Real weight = (k == 0 || nyquist) ? 1.0 : 2.0;
    for (Index j = 0; j < m; ++j) {
      const Real phase = 2.0 * kPi * Real(k) * Real(j) / Real(m);
      out[j] += weight * decay * (a * std::cos(phase) + b * std::sin(phase)) / Real(m);
    }
  }
  return out;
}

}  // namespace rdmeta
