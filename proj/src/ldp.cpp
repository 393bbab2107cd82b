#include <rdmeta/ldp.hpp>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rdmeta {

namespace {

Real chi(Real r) { return r * (1.0 - r); }

// mobility averaged onto cell midpoints; entry j pairs with gradient entry j
Vector chi_midpoints(const Vector& rho) {
  const Index m = rho.size();
  Vector out(m);
  for (Index j = 0; j < m; ++j) {
    const Index jp = j + 1 == m ? 0 : j + 1;
    out[j] = 0.5 * (chi(rho[j]) + chi(rho[jp]));
  }
  return out;
}

// -div(chi_mid grad H) on the torus
Vector divergence_form(const Vector& chi_mid, const Vector& h) {
  const Index m = h.size();
  const Real m2 = Real(m) * Real(m);
  Vector out(m);
  for (Index j = 0; j < m; ++j) {
    const Index jp = j + 1 == m ? 0 : j + 1;
    const Index jm = j == 0 ? m - 1 : j - 1;
    out[j] = -m2 * (chi_mid[j] * (h[jp] - h[j]) - chi_mid[jm] * (h[j] - h[jm]));
  }
  return out;
}

struct IntervalData {
  Vector rho_bar;   // midpoint density
  Vector w;         // d_t rho - (1/2) Lap rho_bar
  Vector chi_mid;
  Vector b, d;      // B(rho_bar), D(rho_bar)
};

IntervalData interval_data(const DensityPath& path, Index k, const ReactionPolynomials& poly) {
  IntervalData data;
  data.rho_bar = 0.5 * (path.slices.col(k) + path.slices.col(k + 1));
  data.w = (path.slices.col(k + 1) - path.slices.col(k)) / path.dt -
           0.5 * laplacian_periodic(data.rho_bar);
  data.chi_mid = chi_midpoints(data.rho_bar);
  const Index m = data.rho_bar.size();
  data.b.resize(m);
  data.d.resize(m);
  for (Index j = 0; j < m; ++j) {
    data.b[j] = poly.B(data.rho_bar[j]);
    data.d[j] = poly.D(data.rho_bar[j]);
  }
  return data;
}

// Newton solve of -div(chi grad H) + B e^H - D e^{-H} = w for one interval.
Vector newton_interval(const IntervalData& data, const NewtonOptions& opts, Vector h,
                       Real* residual_out) {
  const Index m = data.rho_bar.size();
  const Real m2 = Real(m) * Real(m);
  if (h.size() != m) h = Vector::Zero(m);

  const auto residual = [&](const Vector& hh) {
    Vector r = divergence_form(data.chi_mid, hh) - data.w;
    for (Index j = 0; j < m; ++j)
      r[j] += data.b[j] * std::exp(hh[j]) - data.d[j] * std::exp(-hh[j]);
    return r;
  };

  Vector r = residual(h);
  Real rn = r.cwiseAbs().maxCoeff();
  std::ostringstream trace;
  for (int it = 0; it < opts.max_iters; ++it) {
    if (rn < opts.residual_tol) {
      if (residual_out) *residual_out = rn;
      return h;
    }
    Vector sub(m), diag(m), sup(m);
    for (Index j = 0; j < m; ++j) {
      const Index jm = j == 0 ? m - 1 : j - 1;
      diag[j] = m2 * (data.chi_mid[j] + data.chi_mid[jm]) +
                data.b[j] * std::exp(h[j]) + data.d[j] * std::exp(-h[j]);
      sup[j] = -m2 * data.chi_mid[j];
      sub[j] = -m2 * data.chi_mid[jm];
    }
    const Real corner_top = sub[0];
    const Real corner_bot = sup[m - 1];
    const Vector delta = solve_cyclic_tridiag(sub, diag, sup, corner_top, corner_bot, -r);

    Real s = 1.0;
    int halvings = 0;
    while (true) {
      Vector trial = h + s * delta;
      Vector rt = residual(trial);
      const Real rtn = rt.cwiseAbs().maxCoeff();
      if (std::isfinite(rtn) && rtn < rn * (1.0 - 0.25 * s)) {
        h = std::move(trial);
        r = std::move(rt);
        rn = rtn;
        break;
      }
      if (++halvings > opts.max_halvings) {
        trace << "step " << it << ": residual " << rn << " stagnated after " << halvings
              << " halvings; ";
        throw std::runtime_error("solve_H Newton stagnation: " + trace.str());
      }
      s *= 0.5;
    }
    trace << rn << " ";
  }
  throw std::runtime_error("solve_H did not reach tolerance: trace " + trace.str());
}

}  // namespace

bool path_strictly_inside(const DensityPath& path, Real margin) {
  return path.slices.minCoeff() > margin && path.slices.maxCoeff() < 1.0 - margin;
}

Real energy_QT(const DensityPath& path) {
  const Index k = path.intervals();
  if (k == 0) return 0.0;
  Real total = 0.0;
  for (Index i = 0; i <= k; ++i) {
    const Real weight = (i == 0 || i == k) ? 0.5 : 1.0;
    total += weight * grad_energy(path.slices.col(i));
  }
  return total * path.dt;
}

Real J_functional(const DensityPath& path, const TestField& g, const ReactionPolynomials& poly) {
  const Index kk = path.intervals();
  const Index m = path.grid_size();
  if (g.values.rows() != m)
    throw std::invalid_argument("test field grid does not match the path");
  const bool staggered = g.values.cols() == kk;
  if (!staggered && g.values.cols() != kk + 1)
    throw std::invalid_argument("test field must have K or K+1 time columns");

  Real j_total = 0.0;
  for (Index k = 0; k < kk; ++k) {
    const IntervalData data = interval_data(path, k, poly);
    const Vector gm = staggered ? g.values.col(k).eval()
                                : (0.5 * (g.values.col(k) + g.values.col(k + 1))).eval();
    const Vector grad_g = gradient_forward(gm);
    Real acc = grid_inner(data.w, gm);
    for (Index j = 0; j < m; ++j) {
      const Index jj = j;  // gradient entry j lives at midpoint j+1/2
      acc -= 0.5 * data.chi_mid[jj] * grad_g[jj] * grad_g[jj] / Real(m);
      acc -= (data.b[j] * std::expm1(gm[j]) + data.d[j] * std::expm1(-gm[j])) / Real(m);
    }
    j_total += path.dt * acc;
  }
  return j_total;
}

HSolution solve_H(const DensityPath& path, const ReactionPolynomials& poly,
                  const NewtonOptions& opts) {
  if (!path_strictly_inside(path))
    throw std::invalid_argument("solve_H requires a path strictly inside (0,1)");
  const Index kk = path.intervals();
  HSolution sol;
  sol.H.dt = path.dt;
  sol.H.values.resize(path.grid_size(), kk);
  Vector warm = Vector::Zero(path.grid_size());
  for (Index k = 0; k < kk; ++k) {
    Real res = 0.0;
    if (std::isfinite(opts.init_constant))
      warm.setConstant(opts.init_constant);
    warm = newton_interval(interval_data(path, k, poly), opts, warm, &res);
    sol.H.values.col(k) = warm;
    sol.max_residual = std::max(sol.max_residual, res);
  }
  return sol;
}

Real rate_I(const DensityPath& path, const ReactionPolynomials& poly, const NewtonOptions& opts) {
  if (!path_strictly_inside(path)) return std::numeric_limits<Real>::infinity();
  const Index kk = path.intervals();
  const Index m = path.grid_size();
  Real total = 0.0;
  Vector warm = Vector::Zero(m);
  for (Index k = 0; k < kk; ++k) {
    const IntervalData data = interval_data(path, k, poly);
    warm = newton_interval(data, opts, warm, nullptr);
    const Vector grad_h = gradient_forward(warm);
    Real acc = 0.0;
    for (Index j = 0; j < m; ++j) {
      acc += 0.5 * data.chi_mid[j] * grad_h[j] * grad_h[j];
      // 1 - e^H + H e^H and 1 - e^-H - H e^-H, evaluated cancellation-free
      acc += data.b[j] * (warm[j] * std::exp(warm[j]) - std::expm1(warm[j]));
      acc += data.d[j] * (-std::expm1(-warm[j]) - warm[j] * std::exp(-warm[j]));
    }
    total += path.dt * acc / Real(m);
  }
  return total;
}

Real pointwise_maximizer(Real w, Real rho, const ReactionPolynomials& poly) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (0,1)");
  const Real b = poly.B(rho), d = poly.D(rho);
  const Real disc = std::sqrt(w * w + 4.0 * b * d);
  if (w >= 0.0) return std::log((w + disc) / (2.0 * b));
  return std::log(2.0 * d / (disc - w));
}

}  // namespace rdmeta
