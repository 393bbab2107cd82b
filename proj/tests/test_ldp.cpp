#include <doctest.h>

#include <rdmeta/ldp.hpp>
#include <rdmeta/rng.hpp>

#include "oracles.hpp"

#include <cmath>

using namespace rdmeta;

namespace {

const ChafeeInfanteModel& model12() {
  static const ChafeeInfanteModel m = chafee_infante_params(1.0, 2.0);
  return m;
}

Vector smooth_profile(CounterRng& rng, Index m, Real lo = 0.25, Real hi = 0.75) {
  Vector v = Vector::Constant(m, rng.next_range(lo, hi));
  for (int k = 1; k <= 4; ++k) {
    const Real amp = rng.next_range(-0.1, 0.1) / (k * k);
    const Real phase = rng.next_range(0.0, 2.0 * kPi);
    for (Index j = 0; j < m; ++j) v[j] += amp * std::cos(2.0 * kPi * k * Real(j) / Real(m) + phase);
  }
  return v.cwiseMax(0.05).cwiseMin(0.95);
}

// random smooth space-time test field sampled at the path's slice times
TestField random_test_field(CounterRng& rng, Index m, Index kk, Real dt, Real amp = 0.5) {
  TestField g;
  g.dt = dt;
  g.values.resize(m, kk + 1);
  const int modes = 3;
  std::vector<Real> ak, bk, wk;
  for (int i = 0; i < modes; ++i) {
    ak.push_back(rng.next_range(-amp, amp));
    bk.push_back(rng.next_range(0.5, 3.0));
    wk.push_back(rng.next_range(0.0, 2.0 * kPi));
  }
  for (Index k = 0; k <= kk; ++k)
    for (Index j = 0; j < m; ++j) {
      Real v = 0.0;
      for (int i = 0; i < modes; ++i)
        v += ak[static_cast<std::size_t>(i)] *
             std::cos(2.0 * kPi * (i + 1) * Real(j) / Real(m) +
                      bk[static_cast<std::size_t>(i)] * dt * Real(k) +
                      wk[static_cast<std::size_t>(i)]);
      g.values(j, k) = v;
    }
  return g;
}

// linear-in-time path between two profiles
DensityPath linear_path(const Vector& u, const Vector& v, Real T, Index kk) {
  DensityPath path;
  path.dt = T / Real(kk);
  path.slices.resize(u.size(), kk + 1);
  for (Index k = 0; k <= kk; ++k) path.slices.col(k) = u + (v - u) * (Real(k) / Real(kk));
  return path;
}

}  // namespace

TEST_SUITE("ldp") {
  TEST_CASE("path energy examples") {
    // spatially constant path has no gradient energy
    const auto flat = linear_path(Vector::Constant(64, 0.3), Vector::Constant(64, 0.7), 2.0, 40);
    CHECK(energy_QT(flat) == 0.0);

    // rho = 1/2 + eps e_1 gives T eps^2 (2 pi)^2
    const Index m = 256;
    const Real eps = 0.05, T = 1.5;
    Vector u(m);
    for (Index j = 0; j < m; ++j)
      u[j] = 0.5 + eps * std::sqrt(2.0) * std::cos(2.0 * kPi * Real(j) / Real(m));
    const auto path = linear_path(u, u, T, 30);
    CHECK(energy_QT(path) == doctest::Approx(T * eps * eps * 4.0 * kPi * kPi).epsilon(2e-4));
  }

  TEST_CASE("J vanishes at G = 0") {
    CounterRng rng(1);
    const auto path = linear_path(smooth_profile(rng, 64), smooth_profile(rng, 64), 1.0, 20);
    TestField zero;
    zero.dt = path.dt;
    zero.values = Matrix::Zero(64, 21);
    CHECK(J_functional(path, zero, model12().poly) == 0.0);
  }

  TEST_CASE("exact duality: J <= I with equality at the optimizer") {
    CounterRng rng(2);
    const Index m = 64, kk = 24;
    const auto path = linear_path(smooth_profile(rng, m), smooth_profile(rng, m), 1.0, kk);
    const Real rate = rate_I(path, model12().poly);
    const auto sol = solve_H(path, model12().poly);
    CHECK(sol.max_residual < 1e-10);

    // equality at G = H (staggered field)
    const Real j_at_h = J_functional(path, sol.H, model12().poly);
    CHECK(j_at_h == doctest::Approx(rate).epsilon(1e-9));

    // J <= I for random smooth fields
    for (int trial = 0; trial < 50; ++trial) {
      const TestField g = random_test_field(rng, m, kk, path.dt);
      CHECK(J_functional(path, g, model12().poly) <= rate + 1e-10);
    }
  }

  TEST_CASE("variational duality holds on hydrodynamic paths too") {
    CounterRng rng(3);
    const auto hydro =
        hydro_solve(make_density_field(smooth_profile(rng, 64)), 0.1, 0.0, model12().poly);
    const Real rate = rate_I(hydro, model12().poly);
    CHECK(rate >= 0.0);
    CHECK(rate < 1e-5 * 0.1);  // vanishes on solutions of the hydrodynamic equation
    for (int trial = 0; trial < 10; ++trial) {
      const TestField g = random_test_field(rng, 64, hydro.intervals(), hydro.dt);
      CHECK(J_functional(hydro, g, model12().poly) <= rate + 1e-10);
    }
  }

  TEST_CASE("optimizer vanishes along the flow and is unique") {
    CounterRng rng(4);
    const auto hydro =
        hydro_solve(make_density_field(smooth_profile(rng, 64)), 0.05, 0.0, model12().poly);
    const auto sol = solve_H(hydro, model12().poly);
    CHECK(sol.H.values.cwiseAbs().maxCoeff() < 1e-2);

    const auto path = linear_path(smooth_profile(rng, 32), smooth_profile(rng, 32), 0.5, 10);
    NewtonOptions from_zero, from_plus, from_minus;
    from_plus.init_constant = 1.0;
    from_minus.init_constant = -1.0;
    const auto h0 = solve_H(path, model12().poly, from_zero);
    const auto hp = solve_H(path, model12().poly, from_plus);
    const auto hm = solve_H(path, model12().poly, from_minus);
    CHECK((h0.H.values - hp.H.values).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((h0.H.values - hm.H.values).cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("spatially constant paths have the closed-form optimizer") {
    const auto& poly = model12().poly;
    const Real u = 0.5, v = 0.6, T = 1.0;
    const Index kk = 400;
    const auto path = linear_path(Vector::Constant(32, u), Vector::Constant(32, v), T, kk);
    const auto sol = solve_H(path, poly);
    const Real w = (v - u) / T;
    for (Index k = 0; k < kk; k += 37) {
      const Real rho = 0.5 * (path.slices(0, k) + path.slices(0, k + 1));
      const Real b = poly.B(rho), d = poly.D(rho);
      const Real expected = std::log((w + std::sqrt(w * w + 4.0 * b * d)) / (2.0 * b));
      CHECK(sol.H.values(7, k) == doctest::Approx(expected).epsilon(1e-9));
      CHECK(sol.H.values(7, k) ==
            doctest::Approx(pointwise_maximizer(w, rho, poly)).epsilon(1e-9));
    }
  }

  TEST_CASE("rate of constant paths matches the scalar quadrature oracle") {
    const auto& poly = model12().poly;
    CounterRng rng(5);
    for (int trial = 0; trial < 6; ++trial) {
      const Real u = rng.next_range(0.2, 0.8);
      const Real v = rng.next_range(0.2, 0.8);
      const Real T = rng.next_range(0.5, 2.0);
      const Index kk = 4000;
      const auto path = linear_path(Vector::Constant(32, u), Vector::Constant(32, v), T, kk);
      const Real rate = rate_I(path, poly);

      const Real w = (v - u) / T;
      const auto integrand = [&](Real t) {
        const Real rho = u + (v - u) * t / T;
        const Real b = poly.B(rho), d = poly.D(rho);
        const Real h = std::log((w + std::sqrt(w * w + 4.0 * b * d)) / (2.0 * b));
        return b * (1.0 - std::exp(h) + h * std::exp(h)) +
               d * (1.0 - std::exp(-h) - h * std::exp(-h));
      };
      const Real oracle = oracles::integrate(integrand, 0.0, T, 1e-12);
      CHECK(rate == doctest::Approx(oracle).epsilon(1e-6));
    }
  }

  TEST_CASE("rate is zero on constant stationary paths and +inf at the boundary") {
    const auto& poly = model12().poly;
    const Real rp = 0.5 * (1.0 + std::sqrt(0.5));
    const auto fixed = linear_path(Vector::Constant(32, rp), Vector::Constant(32, rp), 1.0, 50);
    CHECK(rate_I(fixed, poly) < 1e-14);

    const auto touching =
        linear_path(Vector::Constant(32, 0.0), Vector::Constant(32, 0.5), 1.0, 8);
    CHECK(std::isinf(rate_I(touching, poly)));
    CHECK_THROWS_AS((void)solve_H(touching, poly), std::invalid_argument);
  }

  TEST_CASE("pointwise maximizer identities") {
    const auto& poly = model12().poly;
    CounterRng rng(6);
    for (Real rho : {0.2, 0.5, 0.85})
      CHECK(pointwise_maximizer(poly.F(rho), rho, poly) == doctest::Approx(0.0).epsilon(1e-12));

    // B(1/2) = D(1/2), so the maximizer is odd in w there
    for (Real w : {0.3, 1.7, 12.0})
      CHECK(pointwise_maximizer(-w, 0.5, poly) ==
            doctest::Approx(-pointwise_maximizer(w, 0.5, poly)).epsilon(1e-12));

    // the closed form beats random candidates
    for (int trial = 0; trial < 30; ++trial) {
      const Real w = rng.next_range(-3.0, 3.0);
      const Real rho = rng.next_range(0.1, 0.9);
      const Real b = poly.B(rho), d = poly.D(rho);
      const auto phi = [&](Real g) { return w * g - b * std::expm1(g) - d * std::expm1(-g); };
      const Real best = phi(pointwise_maximizer(w, rho, poly));
      for (int i = 0; i < 100; ++i) CHECK(best >= phi(rng.next_range(-6.0, 6.0)) - 1e-12);
    }
    CHECK_THROWS_AS((void)pointwise_maximizer(1.0, 0.0, poly), std::invalid_argument);
  }

  TEST_CASE("energy inequality of paths with the frozen constant") {
    // E_T(rho) = int int (grad rho)^2 / chi <= C (I_T + T + 1) with C frozen
    const Real frozen_c = 40.0;
    const auto& poly = model12().poly;
    CounterRng rng(7);
    for (int trial = 0; trial < 5; ++trial) {
      const auto path =
          trial % 2 == 0
              ? hydro_solve(make_density_field(smooth_profile(rng, 64)), 0.4, 0.0, poly)
              : linear_path(smooth_profile(rng, 64), smooth_profile(rng, 64), 1.0, 50);
      Real e_t = 0.0;
      for (Index k = 0; k + 1 < path.slices.cols(); ++k) {
        const Vector mid = 0.5 * (path.slices.col(k) + path.slices.col(k + 1));
        const Vector g = gradient_forward(mid);
        Real acc = 0.0;
        for (Index j = 0; j < mid.size(); ++j) {
          const Index jp = j + 1 == mid.size() ? 0 : j + 1;
          const Real chi_mid = 0.5 * (mid[j] * (1 - mid[j]) + mid[jp] * (1 - mid[jp]));
          acc += g[j] * g[j] / chi_mid;
        }
        e_t += path.dt * acc / Real(mid.size());
      }
      const Real rate = rate_I(path, poly);
      CHECK(e_t <= frozen_c * (rate + path.horizon() + 1.0));
    }
  }

  TEST_CASE("mean-zero noise cannot lower the rate much") {
    const auto& poly = model12().poly;
    CounterRng rng(8);
    const auto base = linear_path(smooth_profile(rng, 48), smooth_profile(rng, 48), 1.0, 20);
    const Real base_rate = rate_I(base, poly);
    for (Real eps : {0.02, 0.01, 0.005}) {
      DensityPath noisy = base;
      for (Index k = 1; k < noisy.slices.cols() - 1; ++k) {
        Vector noise(noisy.grid_size());
        for (Index j = 0; j < noise.size(); ++j) noise[j] = rng.next_range(-1.0, 1.0);
        noise.array() -= noise.mean();
        noisy.slices.col(k) += eps * noise;
      }
      noisy.slices = noisy.slices.cwiseMax(1e-6).cwiseMin(1.0 - 1e-6);
      CHECK(rate_I(noisy, poly) >= base_rate - 10.0 * eps);
    }
  }

  TEST_CASE("grid refinement drives successive L2 differences down") {
    const auto& poly = model12().poly;
    const Real rp = 0.5 * (1.0 + std::sqrt(0.5));
    const auto slice_profile = [&](Index m) {
      Vector u(m);
      for (Index j = 0; j < m; ++j)
        u[j] = 0.5 + (rp - 0.5) * std::sin(2.0 * kPi * Real(j) / Real(m)) * 0.5;
      return u;
    };
    std::vector<Real> rates;
    std::vector<DensityPath> paths;
    for (Index m : {32, 64, 128, 256}) {
      paths.push_back(linear_path(Vector::Constant(m, 0.5), slice_profile(m), 1.0, 32));
      rates.push_back(rate_I(paths.back(), poly));
    }
    for (const Real r : rates) CHECK(r < 2.0 * rates.back() + 1.0);  // uniformly bounded
    std::vector<Real> diffs;
    for (std::size_t i = 0; i + 1 < paths.size(); ++i) {
      Real acc = 0.0;
      for (Index k = 0; k < paths[i].slices.cols(); ++k) {
        const Vector fine_on_coarse =
            resample_linear(paths[i + 1].slices.col(k), paths[i].grid_size());
        acc += paths[i].dt * std::pow(grid_l2_norm(paths[i].slices.col(k) - fine_on_coarse), 2);
      }
      diffs.push_back(std::sqrt(acc));
    }
    CHECK(diffs[1] <= diffs[0]);
    CHECK(diffs[2] <= diffs[1]);
  }
}
