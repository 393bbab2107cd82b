#include <doctest.h>

#include <rdmeta/reaction.hpp>
#include <rdmeta/rng.hpp>

#include "oracles.hpp"

#include <cmath>

using namespace rdmeta;

namespace {

ReactionPolynomials poly_for(Real fa, Real fb) { return chafee_infante_params(fa, fb).poly; }

}  // namespace

TEST_SUITE("reaction") {
  TEST_CASE("radius-1 closed-form B and D") {
    // B = (1-r)[2 a2 r(1-r) + a1 (1-r)^2 + a0 r^2], D mirrored
    const auto poly = bd_polynomials(build_rate_table(17.0, 1.0, 5.0));
    for (Real r : {0.0, 0.1, 0.35, 0.5, 0.77, 1.0}) {
      const Real inner_b = 2.0 * 5.0 * r * (1 - r) + 1.0 * (1 - r) * (1 - r) + 17.0 * r * r;
      const Real inner_d = 2.0 * 5.0 * r * (1 - r) + 1.0 * r * r + 17.0 * (1 - r) * (1 - r);
      CHECK(poly.B(r) == doctest::Approx((1 - r) * inner_b).epsilon(1e-12));
      CHECK(poly.D(r) == doctest::Approx(r * inner_d).epsilon(1e-12));
    }
  }

  TEST_CASE("double-well reaction term for the mapped rates") {
    // (fa, fb) = (1, 2) maps to rates (17, 1, 5) and F = (2r-1) - 2(2r-1)^3
    const auto model = chafee_infante_params(1.0, 2.0);
    CHECK(model.a0 == doctest::Approx(17.0));
    CHECK(model.a1 == doctest::Approx(1.0));
    CHECK(model.a2 == doctest::Approx(5.0));
    CHECK(model.a == doctest::Approx(0.5));
    CHECK(model.b == doctest::Approx(1.0));
    CHECK(model.lambda == doctest::Approx(16.0 * kPi * kPi));
    for (Real r : {0.05, 0.3, 0.5, 0.71, 0.95}) {
      const Real u = 2.0 * r - 1.0;
      CHECK(model.poly.F(r) == doctest::Approx(u - 2.0 * u * u * u).epsilon(1e-12));
    }
  }

  TEST_CASE("exact rational enumeration reproduces the closed F form") {
    CounterRng rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
      const long long q = 1 + static_cast<long long>(rng.next_below(9));
      const long long pa = 1 + static_cast<long long>(rng.next_below(30));
      const long long pb = pa + 1 + static_cast<long long>(rng.next_below(40));
      const oracles::Rational fa(pa, q), fb(pb, q);
      const oracles::Rational a1 = fa;
      const oracles::Rational a2 = fa + fb * 2;
      const oracles::Rational a0 = a2 * 2 + fb * 4 - fa;

      oracles::RatPoly b, d;
      oracles::rational_bd(a0, a1, a2, b, d);
      oracles::RatPoly f = oracles::rp_add(b, oracles::rp_scale(oracles::Rational(-1), d));
      const oracles::RatPoly closed = oracles::rational_f_closed(a0, a1, a2);
      REQUIRE(f.size() >= closed.size());
      for (std::size_t i = 0; i < f.size(); ++i) {
        const oracles::Rational expect = i < closed.size() ? closed[i] : oracles::Rational(0);
        CHECK(f[i] == expect);
      }

      // the floating-point enumeration agrees with the exact one
      const auto poly = bd_polynomials(
          build_rate_table(a0.value(), a1.value(), a2.value()));
      for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(poly.F.coeff(static_cast<Index>(i)) ==
              doctest::Approx(f[i].value()).epsilon(1e-12));
    }
  }

  TEST_CASE("constant rates give linear bias") {
    Vector table = Vector::Constant(8, 3.0);
    const auto poly = bd_polynomials(build_rate_table(1, std::move(table)));
    for (Real r : {0.0, 0.25, 0.6, 1.0}) {
      CHECK(poly.B(r) == doctest::Approx(3.0 * (1.0 - r)).epsilon(1e-13));
      CHECK(poly.D(r) == doctest::Approx(3.0 * r).epsilon(1e-13));
      CHECK(poly.F(r) == doctest::Approx(3.0 * (1.0 - 2.0 * r)).epsilon(1e-13));
    }
  }

  TEST_CASE("Monte Carlo expectation agrees with the enumeration") {
    const auto rates = build_rate_table(17.0, 1.0, 5.0);
    const auto poly = bd_polynomials(rates);
    CounterRng rng(5150);
    for (Real rho : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const int n = 400000;
      Real sum_b = 0.0, sum_d = 0.0, sq_b = 0.0, sq_d = 0.0;
      for (int i = 0; i < n; ++i) {
        LatticeConfig c;
        c.occupancy = {rng.next_unit() < rho, rng.next_unit() < rho, rng.next_unit() < rho};
        const Real rate = rates.rate_at(c, 1);
        const Real vb = c.occupancy[1] ? 0.0 : rate;
        const Real vd = c.occupancy[1] ? rate : 0.0;
        sum_b += vb;
        sum_d += vd;
        sq_b += vb * vb;
        sq_d += vd * vd;
      }
      const Real mean_b = sum_b / n, mean_d = sum_d / n;
      const Real se_b = std::sqrt((sq_b / n - mean_b * mean_b) / n);
      const Real se_d = std::sqrt((sq_d / n - mean_d * mean_d) / n);
      CHECK(std::abs(mean_b - poly.B(rho)) < 4.0 * se_b + 1e-9);
      CHECK(std::abs(mean_d - poly.D(rho)) < 4.0 * se_d + 1e-9);
    }
  }

  TEST_CASE("strict positivity endpoints for random tables") {
    CounterRng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
      Vector table(8);
      for (Index i = 0; i < 8; ++i) table[i] = rng.next_range(0.05, 20.0);
      const auto poly = bd_polynomials(build_rate_table(1, std::move(table)));
      CHECK(poly.F(0.0) > 0.0);
      CHECK(poly.F(1.0) < 0.0);
      // V' = -F as a coefficient identity
      const Polynomial residual = poly.V.derivative() + poly.F;
      CHECK(residual.max_abs_coeff() < 1e-12 * std::max(1.0, poly.F.max_abs_coeff()));
      CHECK(poly.V(0.5) == doctest::Approx(0.0));
    }
  }

  TEST_CASE("wells of the symmetric double-well family") {
    const auto poly = poly_for(1.0, 2.0);
    const auto wells = classify_wells(poly);
    REQUIRE(wells.roots.size() == 3);
    const Real rp = 0.5 * (1.0 + std::sqrt(0.5));
    const Real rm = 0.5 * (1.0 - std::sqrt(0.5));
    CHECK(wells.roots[0] == doctest::Approx(rm).epsilon(1e-11));
    CHECK(wells.roots[1] == doctest::Approx(0.5).epsilon(1e-11));
    CHECK(wells.roots[2] == doctest::Approx(rp).epsilon(1e-11));
    REQUIRE(wells.minima.size() == 2);
    REQUIRE(wells.maxima.size() == 1);
    CHECK(wells.maxima[0] == doctest::Approx(0.5));
    CHECK(wells.attractor == std::vector<bool>{true, false, true});
  }

  TEST_CASE("linear F has a single attracting root") {
    Vector table = Vector::Constant(8, 2.0);
    const auto poly = bd_polynomials(build_rate_table(1, std::move(table)));
    const auto wells = classify_wells(poly);
    REQUIRE(wells.roots.size() == 1);
    CHECK(wells.roots[0] == doctest::Approx(0.5));
    CHECK(wells.attractor[0]);
  }

  TEST_CASE("degenerate roots are refused") {
    // F built to have a double root: F = -(r - 1/2)^2 (r - 2) has F(0) > 0 > F(1)
    ReactionPolynomials poly;
    poly.F = -1.0 * (Polynomial{-0.5, 1.0} * Polynomial{-0.5, 1.0} * Polynomial{-2.0, 1.0});
    poly.V = (-1.0 * poly.F).antiderivative(0.5, 0.0);
    poly.lipschitz_F = max_abs_on(poly.F.derivative(), 0.0, 1.0);
    CHECK_THROWS_AS((void)classify_wells(poly), std::invalid_argument);
  }

  TEST_CASE("concavity criterion matches the second-derivative test") {
    CHECK(concavity_check(bd_polynomials(build_rate_table(17, 1, 5))).B_concave);
    CHECK(concavity_check(bd_polynomials(build_rate_table(17, 1, 5))).D_concave);
    const auto bad = concavity_check(bd_polynomials(build_rate_table(1, 10, 1)));
    CHECK_FALSE(bad.B_concave);
    Vector table = Vector::Constant(8, 4.0);
    const auto lin = concavity_check(bd_polynomials(build_rate_table(1, std::move(table))));
    CHECK(lin.B_concave);
    CHECK(lin.D_concave);
  }

  TEST_CASE("random mapped models are concave and consistent") {
    CounterRng rng(808);
    for (int trial = 0; trial < 20; ++trial) {
      const Real fa = rng.next_range(0.2, 3.0);
      const Real fb = fa + rng.next_range(0.2, 6.0);
      const Real slack = trial % 2 ? 0.0 : rng.next_range(0.0, 2.0);
      const auto model = chafee_infante_params(fa, fb, fa + 2 * fb + slack);
      const auto rep = concavity_check(model.poly);
      CHECK(rep.B_concave);
      CHECK(rep.D_concave);
    }
  }

  TEST_CASE("parameter map defaults and rejections") {
    const auto m = chafee_infante_params(1.0, 12.0);
    CHECK(m.a == doctest::Approx(5.5));
    CHECK(m.b == doctest::Approx(6.0));
    CHECK(m.a0 == doctest::Approx(1.0 + 8.0 * 12.0));  // a0 = fa + 8 fb at the default a2
    CHECK_THROWS_AS((void)chafee_infante_params(2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)chafee_infante_params(1.0, 2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)build_rate_table(0.0, 1.0, 1.0), std::invalid_argument);
  }
}
