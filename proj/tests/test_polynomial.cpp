#include <doctest.h>

#include <rdmeta/polynomial.hpp>
#include <rdmeta/rng.hpp>

#include <cmath>

using namespace rdmeta;

TEST_SUITE("polynomial") {
  TEST_CASE("evaluation and calculus") {
    const Polynomial p{1.0, -2.0, 3.0};  // 1 - 2x + 3x^2
    CHECK(p(0.0) == doctest::Approx(1.0));
    CHECK(p(2.0) == doctest::Approx(1.0 - 4.0 + 12.0));
    const Polynomial dp = p.derivative();
    CHECK(dp(1.5) == doctest::Approx(-2.0 + 6.0 * 1.5));
    const Polynomial ip = p.antiderivative(0.5, 0.0);
    CHECK(ip(0.5) == doctest::Approx(0.0));
    CHECK(ip.derivative()(0.3) == doctest::Approx(p(0.3)));
  }

  TEST_CASE("arithmetic and deflation") {
    const Polynomial a{1.0, 1.0};   // 1 + x
    const Polynomial b{-2.0, 1.0};  // x - 2
    const Polynomial prod = a * b;
    CHECK(prod(3.0) == doctest::Approx(4.0 * 1.0));
    const Polynomial q = prod.deflate(2.0);  // divide by (x - 2)
    for (Real x : {-1.0, 0.0, 0.7, 2.5}) CHECK(q(x) == doctest::Approx(a(x)));
  }

  TEST_CASE("roots of a factored cubic") {
    // (x - 0.2)(x - 0.5)(x - 0.9)
    const Polynomial p = Polynomial{-0.2, 1.0} * Polynomial{-0.5, 1.0} * Polynomial{-0.9, 1.0};
    const auto roots = real_roots_in(p, 0.0, 1.0);
    REQUIRE(roots.size() == 3);
    CHECK(roots[0] == doctest::Approx(0.2).epsilon(1e-10));
    CHECK(roots[1] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(roots[2] == doctest::Approx(0.9).epsilon(1e-10));
  }

  TEST_CASE("double root is still located") {
    const Polynomial p = Polynomial{-0.5, 1.0} * Polynomial{-0.5, 1.0} * Polynomial{-0.1, 1.0};
    const auto roots = real_roots_in(p, 0.0, 1.0);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0] == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(roots[1] == doctest::Approx(0.5).epsilon(1e-7));
  }

  TEST_CASE("roots at the interval boundary") {
    const Polynomial p = Polynomial{0.0, 1.0} * Polynomial{-1.0, 1.0};  // x(x-1)
    const auto roots = real_roots_in(p, 0.0, 1.0);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(roots[1] == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("random polynomials: roots found by scan are found by Sturm") {
    CounterRng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
      Vector c(5);
      for (Index i = 0; i < 5; ++i) c[i] = rng.next_range(-2.0, 2.0);
      const Polynomial p{std::move(c)};
      if (p.degree() < 1) continue;
      const auto roots = real_roots_in(p, 0.0, 1.0);
      // every sign change over a fine scan must be matched by a located root
      const int n = 2000;
      for (int i = 0; i < n; ++i) {
        const Real x0 = Real(i) / n, x1 = Real(i + 1) / n;
        if (p(x0) * p(x1) < 0.0) {
          bool matched = false;
          for (Real r : roots) matched = matched || (r >= x0 - 1e-9 && r <= x1 + 1e-9);
          CHECK(matched);
        }
      }
      for (Real r : roots) CHECK(std::abs(p(r)) < 1e-6 * std::max(1.0, p.max_abs_coeff()));
    }
  }

  TEST_CASE("max_abs_on hits interior extrema") {
    const Polynomial p{0.0, 0.0, 1.0};  // x^2
    CHECK(max_abs_on(p, -2.0, 1.0) == doctest::Approx(4.0));
    const Polynomial q{0.0, 3.0, 0.0, -4.0};  // 3x - 4x^3, extremum at x = 1/2
    CHECK(max_abs_on(q, 0.0, 1.0) == doctest::Approx(std::max(1.0, std::abs(q(0.5)))));
  }
}
