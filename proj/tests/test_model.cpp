#include <doctest.h>

#include <rdmeta/kmc.hpp>
#include <rdmeta/model.hpp>
#include <rdmeta/rng.hpp>

#include <unsupported/Eigen/MatrixFunctions>

#include "oracles.hpp"

#include <cmath>

using namespace rdmeta;

TEST_SUITE("model") {
  TEST_CASE("radius-1 table layout") {
    const auto rates = build_rate_table(17.0, 1.0, 5.0);
    const auto rate_of = [&](int l, int c, int r) {
      LatticeConfig cfg;
      cfg.occupancy = {static_cast<std::uint8_t>(l), static_cast<std::uint8_t>(c),
                       static_cast<std::uint8_t>(r)};
      return rates.rate_at(cfg, 1);
    };
    CHECK(rate_of(0, 0, 0) == 1.0);
    CHECK(rate_of(0, 1, 0) == 17.0);
    CHECK(rate_of(0, 0, 1) == 5.0);
    CHECK(rate_of(0, 1, 1) == 5.0);
    CHECK(rate_of(1, 0, 1) == 17.0);
    CHECK(rate_of(1, 1, 1) == 1.0);
    CHECK(rates.min_rate() == 1.0);

    Vector table = Vector::Constant(8, 1.0);
    CHECK(build_rate_table(1, std::move(table)).table().minCoeff() == 1.0);
    CHECK_THROWS_AS((void)build_rate_table(1.0, -2.0, 3.0), std::invalid_argument);
  }

  TEST_CASE("empirical measure closed sums") {
    const int n = 16, k = 5;
    const auto full = empirical_measure(LatticeConfig::constant(n, 1), k);
    CHECK(full.coeff(0) == doctest::Approx(1.0));
    for (int kk = 1; kk <= k; ++kk) {
      CHECK(full.coeff(kk) == doctest::Approx(0.0).epsilon(1e-12));
      CHECK(full.coeff(-kk) == doctest::Approx(0.0).epsilon(1e-12));
    }
    const auto empty = empirical_measure(LatticeConfig::constant(n, 0), k);
    CHECK(empty.coeffs.cwiseAbs().maxCoeff() == 0.0);

    LatticeConfig single = LatticeConfig::constant(4, 0);
    single.occupancy[0] = 1;
    const auto m = empirical_measure(single, 1);
    CHECK(m.coeff(0) == doctest::Approx(0.25));
    CHECK(m.coeff(1) == doctest::Approx(std::sqrt(2.0) / 4.0));
    CHECK(m.coeff(-1) == doctest::Approx(0.0));
  }

  TEST_CASE("distance examples and tail bound") {
    const auto m1 = empirical_measure(LatticeConfig::from_string("0101101001011010"), 8);
    CHECK(measure_distance(m1, m1).value == 0.0);
    CHECK(measure_distance(m1, m1).tail_bound ==
          doctest::Approx(4.0 * std::sqrt(2.0) * std::pow(2.0, -8)));

    const int grid = 128, k = 12;
    const Real eps = 0.01;
    Vector flat = Vector::Constant(grid, 1.0), bumped(grid);
    for (Index j = 0; j < grid; ++j)
      bumped[j] = 1.0 + eps * std::sqrt(2.0) * std::cos(2.0 * kPi * Real(j) / grid);
    const auto d = measure_distance(measure_coords(flat, k), measure_coords(bumped, k));
    CHECK(d.value == doctest::Approx(eps / 2.0).epsilon(1e-10));
  }

  TEST_CASE("distance bounded by three L2 norms") {
    CounterRng rng(4);
    const int grid = 64, k = 20;
    for (int trial = 0; trial < 20; ++trial) {
      Vector a(grid), b(grid);
      for (Index j = 0; j < grid; ++j) {
        a[j] = rng.next_unit();
        b[j] = rng.next_unit();
      }
      const auto d = measure_distance(measure_coords(a, k), measure_coords(b, k));
      CHECK(d.value <= 3.0 * grid_l2_norm(a - b) + d.tail_bound);
    }
  }

  TEST_CASE("truncated coordinates form a metric") {
    CounterRng rng(11);
    const int k = 6;
    const auto random_coords = [&]() {
      MeasureCoords m;
      m.truncation = k;
      m.coeffs = Vector::Zero(2 * k + 1);
      for (Index i = 0; i < m.coeffs.size(); ++i) m.coeffs[i] = rng.next_range(-0.7, 0.7);
      return m;
    };
    for (int trial = 0; trial < 50; ++trial) {
      const auto a = random_coords(), b = random_coords(), c = random_coords();
      const Real dab = measure_distance(a, b).value;
      const Real dba = measure_distance(b, a).value;
      const Real dac = measure_distance(a, c).value;
      const Real dcb = measure_distance(c, b).value;
      CHECK(dab == doctest::Approx(dba));
      CHECK(measure_distance(a, a).value == 0.0);
      CHECK(dab <= dac + dcb + 1e-12);
    }
    MeasureCoords a, b;
    a.truncation = 3;
    a.coeffs = Vector::Zero(7);
    b.truncation = 4;
    b.coeffs = Vector::Zero(9);
    CHECK_THROWS_AS((void)measure_distance(a, b), std::invalid_argument);
  }

  TEST_CASE("zero horizon returns the initial configuration") {
    const auto rates = build_rate_table(17.0, 1.0, 5.0);
    const auto init = LatticeConfig::from_string("0011010111");
    const auto run = kmc_run(init, rates, 0.0, 99, {0.0});
    REQUIRE(run.snapshots.size() == 1);
    CHECK(run.snapshots[0] == init);
    CHECK(run.n_events == 0);
  }

  TEST_CASE("identical seeds give identical trajectories") {
    const auto rates = build_rate_table(17.0, 1.0, 5.0);
    const auto init = LatticeConfig::from_string("0101100111010010");
    const std::vector<Real> obs = {0.01, 0.05, 0.1};
    const auto a = kmc_run(init, rates, 0.1, 7, obs, {}, 3);
    const auto b = kmc_run(init, rates, 0.1, 7, obs, {}, 3);
    const auto c = kmc_run(init, rates, 0.1, 7, obs, {}, 4);
    for (std::size_t i = 0; i < obs.size(); ++i) CHECK(a.snapshots[i] == b.snapshots[i]);
    CHECK(a.n_events == b.n_events);
    bool differs = a.n_events != c.n_events;
    for (std::size_t i = 0; i < obs.size(); ++i)
      differs = differs || !(a.snapshots[i] == c.snapshots[i]);
    CHECK(differs);
  }

  TEST_CASE("first event from the empty lattice is an Exp(N a1) clock") {
    const int n = 64;
    const auto rates = build_rate_table(17.0, 1.0, 5.0);
    const auto init = LatticeConfig::constant(n, 0);
    const int runs = 10000;
    Real sum = 0.0, sq = 0.0;
    for (int r = 0; r < runs; ++r) {
      const auto out = kmc_run(init, rates, 0.2, 1234, {}, {}, static_cast<std::uint64_t>(r));
      REQUIRE(std::isfinite(out.first_event_time));
      sum += out.first_event_time;
      sq += out.first_event_time * out.first_event_time;
    }
    const Real mean = sum / runs;
    const Real se = std::sqrt((sq / runs - mean * mean) / runs);
    CHECK(std::abs(mean - 1.0 / n) <= 3.0 * se);
  }

  TEST_CASE("pure stirring conserves particles, flips do not") {
    const auto rates = build_rate_table(17.0, 1.0, 5.0);
    const auto init = LatticeConfig::from_string("0110010110010110");
    KmcOptions stirring;
    stirring.flips_enabled = false;
    const std::vector<Real> obs = {0.001, 0.002, 0.005, 0.01};
    const auto pure = kmc_run(init, rates, 0.01, 5, obs, stirring);
    CHECK(pure.n_events > 0);
    for (const auto& snap : pure.snapshots)
      CHECK(snap.particle_count() == init.particle_count());

    const auto mixed = kmc_run(init, rates, 2.0, 5, {2.0});
    CHECK(mixed.snapshots.back().particle_count() != init.particle_count());
  }

  TEST_CASE("incremental rates equal rates rebuilt from scratch") {
    const auto rates = build_rate_table(17.0, 1.0, 5.0);
    const auto init = LatticeConfig::from_string("01011001110100101100");
    for (Real horizon : {0.001, 0.01, 0.05}) {
      const auto state = kmc_debug_run(init, rates, horizon, 21);
      const auto fresh = kmc_rates_from_scratch(state.final_config, rates);
      REQUIRE(state.rates.size() == fresh.size());
      for (std::size_t i = 0; i < fresh.size(); ++i) CHECK(state.rates[i] == fresh[i]);
    }
  }

  TEST_CASE("desk-scale law agrees with the dense generator exponential") {
    const int n = 4;
    const Real horizon = 0.25;
    const int runs = 30000;
    const auto rates = build_rate_table(17.0, 1.0, 5.0);
    const auto q = oracles::dense_generator(n, rates);
    const Matrix pt = (horizon * q).exp();

    const auto init = LatticeConfig::constant(n, 0);
    std::vector<int> counts(static_cast<std::size_t>(1 << n), 0);
    for (int r = 0; r < runs; ++r) {
      const auto out = kmc_run(init, rates, horizon, 31337, {horizon}, {},
                               static_cast<std::uint64_t>(r));
      int code = 0;
      for (int x = 0; x < n; ++x)
        code |= out.snapshots[0].occupancy[static_cast<std::size_t>(x)] << x;
      ++counts[static_cast<std::size_t>(code)];
    }
    for (int s = 0; s < (1 << n); ++s) {
      const Real p = pt(0, s);
      const Real sigma = std::sqrt(runs * p * (1.0 - p));
      CHECK(std::abs(counts[static_cast<std::size_t>(s)] - runs * p) <= 3.0 * sigma + 1.0);
    }
  }

  TEST_CASE("input validation") {
    const auto rates = build_rate_table(17.0, 1.0, 5.0);
    const auto init = LatticeConfig::constant(8, 0);
    CHECK_THROWS_AS((void)kmc_run(init, rates, -1.0, 1, {}), std::invalid_argument);
    CHECK_THROWS_AS((void)kmc_run(init, rates, 1.0, 1, {2.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)kmc_run(init, rates, 1.0, 1, {0.5, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS((void)kmc_run(LatticeConfig::constant(2, 0), rates, 1.0, 1, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)empirical_measure(init, -1), std::invalid_argument);
  }
}
