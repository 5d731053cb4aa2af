#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <memory>
#include <numbers>

#include "lebrep/fractional.hpp"
#include "lebrep/reduce.hpp"
#include "oracles.hpp"

using namespace lebrep;

namespace {
GridPtr grid_of(double T, std::size_t n, double q) { return std::make_shared<const TimeGrid>(build_grid(T, n, q)); }
}  // namespace

TEST_SUITE("fractional") {
  TEST_CASE("weights are exact cell averages") {
    const auto g = grid_of(1.0, 256, 2.0);
    for (double alpha : {0.1, 0.25, 5.0 / 12.0, 0.49}) {
      const FractionalKernel k(g, alpha);
      for (std::size_t i : {1u, 2u, 17u, 128u, 255u, 256u}) {
        for (std::size_t j = 0; j < i; j += std::max<std::size_t>(1, i / 7)) {
          const double ref = oracle::kernel_cell_average(g->node(i), g->node(j), g->node(j + 1), alpha);
          REQUIRE(k.weight(i, j) == doctest::Approx(ref).epsilon(1e-12));
        }
      }
    }
  }

  TEST_CASE("adjacent cell variance is exact") {
    const auto g = grid_of(1.0, 512, 2.0);
    for (double alpha : {0.25, 5.0 / 12.0}) {
      const FractionalKernel k(g, alpha);
      for (std::size_t j : {0u, 100u, 511u}) {
        const double w = k.weight(j + 1, j), dt = g->step(j), b = k.residual_sd(j);
        const double exact = std::pow(dt, 1.0 - 2.0 * alpha) / (1.0 - 2.0 * alpha);
        CHECK(w * w * dt + b * b == doctest::Approx(exact).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("fast history agrees with the direct sum") {
    const auto g = grid_of(1.0, 2048, 2.0);
    const auto paths = generate_paths(g, 4, 43);
    const auto ev = evaluate_payoff(SigmaIntegral{SigmaKind::CosW}, paths);
    for (double alpha : {0.2, 5.0 / 12.0}) {
      const FractionalKernel k(g, alpha);
      CHECK(k.mode_count() > 0);
      const auto fast = riemann_liouville_process(ev.martingale, paths, k, false);
      const auto slow = riemann_liouville_process(ev.martingale, paths, k, true);
      double worst = 0.0, scale = 0.0;
      for (std::size_t p = 0; p < 4; ++p)
        for (std::size_t i = 0; i < 2048; ++i) {
          worst = std::max(worst, std::abs(fast(p, i) - slow(p, i)));
          scale = std::max(scale, std::abs(slow(p, i)));
        }
      CHECK(worst < 1e-6 * scale);
    }
  }

  TEST_CASE("R starts at zero and is adapted") {
    const auto g = grid_of(1.0, 128, 2.0);
    const auto paths = generate_paths(g, 1, 47);
    Matrix bumped = paths.increment_matrix();
    for (std::size_t i = 60; i < 128; ++i) bumped(0, i) -= 0.2;
    const PathBundle other(g, bumped, paths.seed());
    const FractionalKernel k(g, 0.3);
    const auto a = riemann_liouville_process(evaluate_payoff(SigmaIntegral{SigmaKind::CosW}, paths).martingale, paths, k);
    const auto b = riemann_liouville_process(evaluate_payoff(SigmaIntegral{SigmaKind::CosW}, other).martingale, other, k);
    CHECK(a(0, 0) == 0.0);
    for (std::size_t i = 0; i <= 60; ++i) REQUIRE(a(0, i) == b(0, i));
  }

  TEST_CASE("variance of R for constant sigma") {
    const double alpha = 0.25;
    const auto g = grid_of(1.0, 1024, 2.0);
    const FractionalKernel k(g, alpha);
    const auto paths = generate_paths(g, 20000, 53);
    const auto ev = evaluate_payoff(SigmaIntegral{}, paths);
    const auto r = riemann_liouville_process(ev.martingale, paths, k);
    for (double t : {0.25, 0.5, 0.9}) {
      const std::size_t i = g->nearest_node(t);
      std::vector<double> col(paths.n_paths());
      for (std::size_t p = 0; p < col.size(); ++p) col[p] = r(p, i);
      const double exact = std::pow(g->node(i), 1.0 - 2.0 * alpha) / (1.0 - 2.0 * alpha);
      const double sd = exact * std::sqrt(2.0 / (col.size() - 1.0));
      CHECK(std::abs(sample_variance(col) - exact) < 4.0 * sd);
    }
  }

  TEST_CASE("rate factor and integration back to xi") {
    const FractionalKernel k(grid_of(1.0, 64, 2.0), 0.25);
    CHECK(k.rate_factor(0) == doctest::Approx(std::sin(0.25 * std::numbers::pi) / std::numbers::pi));
    std::vector<double> rel;
    for (std::size_t n : {2048u, 4096u, 8192u}) {
      const auto g = grid_of(1.0, n, 2.0);
      const auto paths = generate_paths(g, 400, 59);
      const auto ev = evaluate_payoff(SigmaIntegral{}, paths);
      const auto xi = integrate_rate(fractional_rate(ev.martingale, 0.25, paths));
      double err = 0.0, norm = 0.0;
      for (std::size_t p = 0; p < xi.size(); ++p) {
        err += (xi[p] - ev.terminal[p]) * (xi[p] - ev.terminal[p]);
        norm += ev.terminal[p] * ev.terminal[p];
      }
      rel.push_back(std::sqrt(err / norm));
    }
    CHECK(rel[0] < 0.05);
    CHECK(rel[1] < rel[0]);
    CHECK(rel[2] < rel[1]);
  }

  TEST_CASE("alpha range") {
    CHECK_THROWS_AS(check_fractional_alpha(0.0), std::invalid_argument);
    CHECK_THROWS_AS(check_fractional_alpha(0.5), std::invalid_argument);
    CHECK_THROWS_AS(check_fractional_alpha(-0.1), std::invalid_argument);
    CHECK_NOTHROW(check_fractional_alpha(0.499));
    CHECK_THROWS_AS(FractionalKernel(grid_of(1.0, 8, 1.0), 0.75), std::invalid_argument);
  }
}
