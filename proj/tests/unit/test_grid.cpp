#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "lebrep/grid.hpp"
#include "oracles.hpp"

using namespace lebrep;

TEST_SUITE("grid") {
  TEST_CASE("uniform and graded nodes") {
    const auto u = build_grid(1.0, 4, 1.0);
    const double expect_u[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (int i = 0; i <= 4; ++i) CHECK(u.node(i) == expect_u[i]);

    // 1 - (1 - i/4)^2 by hand
    const auto g = build_grid(1.0, 4, 2.0);
    const double expect_g[] = {0.0, 0.4375, 0.75, 0.9375, 1.0};
    for (int i = 0; i <= 4; ++i) CHECK(g.node(i) == expect_g[i]);

    const auto two = build_grid(2.0, 2, 1.0);
    CHECK(two.node(0) == 0.0);
    CHECK(two.node(1) == 1.0);
    CHECK(two.node(2) == 2.0);
  }

  TEST_CASE("matches a long double evaluation") {
    for (double q : {1.0, 1.5, 2.0, 3.0}) {
      const auto g = build_grid(1.7, 1000, q);
      const auto ref = oracle::graded_nodes(1.7, 1000, q);
      for (int i = 0; i <= 1000; ++i) CHECK(g.node(i) == doctest::Approx(ref[i]).epsilon(1e-15));
    }
  }

  TEST_CASE("invariants") {
    const auto g = build_grid(1.0, 1 << 14, 2.0);
    CHECK(g.node(0) == 0.0);
    CHECK(g.node(g.intervals()) == 1.0);
    for (std::size_t i = 0; i < g.intervals(); ++i) {
      REQUIRE(g.node(i) < g.node(i + 1));
      REQUIRE(g.step(i) > 0.0);
    }
    CHECK(g.node(g.intervals() - 1) < g.horizon());
    // spacing shrinks toward T
    CHECK(g.step(0) > g.step(g.intervals() / 2));
    CHECK(g.step(g.intervals() / 2) > g.step(g.intervals() - 1));
  }

  TEST_CASE("rejects bad parameters") {
    CHECK_THROWS_AS(build_grid(1.0, 1, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(0.0, 4, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(-1.0, 4, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(1.0, 4, 0.5), std::invalid_argument);
  }

  TEST_CASE("coarsening nests bitwise") {
    for (double q : {1.0, 2.0}) {
      const auto fine = build_grid(1.0, 2048, q);
      const auto coarse = fine.coarsened();
      const auto direct = build_grid(1.0, 1024, q);
      REQUIRE(coarse.intervals() == 1024);
      for (std::size_t i = 0; i <= 1024; ++i) {
        CHECK(coarse.node(i) == direct.node(i));
        CHECK(coarse.node(i) == fine.node(2 * i));
      }
    }
    CHECK_THROWS(build_grid(1.0, 5, 1.0).coarsened());
  }

  TEST_CASE("node lookup") {
    const auto g = build_grid(1.0, 4, 1.0);
    CHECK(g.nearest_node(0.3) == 1);
    CHECK(g.nearest_node(0.375) == 1);  // tie goes low
    CHECK(g.nearest_node(0.9) == 4);
    CHECK(g.last_node_at_or_before(0.5) == 2);
    CHECK(g.last_node_at_or_before(0.49) == 1);
    CHECK(g.remaining(1) == 0.75);
  }
}
