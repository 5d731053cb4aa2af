#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "lebrep/resolvent.hpp"
#include "oracles.hpp"

using namespace lebrep;

namespace {
std::vector<double> uniform_nodes(std::size_t count, double denom) {
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i) t[i] = static_cast<double>(i) / denom;
  return t;
}
}  // namespace

TEST_SUITE("resolvent") {
  TEST_CASE("first terms") {
    const ResolventTable r(1.0, uniform_nodes(16, 20.0), 4);
    for (std::size_t a = 0; a < 16; ++a) {
      CHECK(r.closed_form(0, a, 0) == doctest::Approx(-1.0 / (1.0 - r.nodes()[a])));
      for (int i = 1; i <= 4; ++i) CHECK(r.closed_form(i, a, a) == 0.0);
      if (a + 1 < 16) CHECK(r.closed_form(2, a, a + 1) == 0.0);
    }
  }

  TEST_CASE("closed form against the reference series") {
    const double T = 2.0;
    const ResolventTable r(T, uniform_nodes(30, 16.0), 10);
    for (std::size_t a = 0; a < 30; ++a)
      for (std::size_t b = 0; b <= a; ++b) {
        double sum = 0.0;
        for (int i = 0; i <= 10; ++i) {
          const double term = oracle::resolvent_term(T, r.nodes()[a], r.nodes()[b], i);
          // the reference term carries (-1)^i through its logarithm
          REQUIRE(r.closed_form(i, a, b) == doctest::Approx(-term).epsilon(1e-12).scale(1e-14));
          sum += term;
          REQUIRE(r.partial_sum(i, a, b) == doctest::Approx(sum).epsilon(1e-12));
        }
      }
  }

  TEST_CASE("example pair converges to 1/(T-s)") {
    const ResolventTable r(1.0, uniform_nodes(64, 84.0), 10);
    const std::size_t a = 63, b = 21;  // 0.75, 0.25
    CHECK(r.nodes()[a] == 0.75);
    CHECK(r.nodes()[b] == 0.25);
    CHECK(std::abs(r.partial_sum(10, a, b) - 4.0 / 3.0) <= 1e-3);
    CHECK(r.max_sum_error(10) <= 1e-3);
  }

  TEST_CASE("remainder bound holds on every pair") {
    const ResolventTable r(1.0, uniform_nodes(64, 84.0), 10);
    for (int m = 0; m <= 10; ++m)
      for (std::size_t a = 0; a < 64; ++a)
        for (std::size_t b = 0; b <= a; ++b) {
          const double err = std::abs(r.partial_sum(m, a, b) - 1.0 / (1.0 - r.nodes()[b]));
          REQUIRE(err <= r.remainder_bound(m, a, b) + 1e-13);
        }
  }

  TEST_CASE("numerical compositions match") {
    const ResolventTable r(1.0, uniform_nodes(64, 84.0), 6);
    for (int i = 0; i <= 4; ++i) CHECK(r.max_composition_error(i) < 1e-4);
    CHECK(r.numerical(0, 10, 3) == r.closed_form(0, 10, 3));
  }

  TEST_CASE("grid table and rejections") {
    const auto g = build_grid(1.0, 84, 1.0);
    const auto r = resolvent_table(g, 3);
    CHECK(r.size() == 64);
    CHECK(r.nodes()[63] == g.node(63));
    const auto small = resolvent_table(build_grid(1.0, 8, 2.0), 3);
    CHECK(small.size() == 8);  // never reaches T
    CHECK_THROWS_AS(ResolventTable(1.0, {0.0, 0.5, 1.0}, 3), std::invalid_argument);
    CHECK_THROWS_AS(ResolventTable(1.0, {0.0, 0.5, 0.5}, 3), std::invalid_argument);
  }
}
