#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <memory>

#include "lebrep/payoff.hpp"
#include "lebrep/rates.hpp"
#include "lebrep/reduce.hpp"

using namespace lebrep;

namespace {
GridPtr grid_of(double T, std::size_t n, double q) { return std::make_shared<const TimeGrid>(build_grid(T, n, q)); }

MartingalePath constant_martingale(const GridPtr& g, std::size_t n_paths, double c) {
  MartingalePath m;
  m.grid = g;
  m.values = Matrix(n_paths, g->intervals() + 1, c);
  m.integrand = Matrix(n_paths, g->intervals());
  m.qv_increments = Matrix(n_paths, g->intervals());
  return m;
}
}  // namespace

TEST_SUITE("rates") {
  TEST_CASE("canonical rate of the time average is W") {
    const auto g = grid_of(1.0, 512, 2.0);
    const auto paths = generate_paths(g, 5, 3);
    const auto ev = evaluate_payoff(TimeAverage{}, paths);
    const auto beta = canonical_rate(ev.martingale, paths);
    for (std::size_t p = 0; p < 5; ++p)
      for (std::size_t i = 0; i < 512; ++i)
        REQUIRE(beta.values(p, i) == doctest::Approx(paths.values(p)[i]).epsilon(1e-12).scale(1.0));
  }

  TEST_CASE("canonical rate of W_T at T/2 has variance about one") {
    // beta_t = int_0^t dW/(T-u): variance 1/(T-t) - 1/T = 1 at t = T/2
    const auto g = grid_of(1.0, 256, 1.0);
    const auto paths = generate_paths(g, 20000, 29);
    const auto ev = evaluate_payoff(TerminalFunction{TerminalG::Identity}, paths);
    const auto beta = canonical_rate(ev.martingale, paths);
    std::vector<double> mid(paths.n_paths());
    for (std::size_t p = 0; p < mid.size(); ++p) mid[p] = beta.values(p, 128);
    CHECK(sample_variance(mid) == doctest::Approx(1.0).epsilon(0.05));
  }

  TEST_CASE("constant terminal gives c/T in every form") {
    const double c = 3.0, T = 2.0;
    const auto g = grid_of(T, 1024, 2.0);
    const auto paths = PathBundle(g, Matrix(2, 1024), 1);
    const auto m = constant_martingale(g, 2, c);
    const auto a = canonical_rate(m, paths);
    const auto b = lebesgue_form_rate(m);
    const auto v = volterra_rate(m);
    for (std::size_t i = 0; i < 1024; ++i) {
      CHECK(a.values(0, i) == doctest::Approx(c / T).epsilon(1e-15));
      CHECK(v.values(0, i) == doctest::Approx(c / T).epsilon(1e-12));
    }
    // left-point drift sum: only approximately c/T away from the start
    CHECK(b.values(0, 0) == doctest::Approx(c / T));
    CHECK(b.values(0, 512) == doctest::Approx(c / T).epsilon(0.01));
  }

  TEST_CASE("zero martingale gives zero rate") {
    const auto g = grid_of(1.0, 64, 2.0);
    const auto m = constant_martingale(g, 1, 0.0);
    for (const auto& beta : {canonical_rate(m, PathBundle(g, Matrix(1, 64), 1)), lebesgue_form_rate(m), volterra_rate(m)})
      for (double b : beta.path(0)) CHECK(b == 0.0);
  }

  TEST_CASE("volterra rate solves the discrete equation") {
    const auto g = grid_of(1.0, 256, 2.0);
    const auto paths = generate_paths(g, 3, 31);
    const auto ev = evaluate_payoff(SigmaIntegral{SigmaKind::CosW}, paths);
    const auto beta = volterra_rate(ev.martingale);
    for (std::size_t p = 0; p < 3; ++p) {
      double integrated = 0.0;
      for (std::size_t i = 0; i < 256; ++i) {
        REQUIRE(beta.values(p, i) * g->remaining(i) + integrated ==
                doctest::Approx(ev.martingale.values(p, i)).scale(1.0));
        integrated += beta.values(p, i) * g->step(i);
      }
    }
  }

  TEST_CASE("rates are adapted") {
    const auto g = grid_of(1.0, 128, 2.0);
    const auto paths = generate_paths(g, 1, 37);
    Matrix bumped = paths.increment_matrix();
    const std::size_t cut = 70;
    for (std::size_t i = cut; i < 128; ++i) bumped(0, i) += 0.3;
    const PathBundle other(g, bumped, paths.seed());
    for (const PayoffSpec& spec : {PayoffSpec{TimeAverage{}}, PayoffSpec{SigmaIntegral{SigmaKind::CosW}},
                                   PayoffSpec{TerminalFunction{TerminalG::SquareMinusT}}}) {
      const auto a = evaluate_payoff(spec, paths);
      const auto b = evaluate_payoff(spec, other);
      const auto ca = canonical_rate(a.martingale, paths), cb = canonical_rate(b.martingale, other);
      const auto la = lebesgue_form_rate(a.martingale), lb = lebesgue_form_rate(b.martingale);
      const auto va = volterra_rate(a.martingale), vb = volterra_rate(b.martingale);
      for (std::size_t i = 0; i <= cut; ++i) {
        REQUIRE(ca.values(0, i) == cb.values(0, i));
        REQUIRE(la.values(0, i) == lb.values(0, i));
        REQUIRE(va.values(0, i) == vb.values(0, i));
      }
      CHECK(ca.values(0, cut + 1) != cb.values(0, cut + 1));
    }
  }

  TEST_CASE("integrated rate reproduces xi") {
    const auto g = grid_of(1.0, 4096, 2.0);
    const auto paths = generate_paths(g, 200, 41);
    const auto ev = evaluate_payoff(TimeAverage{}, paths);
    const auto beta = canonical_rate(ev.martingale, paths);
    const auto xi = integrate_rate(beta);
    double err = 0.0, norm = 0.0;
    for (std::size_t p = 0; p < 200; ++p) {
      err += (xi[p] - ev.terminal[p]) * (xi[p] - ev.terminal[p]);
      norm += ev.terminal[p] * ev.terminal[p];
    }
    CHECK(std::sqrt(err / norm) < 1e-3);
  }

  TEST_CASE("alpha for p") {
    CHECK(alpha_for_p(1.5) == doctest::Approx(5.0 / 12.0).epsilon(1e-15));
    CHECK(alpha_for_p(1.2) == doctest::Approx(0.75 - 0.5 / 1.2));
    CHECK_THROWS_AS(alpha_for_p(1.0), std::invalid_argument);
    CHECK_THROWS_AS(alpha_for_p(2.0), std::invalid_argument);
    CHECK_THROWS_AS(alpha_for_p(std::nan("")), std::invalid_argument);
  }
}
