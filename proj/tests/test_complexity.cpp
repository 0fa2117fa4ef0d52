#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "infodim/complexity.hpp"
#include "test_helpers.hpp"

using namespace infodim;
using Catch::Matchers::WithinAbs;

namespace {

template <typename F>
double central_diff(F f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("lmc complexity vanishes at both extremes of order") {
  REQUIRE_THAT(c_lmc(ProbDist::uniform(4)), WithinAbs(0.0, 1e-15));
  REQUIRE_THAT(c_lmc(ProbDist::from_probabilities({1.0, 0.0, 0.0})),
               WithinAbs(0.0, 1e-15));
}

TEST_CASE("lmc complexity of a known three-cell distribution") {
  const ProbDist p = ProbDist::from_probabilities({0.2, 0.3, 0.5});
  const double u = 1.0 / 3.0;
  const double d = (0.2 - u) * (0.2 - u) + (0.3 - u) * (0.3 - u) + (0.5 - u) * (0.5 - u);
  const double h = testutil::naive_shannon(p.probs());
  REQUIRE_THAT(disequilibrium(p), WithinAbs(d, 1e-15));
  REQUIRE_THAT(c_lmc(p), WithinAbs(h * d, 1e-15));
  REQUIRE_THAT(c_lmc(p), WithinAbs(0.048051, 1e-6));
}

TEST_CASE("generalized complexity matches the diversity ratio") {
  std::mt19937_64 rng(20201);
  for (int rep = 0; rep < 100; ++rep) {
    const ProbDist p = testutil::random_dist(rng, 2 + rep % 9, 1e-4);
    for (OrderPair ab : {OrderPair{0.0, 2.0}, OrderPair{1.0, 2.0}, OrderPair{0.5, 10.0}}) {
      const double expected = std::exp(testutil::naive_renyi(p.probs(), ab.alpha) -
                                       testutil::naive_renyi(p.probs(), ab.beta));
      INFO("rep=" << rep << " alpha=" << ab.alpha << " beta=" << ab.beta);
      REQUIRE_THAT(generalized_complexity(p, ab), WithinAbs(expected, 1e-10 * expected));
    }
  }
}

TEST_CASE("generalized complexity is at least one when alpha is below beta") {
  std::mt19937_64 rng(20202);
  for (int rep = 0; rep < 100; ++rep) {
    const ProbDist p = testutil::random_dist(rng, 2 + rep % 9, 1e-4);
    REQUIRE(generalized_complexity(p, {0.0, 2.0}) >= 1.0 - 1e-12);
    REQUIRE(generalized_complexity(p, {1.0, 5.0}) >= 1.0 - 1e-12);
    REQUIRE_THAT(generalized_complexity(p, {2.0, 2.0}), WithinAbs(1.0, 1e-15));
  }
}

TEST_CASE("uniform distribution has unit complexity for every order pair") {
  const ProbDist u = ProbDist::uniform(6);
  for (double a : {0.0, 0.5, 1.0, 3.0})
    for (double b : {0.0, 1.0, 2.0, 8.0})
      REQUIRE_THAT(generalized_complexity(u, {a, b}), WithinAbs(1.0, 1e-12));
}

TEST_CASE("swapping the orders inverts the complexity") {
  std::mt19937_64 rng(20203);
  for (int rep = 0; rep < 100; ++rep) {
    const ProbDist p = testutil::random_dist(rng, 2 + rep % 9, 1e-4);
    const double a = 5.0 * testutil::unit(rng);
    const double b = 5.0 * testutil::unit(rng);
    const double prod =
        generalized_complexity(p, {a, b}) * generalized_complexity(p, {b, a});
    REQUIRE_THAT(prod, WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("exponential lmc complexity is the (1,2) member of the family") {
  std::mt19937_64 rng(20204);
  for (int rep = 0; rep < 50; ++rep) {
    const ProbDist p = testutil::random_dist(rng, 2 + rep % 9);
    REQUIRE(exponential_c_lmc(p) == generalized_complexity(p, {1.0, 2.0}));
    REQUIRE(exponential_c_lmc(p) >= 1.0 - 1e-12);
  }
}

TEST_CASE("relative complexity against uniform swaps the order pair") {
  std::mt19937_64 rng(20205);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rep % 9;
    const ProbDist p = testutil::random_dist(rng, n, 1e-4);
    const DistPair pair(p, ProbDist::uniform(n));
    const double a = -2.0 + 12.0 * testutil::unit(rng);
    const double b = -2.0 + 12.0 * testutil::unit(rng);
    const double lhs = generalized_relative_complexity(pair, {a, b});
    const double rhs = generalized_complexity(p, {b, a});
    INFO("rep=" << rep << " alpha=" << a << " beta=" << b);
    REQUIRE_THAT(lhs, WithinAbs(rhs, 1e-12 * std::max(1.0, rhs)));
  }
}

TEST_CASE("information difference is the log complexity between orders zero and one") {
  std::mt19937_64 rng(20206);
  for (int rep = 0; rep < 100; ++rep) {
    const ProbDist p = testutil::random_dist(rng, 2 + rep % 9, 1e-4);
    REQUIRE_THAT(std::log(generalized_complexity(p, {0.0, 1.0})),
                 WithinAbs(information_difference(p, 1.0), 1e-12));
  }
}

TEST_CASE("entropy increment matches the explicit chord slope") {
  std::mt19937_64 rng(20207);
  for (int rep = 0; rep < 50; ++rep) {
    const ProbDist p = testutil::random_dist(rng, 2 + rep % 9, 1e-4);
    const OrderPair ab{0.5, 3.0};
    const double expected = (testutil::naive_renyi(p.probs(), ab.alpha) -
                             testutil::naive_renyi(p.probs(), ab.beta)) /
                            (ab.alpha - ab.beta);
    REQUIRE_THAT(entropy_increment(p, ab), WithinAbs(expected, 1e-10));
  }
  REQUIRE_THROWS_AS(entropy_increment(ProbDist::uniform(3), {2.0, 2.0}), DomainError);
  REQUIRE_THROWS_AS(
      divergence_increment(DistPair(ProbDist::uniform(3), ProbDist::uniform(3)), {1.0, 1.0}),
      DomainError);
}

TEST_CASE("entropy derivative agrees with a central difference") {
  std::mt19937_64 rng(20208);
  for (int rep = 0; rep < 50; ++rep) {
    const ProbDist p = testutil::random_dist(rng, 2 + rep % 9, 0.01);
    auto h = [&](double q) { return renyi_entropy(p, q); };
    for (double q : {0.3, 0.999, 1.0, 1.001, 2.5, 5.0}) {
      INFO("rep=" << rep << " q=" << q);
      REQUIRE_THAT(entropy_derivative(p, q),
                   WithinAbs(central_diff(h, q, 1e-4), 1e-6));
    }
  }
}

TEST_CASE("entropy derivative is non-positive and equals minus half the log variance at one") {
  std::mt19937_64 rng(20209);
  for (int rep = 0; rep < 50; ++rep) {
    const ProbDist p = testutil::random_dist(rng, 2 + rep % 9, 1e-3);
    for (double q : {-1.0, 0.0, 0.5, 1.0, 2.0, 6.0}) REQUIRE(entropy_derivative(p, q) <= 1e-12);
    double mean = 0.0;
    for (double v : p.probs()) mean += v * std::log(v);
    double var = 0.0;
    for (double v : p.probs()) var += v * (std::log(v) - mean) * (std::log(v) - mean);
    REQUIRE_THAT(entropy_derivative(p, 1.0), WithinAbs(-var / 2.0, 1e-12));
  }
}

TEST_CASE("entropy derivative stays smooth across the series window seam") {
  std::mt19937_64 rng(20210);
  for (int rep = 0; rep < 20; ++rep) {
    const ProbDist p = testutil::random_dist(rng, 2 + rep % 9, 0.01);
    for (double side : {1.0, -1.0}) {
      const double inside = entropy_derivative(p, 1.0 + side * 0.999e-3);
      const double outside = entropy_derivative(p, 1.0 + side * 1.001e-3);
      REQUIRE_THAT(inside, WithinAbs(outside, 1e-6));
    }
  }
}

TEST_CASE("divergence derivative agrees with a central difference") {
  std::mt19937_64 rng(20211);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + rep % 9;
    const DistPair pair(testutil::random_dist(rng, n, 0.01),
                        testutil::random_dist(rng, n, 0.01));
    auto h = [&](double q) { return renyi_divergence(pair, q); };
    for (double q : {0.3, 0.999, 1.0, 1.001, 2.5, 5.0}) {
      INFO("rep=" << rep << " q=" << q);
      REQUIRE_THAT(divergence_derivative(pair, q),
                   WithinAbs(central_diff(h, q, 1e-4), 1e-6));
    }
  }
}

TEST_CASE("divergence derivative is non-negative") {
  std::mt19937_64 rng(20212);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + rep % 9;
    const DistPair pair(testutil::random_dist(rng, n, 1e-3),
                        testutil::random_dist(rng, n, 1e-3));
    for (double q : {-1.0, 0.0, 0.5, 1.0, 2.0, 6.0})
      REQUIRE(divergence_derivative(pair, q) >= -1e-12);
  }
}

TEST_CASE("increments converge to the derivatives as the gap closes") {
  std::mt19937_64 rng(20213);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + rep % 9;
    const ProbDist p = testutil::random_dist(rng, n, 0.01);
    const DistPair pair(p, testutil::random_dist(rng, n, 0.01));
    for (double q : {0.5, 1.0, 2.0}) {
      const double gap = 1e-5;
      REQUIRE_THAT(entropy_increment(p, {q - gap / 2.0, q + gap / 2.0}),
                   WithinAbs(entropy_derivative(p, q), 1e-4));
      REQUIRE_THAT(divergence_increment(pair, {q - gap / 2.0, q + gap / 2.0}),
                   WithinAbs(divergence_derivative(pair, q), 1e-4));
    }
  }
}

TEST_CASE("complexity map lays out rows by alpha and columns by beta") {
  const ProbDist p = ProbDist::from_probabilities({0.2, 0.3, 0.5});
  const std::vector<double> alphas = {0.0, 1.0, 2.0};
  const std::vector<double> betas = {0.5, 2.0};
  const ComplexityMap m = complexity_map(p, alphas, betas);
  REQUIRE(m.values.size() == 6);
  for (std::size_t i = 0; i < alphas.size(); ++i)
    for (std::size_t j = 0; j < betas.size(); ++j)
      REQUIRE_THAT(m.at(i, j),
                   WithinAbs(generalized_complexity(p, {alphas[i], betas[j]}), 1e-15));
}

TEST_CASE("complexity map marks undefined cells as missing") {
  const ProbDist p = ProbDist::from_probabilities({0.5, 0.5, 0.0});
  const ComplexityMap m = complexity_map(p, {0.0, 1.0}, {0.0, 2.0});
  REQUIRE(is_missing(m.at(0, 0)));  // alpha = 0 on a zero cell
  REQUIRE(is_missing(m.at(0, 1)));
  REQUIRE(is_missing(m.at(1, 0)));  // beta = 0 likewise
  REQUIRE_FALSE(is_missing(m.at(1, 1)));
}

TEST_CASE("relative complexity map matches pointwise evaluation") {
  const DistPair pair(ProbDist::from_probabilities({0.2, 0.3, 0.5}),
                      ProbDist::from_probabilities({0.25, 0.5, 0.25}));
  const ComplexityMap m = relative_complexity_map(pair, {0.5, 1.0}, {1.0, 4.0});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      REQUIRE_THAT(m.at(i, j),
                   WithinAbs(generalized_relative_complexity(
                                 pair, {m.alpha_grid[i], m.beta_grid[j]}),
                             1e-15));
}

TEST_CASE("default order grid spans 0 to 10 in tenths") {
  const auto g = default_order_grid();
  REQUIRE(g.size() == 101);
  REQUIRE_THAT(g.front(), WithinAbs(0.0, 0.0));
  REQUIRE_THAT(g.back(), WithinAbs(10.0, 1e-12));
}

TEST_CASE("order maps reject empty or non-finite grids") {
  const ProbDist p = ProbDist::uniform(3);
  REQUIRE_THROWS_AS(complexity_map(p, {}, {1.0}), DomainError);
  REQUIRE_THROWS_AS(complexity_map(p, {1.0}, {std::nan("")}), DomainError);
}
