#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "infodim/multifractal.hpp"
#include "test_helpers.hpp"

using namespace infodim;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<PartitionDistribution> cascade_ladder(const CascadeSpec& spec, int from,
                                                  int to) {
  std::vector<PartitionDistribution> pds;
  for (int level = from; level <= to; ++level)
    pds.push_back(cascade_partition(spec, level));
  return pds;
}

// Closed-form relative dimension of two cascades over the same branching:
// ln(sum_b w1^q w2^(1-q)) / ((q-1) ln B), KL-based at q = 1.
double relative_cascade_dimension(const ProbDist& w1, const ProbDist& w2, double q) {
  const double log_b = std::log(double(w1.size()));
  if (std::abs(q - 1.0) < 1e-12) {
    double kl = 0.0;
    for (std::size_t i = 0; i < w1.size(); ++i) kl += w1[i] * std::log(w1[i] / w2[i]);
    return kl / log_b;
  }
  double g = 0.0;
  for (std::size_t i = 0; i < w1.size(); ++i)
    g += std::pow(w1[i], q) * std::pow(w2[i], 1.0 - q);
  return std::log(g) / ((q - 1.0) * log_b);
}

}  // namespace

TEST_CASE("partition statistic is minus the entropy of the box masses") {
  const PartitionDistribution pd(0.25, ProbDist::from_probabilities({0.3, 0.7}));
  REQUIRE_THAT(partition_sum_log(pd, 2.0), WithinAbs(std::log(0.58), 1e-12));
  REQUIRE_THAT(partition_sum_log(pd, 1.0),
               WithinAbs(0.3 * std::log(0.3) + 0.7 * std::log(0.7), 1e-12));
  REQUIRE_THAT(partition_sum_log(pd, 0.0), WithinAbs(-std::log(2.0), 1e-12));
}

TEST_CASE("partition construction validates scale, boxes and masses") {
  const ProbDist m = ProbDist::from_probabilities({0.5, 0.5});
  REQUIRE_THROWS_AS(PartitionDistribution(0.0, m), DomainError);
  REQUIRE_THROWS_AS(PartitionDistribution(-1.0, m), DomainError);
  REQUIRE_THROWS_AS(PartitionDistribution(0.5, {3, 3}, m), DomainError);
  REQUIRE_THROWS_AS(PartitionDistribution(0.5, {5, 2}, m), DomainError);
  REQUIRE_THROWS_AS(PartitionDistribution(0.5, {1, 2, 3}, m), MismatchError);
  REQUIRE_THROWS_AS(
      PartitionDistribution(0.5, ProbDist::from_probabilities({0.0, 1.0})), DomainError);
  const PartitionDistribution pd(0.5, m);
  REQUIRE(pd.boxes() == std::vector<std::int64_t>{0, 1});
}

TEST_CASE("relative partition statistic on aligned boxes") {
  const PartitionDistribution a(0.5, ProbDist::from_probabilities({0.3, 0.7}));
  const PartitionDistribution b(0.5, ProbDist::from_probabilities({0.4, 0.6}));
  const double g = 0.09 / 0.4 + 0.49 / 0.6;
  REQUIRE_THAT(relative_partition_sum_log(a, b, 2.0), WithinAbs(std::log(g), 1e-12));
  const double kl = 0.3 * std::log(0.3 / 0.4) + 0.7 * std::log(0.7 / 0.6);
  REQUIRE_THAT(relative_partition_sum_log(a, b, 1.0), WithinAbs(kl, 1e-12));
}

TEST_CASE("relative partition statistic honours box alignment rules") {
  const PartitionDistribution a(0.5, {0, 2}, ProbDist::from_probabilities({0.3, 0.7}));
  const PartitionDistribution b(0.5, {0, 1, 2},
                                ProbDist::from_probabilities({0.4, 0.2, 0.4}));
  // every box of a is covered by b; the extra b box only matters for q <= 0
  REQUIRE_NOTHROW(relative_partition_sum_log(a, b, 2.0));
  REQUIRE_THROWS_AS(relative_partition_sum_log(a, b, 0.0), DegenerateSupportError);
  REQUIRE_THROWS_AS(relative_partition_sum_log(b, a, 2.0), AbsoluteContinuityError);
  const PartitionDistribution c(0.25, ProbDist::from_probabilities({0.5, 0.5}));
  REQUIRE_THROWS_AS(relative_partition_sum_log(a, c, 2.0), MismatchError);
}

TEST_CASE("least squares recovers an exact line with unit fit quality") {
  const std::vector<double> x = {0.0, -0.5, -1.3, -2.0};
  std::vector<double> y;
  for (double xi : x) y.push_back(2.5 * xi + 1.0);
  const FitResult f = fit_dimension(ScaleSeries(x, y));
  REQUIRE_THAT(f.slope, WithinAbs(2.5, 1e-12));
  REQUIRE_THAT(f.intercept, WithinAbs(1.0, 1e-12));
  REQUIRE_THAT(f.r_squared, WithinAbs(1.0, 1e-12));
}

TEST_CASE("least squares on a constant statistic reports a perfect flat fit") {
  const FitResult f =
      fit_dimension(ScaleSeries({-0.1, -0.7, -1.9}, {4.0, 4.0, 4.0}));
  REQUIRE_THAT(f.slope, WithinAbs(0.0, 1e-15));
  REQUIRE_THAT(f.r_squared, WithinAbs(1.0, 1e-15));
}

TEST_CASE("scale series validates its shape") {
  REQUIRE_THROWS_AS(ScaleSeries({-1.0}, {1.0}), DomainError);
  REQUIRE_THROWS_AS(ScaleSeries({-1.0, -1.0}, {1.0, 2.0}), DomainError);
  REQUIRE_THROWS_AS(ScaleSeries({-2.0, -1.0}, {1.0, 2.0}), DomainError);
  REQUIRE_THROWS_AS(ScaleSeries({-1.0, -2.0}, {1.0}), MismatchError);
  REQUIRE_THROWS_AS(ScaleSeries({-1.0, -2.0}, {1.0, std::nan("")}), NumericError);
}

TEST_CASE("cascade partitions carry exact product masses") {
  const CascadeSpec spec(ProbDist::from_probabilities({0.3, 0.7}), 10);
  const PartitionDistribution pd = cascade_partition(spec, 3);
  REQUIRE(pd.box_count() == 8);
  REQUIRE_THAT(pd.epsilon(), WithinAbs(0.125, 0.0));
  REQUIRE_THAT(pd.masses()[0], WithinAbs(0.3 * 0.3 * 0.3, 1e-15));
  REQUIRE_THAT(pd.masses()[7], WithinAbs(0.7 * 0.7 * 0.7, 1e-15));
  REQUIRE_THROWS_AS(cascade_partition(spec, 0), DomainError);
  REQUIRE_THROWS_AS(cascade_partition(spec, 11), DomainError);
}

TEST_CASE("cascade spec validates weights and depth") {
  REQUIRE_THROWS_AS(CascadeSpec(ProbDist::uniform(1), 3), DomainError);
  REQUIRE_THROWS_AS(CascadeSpec(ProbDist::from_probabilities({1.0, 0.0}), 3),
                    DomainError);
  REQUIRE_THROWS_AS(CascadeSpec(ProbDist::uniform(2), 0), DomainError);
  REQUIRE_THROWS_AS(CascadeSpec(ProbDist::uniform(2), 40), DomainError);
}

TEST_CASE("estimated cascade dimensions match the closed form exactly") {
  for (const std::vector<double>& w :
       {std::vector<double>{0.3, 0.7}, std::vector<double>{0.25, 0.75}}) {
    const CascadeSpec spec(ProbDist::from_probabilities(w), 8);
    const auto pds = cascade_ladder(spec, 3, 8);
    const std::vector<double> grid = {-3.0, -1.0, 0.0, 0.5, 1.0, 2.0, 5.0};
    const DimensionCurve curve = generalized_dimensions(pds, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      INFO("w0=" << w[0] << " q=" << grid[k]);
      REQUIRE_THAT(curve.values[k],
                   WithinAbs(cascade_dimension_closed_form(spec, grid[k]), 1e-9));
      REQUIRE_THAT(curve.r_squared[k], WithinAbs(1.0, 1e-9));
    }
    for (std::size_t k = 1; k < grid.size(); ++k)
      REQUIRE(curve.values[k] <= curve.values[k - 1] + 1e-12);
  }
}

TEST_CASE("balanced cascade fills the interval with dimension one at every order") {
  const CascadeSpec spec(ProbDist::uniform(2), 12);
  const auto pds = cascade_ladder(spec, 1, 12);
  const DimensionCurve curve =
      generalized_dimensions(pds, {-5.0, -1.0, 0.0, 1.0, 2.0, 7.0});
  for (std::size_t k = 0; k < curve.values.size(); ++k) {
    REQUIRE_THAT(curve.values[k], WithinAbs(1.0, 1e-10));
    REQUIRE_THAT(curve.r_squared[k], WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("three-branch cascade reproduces its spectrum") {
  const CascadeSpec spec(ProbDist::from_probabilities({0.2, 0.3, 0.5}), 6);
  const auto pds = cascade_ladder(spec, 2, 6);
  const std::vector<double> grid = {0.0, 1.0, 2.0, 4.0};
  const DimensionCurve curve = generalized_dimensions(pds, grid);
  for (std::size_t k = 0; k < grid.size(); ++k)
    REQUIRE_THAT(curve.values[k],
                 WithinAbs(cascade_dimension_closed_form(spec, grid[k]), 1e-9));
  REQUIRE_THAT(cascade_dimension_closed_form(spec, 0.0), WithinAbs(1.0, 1e-15));
}

TEST_CASE("estimator rejects malformed inputs") {
  const CascadeSpec spec(ProbDist::from_probabilities({0.3, 0.7}), 6);
  const auto pds = cascade_ladder(spec, 2, 6);
  REQUIRE_THROWS_AS(generalized_dimensions({pds[0], pds[1]}, {1.0}), DomainError);
  REQUIRE_THROWS_AS(generalized_dimensions(pds, {}), DomainError);
  REQUIRE_THROWS_AS(generalized_dimensions(pds, {2.0, 1.0}), DomainError);
  auto dup = pds;
  dup.push_back(pds.back());
  REQUIRE_THROWS_AS(generalized_dimensions(dup, {1.0}), DomainError);
}

TEST_CASE("monotonicity enforcement flags curves that rise with the order") {
  // coarse scale concentrated, fine scales uniform: the fitted curve rises
  const std::vector<PartitionDistribution> pds = {
      PartitionDistribution(0.5, ProbDist::from_weights({1.0 - 1e-9, 1e-9})),
      PartitionDistribution(0.25, ProbDist::uniform(4)),
      PartitionDistribution(0.125, ProbDist::uniform(8)),
  };
  const std::vector<double> grid = {0.0, 5.0};
  DimensionFitOptions lenient;
  lenient.enforce_monotone = false;
  const DimensionCurve curve = generalized_dimensions(pds, grid, lenient);
  REQUIRE(curve.values[1] > curve.values[0] + 0.1);
  REQUIRE_THROWS_AS(generalized_dimensions(pds, grid), NumericError);
}

TEST_CASE("relative dimensions of two cascades match the closed form") {
  const ProbDist w1 = ProbDist::from_probabilities({0.3, 0.7});
  const ProbDist w2 = ProbDist::from_probabilities({0.4, 0.6});
  const auto pds1 = cascade_ladder(CascadeSpec(w1, 10), 3, 10);
  const auto pds2 = cascade_ladder(CascadeSpec(w2, 10), 3, 10);
  const std::vector<double> grid = {-2.0, 0.0, 0.5, 1.0, 2.0, 3.0};
  const DimensionCurve curve = generalized_relative_dimensions(pds1, pds2, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    INFO("q=" << grid[k]);
    REQUIRE_THAT(curve.values[k],
                 WithinAbs(relative_cascade_dimension(w1, w2, grid[k]), 1e-9));
    REQUIRE_THAT(curve.r_squared[k], WithinAbs(1.0, 1e-9));
  }
  for (std::size_t k = 1; k < grid.size(); ++k)
    REQUIRE(curve.values[k] >= curve.values[k - 1] - 1e-12);
  // the spot values quoted for this pair
  const DimensionCurve spot = generalized_relative_dimensions(pds1, pds2, {1.0, 2.0});
  REQUIRE_THAT(spot.values[1], WithinAbs(0.058894, 1e-6));
  REQUIRE_THAT(spot.values[0], WithinAbs(0.031164, 1e-6));
}

TEST_CASE("relative dimension of a measure against itself vanishes") {
  const CascadeSpec spec(ProbDist::from_probabilities({0.3, 0.7}), 9);
  const auto pds = cascade_ladder(spec, 3, 9);
  const DimensionCurve curve =
      generalized_relative_dimensions(pds, pds, {-3.0, 0.0, 1.0, 2.0, 6.0});
  for (double v : curve.values) REQUIRE_THAT(v, WithinAbs(0.0, 1e-12));
}

TEST_CASE("relative estimator demands matching scale ladders") {
  const auto pds1 = cascade_ladder(CascadeSpec(ProbDist::from_probabilities({0.3, 0.7}), 6), 2, 6);
  auto pds2 = cascade_ladder(CascadeSpec(ProbDist::from_probabilities({0.4, 0.6}), 6), 2, 6);
  pds2.pop_back();
  REQUIRE_THROWS_AS(generalized_relative_dimensions(pds1, pds2, {1.0}), MismatchError);
  const auto pds3 = cascade_ladder(CascadeSpec(ProbDist::from_probabilities({0.4, 0.6}), 6), 1, 5);
  REQUIRE_THROWS_AS(generalized_relative_dimensions(pds1, pds3, {1.0}), MismatchError);
}

TEST_CASE("symmetrized relative dimensions average the directions") {
  const auto pds1 = cascade_ladder(CascadeSpec(ProbDist::from_probabilities({0.3, 0.7}), 8), 3, 8);
  const auto pds2 = cascade_ladder(CascadeSpec(ProbDist::from_probabilities({0.4, 0.6}), 8), 3, 8);
  const std::vector<double> grid = {0.5, 1.0, 2.0};
  const DimensionCurve ab = generalized_relative_dimensions(pds1, pds2, grid);
  const DimensionCurve ba = generalized_relative_dimensions(pds2, pds1, grid);
  const DimensionCurve sym = symmetrized_relative_dimensions(ab, ba);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    REQUIRE_THAT(sym.values[k], WithinAbs(0.5 * (ab.values[k] + ba.values[k]), 1e-15));
    REQUIRE(sym.r_squared[k] <= ab.r_squared[k] + 1e-15);
    REQUIRE(sym.r_squared[k] <= ba.r_squared[k] + 1e-15);
  }
  DimensionCurve other = ba;
  other.q_grid[0] += 0.1;
  REQUIRE_THROWS_AS(symmetrized_relative_dimensions(ab, other), MismatchError);
}

TEST_CASE("curve derivative is exact for quadratics") {
  DimensionCurve c;
  for (double q = -1.0; q <= 1.0 + 1e-9; q += 0.25) {
    c.q_grid.push_back(q);
    c.values.push_back(q * q);
    c.r_squared.push_back(1.0);
  }
  const DimensionCurve d = dimension_derivative(c);
  for (std::size_t k = 0; k < c.q_grid.size(); ++k)
    REQUIRE_THAT(d.values[k], WithinAbs(2.0 * c.q_grid[k], 1e-12));
  REQUIRE(d.r_squared == c.r_squared);
}

TEST_CASE("curve derivative of the estimated cascade spectrum is close to analytic") {
  const CascadeSpec spec(ProbDist::from_probabilities({0.3, 0.7}), 10);
  const auto pds = cascade_ladder(spec, 3, 10);
  std::vector<double> grid;
  for (double q = 1.8; q <= 2.2 + 1e-9; q += 0.05) grid.push_back(q);
  const DimensionCurve curve = generalized_dimensions(pds, grid);
  const DimensionCurve deriv = dimension_derivative(curve);
  const std::size_t mid = grid.size() / 2;
  REQUIRE_THAT(grid[mid], WithinAbs(2.0, 1e-9));
  REQUIRE_THAT(deriv.values[mid], WithinAbs(-0.081621, 1e-4));
}

TEST_CASE("curve derivative needs a uniform grid of at least three points") {
  DimensionCurve c;
  c.q_grid = {0.0, 1.0};
  c.values = {1.0, 2.0};
  c.r_squared = {1.0, 1.0};
  REQUIRE_THROWS_AS(dimension_derivative(c), DomainError);
  c.q_grid = {0.0, 1.0, 3.0};
  c.values = {1.0, 2.0, 3.0};
  c.r_squared = {1.0, 1.0, 1.0};
  REQUIRE_THROWS_AS(dimension_derivative(c), DomainError);
}

TEST_CASE("increment map interpolates dimension differences") {
  DimensionCurve c;
  for (double q = 0.0; q <= 5.0 + 1e-9; q += 0.5) {
    c.q_grid.push_back(q);
    c.values.push_back(2.0 - 0.1 * q);
    c.r_squared.push_back(1.0);
  }
  const ComplexityMap diff = dimension_increment_map(c, {1.3}, {2.7});
  REQUIRE_THAT(diff.at(0, 0), WithinAbs(-0.14, 1e-12));
  const ComplexityMap rate =
      dimension_increment_map(c, {1.3, 2.2}, {2.7, 2.2}, IncrementMode::Rate);
  REQUIRE_THAT(rate.at(0, 0), WithinAbs(-0.1, 1e-12));
  REQUIRE_THAT(rate.at(1, 1), WithinAbs(-0.1, 1e-12));  // diagonal: the derivative
  const ComplexityMap oob = dimension_increment_map(c, {-1.0, 2.0}, {2.0, 6.0});
  REQUIRE(is_missing(oob.at(0, 0)));
  REQUIRE(is_missing(oob.at(1, 1)));
  REQUIRE_FALSE(is_missing(oob.at(1, 0)));
  REQUIRE_THAT(oob.at(1, 0), WithinAbs(0.0, 1e-15));
}

TEST_CASE("complexity scaling exponent equals the dimension increment on cascades") {
  const CascadeSpec spec(ProbDist::from_probabilities({0.3, 0.7}), 9);
  const auto pds = cascade_ladder(spec, 3, 9);
  const ScalingLinkCheck link = complexity_scaling_link(pds, {1.0, 2.0});
  REQUIRE_THAT(link.fitted_exponent, WithinAbs(link.dimension_increment, 1e-10));
  const double expected = cascade_dimension_closed_form(spec, 2.0) -
                          cascade_dimension_closed_form(spec, 1.0);
  REQUIRE_THAT(link.fitted_exponent, WithinAbs(expected, 1e-9));
}

TEST_CASE("relative complexity scaling exponent matches the relative increment") {
  const ProbDist w1 = ProbDist::from_probabilities({0.3, 0.7});
  const ProbDist w2 = ProbDist::from_probabilities({0.4, 0.6});
  const auto pds1 = cascade_ladder(CascadeSpec(w1, 9), 3, 9);
  const auto pds2 = cascade_ladder(CascadeSpec(w2, 9), 3, 9);
  const ScalingLinkCheck link = relative_complexity_scaling_link(pds1, pds2, {1.0, 2.0});
  REQUIRE_THAT(link.fitted_exponent, WithinAbs(link.dimension_increment, 1e-10));
  const double expected = relative_cascade_dimension(w1, w2, 2.0) -
                          relative_cascade_dimension(w1, w2, 1.0);
  REQUIRE_THAT(link.fitted_exponent, WithinAbs(expected, 1e-9));
}

TEST_CASE("cascade sampling is deterministic and lands in the unit interval") {
  const CascadeSpec spec(ProbDist::from_probabilities({0.3, 0.7}), 10);
  const auto s1 = sample_cascade(spec, 5000, 99);
  const auto s2 = sample_cascade(spec, 5000, 99);
  REQUIRE(s1 == s2);
  REQUIRE(s1.size() == 5000);
  std::size_t right = 0;
  for (double t : s1) {
    REQUIRE(t >= 0.0);
    REQUIRE(t < 1.0);
    right += t >= 0.5 ? 1 : 0;
  }
  // the right half carries weight 0.7
  REQUIRE_THAT(double(right) / 5000.0, WithinAbs(0.7, 0.02));
  const auto s3 = sample_cascade(spec, 5000, 100);
  REQUIRE(s1 != s3);
}
