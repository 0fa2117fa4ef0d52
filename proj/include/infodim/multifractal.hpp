#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "infodim/common.hpp"
#include "infodim/complexity.hpp"
#include "infodim/info_measures.hpp"
#include "infodim/prob_dist.hpp"

namespace infodim {

// Box masses of a measure at one scale. Only occupied boxes are stored; the
// lattice indices keep two partitions of the same scale alignable box by
// box.
class PartitionDistribution {
 public:
  PartitionDistribution(double epsilon, ProbDist masses)
      : epsilon_(epsilon), boxes_(consecutive_boxes(masses.size())),
        masses_(std::move(masses)) {
    validate();
  }

  PartitionDistribution(double epsilon, std::vector<std::int64_t> boxes, ProbDist masses)
      : epsilon_(epsilon), boxes_(std::move(boxes)), masses_(std::move(masses)) {
    validate();
  }

  double epsilon() const { return epsilon_; }
  const std::vector<std::int64_t>& boxes() const { return boxes_; }
  const ProbDist& masses() const { return masses_; }
  std::size_t box_count() const { return boxes_.size(); }

 private:
  static std::vector<std::int64_t> consecutive_boxes(std::size_t n) {
    std::vector<std::int64_t> b(n);
    std::iota(b.begin(), b.end(), std::int64_t{0});
    return b;
  }

  void validate() const {
    if (!(std::isfinite(epsilon_) && epsilon_ > 0.0))
      throw DomainError("box scale must be positive and finite");
    if (boxes_.size() != masses_.size())
      throw MismatchError("box indices and masses must have equal length, got " +
                          std::to_string(boxes_.size()) + " and " +
                          std::to_string(masses_.size()));
    for (std::size_t i = 1; i < boxes_.size(); ++i)
      if (boxes_[i] <= boxes_[i - 1])
        throw DomainError("box indices must be strictly increasing");
    for (double m : masses_.probs())
      if (m <= 0.0)
        throw DomainError("partition masses must be strictly positive; "
                          "drop empty boxes instead of storing them");
  }

  double epsilon_;
  std::vector<std::int64_t> boxes_;
  ProbDist masses_;
};

// Scaling statistic at one scale: (1/(q-1)) ln sum_k m_k^q over occupied
// boxes, with the q -> 1 limit sum_k m_k ln m_k. Equal to minus the Renyi
// entropy of the box masses.
inline double partition_sum_log(const PartitionDistribution& pd, double q) {
  return -renyi_entropy(pd.masses(), q);
}

// Relative scaling statistic (1/(q-1)) ln sum_k m1_k^q m2_k^(1-q) over boxes
// aligned by lattice index, with the q -> 1 limit sum_k m1_k ln(m1_k/m2_k).
// Boxes occupied by the first measure must be occupied by the second; for
// q <= 0 the reverse inclusion is needed as well.
inline double relative_partition_sum_log(const PartitionDistribution& pd1,
                                         const PartitionDistribution& pd2, double q) {
  detail::require_order_finite(q);
  if (!detail::nearly_equal(pd1.epsilon(), pd2.epsilon(), 1e-9))
    throw MismatchError("partitions are at different scales (" +
                        std::to_string(pd1.epsilon()) + " vs " +
                        std::to_string(pd2.epsilon()) + ")");
  // Merge walk over the two sorted box lists.
  std::vector<double> m1c, m2c;
  std::size_t i = 0, j = 0;
  while (i < pd1.box_count() || j < pd2.box_count()) {
    if (j == pd2.box_count() ||
        (i < pd1.box_count() && pd1.boxes()[i] < pd2.boxes()[j])) {
      throw AbsoluteContinuityError(
          "first measure occupies box " + std::to_string(pd1.boxes()[i]) +
          " where the second has no mass");
    }
    if (i == pd1.box_count() || pd1.boxes()[i] > pd2.boxes()[j]) {
      if (q <= 0.0)
        throw DegenerateSupportError(
            "order " + std::to_string(q) + " requires first-measure mass in box " +
            std::to_string(pd2.boxes()[j]));
      ++j;
      continue;
    }
    m1c.push_back(pd1.masses()[i]);
    m2c.push_back(pd2.masses()[j]);
    ++i;
    ++j;
  }
  if (m1c.empty()) throw DegenerateSupportError("partitions share no occupied box");
  if (std::abs(q - 1.0) <= kOrderUnityTol) {
    detail::CompensatedSum s;
    for (std::size_t k = 0; k < m1c.size(); ++k)
      s.add(m1c[k] * std::log(m1c[k] / m2c[k]));
    return s.value();
  }
  std::vector<double> terms(m1c.size());
  for (std::size_t k = 0; k < m1c.size(); ++k)
    terms[k] = q * std::log(m1c[k]) + (1.0 - q) * std::log(m2c[k]);
  return detail::log_sum_exp(terms) / (q - 1.0);
}

// Statistic values paired with log scales, ordered from coarse to fine
// (strictly decreasing ln eps).
class ScaleSeries {
 public:
  ScaleSeries(std::vector<double> log_scales, std::vector<double> statistics)
      : x_(std::move(log_scales)), y_(std::move(statistics)) {
    if (x_.size() != y_.size())
      throw MismatchError("scale series needs one statistic per scale");
    if (x_.size() < 2) throw DomainError("scale series needs at least two scales");
    for (std::size_t i = 0; i < x_.size(); ++i) {
      if (!std::isfinite(x_[i])) throw DomainError("log scales must be finite");
      if (!std::isfinite(y_[i]))
        throw NumericError("scaling statistic is not finite at scale index " +
                           std::to_string(i));
      if (i > 0 && x_[i] >= x_[i - 1])
        throw DomainError("log scales must be strictly decreasing (coarse to fine)");
    }
  }

  const std::vector<double>& log_scales() const { return x_; }
  const std::vector<double>& statistics() const { return y_; }
  std::size_t size() const { return x_.size(); }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares of the statistic against ln eps. R^2 is clamped to
// [0, 1]; an exactly constant statistic fits its own mean perfectly.
inline FitResult fit_dimension(const ScaleSeries& s) {
  const auto& x = s.log_scales();
  const auto& y = s.statistics();
  const double n = static_cast<double>(s.size());
  detail::CompensatedSum sx, sy;
  for (std::size_t i = 0; i < s.size(); ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / n;
  const double my = sy.value() / n;
  detail::CompensatedSum sxx, sxy;
  for (std::size_t i = 0; i < s.size(); ++i) {
    sxx.add((x[i] - mx) * (x[i] - mx));
    sxy.add((x[i] - mx) * (y[i] - my));
  }
  FitResult f;
  f.slope = sxy.value() / sxx.value();
  f.intercept = my - f.slope * mx;
  detail::CompensatedSum ss_res, ss_tot;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res.add(r * r);
    ss_tot.add((y[i] - my) * (y[i] - my));
  }
  f.r_squared = ss_tot.value() == 0.0
                    ? 1.0
                    : std::clamp(1.0 - ss_res.value() / ss_tot.value(), 0.0, 1.0);
  return f;
}

// Dimension estimates over a grid of orders, with the fit quality of each.
struct DimensionCurve {
  std::vector<double> q_grid;
  std::vector<double> values;
  std::vector<double> r_squared;
};

struct DimensionFitOptions {
  // Estimated curves must respect the theoretical monotonicity up to this
  // slack; larger violations abort the estimate when enforcement is on.
  double monotone_slack = 1e-3;
  bool enforce_monotone = true;
};

inline std::vector<double> default_q_grid() { return arithmetic_grid(-10.0, 10.0, 0.25); }

namespace detail {

inline void require_q_grid(const std::vector<double>& q_grid) {
  if (q_grid.empty()) throw DomainError("order grid must be non-empty");
  for (double q : q_grid)
    if (!std::isfinite(q)) throw DomainError("order grid must be finite");
  for (std::size_t i = 1; i < q_grid.size(); ++i)
    if (q_grid[i] <= q_grid[i - 1])
      throw DomainError("order grid must be strictly increasing");
}

// Indices of the partitions from coarsest to finest, rejecting duplicate
// scales.
inline std::vector<std::size_t> scale_order(const std::vector<PartitionDistribution>& pds) {
  if (pds.size() < 3)
    throw DomainError("dimension estimation needs at least three scales");
  std::vector<std::size_t> idx(pds.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return pds[a].epsilon() > pds[b].epsilon();
  });
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (nearly_equal(pds[idx[i - 1]].epsilon(), pds[idx[i]].epsilon(), 1e-12))
      throw DomainError("duplicate box scale " + std::to_string(pds[idx[i]].epsilon()));
  return idx;
}

enum class CurveTrend { NonIncreasing, NonDecreasing };

inline void check_monotone(const DimensionCurve& c, CurveTrend trend,
                           const DimensionFitOptions& opt) {
  if (!opt.enforce_monotone || c.values.size() < 2) return;
  double worst = 0.0;
  double at = 0.0;
  for (std::size_t i = 1; i < c.values.size(); ++i) {
    const double rise = c.values[i] - c.values[i - 1];
    const double viol = trend == CurveTrend::NonIncreasing ? rise : -rise;
    if (viol > worst) {
      worst = viol;
      at = c.q_grid[i];
    }
  }
  if (worst > opt.monotone_slack)
    throw NumericError("estimated dimension curve violates monotonicity by " +
                       std::to_string(worst) + " near order " + std::to_string(at) +
                       " (noisy scaling data)");
}

}  // namespace detail

// Box-counting generalized dimensions: for each order, the OLS slope of the
// scaling statistic against ln eps. Non-increasing in the order up to the
// configured slack.
inline DimensionCurve generalized_dimensions(const std::vector<PartitionDistribution>& pds,
                                             const std::vector<double>& q_grid,
                                             const DimensionFitOptions& opt = {}) {
  detail::require_q_grid(q_grid);
  const auto order = detail::scale_order(pds);
  std::vector<double> x;
  x.reserve(order.size());
  for (std::size_t k : order) x.push_back(std::log(pds[k].epsilon()));
  DimensionCurve c;
  c.q_grid = q_grid;
  c.values.reserve(q_grid.size());
  c.r_squared.reserve(q_grid.size());
  for (double q : q_grid) {
    std::vector<double> y;
    y.reserve(order.size());
    for (std::size_t k : order) y.push_back(partition_sum_log(pds[k], q));
    const FitResult f = fit_dimension(ScaleSeries(x, std::move(y)));
    c.values.push_back(f.slope);
    c.r_squared.push_back(f.r_squared);
  }
  detail::check_monotone(c, detail::CurveTrend::NonIncreasing, opt);
  return c;
}

// Relative dimensions of the first measure against the second. The relative
// statistic grows toward fine scales, so its slope against ln eps carries the
// opposite sign; the estimate negates it. Non-decreasing in the order.
inline DimensionCurve generalized_relative_dimensions(
    const std::vector<PartitionDistribution>& pds1,
    const std::vector<PartitionDistribution>& pds2, const std::vector<double>& q_grid,
    const DimensionFitOptions& opt = {}) {
  detail::require_q_grid(q_grid);
  if (pds1.size() != pds2.size())
    throw MismatchError("the two measures must be partitioned at the same scales");
  const auto order1 = detail::scale_order(pds1);
  const auto order2 = detail::scale_order(pds2);
  std::vector<double> x;
  x.reserve(order1.size());
  for (std::size_t k = 0; k < order1.size(); ++k) {
    const auto& a = pds1[order1[k]];
    const auto& b = pds2[order2[k]];
    if (!detail::nearly_equal(a.epsilon(), b.epsilon(), 1e-9))
      throw MismatchError("the two measures must be partitioned at the same scales");
    x.push_back(std::log(a.epsilon()));
  }
  DimensionCurve c;
  c.q_grid = q_grid;
  c.values.reserve(q_grid.size());
  c.r_squared.reserve(q_grid.size());
  for (double q : q_grid) {
    std::vector<double> y;
    y.reserve(order1.size());
    for (std::size_t k = 0; k < order1.size(); ++k)
      y.push_back(relative_partition_sum_log(pds1[order1[k]], pds2[order2[k]], q));
    const FitResult f = fit_dimension(ScaleSeries(x, std::move(y)));
    c.values.push_back(-f.slope);
    c.r_squared.push_back(f.r_squared);
  }
  detail::check_monotone(c, detail::CurveTrend::NonDecreasing, opt);
  return c;
}

// Arithmetic mean of the two directed relative curves, with the weaker fit
// quality kept per order.
inline DimensionCurve symmetrized_relative_dimensions(const DimensionCurve& ab,
                                                      const DimensionCurve& ba) {
  if (ab.q_grid.size() != ba.q_grid.size())
    throw MismatchError("directed curves use different order grids");
  for (std::size_t i = 0; i < ab.q_grid.size(); ++i)
    if (std::abs(ab.q_grid[i] - ba.q_grid[i]) > 1e-12)
      throw MismatchError("directed curves use different order grids");
  DimensionCurve c;
  c.q_grid = ab.q_grid;
  c.values.resize(ab.values.size());
  c.r_squared.resize(ab.values.size());
  for (std::size_t i = 0; i < ab.values.size(); ++i) {
    c.values[i] = 0.5 * (ab.values[i] + ba.values[i]);
    c.r_squared[i] = std::min(ab.r_squared[i], ba.r_squared[i]);
  }
  return c;
}

// Finite-difference derivative of a dimension curve on its own uniform grid:
// central differences inside, three-point one-sided stencils at the ends.
// Fit qualities are carried through unchanged.
inline DimensionCurve dimension_derivative(const DimensionCurve& curve) {
  const std::size_t n = curve.q_grid.size();
  if (n < 3) throw DomainError("derivative needs at least three grid points");
  if (curve.values.size() != n || curve.r_squared.size() != n)
    throw MismatchError("malformed dimension curve");
  const double h = curve.q_grid[1] - curve.q_grid[0];
  if (h <= 0.0) throw DomainError("order grid must be strictly increasing");
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (!detail::nearly_equal(curve.q_grid[i + 1] - curve.q_grid[i], h, 1e-9))
      throw DomainError("derivative needs a uniformly spaced order grid");
  DimensionCurve d;
  d.q_grid = curve.q_grid;
  d.r_squared = curve.r_squared;
  d.values.resize(n);
  const auto& v = curve.values;
  d.values[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  for (std::size_t i = 1; i + 1 < n; ++i) d.values[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
  d.values[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  return d;
}

// How a pair of orders is condensed into one number per (alpha, beta) cell.
enum class IncrementMode {
  Difference,  // D(beta) - D(alpha); the scaling exponent of the complexity
  Rate,        // divided difference, collapsing to dD/dq on the diagonal
};

// Map of dimension increments over an (alpha, beta) grid, interpolating the
// curve linearly. Cells falling outside the curve's order range hold NaN.
inline ComplexityMap dimension_increment_map(const DimensionCurve& curve,
                                             const std::vector<double>& alpha_grid,
                                             const std::vector<double>& beta_grid,
                                             IncrementMode mode = IncrementMode::Difference) {
  const std::size_t n = curve.q_grid.size();
  if (n == 0 || curve.values.size() != n)
    throw MismatchError("malformed dimension curve");
  for (std::size_t i = 1; i < n; ++i)
    if (curve.q_grid[i] <= curve.q_grid[i - 1])
      throw DomainError("order grid must be strictly increasing");

  auto value_at = [&](const std::vector<double>& vals, double q) -> double {
    const double lo = curve.q_grid.front();
    const double hi = curve.q_grid.back();
    if (q < lo - 1e-12 || q > hi + 1e-12) return missing_value();
    if (n == 1) return vals[0];
    const double qc = std::clamp(q, lo, hi);
    const auto it = std::upper_bound(curve.q_grid.begin(), curve.q_grid.end(), qc);
    const std::size_t j = std::min(
        n - 2, static_cast<std::size_t>(std::max(
                   std::ptrdiff_t{0}, std::distance(curve.q_grid.begin(), it) - 1)));
    const double t = (qc - curve.q_grid[j]) / (curve.q_grid[j + 1] - curve.q_grid[j]);
    return vals[j] + t * (vals[j + 1] - vals[j]);
  };

  std::vector<double> deriv_vals;
  auto diagonal_rate = [&](double q) -> double {
    if (deriv_vals.empty()) deriv_vals = dimension_derivative(curve).values;
    return value_at(deriv_vals, q);
  };

  return detail::build_order_map(alpha_grid, beta_grid, [&](double a, double b) {
    const double da = value_at(curve.values, a);
    const double db = value_at(curve.values, b);
    if (is_missing(da) || is_missing(db)) return missing_value();
    if (mode == IncrementMode::Difference) return db - da;
    if (std::abs(b - a) <= 1e-12) return diagonal_rate(0.5 * (a + b));
    return (db - da) / (b - a);
  });
}

// Self-similar binomial-type measure: the unit interval split into B equal
// parts carrying the given weights, recursively to the given depth. Its
// dimensions have a closed form, which makes it the reference object for
// testing the estimators.
class CascadeSpec {
 public:
  CascadeSpec(ProbDist weights, int depth) : weights_(std::move(weights)), depth_(depth) {
    if (weights_.size() < 2) throw DomainError("cascade needs at least two branches");
    if (!weights_.full_support())
      throw DomainError("cascade weights must be strictly positive");
    if (depth < 1) throw DomainError("cascade depth must be at least 1");
    double cells = 1.0;
    for (int l = 0; l < depth; ++l) {
      cells *= static_cast<double>(weights_.size());
      if (cells > (1 << 24)) throw DomainError("cascade too deep to enumerate");
    }
  }

  const ProbDist& weights() const { return weights_; }
  int depth() const { return depth_; }
  int branching() const { return static_cast<int>(weights_.size()); }

 private:
  ProbDist weights_;
  int depth_;
};

// Exact box masses of the cascade at one refinement level; eps = B^-level.
inline PartitionDistribution cascade_partition(const CascadeSpec& spec, int level) {
  if (level < 1 || level > spec.depth())
    throw DomainError("cascade level must lie in [1, depth]");
  const int b = spec.branching();
  std::vector<double> masses{1.0};
  for (int l = 0; l < level; ++l) {
    std::vector<double> next(masses.size() * static_cast<std::size_t>(b));
    for (std::size_t i = 0; i < masses.size(); ++i)
      for (int k = 0; k < b; ++k)
        next[i * static_cast<std::size_t>(b) + static_cast<std::size_t>(k)] =
            masses[i] * spec.weights()[static_cast<std::size_t>(k)];
    masses = std::move(next);
  }
  const double eps = std::pow(static_cast<double>(b), -level);
  return PartitionDistribution(eps, ProbDist::from_weights(std::move(masses)));
}

// Closed-form dimension spectrum of the cascade,
//   D_q = ln(sum_b w_b^q) / ((1 - q) ln B),
// with the q -> 1 limit -sum_b w_b ln w_b / ln B.
inline double cascade_dimension_closed_form(const CascadeSpec& spec, double q) {
  detail::require_order_finite(q);
  const double log_b = std::log(static_cast<double>(spec.branching()));
  if (std::abs(q - 1.0) <= kOrderUnityTol)
    return shannon_entropy(spec.weights()) / log_b;
  return detail::log_power_sum(spec.weights(), q) / ((1.0 - q) * log_b);
}

// Independent draws from the cascade measure, as positions in [0, 1). Each
// draw walks the levels choosing a branch by its weight, then lands uniformly
// inside the final cell. Deterministic for a fixed seed.
inline std::vector<double> sample_cascade(const CascadeSpec& spec, std::size_t count,
                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto unit = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  const int b = spec.branching();
  std::vector<double> cdf(spec.weights().probs().size());
  double acc = 0.0;
  for (std::size_t k = 0; k < cdf.size(); ++k) {
    acc += spec.weights()[k];
    cdf[k] = acc;
  }
  cdf.back() = 1.0;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double lo = 0.0;
    double width = 1.0;
    for (int l = 0; l < spec.depth(); ++l) {
      const double u = unit();
      std::size_t k = 0;
      while (k + 1 < cdf.size() && u >= cdf[k]) ++k;
      width /= static_cast<double>(b);
      lo += width * static_cast<double>(k);
    }
    out.push_back(lo + width * unit());
  }
  return out;
}

// Fitted scaling exponent of a complexity against the dimension increment it
// should equal in the small-scale limit.
struct ScalingLinkCheck {
  double fitted_exponent = 0.0;
  double dimension_increment = 0.0;
};

namespace detail {

inline ScalingLinkCheck scaling_link(const std::vector<double>& x,
                                     const std::vector<double>& log_complexity,
                                     double d_alpha, double d_beta) {
  const FitResult f = fit_dimension(ScaleSeries(x, log_complexity));
  return ScalingLinkCheck{f.slope, d_beta - d_alpha};
}

}  // namespace detail

// ln C_(alpha,beta)(P_eps) against ln eps: its slope should match
// D(beta) - D(alpha).
inline ScalingLinkCheck complexity_scaling_link(const std::vector<PartitionDistribution>& pds,
                                                OrderPair ab) {
  const auto order = detail::scale_order(pds);
  std::vector<double> x, y, ya, yb;
  for (std::size_t k : order) {
    x.push_back(std::log(pds[k].epsilon()));
    const double pa = partition_sum_log(pds[k], ab.alpha);
    const double pb = partition_sum_log(pds[k], ab.beta);
    ya.push_back(pa);
    yb.push_back(pb);
    y.push_back(pb - pa);
  }
  const double da = fit_dimension(ScaleSeries(x, ya)).slope;
  const double db = fit_dimension(ScaleSeries(x, yb)).slope;
  return detail::scaling_link(x, y, da, db);
}

// Relative counterpart: ln of the relative complexity per scale against the
// increment of the relative dimension curve.
inline ScalingLinkCheck relative_complexity_scaling_link(
    const std::vector<PartitionDistribution>& pds1,
    const std::vector<PartitionDistribution>& pds2, OrderPair ab) {
  if (pds1.size() != pds2.size())
    throw MismatchError("the two measures must be partitioned at the same scales");
  const auto order1 = detail::scale_order(pds1);
  const auto order2 = detail::scale_order(pds2);
  std::vector<double> x, y, ya, yb;
  for (std::size_t k = 0; k < order1.size(); ++k) {
    const auto& a = pds1[order1[k]];
    const auto& b = pds2[order2[k]];
    if (!detail::nearly_equal(a.epsilon(), b.epsilon(), 1e-9))
      throw MismatchError("the two measures must be partitioned at the same scales");
    x.push_back(std::log(a.epsilon()));
    const double ra = relative_partition_sum_log(a, b, ab.alpha);
    const double rb = relative_partition_sum_log(a, b, ab.beta);
    ya.push_back(ra);
    yb.push_back(rb);
    y.push_back(ra - rb);
  }
  const double da = -fit_dimension(ScaleSeries(x, ya)).slope;
  const double db = -fit_dimension(ScaleSeries(x, yb)).slope;
  return detail::scaling_link(x, y, da, db);
}

}  // namespace infodim
