#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "infodim/common.hpp"
#include "infodim/info_measures.hpp"
#include "infodim/prob_dist.hpp"

namespace infodim {

// Pair of orders (alpha, beta) selecting the two entropies a complexity
// compares.
struct OrderPair {
  double alpha = 1.0;
  double beta = 2.0;
};

// Mean squared deviation from the uniform distribution, sum (p_i - 1/n)^2.
inline double disequilibrium(const ProbDist& p) {
  const double u = 1.0 / static_cast<double>(p.size());
  detail::CompensatedSum s;
  for (double v : p.probs()) s.add((v - u) * (v - u));
  return s.value();
}

// Shannon entropy times disequilibrium; vanishes both at certainty and at
// uniformity.
inline double c_lmc(const ProbDist& p) { return shannon_entropy(p) * disequilibrium(p); }

// Two-parameter statistical complexity exp(H_alpha - H_beta), the ratio of
// diversity indices of the two orders. At least 1 when alpha <= beta.
inline double generalized_complexity(const ProbDist& p, OrderPair ab) {
  return std::exp(renyi_entropy(p, ab.alpha) - renyi_entropy(p, ab.beta));
}

// Exponential form of the LMC complexity, the (1, 2) case of the
// two-parameter family.
inline double exponential_c_lmc(const ProbDist& p) {
  return generalized_complexity(p, OrderPair{1.0, 2.0});
}

// Relative counterpart exp(H_alpha(p1 || p2) - H_beta(p1 || p2)).
inline double generalized_relative_complexity(const DistPair& pair, OrderPair ab) {
  return std::exp(renyi_divergence(pair, ab.alpha) - renyi_divergence(pair, ab.beta));
}

// Chord slope of the entropy in the order, (H_alpha - H_beta) / (alpha - beta).
// Converges to entropy_derivative as the orders approach each other; equal
// orders are rejected.
inline double entropy_increment(const ProbDist& p, OrderPair ab) {
  if (ab.alpha == ab.beta)
    throw DomainError("increment needs two distinct orders; use entropy_derivative");
  return (renyi_entropy(p, ab.alpha) - renyi_entropy(p, ab.beta)) / (ab.alpha - ab.beta);
}

// Chord slope of the divergence in the order.
inline double divergence_increment(const DistPair& pair, OrderPair ab) {
  if (ab.alpha == ab.beta)
    throw DomainError("increment needs two distinct orders; use divergence_derivative");
  return (renyi_divergence(pair, ab.alpha) - renyi_divergence(pair, ab.beta)) /
         (ab.alpha - ab.beta);
}

namespace detail {

// Log values and normalized weights restricted to the support.
struct SupportView {
  std::vector<double> weights;
  std::vector<double> values;
};

inline SupportView support_log_view(const ProbDist& p) {
  SupportView v;
  v.weights.reserve(p.size());
  v.values.reserve(p.size());
  for (double x : p.probs()) {
    if (x > 0.0) {
      v.weights.push_back(x);
      v.values.push_back(std::log(x));
    }
  }
  return v;
}

// d/dq of ln sum_i w_i exp(q x_i) at the given q: the mean of x under the
// exponentially tilted weights.
inline double tilted_mean(const SupportView& v, double q) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.values.size(); ++i)
    m = std::max(m, std::log(v.weights[i]) + q * v.values[i]);
  CompensatedSum num, den;
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    const double e = std::exp(std::log(v.weights[i]) + q * v.values[i] - m);
    den.add(e);
    num.add(e * v.values[i]);
  }
  return num.value() / den.value();
}

}  // namespace detail

// Analytic derivative dH_q/dq of the Renyi entropy. Away from q = 1 it
// differentiates the closed form; inside a small window around 1 that form
// cancels catastrophically, so a cumulant expansion of ln p under p takes
// over:
//   H'(1 + u) = -k2/2 - k3 u/3 - k4 u^2/8 + O(u^3).
inline double entropy_derivative(const ProbDist& p, double q) {
  detail::require_order_finite(q);
  detail::require_support_for_order(p, q);
  const double u = q - 1.0;
  auto view = detail::support_log_view(p);
  if (std::abs(u) <= kDerivativeSeriesWindow) {
    const auto c = detail::weighted_cumulants(view.weights, view.values);
    return -c.k2 / 2.0 - c.k3 * u / 3.0 - c.k4 * u * u / 8.0;
  }
  // ln S(q) = ln sum p^q built as ln sum w exp((q-1) ln w) over the support.
  std::vector<double> terms(view.values.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = q * view.values[i];
  const double log_s = detail::log_sum_exp(terms);
  const double mean_log = detail::tilted_mean(view, u);
  return log_s / ((1.0 - q) * (1.0 - q)) + mean_log / (1.0 - q);
}

// Analytic derivative of the Renyi divergence in the order, with the same
// split: direct differentiation away from q = 1, cumulants of ln(p1/p2)
// under p1 near it:
//   H'(1 + u) = +k2/2 + k3 u/3 + k4 u^2/8 + O(u^3).
inline double divergence_derivative(const DistPair& pair, double q) {
  detail::require_order_finite(q);
  const auto& p1 = pair.p1().probs();
  const auto& p2 = pair.p2().probs();
  detail::SupportView view;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    if (p1[i] > 0.0 && p2[i] == 0.0)
      throw AbsoluteContinuityError("first distribution has mass in cell " +
                                    std::to_string(i) +
                                    " where the second has none");
    if (q <= 0.0 && p2[i] > 0.0 && p1[i] == 0.0)
      throw DegenerateSupportError(
          "order " + std::to_string(q) + " requires mass in cell " +
          std::to_string(i) + " of the first distribution");
    if (p1[i] > 0.0) {
      view.weights.push_back(p1[i]);
      view.values.push_back(std::log(p1[i] / p2[i]));
    }
  }
  const double u = q - 1.0;
  if (std::abs(u) <= kDerivativeSeriesWindow) {
    const auto c = detail::weighted_cumulants(view.weights, view.values);
    return c.k2 / 2.0 + c.k3 * u / 3.0 + c.k4 * u * u / 8.0;
  }
  // K(u) = ln sum p1 (p1/p2)^u; the divergence is K(u)/u.
  std::vector<double> terms(view.values.size());
  for (std::size_t i = 0; i < terms.size(); ++i)
    terms[i] = std::log(view.weights[i]) + u * view.values[i];
  const double k = detail::log_sum_exp(terms);
  const double k_prime = detail::tilted_mean(view, u);
  return k_prime / u - k / (u * u);
}

// Dense grid of complexity values over pairs of orders. Row-major: rows
// follow alpha_grid, columns beta_grid. Cells whose evaluation is undefined
// for the given distribution hold NaN.
struct ComplexityMap {
  std::vector<double> alpha_grid;
  std::vector<double> beta_grid;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * beta_grid.size() + j]; }
};

inline std::vector<double> default_order_grid() { return arithmetic_grid(0.0, 10.0, 0.1); }

namespace detail {

template <typename Cell>
ComplexityMap build_order_map(const std::vector<double>& alpha_grid,
                              const std::vector<double>& beta_grid, Cell cell) {
  if (alpha_grid.empty() || beta_grid.empty())
    throw DomainError("order grids must be non-empty");
  for (double a : alpha_grid)
    if (!std::isfinite(a)) throw DomainError("order grids must be finite");
  for (double b : beta_grid)
    if (!std::isfinite(b)) throw DomainError("order grids must be finite");
  ComplexityMap m;
  m.alpha_grid = alpha_grid;
  m.beta_grid = beta_grid;
  m.values.resize(alpha_grid.size() * beta_grid.size());
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    for (std::size_t j = 0; j < beta_grid.size(); ++j) {
      double v;
      try {
        v = cell(alpha_grid[i], beta_grid[j]);
      } catch (const Error&) {
        v = missing_value();
      }
      m.values[i * beta_grid.size() + j] = v;
    }
  }
  return m;
}

}  // namespace detail

inline ComplexityMap complexity_map(const ProbDist& p, const std::vector<double>& alpha_grid,
                                    const std::vector<double>& beta_grid) {
  return detail::build_order_map(alpha_grid, beta_grid, [&](double a, double b) {
    return generalized_complexity(p, OrderPair{a, b});
  });
}

inline ComplexityMap relative_complexity_map(const DistPair& pair,
                                             const std::vector<double>& alpha_grid,
                                             const std::vector<double>& beta_grid) {
  return detail::build_order_map(alpha_grid, beta_grid, [&](double a, double b) {
    return generalized_relative_complexity(pair, OrderPair{a, b});
  });
}

}  // namespace infodim
