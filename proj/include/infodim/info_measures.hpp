#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "infodim/common.hpp"
#include "infodim/prob_dist.hpp"

namespace infodim {

namespace detail {

inline void require_order_finite(double q) {
  if (!std::isfinite(q)) throw DomainError("order must be finite");
}

// Orders q <= 0 weight empty cells infinitely; they are only defined on
// strictly positive distributions.
inline void require_support_for_order(const ProbDist& p, double q) {
  if (q <= 0.0 && !p.full_support())
    throw DegenerateSupportError(
        "order " + std::to_string(q) +
        " requires strictly positive probabilities (distribution has empty cells)");
}

// ln sum_i p_i^q over the support, via log-space accumulation.
inline double log_power_sum(const ProbDist& p, double q) {
  std::vector<double> terms;
  terms.reserve(p.size());
  for (double v : p.probs())
    if (v > 0.0) terms.push_back(q * std::log(v));
  return log_sum_exp(terms);
}

}  // namespace detail

// Shannon entropy in nats, with 0 ln 0 taken as 0.
inline double shannon_entropy(const ProbDist& p) {
  detail::CompensatedSum s;
  for (double v : p.probs())
    if (v > 0.0) s.add(-v * std::log(v));
  return s.value();
}

// Order-q Renyi entropy in nats. Continuous across q = 1, where it becomes
// the Shannon entropy.
inline double renyi_entropy(const ProbDist& p, double q) {
  detail::require_order_finite(q);
  detail::require_support_for_order(p, q);
  if (std::abs(q - 1.0) <= kOrderUnityTol) return shannon_entropy(p);
  return detail::log_power_sum(p, q) / (1.0 - q);
}

// Effective number of states exp(H_q); ranges from 1 (certainty) to the
// number of cells (uniformity).
inline double diversity_index(const ProbDist& p, double q) {
  return std::exp(renyi_entropy(p, q));
}

// Order-q Renyi divergence of pair.p1() from pair.p2(), in nats. Becomes the
// Kullback-Leibler divergence at q = 1. For q > 0 every cell where p1 has
// mass must also carry p2 mass; q <= 0 additionally needs p1 mass wherever
// p2 has mass.
inline double renyi_divergence(const DistPair& pair, double q) {
  detail::require_order_finite(q);
  const auto& p1 = pair.p1().probs();
  const auto& p2 = pair.p2().probs();
  for (std::size_t i = 0; i < p1.size(); ++i) {
    if (p1[i] > 0.0 && p2[i] == 0.0)
      throw AbsoluteContinuityError("first distribution has mass in cell " +
                                    std::to_string(i) +
                                    " where the second has none");
    if (q <= 0.0 && p2[i] > 0.0 && p1[i] == 0.0)
      throw DegenerateSupportError(
          "order " + std::to_string(q) + " requires mass in cell " +
          std::to_string(i) + " of the first distribution");
  }
  if (std::abs(q - 1.0) <= kOrderUnityTol) {
    detail::CompensatedSum s;
    for (std::size_t i = 0; i < p1.size(); ++i)
      if (p1[i] > 0.0) s.add(p1[i] * std::log(p1[i] / p2[i]));
    return s.value();
  }
  std::vector<double> terms;
  terms.reserve(p1.size());
  for (std::size_t i = 0; i < p1.size(); ++i)
    if (p1[i] > 0.0) terms.push_back(q * std::log(p1[i]) + (1.0 - q) * std::log(p2[i]));
  return detail::log_sum_exp(terms) / (q - 1.0);
}

inline double kl_divergence(const DistPair& pair) { return renyi_divergence(pair, 1.0); }

// Effective state-count ratio exp(H_q(p1 || p2)).
inline double relative_diversity_index(const DistPair& pair, double q) {
  return std::exp(renyi_divergence(pair, q));
}

// Distance from maximal entropy, ln n - H_q. Coincides with the divergence
// from the uniform distribution on the same cells.
inline double information_difference(const ProbDist& p, double q) {
  return std::log(static_cast<double>(p.size())) - renyi_entropy(p, q);
}

// Shannon redundancy 1 - H / ln n, in [0, 1].
inline double redundancy(const ProbDist& p) {
  if (p.size() < 2)
    throw DomainError("redundancy needs at least two cells (ln n would be zero)");
  return 1.0 - shannon_entropy(p) / std::log(static_cast<double>(p.size()));
}

// Escort distribution p_i^q / sum_j p_j^q. Sharpens toward the modes for
// q > 1 and flattens toward uniform-over-support for q < 1; q = 1 is the
// identity.
inline ProbDist escort_distribution(const ProbDist& p, double q) {
  detail::require_order_finite(q);
  detail::require_support_for_order(p, q);
  if (q == 1.0) return p;
  double max_log = -std::numeric_limits<double>::infinity();
  for (double v : p.probs())
    if (v > 0.0) max_log = std::max(max_log, q * std::log(v));
  std::vector<double> w(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) w[i] = std::exp(q * std::log(p[i]) - max_log);
  return ProbDist::from_weights(std::move(w));
}

}  // namespace infodim
