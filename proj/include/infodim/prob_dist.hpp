#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "infodim/common.hpp"

namespace infodim {

// Finite discrete probability distribution. Immutable after construction;
// entries are non-negative and sum to one (up to rounding in the final
// normalization).
class ProbDist {
 public:
  // Accepts vectors already summing to one within kUnitSumTol and renormalizes
  // the residual away. Larger deviations are rejected rather than silently
  // rescaled.
  static ProbDist from_probabilities(std::vector<double> p) {
    validate_entries(p);
    detail::CompensatedSum s;
    for (double v : p) s.add(v);
    const double sum = s.value();
    if (std::abs(sum - 1.0) > kUnitSumTol)
      throw DomainError("probabilities sum to " + std::to_string(sum) +
                        ", expected 1 within 1e-9");
    if (sum != 1.0) {
      for (double& v : p) v /= sum;
    }
    return ProbDist(std::move(p));
  }

  // Normalizes arbitrary non-negative weights with a positive total.
  static ProbDist from_weights(std::vector<double> w) {
    validate_entries(w);
    detail::CompensatedSum s;
    for (double v : w) s.add(v);
    const double sum = s.value();
    if (sum <= 0.0) throw DomainError("weights must have a positive sum");
    for (double& v : w) v /= sum;
    return ProbDist(std::move(w));
  }

  static ProbDist uniform(std::size_t n) {
    if (n == 0) throw DomainError("distribution must have at least one cell");
    return ProbDist(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& probs() const { return p_; }

  std::size_t support_size() const {
    std::size_t k = 0;
    for (double v : p_)
      if (v > 0.0) ++k;
    return k;
  }

  bool full_support() const { return support_size() == size(); }

 private:
  explicit ProbDist(std::vector<double> p) : p_(std::move(p)) {}

  static void validate_entries(const std::vector<double>& p) {
    if (p.empty()) throw DomainError("distribution must have at least one cell");
    for (double v : p) {
      if (!std::isfinite(v)) throw DomainError("distribution entries must be finite");
      if (v < 0.0) throw DomainError("distribution entries must be non-negative");
    }
  }

  std::vector<double> p_;
};

// Ordered pair of distributions over the same index set; the relative
// measures read their arguments from this.
class DistPair {
 public:
  DistPair(ProbDist first, ProbDist second)
      : p1_(std::move(first)), p2_(std::move(second)) {
    if (p1_.size() != p2_.size())
      throw MismatchError("paired distributions must have equal length, got " +
                          std::to_string(p1_.size()) + " and " +
                          std::to_string(p2_.size()));
  }

  const ProbDist& p1() const { return p1_; }
  const ProbDist& p2() const { return p2_; }
  std::size_t size() const { return p1_.size(); }

 private:
  ProbDist p1_;
  ProbDist p2_;
};

}  // namespace infodim
