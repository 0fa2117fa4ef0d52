#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "infodim/common.hpp"
#include "infodim/info_measures.hpp"
#include "infodim/prob_dist.hpp"

namespace infodim {

// Probability mass function over a one-dimensional partition into bins of
// known width; stands in for a density sampled at finite resolution.
class BinnedDensity {
 public:
  BinnedDensity(ProbDist probs, std::vector<double> widths)
      : BinnedDensity(std::move(probs), std::move(widths), -1.0) {}

  // The explicit support measure must match the summed widths within 1e-9
  // (relative); the two-argument form takes the sum as given.
  BinnedDensity(ProbDist probs, std::vector<double> widths, double support_measure)
      : probs_(std::move(probs)), widths_(std::move(widths)) {
    if (widths_.size() != probs_.size())
      throw MismatchError("bin widths and probabilities must have equal length, got " +
                          std::to_string(widths_.size()) + " and " +
                          std::to_string(probs_.size()));
    detail::CompensatedSum s;
    for (double w : widths_) {
      if (!std::isfinite(w) || w <= 0.0)
        throw DomainError("bin widths must be positive and finite");
      s.add(w);
    }
    support_ = s.value();
    if (support_measure >= 0.0 &&
        !detail::nearly_equal(support_measure, support_, 1e-9))
      throw DomainError("declared support measure " + std::to_string(support_measure) +
                        " disagrees with summed bin widths " + std::to_string(support_));
  }

  const ProbDist& probs() const { return probs_; }
  const std::vector<double>& widths() const { return widths_; }
  double support_measure() const { return support_; }
  std::size_t size() const { return probs_.size(); }

  bool uniform_widths(double rel_tol = 1e-9) const {
    for (double w : widths_)
      if (std::abs(w - widths_[0]) > rel_tol * widths_[0]) return false;
    return true;
  }

  // The shared width of an equal-width partition.
  double common_width() const {
    if (!uniform_widths())
      throw DomainError("partition does not have uniform bin widths");
    return widths_[0];
  }

 private:
  ProbDist probs_;
  std::vector<double> widths_;
  double support_;
};

// Split of the Shannon entropy of a binned density into a width-relative
// (spatial) part and a pure bin-scale part, with spatial + scale = total.
struct BattyDecomposition {
  double spatial = 0.0;
  double scale = 0.0;
  double total = 0.0;
};

inline BattyDecomposition batty_decomposition(const BinnedDensity& d) {
  detail::CompensatedSum spatial, scale;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double p = d.probs()[i];
    if (p > 0.0) {
      spatial.add(-p * std::log(p / d.widths()[i]));
      scale.add(-p * std::log(d.widths()[i]));
    }
  }
  BattyDecomposition out;
  out.spatial = spatial.value();
  out.scale = scale.value();
  out.total = shannon_entropy(d.probs());
  return out;
}

// Resolution-corrected Renyi entropy H_q(probs) + ln(width), the
// discretization of the continuous entropy of the underlying density.
// Defined only for equal-width partitions; unequal widths have no single
// scale correction and callers should fall back to batty_decomposition.
inline double binned_renyi_entropy(const BinnedDensity& d, double q) {
  if (!d.uniform_widths())
    throw DomainError(
        "scale-corrected entropy requires uniform bin widths; "
        "use batty_decomposition for unequal bins");
  return renyi_entropy(d.probs(), q) + std::log(d.common_width());
}

// Renyi divergence of two densities binned over the identical partition.
// The width terms cancel, so this reduces to the divergence of the masses.
inline double binned_renyi_divergence(const BinnedDensity& d1, const BinnedDensity& d2,
                                      double q) {
  if (d1.size() != d2.size())
    throw MismatchError("binned densities must share one partition, got " +
                        std::to_string(d1.size()) + " and " +
                        std::to_string(d2.size()) + " bins");
  for (std::size_t i = 0; i < d1.size(); ++i)
    if (!detail::nearly_equal(d1.widths()[i], d2.widths()[i], 1e-9))
      throw MismatchError("bin " + std::to_string(i) +
                          " has different widths in the two partitions");
  return renyi_divergence(DistPair(d1.probs(), d2.probs()), q);
}

// Distance from the maximal (uniform-density) entropy over the same support,
// ln(support) - corrected entropy. Equal-width partitions only, as above.
inline double continuous_information_difference(const BinnedDensity& d, double q) {
  return std::log(d.support_measure()) - binned_renyi_entropy(d, q);
}

}  // namespace infodim
