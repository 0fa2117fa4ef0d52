#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace infodim {

// Error hierarchy. Everything thrown by the library derives from Error so
// callers can catch one base type; the subclasses distinguish recoverable
// categories (the CLI maps them to exit codes).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument values or invalid object construction.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Zero probabilities where a non-positive order requires strictly positive
// support.
class DegenerateSupportError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Absolute-continuity violation: the divergence would be infinite.
class AbsoluteContinuityError : public Error {
 public:
  using Error::Error;
};

// Structural mismatch between two arguments (lengths, partitions, lattices,
// grids).
class MismatchError : public Error {
 public:
  using Error::Error;
};

// Malformed input files; message carries row/line context where available.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A computation produced an unusable numeric result (degenerate regression,
// monotonicity breakdown beyond tolerance).
class NumericError : public Error {
 public:
  using Error::Error;
};

// Weight vectors within this distance of unit sum are renormalized; larger
// deviations are rejected.
inline constexpr double kUnitSumTol = 1e-9;

// Switch radius around order 1 inside which the Shannon/KL limit replaces the
// direct formula (which loses all significance there).
inline constexpr double kOrderUnityTol = 1e-9;

// Switch radius around order 1 for the analytic derivative formulas, which
// cancel catastrophically much earlier than the entropies themselves; inside
// this window a cumulant series is used.
inline constexpr double kDerivativeSeriesWindow = 1e-3;

inline double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }

inline bool is_missing(double v) { return std::isnan(v); }

namespace detail {

// Neumaier compensated accumulator; keeps long sums accurate enough for the
// 1e-12 identity checks used throughout.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// log(sum(exp(x_i))) with the max factored out, so power sums stay finite for
// extreme orders.
inline double log_sum_exp(std::span<const double> log_terms) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : log_terms) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  CompensatedSum s;
  for (double x : log_terms) s.add(std::exp(x - m));
  return m + std::log(s.value());
}

// First four cumulants of the values x_i under the weights w_i (weights are
// assumed normalized). Basis of the near-unity derivative series.
struct Cumulants {
  double mean = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
};

inline Cumulants weighted_cumulants(std::span<const double> weights,
                                    std::span<const double> values) {
  CompensatedSum m;
  for (std::size_t i = 0; i < weights.size(); ++i) m.add(weights[i] * values[i]);
  const double mean = m.value();
  CompensatedSum s2, s3, s4;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double d = values[i] - mean;
    const double d2 = d * d;
    s2.add(weights[i] * d2);
    s3.add(weights[i] * d2 * d);
    s4.add(weights[i] * d2 * d2);
  }
  Cumulants c;
  c.mean = mean;
  c.k2 = s2.value();
  c.k3 = s3.value();
  c.k4 = s4.value() - 3.0 * c.k2 * c.k2;
  return c;
}

inline bool nearly_equal(double a, double b, double rel_tol) {
  return std::abs(a - b) <= rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace detail

// Inclusive arithmetic grid min, min+step, ..., max. The endpoint is included
// when it lands within a small tolerance of a step multiple.
inline std::vector<double> arithmetic_grid(double min, double max, double step) {
  if (!(std::isfinite(min) && std::isfinite(max) && std::isfinite(step)))
    throw DomainError("grid bounds and step must be finite");
  if (step <= 0.0) throw DomainError("grid step must be positive");
  if (max < min) throw DomainError("grid max must not be below min");
  const std::size_t count =
      static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) g[i] = min + static_cast<double>(i) * step;
  return g;
}

}  // namespace infodim
