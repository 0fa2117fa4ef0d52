#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "infodim/common.hpp"
#include "infodim/complexity.hpp"
#include "infodim/info_measures.hpp"
#include "infodim/prob_dist.hpp"

namespace infodim {

// Regular triangular lattice over the three-part probability simplex:
// compositions (i, j, k) of the resolution R, mapped to (i/R, j/R, k/R).
// Points are enumerated lexicographically in (i, j).
class SimplexGrid {
 public:
  struct Point {
    int i = 0;
    int j = 0;
    int k = 0;
  };

  explicit SimplexGrid(int resolution) : resolution_(resolution) {
    if (resolution < 1) throw DomainError("simplex resolution must be at least 1");
    points_.reserve(static_cast<std::size_t>(resolution + 1) *
                    static_cast<std::size_t>(resolution + 2) / 2);
    for (int i = 0; i <= resolution; ++i)
      for (int j = 0; j <= resolution - i; ++j)
        points_.push_back(Point{i, j, resolution - i - j});
  }

  int resolution() const { return resolution_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<Point>& points() const { return points_; }

  ProbDist dist_at(std::size_t idx) const {
    const Point& pt = points_[idx];
    const double r = static_cast<double>(resolution_);
    return ProbDist::from_weights({pt.i / r, pt.j / r, pt.k / r});
  }

 private:
  int resolution_;
  std::vector<Point> points_;
};

// Measures that can be evaluated pointwise over the simplex.
enum class FieldMeasure {
  Entropy,
  Diversity,
  InformationDifference,
  CLmc,
  Complexity,
  RelativeComplexity,
  EntropyDerivative,
};

inline const std::vector<std::pair<std::string, FieldMeasure>>& field_measure_names() {
  static const std::vector<std::pair<std::string, FieldMeasure>> names = {
      {"entropy", FieldMeasure::Entropy},
      {"diversity", FieldMeasure::Diversity},
      {"information_difference", FieldMeasure::InformationDifference},
      {"c_lmc", FieldMeasure::CLmc},
      {"complexity", FieldMeasure::Complexity},
      {"relative_complexity", FieldMeasure::RelativeComplexity},
      {"entropy_derivative", FieldMeasure::EntropyDerivative},
  };
  return names;
}

inline FieldMeasure parse_field_measure(const std::string& name) {
  for (const auto& [n, m] : field_measure_names())
    if (n == name) return m;
  std::string known;
  for (const auto& [n, m] : field_measure_names()) {
    if (!known.empty()) known += ", ";
    known += n;
  }
  throw DomainError("unknown field measure '" + name + "' (known: " + known + ")");
}

inline std::string field_measure_name(FieldMeasure m) {
  for (const auto& [n, mm] : field_measure_names())
    if (mm == m) return n;
  throw DomainError("unknown field measure");
}

// What to evaluate at every grid point. The order q feeds the single-order
// measures, the pair feeds the complexities, and the reference distribution
// is required by the relative complexity only.
struct FieldSpec {
  FieldMeasure measure = FieldMeasure::Entropy;
  double q = 1.0;
  OrderPair orders{1.0, 2.0};
  std::optional<ProbDist> reference;
};

// Values over the grid, parallel to grid.points(). Points where the measure
// is undefined (zero coordinates with non-positive orders, reference
// absolute-continuity failures) hold NaN.
struct FieldResult {
  int resolution = 0;
  std::vector<SimplexGrid::Point> points;
  std::vector<double> values;
  FieldSpec spec;
};

inline FieldResult evaluate_field(const SimplexGrid& grid, const FieldSpec& spec) {
  if (spec.measure == FieldMeasure::RelativeComplexity) {
    if (!spec.reference)
      throw DomainError("relative complexity field needs a reference distribution");
    if (spec.reference->size() != 3)
      throw MismatchError("reference distribution must have three cells");
  }
  FieldResult out;
  out.resolution = grid.resolution();
  out.points = grid.points();
  out.values.resize(grid.size());
  out.spec = spec;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const ProbDist p = grid.dist_at(idx);
    double v;
    try {
      switch (spec.measure) {
        case FieldMeasure::Entropy:
          v = renyi_entropy(p, spec.q);
          break;
        case FieldMeasure::Diversity:
          v = diversity_index(p, spec.q);
          break;
        case FieldMeasure::InformationDifference:
          v = information_difference(p, spec.q);
          break;
        case FieldMeasure::CLmc:
          v = c_lmc(p);
          break;
        case FieldMeasure::Complexity:
          v = generalized_complexity(p, spec.orders);
          break;
        case FieldMeasure::RelativeComplexity:
          v = generalized_relative_complexity(DistPair(p, *spec.reference), spec.orders);
          break;
        case FieldMeasure::EntropyDerivative:
          v = entropy_derivative(p, spec.q);
          break;
        default:
          throw DomainError("unknown field measure");
      }
    } catch (const Error&) {
      v = missing_value();
    }
    out.values[idx] = v;
  }
  return out;
}

// Escort images of one starting distribution along a schedule of orders:
// the trajectory a distribution follows as the order sharpens (q > 1) or
// flattens (q < 1) it.
inline std::vector<ProbDist> distortion_path(const ProbDist& p,
                                             const std::vector<double>& schedule) {
  if (schedule.empty()) throw DomainError("distortion schedule must be non-empty");
  std::vector<ProbDist> path;
  path.reserve(schedule.size());
  for (double q : schedule) path.push_back(escort_distribution(p, q));
  return path;
}

}  // namespace infodim
