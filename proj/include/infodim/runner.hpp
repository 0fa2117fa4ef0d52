#pragma once

#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "infodim/binned.hpp"
#include "infodim/catalog.hpp"
#include "infodim/common.hpp"
#include "infodim/complexity.hpp"
#include "infodim/info_measures.hpp"
#include "infodim/io.hpp"
#include "infodim/multifractal.hpp"
#include "infodim/prob_dist.hpp"
#include "infodim/simplex.hpp"

namespace infodim {

// Process exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;     // bad flags, names, grids
inline constexpr int kExitData = 2;      // unreadable or inconsistent inputs
inline constexpr int kExitNumeric = 3;   // computation broke down

namespace detail {

inline std::string output_name(const std::string& stem, const std::string& format) {
  return stem + (format == "json" ? ".json" : ".csv");
}

inline void emit_curve(const std::filesystem::path& dir, const std::string& stem,
                       const std::string& format, const DimensionCurve& c) {
  std::ostringstream os;
  if (format == "json")
    os << curve_json(c).dump(2) << '\n';
  else
    write_curve_csv(os, c);
  atomic_write_text(dir / output_name(stem, format), os.str());
}

inline void emit_map(const std::filesystem::path& dir, const std::string& stem,
                     const std::string& format, const ComplexityMap& m) {
  std::ostringstream os;
  if (format == "json")
    os << map_json(m).dump(2) << '\n';
  else
    write_map_csv(os, m);
  atomic_write_text(dir / output_name(stem, format), os.str());
}

inline void emit_field(const std::filesystem::path& dir, const std::string& stem,
                       const std::string& format, const FieldResult& f) {
  std::ostringstream os;
  if (format == "json")
    os << field_json(f).dump(2) << '\n';
  else
    write_field_csv(os, f);
  atomic_write_text(dir / output_name(stem, format), os.str());
}

inline bool valid_format(const std::string& format) {
  return format == "csv" || format == "json";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// measures subcommand

struct MeasuresConfig {
  std::optional<std::filesystem::path> dist_path;
  std::optional<std::filesystem::path> ref_path;
  std::optional<std::filesystem::path> binned_path;
  std::optional<std::filesystem::path> binned_ref_path;
  std::vector<std::string> measures;  // empty selects everything applicable
  std::vector<double> q_values{1.0};
  double alpha = 1.0;
  double beta = 2.0;
  std::filesystem::path out_dir{"."};
  std::string format{"csv"};
};

namespace detail {

enum class MeasureNeeds { Dist, DistRef, Binned, BinnedPair };

struct MeasureInfo {
  const char* name;
  bool per_q;   // one row per requested order
  bool pair;    // one row at (alpha, beta)
  MeasureNeeds needs;
};

inline const std::vector<MeasureInfo>& measure_registry() {
  static const std::vector<MeasureInfo> reg = {
      {"entropy", true, false, MeasureNeeds::Dist},
      {"diversity", true, false, MeasureNeeds::Dist},
      {"information_difference", true, false, MeasureNeeds::Dist},
      {"entropy_derivative", true, false, MeasureNeeds::Dist},
      {"redundancy", false, false, MeasureNeeds::Dist},
      {"c_lmc", false, false, MeasureNeeds::Dist},
      {"exp_c_lmc", false, false, MeasureNeeds::Dist},
      {"complexity", false, true, MeasureNeeds::Dist},
      {"divergence", true, false, MeasureNeeds::DistRef},
      {"kl", false, false, MeasureNeeds::DistRef},
      {"relative_diversity", true, false, MeasureNeeds::DistRef},
      {"divergence_derivative", true, false, MeasureNeeds::DistRef},
      {"relative_complexity", false, true, MeasureNeeds::DistRef},
      {"binned_entropy", true, false, MeasureNeeds::Binned},
      {"continuous_information_difference", true, false, MeasureNeeds::Binned},
      {"batty_spatial", false, false, MeasureNeeds::Binned},
      {"batty_scale", false, false, MeasureNeeds::Binned},
      {"batty_total", false, false, MeasureNeeds::Binned},
      {"binned_divergence", true, false, MeasureNeeds::BinnedPair},
  };
  return reg;
}

struct MeasureRow {
  std::string measure;
  std::optional<double> q;
  std::optional<double> alpha;
  std::optional<double> beta;
  double value = 0.0;
};

struct MeasureInputs {
  std::optional<ProbDist> dist;
  std::optional<ProbDist> ref;
  std::optional<BinnedDensity> binned;
  std::optional<BinnedDensity> binned_ref;
};

inline double eval_measure(const std::string& name, const MeasureInputs& in, double q,
                           OrderPair ab) {
  if (name == "entropy") return renyi_entropy(*in.dist, q);
  if (name == "diversity") return diversity_index(*in.dist, q);
  if (name == "information_difference") return information_difference(*in.dist, q);
  if (name == "entropy_derivative") return entropy_derivative(*in.dist, q);
  if (name == "redundancy") return redundancy(*in.dist);
  if (name == "c_lmc") return c_lmc(*in.dist);
  if (name == "exp_c_lmc") return exponential_c_lmc(*in.dist);
  if (name == "complexity") return generalized_complexity(*in.dist, ab);
  if (name == "divergence") return renyi_divergence(DistPair(*in.dist, *in.ref), q);
  if (name == "kl") return kl_divergence(DistPair(*in.dist, *in.ref));
  if (name == "relative_diversity")
    return relative_diversity_index(DistPair(*in.dist, *in.ref), q);
  if (name == "divergence_derivative")
    return divergence_derivative(DistPair(*in.dist, *in.ref), q);
  if (name == "relative_complexity")
    return generalized_relative_complexity(DistPair(*in.dist, *in.ref), ab);
  if (name == "binned_entropy") return binned_renyi_entropy(*in.binned, q);
  if (name == "continuous_information_difference")
    return continuous_information_difference(*in.binned, q);
  if (name == "batty_spatial") return batty_decomposition(*in.binned).spatial;
  if (name == "batty_scale") return batty_decomposition(*in.binned).scale;
  if (name == "batty_total") return batty_decomposition(*in.binned).total;
  if (name == "binned_divergence")
    return binned_renyi_divergence(*in.binned, *in.binned_ref, q);
  throw DomainError("unknown measure '" + name + "'");
}

inline void write_measures_csv(std::ostream& out, const std::vector<MeasureRow>& rows) {
  out << "measure,q,alpha,beta,value\n";
  for (const auto& r : rows) {
    out << r.measure << ',' << (r.q ? format_number(*r.q) : "") << ','
        << (r.alpha ? format_number(*r.alpha) : "") << ','
        << (r.beta ? format_number(*r.beta) : "") << ',' << csv_cell(r.value) << '\n';
  }
}

inline nlohmann::ordered_json measures_json(const std::vector<MeasureRow>& rows) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json o;
    o["measure"] = r.measure;
    o["q"] = r.q ? nlohmann::ordered_json(*r.q) : nlohmann::ordered_json(nullptr);
    o["alpha"] = r.alpha ? nlohmann::ordered_json(*r.alpha) : nlohmann::ordered_json(nullptr);
    o["beta"] = r.beta ? nlohmann::ordered_json(*r.beta) : nlohmann::ordered_json(nullptr);
    o["value"] = json_cell(r.value);
    arr.push_back(std::move(o));
  }
  return arr;
}

}  // namespace detail

inline int run_measures(const MeasuresConfig& cfg, std::ostream& diag, std::ostream& err) {
  using detail::MeasureNeeds;

  if (!detail::valid_format(cfg.format)) {
    err << "format must be csv or json\n";
    return kExitUsage;
  }
  if (!cfg.dist_path && !cfg.binned_path) {
    err << "measures needs --dist and/or --binned\n";
    return kExitUsage;
  }
  if (cfg.q_values.empty()) {
    err << "at least one order q is required\n";
    return kExitUsage;
  }
  for (double q : cfg.q_values)
    if (!std::isfinite(q)) {
      err << "orders must be finite\n";
      return kExitUsage;
    }
  if (!std::isfinite(cfg.alpha) || !std::isfinite(cfg.beta)) {
    err << "orders must be finite\n";
    return kExitUsage;
  }

  const auto available = [&](MeasureNeeds needs) {
    switch (needs) {
      case MeasureNeeds::Dist:
        return cfg.dist_path.has_value();
      case MeasureNeeds::DistRef:
        return cfg.dist_path.has_value() && cfg.ref_path.has_value();
      case MeasureNeeds::Binned:
        return cfg.binned_path.has_value();
      case MeasureNeeds::BinnedPair:
        return cfg.binned_path.has_value() && cfg.binned_ref_path.has_value();
    }
    return false;
  };

  // Resolve the measure selection before touching any file.
  std::vector<detail::MeasureInfo> selected;
  if (cfg.measures.empty()) {
    for (const auto& info : detail::measure_registry())
      if (available(info.needs)) selected.push_back(info);
  } else {
    for (const std::string& name : cfg.measures) {
      const detail::MeasureInfo* found = nullptr;
      for (const auto& info : detail::measure_registry())
        if (name == info.name) found = &info;
      if (!found) {
        err << "unknown measure '" << name << "'; known measures:";
        for (const auto& info : detail::measure_registry()) err << ' ' << info.name;
        err << '\n';
        return kExitUsage;
      }
      if (!available(found->needs)) {
        err << "measure '" << name << "' needs ";
        switch (found->needs) {
          case MeasureNeeds::Dist: err << "--dist"; break;
          case MeasureNeeds::DistRef: err << "--dist and --ref"; break;
          case MeasureNeeds::Binned: err << "--binned"; break;
          case MeasureNeeds::BinnedPair: err << "--binned and --binned-ref"; break;
        }
        err << '\n';
        return kExitUsage;
      }
      selected.push_back(*found);
    }
  }
  if (selected.empty()) {
    err << "no measure is applicable to the given inputs\n";
    return kExitUsage;
  }

  detail::MeasureInputs in;
  try {
    if (cfg.dist_path) in.dist = load_distribution(*cfg.dist_path);
    if (cfg.ref_path) in.ref = load_distribution(*cfg.ref_path);
    if (cfg.binned_path) in.binned = load_binned(*cfg.binned_path);
    if (cfg.binned_ref_path) in.binned_ref = load_binned(*cfg.binned_ref_path);
    if (in.dist && in.ref && in.dist->size() != in.ref->size())
      throw MismatchError("distribution and reference have different lengths (" +
                          std::to_string(in.dist->size()) + " vs " +
                          std::to_string(in.ref->size()) + ")");
    if (in.binned && in.binned_ref) {
      if (in.binned->size() != in.binned_ref->size())
        throw MismatchError("binned densities have different bin counts");
      for (std::size_t i = 0; i < in.binned->size(); ++i)
        if (!detail::nearly_equal(in.binned->widths()[i], in.binned_ref->widths()[i], 1e-9))
          throw MismatchError("binned densities use different partitions (bin " +
                              std::to_string(i) + ")");
    }
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitData;
  }

  const OrderPair ab{cfg.alpha, cfg.beta};
  std::vector<detail::MeasureRow> rows;
  for (const auto& info : selected) {
    std::vector<std::optional<double>> q_slots;
    if (info.per_q)
      for (double q : cfg.q_values) q_slots.emplace_back(q);
    else
      q_slots.emplace_back(std::nullopt);
    for (const auto& q : q_slots) {
      detail::MeasureRow row;
      row.measure = info.name;
      row.q = q;
      if (info.pair) {
        row.alpha = ab.alpha;
        row.beta = ab.beta;
      }
      try {
        row.value = detail::eval_measure(row.measure, in, q.value_or(1.0), ab);
      } catch (const Error& e) {
        row.value = missing_value();
        err << row.measure;
        if (q) err << " at q=" << format_number(*q);
        err << ": " << e.what() << '\n';
      }
      rows.push_back(std::move(row));
    }
  }

  try {
    std::filesystem::create_directories(cfg.out_dir);
    std::ostringstream os;
    if (cfg.format == "json")
      os << detail::measures_json(rows).dump(2) << '\n';
    else
      detail::write_measures_csv(os, rows);
    const auto path = cfg.out_dir / detail::output_name("measures", cfg.format);
    atomic_write_text(path, os.str());
    diag << "wrote " << path.string() << " (" << rows.size() << " rows)\n";
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simplex subcommand

struct SimplexConfig {
  std::string measure{"entropy"};
  int resolution = 200;
  double q = 1.0;
  double alpha = 1.0;
  double beta = 2.0;
  std::optional<std::filesystem::path> ref_path;
  std::filesystem::path out_dir{"."};
  std::string format{"csv"};
};

inline int run_simplex(const SimplexConfig& cfg, std::ostream& diag, std::ostream& err) {
  if (!detail::valid_format(cfg.format)) {
    err << "format must be csv or json\n";
    return kExitUsage;
  }
  if (cfg.resolution < 1) {
    err << "resolution must be at least 1\n";
    return kExitUsage;
  }
  if (!std::isfinite(cfg.q) || !std::isfinite(cfg.alpha) || !std::isfinite(cfg.beta)) {
    err << "orders must be finite\n";
    return kExitUsage;
  }
  FieldMeasure measure;
  try {
    measure = parse_field_measure(cfg.measure);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }
  if (measure == FieldMeasure::RelativeComplexity && !cfg.ref_path) {
    err << "relative complexity field needs --ref\n";
    return kExitUsage;
  }

  FieldSpec spec;
  spec.measure = measure;
  spec.q = cfg.q;
  spec.orders = OrderPair{cfg.alpha, cfg.beta};
  try {
    if (cfg.ref_path) {
      spec.reference = load_distribution(*cfg.ref_path);
      if (spec.reference->size() != 3)
        throw MismatchError("reference distribution must have three cells, got " +
                            std::to_string(spec.reference->size()));
    }
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitData;
  }

  try {
    const SimplexGrid grid(cfg.resolution);
    const FieldResult field = evaluate_field(grid, spec);
    std::filesystem::create_directories(cfg.out_dir);
    const std::string stem = "field_" + field_measure_name(measure);
    detail::emit_field(cfg.out_dir, stem, cfg.format, field);
    diag << "wrote " << (cfg.out_dir / detail::output_name(stem, cfg.format)).string()
         << " (" << field.points.size() << " points)\n";
  } catch (const NumericError& e) {
    err << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// mfa subcommand

struct MfaConfig {
  std::filesystem::path catalog_path;
  std::vector<double> phase_boundaries;
  double q_min = -10.0;
  double q_max = 10.0;
  double q_step = 0.25;
  int j_min = 3;
  int j_max = 11;
  bool energy = false;
  double energy_exponent = 1.5;
  std::size_t min_box_events = 1;
  TimeFormat time_format = TimeFormat::Auto;
  DimensionFitOptions fit;
  std::filesystem::path out_dir{"."};
  std::string format{"csv"};
};

inline int run_mfa(const MfaConfig& cfg, std::ostream& diag, std::ostream& err) {
  if (!detail::valid_format(cfg.format)) {
    err << "format must be csv or json\n";
    return kExitUsage;
  }
  std::vector<double> q_grid;
  try {
    q_grid = arithmetic_grid(cfg.q_min, cfg.q_max, cfg.q_step);
  } catch (const DomainError& e) {
    err << "bad q grid: " << e.what() << '\n';
    return kExitUsage;
  }
  if (cfg.j_min < 0 || cfg.j_max < cfg.j_min + 2) {
    err << "scale window must satisfy 0 <= j_min <= j_max - 2 "
           "(at least three dyadic scales)\n";
    return kExitUsage;
  }
  if (!std::isfinite(cfg.energy_exponent)) {
    err << "energy exponent must be finite\n";
    return kExitUsage;
  }
  if (cfg.min_box_events < 1) {
    err << "minimum box occupancy must be at least 1\n";
    return kExitUsage;
  }
  for (double b : cfg.phase_boundaries)
    if (!std::isfinite(b)) {
      err << "phase boundaries must be finite\n";
      return kExitUsage;
    }
  for (std::size_t i = 1; i < cfg.phase_boundaries.size(); ++i)
    if (cfg.phase_boundaries[i] <= cfg.phase_boundaries[i - 1]) {
      err << "phase boundaries must be strictly increasing\n";
      return kExitUsage;
    }

  EventCatalog catalog;
  try {
    catalog = load_catalog(cfg.catalog_path, cfg.time_format);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitData;
  }
  diag << "catalog: " << catalog.size() << " events, span "
       << format_number(catalog.time_span()) << "\n";

  const PhaseSplit split = split_phases(catalog, cfg.phase_boundaries);
  for (const auto& w : split.warnings) diag << "warning: " << w << '\n';

  try {
    std::filesystem::create_directories(cfg.out_dir);
  } catch (const std::exception& e) {
    err << "cannot create output directory: " << e.what() << '\n';
    return kExitData;
  }

  const auto order_grid = default_order_grid();
  bool any_output = false;
  bool data_failure = false;
  bool numeric_failure = false;

  for (std::size_t k = 0; k < split.phases.size(); ++k) {
    const EventCatalog& phase = split.phases[k];
    const std::string label = phase_label(k);
    const std::string base = "phase_" + label + "_";
    if (phase.size() < 2) {
      diag << "phase " << label << ": skipped (" << phase.size() << " events)\n";
      continue;
    }
    if (!(phase.time_span() > 0.0)) {
      diag << "phase " << label << ": skipped (zero time span)\n";
      continue;
    }
    try {
      const std::vector<double> scales = dyadic_scales(phase, cfg.j_min, cfg.j_max);
      std::vector<PartitionDistribution> freq;
      freq.reserve(scales.size());
      for (double eps : scales)
        freq.push_back(frequency_partition(phase, eps, cfg.min_box_events));

      const auto emit_curve_family = [&](const std::string& stem,
                                         const DimensionCurve& curve) {
        detail::emit_curve(cfg.out_dir, base + stem + "dimensions", cfg.format, curve);
        detail::emit_curve(cfg.out_dir, base + stem + "dimension_derivative", cfg.format,
                           dimension_derivative(curve));
        detail::emit_map(cfg.out_dir, base + stem + "increments", cfg.format,
                         dimension_increment_map(curve, order_grid, order_grid,
                                                 IncrementMode::Difference));
      };

      const DimensionCurve freq_curve = generalized_dimensions(freq, q_grid, cfg.fit);
      emit_curve_family("", freq_curve);

      if (cfg.energy) {
        std::vector<PartitionDistribution> en;
        en.reserve(scales.size());
        for (double eps : scales)
          en.push_back(
              energy_partition(phase, eps, cfg.energy_exponent, cfg.min_box_events));

        emit_curve_family("energy_", generalized_dimensions(en, q_grid, cfg.fit));

        const DimensionCurve fe = generalized_relative_dimensions(freq, en, q_grid, cfg.fit);
        const DimensionCurve ef = generalized_relative_dimensions(en, freq, q_grid, cfg.fit);
        emit_curve_family("relative_freq_energy_", fe);
        emit_curve_family("relative_energy_freq_", ef);
        emit_curve_family("relative_symmetrized_", symmetrized_relative_dimensions(fe, ef));
      }

      diag << "phase " << label << ": " << phase.size() << " events, scales 2^-"
           << cfg.j_min << "..2^-" << cfg.j_max << " of span "
           << format_number(phase.time_span()) << ", outputs " << base << "*\n";
      any_output = true;
    } catch (const NumericError& e) {
      err << "phase " << label << ": " << e.what() << '\n';
      numeric_failure = true;
    } catch (const Error& e) {
      err << "phase " << label << ": " << e.what() << '\n';
      data_failure = true;
    }
  }

  if (data_failure) return kExitData;
  if (numeric_failure) return kExitNumeric;
  if (!any_output) {
    err << "no phase could be analyzed\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace infodim
