#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "infodim/infodim.hpp"

namespace {

using infodim::kExitUsage;

std::optional<std::filesystem::path> optional_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::filesystem::path(s);
}

// One overridable setting: a config-file key tied to the command-line flag
// that takes precedence over it.
struct ConfigKey {
  std::string key;
  std::string flag;
  std::function<void(const nlohmann::json&)> apply;
};

// Overlays config-file values onto everything the user did not set on the
// command line. Returns false (after reporting) on an unreadable file,
// malformed JSON, unknown keys, or ill-typed values.
bool apply_config_file(CLI::App* sub, const std::filesystem::path& path,
                       const std::vector<ConfigKey>& keys) {
  nlohmann::json doc;
  {
    std::ifstream in(path);
    if (!in) {
      std::cerr << "cannot open config file " << path.string() << '\n';
      return false;
    }
    try {
      in >> doc;
    } catch (const std::exception& e) {
      std::cerr << "config file " << path.string() << ": " << e.what() << '\n';
      return false;
    }
  }
  if (!doc.is_object()) {
    std::cerr << "config file " << path.string() << " must hold a JSON object\n";
    return false;
  }
  for (const auto& [key, value] : doc.items()) {
    const ConfigKey* found = nullptr;
    for (const auto& k : keys)
      if (k.key == key) found = &k;
    if (!found) {
      std::cerr << "config file " << path.string() << ": unknown key '" << key << "'\n";
      return false;
    }
    if (sub->count(found->flag) > 0) continue;  // command line wins
    try {
      found->apply(value);
    } catch (const std::exception& e) {
      std::cerr << "config key '" << key << "': " << e.what() << '\n';
      return false;
    }
  }
  return true;
}

double json_number(const nlohmann::json& v) {
  if (!v.is_number()) throw infodim::ParseError("expected a number");
  return v.get<double>();
}

std::string json_string(const nlohmann::json& v) {
  if (!v.is_string()) throw infodim::ParseError("expected a string");
  return v.get<std::string>();
}

bool json_boolean(const nlohmann::json& v) {
  if (!v.is_boolean()) throw infodim::ParseError("expected a boolean");
  return v.get<bool>();
}

std::vector<double> json_number_list(const nlohmann::json& v) {
  if (!v.is_array()) throw infodim::ParseError("expected an array of numbers");
  std::vector<double> out;
  for (const auto& item : v) out.push_back(json_number(item));
  return out;
}

std::vector<std::string> json_string_list(const nlohmann::json& v) {
  if (!v.is_array()) throw infodim::ParseError("expected an array of strings");
  std::vector<std::string> out;
  for (const auto& item : v) out.push_back(json_string(item));
  return out;
}

bool parse_scale_window(const std::string& text, int& j_min, int& j_max) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return false;
  try {
    std::size_t used = 0;
    const int lo = std::stoi(text.substr(0, colon), &used);
    if (used != colon) return false;
    const std::string hi_part = text.substr(colon + 1);
    const int hi = std::stoi(hi_part, &used);
    if (used != hi_part.size()) return false;
    j_min = lo;
    j_max = hi;
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_time_format(const std::string& name, infodim::TimeFormat& out) {
  if (name == "auto") out = infodim::TimeFormat::Auto;
  else if (name == "iso8601") out = infodim::TimeFormat::Iso8601;
  else if (name == "epoch") out = infodim::TimeFormat::EpochSeconds;
  else return false;
  return true;
}

// Phase boundaries accept whatever the catalog's time column accepts, so a
// cut can be written as an ISO timestamp against an ISO catalog.
bool parse_boundaries(const std::vector<std::string>& tokens, std::vector<double>& out) {
  out.clear();
  for (const auto& t : tokens) {
    try {
      out.push_back(infodim::detail::parse_time_token(t, infodim::TimeFormat::Auto,
                                                      "phase boundary"));
    } catch (const infodim::ParseError& e) {
      std::cerr << e.what() << '\n';
      return false;
    }
  }
  return true;
}

struct MeasuresCli {
  CLI::App* sub = nullptr;
  std::string dist, ref, binned, binned_ref;
  std::vector<std::string> measures;
  std::vector<double> q_values;
  double alpha = 1.0;
  double beta = 2.0;
  std::string out_dir = ".";
  std::string format = "csv";
  std::string config;
};

void setup_measures(CLI::App& app, MeasuresCli& c) {
  c.sub = app.add_subcommand(
      "measures", "Entropy, diversity and complexity measures of distributions");
  c.sub->add_option("--dist", c.dist, "Distribution CSV (weights)");
  c.sub->add_option("--ref", c.ref, "Reference distribution CSV for relative measures");
  c.sub->add_option("--binned", c.binned, "Binned density CSV (left,right,probability)");
  c.sub->add_option("--binned-ref", c.binned_ref, "Reference binned density CSV");
  c.sub->add_option("--measures", c.measures, "Measures to compute (default: all applicable)")
      ->delimiter(',');
  c.sub->add_option("--q", c.q_values, "Orders q (default: 1)")->delimiter(',');
  c.sub->add_option("--alpha", c.alpha, "First order of the complexity pair");
  c.sub->add_option("--beta", c.beta, "Second order of the complexity pair");
  c.sub->add_option("--out", c.out_dir, "Output directory");
  c.sub->add_option("--format", c.format, "Output format: csv or json");
  c.sub->add_option("--config", c.config, "JSON config file (flags take precedence)");
}

int dispatch_measures(MeasuresCli& c) {
  if (!c.config.empty()) {
    const std::vector<ConfigKey> keys = {
        {"dist", "--dist", [&](const nlohmann::json& v) { c.dist = json_string(v); }},
        {"ref", "--ref", [&](const nlohmann::json& v) { c.ref = json_string(v); }},
        {"binned", "--binned", [&](const nlohmann::json& v) { c.binned = json_string(v); }},
        {"binned_ref", "--binned-ref",
         [&](const nlohmann::json& v) { c.binned_ref = json_string(v); }},
        {"measures", "--measures",
         [&](const nlohmann::json& v) { c.measures = json_string_list(v); }},
        {"q", "--q", [&](const nlohmann::json& v) { c.q_values = json_number_list(v); }},
        {"alpha", "--alpha", [&](const nlohmann::json& v) { c.alpha = json_number(v); }},
        {"beta", "--beta", [&](const nlohmann::json& v) { c.beta = json_number(v); }},
        {"out", "--out", [&](const nlohmann::json& v) { c.out_dir = json_string(v); }},
        {"format", "--format", [&](const nlohmann::json& v) { c.format = json_string(v); }},
    };
    if (!apply_config_file(c.sub, c.config, keys)) return kExitUsage;
  }
  infodim::MeasuresConfig cfg;
  cfg.dist_path = optional_path(c.dist);
  cfg.ref_path = optional_path(c.ref);
  cfg.binned_path = optional_path(c.binned);
  cfg.binned_ref_path = optional_path(c.binned_ref);
  cfg.measures = c.measures;
  if (!c.q_values.empty()) cfg.q_values = c.q_values;
  cfg.alpha = c.alpha;
  cfg.beta = c.beta;
  cfg.out_dir = c.out_dir;
  cfg.format = c.format;
  return infodim::run_measures(cfg, std::cout, std::cerr);
}

struct SimplexCli {
  CLI::App* sub = nullptr;
  std::string measure = "entropy";
  int resolution = 200;
  double q = 1.0;
  double alpha = 1.0;
  double beta = 2.0;
  std::string ref;
  std::string out_dir = ".";
  std::string format = "csv";
  std::string config;
};

void setup_simplex(CLI::App& app, SimplexCli& c) {
  c.sub = app.add_subcommand(
      "simplex", "Measure fields over the three-part probability simplex");
  c.sub->add_option("--measure", c.measure,
                    "Field measure (entropy, diversity, information_difference, c_lmc, "
                    "complexity, relative_complexity, entropy_derivative)");
  c.sub->add_option("--resolution", c.resolution, "Grid subdivisions per edge");
  c.sub->add_option("--q", c.q, "Order for single-order measures");
  c.sub->add_option("--alpha", c.alpha, "First order of the complexity pair");
  c.sub->add_option("--beta", c.beta, "Second order of the complexity pair");
  c.sub->add_option("--ref", c.ref, "Reference distribution CSV (three cells)");
  c.sub->add_option("--out", c.out_dir, "Output directory");
  c.sub->add_option("--format", c.format, "Output format: csv or json");
  c.sub->add_option("--config", c.config, "JSON config file (flags take precedence)");
}

int dispatch_simplex(SimplexCli& c) {
  if (!c.config.empty()) {
    const std::vector<ConfigKey> keys = {
        {"measure", "--measure", [&](const nlohmann::json& v) { c.measure = json_string(v); }},
        {"resolution", "--resolution",
         [&](const nlohmann::json& v) { c.resolution = static_cast<int>(json_number(v)); }},
        {"q", "--q", [&](const nlohmann::json& v) { c.q = json_number(v); }},
        {"alpha", "--alpha", [&](const nlohmann::json& v) { c.alpha = json_number(v); }},
        {"beta", "--beta", [&](const nlohmann::json& v) { c.beta = json_number(v); }},
        {"ref", "--ref", [&](const nlohmann::json& v) { c.ref = json_string(v); }},
        {"out", "--out", [&](const nlohmann::json& v) { c.out_dir = json_string(v); }},
        {"format", "--format", [&](const nlohmann::json& v) { c.format = json_string(v); }},
    };
    if (!apply_config_file(c.sub, c.config, keys)) return kExitUsage;
  }
  infodim::SimplexConfig cfg;
  cfg.measure = c.measure;
  cfg.resolution = c.resolution;
  cfg.q = c.q;
  cfg.alpha = c.alpha;
  cfg.beta = c.beta;
  cfg.ref_path = optional_path(c.ref);
  cfg.out_dir = c.out_dir;
  cfg.format = c.format;
  return infodim::run_simplex(cfg, std::cout, std::cerr);
}

struct MfaCli {
  CLI::App* sub = nullptr;
  std::string catalog;
  std::vector<std::string> phases;
  double q_min = -10.0;
  double q_max = 10.0;
  double q_step = 0.25;
  std::string scales = "3:11";
  bool energy = false;
  double energy_exponent = 1.5;
  std::size_t min_box_events = 1;
  std::string time_format = "auto";
  double monotone_slack = 1e-3;
  bool lenient_monotone = false;
  std::string out_dir = ".";
  std::string format = "csv";
  std::string config;
};

void setup_mfa(CLI::App& app, MfaCli& c) {
  c.sub = app.add_subcommand(
      "mfa", "Box-counting generalized dimensions of an event catalog");
  c.sub->add_option("--catalog", c.catalog, "Event catalog CSV");
  c.sub->add_option("--phases", c.phases,
                    "Phase boundary times (epoch seconds or ISO-8601)")
      ->delimiter(',');
  c.sub->add_option("--q-min", c.q_min, "Lowest order");
  c.sub->add_option("--q-max", c.q_max, "Highest order");
  c.sub->add_option("--q-step", c.q_step, "Order grid step");
  c.sub->add_option("--scales", c.scales,
                    "Dyadic scale window jmin:jmax (box width = span * 2^-j)");
  c.sub->add_flag("--energy", c.energy,
                  "Also analyze the energy-weighted measure and the relative "
                  "dimensions between the two");
  c.sub->add_option("--energy-exponent", c.energy_exponent,
                    "b in the event energy 10^(b * magnitude)");
  c.sub->add_option("--min-box-events", c.min_box_events,
                    "Discard boxes with fewer events than this");
  c.sub->add_option("--time-format", c.time_format,
                    "Catalog time parsing: auto, iso8601 or epoch");
  c.sub->add_option("--monotone-slack", c.monotone_slack,
                    "Tolerated monotonicity violation in estimated curves");
  c.sub->add_flag("--lenient-monotone", c.lenient_monotone,
                  "Report monotonicity violations instead of failing");
  c.sub->add_option("--out", c.out_dir, "Output directory");
  c.sub->add_option("--format", c.format, "Output format: csv or json");
  c.sub->add_option("--config", c.config, "JSON config file (flags take precedence)");
}

int dispatch_mfa(MfaCli& c) {
  if (!c.config.empty()) {
    const std::vector<ConfigKey> keys = {
        {"catalog", "--catalog", [&](const nlohmann::json& v) { c.catalog = json_string(v); }},
        {"phases", "--phases",
         [&](const nlohmann::json& v) {
           c.phases.clear();
           if (!v.is_array()) throw infodim::ParseError("expected an array");
           for (const auto& item : v) {
             if (item.is_number())
               c.phases.push_back(infodim::format_number(item.get<double>()));
             else
               c.phases.push_back(json_string(item));
           }
         }},
        {"q_min", "--q-min", [&](const nlohmann::json& v) { c.q_min = json_number(v); }},
        {"q_max", "--q-max", [&](const nlohmann::json& v) { c.q_max = json_number(v); }},
        {"q_step", "--q-step", [&](const nlohmann::json& v) { c.q_step = json_number(v); }},
        {"scales", "--scales", [&](const nlohmann::json& v) { c.scales = json_string(v); }},
        {"energy", "--energy", [&](const nlohmann::json& v) { c.energy = json_boolean(v); }},
        {"energy_exponent", "--energy-exponent",
         [&](const nlohmann::json& v) { c.energy_exponent = json_number(v); }},
        {"min_box_events", "--min-box-events",
         [&](const nlohmann::json& v) {
           const double n = json_number(v);
           if (n < 1) throw infodim::ParseError("expected a positive count");
           c.min_box_events = static_cast<std::size_t>(n);
         }},
        {"time_format", "--time-format",
         [&](const nlohmann::json& v) { c.time_format = json_string(v); }},
        {"monotone_slack", "--monotone-slack",
         [&](const nlohmann::json& v) { c.monotone_slack = json_number(v); }},
        {"lenient_monotone", "--lenient-monotone",
         [&](const nlohmann::json& v) { c.lenient_monotone = json_boolean(v); }},
        {"out", "--out", [&](const nlohmann::json& v) { c.out_dir = json_string(v); }},
        {"format", "--format", [&](const nlohmann::json& v) { c.format = json_string(v); }},
    };
    if (!apply_config_file(c.sub, c.config, keys)) return kExitUsage;
  }
  if (c.catalog.empty()) {
    std::cerr << "mfa needs --catalog\n";
    return kExitUsage;
  }
  infodim::MfaConfig cfg;
  cfg.catalog_path = c.catalog;
  if (!parse_boundaries(c.phases, cfg.phase_boundaries)) return kExitUsage;
  cfg.q_min = c.q_min;
  cfg.q_max = c.q_max;
  cfg.q_step = c.q_step;
  if (!parse_scale_window(c.scales, cfg.j_min, cfg.j_max)) {
    std::cerr << "bad --scales value '" << c.scales << "', expected jmin:jmax\n";
    return kExitUsage;
  }
  cfg.energy = c.energy;
  cfg.energy_exponent = c.energy_exponent;
  cfg.min_box_events = c.min_box_events;
  if (!parse_time_format(c.time_format, cfg.time_format)) {
    std::cerr << "bad --time-format value '" << c.time_format
              << "', expected auto, iso8601 or epoch\n";
    return kExitUsage;
  }
  cfg.fit.monotone_slack = c.monotone_slack;
  cfg.fit.enforce_monotone = !c.lenient_monotone;
  cfg.out_dir = c.out_dir;
  cfg.format = c.format;
  return infodim::run_mfa(cfg, std::cout, std::cerr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy, complexity and generalized-dimension calculator"};
  app.require_subcommand(1);

  MeasuresCli measures;
  SimplexCli simplex;
  MfaCli mfa;
  setup_measures(app, measures);
  setup_simplex(app, simplex);
  setup_mfa(app, mfa);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  if (measures.sub->parsed()) return dispatch_measures(measures);
  if (simplex.sub->parsed()) return dispatch_simplex(simplex);
  if (mfa.sub->parsed()) return dispatch_mfa(mfa);
  return kExitUsage;
}
