#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "infodim/binned.hpp"
#include "infodim/catalog.hpp"
#include "infodim/common.hpp"
#include "infodim/complexity.hpp"
#include "infodim/multifractal.hpp"
#include "infodim/prob_dist.hpp"
#include "infodim/simplex.hpp"

namespace infodim {

// Fixed 15-significant-digit form; all emitted numbers go through this so
// outputs are byte-stable across runs.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

// Missing values are empty cells in CSV and null in JSON.
inline std::string csv_cell(double v) { return is_missing(v) ? std::string() : format_number(v); }

inline nlohmann::ordered_json json_cell(double v) {
  if (is_missing(v)) return nullptr;
  return v;
}

namespace detail {

inline double parse_strict_double(const std::string& token, const std::string& where) {
  double v = 0.0;
  if (!parse_full_double(token, v))
    throw ParseError(where + ": expected a number, got '" + token + "'");
  return v;
}

}  // namespace detail

// Weight vector from CSV: either one weight per line or a single
// comma-separated row. Blank lines are ignored.
inline ProbDist read_distribution_csv(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::pair<std::size_t, std::string>> kept;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (!t.empty()) kept.emplace_back(line_no, t);
  }
  if (kept.empty()) throw ParseError("distribution file contains no values");

  std::vector<double> w;
  if (kept.size() == 1 && kept[0].second.find(',') != std::string::npos) {
    const auto fields = detail::split_fields(kept[0].second);
    for (const auto& f : fields)
      w.push_back(detail::parse_strict_double(f, "line " + std::to_string(kept[0].first)));
  } else {
    for (const auto& [no, text] : kept)
      w.push_back(detail::parse_strict_double(text, "line " + std::to_string(no)));
  }
  try {
    return ProbDist::from_weights(std::move(w));
  } catch (const DomainError& e) {
    throw ParseError(std::string("invalid distribution: ") + e.what());
  }
}

// Binned density from CSV rows left,right,probability. A header row is
// recognized by a non-numeric first field. Probabilities must already sum
// to one.
inline BinnedDensity read_binned_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> probs;
  std::vector<double> widths;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto fields = detail::split_fields(t);
    const std::string where = "line " + std::to_string(line_no);
    if (first_content) {
      first_content = false;
      double probe = 0.0;
      if (!detail::parse_full_double(fields[0], probe)) continue;  // header row
    }
    if (fields.size() != 3)
      throw ParseError(where + ": expected left,right,probability");
    const double left = detail::parse_strict_double(fields[0], where);
    const double right = detail::parse_strict_double(fields[1], where);
    const double prob = detail::parse_strict_double(fields[2], where);
    if (!(right > left))
      throw ParseError(where + ": bin right edge must exceed left edge");
    widths.push_back(right - left);
    probs.push_back(prob);
  }
  if (probs.empty()) throw ParseError("binned file contains no bins");
  try {
    return BinnedDensity(ProbDist::from_probabilities(std::move(probs)), std::move(widths));
  } catch (const DomainError& e) {
    throw ParseError(std::string("invalid binned density: ") + e.what());
  }
}

namespace detail {

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return in;
}

}  // namespace detail

inline ProbDist load_distribution(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  try {
    return read_distribution_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline BinnedDensity load_binned(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  try {
    return read_binned_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline EventCatalog load_catalog(const std::filesystem::path& path,
                                 TimeFormat fmt = TimeFormat::Auto) {
  auto in = detail::open_input(path);
  try {
    return parse_catalog(in, fmt);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

// All output files are written to a temporary sibling first and renamed into
// place, so readers never observe a half-written file.
inline void atomic_write_text(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot move " + tmp.string() + " into place: " + ec.message());
}

inline void write_curve_csv(std::ostream& out, const DimensionCurve& c) {
  out << "q,value,r_squared\n";
  for (std::size_t i = 0; i < c.q_grid.size(); ++i)
    out << format_number(c.q_grid[i]) << ',' << csv_cell(c.values[i]) << ','
        << csv_cell(c.r_squared[i]) << '\n';
}

inline DimensionCurve read_curve_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || detail::split_fields(line).size() != 3)
    throw ParseError("curve file lacks the q,value,r_squared header");
  DimensionCurve c;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto fields = detail::split_fields(t);
    const std::string where = "line " + std::to_string(line_no);
    if (fields.size() != 3) throw ParseError(where + ": expected q,value,r_squared");
    c.q_grid.push_back(detail::parse_strict_double(fields[0], where));
    c.values.push_back(fields[1].empty() ? missing_value()
                                         : detail::parse_strict_double(fields[1], where));
    c.r_squared.push_back(fields[2].empty()
                              ? missing_value()
                              : detail::parse_strict_double(fields[2], where));
  }
  if (c.q_grid.empty()) throw ParseError("curve file contains no rows");
  return c;
}

// Matrix layout: first row lists the beta grid, first column the alpha grid.
inline void write_map_csv(std::ostream& out, const ComplexityMap& m) {
  out << "alpha\\beta";
  for (double b : m.beta_grid) out << ',' << format_number(b);
  out << '\n';
  for (std::size_t i = 0; i < m.alpha_grid.size(); ++i) {
    out << format_number(m.alpha_grid[i]);
    for (std::size_t j = 0; j < m.beta_grid.size(); ++j) out << ',' << csv_cell(m.at(i, j));
    out << '\n';
  }
}

inline void write_field_csv(std::ostream& out, const FieldResult& f) {
  out << "p1,p2,p3,value\n";
  const double r = static_cast<double>(f.resolution);
  for (std::size_t idx = 0; idx < f.points.size(); ++idx) {
    const auto& pt = f.points[idx];
    out << format_number(pt.i / r) << ',' << format_number(pt.j / r) << ','
        << format_number(pt.k / r) << ',' << csv_cell(f.values[idx]) << '\n';
  }
}

inline nlohmann::ordered_json curve_json(const DimensionCurve& c) {
  auto values = nlohmann::ordered_json::array();
  auto r2 = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < c.q_grid.size(); ++i) {
    values.push_back(json_cell(c.values[i]));
    r2.push_back(json_cell(c.r_squared[i]));
  }
  nlohmann::ordered_json j;
  j["q"] = c.q_grid;
  j["value"] = std::move(values);
  j["r_squared"] = std::move(r2);
  return j;
}

inline nlohmann::ordered_json map_json(const ComplexityMap& m) {
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.alpha_grid.size(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < m.beta_grid.size(); ++k) row.push_back(json_cell(m.at(i, k)));
    rows.push_back(std::move(row));
  }
  nlohmann::ordered_json j;
  j["alpha"] = m.alpha_grid;
  j["beta"] = m.beta_grid;
  j["values"] = std::move(rows);
  return j;
}

inline nlohmann::ordered_json field_json(const FieldResult& f) {
  const double r = static_cast<double>(f.resolution);
  auto points = nlohmann::ordered_json::array();
  auto values = nlohmann::ordered_json::array();
  for (std::size_t idx = 0; idx < f.points.size(); ++idx) {
    const auto& pt = f.points[idx];
    points.push_back({pt.i / r, pt.j / r, pt.k / r});
    values.push_back(json_cell(f.values[idx]));
  }
  nlohmann::ordered_json j;
  j["resolution"] = f.resolution;
  j["points"] = std::move(points);
  j["values"] = std::move(values);
  return j;
}

}  // namespace infodim
