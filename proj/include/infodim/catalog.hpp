#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "infodim/common.hpp"
#include "infodim/multifractal.hpp"
#include "infodim/prob_dist.hpp"

namespace infodim {

// One catalog row: an event time on a common linear axis (seconds), its
// magnitude, and optional location fields.
struct Event {
  double time = 0.0;
  double magnitude = 0.0;
  std::optional<double> lon;
  std::optional<double> lat;
  std::optional<double> depth_km;
};

enum class TimeFormat {
  Auto,          // numeric token -> epoch seconds, otherwise ISO-8601
  Iso8601,
  EpochSeconds,
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline bool parse_full_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

// Days since 1970-01-01 for a proleptic Gregorian date (Howard Hinnant's
// civil-date algorithm).
inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline bool leap_year(std::int64_t y) {
  return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

inline unsigned days_in_month(std::int64_t y, unsigned m) {
  static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && leap_year(y)) return 29;
  return kDays[m - 1];
}

// ISO-8601 timestamp to seconds since the epoch. Accepts a date with an
// optional time part ('T' or space separated), fractional seconds, and an
// optional zone: Z, +HH:MM, +HHMM, or +HH. Naive timestamps are taken as
// already being on the common axis.
inline double parse_iso8601(const std::string& token, const std::string& where) {
  const char* p = token.c_str();
  auto fail = [&](const std::string& why) -> double {
    throw ParseError(where + ": bad timestamp '" + token + "' (" + why + ")");
  };
  auto read_digits = [&](int count, long& out) -> bool {
    long v = 0;
    for (int i = 0; i < count; ++i) {
      if (!std::isdigit(static_cast<unsigned char>(p[i]))) return false;
      v = v * 10 + (p[i] - '0');
    }
    out = v;
    p += count;
    return true;
  };

  long year = 0, month = 0, day = 0;
  if (!read_digits(4, year)) return fail("expected YYYY-MM-DD");
  if (*p++ != '-') return fail("expected YYYY-MM-DD");
  if (!read_digits(2, month)) return fail("expected YYYY-MM-DD");
  if (*p++ != '-') return fail("expected YYYY-MM-DD");
  if (!read_digits(2, day)) return fail("expected YYYY-MM-DD");
  if (month < 1 || month > 12) return fail("month out of range");
  if (day < 1 ||
      day > static_cast<long>(days_in_month(year, static_cast<unsigned>(month))))
    return fail("day out of range");

  long hour = 0, minute = 0, second = 0;
  double fraction = 0.0;
  if (*p == 'T' || *p == ' ') {
    ++p;
    if (!read_digits(2, hour)) return fail("expected HH:MM:SS");
    if (*p++ != ':') return fail("expected HH:MM:SS");
    if (!read_digits(2, minute)) return fail("expected HH:MM:SS");
    if (*p++ != ':') return fail("expected HH:MM:SS");
    if (!read_digits(2, second)) return fail("expected HH:MM:SS");
    if (hour > 23 || minute > 59 || second > 60) return fail("time of day out of range");
    if (*p == '.') {
      ++p;
      double scale = 0.1;
      if (!std::isdigit(static_cast<unsigned char>(*p)))
        return fail("empty fractional seconds");
      while (std::isdigit(static_cast<unsigned char>(*p))) {
        fraction += (*p - '0') * scale;
        scale *= 0.1;
        ++p;
      }
    }
  }

  long offset_seconds = 0;
  if (*p == 'Z') {
    ++p;
  } else if (*p == '+' || *p == '-') {
    const int sign = (*p == '-') ? -1 : 1;
    ++p;
    long oh = 0, om = 0;
    if (!read_digits(2, oh)) return fail("bad zone offset");
    if (*p == ':') ++p;
    if (std::isdigit(static_cast<unsigned char>(*p))) {
      if (!read_digits(2, om)) return fail("bad zone offset");
    }
    if (oh > 23 || om > 59) return fail("zone offset out of range");
    offset_seconds = sign * (oh * 3600 + om * 60);
  }
  if (*p != '\0') return fail("trailing characters");

  const std::int64_t days =
      days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
  const double base = static_cast<double>(days) * 86400.0 +
                      static_cast<double>(hour * 3600 + minute * 60 + second);
  return base + fraction - static_cast<double>(offset_seconds);
}

inline double parse_time_token(const std::string& token, TimeFormat fmt,
                               const std::string& where) {
  double num = 0.0;
  switch (fmt) {
    case TimeFormat::EpochSeconds:
      if (!parse_full_double(token, num))
        throw ParseError(where + ": bad epoch time '" + token + "'");
      return num;
    case TimeFormat::Iso8601:
      return parse_iso8601(token, where);
    case TimeFormat::Auto:
    default:
      if (parse_full_double(token, num)) return num;
      return parse_iso8601(token, where);
  }
}

}  // namespace detail

// Time-ordered event list. Construction sorts by time (stable, so equal
// times keep file order) and validates that times and magnitudes are finite.
// Empty catalogs are representable so that phase splitting can flag them.
class EventCatalog {
 public:
  EventCatalog() = default;

  explicit EventCatalog(std::vector<Event> events) : events_(std::move(events)) {
    for (const Event& e : events_) {
      if (!std::isfinite(e.time)) throw DomainError("event times must be finite");
      if (!std::isfinite(e.magnitude)) throw DomainError("event magnitudes must be finite");
    }
    std::stable_sort(events_.begin(), events_.end(),
                     [](const Event& a, const Event& b) { return a.time < b.time; });
  }

  const std::vector<Event>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  double min_time() const {
    require_nonempty();
    return events_.front().time;
  }
  double max_time() const {
    require_nonempty();
    return events_.back().time;
  }
  double time_span() const { return max_time() - min_time(); }

 private:
  void require_nonempty() const {
    if (events_.empty()) throw DomainError("catalog has no events");
  }

  std::vector<Event> events_;
};

// Header-driven catalog CSV: columns time and magnitude are required, lon,
// lat and depth_km are optional, anything else is ignored. Optional cells
// may be empty. Times are ISO-8601 or epoch seconds, auto-detected per cell
// unless a format is forced.
inline EventCatalog parse_catalog(std::istream& in, TimeFormat fmt = TimeFormat::Auto) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("catalog is empty (missing header)");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB &&
      static_cast<unsigned char>(line[2]) == 0xBF)
    line.erase(0, 3);

  const std::vector<std::string> header = detail::split_fields(line);
  std::map<std::string, std::size_t> columns;
  for (std::size_t i = 0; i < header.size(); ++i) columns[detail::lower(header[i])] = i;

  const auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    const auto it = columns.find(name);
    if (it == columns.end()) return std::nullopt;
    return it->second;
  };
  const auto time_col = column("time");
  const auto mag_col = column("magnitude");
  if (!time_col || !mag_col) {
    std::string missing;
    if (!time_col) missing = "time";
    if (!mag_col) missing += missing.empty() ? "magnitude" : ", magnitude";
    throw ParseError("catalog header lacks required column(s): " + missing);
  }
  const auto lon_col = column("lon");
  const auto lat_col = column("lat");
  const auto depth_col = column("depth_km");

  std::vector<Event> events;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const std::vector<std::string> fields = detail::split_fields(line);
    const std::string where = "line " + std::to_string(line_no);
    if (fields.size() != header.size())
      throw ParseError(where + ": expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(fields.size()));

    Event e;
    e.time = detail::parse_time_token(fields[*time_col], fmt, where);
    if (!std::isfinite(e.time)) throw ParseError(where + ": non-finite time");
    if (!detail::parse_full_double(fields[*mag_col], e.magnitude) ||
        !std::isfinite(e.magnitude))
      throw ParseError(where + ": bad magnitude '" + fields[*mag_col] + "'");

    const auto optional_field = [&](std::optional<std::size_t> col,
                                    const char* name) -> std::optional<double> {
      if (!col || fields[*col].empty()) return std::nullopt;
      double v = 0.0;
      if (!detail::parse_full_double(fields[*col], v))
        throw ParseError(where + ": bad " + std::string(name) + " '" + fields[*col] + "'");
      return v;
    };
    e.lon = optional_field(lon_col, "lon");
    e.lat = optional_field(lat_col, "lat");
    e.depth_km = optional_field(depth_col, "depth_km");
    events.push_back(e);
  }
  if (events.empty()) throw ParseError("catalog contains no events");
  return EventCatalog(std::move(events));
}

inline std::string phase_label(std::size_t index) {
  std::string label;
  do {
    label.insert(label.begin(), static_cast<char>('A' + index % 26));
    index = index / 26;
  } while (index-- > 0);
  return label;
}

// Catalog cut at the given boundary times into consecutive phases. An event
// at a boundary belongs to the later phase. Boundaries outside the catalog
// span are allowed; the resulting empty phases are reported as warnings, not
// errors.
struct PhaseSplit {
  std::vector<EventCatalog> phases;
  std::vector<std::string> warnings;
};

inline PhaseSplit split_phases(const EventCatalog& catalog,
                               const std::vector<double>& boundaries) {
  for (double b : boundaries)
    if (!std::isfinite(b)) throw DomainError("phase boundaries must be finite");
  for (std::size_t i = 1; i < boundaries.size(); ++i)
    if (boundaries[i] <= boundaries[i - 1])
      throw DomainError("phase boundaries must be strictly increasing");

  PhaseSplit out;
  std::size_t start = 0;
  const auto& ev = catalog.events();
  for (std::size_t k = 0; k <= boundaries.size(); ++k) {
    std::size_t end = ev.size();
    if (k < boundaries.size()) {
      end = start;
      while (end < ev.size() && ev[end].time < boundaries[k]) ++end;
    }
    out.phases.emplace_back(std::vector<Event>(ev.begin() + static_cast<std::ptrdiff_t>(start),
                                               ev.begin() + static_cast<std::ptrdiff_t>(end)));
    start = end;
  }
  for (std::size_t k = 0; k < out.phases.size(); ++k)
    if (out.phases[k].empty())
      out.warnings.push_back("phase " + phase_label(k) + " contains no events");
  return out;
}

namespace detail {

// Shared box-counting core: events are dropped into boxes of width eps
// anchored at the first event, each contributing the given weight; boxes
// with fewer events than the occupancy floor are discarded before
// normalization.
template <typename WeightFn>
PartitionDistribution boxed_partition(const EventCatalog& catalog, double eps,
                                      WeightFn weight, std::size_t min_events) {
  if (catalog.size() < 2)
    throw DomainError("box counting needs at least two events");
  if (!(std::isfinite(eps) && eps > 0.0))
    throw DomainError("box scale must be positive and finite");
  if (min_events < 1) throw DomainError("occupancy floor must be at least 1");

  struct Box {
    double weight_sum = 0.0;
    std::size_t count = 0;
  };
  std::map<std::int64_t, Box> boxes;
  const double t0 = catalog.min_time();
  for (const Event& e : catalog.events()) {
    const auto idx = static_cast<std::int64_t>(std::floor((e.time - t0) / eps));
    Box& box = boxes[idx];
    const double w = weight(e);
    if (!(std::isfinite(w) && w > 0.0))
      throw DomainError("event weight must be positive and finite");
    box.weight_sum += w;
    box.count += 1;
  }

  std::vector<std::int64_t> kept;
  std::vector<double> weights;
  for (const auto& [idx, box] : boxes) {
    if (box.count < min_events) continue;
    kept.push_back(idx);
    weights.push_back(box.weight_sum);
  }
  if (kept.empty())
    throw DomainError("occupancy floor " + std::to_string(min_events) +
                      " removed every box");
  return PartitionDistribution(eps, std::move(kept),
                               ProbDist::from_weights(std::move(weights)));
}

}  // namespace detail

// Box masses proportional to event counts.
inline PartitionDistribution frequency_partition(const EventCatalog& catalog, double eps,
                                                 std::size_t min_events = 1) {
  return detail::boxed_partition(catalog, eps, [](const Event&) { return 1.0; },
                                 min_events);
}

// Box masses proportional to summed event energies 10^(exponent * magnitude).
inline PartitionDistribution energy_partition(const EventCatalog& catalog, double eps,
                                              double exponent = 1.5,
                                              std::size_t min_events = 1) {
  if (!std::isfinite(exponent)) throw DomainError("energy exponent must be finite");
  return detail::boxed_partition(
      catalog, eps,
      [exponent](const Event& e) { return std::pow(10.0, exponent * e.magnitude); },
      min_events);
}

// Dyadic ladder of box widths eps_j = span * 2^-j for j in [j_min, j_max].
inline std::vector<double> dyadic_scales(const EventCatalog& catalog, int j_min,
                                         int j_max) {
  if (j_min < 0 || j_max < j_min)
    throw DomainError("scale ladder needs 0 <= j_min <= j_max");
  const double span = catalog.time_span();
  if (!(span > 0.0))
    throw DomainError("catalog span is zero; box scales would be degenerate");
  std::vector<double> eps;
  eps.reserve(static_cast<std::size_t>(j_max - j_min) + 1);
  for (int j = j_min; j <= j_max; ++j) eps.push_back(std::ldexp(span, -j));
  return eps;
}

}  // namespace infodim
