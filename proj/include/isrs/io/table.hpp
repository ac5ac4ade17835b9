#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "isrs/errors.hpp"
#include "isrs/multispan.hpp"
#include "isrs/ode_oracle.hpp"
#include "isrs/spectrum.hpp"
#include "isrs/units.hpp"

namespace isrs::io {

/// Numbers are written with 9 significant digits.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

using Cell = std::variant<double, long long, std::string>;

/// A plain result table rendered as CSV or as a JSON array of row objects.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("table row width mismatch");
    rows.push_back(std::move(row));
  }

  void write_csv(std::ostream& os) const {
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
    os << '\n';
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) os << ',';
        std::visit(
            [&os](const auto& v) {
              using V = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<V, double>)
                os << format_number(v);
              else
                os << v;
            },
            row[c]);
      }
      os << '\n';
    }
  }

  /// Non-finite numbers become null (JSON has no infinities).
  nlohmann::ordered_json to_json() const {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
      nlohmann::ordered_json o;
      for (std::size_t c = 0; c < row.size(); ++c)
        std::visit(
            [&](const auto& v) {
              using V = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<V, double>) {
                if (std::isfinite(v))
                  o[columns[c]] = std::stod(format_number(v));
                else
                  o[columns[c]] = nullptr;
              } else {
                o[columns[c]] = v;
              }
            },
            row[c]);
      arr.push_back(std::move(o));
    }
    return arr;
  }
};

enum class Format { csv, json };

/// Writes `table` to dir/stem.{csv,json}; returns the path.
inline std::filesystem::path write_table(const Table& table, const std::filesystem::path& dir, const std::string& stem,
                                         Format format) {
  std::filesystem::create_directories(dir);
  const auto path = dir / (stem + (format == Format::csv ? ".csv" : ".json"));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  if (format == Format::csv)
    table.write_csv(out);
  else
    out << table.to_json().dump(1) << '\n';
  return path;
}

inline double power_dbm(double w) {
  return w > 0.0 ? watt_to_dbm(w) : -std::numeric_limits<double>::infinity();
}

/// index, frequency_thz, band, power_dbm: one row per channel.
inline Table spectral_table(const PowerSpectrum& s) {
  Table t{{"index", "frequency_thz", "band", "power_dbm"}, {}};
  for (std::size_t i = 0; i < s.size(); ++i)
    t.add({static_cast<long long>(i), s.grid().frequency(i), s.grid().band_name(i), power_dbm(s[i])});
  return t;
}

/// z_km, total_dbm, then one dBm column per channel.
inline Table longitudinal_table(const std::vector<PowerSpectrum>& samples) {
  Table t;
  t.columns = {"z_km", "total_dbm"};
  if (samples.empty()) return t;
  char name[32];
  for (std::size_t i = 0; i < samples.front().size(); ++i) {
    std::snprintf(name, sizeof name, "ch%04zu_dbm", i);
    t.columns.emplace_back(name);
  }
  for (const auto& s : samples) {
    std::vector<Cell> row{s.z(), power_dbm(s.total())};
    for (std::size_t i = 0; i < s.size(); ++i) row.emplace_back(power_dbm(s[i]));
    t.add(std::move(row));
  }
  return t;
}

}  // namespace isrs::io
