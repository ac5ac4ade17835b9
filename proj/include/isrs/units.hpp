#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace isrs {

// Internal units are THz, km, W and Napierian 1/km. Logarithmic units only
// appear at the I/O boundary.

inline constexpr double kPlanck = 6.62607015e-34;  // J s
inline constexpr double kHzPerTHz = 1e12;

enum class Unit { db_per_km, per_km, dbm, watt, db, linear };

inline const char* unit_name(Unit u) {
  switch (u) {
    case Unit::db_per_km: return "dB/km";
    case Unit::per_km: return "1/km";
    case Unit::dbm: return "dBm";
    case Unit::watt: return "W";
    case Unit::db: return "dB";
    case Unit::linear: return "linear";
  }
  return "?";
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double ratio) { return 10.0 * std::log10(ratio); }
inline double dbm_to_watt(double dbm) { return 1e-3 * db_to_linear(dbm); }
inline double watt_to_dbm(double w) { return linear_to_db(w / 1e-3); }
inline double db_per_km_to_neper(double db_per_km) { return db_per_km * std::numbers::ln10 / 10.0; }
inline double neper_to_db_per_km(double per_km) { return per_km * 10.0 / std::numbers::ln10; }

/// Converts between the supported unit pairs: dB/km <-> 1/km, dBm <-> W and
/// dB <-> linear ratio. Identity conversions are accepted.
inline double convert_units(double value, Unit from, Unit to) {
  if (from == to) return value;
  auto bad_domain = [&] {
    return std::invalid_argument(std::string("cannot convert non-positive value from ") + unit_name(from) +
                                 " to " + unit_name(to));
  };
  if (from == Unit::db_per_km && to == Unit::per_km) return db_per_km_to_neper(value);
  if (from == Unit::per_km && to == Unit::db_per_km) return neper_to_db_per_km(value);
  if (from == Unit::dbm && to == Unit::watt) return dbm_to_watt(value);
  if (from == Unit::watt && to == Unit::dbm) {
    if (!(value > 0.0)) throw bad_domain();
    return watt_to_dbm(value);
  }
  if (from == Unit::db && to == Unit::linear) return db_to_linear(value);
  if (from == Unit::linear && to == Unit::db) {
    if (!(value > 0.0)) throw bad_domain();
    return linear_to_db(value);
  }
  throw std::invalid_argument(std::string("unsupported unit conversion ") + unit_name(from) + " -> " +
                              unit_name(to));
}

}  // namespace isrs
