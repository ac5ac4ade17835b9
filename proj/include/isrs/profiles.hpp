#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "isrs/errors.hpp"
#include "isrs/units.hpp"

namespace isrs {

namespace detail {

inline constexpr double kFrequencyTolerance = 1e-9;  // THz

inline std::string fmt_thz(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g THz", v);
  return buf;
}

/// Piecewise-linear interpolation on ascending abscissae; `x` must lie inside.
inline double interpolate(std::span<const double> xs, std::span<const double> ys, double x) {
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  if (it == xs.begin()) return ys.front();
  if (it == xs.end()) return ys.back();
  const auto hi = static_cast<std::size_t>(it - xs.begin());
  const auto lo = hi - 1;
  const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + t * (ys[hi] - ys[lo]);
}

inline void require_ascending(std::span<const double> xs, const char* what) {
  if (xs.size() < 2) throw ConfigError(std::string(what) + ": at least two samples are required");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw ConfigError(std::string(what) + ": sample abscissae must be strictly ascending");
}

}  // namespace detail

/// A named contiguous slice of spectrum, [f_low, f_high) in THz.
struct Band {
  std::string name;
  double f_low_thz = 0.0;
  double f_high_thz = 0.0;

  double width() const { return f_high_thz - f_low_thz; }
};

using BandPlan = std::vector<Band>;

/// Default U/L/C/S edges. Only the bandwidths (5.5, 7.10, 4.05, 9.75 THz) are
/// anchored; the absolute positions are a modelling choice.
inline BandPlan standard_bands() {
  return {{"U", 179.10, 184.60}, {"L", 184.60, 191.70}, {"C", 191.70, 195.75}, {"S", 195.75, 205.50}};
}

/// Builds a plan from band letters, e.g. "CLU" or "SCLU". Letter order is
/// irrelevant; bands are always returned in ascending frequency.
inline BandPlan standard_band_plan(std::string_view letters) {
  BandPlan plan;
  for (const Band& b : standard_bands())
    if (letters.find(b.name) != std::string_view::npos) plan.push_back(b);
  for (char c : letters)
    if (c != 'U' && c != 'L' && c != 'C' && c != 'S')
      throw ConfigError("unknown band letter '" + std::string(1, c) + "' in plan '" + std::string(letters) + "'");
  if (plan.empty()) throw ConfigError("empty band plan");
  for (std::size_t i = 1; i < plan.size(); ++i)
    if (std::abs(plan[i].f_low_thz - plan[i - 1].f_high_thz) > detail::kFrequencyTolerance)
      throw ConfigError("band plan '" + std::string(letters) + "' is not contiguous between " + plan[i - 1].name +
                        " and " + plan[i].name);
  return plan;
}

/// Uniform WDM grid. Channel k sits at the centre of its bin:
/// f_k = f_min + (k + 1/2) * spacing.
class ChannelGrid {
 public:
  std::size_t size() const { return frequencies_.size(); }
  double spacing() const { return spacing_; }
  double f_min() const { return f_min_; }
  double f_max() const { return f_min_ + static_cast<double>(size()) * spacing_; }
  std::span<const double> frequencies() const { return frequencies_; }
  double frequency(std::size_t k) const { return frequencies_[k]; }
  const BandPlan& bands() const { return bands_; }
  std::size_t band_index(std::size_t k) const { return band_of_[k]; }
  const std::string& band_name(std::size_t k) const { return bands_[band_of_[k]].name; }

  /// Channel indices [first, last) belonging to band `b`.
  std::pair<std::size_t, std::size_t> band_range(std::size_t b) const { return {band_start_[b], band_start_[b + 1]}; }

  friend ChannelGrid build_channel_grid(const BandPlan& plan, double spacing_thz);

 private:
  ChannelGrid() = default;

  double spacing_ = 0.0;
  double f_min_ = 0.0;
  std::vector<double> frequencies_;
  BandPlan bands_;
  std::vector<std::size_t> band_of_;
  std::vector<std::size_t> band_start_;
};

/// Fills every band of `plan` with channels of width `spacing_thz`.
/// Throws ConfigError for non-contiguous bands or a band whose width is not an
/// integer multiple of the spacing (the message names the band).
inline ChannelGrid build_channel_grid(const BandPlan& plan, double spacing_thz) {
  if (!(spacing_thz > 0.0)) throw ConfigError("channel spacing must be positive");
  if (plan.empty()) throw ConfigError("band plan has no bands");

  ChannelGrid grid;
  grid.spacing_ = spacing_thz;
  grid.f_min_ = plan.front().f_low_thz;
  grid.bands_ = plan;
  grid.band_start_.push_back(0);

  std::size_t total = 0;
  for (std::size_t b = 0; b < plan.size(); ++b) {
    const Band& band = plan[b];
    if (!(band.f_high_thz > band.f_low_thz))
      throw ConfigError("band " + band.name + " has non-positive width");
    if (b > 0 && std::abs(band.f_low_thz - plan[b - 1].f_high_thz) > detail::kFrequencyTolerance)
      throw ConfigError("bands " + plan[b - 1].name + " and " + band.name + " are not contiguous (" +
                        detail::fmt_thz(plan[b - 1].f_high_thz) + " vs " + detail::fmt_thz(band.f_low_thz) + ")");
    const double ratio = band.width() / spacing_thz;
    const double count = std::round(ratio);
    if (count < 1.0 || std::abs(ratio - count) > 1e-6)
      throw ConfigError("band " + band.name + " width " + detail::fmt_thz(band.width()) +
                        " is not an integer multiple of the channel spacing " + detail::fmt_thz(spacing_thz));
    total += static_cast<std::size_t>(count);
    grid.band_start_.push_back(total);
  }

  grid.frequencies_.resize(total);
  grid.band_of_.resize(total);
  for (std::size_t k = 0; k < total; ++k)
    grid.frequencies_[k] = grid.f_min_ + (static_cast<double>(k) + 0.5) * spacing_thz;
  for (std::size_t b = 0; b < plan.size(); ++b)
    std::fill(grid.band_of_.begin() + static_cast<std::ptrdiff_t>(grid.band_start_[b]),
              grid.band_of_.begin() + static_cast<std::ptrdiff_t>(grid.band_start_[b + 1]), b);
  return grid;
}

/// Fiber loss alpha(f) in Napierian 1/km.
class AttenuationProfile {
 public:
  struct Constant {
    double alpha_per_km = 0.0;
  };
  /// alpha(f) = min + curvature * (f - vertex)^2, all in 1/km and THz.
  struct Parabolic {
    double min_per_km = 0.0;
    double vertex_thz = 0.0;
    double curvature = 0.0;  // 1/km/THz^2
  };
  /// Samples in dB/km, linearly interpolated, no extrapolation.
  struct Tabulated {
    std::vector<double> f_thz;
    std::vector<double> db_per_km;
  };

  AttenuationProfile() : AttenuationProfile(Constant{db_per_km_to_neper(0.2)}) {}
  AttenuationProfile(Constant c) : model_(c) {
    if (!(c.alpha_per_km >= 0.0)) throw ConfigError("constant attenuation must be non-negative");
  }
  AttenuationProfile(Parabolic p) : model_(p) {
    if (!(p.min_per_km > 0.0) || !(p.curvature >= 0.0))
      throw ConfigError("parabolic attenuation needs a positive minimum and non-negative curvature");
  }
  AttenuationProfile(Tabulated t) : model_(std::move(t)) {
    const auto& tab = std::get<Tabulated>(model_);
    if (tab.f_thz.size() != tab.db_per_km.size())
      throw ConfigError("tabulated attenuation: frequency and value counts differ");
    detail::require_ascending(tab.f_thz, "tabulated attenuation");
    for (double v : tab.db_per_km)
      if (!(v > 0.0)) throw ConfigError("tabulated attenuation samples must be positive");
  }

  const std::variant<Constant, Parabolic, Tabulated>& model() const { return model_; }

  double at(double f_thz) const {
    return std::visit(
        [f_thz](const auto& m) -> double {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, Constant>) {
            return m.alpha_per_km;
          } else if constexpr (std::is_same_v<M, Parabolic>) {
            const double d = f_thz - m.vertex_thz;
            return m.min_per_km + m.curvature * d * d;
          } else {
            if (f_thz < m.f_thz.front() - detail::kFrequencyTolerance ||
                f_thz > m.f_thz.back() + detail::kFrequencyTolerance)
              throw std::out_of_range("attenuation table does not cover " + detail::fmt_thz(f_thz));
            return db_per_km_to_neper(detail::interpolate(m.f_thz, m.db_per_km, f_thz));
          }
        },
        model_);
  }

  /// alpha at every channel of `grid`; throws ConfigError if any value is not positive.
  std::vector<double> sample(const ChannelGrid& grid) const {
    std::vector<double> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      try {
        out[k] = at(grid.frequency(k));
      } catch (const std::out_of_range& e) {
        throw ConfigError(e.what());
      }
    }
    return out;
  }

  /// Zero loss everywhere (lossless test fibers).
  bool is_lossless() const {
    const auto* c = std::get_if<Constant>(&model_);
    return c != nullptr && c->alpha_per_km == 0.0;
  }

 private:
  std::variant<Constant, Parabolic, Tabulated> model_;
};

inline double attenuation_at(const AttenuationProfile& profile, double f_thz) { return profile.at(f_thz); }

/// Raman gain efficiency g_R(delta_f) in 1/W/km. The triangular slope and
/// window are always present (the closed form needs them); a tabulated curve
/// is optional and used only when explicitly selected.
class RamanGainModel {
 public:
  static constexpr double kDefaultWindow = 15.5;    // THz
  static constexpr double kDefaultPeakShift = 14.0;  // THz

  static RamanGainModel triangular(double slope, double window_thz = kDefaultWindow) {
    if (!(slope >= 0.0)) throw ConfigError("Raman slope must be non-negative");
    if (!(window_thz > 0.0)) throw ConfigError("Raman window must be positive");
    RamanGainModel m;
    m.slope_ = slope;
    m.window_ = window_thz;
    return m;
  }

  /// Triangle whose value at `peak_shift_thz` equals `peak_gain` (c_R = G_R / 14 THz by default).
  static RamanGainModel from_peak(double peak_gain, double peak_shift_thz = kDefaultPeakShift,
                                  double window_thz = kDefaultWindow) {
    if (!(peak_shift_thz > 0.0)) throw ConfigError("Raman peak shift must be positive");
    return triangular(peak_gain / peak_shift_thz, window_thz);
  }

  static RamanGainModel tabulated(std::vector<double> shift_thz, std::vector<double> gain, double slope,
                                  double window_thz = kDefaultWindow) {
    RamanGainModel m = triangular(slope, window_thz);
    if (shift_thz.size() != gain.size()) throw ConfigError("tabulated Raman gain: shift and gain counts differ");
    detail::require_ascending(shift_thz, "tabulated Raman gain");
    if (shift_thz.front() != 0.0 || gain.front() != 0.0)
      throw ConfigError("tabulated Raman gain must start with g_R(0) = 0");
    for (double g : gain)
      if (!(g >= 0.0)) throw ConfigError("tabulated Raman gain must be non-negative");
    m.table_shift_ = std::move(shift_thz);
    m.table_gain_ = std::move(gain);
    return m;
  }

  double slope() const { return slope_; }
  double window() const { return window_; }
  bool has_table() const { return !table_shift_.empty(); }

  /// Triangular value c_R * df for 0 <= df <= window, else 0.
  double triangular_at(double df_thz) const {
    check_shift(df_thz);
    return df_thz <= window_ + detail::kFrequencyTolerance ? slope_ * df_thz : 0.0;
  }

  /// Interpolated table value, 0 beyond the last sample.
  double tabulated_at(double df_thz) const {
    check_shift(df_thz);
    if (!has_table()) throw ConfigError("Raman model has no tabulated curve");
    if (df_thz > table_shift_.back()) return 0.0;
    return detail::interpolate(table_shift_, table_gain_, df_thz);
  }

  /// Largest frequency separation with non-zero gain.
  double reach(bool use_table) const { return use_table ? table_shift_.back() : window_; }

  double at(double df_thz) const { return has_table() ? tabulated_at(df_thz) : triangular_at(df_thz); }

 private:
  RamanGainModel() = default;

  static void check_shift(double df) {
    if (df < 0.0) throw std::invalid_argument("Raman gain requested at negative frequency separation");
  }

  double slope_ = 0.0;
  double window_ = kDefaultWindow;
  std::vector<double> table_shift_;
  std::vector<double> table_gain_;
};

inline double raman_gain_at(const RamanGainModel& model, double df_thz) { return model.at(df_thz); }

struct FiberSpec {
  AttenuationProfile attenuation;
  RamanGainModel raman = RamanGainModel::from_peak(0.4);
  double length_km = 100.0;

  void validate() const {
    if (!(length_km > 0.0)) throw ConfigError("fiber length must be positive");
  }
};

/// SSMF-like parabola: 0.19 dB/km at 190.5 THz, 2.5e-4 dB/km/THz^2 curvature.
inline AttenuationProfile default_attenuation() {
  return AttenuationProfile::Parabolic{db_per_km_to_neper(0.19), 190.5, db_per_km_to_neper(2.5e-4)};
}

}  // namespace isrs
