#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isrs/errors.hpp"
#include "isrs/profiles.hpp"
#include "isrs/spectrum.hpp"
#include "isrs/units.hpp"

namespace isrs {

enum class GainPolicy {
  restore_total_power,  // one scalar gain restoring the whole-spectrum launch power
  restore_band_power,   // one gain per band restoring that band's launch power
  fixed_gain,           // flat gain of fixed_gain_db
};

struct AmplifierSpec {
  GainPolicy policy = GainPolicy::restore_total_power;
  double fixed_gain_db = 0.0;
  /// Noise figure per band name, dB. -inf means a noiseless stage.
  std::map<std::string, double> noise_figure_db;

  /// Linear noise figure for `band`; ConfigError if the band has none.
  double noise_figure(const std::string& band) const {
    auto it = noise_figure_db.find(band);
    if (it == noise_figure_db.end()) throw ConfigError("no amplifier noise figure configured for band " + band);
    return std::isinf(it->second) && it->second < 0 ? 0.0 : db_to_linear(it->second);
  }
};

/// Optional stage after the last span bringing the received total power back
/// to the launch total. It adds ASE only when `adds_noise` is set.
struct ReceiverBoost {
  bool enabled = false;
  bool adds_noise = false;
  AmplifierSpec amplifier;
};

struct LinkSpec {
  std::vector<FiberSpec> spans;
  std::vector<AmplifierSpec> amplifiers;  // one per span boundary
  ReceiverBoost receiver_boost;

  static LinkSpec homogeneous(const FiberSpec& span, std::size_t count, const AmplifierSpec& amplifier = {},
                              ReceiverBoost boost = {}) {
    LinkSpec link;
    link.spans.assign(count, span);
    if (count > 0) link.amplifiers.assign(count - 1, amplifier);
    link.receiver_boost = std::move(boost);
    return link;
  }

  std::size_t span_count() const { return spans.size(); }

  double total_length() const {
    double l = 0.0;
    for (const auto& s : spans) l += s.length_km;
    return l;
  }

  void validate() const {
    if (spans.empty()) throw ConfigError("link needs at least one span");
    if (amplifiers.size() + 1 != spans.size())
      throw ConfigError("link with " + std::to_string(spans.size()) + " spans needs " +
                        std::to_string(spans.size() - 1) + " in-line amplifiers, got " +
                        std::to_string(amplifiers.size()));
    for (const auto& s : spans) s.validate();
    auto check = [](const AmplifierSpec& a) {
      for (const auto& [band, nf] : a.noise_figure_db)
        if (std::isnan(nf) || (std::isfinite(nf) && nf < 0.0) || (std::isinf(nf) && nf > 0))
          throw ConfigError("noise figure for band " + band + " must be >= 0 dB (or -inf for noiseless)");
    };
    for (const auto& a : amplifiers) check(a);
    check(receiver_boost.amplifier);
  }

  bool uses_total_power_restoration() const {
    for (const auto& a : amplifiers)
      if (a.policy != GainPolicy::restore_total_power) return false;
    return true;
  }
};

/// Linear amplification restoring total power: P_T0 / sum_i P_i(L).
inline double span_gain(const PowerSpectrum& span_output, double launch_total_w) {
  const double out = span_output.total();
  if (!(out > 0.0)) throw NumericalError("span output power is zero; amplifier gain undefined");
  return launch_total_w / out;
}

/// Per-channel linear gains of one amplifier stage. `reference` is the link
/// launch spectrum: the power levels the restoring policies return to.
inline std::vector<double> amplifier_gains(const AmplifierSpec& amp, const PowerSpectrum& span_output,
                                           const PowerSpectrum& reference) {
  const ChannelGrid& grid = span_output.grid();
  std::vector<double> gains(grid.size());
  switch (amp.policy) {
    case GainPolicy::restore_total_power:
      std::fill(gains.begin(), gains.end(), span_gain(span_output, reference.total()));
      break;
    case GainPolicy::fixed_gain:
      std::fill(gains.begin(), gains.end(), db_to_linear(amp.fixed_gain_db));
      break;
    case GainPolicy::restore_band_power:
      for (std::size_t b = 0; b < grid.bands().size(); ++b) {
        const auto [first, last] = grid.band_range(b);
        double out = 0.0, ref = 0.0;
        for (std::size_t k = first; k < last; ++k) {
          out += span_output[k];
          ref += reference[k];
        }
        if (!(out > 0.0)) throw NumericalError("band " + grid.bands()[b].name + " output power is zero");
        std::fill(gains.begin() + static_cast<std::ptrdiff_t>(first), gains.begin() + static_cast<std::ptrdiff_t>(last),
                  ref / out);
      }
      break;
  }
  return gains;
}

inline PowerSpectrum apply_gains(const PowerSpectrum& s, const std::vector<double>& gains, double z_km) {
  std::vector<double> p(s.powers().begin(), s.powers().end());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] *= gains[k];
  return {s.grid_ptr(), std::move(p), z_km};
}

struct SpanTrace {
  PowerSpectrum input;
  PowerSpectrum output;
};

/// Span-by-span signal evolution of a link, independent of how it was computed.
struct LinkTrace {
  std::vector<SpanTrace> spans;
  std::vector<std::vector<double>> inline_gains;   // per boundary, per channel
  std::optional<std::vector<double>> receiver_gain;
  std::optional<PowerSpectrum> received;            // after the receiver boost, if any

  const PowerSpectrum& final_output() const { return received ? *received : spans.back().output; }
};

}  // namespace isrs
