#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "isrs/closedform.hpp"
#include "isrs/link.hpp"
#include "isrs/spectrum.hpp"

namespace isrs {

struct MultiSpanResult {
  std::vector<ClosedFormParams> span_params;
  std::vector<double> span_start_km;
  LinkTrace trace;

  const PowerSpectrum& final_output() const { return trace.final_output(); }

  /// Gains applied between spans; linear, one vector per boundary.
  const std::vector<std::vector<double>>& gains() const { return trace.inline_gains; }

  /// Closed-form spectrum anywhere on the link, evaluated with the owning
  /// span's coefficients. A boundary position returns the (unamplified)
  /// output of the span that ends there.
  PowerSpectrum profile_at(double z_km) const {
    const double end = span_start_km.back() + span_params.back().length_km;
    if (z_km < 0.0 || z_km > end * (1.0 + 1e-12))
      throw std::out_of_range("link position " + std::to_string(z_km) + " km outside [0, " + std::to_string(end) + "]");
    std::size_t k = 0;
    while (k + 1 < span_params.size() && z_km > span_start_km[k] + span_params[k].length_km) ++k;
    const double local = std::min(z_km - span_start_km[k], span_params[k].length_km);
    PowerSpectrum s = power_profile(trace.spans[k].input, span_params[k], span_params[k].raman_slope, local);
    return s.at_position(z_km);
  }
};

/// Forward span-by-span closed-form recursion: per-span coefficients are
/// derived from each span's input, the output follows from the single-span
/// profile, and the next input is the output times the boundary gains.
inline MultiSpanResult propagate_multispan_closedform(const PowerSpectrum& launch, const LinkSpec& link, int n = 3,
                                                      GammaRefMode mode = GammaRefMode::fixed_at_span_end) {
  link.validate();
  MultiSpanResult r;
  PowerSpectrum input = launch.at_position(0.0);
  double z0 = 0.0;
  for (std::size_t k = 0; k < link.span_count(); ++k) {
    const FiberSpec& fiber = link.spans[k];
    ClosedFormParams params = derive_closedform_params(input, fiber, n, mode);
    PowerSpectrum output = power_profile(input, params, params.raman_slope, fiber.length_km);
    r.span_start_km.push_back(z0);
    z0 += fiber.length_km;
    output = output.at_position(z0);
    r.trace.spans.push_back({input, output});
    r.span_params.push_back(std::move(params));
    if (k + 1 < link.span_count()) {
      auto gains = amplifier_gains(link.amplifiers[k], output, launch);
      input = apply_gains(output, gains, z0);
      r.trace.inline_gains.push_back(std::move(gains));
    }
  }
  if (link.receiver_boost.enabled) {
    const PowerSpectrum& last = r.trace.spans.back().output;
    auto gains = amplifier_gains(link.receiver_boost.amplifier, last, launch);
    r.trace.received = apply_gains(last, gains, z0);
    r.trace.receiver_gain = std::move(gains);
  }
  return r;
}

}  // namespace isrs
