#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "isrs/errors.hpp"
#include "isrs/inverse.hpp"
#include "isrs/link.hpp"
#include "isrs/multispan.hpp"
#include "isrs/spectrum.hpp"
#include "isrs/units.hpp"

namespace isrs {

enum class AseModel {
  nf_g_minus_one,  // h f NF (G - 1) B_ref
  g_nf_minus_one,  // h f (G NF - 1) B_ref
};

struct AseOptions {
  AseModel model = AseModel::nf_g_minus_one;
  /// Reference bandwidth in THz; 0 selects the channel spacing.
  double reference_bandwidth_thz = 0.0;
};

/// Per-channel ASE power (W) in the reference bandwidth at position z.
struct NoiseSpectrum {
  GridPtr grid;
  std::vector<double> ase_powers;
  double z_km = 0.0;

  double total() const { return std::accumulate(ase_powers.begin(), ase_powers.end(), 0.0); }
};

/// ASE added by one amplifier stage at `frequency_thz` with linear gain and noise figure.
inline double ase_power(double frequency_thz, double noise_figure, double gain, double reference_bandwidth_thz,
                        AseModel model = AseModel::nf_g_minus_one) {
  if (noise_figure == 0.0) return 0.0;
  const double hf = kPlanck * frequency_thz * kHzPerTHz;
  const double b = reference_bandwidth_thz * kHzPerTHz;
  const double factor = model == AseModel::nf_g_minus_one ? noise_figure * (gain - 1.0) : gain * noise_figure - 1.0;
  return hf * std::max(factor, 0.0) * b;
}

namespace detail {

inline void inject_ase(std::vector<double>& ase, const ChannelGrid& grid, const AmplifierSpec& amp,
                       const std::vector<double>& gains, double bref, AseModel model) {
  for (std::size_t i = 0; i < ase.size(); ++i) {
    ase[i] *= gains[i];
    ase[i] += ase_power(grid.frequency(i), amp.noise_figure(grid.band_name(i)), gains[i], bref, model);
  }
}

}  // namespace detail

/// Noise at the end of the link. Each amplifier injects ASE; existing noise
/// follows the signal through every span (scaled by S(f,L)/S(f,0)) and is
/// amplified with it. The receiver boost amplifies noise and signal alike and
/// injects ASE only when it is marked as noisy.
inline NoiseSpectrum ase_accumulate(const LinkSpec& link, const LinkTrace& trace, const AseOptions& options = {}) {
  link.validate();
  if (trace.spans.size() != link.span_count()) throw std::invalid_argument("trace does not match the link");
  const GridPtr grid = trace.spans.front().input.grid_ptr();
  const double bref = options.reference_bandwidth_thz > 0.0 ? options.reference_bandwidth_thz : grid->spacing();
  std::vector<double> ase(grid->size(), 0.0);
  double z = 0.0;
  for (std::size_t k = 0; k < link.span_count(); ++k) {
    const auto& span = trace.spans[k];
    const auto alpha = link.spans[k].attenuation.sample(*grid);
    for (std::size_t i = 0; i < ase.size(); ++i) {
      const double in = span.input[i];
      ase[i] *= in > 0.0 ? span.output[i] / in : std::exp(-alpha[i] * link.spans[k].length_km);
    }
    z += link.spans[k].length_km;
    if (k + 1 < link.span_count())
      detail::inject_ase(ase, *grid, link.amplifiers[k], trace.inline_gains[k], bref, options.model);
  }
  if (trace.receiver_gain) {
    if (link.receiver_boost.adds_noise)
      detail::inject_ase(ase, *grid, link.receiver_boost.amplifier, *trace.receiver_gain, bref, options.model);
    else
      for (std::size_t i = 0; i < ase.size(); ++i) ase[i] *= (*trace.receiver_gain)[i];
  }
  return {grid, std::move(ase), z};
}

/// Linear OSNR per channel; NumericalError if any channel carries no noise.
inline std::vector<double> osnr_profile(const PowerSpectrum& signal, const NoiseSpectrum& noise) {
  if (noise.ase_powers.size() != signal.size()) throw std::invalid_argument("signal and noise grids differ");
  std::vector<double> osnr(signal.size());
  for (std::size_t i = 0; i < osnr.size(); ++i) {
    if (!(noise.ase_powers[i] > 0.0))
      throw NumericalError("OSNR undefined: zero ASE power on channel " + std::to_string(i));
    osnr[i] = signal[i] / noise.ase_powers[i];
  }
  return osnr;
}

inline std::vector<double> normalize_mean(std::span<const double> v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x /= mean;
  return out;
}

enum class RmseDomain { linear, db };

inline double rmse(std::span<const double> a, std::span<const double> b, RmseDomain domain = RmseDomain::linear) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("rmse needs equal, non-empty inputs");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = domain == RmseDomain::linear ? a[i] - b[i] : linear_to_db(a[i]) - linear_to_db(b[i]);
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(a.size()));
}

/// Peak-to-peak spread in dB of a positive profile.
inline double peak_to_peak_db(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return linear_to_db(*hi) - linear_to_db(*lo);
}

struct OsnrTargetOptions {
  double step = 1.0;  // xi
  double tolerance = 1e-5;
  int max_iterations = 20;
  int order = 3;
  RmseDomain domain = RmseDomain::linear;
  AseOptions ase;
};

struct OsnrTargetRun {
  std::vector<double> target;          // normalized, mean 1
  std::vector<double> history;         // RMSE after each iteration
  std::vector<double> estimated_osnr;  // linear, last iteration
  PowerSpectrum launch;
  int iterations() const { return static_cast<int>(history.size()); }
};

/// OSNR estimate at the end of `link` for a given launch, using the
/// closed-form multi-span model for the signal.
inline std::vector<double> closedform_link_osnr(const PowerSpectrum& launch, const LinkSpec& link, int order,
                                                const AseOptions& ase = {}) {
  const MultiSpanResult fwd = propagate_multispan_closedform(launch, link, order);
  return osnr_profile(fwd.final_output(), ase_accumulate(link, fwd.trace, ase));
}

/// Iterative pre-emphasis towards a received OSNR shape. Starting from a
/// received power shape equal to the target, each step pre-emphasizes the
/// link, estimates the OSNR and multiplies the shape by (target/estimate)^step.
inline OsnrTargetRun target_osnr(const GridPtr& grid, std::span<const double> target_shape, const LinkSpec& link,
                                 double launch_total_w, const OsnrTargetOptions& options = {}) {
  link.validate();
  if (!(options.step > 0.0)) throw ConfigError("OSNR step factor must be positive");
  if (options.max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (target_shape.size() != grid->size()) throw std::invalid_argument("target length does not match the channel count");
  for (double v : target_shape)
    if (!(v > 0.0)) throw std::invalid_argument("target OSNR shape must be positive");

  const std::vector<double> target = normalize_mean(target_shape);
  TargetSpectrum shape = TargetSpectrum::shape(grid, target);
  std::vector<double> history;
  for (int it = 0; it < options.max_iterations; ++it) {
    PowerSpectrum launch = preemphasis_multispan(shape, link, launch_total_w, options.order);
    const auto osnr = closedform_link_osnr(launch, link, options.order, options.ase);
    const auto estimate = normalize_mean(osnr);
    history.push_back(rmse(target, estimate, options.domain));
    if (history.back() < options.tolerance) return {target, std::move(history), osnr, std::move(launch)};
    std::vector<double> next(shape.values);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] *= std::pow(target[i] / estimate[i], options.step);
    shape = TargetSpectrum::shape(grid, std::move(next));
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "OSNR targeting did not reach RMSE %.3g within %d iterations (last %.3g)",
                options.tolerance, options.max_iterations, history.back());
  throw NonConvergenceError(buf, history);
}

}  // namespace isrs
