#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "isrs/errors.hpp"
#include "isrs/link.hpp"
#include "isrs/profiles.hpp"
#include "isrs/spectrum.hpp"

namespace isrs {

enum class RamanModelChoice { triangular, tabulated };

struct SolverOptions {
  int steps_per_span = 50;
  /// Include the f_i/f_j photon-energy factor on the depleted side.
  bool photon_correction = false;
  RamanModelChoice raman_model = RamanModelChoice::triangular;

  void validate() const {
    if (steps_per_span < 1) throw ConfigError("steps_per_span must be >= 1");
  }
};

struct PropagationResult {
  std::vector<double> z_km;
  std::vector<PowerSpectrum> spectra;
  std::vector<double> total_power_w;

  void push(PowerSpectrum s) {
    z_km.push_back(s.z());
    total_power_w.push_back(s.total());
    spectra.push_back(std::move(s));
  }
  const PowerSpectrum& back() const { return spectra.back(); }
};

/// Powers below this are treated as integration failure rather than round-off.
inline constexpr double kNegativePowerGuard = -1e-15;

/// Right-hand side of the coupled power equations for one (grid, fiber)
/// pair, with the Raman coupling precomputed as a banded matrix.
///
///   dP_i/dz = -alpha_i P_i + P_i * sum_j C_ij P_j
///   C_ij = g(f_j - f_i)                    for f_j > f_i
///   C_ij = -(f_i/f_j)^c g(f_i - f_j)       for f_j < f_i
class IsrsSystem {
 public:
  IsrsSystem(const ChannelGrid& grid, const FiberSpec& fiber, const SolverOptions& options)
      : n_(grid.size()), alpha_(fiber.attenuation.sample(grid)) {
    const bool table = options.raman_model == RamanModelChoice::tabulated;
    if (table && !fiber.raman.has_table())
      throw ConfigError("tabulated Raman model selected but the fiber has no Raman gain table");
    const double spacing = grid.spacing();
    const double reach = fiber.raman.reach(table);
    half_width_ = std::min<std::size_t>(n_ == 0 ? 0 : n_ - 1,
                                        static_cast<std::size_t>(std::floor(reach / spacing + 1e-9)));
    const std::size_t width = 2 * half_width_ + 1;
    coupling_.assign(n_ * width, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t d = 1; d <= half_width_; ++d) {
        // separation from the index distance keeps window-edge decisions exact
        const double df = static_cast<double>(d) * spacing;
        const double g = table ? fiber.raman.tabulated_at(df) : fiber.raman.triangular_at(df);
        if (i + d < n_) coupling_[i * width + half_width_ + d] = g;
        if (i >= d) {
          double factor = 1.0;
          if (options.photon_correction) factor = grid.frequency(i) / grid.frequency(i - d);
          coupling_[i * width + half_width_ - d] = -factor * g;
        }
      }
    }
  }

  std::size_t size() const { return n_; }
  std::span<const double> attenuation() const { return alpha_; }

  void derivative(std::span<const double> p, std::span<double> dpdz) const {
    const std::size_t width = 2 * half_width_ + 1;
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t lo = i >= half_width_ ? i - half_width_ : 0;
      const std::size_t hi = std::min(n_ - 1, i + half_width_);
      const double* row = coupling_.data() + i * width + half_width_;
      double acc = 0.0;
      for (std::size_t j = lo; j <= hi; ++j) acc += row[static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(i)] * p[j];
      dpdz[i] = p[i] * (acc - alpha_[i]);
    }
  }

 private:
  std::size_t n_;
  std::size_t half_width_ = 0;
  std::vector<double> alpha_;
  std::vector<double> coupling_;
};

/// dP/dz (W/km) for every channel of `spectrum`.
inline std::vector<double> isrs_derivative(const PowerSpectrum& spectrum, const FiberSpec& fiber,
                                           const SolverOptions& options = {}) {
  IsrsSystem system(spectrum.grid(), fiber, options);
  std::vector<double> d(spectrum.size());
  system.derivative(spectrum.powers(), d);
  return d;
}

namespace detail {

inline PowerSpectrum guarded_snapshot(const GridPtr& grid, std::vector<double> p, double z, int steps) {
  for (double& v : p) {
    if (v < kNegativePowerGuard || !std::isfinite(v))
      throw NumericalError("numerical instability: channel power became negative or non-finite at z = " + std::to_string(z) +
                           " km with " + std::to_string(steps) + " steps per span; increase steps_per_span");
    if (v < 0.0) v = 0.0;
  }
  return {grid, std::move(p), z};
}

}  // namespace detail

/// Classic fixed-step RK4 over one span; returns every step including z=0 and z=L.
/// `z_offset` shifts the reported positions (used when chaining spans).
inline PropagationResult integrate_span(const PowerSpectrum& launch, const FiberSpec& fiber,
                                        const SolverOptions& options = {}, double z_offset = 0.0) {
  options.validate();
  fiber.validate();
  const IsrsSystem system(launch.grid(), fiber, options);
  const std::size_t n = launch.size();
  const int steps = options.steps_per_span;
  const double h = fiber.length_km / steps;

  PropagationResult result;
  result.push(launch.at_position(z_offset));

  std::vector<double> p(launch.powers().begin(), launch.powers().end());
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (int s = 0; s < steps; ++s) {
    system.derivative(p, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = p[i] + 0.5 * h * k1[i];
    system.derivative(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = p[i] + 0.5 * h * k2[i];
    system.derivative(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = p[i] + h * k3[i];
    system.derivative(tmp, k4);
    for (std::size_t i = 0; i < n; ++i) p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    const double z = s + 1 == steps ? fiber.length_km : (s + 1) * h;
    PowerSpectrum snap = detail::guarded_snapshot(launch.grid_ptr(), p, z_offset + z, steps);
    std::copy(snap.powers().begin(), snap.powers().end(), p.begin());
    result.push(std::move(snap));
  }
  return result;
}

struct NumericalLinkResult {
  /// All integration samples; span boundaries appear twice (before and after amplification).
  PropagationResult longitudinal;
  LinkTrace trace;
};

/// Chains span integrations with the link's amplifiers between spans and the
/// optional receiver boost after the last span.
inline NumericalLinkResult propagate_link_numerical(const PowerSpectrum& launch, const LinkSpec& link,
                                                    const SolverOptions& options = {}) {
  link.validate();
  NumericalLinkResult out;
  PowerSpectrum input = launch.at_position(0.0);
  double z0 = 0.0;
  for (std::size_t k = 0; k < link.span_count(); ++k) {
    PropagationResult span = integrate_span(input, link.spans[k], options, z0);
    const PowerSpectrum span_out = span.back();
    for (auto& s : span.spectra) out.longitudinal.push(std::move(s));
    out.trace.spans.push_back({input, span_out});
    z0 += link.spans[k].length_km;
    if (k + 1 < link.span_count()) {
      auto gains = amplifier_gains(link.amplifiers[k], span_out, launch);
      input = apply_gains(span_out, gains, z0);
      out.trace.inline_gains.push_back(std::move(gains));
    }
  }
  if (link.receiver_boost.enabled) {
    auto gains = amplifier_gains(link.receiver_boost.amplifier, out.trace.spans.back().output, launch);
    out.trace.received = apply_gains(out.trace.spans.back().output, gains, z0);
    out.trace.receiver_gain = std::move(gains);
    out.longitudinal.push(*out.trace.received);
  }
  return out;
}

}  // namespace isrs
