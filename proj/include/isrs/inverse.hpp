#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "isrs/closedform.hpp"
#include "isrs/errors.hpp"
#include "isrs/link.hpp"
#include "isrs/spectrum.hpp"

namespace isrs {

/// Desired received spectrum. Absolute targets are in W; normalized targets
/// carry only a shape and are stored with mean 1.
struct TargetSpectrum {
  GridPtr grid;
  std::vector<double> values;
  bool normalized = false;

  static TargetSpectrum absolute(const PowerSpectrum& output) {
    TargetSpectrum t{output.grid_ptr(), {output.powers().begin(), output.powers().end()}, false};
    t.validate();
    return t;
  }

  static TargetSpectrum shape(GridPtr grid, std::vector<double> values) {
    TargetSpectrum t{std::move(grid), std::move(values), true};
    t.validate();
    const double mean = std::accumulate(t.values.begin(), t.values.end(), 0.0) / static_cast<double>(t.values.size());
    for (double& v : t.values) v /= mean;
    return t;
  }

  static TargetSpectrum flat(GridPtr grid) {
    const std::size_t n = grid->size();
    return shape(std::move(grid), std::vector<double>(n, 1.0));
  }

  void validate() const {
    if (!grid) throw std::invalid_argument("target spectrum needs a grid");
    if (values.size() != grid->size()) throw std::invalid_argument("target length does not match the channel count");
    for (double v : values)
      if (!(v > 0.0)) throw std::invalid_argument("target values must be positive");
  }

  /// Values divided by their sum.
  std::vector<double> fractions() const {
    const double total = std::accumulate(values.begin(), values.end(), 0.0);
    std::vector<double> f(values);
    for (double& v : f) v /= total;
    return f;
  }
};

/// Closed-form coefficients estimated from the span output: the shaping
/// function of the output spectrum, alpha0 as the output-weighted n-th power
/// mean, and gamma_ref as the alpha^n-weighted mean of the shaping function.
inline ClosedFormParams closedform_params_from_output(const PowerSpectrum& output, const FiberSpec& fiber, int n = 3) {
  detail::require_order(n);
  fiber.validate();
  ClosedFormParams p;
  p.order = n;
  p.from_output = true;
  p.length_km = fiber.length_km;
  p.raman_slope = fiber.raman.slope();
  p.attenuation = fiber.attenuation.sample(output.grid());
  p.total_power_w = output.total();
  if (!(p.total_power_w > 0.0)) throw std::invalid_argument("output spectrum has zero total power");
  p.alpha0 = total_attenuation_coefficient(output.powers(), p.attenuation, n);
  p.effective_length_km = effective_length(p.alpha0, fiber.length_km);
  p.shaping = shaping_function(output, fiber.raman.window());
  const auto w = detail::order_weights(output.powers(), p.attenuation, p.alpha0, n);
  p.gamma_ref = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) p.gamma_ref += w[i] * p.shaping[i];
  return p;
}

struct OutputAbsolute {};
struct InputTotalPower {
  double total_w = 0.0;
};
using PreemphasisConstraint = std::variant<OutputAbsolute, InputTotalPower>;

namespace detail {

/// S(f,0) = S(f,L) exp( alpha(f) L - c_R (Gamma_ref - Gamma(f)) P_T(L) (e^{alpha0 L} - 1)/alpha0 ),
/// with output powers `fractions` * `output_total`.
inline std::vector<double> launch_from_output(std::span<const double> fractions, double output_total,
                                              const ClosedFormParams& p) {
  const double drive = p.raman_slope * output_total * growth_length(p.alpha0, p.length_km);
  std::vector<double> launch(fractions.size());
  for (std::size_t i = 0; i < launch.size(); ++i)
    launch[i] = output_total * fractions[i] *
                std::exp(p.attenuation[i] * p.length_km - (p.gamma_ref - p.shaping[i]) * drive);
  return launch;
}

/// log( sum_i launch_i(x) ) - log(P_T0) at x = e^u.
inline double log_launch_mismatch(std::span<const double> fractions, const ClosedFormParams& p, double u,
                                  double log_target) {
  const double drive = p.raman_slope * std::exp(u) * growth_length(p.alpha0, p.length_km);
  double peak = -std::numeric_limits<double>::infinity();
  std::vector<double> e(fractions.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] = std::log(fractions[i]) + p.attenuation[i] * p.length_km - (p.gamma_ref - p.shaping[i]) * drive;
    peak = std::max(peak, e[i]);
  }
  double sum = 0.0;
  for (double v : e) sum += std::exp(v - peak);
  return u + peak + std::log(sum) - log_target;
}

}  // namespace detail

/// Output total power P_T(L) for which the pre-emphasized launch of the
/// normalized shape `fractions` carries exactly `launch_total_w`. Bisection on
/// log P_T(L), initial bracket [P_T0 e^{-max alpha L}, P_T0 e^{-min alpha L}],
/// widened geometrically if it does not straddle the root.
inline double solve_output_total_power(std::span<const double> fractions, const ClosedFormParams& p,
                                       double launch_total_w) {
  if (!(launch_total_w > 0.0)) throw std::invalid_argument("launch total power must be positive");
  const double log_target = std::log(launch_total_w);
  const auto [amin, amax] = std::minmax_element(p.attenuation.begin(), p.attenuation.end());
  double lo = log_target - *amax * p.length_km;
  double hi = log_target - *amin * p.length_km;
  const double scan_lo = lo, scan_hi = hi;
  auto f = [&](double u) { return detail::log_launch_mismatch(fractions, p, u, log_target); };

  double flo = f(lo), fhi = f(hi);
  double widest_lo = lo, widest_hi = hi;
  for (int i = 0; i < 64 && flo > 0.0; ++i) {
    hi = lo;
    fhi = flo;
    lo -= 1.0 + i;
    flo = f(lo);
    widest_lo = lo;
  }
  for (int i = 0; i < 64 && fhi < 0.0; ++i) {
    lo = hi;
    flo = fhi;
    hi += 1.0 + i;
    fhi = f(hi);
    widest_hi = hi;
  }
  if (!(flo <= 0.0 && fhi >= 0.0)) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "output total power root not bracketed: scanned P_T(L) in [%.6g, %.6g] W (initial [%.6g, %.6g] W)",
                  std::exp(widest_lo), std::exp(widest_hi), std::exp(scan_lo), std::exp(scan_hi));
    throw NumericalError(buf);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

/// Launch spectrum realizing `target` at the end of one span.
///  - OutputAbsolute: the target is the absolute received spectrum.
///  - InputTotalPower: only the target's shape is used; the received total is
///    solved so that the launch carries the requested total power.
inline PowerSpectrum preemphasis_single_span(const TargetSpectrum& target, const FiberSpec& fiber, int n,
                                             const PreemphasisConstraint& constraint) {
  target.validate();
  if (std::holds_alternative<OutputAbsolute>(constraint)) {
    if (target.normalized)
      throw ConfigError("absolute output pre-emphasis needs an absolute target, not a normalized shape");
    const PowerSpectrum output(target.grid, target.values, fiber.length_km);
    const ClosedFormParams p = closedform_params_from_output(output, fiber, n);
    const auto fractions = target.fractions();
    return {target.grid, detail::launch_from_output(fractions, p.total_power_w, p), 0.0};
  }
  const double launch_total = std::get<InputTotalPower>(constraint).total_w;
  const auto fractions = target.fractions();
  const PowerSpectrum shape(target.grid, fractions, fiber.length_km);
  const ClosedFormParams p = closedform_params_from_output(shape, fiber, n);
  const double output_total = solve_output_total_power(fractions, p, launch_total);
  return {target.grid, detail::launch_from_output(fractions, output_total, p), 0.0};
}

/// Launch spectrum of a multi-span link whose received spectrum has the shape
/// of `target`. Every span input carries `launch_total_w` (total-power
/// restoring amplifiers), so the recursion runs backwards span by span, each
/// span's coefficients estimated from its own output shape.
inline PowerSpectrum preemphasis_multispan(const TargetSpectrum& target, const LinkSpec& link, double launch_total_w,
                                           int n = 3) {
  link.validate();
  target.validate();
  if (!target.normalized)
    throw ConfigError("multi-span pre-emphasis targets a normalized shape; absolute output powers cannot be "
                      "targeted under per-span total-power constraints");
  if (!link.uses_total_power_restoration())
    throw ConfigError("multi-span pre-emphasis requires total-power-restoring in-line amplifiers");

  TargetSpectrum shape = target;
  std::optional<PowerSpectrum> launch;
  for (std::size_t k = link.span_count(); k-- > 0;) {
    launch = preemphasis_single_span(shape, link.spans[k], n, InputTotalPower{launch_total_w});
    shape = TargetSpectrum::shape(target.grid, launch->normalized());
  }
  return *launch;
}

}  // namespace isrs
