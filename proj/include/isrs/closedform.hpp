#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "isrs/profiles.hpp"
#include "isrs/spectrum.hpp"

namespace isrs {

/// How the zero-tilt shaping value is evaluated along a span.
enum class GammaRefMode {
  fixed_at_span_end,  // evaluated once at z = L and held over the span
  per_position,       // re-evaluated at every queried z
};

/// Per-span quantities of the closed-form power profile
///
///   P_i(z) = P_i(0) exp( -alpha_i z + c_R (Gamma_ref - Gamma_i) P_T (1 - e^{-alpha0 z}) / alpha0 ).
///
/// When derived from an output spectrum (pre-emphasis), `total_power_w` is the
/// output total P_T(L) and `from_output` is set.
struct ClosedFormParams {
  double alpha0 = 0.0;              // 1/km
  int order = 3;
  std::vector<double> shaping;      // Gamma(f_i), THz
  double gamma_ref = 0.0;           // THz
  double effective_length_km = 0.0;
  double total_power_w = 0.0;
  double length_km = 0.0;
  std::vector<double> attenuation;  // alpha(f_i), 1/km
  double raman_slope = 0.0;         // c_R, 1/W/km/THz
  GammaRefMode gamma_ref_mode = GammaRefMode::fixed_at_span_end;
  bool from_output = false;
};

/// (1 - e^{-a z}) / a, with the a -> 0 limit.
inline double effective_length(double alpha0, double z_km) {
  if (alpha0 * z_km < 1e-12) return z_km;
  return -std::expm1(-alpha0 * z_km) / alpha0;
}

/// (e^{a z} - 1) / a, with the a -> 0 limit.
inline double growth_length(double alpha0, double z_km) {
  if (alpha0 * z_km < 1e-12) return z_km;
  return std::expm1(alpha0 * z_km) / alpha0;
}

namespace detail {

inline void require_order(int n) {
  if (n < 1) throw std::invalid_argument("approximation order n must be a positive integer");
}

inline double total_of(std::span<const double> p) { return std::accumulate(p.begin(), p.end(), 0.0); }

/// Weights alpha_i^n P_i / (alpha0^n P_T). For a lossless fiber (alpha0 = 0)
/// the constant-attenuation limit P_i / P_T is used.
inline std::vector<double> order_weights(std::span<const double> powers, std::span<const double> alpha,
                                         double alpha0, int n) {
  const double total = total_of(powers);
  std::vector<double> w(powers.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = alpha0 > 0.0 ? std::pow(alpha[i] / alpha0, n) * powers[i] / total : powers[i] / total;
  return w;
}

}  // namespace detail

/// Discrete shaping function: Riemann sum over channels of
///   beta_j = P_window(f_j) - (window/spacing) (P_{j+m} + P_{j-m'}),
///   Gamma(f_i) = spacing / P_T * sum_{j<=i} beta_j,
/// with m = floor(window/spacing), m' = ceil(window/spacing), the window sum
/// over |f_k - f_j| < window, and channels outside the grid contributing 0.
inline std::vector<double> shaping_function(std::span<const double> powers, double spacing_thz, double window_thz) {
  const std::size_t n = powers.size();
  const double total = detail::total_of(powers);
  if (!(total > 0.0)) throw std::invalid_argument("shaping function needs a positive total power");
  if (!(window_thz > 0.0) || !(spacing_thz > 0.0)) throw std::invalid_argument("window and spacing must be positive");

  const double ratio = window_thz / spacing_thz;
  const auto m_lo = static_cast<std::ptrdiff_t>(std::floor(ratio + 1e-9));
  const auto m_hi = static_cast<std::ptrdiff_t>(std::ceil(ratio - 1e-9));
  const std::ptrdiff_t half = m_hi - 1;  // |k - j| <= half  <=>  |f_k - f_j| < window

  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) prefix[k + 1] = prefix[k] + powers[k];

  const auto count = static_cast<std::ptrdiff_t>(n);
  std::vector<double> gamma(n);
  double acc = 0.0;
  for (std::ptrdiff_t j = 0; j < count; ++j) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, j - half);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(count - 1, j + half);
    double beta = prefix[static_cast<std::size_t>(hi + 1)] - prefix[static_cast<std::size_t>(lo)];
    if (j + m_lo < count) beta -= ratio * powers[static_cast<std::size_t>(j + m_lo)];
    if (j - m_hi >= 0) beta -= ratio * powers[static_cast<std::size_t>(j - m_hi)];
    acc += beta;
    gamma[static_cast<std::size_t>(j)] = acc * spacing_thz / total;
  }
  return gamma;
}

inline std::vector<double> shaping_function(const PowerSpectrum& launch, double window_thz) {
  return shaping_function(launch.powers(), launch.grid().spacing(), window_thz);
}

/// alpha0 = ( sum_i alpha_i^n P_i / P_T )^(1/n).
inline double total_attenuation_coefficient(std::span<const double> powers, std::span<const double> alpha, int n) {
  detail::require_order(n);
  const double total = detail::total_of(powers);
  if (!(total > 0.0)) throw std::invalid_argument("total attenuation coefficient needs a positive total power");
  double moment = 0.0;
  for (std::size_t i = 0; i < powers.size(); ++i) moment += std::pow(alpha[i], n) * powers[i];
  return std::pow(moment / total, 1.0 / n);
}

inline double total_attenuation_coefficient(const PowerSpectrum& launch, const AttenuationProfile& attenuation,
                                            int n) {
  const auto alpha = attenuation.sample(launch.grid());
  return total_attenuation_coefficient(launch.powers(), alpha, n);
}

/// Zero-tilt shaping value evaluated at position z:
///   Gamma_ref = -1/(c_R P_T L_eff(z)) ln sum_i w_i exp((alpha0 - alpha_i) z - c_R Gamma_i P_T L_eff(z)),
/// computed as a max-shifted log-sum-exp.
inline double gamma_ref_at(std::span<const double> powers, std::span<const double> shaping, double alpha0, int n,
                           std::span<const double> alpha, double slope, double z_km) {
  detail::require_order(n);
  if (slope == 0.0) throw std::invalid_argument("gamma_ref is undefined without Raman coupling (c_R = 0)");
  if (!(z_km > 0.0)) throw std::invalid_argument("gamma_ref needs a positive evaluation length");
  const double total = detail::total_of(powers);
  const double leff = effective_length(alpha0, z_km);
  const double scale = slope * total * leff;
  const auto w = detail::order_weights(powers, alpha, alpha0, n);

  std::vector<double> x;
  x.reserve(w.size());
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0)) continue;
    const double v = std::log(w[i]) + (alpha0 - alpha[i]) * z_km - shaping[i] * scale;
    x.push_back(v);
    peak = std::max(peak, v);
  }
  if (x.empty()) throw std::invalid_argument("gamma_ref needs at least one lit, lossy channel");
  double sum = 0.0;
  for (double v : x) sum += std::exp(v - peak);
  return -(peak + std::log(sum)) / scale;
}

/// Zero-tilt shaping value at the end of the fiber (z = L).
inline double gamma_ref(const PowerSpectrum& launch, std::span<const double> shaping, double alpha0, int n,
                        const FiberSpec& fiber, double slope) {
  const auto alpha = fiber.attenuation.sample(launch.grid());
  return gamma_ref_at(launch.powers(), shaping, alpha0, n, alpha, slope, fiber.length_km);
}

/// All closed-form coefficients of one span from its input spectrum. With a
/// zero Raman slope the profile reduces to pure attenuation and gamma_ref is 0.
inline ClosedFormParams derive_closedform_params(const PowerSpectrum& launch, const FiberSpec& fiber, int n = 3,
                                                 GammaRefMode mode = GammaRefMode::fixed_at_span_end) {
  detail::require_order(n);
  fiber.validate();
  ClosedFormParams p;
  p.order = n;
  p.length_km = fiber.length_km;
  p.raman_slope = fiber.raman.slope();
  p.gamma_ref_mode = mode;
  p.attenuation = fiber.attenuation.sample(launch.grid());
  p.total_power_w = launch.total();
  p.alpha0 = total_attenuation_coefficient(launch.powers(), p.attenuation, n);
  p.effective_length_km = effective_length(p.alpha0, fiber.length_km);
  p.shaping = shaping_function(launch, fiber.raman.window());
  if (p.raman_slope != 0.0)
    p.gamma_ref = gamma_ref_at(launch.powers(), p.shaping, p.alpha0, n, p.attenuation, p.raman_slope, fiber.length_km);
  return p;
}

/// Channel powers at position z (0 <= z <= L) of a span launched with `launch`.
inline PowerSpectrum power_profile(const PowerSpectrum& launch, const ClosedFormParams& params, double slope,
                                   double z_km) {
  if (z_km < 0.0 || z_km > params.length_km * (1.0 + 1e-12))
    throw std::out_of_range("closed-form profile queried at z = " + std::to_string(z_km) + " km outside [0, " +
                            std::to_string(params.length_km) + "]");
  if (launch.size() != params.shaping.size()) throw std::invalid_argument("params derived on a different grid");
  if (z_km == 0.0) return launch.at_position(0.0);

  double ref = params.gamma_ref;
  if (slope != 0.0 && params.gamma_ref_mode == GammaRefMode::per_position)
    ref = gamma_ref_at(launch.powers(), params.shaping, params.alpha0, params.order, params.attenuation, slope, z_km);
  const double drive = slope * params.total_power_w * effective_length(params.alpha0, z_km);

  std::vector<double> out(launch.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = launch[i] * std::exp(-params.attenuation[i] * z_km + (ref - params.shaping[i]) * drive);
  return {launch.grid_ptr(), std::move(out), z_km};
}

/// Exponential total-power estimate P_T(0) e^{-alpha0 z}.
inline double total_power_estimate(const ClosedFormParams& params, double z_km) {
  return params.total_power_w * std::exp(-params.alpha0 * z_km);
}

}  // namespace isrs
