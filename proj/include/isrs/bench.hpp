#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <exception>
#include <map>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "isrs/closedform.hpp"
#include "isrs/errors.hpp"
#include "isrs/ode_oracle.hpp"
#include "isrs/profiles.hpp"
#include "isrs/spectrum.hpp"
#include "isrs/units.hpp"

namespace isrs {

/// eps_P = sum closed-form / sum oracle.
inline double total_power_error_ratio(const PowerSpectrum& closedform_out, const PowerSpectrum& oracle_out) {
  if (closedform_out.size() != oracle_out.size()) throw std::invalid_argument("spectra on different grids");
  const double ref = oracle_out.total();
  if (!(ref > 0.0)) throw NumericalError("oracle output has zero total power");
  return closedform_out.total() / ref;
}

/// Largest |10 log10(a_i / b_i)| over channels with both powers positive.
inline double max_channel_deviation_db(const PowerSpectrum& a, const PowerSpectrum& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > 0.0 && b[i] > 0.0) worst = std::max(worst, std::abs(linear_to_db(a[i] / b[i])));
  return worst;
}

/// `count` evenly spaced values from `lo` to `hi`, both included.
struct SweepAxis {
  double lo = 0.0;
  double hi = 0.0;
  int count = 1;

  std::vector<double> values() const {
    if (count < 1) throw ConfigError("sweep axis needs count >= 1");
    if (hi < lo) throw ConfigError("sweep axis range must be ordered");
    if (count == 1) return {lo};
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) v[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (count - 1);
    return v;
  }
};

struct SweepConfig {
  std::vector<std::string> bands = {"C", "CL", "CLU", "SCLU"};
  SweepAxis peak_gain{0.3, 0.4, 5};     // G_R, 1/W/km
  SweepAxis launch_dbm{-5.0, 0.0, 5};   // per channel
  SweepAxis length_km{50.0, 150.0, 5};
  std::vector<int> orders = {1, 2, 3, 4, 5, 6};
  double spacing_thz = 0.05;
  AttenuationProfile attenuation = default_attenuation();
  SolverOptions solver;
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const {
    if (bands.empty()) throw ConfigError("sweep needs at least one band plan");
    if (orders.empty()) throw ConfigError("sweep needs at least one order");
    for (int n : orders)
      if (n < 1) throw ConfigError("approximation orders must be positive");
    peak_gain.values();
    launch_dbm.values();
    length_km.values();
    solver.validate();
  }
};

struct SweepRecord {
  std::string band;
  double peak_gain = 0.0;
  double launch_dbm = 0.0;
  double length_km = 0.0;
  int order = 0;
  double error_ratio = 0.0;      // eps_P
  double max_deviation_db = 0.0;
  double oracle_seconds = 0.0;
  double closedform_seconds = 0.0;
  std::string error;             // non-empty if the cell failed
  bool ok() const { return error.empty(); }
};

/// Box-plot statistics of eps_P for one (band, order) group.
struct SweepSummary {
  std::string band;
  int order = 0;
  std::size_t count = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  std::vector<double> outliers;
  double mean_abs_error = 0.0;  // mean |eps_P - 1|
};

struct SweepResult {
  std::vector<SweepRecord> records;
  std::vector<SweepSummary> summaries;
};

namespace detail {

/// Linear-interpolated quantile of sorted data.
inline double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto k = static_cast<std::size_t>(std::floor(pos));
  if (k + 1 >= v.size()) return v.back();
  return v[k] + (pos - static_cast<double>(k)) * (v[k + 1] - v[k]);
}

}  // namespace detail

inline SweepSummary summarize(std::string band, int order, std::vector<double> values) {
  SweepSummary s;
  s.band = std::move(band);
  s.order = order;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.q1 = detail::quantile_sorted(values, 0.25);
  s.median = detail::quantile_sorted(values, 0.5);
  s.q3 = detail::quantile_sorted(values, 0.75);
  const double iqr = s.q3 - s.q1;
  const double lo = s.q1 - 1.5 * iqr, hi = s.q3 + 1.5 * iqr;
  s.whisker_low = s.q3;
  s.whisker_high = s.q1;
  double abs_sum = 0.0;
  for (double v : values) {
    abs_sum += std::abs(v - 1.0);
    if (v < lo || v > hi) {
      s.outliers.push_back(v);
    } else {
      s.whisker_low = std::min(s.whisker_low, v);
      s.whisker_high = std::max(s.whisker_high, v);
    }
  }
  s.mean_abs_error = abs_sum / static_cast<double>(values.size());
  return s;
}

/// Closed form at every order against one RK4 run per configuration cell.
/// Cells run on worker threads; records keep config order
/// (band, G_R, launch, length, order) regardless of scheduling.
inline SweepResult run_order_sweep(const SweepConfig& config) {
  config.validate();
  struct Cell {
    std::size_t band;
    double gain, launch, length;
  };
  std::vector<GridPtr> grids;
  for (const auto& b : config.bands) grids.push_back(make_grid(standard_band_plan(b), config.spacing_thz));
  std::vector<Cell> cells;
  for (std::size_t b = 0; b < config.bands.size(); ++b)
    for (double g : config.peak_gain.values())
      for (double p : config.launch_dbm.values())
        for (double l : config.length_km.values()) cells.push_back({b, g, p, l});

  const std::size_t per_cell = config.orders.size();
  std::vector<SweepRecord> records(cells.size() * per_cell);

  auto run_cell = [&](std::size_t c) {
    using clock = std::chrono::steady_clock;
    const Cell& cell = cells[c];
    SweepRecord base;
    base.band = config.bands[cell.band];
    base.peak_gain = cell.gain;
    base.launch_dbm = cell.launch;
    base.length_km = cell.length;
    for (std::size_t k = 0; k < per_cell; ++k) {
      records[c * per_cell + k] = base;
      records[c * per_cell + k].order = config.orders[k];
    }
    try {
      FiberSpec fiber{config.attenuation, RamanGainModel::from_peak(cell.gain), cell.length};
      const PowerSpectrum launch = PowerSpectrum::flat(grids[cell.band], dbm_to_watt(cell.launch));
      const auto t0 = clock::now();
      const PowerSpectrum oracle = integrate_span(launch, fiber, config.solver).back();
      const double oracle_s = std::chrono::duration<double>(clock::now() - t0).count();
      for (std::size_t k = 0; k < per_cell; ++k) {
        SweepRecord& r = records[c * per_cell + k];
        r.oracle_seconds = oracle_s;
        try {
          const auto t1 = clock::now();
          const auto params = derive_closedform_params(launch, fiber, r.order);
          const PowerSpectrum cf = power_profile(launch, params, params.raman_slope, fiber.length_km);
          r.closedform_seconds = std::chrono::duration<double>(clock::now() - t1).count();
          r.error_ratio = total_power_error_ratio(cf, oracle);
          r.max_deviation_db = max_channel_deviation_db(cf, oracle);
        } catch (const std::exception& e) {
          r.error = e.what();
        }
      }
    } catch (const std::exception& e) {
      for (std::size_t k = 0; k < per_cell; ++k) records[c * per_cell + k].error = e.what();
    }
  };

  unsigned workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, cells.size()));
  if (workers <= 1) {
    for (std::size_t c = 0; c < cells.size(); ++c) run_cell(c);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t c = w; c < cells.size(); c += workers) run_cell(c);
      });
    for (auto& t : pool) t.join();
  }

  SweepResult result;
  for (const auto& band : config.bands)
    for (int n : config.orders) {
      std::vector<double> v;
      for (const auto& r : records)
        if (r.ok() && r.band == band && r.order == n) v.push_back(r.error_ratio);
      result.summaries.push_back(summarize(band, n, std::move(v)));
    }
  result.records = std::move(records);
  return result;
}

/// Mean |eps_P - 1| per order, pooled over the given bands.
inline std::map<int, double> mean_abs_error_by_order(const SweepResult& result, const std::vector<std::string>& bands) {
  std::map<int, std::pair<double, std::size_t>> acc;
  for (const auto& r : result.records) {
    if (!r.ok() || std::find(bands.begin(), bands.end(), r.band) == bands.end()) continue;
    auto& [sum, n] = acc[r.order];
    sum += std::abs(r.error_ratio - 1.0);
    ++n;
  }
  std::map<int, double> out;
  for (const auto& [order, sn] : acc) out[order] = sn.first / static_cast<double>(sn.second);
  return out;
}

}  // namespace isrs
