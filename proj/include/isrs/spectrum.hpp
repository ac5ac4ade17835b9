#pragma once

#include <cstddef>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "isrs/profiles.hpp"

namespace isrs {

using GridPtr = std::shared_ptr<const ChannelGrid>;

inline GridPtr make_grid(const BandPlan& plan, double spacing_thz) {
  return std::make_shared<const ChannelGrid>(build_channel_grid(plan, spacing_thz));
}

/// Per-channel powers (W) on a grid at longitudinal position z (km).
class PowerSpectrum {
 public:
  PowerSpectrum(GridPtr grid, std::vector<double> powers_w, double z_km = 0.0)
      : grid_(std::move(grid)), powers_(std::move(powers_w)), z_(z_km) {
    if (!grid_) throw std::invalid_argument("power spectrum needs a grid");
    if (powers_.size() != grid_->size())
      throw std::invalid_argument("power spectrum length does not match the channel count");
    for (double p : powers_)
      if (!(p >= 0.0)) throw std::invalid_argument("channel powers must be non-negative");
  }

  static PowerSpectrum flat(GridPtr grid, double power_w, double z_km = 0.0) {
    const std::size_t n = grid->size();
    return PowerSpectrum(std::move(grid), std::vector<double>(n, power_w), z_km);
  }

  const ChannelGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return powers_.size(); }
  std::span<const double> powers() const { return powers_; }
  double operator[](std::size_t k) const { return powers_[k]; }
  double z() const { return z_; }

  double total() const { return std::accumulate(powers_.begin(), powers_.end(), 0.0); }

  PowerSpectrum scaled(double factor) const {
    std::vector<double> p(powers_);
    for (double& v : p) v *= factor;
    return {grid_, std::move(p), z_};
  }

  PowerSpectrum at_position(double z_km) const { return {grid_, powers_, z_km}; }

  /// Powers divided by their total (the "normalized" spectrum).
  std::vector<double> normalized() const {
    const double t = total();
    if (!(t > 0.0)) throw std::invalid_argument("cannot normalize a spectrum with zero total power");
    std::vector<double> p(powers_);
    for (double& v : p) v /= t;
    return p;
  }

 private:
  GridPtr grid_;
  std::vector<double> powers_;
  double z_ = 0.0;
};

}  // namespace isrs
