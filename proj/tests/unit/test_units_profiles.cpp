#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "isrs/profiles.hpp"
#include "isrs/spectrum.hpp"
#include "isrs/units.hpp"

using namespace isrs;

TEST(Units, DbPerKmToNeper) { EXPECT_NEAR(convert_units(0.2, Unit::db_per_km, Unit::per_km), 0.0460517, 1e-6); }

TEST(Units, DbmToWatt) {
  EXPECT_NEAR(convert_units(-1.0, Unit::dbm, Unit::watt), 7.943282e-4, 1e-9);
  EXPECT_DOUBLE_EQ(convert_units(0.0, Unit::dbm, Unit::watt), 1e-3);
}

TEST(Units, RoundTripsAndIdentity) {
  for (double v : {-30.0, -1.0, 0.0, 12.5}) {
    EXPECT_NEAR(convert_units(convert_units(v, Unit::dbm, Unit::watt), Unit::watt, Unit::dbm), v, 1e-12);
    EXPECT_NEAR(convert_units(convert_units(v, Unit::db, Unit::linear), Unit::linear, Unit::db), v, 1e-12);
  }
  EXPECT_EQ(convert_units(3.0, Unit::per_km, Unit::per_km), 3.0);
}

TEST(Units, RejectsNonPositiveToLog) {
  EXPECT_THROW(convert_units(0.0, Unit::watt, Unit::dbm), std::invalid_argument);
  EXPECT_THROW(convert_units(-1.0, Unit::linear, Unit::db), std::invalid_argument);
  EXPECT_THROW(convert_units(1.0, Unit::dbm, Unit::db_per_km), std::invalid_argument);
}

TEST(ChannelGrid, StandardChannelCounts) {
  EXPECT_EQ(build_channel_grid(standard_band_plan("C"), 0.05).size(), 81u);
  EXPECT_EQ(build_channel_grid(standard_band_plan("CL"), 0.05).size(), 223u);
  EXPECT_EQ(build_channel_grid(standard_band_plan("CLU"), 0.05).size(), 333u);
  EXPECT_EQ(build_channel_grid(standard_band_plan("SCL"), 0.05).size(), 418u);
  EXPECT_EQ(build_channel_grid(standard_band_plan("SCLU"), 0.05).size(), 528u);
}

TEST(ChannelGrid, CentersAndBandLookup) {
  const auto g = build_channel_grid(standard_band_plan("CLU"), 0.05);
  EXPECT_NEAR(g.frequency(0), 179.125, 1e-9);
  EXPECT_NEAR(g.frequency(332), 195.725, 1e-9);
  EXPECT_EQ(g.band_name(0), "U");
  EXPECT_EQ(g.band_name(110), "L");
  EXPECT_EQ(g.band_name(332), "C");
  for (std::size_t k = 1; k < g.size(); ++k) EXPECT_NEAR(g.frequency(k) - g.frequency(k - 1), 0.05, 1e-9);
  const auto [first, last] = g.band_range(1);
  EXPECT_EQ(first, 110u);
  EXPECT_EQ(last, 252u);
}

TEST(ChannelGrid, SingleChannelBand) {
  const auto g = build_channel_grid({{"X", 193.0, 193.05}}, 0.05);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_NEAR(g.frequency(0), 193.025, 1e-12);
}

TEST(ChannelGrid, NonMultipleWidthNamesBand) {
  try {
    build_channel_grid({{"C", 191.70, 195.75}, {"Q", 195.75, 195.83}}, 0.05);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("band Q"), std::string::npos);
  }
}

TEST(ChannelGrid, RejectsGapsAndUnknownLetters) {
  EXPECT_THROW(build_channel_grid({{"A", 190.0, 191.0}, {"B", 191.5, 192.0}}, 0.05), ConfigError);
  EXPECT_THROW(standard_band_plan("CX"), ConfigError);
  EXPECT_THROW(standard_band_plan("SU"), ConfigError);
  EXPECT_THROW(build_channel_grid(standard_band_plan("C"), 0.0), ConfigError);
}

TEST(Attenuation, ConstantAndParabolic) {
  const AttenuationProfile c{AttenuationProfile::Constant{0.046}};
  EXPECT_EQ(c.at(180.0), 0.046);
  const auto p = default_attenuation();
  EXPECT_NEAR(neper_to_db_per_km(p.at(190.5)), 0.19, 1e-12);
  EXPECT_NEAR(neper_to_db_per_km(p.at(200.5)), 0.19 + 2.5e-4 * 100, 1e-12);
  EXPECT_GT(p.at(179.1), p.at(190.5));
  EXPECT_TRUE(AttenuationProfile(AttenuationProfile::Constant{0.0}).is_lossless());
}

TEST(Attenuation, TabulatedInterpolatesAndRefusesToExtrapolate) {
  const AttenuationProfile t{AttenuationProfile::Tabulated{{190.0, 200.0}, {0.2, 0.3}}};
  EXPECT_NEAR(neper_to_db_per_km(t.at(195.0)), 0.25, 1e-12);
  EXPECT_THROW(t.at(201.0), std::out_of_range);
  const auto g = build_channel_grid(standard_band_plan("CL"), 0.05);
  EXPECT_THROW(t.sample(g), ConfigError);
}

TEST(Attenuation, RejectsBadParameters) {
  EXPECT_THROW(AttenuationProfile(AttenuationProfile::Constant{-1.0}), ConfigError);
  EXPECT_THROW(AttenuationProfile(AttenuationProfile::Tabulated{{1.0, 1.0}, {0.2, 0.2}}), ConfigError);
  EXPECT_THROW(AttenuationProfile(AttenuationProfile::Tabulated{{1.0, 2.0}, {0.2, -0.2}}), ConfigError);
}

TEST(RamanGain, TriangularValues) {
  const auto g = RamanGainModel::from_peak(0.4);
  EXPECT_NEAR(g.slope(), 0.4 / 14.0, 1e-15);
  EXPECT_NEAR(g.at(14.0), 0.4, 1e-12);
  EXPECT_NEAR(g.at(15.5), 0.4 / 14.0 * 15.5, 1e-12);  // window edge included
  EXPECT_EQ(g.at(15.6), 0.0);
  EXPECT_EQ(g.at(0.0), 0.0);
  EXPECT_THROW(g.at(-0.1), std::invalid_argument);
}

TEST(RamanGain, TabulatedCurve) {
  const auto g = RamanGainModel::tabulated({0.0, 10.0, 20.0}, {0.0, 0.3, 0.1}, 0.02);
  EXPECT_NEAR(g.at(5.0), 0.15, 1e-12);
  EXPECT_NEAR(g.at(15.0), 0.2, 1e-12);
  EXPECT_EQ(g.at(25.0), 0.0);
  EXPECT_NEAR(g.triangular_at(5.0), 0.1, 1e-12);
  EXPECT_THROW(RamanGainModel::tabulated({1.0, 2.0}, {0.0, 0.1}, 0.02), ConfigError);
}

TEST(PowerSpectrum, ValidatesAndNormalizes) {
  const auto grid = make_grid(standard_band_plan("C"), 0.05);
  EXPECT_THROW(PowerSpectrum(grid, std::vector<double>(80, 1.0)), std::invalid_argument);
  EXPECT_THROW(PowerSpectrum(grid, std::vector<double>(81, -1.0)), std::invalid_argument);
  const auto s = PowerSpectrum::flat(grid, 2e-3);
  EXPECT_NEAR(s.total(), 81 * 2e-3, 1e-15);
  for (double v : s.normalized()) EXPECT_NEAR(v, 1.0 / 81, 1e-15);
  EXPECT_THROW(PowerSpectrum::flat(grid, 0.0).normalized(), std::invalid_argument);
}
