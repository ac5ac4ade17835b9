#include <gtest/gtest.h>

#include "isrs/bench.hpp"

using namespace isrs;

TEST(ErrorRatio, IdentityAndUniformOffset) {
  const auto grid = make_grid(standard_band_plan("C"), 0.05);
  const auto s = PowerSpectrum::flat(grid, 1e-3);
  EXPECT_DOUBLE_EQ(total_power_error_ratio(s, s), 1.0);
  EXPECT_NEAR(total_power_error_ratio(s.scaled(1.01), s), 1.01, 1e-14);
  EXPECT_THROW(total_power_error_ratio(s, PowerSpectrum::flat(grid, 0.0)), NumericalError);
}

TEST(ErrorRatio, ScaleInvariant) {
  const auto grid = make_grid(standard_band_plan("CL"), 0.05);
  std::vector<double> a(grid->size()), b(grid->size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = 1e-3 * (1 + 0.1 * (i % 5));
    b[i] = 1e-3 * (1 + 0.07 * (i % 3));
  }
  const PowerSpectrum sa(grid, a), sb(grid, b);
  for (double k : {1e-3, 0.5, 7.0, 1e4})
    EXPECT_NEAR(total_power_error_ratio(sa.scaled(k), sb.scaled(k)), total_power_error_ratio(sa, sb), 1e-14);
}

TEST(SweepAxis, InclusiveLinspace) {
  const auto v = SweepAxis{0.3, 0.4, 5}.values();
  ASSERT_EQ(v.size(), 5u);
  EXPECT_DOUBLE_EQ(v.front(), 0.3);
  EXPECT_DOUBLE_EQ(v.back(), 0.4);
  EXPECT_NEAR(v[1], 0.325, 1e-15);
  EXPECT_EQ(SweepAxis({1.0, 2.0, 1}).values(), std::vector<double>{1.0});
  EXPECT_THROW((SweepAxis{2.0, 1.0, 3}.values()), ConfigError);
  EXPECT_THROW((SweepAxis{1.0, 2.0, 0}.values()), ConfigError);
}

TEST(Summary, QuartilesWhiskersOutliers) {
  const auto s = summarize("X", 3, {1.0, 1.01, 1.02, 1.03, 1.04, 1.05, 1.5});
  EXPECT_NEAR(s.median, 1.03, 1e-15);
  EXPECT_NEAR(s.q1, 1.015, 1e-15);
  EXPECT_NEAR(s.q3, 1.045, 1e-15);
  ASSERT_EQ(s.outliers.size(), 1u);
  EXPECT_DOUBLE_EQ(s.outliers[0], 1.5);
  EXPECT_DOUBLE_EQ(s.whisker_low, 1.0);
  EXPECT_DOUBLE_EQ(s.whisker_high, 1.05);
  EXPECT_EQ(s.count, 7u);
}

namespace {

SweepConfig single_cell() {
  SweepConfig c;
  c.bands = {"C", "CL"};
  c.peak_gain = {0.4, 0.4, 1};
  c.launch_dbm = {-1.0, -1.0, 1};
  c.length_km = {100.0, 100.0, 1};
  c.orders = {1, 3, 6};
  return c;
}

}  // namespace

TEST(Sweep, DegenerateConfigGivesOneRecordPerBandAndOrder) {
  const auto r = run_order_sweep(single_cell());
  ASSERT_EQ(r.records.size(), 6u);
  EXPECT_EQ(r.records[0].band, "C");
  EXPECT_EQ(r.records[0].order, 1);
  EXPECT_EQ(r.records[5].band, "CL");
  EXPECT_EQ(r.records[5].order, 6);
  for (const auto& rec : r.records) {
    EXPECT_TRUE(rec.ok()) << rec.error;
    EXPECT_GT(rec.error_ratio, 0.0);
  }
  EXPECT_NEAR(r.records[1].error_ratio, 1.0, 2e-3);  // C band
  ASSERT_EQ(r.summaries.size(), 6u);
  EXPECT_EQ(r.summaries[0].count, 1u);
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
  auto c = single_cell();
  c.launch_dbm = {-5.0, 0.0, 3};
  c.threads = 1;
  const auto a = run_order_sweep(c);
  c.threads = 3;
  const auto b = run_order_sweep(c);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].band, b.records[i].band);
    EXPECT_EQ(a.records[i].launch_dbm, b.records[i].launch_dbm);
    EXPECT_EQ(a.records[i].error_ratio, b.records[i].error_ratio);
    EXPECT_EQ(a.records[i].max_deviation_db, b.records[i].max_deviation_db);
  }
}

TEST(Sweep, FailedCellsAreRecordedAndSweepContinues) {
  auto c = single_cell();
  c.peak_gain = {0.4, 400.0, 2};  // the strong-gain cells blow up at 50 steps
  const auto r = run_order_sweep(c);
  ASSERT_EQ(r.records.size(), 12u);
  std::size_t failed = 0;
  for (const auto& rec : r.records) failed += !rec.ok();
  EXPECT_GT(failed, 0u);
  EXPECT_LT(failed, r.records.size());
}

TEST(Sweep, MeanAbsErrorByOrderPoolsBands) {
  const auto r = run_order_sweep(single_cell());
  const auto m = mean_abs_error_by_order(r, {"C", "CL"});
  ASSERT_EQ(m.size(), 3u);
  EXPECT_NEAR(m.at(3), (std::abs(r.records[1].error_ratio - 1) + std::abs(r.records[4].error_ratio - 1)) / 2, 1e-15);
}
