#include <algorithm>
#include <charconv>
#include <cstring>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "ecco/config_file.hpp"
#include "ecco/csv.hpp"
#include "ecco/reproduce.hpp"

namespace {

namespace qc = ecco::quarter_car;

TEST(Bench, DefaultsMirrorControllerTable) {
  const ecco::ExperimentConfig c;
  EXPECT_EQ(c.bounds.alpha_s, 0.8);
  EXPECT_EQ(c.bounds.dt_min, 1e-4);
  EXPECT_EQ(c.bounds.dt_max, 1e-2);
  EXPECT_EQ(c.bounds.theta_min, 0.2);
  EXPECT_EQ(c.bounds.theta_max, 1.5);
  EXPECT_EQ(c.E0, 750.0);
  EXPECT_EQ(c.micro_ratio_s1, 10);
  EXPECT_EQ(c.micro_ratio_s2, 10);
}

TEST(Bench, ParsesKeyValueText) {
  const auto kv = ecco::parse_key_values(
      "# comment\n"
      "model.preset = nonlinear\n"
      "\n"
      "  controller.type=ecco   # trailing comment\n"
      "controller.r = 7.5e-6\r\n"
      "sim.t_end = 1.5");
  ecco::ExperimentConfig c;
  ecco::apply_settings(c, kv);
  EXPECT_EQ(c.preset, qc::Preset::Nonlinear);
  EXPECT_EQ(c.controller, ecco::ControllerType::Ecco);
  EXPECT_EQ(c.r, 7.5e-6);
  EXPECT_EQ(c.effective_t_end(), 1.5);
  EXPECT_EQ(c.effective_dt0(), 1e-4);
}

TEST(Bench, LaterSettingsWin) {
  ecco::ExperimentConfig c;
  ecco::apply_settings(c, ecco::parse_key_values("controller.TOL = 0.5\n"));
  ecco::apply_setting(c, "controller.TOL", "2.1");
  EXPECT_EQ(c.TOL, 2.1);
}

TEST(Bench, RejectsBadConfig) {
  ecco::ExperimentConfig c;
  EXPECT_THROW(ecco::apply_setting(c, "model.colour", "red"), ecco::ConfigError);
  EXPECT_THROW(ecco::apply_setting(c, "controller.r", "abc"), ecco::ConfigError);
  EXPECT_THROW(ecco::apply_setting(c, "controller.r", "1e-3x"), ecco::ConfigError);
  EXPECT_THROW(ecco::apply_setting(c, "model.micro_ratio_s1", "2.5"), ecco::ConfigError);
  EXPECT_THROW(ecco::apply_setting(c, "controller.type", "pid"), ecco::ConfigError);
  EXPECT_THROW((void)ecco::parse_key_values("no equals sign"), ecco::ConfigError);
  EXPECT_THROW((void)ecco::parse_key_values("nosection = 1"), ecco::ConfigError);
  EXPECT_THROW((void)ecco::read_key_value_file("/nonexistent/config.ini"), ecco::ConfigError);
  ecco::apply_setting(c, "model.micro_ratio_s1", "0");
  EXPECT_THROW(c.validate(), ecco::ConfigError);
}

TEST(Bench, NumbersRoundTripExactly) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<std::uint64_t> bits;
  int checked = 0;
  while (checked < 10000) {
    const std::uint64_t b = bits(rng);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    const auto s = ecco::csv::format_number(v);
    double back = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), back);
    ASSERT_EQ(ec, std::errc{});
    ASSERT_EQ(ptr, s.data() + s.size());
    ASSERT_EQ(std::memcmp(&v, &back, sizeof v), 0) << s;
    ++checked;
  }
  EXPECT_EQ(ecco::csv::format_number(0.001), "0.001");
  EXPECT_EQ(ecco::csv::format_number(std::optional<double>{}), "");
}

TEST(Bench, TrajectoryAndSummaryHeaders) {
  ecco::ExperimentConfig cfg;
  cfg.t_end = 0.005;
  const auto result = ecco::run_experiment(cfg);
  std::ostringstream traj, summ;
  ecco::csv::write_trajectory(traj, result.record);
  ecco::csv::write_summary(summ, cfg, result.summary);
  std::istringstream t(traj.str());
  std::string line;
  std::getline(t, line);
  EXPECT_EQ(line, "t,dt,eps,P12,P_port1,P_port2,dP_res,dE_res,E_res_accum,z_c,v_c,z_w,v_w");
  int rows = 0;
  while (std::getline(t, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 12);
  }
  EXPECT_EQ(rows, 5);
  std::istringstream s(summ.str());
  std::getline(s, line);
  EXPECT_EQ(line, "preset,reticulation,controller,tolerance,mean_dt,steps,mean_P12,mean_abs_dP,total_residual");
  std::getline(s, line);
  EXPECT_EQ(line.rfind("linear,A,constant,,0.001,5,", 0), 0u) << line;
}

TEST(Bench, ZeroHorizonWritesHeaderOnly) {
  ecco::ExperimentConfig cfg;
  cfg.t_end = 0.0;
  const auto result = ecco::run_experiment(cfg);
  std::ostringstream traj;
  ecco::csv::write_trajectory(traj, result.record);
  EXPECT_EQ(traj.str(), std::string(ecco::csv::kTrajectoryHeader) + "\n");
  EXPECT_EQ(result.summary.step_count, 0u);
}

TEST(Bench, RepeatedRunsAreByteIdentical) {
  for (auto controller : {ecco::ControllerType::Constant, ecco::ControllerType::Ecco,
                          ecco::ControllerType::PredictorCorrector}) {
    ecco::ExperimentConfig cfg;
    cfg.controller = controller;
    cfg.reticulation = qc::Reticulation::B;
    cfg.t_end = 1.0;
    std::string out[2];
    for (auto& o : out) {
      const auto result = ecco::run_experiment(cfg);
      std::ostringstream os;
      ecco::csv::write_trajectory(os, result.record);
      ecco::csv::write_summary(os, cfg, result.summary);
      o = os.str();
    }
    EXPECT_EQ(out[0], out[1]);
  }
}

TEST(Bench, ExpectedTablesAreComplete) {
  const auto ids = ecco::expected_table_ids();
  const std::vector<std::string> want{"T3",        "T7",           "T8",      "T9",     "T10",
                                      "PC-linear", "PC-nonlinear", "PC-altA", "PC-altB"};
  EXPECT_EQ(ids, want);
  EXPECT_THROW((void)ecco::find_expected_table("T4"), ecco::ConfigError);
  for (const auto& t : ecco::expected_tables()) {
    for (const auto& row : t.rows) {
      EXPECT_NO_THROW(row.config.validate());
      EXPECT_FALSE(row.cells.empty());
      EXPECT_EQ(ecco::find_expected_row(row.config), &row);
    }
  }
}

TEST(Bench, WithinUsesRelativeTolerance) {
  EXPECT_TRUE(ecco::within(1.1, 1.0, 0.1 + 1e-12));
  EXPECT_FALSE(ecco::within(1.2, 1.0, 0.1));
  EXPECT_TRUE(ecco::within(-180.0, -192.0, 0.2));
  EXPECT_FALSE(ecco::within(std::nan(""), 1.0, 0.5));
}

TEST(Bench, FailedRowIsReportedAsFailure) {
  const auto& table = ecco::find_expected_table("T3");
  ecco::ExperimentResult fake;
  fake.summary.total_residual = 100.0;
  fake.summary.mean_abs_dP = 1.3;
  fake.summary.mean_P12 = 0.4;
  const auto r = ecco::compare_row(table.rows[0], fake);
  EXPECT_FALSE(r.pass());
  EXPECT_FALSE(r.cells[0].pass);
  EXPECT_TRUE(r.cells[1].pass);
}

} // namespace
