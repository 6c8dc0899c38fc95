#include <array>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ecco/master.hpp"
#include "ecco/quarter_car.hpp"

namespace {

namespace qc = ecco::quarter_car;

const qc::Params kLinear = qc::preset_params(qc::Preset::Linear);
const qc::Params kNonlinear = qc::preset_params(qc::Preset::Nonlinear);

TEST(QuarterCar, Excitation) {
  EXPECT_EQ(qc::excitation(-1.0), 0.0);
  EXPECT_EQ(qc::excitation(0.0), 0.1);
  EXPECT_EQ(qc::excitation(2.0), 0.1);
}

TEST(QuarterCar, SpringDamperForceExamples) {
  EXPECT_NEAR(qc::spring_damper_force(0.1, 0.0, 0.0, 0.0, kLinear), 1500.0, 1e-9);
  EXPECT_NEAR(qc::spring_damper_force(0.0, 0.0, 1.0, 0.0, kLinear), 1000.0, 1e-12);
  EXPECT_NEAR(qc::spring_damper_force(0.0, 0.0, 0.25, 0.0, kNonlinear), 450.0, 1e-12);
  EXPECT_NEAR(qc::spring_damper_force(0.0, 0.0, -0.25, 0.0, kNonlinear), -450.0, 1e-12);
  EXPECT_EQ(qc::damper_force(0.0, kNonlinear), 0.0);
  EXPECT_EQ(qc::damper_force(-0.0, kNonlinear), 0.0);
}

TEST(QuarterCar, TyreForceExamples) {
  EXPECT_NEAR(qc::tyre_force(0.0, 0.0, kLinear), -15000.0, 1e-9);
  EXPECT_NEAR(qc::tyre_force(0.1, 1.0, kLinear), 0.0, 1e-12);
  EXPECT_EQ(qc::tyre_force(0.0, -1.0, kLinear), 0.0);
}

TEST(QuarterCar, LinearPresetDampingIsExactlyLinear) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const double zc = d(rng), zw = d(rng), vc = d(rng), vw = d(rng);
    EXPECT_EQ(qc::spring_damper_force(zc, zw, vc, vw, kLinear),
              kLinear.k_c * (zc - zw) + kLinear.d_c * (vc - vw));
  }
}

TEST(QuarterCar, DampingIsOdd) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (const auto& p : {kLinear, kNonlinear}) {
    for (int i = 0; i < 1000; ++i) {
      const double dv = d(rng);
      EXPECT_EQ(qc::damper_force(-dv, p), -qc::damper_force(dv, p));
    }
  }
}

TEST(QuarterCar, InitialEnergyIs750J) {
  EXPECT_NEAR(qc::initial_energy(kLinear), 750.0, 1e-9);
  EXPECT_NEAR(qc::initial_energy(kNonlinear), 750.0, 1e-9);
}

TEST(QuarterCar, PresetParsing) {
  EXPECT_EQ(qc::parse_preset("linear"), qc::Preset::Linear);
  EXPECT_EQ(qc::parse_preset("nonlinear"), qc::Preset::Nonlinear);
  EXPECT_EQ(qc::parse_reticulation("B"), qc::Reticulation::B);
  EXPECT_THROW((void)qc::parse_preset("stiff"), ecco::ConfigError);
  EXPECT_THROW((void)qc::parse_reticulation("C"), ecco::ConfigError);
  EXPECT_EQ(kLinear.damping_exponent(), 1.0);
  EXPECT_EQ(kNonlinear.damping_exponent(), 0.5);
}

TEST(QuarterCar, ChassisExactFreeFlight) {
  qc::ChassisExact s(kLinear);
  s.set_state(0.02, 0.5);
  const std::array<double, 1> u{0.0};
  s.set_inputs(u);
  s.do_step(0.0, 1e-3);
  EXPECT_DOUBLE_EQ(s.state()[0], 0.02 + 0.5e-3);
  EXPECT_DOUBLE_EQ(s.state()[1], 0.5);
}

TEST(QuarterCar, ChassisExactUnderHeldForce) {
  qc::ChassisExact s(kLinear);
  const std::array<double, 1> u{-400.0};
  s.set_inputs(u);
  s.do_step(0.0, 1e-3);
  EXPECT_NEAR(s.state()[1], -1.0e-3, 1e-18);
  std::array<double, 1> y{};
  s.get_outputs(y);
  EXPECT_EQ(y[0], s.state()[1]);
}

TEST(QuarterCar, ChassisExactAgreesWithFineEuler) {
  const double z0 = 0.013, v0 = -0.21, force = 735.0, dt = 1e-3;
  qc::ChassisExact s(kLinear);
  s.set_state(z0, v0);
  const std::array<double, 1> u{force};
  s.set_inputs(u);
  s.do_step(0.0, dt);

  const int n = 10000; // h = 1e-7
  const double h = dt / n;
  double z = z0, v = v0;
  for (int i = 0; i < n; ++i) {
    z += v * h;
    v += force / kLinear.m_c * h;
  }
  EXPECT_NEAR(s.state()[1], v, 1e-9 * std::abs(v));
  EXPECT_NEAR(s.state()[0], z, 1e-6 * std::abs(z));
}

TEST(QuarterCar, WheelAtRestBeforeExcitation) {
  qc::WheelEuler s(kLinear, 10);
  const std::array<double, 1> u{0.0};
  s.set_inputs(u);
  s.do_step(-1.0, 1e-3);
  EXPECT_EQ(s.state(), (std::vector<double>{0.0, 0.0, 0.0}));
  std::array<double, 1> y{1.0};
  s.get_outputs(y);
  EXPECT_EQ(y[0], 0.0);

  qc::WheelOnlyEuler w(kLinear, 10);
  w.set_inputs(u);
  w.do_step(-1.0, 1e-3);
  EXPECT_EQ(w.state(), (std::vector<double>{0.0, 0.0}));
}

TEST(QuarterCar, ChassisSpringAtRestAndFirstSubstepForce) {
  qc::ChassisSpringEuler s(kLinear, 10);
  const std::array<double, 1> u{0.0};
  s.set_inputs(u);
  s.do_step(0.0, 1e-3);
  EXPECT_EQ(s.state(), (std::vector<double>{0.0, 0.0, 0.0}));

  qc::ChassisSpringEuler t(kLinear, 1);
  t.set_state(0.01, 0.0, 0.0);
  t.set_inputs(u);
  std::array<double, 1> y{};
  t.get_outputs(y);
  EXPECT_NEAR(y[0], 150.0, 1e-12);
  t.do_step(0.0, 1e-3);
  // one Euler substep driven by that force
  EXPECT_NEAR(t.state()[1], -150.0 / kLinear.m_c * 1e-3, 1e-15);
}

TEST(QuarterCar, SubstepRefinementConvergesAtFirstOrder) {
  auto step_with = [](int n) {
    qc::WheelOnlyEuler w(kLinear, n);
    const std::array<double, 1> u{-200.0};
    w.set_inputs(u);
    w.do_step(0.0, 5e-3);
    return w.state()[1];
  };
  const double a = step_with(10);
  const double b = step_with(20);
  const double c = step_with(40);
  const double fine = step_with(1 << 16);
  const double r1 = std::abs(a - fine) / std::abs(b - fine);
  const double r2 = std::abs(b - fine) / std::abs(c - fine);
  EXPECT_NEAR(r1, 2.0, 0.2);
  EXPECT_NEAR(r2, 2.0, 0.2);
}

TEST(QuarterCar, ReconstructedDisplacementDriftVanishesWithStepSize) {
  auto max_drift = [](double dt) {
    auto setup = qc::make_setup(kLinear, qc::Reticulation::A);
    const auto wiring = ecco::validate_graph(setup.graph, setup.slots);
    ecco::StepController c(ecco::ConstantPolicy{dt});
    ecco::RunOptions opt;
    opt.t_end = 1.0;
    opt.dt0 = dt;
    opt.probes = {"z_c", "z_c_int"};
    const auto run = ecco::run_cosimulation(setup.slots, wiring, c, opt);
    double drift = 0.0;
    for (const auto& row : run.rows) drift = std::max(drift, std::abs(*row.probes[0] - *row.probes[1]));
    return drift;
  };
  const double d2 = max_drift(2e-3);
  const double d1 = max_drift(1e-3);
  const double d05 = max_drift(5e-4);
  EXPECT_GT(d2, 0.0);
  EXPECT_NEAR(d2 / d1, 2.0, 0.3);
  EXPECT_NEAR(d1 / d05, 2.0, 0.3);
}

// With the chassis velocity fed in exactly, the wheel's reconstructed
// displacement integrates the same signal as the chassis itself.
TEST(QuarterCar, ReconstructedDisplacementTracksChassisWhenFused) {
  qc::WheelEuler wheel(kLinear, 1);
  qc::ChassisExact chassis(kLinear);
  chassis.set_state(0.0, 0.3);
  const double dt = 1e-4;
  for (int i = 0; i < 1000; ++i) {
    std::array<double, 1> v{};
    chassis.get_outputs(v);
    wheel.set_inputs(v);
    wheel.do_step(i * dt, dt);
    std::array<double, 1> f{};
    wheel.get_outputs(f);
    // zero-force chassis so its velocity stays constant over each step
    const std::array<double, 1> zero{0.0};
    chassis.set_inputs(zero);
    chassis.do_step(i * dt, dt);
    EXPECT_NEAR(wheel.state()[0], chassis.state()[0], 1e-14);
  }
}

TEST(QuarterCar, MicroRatioMustBePositive) {
  EXPECT_THROW(qc::WheelEuler(kLinear, 0), ecco::ConfigError);
  EXPECT_THROW(qc::ChassisSpringEuler(kLinear, 0), ecco::ConfigError);
  EXPECT_THROW(qc::WheelOnlyEuler(kLinear, 0), ecco::ConfigError);
}

} // namespace
