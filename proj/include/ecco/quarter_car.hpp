#pragma once

// Quarter-car benchmark split into two coupled subsimulators.
//
//   m_c z_c'' = -F_c
//   m_w z_w'' = -F_w + F_c
//   F_c = k_c (z_c - z_w) + d_c sign(v_c - v_w) |v_c - v_w|^(2/(1+2 n_d))
//   F_w = k_w (z_w - z(t)),   z(t) = 0.1 m for t >= 0
//
// Reticulation A: S1 = chassis (u1 = -F_c, y1 = v_c), S2 = wheel and
// suspension (u2 = v_c, y2 = F_c). Reticulation B: S1 = chassis and
// suspension (u1 = v_w, y1 = F_c), S2 = wheel (u2 = -F_c, y2 = v_w).
//
// Every Euler integrator evaluates derivatives at the start of a substep.
// A simulator that receives a velocity integrates it to reconstruct the
// displacement it needs for the spring force.

#include <array>
#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ecco/core_model.hpp"

namespace ecco::quarter_car {

struct Params {
  double m_c = 400.0;
  double m_w = 40.0;
  double k_c = 15000.0;
  double k_w = 150000.0;
  double d_c = 1000.0;
  double n_d = 0.5;
  double road_step = 0.1; ///< height of the step excitation in m

  [[nodiscard]] double damping_exponent() const { return 2.0 / (1.0 + 2.0 * n_d); }

  void validate() const {
    if (!(m_c > 0 && m_w > 0 && k_c > 0 && k_w > 0)) {
      throw ConfigError("quarter car: masses and stiffnesses must be positive");
    }
    if (!(d_c >= 0) || !(n_d >= 0)) {
      throw ConfigError("quarter car: damping parameters must be non-negative");
    }
  }
};

enum class Preset { Linear, Nonlinear };
enum class Reticulation { A, B };

[[nodiscard]] inline Params preset_params(Preset p) {
  Params out;
  if (p == Preset::Nonlinear) {
    out.d_c = 900.0;
    out.n_d = 1.5;
  }
  return out;
}

[[nodiscard]] inline std::string_view to_string(Preset p) { return p == Preset::Linear ? "linear" : "nonlinear"; }
[[nodiscard]] inline std::string_view to_string(Reticulation r) { return r == Reticulation::A ? "A" : "B"; }

[[nodiscard]] inline Preset parse_preset(std::string_view s) {
  if (s == "linear") return Preset::Linear;
  if (s == "nonlinear") return Preset::Nonlinear;
  throw ConfigError("unknown preset '" + std::string(s) + "' (expected linear or nonlinear)");
}

[[nodiscard]] inline Reticulation parse_reticulation(std::string_view s) {
  if (s == "A" || s == "a") return Reticulation::A;
  if (s == "B" || s == "b") return Reticulation::B;
  throw ConfigError("unknown reticulation '" + std::string(s) + "' (expected A or B)");
}

/// Default simulated horizon of each preset in seconds.
[[nodiscard]] inline double default_horizon(Preset p) { return p == Preset::Linear ? 4.0 : 2.0; }

/// Road displacement: 0 before t = 0, the step height from t = 0 on.
[[nodiscard]] inline double excitation(double t, const Params& p = {}) { return t < 0.0 ? 0.0 : p.road_step; }

/// Damper force for relative velocity dv; exactly zero at dv = 0.
[[nodiscard]] inline double damper_force(double dv, const Params& p) {
  if (dv == 0.0) {
    return 0.0;
  }
  const double e = p.damping_exponent();
  if (e == 1.0) {
    return p.d_c * dv;
  }
  const double mag = e == 0.5 ? std::sqrt(std::abs(dv)) : std::pow(std::abs(dv), e);
  return dv > 0.0 ? p.d_c * mag : -p.d_c * mag;
}

[[nodiscard]] inline double spring_damper_force(double z_c, double z_w, double v_c, double v_w, const Params& p) {
  return p.k_c * (z_c - z_w) + damper_force(v_c - v_w, p);
}

[[nodiscard]] inline double tyre_force(double z_w, double t, const Params& p) {
  return p.k_w * (z_w - excitation(t, p));
}

/// Energy stored in the tyre spring at t = 0 (the whole excitation energy).
[[nodiscard]] inline double initial_energy(const Params& p) { return 0.5 * p.k_w * p.road_step * p.road_step; }

/// Reticulation A, S1: chassis mass under a held force, integrated exactly.
class ChassisExact final : public Subsimulator {
public:
  explicit ChassisExact(Params p) : p_(p) {}

  [[nodiscard]] std::size_t input_count() const override { return 1; }
  [[nodiscard]] std::size_t output_count() const override { return 1; }
  void set_inputs(std::span<const double> u) override { force_ = u[0]; }

  void do_step(double /*t*/, double dt) override {
    const double a = force_ / p_.m_c;
    z_c_ += v_c_ * dt + 0.5 * a * dt * dt;
    v_c_ += a * dt;
  }

  void get_outputs(std::span<double> y) const override { y[0] = v_c_; }
  [[nodiscard]] std::vector<double> state() const override { return {z_c_, v_c_}; }
  [[nodiscard]] std::vector<Probe> probes() const override { return {{"z_c", z_c_}, {"v_c", v_c_}}; }

  void set_state(double z_c, double v_c) {
    z_c_ = z_c;
    v_c_ = v_c;
  }

private:
  Params p_;
  double z_c_ = 0.0;
  double v_c_ = 0.0;
  double force_ = 0.0;
};

/// Reticulation A, S2: wheel, tyre and suspension with Euler substeps.
/// Input is the chassis velocity, output the suspension force.
class WheelEuler final : public Subsimulator {
public:
  WheelEuler(Params p, int n_micro) : p_(p), n_micro_(n_micro) {
    if (n_micro < 1) throw ConfigError("micro step ratio must be >= 1");
  }

  [[nodiscard]] std::size_t input_count() const override { return 1; }
  [[nodiscard]] std::size_t output_count() const override { return 1; }
  void set_inputs(std::span<const double> u) override { v_c_in_ = u[0]; }

  void do_step(double t, double dt) override {
    const double h = dt / n_micro_;
    for (int j = 0; j < n_micro_; ++j) {
      const double t_sub = t + j * h;
      const double f_c = spring_damper_force(z_c_int_, z_w_, v_c_in_, v_w_, p_);
      const double f_w = tyre_force(z_w_, t_sub, p_);
      const double a_w = (-f_w + f_c) / p_.m_w;
      z_c_int_ += v_c_in_ * h;
      z_w_ += v_w_ * h;
      v_w_ += a_w * h;
    }
  }

  void get_outputs(std::span<double> y) const override {
    y[0] = spring_damper_force(z_c_int_, z_w_, v_c_in_, v_w_, p_);
  }
  [[nodiscard]] std::vector<double> state() const override { return {z_c_int_, z_w_, v_w_}; }
  [[nodiscard]] std::vector<Probe> probes() const override {
    return {{"z_w", z_w_}, {"v_w", v_w_}, {"z_c_int", z_c_int_}};
  }

  void set_state(double z_c_int, double z_w, double v_w) {
    z_c_int_ = z_c_int;
    z_w_ = z_w;
    v_w_ = v_w;
  }

private:
  Params p_;
  int n_micro_;
  double z_c_int_ = 0.0;
  double z_w_ = 0.0;
  double v_w_ = 0.0;
  double v_c_in_ = 0.0;
};

/// Reticulation B, S1: chassis plus suspension with Euler substeps.
/// Input is the wheel velocity, output the suspension force.
class ChassisSpringEuler final : public Subsimulator {
public:
  ChassisSpringEuler(Params p, int n_micro) : p_(p), n_micro_(n_micro) {
    if (n_micro < 1) throw ConfigError("micro step ratio must be >= 1");
  }

  [[nodiscard]] std::size_t input_count() const override { return 1; }
  [[nodiscard]] std::size_t output_count() const override { return 1; }
  void set_inputs(std::span<const double> u) override { v_w_in_ = u[0]; }

  void do_step(double /*t*/, double dt) override {
    const double h = dt / n_micro_;
    for (int j = 0; j < n_micro_; ++j) {
      const double f_c = spring_damper_force(z_c_, z_w_int_, v_c_, v_w_in_, p_);
      const double a_c = -f_c / p_.m_c;
      z_w_int_ += v_w_in_ * h;
      z_c_ += v_c_ * h;
      v_c_ += a_c * h;
    }
  }

  void get_outputs(std::span<double> y) const override {
    y[0] = spring_damper_force(z_c_, z_w_int_, v_c_, v_w_in_, p_);
  }
  [[nodiscard]] std::vector<double> state() const override { return {z_c_, v_c_, z_w_int_}; }
  [[nodiscard]] std::vector<Probe> probes() const override {
    return {{"z_c", z_c_}, {"v_c", v_c_}, {"z_w_int", z_w_int_}};
  }

  void set_state(double z_c, double v_c, double z_w_int) {
    z_c_ = z_c;
    v_c_ = v_c;
    z_w_int_ = z_w_int;
  }

private:
  Params p_;
  int n_micro_;
  double z_c_ = 0.0;
  double v_c_ = 0.0;
  double z_w_int_ = 0.0;
  double v_w_in_ = 0.0;
};

/// Reticulation B, S2: wheel and tyre with Euler substeps.
/// Input is -F_c, output the wheel velocity.
class WheelOnlyEuler final : public Subsimulator {
public:
  WheelOnlyEuler(Params p, int n_micro) : p_(p), n_micro_(n_micro) {
    if (n_micro < 1) throw ConfigError("micro step ratio must be >= 1");
  }

  [[nodiscard]] std::size_t input_count() const override { return 1; }
  [[nodiscard]] std::size_t output_count() const override { return 1; }
  void set_inputs(std::span<const double> u) override { neg_f_c_ = u[0]; }

  void do_step(double t, double dt) override {
    const double h = dt / n_micro_;
    const double f_c = -neg_f_c_;
    for (int j = 0; j < n_micro_; ++j) {
      const double t_sub = t + j * h;
      const double a_w = (-tyre_force(z_w_, t_sub, p_) + f_c) / p_.m_w;
      z_w_ += v_w_ * h;
      v_w_ += a_w * h;
    }
  }

  void get_outputs(std::span<double> y) const override { y[0] = v_w_; }
  [[nodiscard]] std::vector<double> state() const override { return {z_w_, v_w_}; }
  [[nodiscard]] std::vector<Probe> probes() const override { return {{"z_w", z_w_}, {"v_w", v_w_}}; }

  void set_state(double z_w, double v_w) {
    z_w_ = z_w;
    v_w_ = v_w;
  }

private:
  Params p_;
  int n_micro_;
  double z_w_ = 0.0;
  double v_w_ = 0.0;
  double neg_f_c_ = 0.0;
};

/// The bond of a reticulation, with S1 as slot 0 and S2 as slot 1.
[[nodiscard]] inline PowerBond coupling_bond(Reticulation r) {
  PowerBond b;
  b.port1.owner = 0;
  b.port2.owner = 1;
  if (r == Reticulation::A) {
    // u1 = -F_c = -y2, u2 = v_c = y1
    b.port1.input_role = PortRole::Effort;
    b.port1.output_role = PortRole::Flow;
    b.port2.input_role = PortRole::Flow;
    b.port2.output_role = PortRole::Effort;
    b.c1 = -1;
    b.c2 = +1;
    // -F_c * v_c is the power entering the chassis
    b.sense = PowerSense::IntoPort;
    b.name = "suspension-A";
  } else {
    // u1 = v_w = y2, u2 = -F_c = -y1
    b.port1.input_role = PortRole::Flow;
    b.port1.output_role = PortRole::Effort;
    b.port2.input_role = PortRole::Effort;
    b.port2.output_role = PortRole::Flow;
    b.c1 = +1;
    b.c2 = -1;
    b.name = "suspension-B";
  }
  return b;
}

struct Setup {
  SlotList slots;
  ConnectionGraph graph;
};

/// Builds both subsimulators and their bond. micro_s1 is unused for
/// reticulation A because the chassis is integrated exactly there.
[[nodiscard]] inline Setup make_setup(const Params& p, Reticulation r, int micro_s1 = 10, int micro_s2 = 10) {
  p.validate();
  Setup s;
  if (r == Reticulation::A) {
    s.slots.push_back(std::make_unique<ChassisExact>(p));
    s.slots.push_back(std::make_unique<WheelEuler>(p, micro_s2));
  } else {
    s.slots.push_back(std::make_unique<ChassisSpringEuler>(p, micro_s1));
    s.slots.push_back(std::make_unique<WheelOnlyEuler>(p, micro_s2));
  }
  s.graph.bonds.push_back(coupling_bond(r));
  return s;
}

/// Probe names of the four physical states, in CSV column order.
[[nodiscard]] inline std::vector<std::string> state_probes() { return {"z_c", "v_c", "z_w", "v_w"}; }

} // namespace ecco::quarter_car
