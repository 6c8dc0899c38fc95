#pragma once

// Monolithic reference solution of the quarter car and the coupling error
// metrics computed against it.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "ecco/compensated_sum.hpp"
#include "ecco/energy_accounting.hpp"
#include "ecco/error.hpp"
#include "ecco/master.hpp"
#include "ecco/quarter_car.hpp"

namespace ecco {

/// z_c, v_c, z_w, v_w and the energy dissipated in the damper so far.
using QuarterCarState = std::array<double, 5>;

namespace detail {

inline QuarterCarState quarter_car_rhs(double t, const QuarterCarState& x, const quarter_car::Params& p) {
  const double f_damp = quarter_car::damper_force(x[1] - x[3], p);
  const double f_c = p.k_c * (x[0] - x[2]) + f_damp;
  const double f_w = quarter_car::tyre_force(x[2], t, p);
  return {x[1], -f_c / p.m_c, x[3], (-f_w + f_c) / p.m_w, f_damp * (x[1] - x[3])};
}

inline QuarterCarState rk4_step(double t, const QuarterCarState& x, double h, const quarter_car::Params& p) {
  auto axpy = [](const QuarterCarState& a, double s, const QuarterCarState& b) {
    QuarterCarState r;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] + s * b[i];
    return r;
  };
  const auto k1 = quarter_car_rhs(t, x, p);
  const auto k2 = quarter_car_rhs(t + 0.5 * h, axpy(x, 0.5 * h, k1), p);
  const auto k3 = quarter_car_rhs(t + 0.5 * h, axpy(x, 0.5 * h, k2), p);
  const auto k4 = quarter_car_rhs(t + h, axpy(x, h, k3), p);
  QuarterCarState out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

/// One RK4 step of size h, subdivided by step doubling wherever one step and
/// two half steps disagree. Only steps near a sign change of the relative
/// velocity refine: the square-root damper has unbounded slope there.
inline QuarterCarState refined_step(double t, const QuarterCarState& x, double h, const quarter_car::Params& p,
                                    int depth = 0) {
  const auto full = rk4_step(t, x, h, p);
  const auto mid = rk4_step(t, x, 0.5 * h, p);
  const auto half = rk4_step(t + 0.5 * h, mid, 0.5 * h, p);
  constexpr int kMaxDepth = 16;
  bool accurate = true;
  for (std::size_t i = 0; i < 4; ++i) {
    accurate = accurate && std::abs(full[i] - half[i]) <= 1e-14 * (1.0 + std::abs(half[i]));
  }
  if (accurate || depth >= kMaxDepth) {
    return half;
  }
  const auto first = refined_step(t, x, 0.5 * h, p, depth + 1);
  return refined_step(t + 0.5 * h, first, 0.5 * h, p, depth + 1);
}

} // namespace detail

/// Exact-time power variables of the reference solution at one instant.
struct ReferencePowers {
  double P_port1 = 0.0;
  double P_port2 = 0.0;
  double P_12 = 0.0;
};

/// Reference trajectory sampled on a uniform grid, all samples stored.
class ReferenceTrajectory {
public:
  ReferenceTrajectory(quarter_car::Params params, double h, std::vector<QuarterCarState> samples)
      : params_(params), h_(h), samples_(std::move(samples)) {}

  [[nodiscard]] double step() const { return h_; }
  [[nodiscard]] double t_end() const { return h_ * static_cast<double>(samples_.size() - 1); }
  [[nodiscard]] const std::vector<QuarterCarState>& samples() const { return samples_; }
  [[nodiscard]] const quarter_car::Params& params() const { return params_; }

  [[nodiscard]] const QuarterCarState& nearest(double t) const {
    const auto i = static_cast<std::size_t>(std::clamp(std::llround(t / h_), 0LL,
                                                       static_cast<long long>(samples_.size() - 1)));
    return samples_[i];
  }

  /// State at arbitrary t: the stored sample at or below t advanced by one
  /// partial RK4 step, so the result keeps the integrator's accuracy.
  [[nodiscard]] QuarterCarState at(double t) const {
    if (t < 0.0 || t > t_end() * (1.0 + 1e-12) + 1e-15) {
      throw TimeRangeMismatch("reference trajectory does not cover t = " + std::to_string(t));
    }
    const double k = std::floor(t / h_);
    auto i = static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(samples_.size() - 1)));
    const double t_i = static_cast<double>(i) * h_;
    const double rest = t - t_i;
    if (rest <= 1e-9 * h_) {
      return samples_[i];
    }
    return detail::refined_step(t_i, samples_[i], rest, params_);
  }

  [[nodiscard]] ReferencePowers powers(double t, quarter_car::Reticulation r) const {
    return powers_of(at(t), r);
  }

  [[nodiscard]] ReferencePowers powers_of(const QuarterCarState& x, quarter_car::Reticulation r) const {
    const double f_c = quarter_car::spring_damper_force(x[0], x[2], x[1], x[3], params_);
    const auto bond = quarter_car::coupling_bond(r);
    // exact same-time signals on both sides of the bond
    const double y1 = r == quarter_car::Reticulation::A ? x[1] : f_c;
    const double y2 = r == quarter_car::Reticulation::A ? f_c : x[3];
    const auto p = bond_powers(bond, bond.c1 * y2, bond.c2 * y1, y1, y2);
    return {p.P_port1, p.P_port2, p.P_12};
  }

private:
  quarter_car::Params params_;
  double h_;
  std::vector<QuarterCarState> samples_;
};

/// RK4 on the monolithic model on a fixed output grid of step h_ref, with
/// local subdivision near damper velocity reversals, starting at rest at t = 0.
[[nodiscard]] inline ReferenceTrajectory reference_solve(const quarter_car::Params& params, double t_end,
                                                         double h_ref = 1e-5) {
  params.validate();
  if (!(h_ref > 0.0) || t_end < 0.0) {
    throw ConfigError("reference_solve: need h_ref > 0 and t_end >= 0");
  }
  const auto n = static_cast<std::size_t>(std::ceil(t_end / h_ref - 1e-9));
  std::vector<QuarterCarState> samples;
  samples.reserve(n + 1);
  QuarterCarState x{};
  samples.push_back(x);
  for (std::size_t i = 0; i < n; ++i) {
    x = detail::refined_step(static_cast<double>(i) * h_ref, x, h_ref, params);
    samples.push_back(x);
  }
  return {params, h_ref, std::move(samples)};
}

/// Closed-form solution of the linear preset for t >= 0:
/// x(t) = x_eq + exp(A t) (x0 - x_eq). Only valid for n_d = 0.5.
[[nodiscard]] inline std::array<double, 4> linear_exact_state(const quarter_car::Params& p, double t) {
  if (p.damping_exponent() != 1.0) {
    throw ConfigError("linear_exact_state: damping is not linear");
  }
  Eigen::Matrix4d A;
  // clang-format off
  A <<  0.0,            1.0,            0.0,                     0.0,
       -p.k_c / p.m_c, -p.d_c / p.m_c,  p.k_c / p.m_c,           p.d_c / p.m_c,
        0.0,            0.0,            0.0,                     1.0,
        p.k_c / p.m_w,  p.d_c / p.m_w, -(p.k_c + p.k_w) / p.m_w, -p.d_c / p.m_w;
  // clang-format on
  const Eigen::Vector4d x_eq(p.road_step, 0.0, p.road_step, 0.0);
  const Eigen::Vector4d x0 = Eigen::Vector4d::Zero();
  const Eigen::Matrix4d E = (A * t).exp();
  const Eigen::Vector4d x = x_eq + E * (x0 - x_eq);
  return {x[0], x[1], x[2], x[3]};
}

struct ErrorSummary {
  double mean_P12 = 0.0;
  double mean_abs_dP = 0.0;
  double total_residual = 0.0;
  double mean_dt = 0.0;
  std::size_t step_count = 0;
};

[[nodiscard]] constexpr double local_power_error(double P_cosim, double P_exact) { return P_cosim - P_exact; }

/// Averages over the run: mean_abs_dP = (1/T) sum |P_12 - P0_12| dt with the
/// reference evaluated at each communication point.
[[nodiscard]] inline ErrorSummary summarize(const RunRecord& run, const ReferenceTrajectory& ref,
                                           quarter_car::Reticulation r) {
  const auto totals = run_totals(run);
  ErrorSummary out;
  out.mean_P12 = totals.mean_P12;
  out.total_residual = totals.total_residual;
  out.mean_dt = totals.mean_dt;
  out.step_count = totals.steps;
  if (run.rows.empty()) {
    return out;
  }
  if (run.rows.back().t > ref.t_end() * (1.0 + 1e-12) + 1e-12) {
    throw TimeRangeMismatch("summarize: run extends beyond the reference trajectory");
  }
  CompensatedSum err;
  CompensatedSum span;
  for (const auto& row : run.rows) {
    if (row.bonds.empty()) continue;
    const double p0 = ref.powers(row.t, r).P_12;
    err.add(std::abs(local_power_error(row.bonds.front().P_12, p0)) * row.dt);
    span.add(row.dt);
  }
  out.mean_abs_dP = span.value() > 0.0 ? err.value() / span.value() : 0.0;
  return out;
}

/// Same averages with another run acting as the reference (rows matched by
/// index). Comparing a run with itself gives zero error.
[[nodiscard]] inline ErrorSummary summarize(const RunRecord& run, const RunRecord& reference) {
  if (run.rows.size() != reference.rows.size()) {
    throw TimeRangeMismatch("summarize: runs have different communication points");
  }
  const auto totals = run_totals(run);
  ErrorSummary out{totals.mean_P12, 0.0, totals.total_residual, totals.mean_dt, totals.steps};
  CompensatedSum err;
  CompensatedSum span;
  for (std::size_t i = 0; i < run.rows.size(); ++i) {
    const auto& a = run.rows[i];
    const auto& b = reference.rows[i];
    if (a.t != b.t) {
      throw TimeRangeMismatch("summarize: runs have different communication points");
    }
    if (a.bonds.empty()) continue;
    err.add(std::abs(local_power_error(a.bonds.front().P_12, b.bonds.front().P_12)) * a.dt);
    span.add(a.dt);
  }
  out.mean_abs_dP = span.value() > 0.0 ? err.value() / span.value() : 0.0;
  return out;
}

} // namespace ecco
