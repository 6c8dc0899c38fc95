#pragma once

// Port powers, transmitted power, residual power and energy per bond.
//
// Sign convention of the residual: dP_res = -(P_port1 + P_port2). A positive
// residual means the coupling wrongfully adds energy to the coupled system.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ecco/compensated_sum.hpp"
#include "ecco/core_model.hpp"
#include "ecco/error.hpp"

namespace ecco {

[[nodiscard]] constexpr double port_power(double u, double y) { return u * y; }

[[nodiscard]] constexpr double transmitted_power(int sigma, double y1, double y2) { return sigma * (y1 * y2); }

[[nodiscard]] inline double transmitted_power(const PowerBond& bond, double y1, double y2) {
  return transmitted_power(bond.sigma(), y1, y2);
}

namespace detail {

// Dot product accumulated with fma error terms, as accurate as if computed
// in twice the working precision. The two port powers nearly cancel, so a
// plain dot product would lose most significant digits of the residual.
class CompensatedDot {
public:
  void add(double a, double b) {
    const double p = a * b;
    const double p_err = std::fma(a, b, -p);
    const double s = sum_ + p;
    const double bv = s - sum_;
    const double s_err = (sum_ - (s - bv)) + (p - bv);
    sum_ = s;
    err_ += p_err + s_err;
  }
  [[nodiscard]] double value() const { return sum_ + err_; }

private:
  double sum_ = 0.0;
  double err_ = 0.0;
};

} // namespace detail

/// -(u1*y1 + u2*y2) with inputs held from t_i and outputs at t_{i+1}.
[[nodiscard]] inline double residual_power(double u1, double u2, double y1, double y2) {
  detail::CompensatedDot dot;
  dot.add(u1, y1);
  dot.add(u2, y2);
  return -dot.value();
}

/// Rectangle rule over one macro step.
[[nodiscard]] constexpr double residual_energy_step(double residual_power, double dt) { return residual_power * dt; }

/// -u.y over bond-stacked vectors (u_a1, u_a2, u_b1, u_b2, ...).
[[nodiscard]] inline double total_residual_power(std::span<const double> u, std::span<const double> y) {
  if (u.size() != y.size()) {
    throw LengthMismatch("total_residual_power: input and output vectors differ in length");
  }
  detail::CompensatedDot dot;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot.add(u[i], y[i]);
  }
  return -dot.value();
}

/// Mean of the two port-local power errors, exact by energy balance.
[[nodiscard]] constexpr double average_local_power_error(double residual_power) { return -0.5 * residual_power; }

struct BondPowers {
  double P_port1 = 0.0;
  double P_port2 = 0.0;
  double P_12 = 0.0;
  double dP_res = 0.0;
};

/// Port powers, transmitted power and residual of one bond, oriented by the
/// bond's power sense.
[[nodiscard]] inline BondPowers bond_powers(const PowerBond& bond, double u1, double u2, double y1, double y2) {
  const int s = bond.sense_sign();
  BondPowers p;
  p.P_port1 = s * port_power(u1, y1);
  p.P_port2 = s * port_power(u2, y2);
  p.P_12 = s * transmitted_power(bond.sigma(), y1, y2);
  p.dP_res = s * residual_power(u1, u2, y1, y2);
  return p;
}

struct BondLedgerEntry {
  double t_next = 0.0;
  double dt = 0.0;
  double P_port1 = 0.0;
  double P_port2 = 0.0;
  double P_12 = 0.0;
  double dP_res = 0.0;
  double dE_res = 0.0;
  double E_step = 0.0; ///< energy transmitted S1 -> S2 this step, P_12 * dt
  double E_res_accum = 0.0;
};

/// Append-only ledger of one bond.
class BondLedger {
public:
  /// Books one macro step. u1/u2 are the inputs held over the step, y1/y2
  /// the outputs at its end.
  const BondLedgerEntry& record(const PowerBond& bond, double t_next, double dt, double u1, double u2, double y1,
                                double y2) {
    BondLedgerEntry e;
    e.t_next = t_next;
    e.dt = dt;
    const auto p = bond_powers(bond, u1, u2, y1, y2);
    e.P_port1 = p.P_port1;
    e.P_port2 = p.P_port2;
    e.P_12 = p.P_12;
    e.dP_res = p.dP_res;
    e.dE_res = residual_energy_step(e.dP_res, dt);
    e.E_step = e.P_12 * dt;
    accum_ += e.dE_res;
    e.E_res_accum = accum_.value();
    entries_.push_back(e);
    return entries_.back();
  }

  [[nodiscard]] const std::vector<BondLedgerEntry>& entries() const { return entries_; }
  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] bool empty() const { return entries_.empty(); }
  [[nodiscard]] double accumulated_residual() const { return accum_.value(); }

private:
  std::vector<BondLedgerEntry> entries_;
  CompensatedSum accum_;
};

} // namespace ecco
