#pragma once

// Macro step size policies: constant step, residual-energy (ECCO) control and
// the output predictor/corrector baseline. Both adaptive policies share the
// same PI update law and clamping; they differ only in the error indicator
// and in the gain denominator.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ecco/energy_accounting.hpp"
#include "ecco/error.hpp"

namespace ecco {

/// Indicators are floored here before exponentiation.
inline constexpr double kEpsFloor = 1e-12;

struct StepBounds {
  double alpha_s = 0.8;
  double dt_min = 1e-4;
  double dt_max = 1e-2;
  double theta_min = 0.2;
  double theta_max = 1.5;

  void validate() const {
    if (!(dt_min > 0.0 && dt_min <= dt_max)) {
      throw ConfigError("step bounds: require 0 < dt_min <= dt_max");
    }
    if (!(theta_min > 0.0 && theta_min < 1.0 && theta_max > 1.0)) {
      throw ConfigError("step bounds: require 0 < theta_min < 1 < theta_max");
    }
    if (!(alpha_s > 0.0 && alpha_s <= 1.0)) {
      throw ConfigError("step bounds: require 0 < alpha_s <= 1");
    }
  }
};

struct PiGains {
  double k_I = 0.0;
  double k_P = 0.0;
};

/// Gains for the residual-energy controller, m = input extrapolation order.
[[nodiscard]] constexpr PiGains ecco_gains(int m = 0) { return {0.3 / (m + 2), 0.4 / (m + 2)}; }

/// Gains for the predictor/corrector controller.
[[nodiscard]] constexpr PiGains predictor_corrector_gains(int m = 0) { return {0.3 / (m + 1), 0.4 / (m + 1)}; }

struct EccoConfig {
  /// Relative tolerance per bond; a single value applies to all bonds.
  std::vector<double> r{2.8e-6};
  /// Energy scale per bond in joules; a single value applies to all bonds.
  std::vector<double> E0{750.0};
  StepBounds bounds;
  int m = 0;

  [[nodiscard]] double r_for(std::size_t bond) const { return r.size() == 1 ? r.front() : r.at(bond); }
  [[nodiscard]] double E0_for(std::size_t bond) const { return E0.size() == 1 ? E0.front() : E0.at(bond); }

  void validate() const {
    bounds.validate();
    if (r.empty() || E0.empty()) {
      throw ConfigError("ecco: r and E0 must not be empty");
    }
    for (double v : r) {
      if (!(v > 0.0)) throw ConfigError("ecco: r must be positive");
    }
    for (double v : E0) {
      if (!(v > 0.0)) throw ConfigError("ecco: E0 must be positive");
    }
    if (m != 0) {
      throw ConfigError("ecco: only constant input extrapolation (m = 0) is supported");
    }
  }
};

struct PredictorCorrectorConfig {
  double tol = 0.67;
  double rho = 1e-4;
  /// Optional per-output overrides of tol and rho (stacked output order).
  std::vector<double> tol_per_output;
  std::vector<double> rho_per_output;
  StepBounds bounds;
  int order = 1; ///< polynomial extrapolation order r = m + 1

  [[nodiscard]] double tol_for(std::size_t i) const { return tol_per_output.empty() ? tol : tol_per_output.at(i); }
  [[nodiscard]] double rho_for(std::size_t i) const { return rho_per_output.empty() ? rho : rho_per_output.at(i); }

  void validate() const {
    bounds.validate();
    if (!(tol > 0.0)) throw ConfigError("predictor/corrector: TOL must be positive");
    if (!(rho >= 0.0)) throw ConfigError("predictor/corrector: rho must be non-negative");
    for (double v : tol_per_output) {
      if (!(v > 0.0)) throw ConfigError("predictor/corrector: TOL must be positive");
    }
    for (double v : rho_per_output) {
      if (!(v >= 0.0)) throw ConfigError("predictor/corrector: rho must be non-negative");
    }
    if (order != 1) {
      throw ConfigError("predictor/corrector: only extrapolation order r = 1 is supported");
    }
  }
};

/// sqrt( (1/N) sum_k ( dE_k / (r_k (E0_k + |E_k|)) )^2 ). Zero bonds give 0.
[[nodiscard]] inline double ecco_indicator(std::span<const double> dE_res, std::span<const double> E_step,
                                           const EccoConfig& config) {
  if (dE_res.size() != E_step.size()) {
    throw LengthMismatch("ecco_indicator: residual and transmitted energy lists differ in length");
  }
  const std::size_t n = dE_res.size();
  if (n == 0) {
    return 0.0;
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double term = dE_res[k] / (config.r_for(k) * (config.E0_for(k) + std::abs(E_step[k])));
    sum += term * term;
  }
  return std::sqrt(sum / static_cast<double>(n));
}

[[nodiscard]] inline double ecco_indicator(std::span<const BondLedgerEntry> entries, const EccoConfig& config) {
  std::vector<double> dE;
  std::vector<double> E;
  dE.reserve(entries.size());
  E.reserve(entries.size());
  for (const auto& e : entries) {
    dE.push_back(e.dE_res);
    E.push_back(e.E_step);
  }
  return ecco_indicator(dE, E, config);
}

/// PI update followed by ratio clamp, then absolute clamp.
[[nodiscard]] inline double pi_step_size(double eps_now, double eps_prev, double dt_now, PiGains gains,
                                         const StepBounds& bounds) {
  if (!std::isfinite(eps_now) || !std::isfinite(eps_prev)) {
    throw NonFiniteIndicator("pi_step_size: non-finite error indicator");
  }
  eps_now = std::max(eps_now, kEpsFloor);
  eps_prev = std::max(eps_prev, kEpsFloor);
  const double raw =
      bounds.alpha_s * std::pow(eps_now, -gains.k_I - gains.k_P) * std::pow(eps_prev, gains.k_P) * dt_now;
  const double ratio_clamped = std::clamp(raw, bounds.theta_min * dt_now, bounds.theta_max * dt_now);
  return std::clamp(ratio_clamped, bounds.dt_min, bounds.dt_max);
}

struct OutputSample {
  double t = 0.0;
  std::vector<double> y;
};

/// Lagrange extrapolation of degree r through the last r+1 samples.
[[nodiscard]] inline std::vector<double> predict_outputs(std::span<const OutputSample> history, double t_next,
                                                         int order) {
  const auto needed = static_cast<std::size_t>(order) + 1;
  if (order < 0 || history.size() < needed) {
    throw InsufficientHistory("predict_outputs: need " + std::to_string(needed) + " samples, have " +
                              std::to_string(history.size()));
  }
  const auto points = history.subspan(history.size() - needed);
  for (std::size_t j = 1; j < points.size(); ++j) {
    if (!(points[j].t > points[j - 1].t)) {
      throw InsufficientHistory("predict_outputs: sample times must be strictly increasing");
    }
  }
  const std::size_t width = points.back().y.size();
  std::vector<double> out(width, 0.0);
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (points[j].y.size() != width) {
      throw LengthMismatch("predict_outputs: samples differ in width");
    }
    double basis = 1.0;
    for (std::size_t l = 0; l < points.size(); ++l) {
      if (l != j) {
        basis *= (t_next - points[l].t) / (points[j].t - points[l].t);
      }
    }
    for (std::size_t a = 0; a < width; ++a) {
      out[a] += basis * points[j].y[a];
    }
  }
  return out;
}

/// max_a (1/TOL_a) |y_a - yp_a| / (1 + rho_a max(|y_a|, |yp_a|)).
[[nodiscard]] inline double pc_indicator(std::span<const double> y, std::span<const double> y_pred,
                                         const PredictorCorrectorConfig& config) {
  if (y.size() != y_pred.size()) {
    throw LengthMismatch("pc_indicator: output and prediction differ in length");
  }
  double eps = 0.0;
  for (std::size_t a = 0; a < y.size(); ++a) {
    const double scale = 1.0 + config.rho_for(a) * std::max(std::abs(y[a]), std::abs(y_pred[a]));
    eps = std::max(eps, std::abs(y[a] - y_pred[a]) / (config.tol_for(a) * scale));
  }
  return eps;
}

struct ConstantPolicy {
  double dt = 1e-3;
};

using StepPolicy = std::variant<ConstantPolicy, EccoConfig, PredictorCorrectorConfig>;

[[nodiscard]] inline std::string policy_name(const StepPolicy& p) {
  switch (p.index()) {
  case 0:
    return "constant";
  case 1:
    return "ecco";
  default:
    return "predictor_corrector";
  }
}

struct StepDecision {
  double dt_next = 0.0;
  double eps = 0.0;
};

/// What the master hands to the controller after each accepted macro step.
struct StepObservation {
  double t_next = 0.0;
  double dt = 0.0;
  std::span<const BondLedgerEntry> bonds;
  std::span<const double> outputs; ///< stacked outputs at t_next
};

/// Stateful driver for a StepPolicy.
class StepController {
public:
  explicit StepController(StepPolicy policy) : policy_(std::move(policy)) {
    std::visit(
        [](const auto& p) {
          if constexpr (requires { p.validate(); }) {
            p.validate();
          }
        },
        policy_);
    if (const auto* pc = std::get_if<PredictorCorrectorConfig>(&policy_)) {
      capacity_ = static_cast<std::size_t>(pc->order) + 1;
    }
  }

  [[nodiscard]] const StepPolicy& policy() const { return policy_; }
  [[nodiscard]] double eps_prev() const { return eps_prev_; }
  [[nodiscard]] const std::deque<OutputSample>& history() const { return history_; }

  /// Seeds the output history with y(t0).
  void initialize(double t0, std::span<const double> y0) {
    eps_prev_ = 1.0;
    history_.clear();
    push_history(t0, y0);
  }

  StepDecision next_step(const StepObservation& obs) {
    return std::visit([&](const auto& p) { return next_step_impl(p, obs); }, policy_);
  }

private:
  StepDecision next_step_impl(const ConstantPolicy& p, const StepObservation& /*obs*/) { return {p.dt, 0.0}; }

  StepDecision next_step_impl(const EccoConfig& cfg, const StepObservation& obs) {
    const double eps = ecco_indicator(obs.bonds, cfg);
    return advance(eps, obs.dt, ecco_gains(cfg.m), cfg.bounds);
  }

  StepDecision next_step_impl(const PredictorCorrectorConfig& cfg, const StepObservation& obs) {
    if (history_.size() < capacity_) {
      push_history(obs.t_next, obs.outputs);
      return {obs.dt, 0.0};
    }
    const std::vector<OutputSample> window(history_.begin(), history_.end());
    const auto predicted = predict_outputs(window, obs.t_next, cfg.order);
    const double eps = pc_indicator(obs.outputs, predicted, cfg);
    push_history(obs.t_next, obs.outputs);
    return advance(eps, obs.dt, predictor_corrector_gains(0), cfg.bounds);
  }

  StepDecision advance(double eps, double dt, PiGains gains, const StepBounds& bounds) {
    if (!std::isfinite(eps)) {
      throw NonFiniteIndicator("step controller: error indicator is not finite");
    }
    const double dt_next = pi_step_size(eps, eps_prev_, dt, gains, bounds);
    eps_prev_ = std::max(eps, kEpsFloor);
    return {dt_next, eps};
  }

  void push_history(double t, std::span<const double> y) {
    history_.push_back({t, std::vector<double>(y.begin(), y.end())});
    while (history_.size() > capacity_) {
      history_.pop_front();
    }
  }

  StepPolicy policy_;
  double eps_prev_ = 1.0;
  std::size_t capacity_ = 2;
  std::deque<OutputSample> history_;
};

} // namespace ecco
