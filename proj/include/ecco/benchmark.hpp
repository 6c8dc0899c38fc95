#pragma once

// Experiment configuration and the drivers shared by the CLI, the
// reproduction tables and the acceptance suite: single runs, constant-step
// sweeps and stability scans of the quarter-car co-simulation.

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "ecco/error.hpp"
#include "ecco/master.hpp"
#include "ecco/quarter_car.hpp"
#include "ecco/reference.hpp"
#include "ecco/step_control.hpp"

namespace ecco {

enum class ControllerType { Constant, Ecco, PredictorCorrector };

[[nodiscard]] inline std::string_view to_string(ControllerType c) {
  switch (c) {
  case ControllerType::Constant:
    return "constant";
  case ControllerType::Ecco:
    return "ecco";
  default:
    return "predictor_corrector";
  }
}

[[nodiscard]] inline ControllerType parse_controller(std::string_view s) {
  if (s == "constant") return ControllerType::Constant;
  if (s == "ecco") return ControllerType::Ecco;
  if (s == "predictor_corrector" || s == "pc") return ControllerType::PredictorCorrector;
  throw ConfigError("unknown controller '" + std::string(s) + "' (expected constant, ecco or predictor_corrector)");
}

struct ExperimentConfig {
  quarter_car::Preset preset = quarter_car::Preset::Linear;
  quarter_car::Reticulation reticulation = quarter_car::Reticulation::A;
  int micro_ratio_s1 = 10;
  int micro_ratio_s2 = 10;

  ControllerType controller = ControllerType::Constant;
  double r = 2.8e-6;
  double E0 = 750.0;
  double TOL = 0.67;
  double rho = 1e-4;
  StepBounds bounds;

  std::optional<double> t_end; ///< preset default when unset
  std::optional<double> dt0;   ///< 1 ms for constant, dt_min for adaptive when unset
  double h_ref = 1e-5;
  double scan_horizon = 100.0;
  bool parallel = false;

  std::string output_path;

  [[nodiscard]] double effective_t_end() const { return t_end.value_or(quarter_car::default_horizon(preset)); }

  [[nodiscard]] double effective_dt0() const {
    if (dt0) return *dt0;
    return controller == ControllerType::Constant ? 1e-3 : bounds.dt_min;
  }

  /// r for ECCO, TOL for the predictor/corrector, nothing for constant.
  [[nodiscard]] std::optional<double> tolerance() const {
    switch (controller) {
    case ControllerType::Ecco:
      return r;
    case ControllerType::PredictorCorrector:
      return TOL;
    default:
      return std::nullopt;
    }
  }

  [[nodiscard]] StepPolicy policy() const {
    switch (controller) {
    case ControllerType::Constant:
      return ConstantPolicy{effective_dt0()};
    case ControllerType::Ecco: {
      EccoConfig c;
      c.r = {r};
      c.E0 = {E0};
      c.bounds = bounds;
      return c;
    }
    default: {
      PredictorCorrectorConfig c;
      c.tol = TOL;
      c.rho = rho;
      c.bounds = bounds;
      return c;
    }
    }
  }

  void validate() const {
    if (micro_ratio_s1 < 1 || micro_ratio_s2 < 1) throw ConfigError("micro step ratios must be >= 1");
    if (effective_t_end() < 0.0) throw ConfigError("sim.t_end must be >= 0");
    if (!(effective_dt0() > 0.0)) throw ConfigError("sim.dt0 must be > 0");
    if (!(h_ref > 0.0)) throw ConfigError("reference.h_ref must be > 0");
    std::visit(
        [](const auto& p) {
          if constexpr (requires { p.validate(); }) p.validate();
        },
        policy());
  }
};

/// Divergence limit on any state magnitude, in m or m/s.
inline constexpr double kDivergenceLimit = 1e6;

struct ExperimentResult {
  RunRecord record;
  ErrorSummary summary;
};

/// Shares reference trajectories between runs of the same preset/horizon.
class ReferenceCache {
public:
  const ReferenceTrajectory& get(quarter_car::Preset preset, double t_end, double h_ref = 1e-5) {
    const Key key{preset, t_end, h_ref};
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      it = cache_
               .emplace(key, std::make_unique<ReferenceTrajectory>(
                                 reference_solve(quarter_car::preset_params(preset), t_end, h_ref)))
               .first;
    }
    return *it->second;
  }

private:
  using Key = std::tuple<quarter_car::Preset, double, double>;
  std::map<Key, std::unique_ptr<ReferenceTrajectory>> cache_;
};

/// Runs one configured co-simulation and the reference comparison.
[[nodiscard]] inline ExperimentResult run_experiment(const ExperimentConfig& config, const ReferenceTrajectory& ref) {
  config.validate();
  auto setup = quarter_car::make_setup(quarter_car::preset_params(config.preset), config.reticulation,
                                       config.micro_ratio_s1, config.micro_ratio_s2);
  const auto wiring = validate_graph(setup.graph, setup.slots);
  StepController controller(config.policy());
  RunOptions options;
  options.t_end = config.effective_t_end();
  options.dt0 = config.effective_dt0();
  options.probes = quarter_car::state_probes();
  options.divergence_limit = kDivergenceLimit;
  std::unique_ptr<ForkJoinPool> pool;
  if (config.parallel) {
    pool = std::make_unique<ForkJoinPool>(setup.slots.size());
    options.pool = pool.get();
  }
  ExperimentResult out;
  out.record = run_cosimulation(setup.slots, wiring, controller, options);
  if (out.record.ok()) {
    out.summary = summarize(out.record, ref, config.reticulation);
  } else {
    const auto totals = run_totals(out.record);
    out.summary = {totals.mean_P12, std::nan(""), totals.total_residual, totals.mean_dt, totals.steps};
  }
  return out;
}

[[nodiscard]] inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  const auto ref = reference_solve(quarter_car::preset_params(config.preset), config.effective_t_end(), config.h_ref);
  return run_experiment(config, ref);
}

struct SweepRow {
  double dt = 0.0;
  double mean_abs_dP = 0.0;
  double half_mean_abs_residual = 0.0; ///< (1/2T) sum |dE_res|
};

/// Constant-step runs over the given step sizes; both curves of the
/// error-versus-step-size comparison. Throws SimulatorFailure on divergence.
[[nodiscard]] inline std::vector<SweepRow> step_size_sweep(ExperimentConfig base, const std::vector<double>& dts,
                                                           const ReferenceTrajectory& ref) {
  base.controller = ControllerType::Constant;
  std::vector<SweepRow> rows;
  rows.reserve(dts.size());
  for (double dt : dts) {
    base.dt0 = dt;
    const auto result = run_experiment(base, ref);
    if (!result.record.ok()) {
      throw SimulatorFailure("sweep: run with dt = " + std::to_string(dt) + " failed: " + result.record.diagnostic);
    }
    CompensatedSum abs_residual;
    CompensatedSum span;
    for (const auto& row : result.record.rows) {
      span.add(row.dt);
      for (const auto& b : row.bonds) abs_residual.add(std::abs(b.dE_res));
    }
    const double T = span.value();
    rows.push_back({dt, result.summary.mean_abs_dP, T > 0.0 ? abs_residual.value() / (2.0 * T) : 0.0});
  }
  return rows;
}

/// n log-spaced values from lo to hi inclusive.
[[nodiscard]] inline std::vector<double> log_space(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi >= lo) || n == 0) {
    throw ConfigError("log_space: need 0 < lo <= hi and n >= 1");
  }
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

/// True when a constant-step run with this dt diverges before the horizon.
[[nodiscard]] inline bool diverges(const ExperimentConfig& base, double dt, double horizon) {
  auto setup = quarter_car::make_setup(quarter_car::preset_params(base.preset), base.reticulation,
                                       base.micro_ratio_s1, base.micro_ratio_s2);
  const auto wiring = validate_graph(setup.graph, setup.slots);
  StepController controller(ConstantPolicy{dt});
  RunOptions options;
  options.t_end = horizon;
  options.dt0 = dt;
  options.divergence_limit = kDivergenceLimit;
  return !run_cosimulation(setup.slots, wiring, controller, options).ok();
}

/// Smallest constant step (to `resolution`) whose run diverges, by bisection
/// over [lo, hi]. lo must be stable and hi unstable.
[[nodiscard]] inline double stability_scan(const ExperimentConfig& base, double lo, double hi,
                                           double resolution = 1e-4) {
  const double horizon = base.scan_horizon;
  if (!(lo > 0.0 && hi > lo && resolution > 0.0)) {
    throw ConfigError("stability_scan: need 0 < lo < hi and resolution > 0");
  }
  if (diverges(base, lo, horizon)) {
    throw NoOnsetInRange("stability_scan: lower bound " + std::to_string(lo) + " s already diverges");
  }
  if (!diverges(base, hi, horizon)) {
    throw NoOnsetInRange("stability_scan: upper bound " + std::to_string(hi) + " s does not diverge");
  }
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    (diverges(base, mid, horizon) ? hi : lo) = mid;
  }
  return hi;
}

} // namespace ecco
