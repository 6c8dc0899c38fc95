#pragma once

// Jacobi co-simulation master. All slots are stepped from the same
// communication point with inputs held constant; coupling data is exchanged
// only at communication points and no macro step is ever repeated.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ecco/compensated_sum.hpp"
#include "ecco/core_model.hpp"
#include "ecco/energy_accounting.hpp"
#include "ecco/fork_join.hpp"
#include "ecco/step_control.hpp"

namespace ecco {

struct MacroSchedule {
  double t_now = 0.0;
  std::size_t step_index = 0;
  double dt_next = 0.0;
  double t_end = 0.0;
};

struct RunRow {
  double t = 0.0;  ///< communication point reached by this step
  double dt = 0.0;
  double eps = 0.0;
  std::vector<BondLedgerEntry> bonds;
  std::vector<std::optional<double>> probes;
  std::vector<double> inputs;  ///< stacked u held over the step
  std::vector<double> outputs; ///< stacked y at t
};

enum class RunStatus { Completed, SimulatorFailure, NonFiniteIndicator };

struct RunRecord {
  std::vector<std::string> probe_names;
  std::vector<RunRow> rows;
  double t_start = 0.0;
  double t_end = 0.0;
  RunStatus status = RunStatus::Completed;
  std::string diagnostic;

  [[nodiscard]] bool ok() const { return status == RunStatus::Completed; }
  [[nodiscard]] std::size_t step_count() const { return rows.size(); }
};

struct RunOptions {
  double t_start = 0.0;
  double t_end = 1.0;
  double dt0 = 1e-3;
  std::vector<std::string> probes;
  /// Any |state| above this aborts the run as diverged.
  double divergence_limit = std::numeric_limits<double>::infinity();
  /// Steps slots on this pool when set; serial otherwise.
  ForkJoinPool* pool = nullptr;
};

/// Looks up the requested probes across all slots; first match wins.
[[nodiscard]] inline std::vector<std::optional<double>> probe_states(const SlotList& slots,
                                                                    const std::vector<std::string>& names) {
  std::vector<std::optional<double>> out(names.size());
  for (const auto& slot : slots) {
    for (const auto& p : slot->probes()) {
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (!out[i] && names[i] == p.name) {
          out[i] = p.value;
        }
      }
    }
  }
  return out;
}

namespace detail {

inline void gather_outputs(const SlotList& slots, const Wiring& wiring, std::vector<double>& y) {
  for (std::size_t s = 0; s < slots.size(); ++s) {
    const std::size_t off = wiring.output_offset(s);
    slots[s]->get_outputs(std::span<double>(y).subspan(off, slots[s]->output_count()));
  }
}

inline std::optional<std::string> check_finite(const SlotList& slots, std::span<const double> y, double limit) {
  for (std::size_t s = 0; s < slots.size(); ++s) {
    for (double v : slots[s]->state()) {
      if (!std::isfinite(v)) {
        return "slot " + std::to_string(s) + " produced a non-finite state";
      }
      if (std::abs(v) > limit) {
        return "slot " + std::to_string(s) + " diverged (|state| above limit)";
      }
    }
  }
  for (double v : y) {
    if (!std::isfinite(v)) {
      return "non-finite simulator output";
    }
  }
  return std::nullopt;
}

} // namespace detail

/// Runs the coupled simulation from t_start to t_end.
///
/// Per step: inputs u(t_i) = L y(t_i) are set on every slot, all slots step
/// over (t_i, t_i + dt_i], outputs y(t_{i+1}) are collected, bond ledgers
/// are booked with u(t_i) and y(t_{i+1}), and the controller proposes the
/// next step. A failure ends the run and returns the partial record.
inline RunRecord run_cosimulation(SlotList& slots, const Wiring& wiring, StepController& controller,
                                  const RunOptions& options) {
  if (wiring.slot_count() != slots.size()) {
    throw LengthMismatch("run_cosimulation: wiring was validated for a different slot list");
  }
  RunRecord record;
  record.probe_names = options.probes;
  record.t_start = options.t_start;
  record.t_end = options.t_end;

  const auto& bonds = wiring.bonds();
  std::vector<BondLedger> ledgers(bonds.size());
  std::vector<double> y(wiring.total_outputs(), 0.0);
  std::vector<double> u(wiring.total_inputs(), 0.0);
  std::vector<BondLedgerEntry> step_entries(bonds.size());

  detail::gather_outputs(slots, wiring, y);
  apply_connections(wiring, y, u);
  controller.initialize(options.t_start, y);

  CompensatedSum clock(options.t_start);
  MacroSchedule schedule{options.t_start, 0, options.dt0, options.t_end};
  const double end_slack = 1e-12 * std::max(std::abs(options.t_end), 1.0);

  while (schedule.t_now < options.t_end - end_slack) {
    double dt = schedule.dt_next;
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      record.status = RunStatus::NonFiniteIndicator;
      record.diagnostic = "step size is not a positive finite number";
      return record;
    }
    if (schedule.t_now + dt >= options.t_end - end_slack) {
      dt = options.t_end - schedule.t_now;
    }
    const double t_i = schedule.t_now;

    for (std::size_t s = 0; s < slots.size(); ++s) {
      const std::size_t off = wiring.input_offset(s);
      slots[s]->set_inputs(std::span<const double>(u).subspan(off, slots[s]->input_count()));
    }
    if (options.pool != nullptr) {
      options.pool->run(slots.size(), [&](std::size_t s) { slots[s]->do_step(t_i, dt); });
    } else {
      for (auto& slot : slots) slot->do_step(t_i, dt);
    }
    detail::gather_outputs(slots, wiring, y);

    clock.add(dt);
    schedule.t_now = clock.value();
    ++schedule.step_index;

    if (auto failure = detail::check_finite(slots, y, options.divergence_limit)) {
      record.status = RunStatus::SimulatorFailure;
      record.diagnostic = *failure + " at t = " + std::to_string(schedule.t_now);
      return record;
    }

    for (std::size_t k = 0; k < bonds.size(); ++k) {
      const auto& b = bonds[k];
      step_entries[k] = ledgers[k].record(b, schedule.t_now, dt, u[wiring.global_input(b.port1)],
                                          u[wiring.global_input(b.port2)], y[wiring.global_output(b.port1)],
                                          y[wiring.global_output(b.port2)]);
    }

    StepDecision decision;
    try {
      decision = controller.next_step({schedule.t_now, dt, step_entries, y});
    } catch (const NonFiniteIndicator& e) {
      record.status = RunStatus::NonFiniteIndicator;
      record.diagnostic = e.what();
      return record;
    }

    record.rows.push_back({schedule.t_now, dt, decision.eps, step_entries, probe_states(slots, options.probes), u, y});
    apply_connections(wiring, y, u);
    schedule.dt_next = decision.dt_next;
  }
  return record;
}

/// Summary quantities that do not need a reference solution.
struct RunTotals {
  double mean_dt = 0.0;
  std::size_t steps = 0;
  double mean_P12 = 0.0;       ///< (1/T) sum P_12 dt over bond 0
  double total_residual = 0.0; ///< sum of dE_res over all bonds and steps
};

[[nodiscard]] inline RunTotals run_totals(const RunRecord& run) {
  RunTotals out;
  out.steps = run.rows.size();
  if (run.rows.empty()) {
    return out;
  }
  CompensatedSum span;
  CompensatedSum p12;
  CompensatedSum residual;
  for (const auto& row : run.rows) {
    span.add(row.dt);
    if (!row.bonds.empty()) {
      p12.add(row.bonds.front().P_12 * row.dt);
    }
    for (const auto& b : row.bonds) residual.add(b.dE_res);
  }
  const double T = span.value();
  out.mean_dt = T / static_cast<double>(out.steps);
  out.mean_P12 = p12.value() / T;
  out.total_residual = residual.value();
  return out;
}

} // namespace ecco
