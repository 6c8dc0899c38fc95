#pragma once

// Published benchmark numbers embedded as data, with a per-cell relative
// tolerance, and the runner that compares fresh runs against them.

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ecco/benchmark.hpp"
#include "ecco/error.hpp"

namespace ecco {

enum class Metric { MeanDtMs, MeanP12, MeanAbsDP, TotalResidual };

[[nodiscard]] inline std::string_view to_string(Metric m) {
  switch (m) {
  case Metric::MeanDtMs:
    return "mean_dt[ms]";
  case Metric::MeanP12:
    return "mean_P12[W]";
  case Metric::MeanAbsDP:
    return "mean_abs_dP[W]";
  default:
    return "total_residual[J]";
  }
}

[[nodiscard]] inline double metric_value(const ErrorSummary& s, Metric m) {
  switch (m) {
  case Metric::MeanDtMs:
    return s.mean_dt * 1e3;
  case Metric::MeanP12:
    return s.mean_P12;
  case Metric::MeanAbsDP:
    return s.mean_abs_dP;
  default:
    return s.total_residual;
  }
}

struct ExpectedCell {
  Metric metric;
  double expected;
  double rel_tol;
};

struct ExpectedRow {
  std::string label;
  ExperimentConfig config;
  std::vector<ExpectedCell> cells;
};

/// A claimed relative reduction of one metric between two rows of a table.
struct ReductionClaim {
  std::size_t from_row;
  std::size_t to_row;
  Metric metric;
  double min_reduction;
};

struct ExpectedTable {
  std::string id;
  std::string title;
  std::vector<ExpectedRow> rows;
  std::optional<ReductionClaim> claim;
};

namespace detail {

inline ExperimentConfig make_config(quarter_car::Preset preset, quarter_car::Reticulation ret, ControllerType c,
                                    double tolerance = 0.0, int micro_s2 = 10) {
  ExperimentConfig cfg;
  cfg.preset = preset;
  cfg.reticulation = ret;
  cfg.controller = c;
  cfg.micro_ratio_s2 = micro_s2;
  if (c == ControllerType::Ecco) cfg.r = tolerance;
  if (c == ControllerType::PredictorCorrector) cfg.TOL = tolerance;
  if (c == ControllerType::Constant) cfg.dt0 = 1e-3;
  return cfg;
}

} // namespace detail

[[nodiscard]] inline const std::vector<ExpectedTable>& expected_tables() {
  using quarter_car::Preset;
  using quarter_car::Reticulation;
  using detail::make_config;
  constexpr auto Const = ControllerType::Constant;
  constexpr auto Ecco = ControllerType::Ecco;
  constexpr auto PC = ControllerType::PredictorCorrector;
  using M = Metric;
  static const std::vector<ExpectedTable> tables = {
      {"T3",
       "linear, reticulation A",
       {{"constant 1 ms",
         make_config(Preset::Linear, Reticulation::A, Const),
         {{M::TotalResidual, 6.4, 0.15}, {M::MeanAbsDP, 1.3, 0.30}, {M::MeanP12, 0.4, 0.30}}},
        {"ecco r=2.8e-6",
         make_config(Preset::Linear, Reticulation::A, Ecco, 2.8e-6),
         {{M::MeanDtMs, 1.0, 0.20}, {M::TotalResidual, 1.6, 0.25}, {M::MeanAbsDP, 0.4, 0.30}}},
        {"ecco r=3.1e-5",
         make_config(Preset::Linear, Reticulation::A, Ecco, 3.1e-5),
         {{M::MeanDtMs, 2.9, 0.20}, {M::TotalResidual, 5.0, 0.25}}}},
       std::nullopt},
      {"T7",
       "nonlinear, reticulation A",
       {{"constant 1 ms",
         make_config(Preset::Nonlinear, Reticulation::A, Const),
         {{M::MeanAbsDP, 4.0, 0.30}, {M::TotalResidual, 5.0, 0.30}}},
        {"ecco r=7.5e-6",
         make_config(Preset::Nonlinear, Reticulation::A, Ecco, 7.5e-6),
         {{M::MeanAbsDP, 1.1, 0.30}, {M::TotalResidual, 1.6, 0.30}}},
        {"ecco r=1.0e-4", make_config(Preset::Nonlinear, Reticulation::A, Ecco, 1e-4), {{M::MeanDtMs, 3.1, 0.30}}}},
       std::nullopt},
      {"T8",
       "linear, reticulation B",
       {{"constant 1 ms",
         make_config(Preset::Linear, Reticulation::B, Const),
         {{M::MeanP12, -192.0, 0.20}, {M::MeanAbsDP, 12.0, 0.20}, {M::TotalResidual, 23.0, 0.20}}},
        {"ecco r=9.1e-7",
         make_config(Preset::Linear, Reticulation::B, Ecco, 9.1e-7),
         {{M::MeanP12, -187.9, 0.20}, {M::MeanAbsDP, 1.3, 0.20}, {M::TotalResidual, 1.6, 0.20}}}},
       std::nullopt},
      {"T9",
       "nonlinear, reticulation B",
       {{"constant 1 ms",
         make_config(Preset::Nonlinear, Reticulation::B, Const),
         {{M::MeanP12, -390.0, 0.30}, {M::MeanAbsDP, 30.0, 0.30}, {M::TotalResidual, 50.0, 0.30}}},
        {"ecco r=2.4e-5",
         make_config(Preset::Nonlinear, Reticulation::B, Ecco, 2.4e-5),
         {{M::MeanP12, -377.0, 0.30}, {M::MeanAbsDP, 5.0, 0.30}, {M::TotalResidual, 5.0, 0.30}}}},
       std::nullopt},
      {"T10",
       "linear, reticulation B, one wheel substep",
       {{"constant 1 ms",
         make_config(Preset::Linear, Reticulation::B, Const, 0.0, 1),
         {{M::MeanP12, -220.0, 0.30}, {M::MeanAbsDP, 40.0, 0.30}, {M::TotalResidual, 30.0, 0.30}}},
        {"ecco r=1.0e-6",
         make_config(Preset::Linear, Reticulation::B, Ecco, 1e-6, 1),
         {{M::MeanP12, -190.0, 0.30}, {M::MeanAbsDP, 4.0, 0.30}, {M::TotalResidual, 2.0, 0.30}}}},
       ReductionClaim{0, 1, M::TotalResidual, 0.85}},
      {"PC-linear",
       "predictor/corrector, linear, reticulation A",
       {{"pred./corr. TOL=0.67",
         make_config(Preset::Linear, Reticulation::A, PC, 0.67),
         {{M::MeanAbsDP, 0.7, 0.35}, {M::TotalResidual, 2.9, 0.35}}}},
       std::nullopt},
      {"PC-nonlinear",
       "predictor/corrector, nonlinear, reticulation A",
       {{"pred./corr. TOL=2.1",
         make_config(Preset::Nonlinear, Reticulation::A, PC, 2.1),
         {{M::MeanAbsDP, 1.9, 0.35}, {M::TotalResidual, 3.1, 0.35}}}},
       std::nullopt},
      {"PC-altA",
       "predictor/corrector, linear, reticulation B",
       {{"pred./corr. TOL=0.6",
         make_config(Preset::Linear, Reticulation::B, PC, 0.6),
         {{M::MeanAbsDP, 1.3, 0.35}, {M::TotalResidual, 1.7, 0.35}}}},
       std::nullopt},
      {"PC-altB",
       "predictor/corrector, nonlinear, reticulation B",
       {{"pred./corr. TOL=6.5",
         make_config(Preset::Nonlinear, Reticulation::B, PC, 6.5),
         {{M::MeanAbsDP, 18.0, 0.35}, {M::TotalResidual, 21.0, 0.35}}}},
       std::nullopt},
  };
  return tables;
}

[[nodiscard]] inline std::vector<std::string> expected_table_ids() {
  std::vector<std::string> ids;
  for (const auto& t : expected_tables()) ids.push_back(t.id);
  return ids;
}

[[nodiscard]] inline const ExpectedTable& find_expected_table(std::string_view id) {
  for (const auto& t : expected_tables()) {
    if (t.id == id) return t;
  }
  std::string msg = "unknown table id '" + std::string(id) + "'; valid ids:";
  for (const auto& t : expected_tables()) msg += " " + t.id;
  throw ConfigError(msg);
}

/// The embedded row whose configuration matches a run, if any. Only the
/// fields that distinguish rows are compared, plus the default horizon.
[[nodiscard]] inline const ExpectedRow* find_expected_row(const ExperimentConfig& c) {
  for (const auto& t : expected_tables()) {
    for (const auto& row : t.rows) {
      const auto& e = row.config;
      if (e.preset == c.preset && e.reticulation == c.reticulation && e.controller == c.controller &&
          e.micro_ratio_s1 == c.micro_ratio_s1 && e.micro_ratio_s2 == c.micro_ratio_s2 &&
          e.tolerance() == c.tolerance() && e.effective_t_end() == c.effective_t_end() &&
          (c.controller != ControllerType::Constant || e.effective_dt0() == c.effective_dt0())) {
        return &row;
      }
    }
  }
  return nullptr;
}

struct CellResult {
  ExpectedCell cell;
  double measured;
  bool pass;
};

struct RowResult {
  std::string label;
  ErrorSummary summary;
  bool run_ok = true;
  std::vector<CellResult> cells;
  [[nodiscard]] bool pass() const {
    if (!run_ok) return false;
    for (const auto& c : cells) {
      if (!c.pass) return false;
    }
    return true;
  }
};

struct ClaimResult {
  ReductionClaim claim;
  double reduction;
  bool pass;
};

struct TableResult {
  std::string id;
  std::vector<RowResult> rows;
  std::optional<ClaimResult> claim;
  [[nodiscard]] bool pass() const {
    for (const auto& r : rows) {
      if (!r.pass()) return false;
    }
    return !claim || claim->pass;
  }
};

[[nodiscard]] inline bool within(double measured, double expected, double rel_tol) {
  return std::isfinite(measured) && std::abs(measured - expected) <= rel_tol * std::abs(expected);
}

[[nodiscard]] inline RowResult compare_row(const ExpectedRow& row, const ExperimentResult& result) {
  RowResult out{row.label, result.summary, result.record.ok(), {}};
  for (const auto& cell : row.cells) {
    const double v = metric_value(result.summary, cell.metric);
    out.cells.push_back({cell, v, within(v, cell.expected, cell.rel_tol)});
  }
  return out;
}

[[nodiscard]] inline TableResult reproduce_table(const ExpectedTable& table, ReferenceCache& cache) {
  TableResult out{table.id, {}, std::nullopt};
  for (const auto& row : table.rows) {
    const auto& ref = cache.get(row.config.preset, row.config.effective_t_end(), row.config.h_ref);
    out.rows.push_back(compare_row(row, run_experiment(row.config, ref)));
  }
  if (table.claim) {
    const auto& c = *table.claim;
    const double from = metric_value(out.rows.at(c.from_row).summary, c.metric);
    const double to = metric_value(out.rows.at(c.to_row).summary, c.metric);
    const double reduction = 1.0 - to / from;
    out.claim = ClaimResult{c, reduction, std::isfinite(reduction) && reduction >= c.min_reduction};
  }
  return out;
}

inline void print_row(std::ostream& os, const RowResult& r) {
  os << "  " << r.label << (r.run_ok ? "" : "  (run failed)") << '\n';
  for (const auto& c : r.cells) {
    os << "    " << to_string(c.cell.metric) << "  measured " << c.measured << "  expected " << c.cell.expected
       << " +-" << c.cell.rel_tol * 100.0 << "%  " << (c.pass ? "PASS" : "FAIL") << '\n';
  }
}

inline void print_table_result(std::ostream& os, const ExpectedTable& table, const TableResult& r) {
  os << table.id << ": " << table.title << '\n';
  for (const auto& row : r.rows) print_row(os, row);
  if (r.claim) {
    os << "  reduction of " << to_string(r.claim->claim.metric) << ": " << r.claim->reduction * 100.0
       << "%  required >= " << r.claim->claim.min_reduction * 100.0 << "%  " << (r.claim->pass ? "PASS" : "FAIL")
       << '\n';
  }
  os << table.id << ": " << (r.pass() ? "PASS" : "FAIL") << '\n';
}

} // namespace ecco
