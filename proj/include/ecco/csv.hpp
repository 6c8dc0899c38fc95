#pragma once

// CSV output of runs and summaries. Numbers use the shortest decimal form
// that parses back to the same double.

#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "ecco/benchmark.hpp"
#include "ecco/master.hpp"
#include "ecco/reference.hpp"

namespace ecco::csv {

inline constexpr std::string_view kTrajectoryHeader =
    "t,dt,eps,P12,P_port1,P_port2,dP_res,dE_res,E_res_accum,z_c,v_c,z_w,v_w";
inline constexpr std::string_view kSummaryHeader =
    "preset,reticulation,controller,tolerance,mean_dt,steps,mean_P12,mean_abs_dP,total_residual";
inline constexpr std::string_view kSweepHeader = "dt,mean_abs_dP,half_mean_abs_residual";

[[nodiscard]] inline std::string format_number(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return ec == std::errc{} ? std::string(buf.data(), ptr) : std::string("nan");
}

[[nodiscard]] inline std::string format_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

/// One row per macro step; bond columns refer to the first bond and are
/// empty when the run has no bonds, probe columns are empty when absent.
inline void write_trajectory(std::ostream& os, const RunRecord& run) {
  os << kTrajectoryHeader << '\n';
  static const std::array<std::string_view, 4> probe_columns{"z_c", "v_c", "z_w", "v_w"};
  for (const auto& row : run.rows) {
    os << format_number(row.t) << ',' << format_number(row.dt) << ',' << format_number(row.eps);
    if (row.bonds.empty()) {
      os << ",,,,,,";
    } else {
      const auto& b = row.bonds.front();
      for (double v : {b.P_12, b.P_port1, b.P_port2, b.dP_res, b.dE_res, b.E_res_accum}) {
        os << ',' << format_number(v);
      }
    }
    for (const auto& col : probe_columns) {
      std::optional<double> v;
      for (std::size_t i = 0; i < run.probe_names.size(); ++i) {
        if (run.probe_names[i] == col) {
          v = row.probes.at(i);
          break;
        }
      }
      os << ',' << format_number(v);
    }
    os << '\n';
  }
}

inline void write_summary_row(std::ostream& os, const ExperimentConfig& config, const ErrorSummary& s) {
  os << quarter_car::to_string(config.preset) << ',' << quarter_car::to_string(config.reticulation) << ','
     << to_string(config.controller) << ',' << format_number(config.tolerance()) << ',' << format_number(s.mean_dt)
     << ',' << s.step_count << ',' << format_number(s.mean_P12) << ',' << format_number(s.mean_abs_dP) << ','
     << format_number(s.total_residual) << '\n';
}

inline void write_summary(std::ostream& os, const ExperimentConfig& config, const ErrorSummary& s) {
  os << kSummaryHeader << '\n';
  write_summary_row(os, config, s);
}

inline void write_sweep(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepHeader << '\n';
  for (const auto& r : rows) {
    os << format_number(r.dt) << ',' << format_number(r.mean_abs_dP) << ',' << format_number(r.half_mean_abs_residual)
       << '\n';
  }
}

} // namespace ecco::csv
