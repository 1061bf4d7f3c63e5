#pragma once

#include <filesystem>
#include <string>

#include "perzyna/diagnostics.hpp"
#include "perzyna/driver.hpp"
#include "perzyna/trajectory.hpp"

namespace perzyna::csv {

/// 17 significant digits, "nan" and "inf" spelled without sign noise.
std::string number(double v);

void write_monitors(const std::filesystem::path& path, const Trajectory& traj);
void write_fields(const std::filesystem::path& path, const Mesh& mesh, const StepState& state);
void write_estimates(const std::filesystem::path& path, const Trajectory& traj);
void write_diagnostics(const std::filesystem::path& path, const DiagnosticsReport& report);

/// monitors.csv, estimates.csv and, when requested, fields_<step>.csv.
void write_run(const std::filesystem::path& dir, const Mesh& mesh, const Trajectory& traj, bool dump_fields);

/// sweep_report.csv (one row per eps) and sweep_h1.csv (one row per step).
void write_sweep(const std::filesystem::path& dir, const SweepReport& report);

}  // namespace perzyna::csv
