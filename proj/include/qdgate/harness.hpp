#pragma once

// Run orchestration and file output for the command-line tool.
//
//   trajectory.csv      time_ns, P_up_q0 .. P_up_q{n-1}, trace_error
//   sweep_<B>T.csv      gradient_T, initial_state, qubit_role, P_up, verdict
//   ranges.csv/.txt     operating range per fixed-field row
//   manifest.conf       resolved configuration (parseable) plus tool version

#include <iosfwd>
#include <string>
#include <vector>

#include "qdgate/config.hpp"
#include "qdgate/gate_analysis.hpp"
#include "qdgate/lindblad.hpp"

namespace qdgate {

std::string tool_version();

/// printf("%.10g").
std::string format_value(double v);
/// Field with unit, 3 significant figures: "3.01T", "16.6mT".
std::string format_field(double tesla);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_sweep_csv(std::ostream& os, const SweepResult& sweep);
void write_ranges_csv(std::ostream& os, const DeviceConfig& device,
                      const std::vector<SweepResult>& rows);
/// Plain-text table with one row per fixed field.
std::string format_range_table(const DeviceConfig& device, const std::vector<SweepResult>& rows);
/// Range of one field column, e.g. "1.1T-3.01T", ">16.6mT", "<2.1T" or "empty".
std::string format_field_range(const SweepResult& r, double base, double per_gradient);

std::string sweep_file_name(double fixed_field);
std::string render_manifest(const RunSpec& spec, const std::vector<std::string>& outputs);

/// Executes the spec and writes output files under spec.output_path.
/// Returns the process exit status.
int run(const RunSpec& spec, std::ostream& out, std::ostream& err);

}  // namespace qdgate
