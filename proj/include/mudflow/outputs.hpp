#pragma once

#include "mudflow/config.hpp"
#include "mudflow/evolution.hpp"
#include "mudflow/grid.hpp"

#include <string>
#include <vector>

namespace mudflow {

/// Full-precision decimal rendering (17 significant digits): identical
/// trajectories serialize to byte-identical files.
std::string format_full(double v);

/// Long-form modal trajectory: columns t,k,re,im for k = 0..nx/2.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

/// One row per completed step with the solver diagnostics.
void write_diagnostics_csv(const std::string& path, const Trajectory& traj);

/// Snapshot with everything restart needs (state + adaptivity).
struct Snapshot {
    double t = 0.0;
    int step_index = 0;
    double dt_next = 0.0;
    int easy_steps = 0;
    PeriodicProfile f, F;
};
void write_snapshot_json(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot_json(const std::string& path);

/// Interface snapshots as polylines (a few evenly spaced sample times).
void write_interface_svg(const std::string& path, const Trajectory& traj, int curves = 9);
/// log10 |a_k(t)| per tracked mode.
void write_modes_svg(const std::string& path, const Trajectory& traj, const std::vector<int>& ks);

/// Field snapshot as CSV rows x,y,value.
void write_field_csv(const std::string& path, const Field2D& field);

/// Write the configured outputs of a finished run into
/// output.directory/<prefix>_*.{csv,json,svg}; returns the file paths.
std::vector<std::string> write_outputs(const Trajectory& traj, const RunConfig& config);

} // namespace mudflow
