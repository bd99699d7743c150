#pragma once

#include "mudflow/config.hpp"
#include "mudflow/evolution.hpp"

namespace mudflow {

/// Run a simulation from t = 0 with the configured initial data, or
/// continue from `restart`. Deterministic given the configuration; a guard
/// breach terminates the trajectory ("guard_breach") instead of throwing.
/// Adaptive stepping: dt halves when the velocity solve needs more than 15
/// Newton iterations (and on solver failure, retrying the step), doubles
/// after 5 consecutive easy steps, clamped to [dt_min, dt_max].
struct RestartPoint {
    double t = 0.0;
    int step_index = 0;
    double dt_next = 0.0;
    int easy_steps = 0;
    PeriodicProfile f, F;
};

Trajectory simulate(const RunConfig& config);
Trajectory simulate(const RunConfig& config, const RestartPoint& restart);

} // namespace mudflow
