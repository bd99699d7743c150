#include "mudflow/simulate.hpp"

#include "mudflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace mudflow {

namespace {

// Seeded per step, so restarted runs probe identically.
std::vector<PeriodicProfile> probe_offsets(const ProbeConfig& probe, int nx, int step_index) {
    std::mt19937_64 rng(probe.seed ^ (0x9e3779b97f4a7c15ull * static_cast<unsigned long long>(step_index + 1)));
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::uniform_int_distribution<int> mode(1, 3);
    std::vector<PeriodicProfile> offsets;
    for (int i = 0; i < probe.count; ++i) {
        const int k = mode(rng);
        const double ph = phase(rng);
        offsets.push_back(PeriodicProfile::sample(
            nx, [&](double x) { return probe.amplitude * std::cos(k * x + ph); }));
    }
    return offsets;
}

Trajectory run(const RunConfig& config, SimState state, double dt, int easy_steps, int step_index) {
    InterfaceOperator op(config.grid, config.params, config.tolerances, config.policy);

    StepOptions options;
    options.scheme = config.time.scheme;
    options.guard_sup_f = config.guard_sup_f;
    options.guard_sup_F = config.guard_sup_F;

    Trajectory traj;
    traj.nx = config.grid.nx;
    traj.samples.push_back(sample_state(state));

    const double t_end = config.time.t_end;
    const double eps = 1e-12 * std::max(1.0, std::abs(t_end));

    while (state.t < t_end - eps) {
        const double dt_step = std::min(dt, t_end - state.t);
        options.probe_uniqueness =
            config.probe.every > 0 && step_index % config.probe.every == 0;
        options.probe_offsets =
            options.probe_uniqueness ? probe_offsets(config.probe, config.grid.nx, step_index)
                                     : std::vector<PeriodicProfile>{};

        StepResult res;
        try {
            res = step(op, state, config.boundary, dt_step, options);
        } catch (const GuardBreachError&) {
            traj.termination = "guard_breach";
            break;
        } catch (const NumericError&) {
            if (config.time.adaptive && dt > config.time.dt_min * (1.0 + 1e-12)) {
                dt = std::max(0.5 * dt, config.time.dt_min);
                easy_steps = 0;
                continue; // retry the step with a smaller dt
            }
            throw;
        }

        state = std::move(res.state);
        ++step_index;
        traj.diagnostics.push_back(res.diag);
        if (step_index % config.output.every == 0 || state.t >= t_end - eps)
            traj.samples.push_back(sample_state(state));

        if (config.time.adaptive) {
            if (res.diag.newton_iterations > 15) {
                dt = std::max(0.5 * dt, config.time.dt_min);
                easy_steps = 0;
            } else if (res.diag.newton_iterations <= 5) {
                if (++easy_steps >= 5) {
                    dt = std::min(2.0 * dt, config.time.dt_max);
                    easy_steps = 0;
                }
            } else {
                easy_steps = 0;
            }
        }
    }

    traj.final_state = std::move(state);
    traj.final_dt = dt;
    traj.easy_steps = easy_steps;
    traj.step_index = step_index;
    return traj;
}

} // namespace

Trajectory simulate(const RunConfig& config) {
    SimState state;
    state.t = 0.0;
    state.f = config.initial.empty() ? PeriodicProfile::zeros(config.grid.nx)
                                     : config.initial.with_zero_mean();
    state.F = PeriodicProfile::zeros(config.grid.nx);
    const AdmissibilityReport adm = validate_profile(state.f);
    if (!adm.in_U) throw DomainError("simulate: initial interface not admissible");
    return run(config, std::move(state), config.time.dt_init, 0, 0);
}

Trajectory simulate(const RunConfig& config, const RestartPoint& restart) {
    if (restart.f.size() != config.grid.nx)
        throw DomainError("simulate: restart state does not match the configured grid");
    SimState state;
    state.t = restart.t;
    state.f = restart.f.with_zero_mean();
    state.F = restart.F;
    double dt = restart.dt_next > 0.0 ? restart.dt_next : config.time.dt_init;
    dt = std::clamp(dt, config.time.dt_min, config.time.dt_max);
    return run(config, std::move(state), dt, restart.easy_steps, restart.step_index);
}

} // namespace mudflow
