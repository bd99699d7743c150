#pragma once

#include "mudflow/evolution.hpp"
#include "mudflow/parallel.hpp"
#include "mudflow/profile.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>

namespace mudflow {

struct TimeConfig {
    double t_end = 1.0;
    double dt_init = 0.01;
    double dt_min = 0.0; ///< 0: dt_init / 1024
    double dt_max = 0.0; ///< 0: dt_init
    Scheme scheme = Scheme::SemiImplicit;
    bool adaptive = true;
};

struct ProbeConfig {
    int every = 0; ///< probe uniqueness every N steps; 0 = never
    unsigned long long seed = 12345;
    double amplitude = 0.1;
    int count = 1;
};

struct OutputConfig {
    std::string directory = "out";
    std::string prefix = "run";
    bool svg = false;
    bool fields = false;
    int every = 1; ///< record a modal sample every N steps
};

struct RunConfig {
    ModelParams params;
    GridSpec grid;
    PeriodicProfile initial;  ///< synthesized on the x grid, mean-projected
    BoundaryData boundary = BoundaryData::constant(0.0);
    TimeConfig time;
    SolverTolerances tolerances;
    double guard_sup_f = 0.45;
    double guard_sup_F = 10.0;
    ProbeConfig probe;
    OutputConfig output;
    ExecPolicy policy;
};

/// Parse and validate a JSON run configuration. Strict: unknown keys are
/// rejected at every level; all defaultable keys may be omitted. Throws
/// ConfigError listing every violation found.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

/// Profile JSON: either an array of nodal values (length must match n) or
/// a modal map {"k": [re, im], ...} of coefficients a_k, k >= 0.
PeriodicProfile parse_profile_json(const nlohmann::json& doc, int n);
nlohmann::json profile_to_json(const PeriodicProfile& p);

} // namespace mudflow
