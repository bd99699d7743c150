#include "mudflow/config.hpp"

#include "mudflow/errors.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace mudflow {

using nlohmann::json;

namespace {

/// Collects validation problems so one pass reports everything.
struct Problems {
    std::vector<std::string> items;
    void add(const std::string& where, const std::string& what) {
        items.push_back(where + ": " + what);
    }
    void raise_if_any() const {
        if (items.empty()) return;
        std::ostringstream msg;
        msg << "invalid configuration (" << items.size() << " problem(s)):";
        for (const auto& s : items) msg << "\n  - " << s;
        throw ConfigError(msg.str());
    }
};

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed, Problems& problems) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (key == a) {
                known = true;
                break;
            }
        if (!known) problems.add(where, "unknown key '" + key + "'");
    }
}

double get_number(const json& obj, const char* key, double fallback, const std::string& where,
                  Problems& problems) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) {
        problems.add(where + "." + key, "expected a number");
        return fallback;
    }
    return obj[key].get<double>();
}

int get_int(const json& obj, const char* key, int fallback, const std::string& where,
            Problems& problems) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) {
        problems.add(where + "." + key, "expected an integer");
        return fallback;
    }
    return obj[key].get<int>();
}

bool get_bool(const json& obj, const char* key, bool fallback, const std::string& where,
              Problems& problems) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_boolean()) {
        problems.add(where + "." + key, "expected a boolean");
        return fallback;
    }
    return obj[key].get<bool>();
}

std::string get_string(const json& obj, const char* key, const std::string& fallback,
                       const std::string& where, Problems& problems) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string()) {
        problems.add(where + "." + key, "expected a string");
        return fallback;
    }
    return obj[key].get<std::string>();
}

ViscosityModel parse_viscosity(const json& obj, Problems& problems) {
    if (!obj.is_object()) {
        problems.add("params.viscosity", "expected an object");
        return ViscosityModel::newtonian(1.0);
    }
    const std::string type = get_string(obj, "type", "newtonian", "params.viscosity", problems);
    try {
        if (type == "newtonian") {
            reject_unknown(obj, "params.viscosity", {"type", "mu0"}, problems);
            return ViscosityModel::newtonian(
                get_number(obj, "mu0", 1.0, "params.viscosity", problems));
        }
        if (type == "hectorite") {
            reject_unknown(obj, "params.viscosity", {"type", "mu_inf", "tau0", "beta"}, problems);
            return ViscosityModel::hectorite(
                get_number(obj, "mu_inf", 1.0, "params.viscosity", problems),
                get_number(obj, "tau0", 1.0, "params.viscosity", problems),
                get_number(obj, "beta", 1.0, "params.viscosity", problems));
        }
        problems.add("params.viscosity.type", "must be 'newtonian' or 'hectorite'");
    } catch (const DomainError& e) {
        problems.add("params.viscosity", e.what());
    }
    return ViscosityModel::newtonian(1.0);
}

} // namespace

PeriodicProfile parse_profile_json(const json& doc, int n) {
    if (doc.is_array()) {
        if (static_cast<int>(doc.size()) != n) {
            std::ostringstream msg;
            msg << "nodal profile has " << doc.size() << " values, grid expects " << n;
            throw ConfigError(msg.str());
        }
        std::vector<double> v(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) {
            if (!doc[static_cast<size_t>(j)].is_number())
                throw ConfigError("nodal profile entries must be numbers");
            v[static_cast<size_t>(j)] = doc[static_cast<size_t>(j)].get<double>();
        }
        return PeriodicProfile(std::move(v));
    }
    if (doc.is_object()) {
        std::vector<PeriodicProfile::Mode> modes;
        for (const auto& [key, value] : doc.items()) {
            int k = 0;
            try {
                k = std::stoi(key);
            } catch (...) {
                throw ConfigError("modal profile keys must be nonnegative integers, got '" + key + "'");
            }
            if (!value.is_array() || value.size() != 2 || !value[0].is_number() ||
                !value[1].is_number())
                throw ConfigError("modal profile values must be [re, im] pairs");
            if (k < 0 || k > n / 2) throw ConfigError("modal profile key out of range 0..n/2");
            modes.push_back({k, value[0].get<double>(), value[1].get<double>()});
        }
        return PeriodicProfile::from_modes(n, modes);
    }
    throw ConfigError("profile must be a nodal array or a modal map");
}

json profile_to_json(const PeriodicProfile& p) {
    json arr = json::array();
    for (int j = 0; j < p.size(); ++j) arr.push_back(p.value(j));
    return arr;
}

RunConfig parse_config(const json& doc) {
    Problems problems;
    if (!doc.is_object()) throw ConfigError("configuration root must be a JSON object");
    reject_unknown(doc, "<root>",
                   {"params", "grid", "initial", "boundary", "time", "tolerances", "guards",
                    "probe", "output", "parallel"},
                   problems);

    RunConfig cfg;

    // grid first: the initial profile needs nx
    const json grid = doc.value("grid", json::object());
    reject_unknown(grid, "grid", {"nx", "ny_water", "ny_mud"}, problems);
    cfg.grid.nx = get_int(grid, "nx", 64, "grid", problems);
    cfg.grid.ny_water = get_int(grid, "ny_water", 17, "grid", problems);
    cfg.grid.ny_mud = get_int(grid, "ny_mud", 17, "grid", problems);
    if (cfg.grid.nx < 8 || cfg.grid.nx % 2 != 0) problems.add("grid.nx", "must be even and >= 8");
    if (cfg.grid.ny_water < 5) problems.add("grid.ny_water", "must be >= 5");
    if (cfg.grid.ny_mud < 5) problems.add("grid.ny_mud", "must be >= 5");

    const json params = doc.value("params", json::object());
    reject_unknown(params, "params",
                   {"mu_w", "rho_w", "rho_m", "g", "gamma", "viscosity", "gap_constant",
                    "quadrature_order", "inversion_tol"},
                   problems);
    const double mu_w = get_number(params, "mu_w", 1.0, "params", problems);
    const double rho_w = get_number(params, "rho_w", 1.0, "params", problems);
    const double rho_m = get_number(params, "rho_m", 1.0, "params", problems);
    const double g = get_number(params, "g", 1.0, "params", problems);
    const double gamma = get_number(params, "gamma", 0.0, "params", problems);
    if (!(mu_w > 0.0)) problems.add("params.mu_w", "must be positive");
    if (!(rho_w > 0.0)) problems.add("params.rho_w", "must be positive");
    if (!(rho_m > 0.0)) problems.add("params.rho_m", "must be positive");
    if (!(g > 0.0)) problems.add("params.g", "must be positive");
    if (gamma < 0.0) problems.add("params.gamma", "must be nonnegative");
    const ViscosityModel model = parse_viscosity(params.value("viscosity", json::object()), problems);
    const double gap = get_number(params, "gap_constant", 2.0 / 3.0, "params", problems);
    const int quad = get_int(params, "quadrature_order", 64, "params", problems);
    const double inv_tol = get_number(params, "inversion_tol", 1e-12, "params", problems);
    if (!(gap > 0.0)) problems.add("params.gap_constant", "must be positive");
    if (quad < 2) problems.add("params.quadrature_order", "must be >= 2");
    if (!(inv_tol > 0.0)) problems.add("params.inversion_tol", "must be positive");
    if (!model.admissible())
        problems.add("params.viscosity", "model violates the structural bound (beta*tau0 < 4*mu_inf)");

    problems.raise_if_any(); // the remaining sections need valid basics

    cfg.params = ModelParams{mu_w, rho_w, rho_m, g, gamma,
                             EffectiveViscosity(model, gap, quad, inv_tol)};

    if (doc.contains("initial")) {
        try {
            cfg.initial = parse_profile_json(doc["initial"], cfg.grid.nx).with_zero_mean();
        } catch (const ConfigError& e) {
            problems.add("initial", e.what());
        }
    } else {
        cfg.initial = PeriodicProfile::zeros(cfg.grid.nx);
    }

    if (doc.contains("boundary")) {
        const json& b = doc["boundary"];
        const std::string type = get_string(b, "type", "constant", "boundary", problems);
        if (type == "constant") {
            reject_unknown(b, "boundary", {"type", "value"}, problems);
            cfg.boundary = BoundaryData::constant(get_number(b, "value", 0.0, "boundary", problems));
        } else if (type == "sinusoids") {
            reject_unknown(b, "boundary", {"type", "mean", "terms"}, problems);
            std::vector<BoundaryData::SinusoidTerm> terms;
            for (const json& term : b.value("terms", json::array())) {
                reject_unknown(term, "boundary.terms[]",
                               {"k", "amp", "phase", "omega", "time_phase"}, problems);
                terms.push_back({get_int(term, "k", 1, "boundary.terms[]", problems),
                                 get_number(term, "amp", 0.0, "boundary.terms[]", problems),
                                 get_number(term, "phase", 0.0, "boundary.terms[]", problems),
                                 get_number(term, "omega", 0.0, "boundary.terms[]", problems),
                                 get_number(term, "time_phase", 0.0, "boundary.terms[]", problems)});
            }
            cfg.boundary =
                BoundaryData::sinusoids(get_number(b, "mean", 0.0, "boundary", problems), terms);
        } else if (type == "table") {
            reject_unknown(b, "boundary", {"type", "times", "values"}, problems);
            try {
                std::vector<double> times = b.value("times", std::vector<double>{});
                std::vector<std::vector<double>> values =
                    b.value("values", std::vector<std::vector<double>>{});
                for (const auto& row : values)
                    if (static_cast<int>(row.size()) != cfg.grid.nx)
                        throw DomainError("each table profile must have nx values");
                cfg.boundary = BoundaryData::table(std::move(times), std::move(values));
            } catch (const std::exception& e) {
                problems.add("boundary", e.what());
            }
        } else {
            problems.add("boundary.type", "must be 'constant', 'sinusoids' or 'table'");
        }
    }

    const json time = doc.value("time", json::object());
    reject_unknown(time, "time", {"t_end", "dt_init", "dt_min", "dt_max", "scheme", "adaptive"},
                   problems);
    cfg.time.t_end = get_number(time, "t_end", 1.0, "time", problems);
    cfg.time.dt_init = get_number(time, "dt_init", 0.01, "time", problems);
    cfg.time.dt_min = get_number(time, "dt_min", 0.0, "time", problems);
    cfg.time.dt_max = get_number(time, "dt_max", 0.0, "time", problems);
    cfg.time.adaptive = get_bool(time, "adaptive", true, "time", problems);
    const std::string scheme = get_string(time, "scheme", "semi_implicit", "time", problems);
    if (scheme == "semi_implicit") cfg.time.scheme = Scheme::SemiImplicit;
    else if (scheme == "rk4") cfg.time.scheme = Scheme::RK4;
    else problems.add("time.scheme", "must be 'semi_implicit' or 'rk4'");
    if (!(cfg.time.t_end > 0.0)) problems.add("time.t_end", "must be positive");
    if (!(cfg.time.dt_init > 0.0)) problems.add("time.dt_init", "must be positive");
    if (cfg.time.dt_min == 0.0) cfg.time.dt_min = cfg.time.dt_init / 1024.0;
    if (cfg.time.dt_max == 0.0) cfg.time.dt_max = cfg.time.dt_init;
    if (cfg.time.dt_min > cfg.time.dt_init) problems.add("time.dt_min", "must not exceed dt_init");
    if (cfg.time.dt_max < cfg.time.dt_init) problems.add("time.dt_max", "must not be below dt_init");

    const json tol = doc.value("tolerances", json::object());
    reject_unknown(tol, "tolerances",
                   {"velocity_residual", "newton_max_iterations", "gmres_max_dim", "gmres_rtol",
                    "water_refine_target", "mud_nonlinear_tol", "mud_max_iterations",
                    "mud_linear_refine_target"},
                   problems);
    cfg.tolerances.velocity_residual =
        get_number(tol, "velocity_residual", 1e-9, "tolerances", problems);
    cfg.tolerances.newton_max_iterations =
        get_int(tol, "newton_max_iterations", 25, "tolerances", problems);
    cfg.tolerances.gmres_max_dim = get_int(tol, "gmres_max_dim", 30, "tolerances", problems);
    cfg.tolerances.gmres_rtol = get_number(tol, "gmres_rtol", 1e-4, "tolerances", problems);
    cfg.tolerances.water_refine_target =
        get_number(tol, "water_refine_target", 1e-12, "tolerances", problems);
    cfg.tolerances.mud.nonlinear_tol =
        get_number(tol, "mud_nonlinear_tol", 1e-9, "tolerances", problems);
    cfg.tolerances.mud.max_iterations = get_int(tol, "mud_max_iterations", 50, "tolerances", problems);
    cfg.tolerances.mud.linear_refine_target =
        get_number(tol, "mud_linear_refine_target", 1e-12, "tolerances", problems);
    for (const auto& [name, value] :
         std::initializer_list<std::pair<const char*, double>>{
             {"velocity_residual", cfg.tolerances.velocity_residual},
             {"gmres_rtol", cfg.tolerances.gmres_rtol},
             {"water_refine_target", cfg.tolerances.water_refine_target},
             {"mud_nonlinear_tol", cfg.tolerances.mud.nonlinear_tol},
             {"mud_linear_refine_target", cfg.tolerances.mud.linear_refine_target}})
        if (!(value > 0.0)) problems.add(std::string("tolerances.") + name, "must be positive");

    const json guards = doc.value("guards", json::object());
    reject_unknown(guards, "guards", {"sup_f", "sup_F"}, problems);
    cfg.guard_sup_f = get_number(guards, "sup_f", 0.45, "guards", problems);
    cfg.guard_sup_F = get_number(guards, "sup_F", 10.0, "guards", problems);
    if (!(cfg.guard_sup_f > 0.0) || cfg.guard_sup_f > 0.5)
        problems.add("guards.sup_f", "must lie in (0, 0.5]");
    if (!(cfg.guard_sup_F > 0.0)) problems.add("guards.sup_F", "must be positive");

    const json probe = doc.value("probe", json::object());
    reject_unknown(probe, "probe", {"every", "seed", "amplitude", "count"}, problems);
    cfg.probe.every = get_int(probe, "every", 0, "probe", problems);
    if (probe.contains("seed")) {
        if (!probe["seed"].is_number_unsigned() && !probe["seed"].is_number_integer())
            problems.add("probe.seed", "expected an integer");
        else cfg.probe.seed = probe["seed"].get<unsigned long long>();
    }
    cfg.probe.amplitude = get_number(probe, "amplitude", 0.1, "probe", problems);
    cfg.probe.count = get_int(probe, "count", 1, "probe", problems);
    if (cfg.probe.every < 0) problems.add("probe.every", "must be nonnegative");
    if (cfg.probe.count < 1) problems.add("probe.count", "must be >= 1");

    const json output = doc.value("output", json::object());
    reject_unknown(output, "output", {"directory", "prefix", "svg", "fields", "every"}, problems);
    cfg.output.directory = get_string(output, "directory", "out", "output", problems);
    cfg.output.prefix = get_string(output, "prefix", "run", "output", problems);
    cfg.output.svg = get_bool(output, "svg", false, "output", problems);
    cfg.output.fields = get_bool(output, "fields", false, "output", problems);
    cfg.output.every = get_int(output, "every", 1, "output", problems);
    if (cfg.output.every < 1) problems.add("output.every", "must be >= 1");

    const json parallel = doc.value("parallel", json::object());
    reject_unknown(parallel, "parallel", {"mode", "threads"}, problems);
    const std::string mode = get_string(parallel, "mode", "serial", "parallel", problems);
    if (mode == "serial") cfg.policy.mode = ExecMode::Serial;
    else if (mode == "openmp") cfg.policy.mode = ExecMode::OpenMP;
    else problems.add("parallel.mode", "must be 'serial' or 'openmp'");
    cfg.policy.threads = get_int(parallel, "threads", 0, "parallel", problems);
    if (cfg.policy.threads < 0) problems.add("parallel.threads", "must be nonnegative");

    if (!cfg.initial.empty()) {
        const AdmissibilityReport adm = validate_profile(cfg.initial);
        if (!adm.in_U) problems.add("initial", "sup|f0| must be < 1/2");
        if (cfg.initial.sup_norm() >= cfg.guard_sup_f)
            problems.add("initial", "sup|f0| must be below guards.sup_f");
    }

    problems.raise_if_any();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(doc);
}

} // namespace mudflow
