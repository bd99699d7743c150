// Command-line front end: simulate | dispersion | linearize |
// check-viscosity | selftest. Errors map to distinct exit codes:
//   2 configuration / usage, 3 numerics, 4 failed check, 5 I/O.

#include "mudflow/acceptance.hpp"
#include "mudflow/config.hpp"
#include "mudflow/errors.hpp"
#include "mudflow/outputs.hpp"
#include "mudflow/simulate.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitCheckFailed = 4;
constexpr int kExitIo = 5;

struct RangeSpec {
    int lo = 1, hi = 8;
};

RangeSpec parse_range(const std::string& text) {
    RangeSpec r;
    const size_t dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            r.lo = r.hi = std::stoi(text);
        } else {
            r.lo = std::stoi(text.substr(0, dots));
            r.hi = std::stoi(text.substr(dots + 2));
        }
    } catch (...) {
        throw mudflow::ConfigError("invalid mode range '" + text + "', expected K or K1..K2");
    }
    if (r.lo < 1 || r.hi < r.lo)
        throw mudflow::ConfigError("mode range must satisfy 1 <= K1 <= K2");
    return r;
}

int cmd_simulate(const std::string& config_path, const std::string& restart_path,
                 const std::string& output_dir) {
    mudflow::RunConfig cfg = mudflow::load_config(config_path);
    if (!output_dir.empty()) cfg.output.directory = output_dir;

    mudflow::Trajectory traj;
    if (restart_path.empty()) {
        traj = mudflow::simulate(cfg);
    } else {
        const mudflow::Snapshot snap = mudflow::read_snapshot_json(restart_path);
        traj = mudflow::simulate(cfg, {snap.t, snap.step_index, snap.dt_next, snap.easy_steps,
                                       snap.f, snap.F});
    }

    const std::vector<std::string> files = mudflow::write_outputs(traj, cfg);
    std::cout << "steps: " << traj.diagnostics.size() << "\nfinal t: "
              << mudflow::format_full(traj.final_state.t)
              << "\nsup|f|: " << mudflow::format_full(traj.final_state.f.sup_norm())
              << "\ntermination: " << traj.termination << "\n";
    for (const std::string& f : files) std::cout << "wrote " << f << "\n";
    return 0;
}

int cmd_dispersion(const std::string& config_path, const std::string& range_text, double amp) {
    const RangeSpec range = parse_range(range_text);
    const mudflow::RunConfig base = mudflow::load_config(config_path);
    std::cout << "k,lambda_analytic,lambda_fitted,rel_err\n";
    bool any_fail = false;
    for (int k = range.lo; k <= range.hi; ++k) {
        mudflow::RunConfig cfg = base;
        cfg.initial = mudflow::PeriodicProfile::harmonic(cfg.grid.nx, k, amp);
        const double lambda = mudflow::linearized_symbols(k, cfg.params).lambda_k;
        const mudflow::Trajectory traj = mudflow::simulate(cfg);
        double fitted = std::numeric_limits<double>::quiet_NaN();
        try {
            fitted = mudflow::dispersion_fit(traj, k);
        } catch (const mudflow::NumericError&) {
            any_fail = true;
        }
        const double rel = std::abs(fitted - lambda) / std::abs(lambda);
        std::cout << k << ',' << mudflow::format_full(lambda) << ','
                  << mudflow::format_full(fitted) << ',' << mudflow::format_full(rel) << "\n";
    }
    return any_fail ? kExitNumeric : 0;
}

int cmd_linearize(const std::string& config_path, const std::string& range_text) {
    const RangeSpec range = parse_range(range_text);
    const mudflow::RunConfig cfg = mudflow::load_config(config_path);
    std::cout << "k,m_k,lambda_k\n";
    for (int k = range.lo; k <= range.hi; ++k) {
        const auto [m_k, lambda_k] = mudflow::linearized_symbols(k, cfg.params);
        std::cout << k << ',' << mudflow::format_full(m_k) << ','
                  << mudflow::format_full(lambda_k) << "\n";
    }
    return 0;
}

int cmd_check_viscosity(const std::string& config_path, double r_max, int samples) {
    const mudflow::RunConfig cfg = mudflow::load_config(config_path);
    const mudflow::ViscosityModel& model = cfg.params.ev.base();

    const mudflow::ConditionReport base = mudflow::check_conditions(model, r_max, samples);
    const mudflow::ConditionReport eff =
        mudflow::check_effective_conditions(cfg.params.ev, r_max, samples);

    const auto print = [](const char* name, const mudflow::ConditionReport& rep) {
        std::cout << name << ": " << (rep.ok ? "ok" : "FAILED") << "  bounds ["
                  << mudflow::format_full(rep.m_hat) << ", " << mudflow::format_full(rep.M_hat)
                  << "]  tightest at r = " << mudflow::format_full(rep.worst_r) << "\n";
    };
    print("viscosity  mu, mu + 2 r mu'", base);
    print("effective  mu_m, mu_m - 2 r mu_m'", eff);
    std::cout << "structural admissibility: " << (model.admissible() ? "ok" : "FAILED") << "\n";
    std::cout << "mu_m(0) = " << mudflow::format_full(cfg.params.ev.mu_m0()) << "\n";
    return (base.ok && eff.ok) ? 0 : kExitCheckFailed;
}

int cmd_selftest() {
    const auto results = mudflow::acceptance::run_all(std::cout);
    return mudflow::acceptance::all_passed(results) ? 0 : kExitCheckFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-phase mud-water interface simulator"};
    app.require_subcommand(1);

    std::string config_path, restart_path, output_dir, range_text = "1..8";
    double amp = 1e-4, r_max = 10.0;
    int samples = 200;

    CLI::App* sim = app.add_subcommand("simulate", "run a simulation from a JSON config");
    sim->add_option("--config", config_path, "JSON configuration file")->required();
    sim->add_option("--restart", restart_path, "snapshot JSON to continue from");
    sim->add_option("--output-dir", output_dir, "override the configured output directory");

    CLI::App* disp = app.add_subcommand(
        "dispersion", "fit modal decay/growth rates against the analytic symbol");
    disp->add_option("--config", config_path, "JSON configuration file")->required();
    disp->add_option("--k", range_text, "mode or range, e.g. 2 or 1..4");
    disp->add_option("--amp", amp, "initial modal amplitude");

    CLI::App* lin =
        app.add_subcommand("linearize", "print the flat-state symbols m(k), lambda(k)");
    lin->add_option("--config", config_path, "JSON configuration file")->required();
    lin->add_option("--k", range_text, "mode or range, e.g. 1..8");

    CLI::App* chk =
        app.add_subcommand("check-viscosity", "verify the structural viscosity conditions");
    chk->add_option("--config", config_path, "JSON configuration file")->required();
    chk->add_option("--r-max", r_max, "sampled shear range");
    chk->add_option("--samples", samples, "sample count");

    app.add_subcommand("selftest", "run the verification suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e); // CLI11 prints usage; nonzero on error
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path, restart_path, output_dir);
        if (disp->parsed()) return cmd_dispersion(config_path, range_text, amp);
        if (lin->parsed()) return cmd_linearize(config_path, range_text);
        if (chk->parsed()) return cmd_check_viscosity(config_path, r_max, samples);
        return cmd_selftest();
    } catch (const mudflow::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const mudflow::DomainError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const mudflow::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const mudflow::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
