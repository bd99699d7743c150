#include "mudflow/acceptance.hpp"

#include "mudflow/config.hpp"
#include "mudflow/evolution.hpp"
#include "mudflow/oracles.hpp"
#include "mudflow/simulate.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace mudflow::acceptance {

namespace {

struct Check {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << (detail.str().empty() ? "" : "; ") << what;
        }
    }
    void note(const std::string& what) {
        detail << (detail.str().empty() ? "" : "; ") << what;
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

ModelParams newtonian_params(double gamma, double rho_w, double rho_m, double mu0 = 1.0) {
    return ModelParams{1.0, rho_w, rho_m, 1.0, gamma,
                       EffectiveViscosity(ViscosityModel::newtonian(mu0))};
}

RunConfig dispersion_config(const ModelParams& params) {
    RunConfig cfg;
    cfg.params = params;
    cfg.grid = {32, 13, 13};
    cfg.initial = PeriodicProfile::harmonic(32, 2, 1e-4);
    cfg.boundary = BoundaryData::constant(0.0);
    cfg.time.t_end = 5.0;
    cfg.time.dt_init = 0.025;
    cfg.time.dt_min = cfg.time.dt_init;
    cfg.time.dt_max = cfg.time.dt_init;
    cfg.time.adaptive = false;
    cfg.tolerances.velocity_residual = 1e-11;
    return cfg;
}

double worst_violation(const Trajectory& traj) {
    double w = 0.0;
    for (const StepDiagnostics& d : traj.diagnostics)
        w = std::max(w, d.max_principle_violation);
    return w;
}

// ---- criterion 1: flat-state multiplier --------------------------------

CriterionResult criterion_flat_multiplier() {
    Check c;
    const ModelParams params = newtonian_params(0.1, 1.0, 1.2);
    InterfaceOperator op({64, 17, 17}, params);
    const PeriodicProfile zero = PeriodicProfile::zeros(64);
    const PeriodicProfile h = PeriodicProfile::constant(64, 0.25);
    const PeriodicProfile base = op.evaluate(h, zero, zero);
    c.require(base.sup_norm() <= 1e-10,
              "flat state not a root: |residual| = " + fmt(base.sup_norm()));

    // the flat-state residual is linear in F, so the difference quotient is
    // exact for any eps; a larger eps just dilutes solver-tolerance noise
    const double eps = 1e-4;
    double worst_off = 0.0, worst_rel = 0.0;
    for (int k = 1; k <= 8; ++k) {
        const double m_k = linearized_symbols(k, params).m_k;
        for (int trig = 0; trig < 2; ++trig) {
            const PeriodicProfile e =
                PeriodicProfile::harmonic(64, k, trig == 0 ? 1.0 : 0.0, trig == 0 ? 0.0 : 1.0);
            const PeriodicProfile column = (1.0 / eps) * (op.evaluate(h, zero, eps * e) - base);
            const std::complex<double> ck = column.mode(k);
            const double diag = trig == 0 ? 2.0 * ck.real() : -2.0 * ck.imag();
            worst_rel = std::max(worst_rel, std::abs(diag - m_k) / m_k);
            for (int j = 0; j <= 32; ++j) {
                if (j == k) continue;
                const double amp = (j == 0 || j == 32 ? 1.0 : 2.0) * std::abs(column.mode(j));
                worst_off = std::max(worst_off, amp);
            }
        }
    }
    c.require(worst_off <= 1e-8, "off-diagonal " + fmt(worst_off) + " > 1e-8");
    c.require(worst_rel <= 1e-4, "diagonal relative error " + fmt(worst_rel) + " > 1e-4");
    c.note("off-diag " + fmt(worst_off) + ", diag rel err " + fmt(worst_rel));
    return {"flat-state multiplier m(k), |k| <= 8", c.pass, c.detail.str()};
}

// ---- criteria 2+3: dispersion relation and volume conservation ---------

struct DispersionOutcome {
    CriterionResult dispersion;
    CriterionResult volume;
    double max_principle = 0.0;
};

DispersionOutcome criteria_dispersion_and_volume() {
    Check disp;
    double worst_mp = 0.0;
    Trajectory newtonian_traj;
    const double lambda2 = linearized_symbols(2, newtonian_params(0.1, 1.0, 1.2)).lambda_k;

    const auto run_case = [&](const ModelParams& params, const std::string& label) {
        const RunConfig cfg = dispersion_config(params);
        const Trajectory traj = simulate(cfg);
        disp.require(traj.termination == "completed", label + ": terminated early");
        const double fitted = dispersion_fit(traj, 2);
        const double rel = std::abs(fitted - lambda2) / std::abs(lambda2);
        disp.require(rel <= 0.02, label + ": fitted rate " + fmt(fitted) + " vs " + fmt(lambda2) +
                                      " (rel err " + fmt(rel) + " > 2%)");
        disp.note(label + " rate " + fmt(fitted) + " (rel err " + fmt(rel) + ")");
        worst_mp = std::max(worst_mp, worst_violation(traj));
        return traj;
    };

    newtonian_traj = run_case(newtonian_params(0.1, 1.0, 1.2), "newtonian");
    // admissible Hectorite with mu(0) = 1, so mu_m(0) = 1 and the
    // linearization is unchanged
    run_case(ModelParams{1.0, 1.0, 1.2, 1.0, 0.1,
                         EffectiveViscosity(ViscosityModel::hectorite(0.75, 0.25, 1.0))},
             "hectorite");

    // cross-validate with RK4, whose update never touches lambda_k
    // (shorter dt: the explicit scheme must resolve the stiff tail)
    {
        RunConfig cfg = dispersion_config(newtonian_params(0.1, 1.0, 1.2));
        cfg.time.scheme = Scheme::RK4;
        cfg.time.t_end = 1.0;
        cfg.time.dt_init = cfg.time.dt_min = cfg.time.dt_max = 0.005;
        const Trajectory traj = simulate(cfg);
        disp.require(traj.termination == "completed", "rk4: terminated early");
        const double fitted = dispersion_fit(traj, 2);
        const double rel = std::abs(fitted - lambda2) / std::abs(lambda2);
        disp.require(rel <= 0.02, "rk4: fitted rate " + fmt(fitted) + " (rel err " + fmt(rel) + ")");
        disp.note("rk4 rate " + fmt(fitted) + " (rel err " + fmt(rel) + ")");
        worst_mp = std::max(worst_mp, worst_violation(traj));
    }

    Check vol;
    vol.require(static_cast<int>(newtonian_traj.diagnostics.size()) == 200,
                "expected 200 steps, got " + std::to_string(newtonian_traj.diagnostics.size()));
    double worst_mean = 0.0, worst_flux = 0.0;
    for (const StepDiagnostics& d : newtonian_traj.diagnostics) {
        worst_mean = std::max(worst_mean, std::abs(d.mean_f));
        worst_flux = std::max(worst_flux, std::abs(d.mean_flux));
    }
    vol.require(worst_mean <= 1e-12, "|mean f| drift " + fmt(worst_mean) + " > 1e-12");
    vol.require(worst_flux <= 1e-8, "|mean flux| " + fmt(worst_flux) + " > 1e-8");
    vol.note("mean drift " + fmt(worst_mean) + ", mean flux " + fmt(worst_flux));

    return {{"dispersion relation lambda_2 (newtonian + hectorite)", disp.pass, disp.detail.str()},
            {"volume conservation over 200 steps", vol.pass, vol.detail.str()},
            worst_mp};
}

// ---- criterion 4: elliptic oracles --------------------------------------

CriterionResult criterion_elliptic_oracles(double& worst_mp) {
    Check c;
    // 4a: manufactured harmonic solution for the water solve (flat interface)
    {
        const double mu_w = 1.3;
        auto grid = make_grid(32, 17, DomainTag::Water);
        const PeriodicProfile flat = PeriodicProfile::zeros(32);
        const Field2D exact = Field2D::sample(
            grid, [](double x, double y) { return std::sin(x) * std::sinh(y - 1.0); });
        WaterSolver solver(grid, mu_w);
        const PeriodicProfile flux = water_boundary_flux(flat, exact, mu_w);
        const WaterSolve ws = solver.solve(flat, flux, PeriodicProfile::zeros(32));
        double err = 0.0;
        for (int ix = 0; ix < 32; ++ix)
            for (int iy = 0; iy < 17; ++iy)
                err = std::max(err, std::abs(ws.v.at(ix, iy) - exact.at(ix, iy)));
        c.require(err <= 1e-8, "water manufactured solution error " + fmt(err) + " > 1e-8");
        c.note("water manufactured err " + fmt(err));
    }
    // 4b: mud closed-form modal solution (flat, Newtonian)
    {
        auto grid = make_grid(32, 17, DomainTag::Mud);
        const PeriodicProfile flat = PeriodicProfile::zeros(32);
        const PeriodicProfile p = PeriodicProfile::harmonic(32, 3, 1.0);
        MudSolver solver(grid, EffectiveViscosity(ViscosityModel::newtonian(2.0)));
        const MudSolve ms = solver.solve(flat, p);
        worst_mp = std::max(worst_mp, ms.max_principle_violation);
        const Field2D ref = oracles::mud_modal_reference(grid, p);
        double err = 0.0;
        for (int ix = 0; ix < 32; ++ix)
            for (int iy = 0; iy < 17; ++iy)
                err = std::max(err, std::abs(ms.v.at(ix, iy) - ref.at(ix, iy)));
        c.require(err <= 1e-8, "mud closed-form error " + fmt(err) + " > 1e-8");
        c.note("mud closed-form err " + fmt(err));
    }
    // 4c: conjugation oracle for both operators on random admissible interfaces
    {
        std::mt19937_64 rng(20240817ull);
        std::uniform_real_distribution<double> amp(-0.08, 0.08);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        const EffectiveViscosity hect(ViscosityModel::hectorite(1.0, 1.0, 1.0));
        double worst_w = 0.0, worst_m = 0.0;
        for (int trial = 0; trial < 3; ++trial) {
            double a1 = amp(rng), a2 = amp(rng), a3 = amp(rng);
            double p1 = phase(rng), p2 = phase(rng), p3 = phase(rng);
            const PeriodicProfile f = PeriodicProfile::sample(32, [&](double x) {
                return a1 * std::cos(x + p1) + a2 * std::cos(2 * x + p2) + a3 * std::cos(3 * x + p3);
            });

            auto wgrid = make_grid(32, 13, DomainTag::Water);
            const Field2D vw = Field2D::sample(wgrid, [](double x, double y) {
                return std::sin(2.0 * x + 0.7) * (y * y * y - 0.2 * y + 0.1) +
                       0.3 * std::cos(x) * std::exp(y);
            });
            const Field2D aw = apply_water_operator(f, vw);
            double scale = 0.0, err = 0.0;
            for (int ix = 0; ix < 32; ++ix)
                for (int iy = 1; iy < 12; ++iy)
                    scale = std::max(scale, std::abs(aw.at(ix, iy)));
            for (int ix = 0; ix < 32; ++ix)
                for (int iy = 1; iy < 12; ++iy)
                    err = std::max(err,
                                   std::abs(aw.at(ix, iy) - oracles::conjugated_operator(f, vw, ix, iy)));
            worst_w = std::max(worst_w, err / scale);

            auto mgrid = make_grid(32, 13, DomainTag::Mud);
            const Field2D vm = Field2D::sample(mgrid, [](double x, double y) {
                return std::cos(x - 0.4) * (0.5 + 0.4 * y + 0.3 * y * y) +
                       0.2 * std::sin(2.0 * x) * std::exp(0.5 * y);
            });
            const Field2D am = apply_mud_operator(f, vm, hect);
            scale = 0.0;
            err = 0.0;
            for (int ix = 0; ix < 32; ++ix)
                for (int iy = 1; iy < 12; ++iy)
                    scale = std::max(scale, std::abs(am.at(ix, iy)));
            for (int ix = 0; ix < 32; ++ix)
                for (int iy = 1; iy < 12; ++iy)
                    err = std::max(
                        err, std::abs(am.at(ix, iy) -
                                      oracles::conjugated_operator(f, vm, ix, iy, &hect)));
            worst_m = std::max(worst_m, err / scale);
        }
        c.require(worst_w <= 1e-5, "water conjugation rel err " + fmt(worst_w) + " > 1e-5");
        c.require(worst_m <= 1e-5, "mud conjugation rel err " + fmt(worst_m) + " > 1e-5");
        c.note("conjugation rel err water " + fmt(worst_w) + ", mud " + fmt(worst_m));
    }
    return {"elliptic oracles (manufactured, closed form, conjugation)", c.pass, c.detail.str()};
}

// ---- criterion 5: equilibrium and stability ------------------------------

CriterionResult criterion_equilibrium_stability(double& worst_mp) {
    Check c;
    // flat equilibrium stays flat
    {
        RunConfig cfg = dispersion_config(newtonian_params(0.1, 1.0, 1.2));
        cfg.initial = PeriodicProfile::zeros(32);
        cfg.boundary = BoundaryData::constant(0.3);
        cfg.time.t_end = 5.0;
        cfg.time.dt_init = cfg.time.dt_min = cfg.time.dt_max = 0.05;
        const Trajectory traj = simulate(cfg);
        worst_mp = std::max(worst_mp, worst_violation(traj));
        double sup = 0.0;
        for (const StepDiagnostics& d : traj.diagnostics) sup = std::max(sup, d.sup_f);
        c.require(static_cast<int>(traj.diagnostics.size()) == 100,
                  "equilibrium run expected 100 steps");
        c.require(sup <= 1e-12, "flat state drifted to sup|f| = " + fmt(sup));
        c.note("equilibrium sup|f| " + fmt(sup));
    }
    // stable parameters: multi-mode data decays in sup norm
    {
        RunConfig cfg = dispersion_config(newtonian_params(0.1, 1.0, 1.2));
        cfg.initial = PeriodicProfile::sample(32, [](double x) {
            return 1e-3 * (std::cos(x) + 0.6 * std::sin(2.0 * x) + 0.4 * std::cos(3.0 * x));
        });
        cfg.time.t_end = 6.0;
        cfg.time.dt_init = cfg.time.dt_min = cfg.time.dt_max = 0.05;
        const Trajectory traj = simulate(cfg);
        worst_mp = std::max(worst_mp, worst_violation(traj));
        const double sup0 = traj.diagnostics.empty() ? 0.0 : cfg.initial.sup_norm();
        double prev = sup0;
        bool monotone = true;
        for (const StepDiagnostics& d : traj.diagnostics) {
            if (d.sup_f > prev * (1.0 + 1e-6)) monotone = false;
            prev = d.sup_f;
        }
        c.require(monotone, "sup|f| failed to decay monotonically");
        c.require(prev < 0.6 * sup0,
                  "final sup " + fmt(prev) + " not below 0.6 of initial " + fmt(sup0));
        c.note("stable decay " + fmt(sup0) + " -> " + fmt(prev));
    }
    // violated stability assumption: dominant mode grows at its lambda_k
    {
        const ModelParams params = newtonian_params(0.0, 1.2, 1.0);
        RunConfig cfg = dispersion_config(params);
        cfg.initial = PeriodicProfile::harmonic(32, 1, 1e-4);
        cfg.time.t_end = 2.0;
        cfg.time.dt_init = cfg.time.dt_min = cfg.time.dt_max = 0.01;
        const Trajectory traj = simulate(cfg);
        worst_mp = std::max(worst_mp, worst_violation(traj));
        const double lambda1 = linearized_symbols(1, params).lambda_k;
        const double fitted = dispersion_fit(traj, 1);
        const double rel = std::abs(fitted - lambda1) / lambda1;
        c.require(lambda1 > 0.0, "expected a positive growth rate");
        c.require(rel <= 0.05, "unstable growth rate " + fmt(fitted) + " vs " + fmt(lambda1) +
                                   " (rel err " + fmt(rel) + " > 5%)");
        c.note("unstable rate " + fmt(fitted) + " vs " + fmt(lambda1));
    }
    return {"equilibrium and flat-state stability", c.pass, c.detail.str()};
}

// ---- criterion 6: rheology ----------------------------------------------

CriterionResult criterion_rheology() {
    Check c;
    for (const auto& [cgap, mu0] : {std::pair{2.0 / 3.0, 1.0}, std::pair{0.5, 2.0}}) {
        const EffectiveViscosity ev(ViscosityModel::newtonian(mu0), cgap);
        const double expected = 1.5 * cgap * mu0;
        c.require(std::abs(ev.eval(3.7).first - expected) <= 1e-10,
                  "newtonian mu_m != 3c mu0/2");
        const auto [mq, dq] = ev.eval_by_quadrature(3.7);
        c.require(std::abs(mq - expected) <= 1e-10 && std::abs(dq) <= 1e-12,
                  "quadrature path disagrees with the newtonian closed form");
    }
    c.require(!ViscosityModel::hectorite(1.0, 4.0, 1.0).admissible(),
              "beta*tau0 = 4*mu_inf must fail the strict bound");
    c.require(ViscosityModel::hectorite(1.0, 3.9999, 1.0).admissible(),
              "beta*tau0 < 4*mu_inf must pass");
    c.require(ViscosityModel::hectorite(1.0, 1.0, 1.0).admissible(), "hectorite(1,1,1) admissible");

    const EffectiveViscosity hect(ViscosityModel::hectorite(1.0, 1.0, 1.0));
    double worst_fd = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double r = 0.05 + 5.0 * i / 19.0;
        const double h = 1e-5 * (1.0 + r);
        const double fd = (hect.eval(r + h).first - hect.eval(r - h).first) / (2.0 * h);
        const double an = hect.eval(r).second;
        worst_fd = std::max(worst_fd, std::abs(fd - an) / std::abs(an));
    }
    c.require(worst_fd <= 1e-6,
              "analytic mu_m' vs finite differences rel err " + fmt(worst_fd) + " > 1e-6");

    const ConditionReport rep = check_effective_conditions(hect, 5.0, 200);
    c.require(rep.ok && rep.m_hat > 0.0, "effective-viscosity bounds not positive");
    c.note("mu_m' fd rel err " + fmt(worst_fd) + ", effective bounds [" + fmt(rep.m_hat) + ", " +
           fmt(rep.M_hat) + "]");
    return {"rheology (closed forms, admissibility, derivative, bounds)", c.pass, c.detail.str()};
}

// ---- criterion 7: uniqueness of the velocity solve -----------------------

CriterionResult criterion_uniqueness() {
    Check c;
    const ModelParams params = newtonian_params(0.1, 1.0, 1.0); // mu_m' = 0
    InterfaceOperator op({32, 13, 13}, params);
    const PeriodicProfile h = PeriodicProfile::zeros(32);
    std::mt19937_64 rng(777001ull);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    double worst_gap = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        PeriodicProfile f = PeriodicProfile::zeros(32);
        for (int k = 1; k <= 4; ++k)
            f += PeriodicProfile::harmonic(32, k, coeff(rng), coeff(rng));
        f = (0.08 / std::max(1e-12, f.sup_norm()) * f).with_zero_mean();
        const VelocityResult a = op.solve_velocity(h, f, PeriodicProfile::zeros(32));
        const VelocityResult b =
            op.solve_velocity(h, f, PeriodicProfile::harmonic(32, 1, 0.1));
        worst_gap = std::max(worst_gap, sup_distance(a.F, b.F));
    }
    c.require(worst_gap <= 1e-8,
              "roots from guesses 0.1 apart differ by " + fmt(worst_gap) + " > 1e-8");
    c.note("worst root gap " + fmt(worst_gap));
    return {"velocity uniqueness for mu_m' >= 0 (10 random interfaces)", c.pass, c.detail.str()};
}

} // namespace

std::vector<CriterionResult> run_all(std::ostream& log) {
    std::vector<CriterionResult> results;
    double worst_mp = 0.0;

    const auto push = [&](CriterionResult r) {
        log << (r.pass ? "PASS" : "FAIL") << "  " << r.name
            << (r.detail.empty() ? "" : "  [" + r.detail + "]") << '\n';
        log.flush();
        results.push_back(std::move(r));
    };

    push(criterion_flat_multiplier());
    DispersionOutcome d = criteria_dispersion_and_volume();
    worst_mp = std::max(worst_mp, d.max_principle);
    push(std::move(d.dispersion));
    push(std::move(d.volume));
    push(criterion_elliptic_oracles(worst_mp));
    push(criterion_equilibrium_stability(worst_mp));
    push(criterion_rheology());
    push(criterion_uniqueness());

    Check mp;
    mp.require(worst_mp <= 1e-8,
               "worst max-principle violation " + fmt(worst_mp) + " > 1e-8");
    mp.note("worst violation " + fmt(worst_mp));
    push({"maximum principle across all mud solves", mp.pass, mp.detail.str()});

    return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    for (const CriterionResult& r : results)
        if (!r.pass) return false;
    return true;
}

} // namespace mudflow::acceptance
