#include "mudflow/errors.hpp"
#include "mudflow/evolution.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace mudflow;

namespace {

ModelParams basic_params(double gamma = 0.1, double rho_w = 1.0, double rho_m = 1.2) {
    return ModelParams{1.0, rho_w, rho_m, 1.0, gamma,
                       EffectiveViscosity(ViscosityModel::newtonian(1.0))};
}

SolverTolerances tight_tolerances() {
    SolverTolerances tol;
    tol.velocity_residual = 1e-11;
    return tol;
}

} // namespace

TEST_CASE("linearized symbols: frozen reference values") {
    // mpmath, 30 digits: tanh(1) = 0.761594155955764888...
    const ModelParams p = basic_params(0.0, 1.0, 2.0); // rho_w - rho_m = -1
    const auto [m1, lam1] = linearized_symbols(1, p);
    CHECK(m1 == doctest::Approx(1.58002565838597393).epsilon(1e-12));
    CHECK(lam1 == doctest::Approx(-0.482013790037908442).epsilon(1e-12));

    // criterion-2 parameters: k = 2, gamma = 0.1, rho_m - rho_w = 0.2
    const auto [m2, lam2] = linearized_symbols(2, basic_params());
    CHECK(m2 == doctest::Approx(1.92934917514683553).epsilon(1e-12));
    CHECK(lam2 == doctest::Approx(-0.599597579843440237).epsilon(1e-12));

    // unstable configuration: gamma = 0, rho_w - rho_m = +0.2
    CHECK(linearized_symbols(1, basic_params(0.0, 1.2, 1.0)).lambda_k ==
          doctest::Approx(0.0964027580075816884).epsilon(1e-12));

    CHECK_THROWS_AS(linearized_symbols(0, p), DomainError);
    CHECK(linearized_symbols(-3, p).m_k == linearized_symbols(3, p).m_k);
    CHECK(linearized_symbols(-3, p).lambda_k == linearized_symbols(3, p).lambda_k);
}

TEST_CASE("linearized symbols: signs under the stability assumption") {
    // gamma > 0 and rho_m > rho_w: every mode decays
    for (int k = 1; k <= 16; ++k) CHECK(linearized_symbols(k, basic_params()).lambda_k < 0.0);
    // gamma > 0 only: decay for large |k|
    const ModelParams heavy_water = basic_params(0.05, 1.2, 1.0);
    CHECK(linearized_symbols(16, heavy_water).lambda_k < 0.0);
    // identity normalization: mu_m(0) = mu0 at c = 2/3
    const ModelParams scaled{1.0, 1.0, 1.2, 1.0, 0.1,
                             EffectiveViscosity(ViscosityModel::newtonian(2.5))};
    const double th = std::tanh(2.0);
    CHECK(linearized_symbols(2, scaled).lambda_k ==
          doctest::Approx(2.0 * th * (-0.2 - 0.4) / (2.5 + th * th)).epsilon(1e-12));
}

TEST_CASE("boundary data forms") {
    const BoundaryData c = BoundaryData::constant(0.7);
    CHECK(sup_distance(c.evaluate(3.0, 16), PeriodicProfile::constant(16, 0.7)) == 0.0);

    const BoundaryData s = BoundaryData::sinusoids(0.5, {{2, 0.3, 0.1, 1.5, 0.2}});
    const PeriodicProfile at1 = s.evaluate(1.0, 32);
    for (int j = 0; j < 32; ++j) {
        const double x = 2.0 * std::numbers::pi * j / 32.0;
        CHECK(at1.value(j) ==
              doctest::Approx(0.5 + 0.3 * std::cos(1.5 + 0.2) * std::cos(2.0 * x + 0.1))
                  .epsilon(1e-13));
    }

    const BoundaryData t = BoundaryData::table(
        {0.0, 1.0}, {std::vector<double>(16, 1.0), std::vector<double>(16, 3.0)});
    CHECK(t.evaluate(0.5, 16).mean() == doctest::Approx(2.0));
    CHECK(t.evaluate(-1.0, 16).mean() == doctest::Approx(1.0)); // clamped
    CHECK(t.evaluate(9.0, 16).mean() == doctest::Approx(3.0));
    CHECK_THROWS_AS(BoundaryData::table({0.0}, {std::vector<double>(16, 1.0)}), DomainError);
}

TEST_CASE("nonlocal operator: the flat state is a root") {
    InterfaceOperator op({32, 13, 13}, basic_params(), tight_tolerances());
    const PeriodicProfile zero = PeriodicProfile::zeros(32);
    for (double hbar : {0.0, 0.4}) {
        const PeriodicProfile r = op.evaluate(PeriodicProfile::constant(32, hbar), zero, zero);
        CHECK(r.sup_norm() < 1e-10);
    }
}

TEST_CASE("nonlocal operator: mean of the output is conserved mass flux") {
    InterfaceOperator op({32, 13, 13}, basic_params(), tight_tolerances());
    const PeriodicProfile f =
        PeriodicProfile::sample(32, [](double x) { return 0.05 * std::cos(x); }).with_zero_mean();
    const PeriodicProfile F = PeriodicProfile::harmonic(32, 1, 0.01).with_zero_mean();
    const PeriodicProfile r = op.evaluate(PeriodicProfile::constant(32, 0.2), f, F);
    CHECK(std::abs(r.mean()) < 1e-8);
}

TEST_CASE("nonlocal operator: flat-state action on a mode is m(k)") {
    // newtonian, gamma = 0, equal densities: F -> m(k) F exactly in the
    // linear flat-state regime
    const ModelParams p = basic_params(0.0, 1.0, 1.0);
    InterfaceOperator op({32, 13, 13}, p, tight_tolerances());
    const PeriodicProfile zero = PeriodicProfile::zeros(32);
    const PeriodicProfile h = PeriodicProfile::zeros(32);
    for (int k : {1, 2, 3}) {
        const double a = 0.01;
        const PeriodicProfile F = PeriodicProfile::harmonic(32, k, a);
        const PeriodicProfile r = op.evaluate(h, zero, F);
        const double m_k = linearized_symbols(k, p).m_k;
        CHECK(sup_distance(r, m_k * F) < 1e-6 * a * m_k);
    }
}

TEST_CASE("velocity solve: flat data returns zero velocity") {
    InterfaceOperator op({32, 13, 13}, basic_params(), tight_tolerances());
    const VelocityResult vr = op.solve_velocity(PeriodicProfile::constant(32, 0.3),
                                                PeriodicProfile::zeros(32),
                                                PeriodicProfile::zeros(32));
    CHECK(vr.F.sup_norm() < 1e-11);
    CHECK(vr.residual < 1e-11);
}

TEST_CASE("velocity solve: small interface perturbation follows lambda_k") {
    const ModelParams p = basic_params();
    InterfaceOperator op({32, 13, 13}, p, tight_tolerances());
    const double eps = 1e-5;
    for (int k : {1, 2}) {
        const PeriodicProfile f = PeriodicProfile::harmonic(32, k, eps);
        const VelocityResult vr = op.solve_velocity(PeriodicProfile::constant(32, 0.0), f,
                                                    PeriodicProfile::zeros(32));
        const double lam = linearized_symbols(k, p).lambda_k;
        CHECK(sup_distance(vr.F, (lam * eps) * PeriodicProfile::harmonic(32, k, 1.0)) <
              1e-2 * std::abs(lam) * eps);
    }
}

TEST_CASE("velocity solve: uniqueness probe finds a single root (mu_m' = 0)") {
    InterfaceOperator op({32, 13, 13}, basic_params(), tight_tolerances());
    const PeriodicProfile f = PeriodicProfile::harmonic(32, 2, 0.05);
    const VelocityResult vr =
        op.solve_velocity(PeriodicProfile::zeros(32), f, PeriodicProfile::zeros(32), true,
                          {PeriodicProfile::harmonic(32, 1, 0.1)});
    CHECK(vr.uniqueness_gap >= 0.0);
    CHECK(vr.uniqueness_gap < 1e-8);
}

TEST_CASE("velocity solve: translation equivariance at constant h") {
    const int n = 32;
    InterfaceOperator op({n, 13, 13}, basic_params(), tight_tolerances());
    const PeriodicProfile h = PeriodicProfile::constant(n, 0.1);
    const PeriodicProfile f = PeriodicProfile::sample(n, [](double x) {
        return 1e-3 * (std::cos(x) + 0.4 * std::sin(2.0 * x));
    }).with_zero_mean();
    const int shift = 5; // nodes
    std::vector<double> shifted(n);
    for (int j = 0; j < n; ++j) shifted[(size_t)j] = f.value(((j - shift) % n + n) % n);
    const PeriodicProfile fs(shifted);

    const PeriodicProfile Fa = op.solve_velocity(h, f, PeriodicProfile::zeros(n)).F;
    const PeriodicProfile Fb = op.solve_velocity(h, fs, PeriodicProfile::zeros(n)).F;
    double worst = 0.0;
    for (int j = 0; j < n; ++j)
        worst = std::max(worst, std::abs(Fb.value(j) - Fa.value(((j - shift) % n + n) % n)));
    CHECK(worst < 1e-9);
}

TEST_CASE("velocity solve: even interface and constant h give an even velocity") {
    const int n = 32;
    InterfaceOperator op({n, 13, 13}, basic_params(), tight_tolerances());
    const PeriodicProfile f =
        PeriodicProfile::sample(n, [](double x) { return 1e-3 * std::cos(x) + 5e-4 * std::cos(2 * x); })
            .with_zero_mean();
    const PeriodicProfile F =
        op.solve_velocity(PeriodicProfile::constant(n, 0.2), f, PeriodicProfile::zeros(n)).F;
    double odd = 0.0;
    for (int j = 1; j < n; ++j) odd = std::max(odd, std::abs(F.value(j) - F.value(n - j)));
    CHECK(odd < 1e-9);
}

TEST_CASE("step: flat equilibrium is preserved") {
    InterfaceOperator op({32, 9, 9}, basic_params(), tight_tolerances());
    SimState state;
    state.f = PeriodicProfile::zeros(32);
    state.F = PeriodicProfile::zeros(32);
    const BoundaryData h = BoundaryData::constant(0.25);
    StepOptions opt;
    for (int i = 0; i < 5; ++i) {
        const StepResult res = step(op, state, h, 0.05, opt);
        state = res.state;
    }
    CHECK(state.f.sup_norm() < 1e-12);
    CHECK(state.t == doctest::Approx(0.25));
}

TEST_CASE("step: one RK4 step matches the scalar amplification factor") {
    const ModelParams p = basic_params();
    InterfaceOperator op({32, 13, 13}, p, tight_tolerances());
    const double eps = 1e-6, dt = 0.2;
    const int k = 2;
    SimState state;
    state.f = PeriodicProfile::harmonic(32, k, eps);
    state.F = PeriodicProfile::zeros(32);
    StepOptions opt;
    opt.scheme = Scheme::RK4;
    const StepResult res = step(op, state, BoundaryData::constant(0.0), dt, opt);
    const double lam = linearized_symbols(k, p).lambda_k;
    const double ratio = 2.0 * res.state.f.mode(k).real() / eps;
    const double z = lam * dt;
    CHECK(std::abs(ratio - std::exp(z)) < std::pow(std::abs(z), 5) / 30.0 + 1e-8);
}

TEST_CASE("step: one semi-implicit step reproduces the exponential factor") {
    const ModelParams p = basic_params();
    InterfaceOperator op({32, 13, 13}, p, tight_tolerances());
    const double eps = 1e-6, dt = 0.2;
    const int k = 2;
    SimState state;
    state.f = PeriodicProfile::harmonic(32, k, eps);
    state.F = PeriodicProfile::zeros(32);
    const StepResult res = step(op, state, BoundaryData::constant(0.0), dt, StepOptions{});
    const double lam = linearized_symbols(k, p).lambda_k;
    const double ratio = 2.0 * res.state.f.mode(k).real() / eps;
    CHECK(std::abs(ratio - std::exp(lam * dt)) < 1e-7);
}

TEST_CASE("step: mean stays zero and guards fire") {
    InterfaceOperator op({32, 9, 9}, basic_params(), tight_tolerances());
    SimState state;
    state.f = PeriodicProfile::harmonic(32, 1, 1e-3);
    state.F = PeriodicProfile::zeros(32);
    const BoundaryData h = BoundaryData::constant(0.0);
    StepOptions opt;
    for (int i = 0; i < 20; ++i) {
        const StepResult res = step(op, state, h, 0.05, opt);
        state = res.state;
        CHECK(std::abs(state.f.mean()) < 1e-13);
    }

    SimState big;
    big.f = PeriodicProfile::harmonic(32, 1, 0.48);
    big.F = PeriodicProfile::zeros(32);
    CHECK_THROWS_AS(step(op, big, h, 0.01, opt), GuardBreachError);
}

TEST_CASE("dispersion fit") {
    Trajectory traj;
    traj.nx = 16;
    // synthetic exact exponential on mode 2
    for (int i = 0; i <= 10; ++i) {
        const double t = 0.1 * i;
        TrajectorySample s;
        s.t = t;
        s.modes.assign(9, {0.0, 0.0});
        s.modes[2] = {0.5 * std::exp(-0.37 * t), 0.0};
        traj.samples.push_back(s);
    }
    CHECK(dispersion_fit(traj, 2) == doctest::Approx(-0.37).epsilon(1e-12));
    CHECK_THROWS_AS(dispersion_fit(traj, 3), NumericError); // flat mode -> below floor
    CHECK_THROWS_AS(dispersion_fit(traj, 100), DomainError);
}

TEST_CASE("darcy postprocess: flat state is hydrostatic and quiescent") {
    const ModelParams p = basic_params();
    InterfaceOperator op({32, 9, 9}, p, tight_tolerances());
    const double hbar = 0.8;
    SimState state;
    state.f = PeriodicProfile::zeros(32);
    state.F = PeriodicProfile::zeros(32);
    op.solve_velocity(PeriodicProfile::constant(32, hbar), state.f, state.F);
    state.water_potential = op.last_water();
    state.mud_potential = op.last_mud();

    const DarcyFields df = darcy_postprocess(state, p);
    CHECK(df.water_vel_x.sup_norm() < 1e-11);
    CHECK(df.water_vel_y.sup_norm() < 1e-11);
    CHECK(df.mud_vel_x.sup_norm() < 1e-11);
    CHECK(df.mud_vel_y.sup_norm() < 1e-11);
    CHECK(df.water_divergence < 1e-10);
    CHECK(df.mud_divergence < 1e-10);
    // p = hbar - g rho y in each phase
    const Grid& wg = df.water_pressure.grid();
    for (int ix = 0; ix < wg.nx(); ++ix)
        for (int iy = 0; iy < wg.ny(); ++iy)
            CHECK(df.water_pressure.at(ix, iy) ==
                  doctest::Approx(hbar - p.g * p.rho_w * wg.y(iy)).epsilon(1e-10));
    const Grid& mg = df.mud_pressure.grid();
    for (int ix = 0; ix < mg.nx(); ++ix)
        for (int iy = 0; iy < mg.ny(); ++iy)
            CHECK(df.mud_pressure.at(ix, iy) ==
                  doctest::Approx(hbar - p.g * p.rho_m * mg.y(iy)).epsilon(1e-10));

    SUBCASE("missing cached fields are rejected") {
        SimState bare;
        bare.f = PeriodicProfile::zeros(32);
        CHECK_THROWS_AS(darcy_postprocess(bare, p), DomainError);
    }
}
