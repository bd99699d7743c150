#include "mudflow/errors.hpp"
#include "mudflow/kernels.hpp"
#include "mudflow/mud_solver.hpp"
#include "mudflow/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mudflow;

namespace {

double field_sup_diff(const Field2D& a, const Field2D& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.data().size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

const EffectiveViscosity& hectorite111() {
    static const EffectiveViscosity ev(ViscosityModel::hectorite(1.0, 1.0, 1.0));
    return ev;
}

} // namespace

TEST_CASE("gradient coefficients") {
    SUBCASE("newtonian: a_ij = delta_ij / mu_m") {
        const EffectiveViscosity ev(ViscosityModel::newtonian(2.0)); // mu_m = 2 at c = 2/3
        const GradientCoeffs c = gradient_coefficients(ev, 0.7, -0.3);
        CHECK(c.a11 == doctest::Approx(0.5).epsilon(1e-13));
        CHECK(c.a22 == doctest::Approx(0.5).epsilon(1e-13));
        CHECK(c.a12 == 0.0);
        CHECK(c.lam1 == doctest::Approx(0.5));
        CHECK(c.lam2 == doctest::Approx(0.5));
    }
    SUBCASE("zero gradient: a_ij = delta_ij / mu_m(0)") {
        const GradientCoeffs c = gradient_coefficients(hectorite111(), 0.0, 0.0);
        CHECK(c.a11 == doctest::Approx(0.5).epsilon(1e-12)); // mu_m(0) = 2
        CHECK(c.a12 == 0.0);
        CHECK(c.lam1 == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("eigenvalue formula at z = (1, 0), frozen oracle values") {
        // mu_m(1), mu_m'(1) from the high-precision quadrature oracle
        const double mu1 = 1.84937367883930159, dmu1 = -0.149376599126;
        const GradientCoeffs c = gradient_coefficients(hectorite111(), 1.0, 0.0);
        CHECK(c.lam1 == doctest::Approx(1.0 / mu1).epsilon(1e-9));
        CHECK(c.lam2 == doctest::Approx(1.0 / mu1 - 2.0 * dmu1 / (mu1 * mu1)).epsilon(1e-8));
        CHECK(c.a11 == doctest::Approx(c.lam2).epsilon(1e-12)); // z along x
        CHECK(c.a22 == doctest::Approx(c.lam1).epsilon(1e-12));
        CHECK(c.lam1 > 0.0);
        CHECK(c.lam2 > 0.0);
    }
}

TEST_CASE("mud operator: flat newtonian reduces to Laplacian / mu_m") {
    auto grid = make_grid(32, 13, DomainTag::Mud);
    const EffectiveViscosity ev(ViscosityModel::newtonian(3.0)); // mu_m = 3
    const PeriodicProfile flat = PeriodicProfile::zeros(32);
    const Field2D v = Field2D::sample(
        grid, [](double x, double y) { return std::cos(x) * (y * y + 0.5 * y) + 0.2 * y; });
    const Field2D av = apply_mud_operator(flat, v, ev);
    for (int ix = 0; ix < 32; ++ix)
        for (int iy = 1; iy < 12; ++iy) {
            const double x = grid->x(ix), y = grid->y(iy);
            const double lap = -std::cos(x) * (y * y + 0.5 * y) + 2.0 * std::cos(x);
            CHECK(av.at(ix, iy) == doctest::Approx(lap / 3.0).epsilon(1e-8));
        }
}

TEST_CASE("mud operator: constants annihilated") {
    auto grid = make_grid(32, 9, DomainTag::Mud);
    const PeriodicProfile f = PeriodicProfile::harmonic(32, 1, 0.2, -0.1);
    const Field2D konst = Field2D::sample(grid, [](double, double) { return -1.4; });
    CHECK(apply_mud_operator(f, konst, hectorite111()).sup_norm() < 1e-11);
}

TEST_CASE("mud operator matches the conjugation oracle on random interfaces") {
    std::mt19937_64 rng(616);
    std::uniform_real_distribution<double> amp(-0.08, 0.08);
    auto grid = make_grid(32, 13, DomainTag::Mud);
    const Field2D v = Field2D::sample(grid, [](double x, double y) {
        return std::cos(x - 0.4) * (0.5 + 0.4 * y + 0.3 * y * y) +
               0.2 * std::sin(2.0 * x) * std::exp(0.5 * y);
    });
    for (int trial = 0; trial < 3; ++trial) {
        PeriodicProfile f = PeriodicProfile::zeros(32);
        for (int k = 1; k <= 3; ++k) f += PeriodicProfile::harmonic(32, k, amp(rng), amp(rng));
        const Field2D av = apply_mud_operator(f, v, hectorite111());
        double scale = 0.0, err = 0.0;
        for (int ix = 0; ix < 32; ++ix)
            for (int iy = 1; iy < 12; ++iy) scale = std::max(scale, std::abs(av.at(ix, iy)));
        for (int ix = 0; ix < 32; ++ix)
            for (int iy = 1; iy < 12; ++iy)
                err = std::max(err, std::abs(av.at(ix, iy) - oracles::conjugated_operator(
                                                                 f, v, ix, iy, &hectorite111())));
        CHECK(err / scale < 1e-5);
    }
}

TEST_CASE("mud boundary flux") {
    auto grid = make_grid(32, 9, DomainTag::Mud);
    const PeriodicProfile flat = PeriodicProfile::zeros(32);

    SUBCASE("constant potential: zero flux") {
        const Field2D konst = Field2D::sample(grid, [](double, double) { return 2.0; });
        CHECK(mud_boundary_flux(flat, konst, hectorite111()).sup_norm() < 1e-12);
    }
    SUBCASE("v = y: flux = 1 / mu_m(1)") {
        const Field2D linear = Field2D::sample(grid, [](double, double y) { return y; });
        const PeriodicProfile flux = mud_boundary_flux(flat, linear, hectorite111());
        const double expect = 1.0 / hectorite111().eval(1.0).first;
        CHECK(sup_distance(flux, PeriodicProfile::constant(32, expect)) < 1e-10);
    }
    SUBCASE("newtonian reduction equals the water formula with mu_m") {
        const EffectiveViscosity ev(ViscosityModel::newtonian(1.0), 2.0 / 3.0); // mu_m = 1
        const PeriodicProfile f =
            PeriodicProfile::sample(32, [](double x) { return 0.1 * std::sin(2.0 * x); });
        const Field2D v = Field2D::sample(
            grid, [](double x, double y) { return std::cos(x) * (1.0 + y) + 0.3 * y; });
        const PeriodicProfile flux = mud_boundary_flux(f, v, ev);
        Field2D vx(grid), vy(grid);
        field_dx(v, vx, ExecPolicy{});
        field_dy(v, vy, ExecPolicy{});
        const PeriodicProfile tx = trace(vx, Edge::Interface);
        const PeriodicProfile ty = trace(vy, Edge::Interface);
        const PeriodicProfile df = f.derivative(1);
        for (int ix = 0; ix < 32; ++ix) {
            const double fp = df.value(ix);
            CHECK(flux.value(ix) ==
                  doctest::Approx((1.0 + fp * fp) * ty.value(ix) - fp * tx.value(ix))
                      .epsilon(1e-11));
        }
    }
}

TEST_CASE("mud solve: constant boundary data converges in one iteration") {
    auto grid = make_grid(32, 9, DomainTag::Mud);
    MudSolver solver(grid, hectorite111());
    const PeriodicProfile f = PeriodicProfile::harmonic(32, 2, 0.15);
    const MudSolve ms = solver.solve(f, PeriodicProfile::constant(32, 1.3));
    CHECK(ms.converged);
    CHECK(ms.iterations == 1);
    const Field2D expect = Field2D::sample(grid, [](double, double) { return 1.3; });
    CHECK(field_sup_diff(ms.v, expect) < 1e-10);
}

TEST_CASE("mud solve: newtonian closed-form modal solution") {
    auto grid = make_grid(32, 17, DomainTag::Mud);
    MudSolver solver(grid, EffectiveViscosity(ViscosityModel::newtonian(2.0)));
    const PeriodicProfile flat = PeriodicProfile::zeros(32);
    const PeriodicProfile p = PeriodicProfile::harmonic(32, 3, 1.0);
    const MudSolve ms = solver.solve(flat, p);
    CHECK(ms.converged);
    CHECK(field_sup_diff(ms.v, oracles::mud_modal_reference(grid, p)) < 1e-8);
    CHECK(ms.lam_min > 0.0);
}

TEST_CASE("mud solve: small-data hectorite agrees with the linearized solution") {
    auto grid = make_grid(32, 13, DomainTag::Mud);
    MudSolver solver(grid, hectorite111());
    const PeriodicProfile flat = PeriodicProfile::zeros(32);
    const double eps = 1e-6;
    const PeriodicProfile p = PeriodicProfile::harmonic(32, 1, eps);
    const MudSolve ms = solver.solve(flat, p);
    CHECK(ms.converged);
    // the quasilinear correction enters at O(eps^2)
    CHECK(field_sup_diff(ms.v, oracles::mud_modal_reference(grid, p)) < 100.0 * eps * eps);
}

TEST_CASE("mud solve: even data on a flat interface gives an even solution") {
    auto grid = make_grid(32, 13, DomainTag::Mud);
    MudSolver solver(grid, hectorite111());
    const PeriodicProfile p = PeriodicProfile::sample(
        32, [](double x) { return 0.3 * std::cos(x) + 0.1 * std::cos(3.0 * x); });
    const MudSolve ms = solver.solve(PeriodicProfile::zeros(32), p);
    CHECK(ms.converged);
    double asym = 0.0;
    for (int ix = 1; ix < 32; ++ix)
        for (int iy = 0; iy < 13; ++iy)
            asym = std::max(asym, std::abs(ms.v.at(ix, iy) - ms.v.at(32 - ix, iy)));
    CHECK(asym < 1e-9);
}

TEST_CASE("mud solve: ellipticity eigenvalues stay positive on converged solves") {
    auto grid = make_grid(32, 13, DomainTag::Mud);
    MudSolver solver(grid, hectorite111());
    const PeriodicProfile f = PeriodicProfile::harmonic(32, 1, 0.2);
    const MudSolve ms = solver.solve(f, PeriodicProfile::harmonic(32, 2, 0.4));
    CHECK(ms.converged);
    CHECK(ms.lam_min > 0.0);
    CHECK(ms.residual_inf <= 1e-9);
}

TEST_CASE("mud solve: picard residual decreases after the first iteration") {
    auto grid = make_grid(32, 13, DomainTag::Mud);
    MudSolver solver(grid, hectorite111());
    // large enough data that the solve needs several Picard passes
    const MudSolve ms =
        solver.solve(PeriodicProfile::zeros(32), PeriodicProfile::harmonic(32, 1, 1.5));
    CHECK(ms.converged);
    CHECK(ms.iterations >= 2);
    for (size_t i = 1; i < ms.residual_history.size(); ++i)
        CHECK(ms.residual_history[i] < ms.residual_history[i - 1]);
}

TEST_CASE("max principle check") {
    auto grid = make_grid(16, 7, DomainTag::Mud);
    const Field2D konst = Field2D::sample(grid, [](double, double) { return 1.0; });
    CHECK(max_principle_check(konst).pass);

    // explicit harmonic solution attains extrema on the interface
    const Field2D cosh3 = Field2D::sample(grid, [](double x, double y) {
        return std::cos(3.0 * x) * std::cosh(3.0 * (y + 1.0)) / std::cosh(3.0);
    });
    CHECK(max_principle_check(cosh3).pass);

    Field2D spiked = konst;
    spiked.at(7, 3) = 2.0; // interior spike must fail
    const MaxPrincipleReport rep = max_principle_check(spiked);
    CHECK_FALSE(rep.pass);
    CHECK(rep.violation == doctest::Approx(1.0));
}

TEST_CASE("mud solve: guess reuse does not change the converged answer") {
    auto grid = make_grid(32, 13, DomainTag::Mud);
    MudSolver solver(grid, hectorite111());
    const PeriodicProfile f = PeriodicProfile::harmonic(32, 1, 0.1);
    const PeriodicProfile p = PeriodicProfile::harmonic(32, 2, 0.7);
    const MudSolve a = solver.solve(f, p);
    const Field2D guess = Field2D::sample(grid, [](double, double) { return 0.05; });
    const MudSolve b = solver.solve(f, p, &guess);
    CHECK(field_sup_diff(a.v, b.v) < 1e-9);
}
