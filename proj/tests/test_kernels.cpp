// The OpenMP kernels must agree bitwise with their serial references:
// every output element is computed independently with identical
// arithmetic, so thread count cannot change a single bit.

#include "mudflow/kernels.hpp"
#include "mudflow/mud_solver.hpp"
#include "mudflow/water_solver.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mudflow;

namespace {

Field2D random_field(std::shared_ptr<const Grid> grid, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field2D f(std::move(grid));
    for (double& v : f.data()) v = dist(rng);
    return f;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

} // namespace

TEST_CASE("field differentiation: serial and OpenMP agree bitwise") {
    for (DomainTag tag : {DomainTag::Water, DomainTag::Mud}) {
        auto grid = make_grid(32, 13, tag);
        const Field2D in = random_field(grid, 17);
        Field2D a(grid), b(grid);
        field_dx_serial(in, a);
        field_dx_openmp(in, b, 2);
        CHECK(bitwise_equal(a.data(), b.data()));
        field_dy_serial(in, a);
        field_dy_openmp(in, b, 2);
        CHECK(bitwise_equal(a.data(), b.data()));
    }
}

TEST_CASE("effective viscosity batch: serial and OpenMP agree bitwise") {
    const EffectiveViscosity ev(ViscosityModel::hectorite(1.0, 1.0, 1.0));
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> dist(0.0, 10.0);
    std::vector<double> r(512);
    for (double& v : r) v = dist(rng);
    std::vector<double> mu_s(r.size()), dmu_s(r.size()), mu_p(r.size()), dmu_p(r.size());
    effective_viscosity_batch_serial(ev, r, mu_s, dmu_s);
    effective_viscosity_batch_openmp(ev, r, mu_p, dmu_p, 2);
    CHECK(bitwise_equal(mu_s, mu_p));
    CHECK(bitwise_equal(dmu_s, dmu_p));

    // dispatcher respects the policy
    std::vector<double> mu_d(r.size()), dmu_d(r.size());
    effective_viscosity_batch(ev, r, mu_d, dmu_d, ExecPolicy::openmp(2));
    CHECK(bitwise_equal(mu_d, mu_s));
}

TEST_CASE("quasilinear coefficient batch: serial and OpenMP agree bitwise") {
    auto grid = make_grid(32, 13, DomainTag::Mud);
    const PeriodicProfile f = PeriodicProfile::harmonic(32, 2, 0.2, -0.05);
    const TransformFactors tf = transform_factors(grid, f);
    const Field2D zx = random_field(grid, 5);
    const Field2D zy = random_field(grid, 6);
    const EffectiveViscosity ev(ViscosityModel::hectorite(1.0, 1.0, 1.0));

    const auto run = [&](const ExecPolicy& pol) {
        return quasilinear_coefficients(tf, zx, zy, ev, pol);
    };
    const QuasilinearCoeffs s = run(ExecPolicy::serial());
    const QuasilinearCoeffs p = run(ExecPolicy::openmp(2));
    CHECK(bitwise_equal(s.b11.data(), p.b11.data()));
    CHECK(bitwise_equal(s.b12.data(), p.b12.data()));
    CHECK(bitwise_equal(s.b22.data(), p.b22.data()));
    CHECK(bitwise_equal(s.b.data(), p.b.data()));
    CHECK(bitwise_equal(s.lam1.data(), p.lam1.data()));
    CHECK(bitwise_equal(s.lam2.data(), p.lam2.data()));
}

TEST_CASE("end-to-end solves: serial and OpenMP policies agree bitwise") {
    const PeriodicProfile f = PeriodicProfile::harmonic(32, 1, 0.15);

    SUBCASE("water") {
        auto grid = make_grid(32, 13, DomainTag::Water);
        const PeriodicProfile F = PeriodicProfile::harmonic(32, 2, 0.7);
        const PeriodicProfile h = PeriodicProfile::constant(32, 0.3);
        WaterSolver serial(grid, 1.0, ExecPolicy::serial());
        WaterSolver openmp(grid, 1.0, ExecPolicy::openmp(2));
        CHECK(bitwise_equal(serial.solve(f, F, h).v.data(), openmp.solve(f, F, h).v.data()));
    }
    SUBCASE("mud") {
        auto grid = make_grid(32, 13, DomainTag::Mud);
        const EffectiveViscosity ev(ViscosityModel::hectorite(1.0, 1.0, 1.0));
        const PeriodicProfile p = PeriodicProfile::harmonic(32, 2, 0.5);
        MudSolver serial(grid, ev, ExecPolicy::serial());
        MudSolver openmp(grid, ev, ExecPolicy::openmp(2));
        CHECK(bitwise_equal(serial.solve(f, p).v.data(), openmp.solve(f, p).v.data()));
    }
}
