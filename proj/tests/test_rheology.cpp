#include "mudflow/errors.hpp"
#include "mudflow/rheology.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mudflow;

TEST_CASE("viscosity evaluation: closed forms and domain checks") {
    const ViscosityModel newt = ViscosityModel::newtonian(1.0);
    auto [mu, dmu] = newt.eval(7.0);
    CHECK(mu == doctest::Approx(1.0));
    CHECK(dmu == 0.0);

    const ViscosityModel hect = ViscosityModel::hectorite(1.0, 1.0, 1.0);
    auto [m0, d0] = hect.eval(0.0);
    CHECK(m0 == doctest::Approx(2.0).epsilon(1e-14));  // mu_inf + tau0*beta
    CHECK(d0 == doctest::Approx(-1.0).epsilon(1e-14)); // -tau0*beta^2
    CHECK(hect.eval(1e9).first == doctest::Approx(1.0).epsilon(1e-6)); // r -> inf limit

    CHECK_THROWS_AS(newt.eval(-0.1), DomainError);
    CHECK_THROWS_AS(ViscosityModel::newtonian(0.0), DomainError);
    CHECK_THROWS_AS(ViscosityModel::hectorite(1.0, -1.0, 1.0), DomainError);
}

TEST_CASE("structural condition check") {
    const ConditionReport newt = check_conditions(ViscosityModel::newtonian(2.0), 10.0, 50);
    CHECK(newt.ok);
    CHECK(newt.m_hat == doctest::Approx(2.0));
    CHECK(newt.M_hat == doctest::Approx(2.0));

    // the boundary case beta*tau0 = 4*mu_inf fails the strict inequality
    CHECK_FALSE(check_conditions(ViscosityModel::hectorite(1.0, 4.0, 1.0), 10.0, 50).ok);
    const ConditionReport hect = check_conditions(ViscosityModel::hectorite(1.0, 1.0, 1.0), 10.0, 200);
    CHECK(hect.ok);
    CHECK(hect.m_hat > 0.0);

    CHECK_THROWS_AS(check_conditions(ViscosityModel::newtonian(1.0), 0.0, 10), DomainError);
    CHECK_THROWS_AS(check_conditions(ViscosityModel::newtonian(1.0), 1.0, 1), DomainError);
}

TEST_CASE("shear inversion") {
    const ViscosityModel newt = ViscosityModel::newtonian(2.0);
    CHECK(invert_shear(newt, 8.0) == doctest::Approx(2.0).epsilon(1e-13)); // s / mu0^2
    CHECK(invert_shear(newt, 0.0) == 0.0);

    const ViscosityModel hect = ViscosityModel::hectorite(1.0, 1.0, 1.0);
    CHECK(invert_shear(hect, 0.0) == 0.0);
    // forward value at r = 1: 1 * mu(1)^2 = 1.5^2 = 2.25
    CHECK(invert_shear(hect, 2.25) == doctest::Approx(1.0).epsilon(1e-12));

    SUBCASE("roundtrip on random shear values") {
        std::mt19937_64 rng(42);
        std::uniform_real_distribution<double> dist(0.0, 20.0);
        for (int i = 0; i < 100; ++i) {
            const double r = dist(rng);
            const double s = r * hect.mu(r) * hect.mu(r);
            CHECK(invert_shear(hect, s) == doctest::Approx(r).epsilon(1e-10));
        }
    }

    SUBCASE("the map r -> r mu(r)^2 is strictly increasing on samples") {
        double prev = -1.0;
        for (int i = 0; i <= 300; ++i) {
            const double r = 30.0 * i / 300.0;
            const double v = r * hect.mu(r) * hect.mu(r);
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("effective viscosity: newtonian closed form") {
    const EffectiveViscosity ev(ViscosityModel::newtonian(1.0)); // c = 2/3
    auto [mu, dmu] = ev.eval(3.0);
    CHECK(mu == doctest::Approx(1.0).epsilon(1e-13)); // identity normalization
    CHECK(dmu == 0.0);

    const EffectiveViscosity scaled(ViscosityModel::newtonian(2.0), 0.5);
    CHECK(scaled.eval(11.0).first == doctest::Approx(1.5).epsilon(1e-13)); // 3 c mu0 / 2

    // the generic quadrature path must agree with the closed form
    auto [mq, dq] = scaled.eval_by_quadrature(11.0);
    CHECK(mq == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(std::abs(dq) < 1e-14);
}

TEST_CASE("effective viscosity: hectorite against the high-precision quadrature oracle") {
    // frozen values: mpmath (30 digits), c = 2/3, model (mu_inf, tau0, beta) = (1, 1, 1)
    const EffectiveViscosity ev(ViscosityModel::hectorite(1.0, 1.0, 1.0));
    struct Ref {
        double r, mu_m, dmu_m;
    };
    const Ref table[] = {
        {0.0, 2.0, -0.15},
        {0.5, 1.92463133395888601, -0.151096125917},
        {1.0, 1.84937367883930159, -0.149376599126},
        {2.0, 1.70609215495446743, -0.134616521532},
        {10.0, 1.23358953753716747, -0.0206712322542},
    };
    for (const Ref& ref : table) {
        auto [mu, dmu] = ev.eval(ref.r);
        CHECK(mu == doctest::Approx(ref.mu_m).epsilon(1e-10));
        CHECK(dmu == doctest::Approx(ref.dmu_m).epsilon(1e-9));
    }
    CHECK(ev.mu_m0() == doctest::Approx(2.0).epsilon(1e-12)); // 3 c mu(0) / 2
}

TEST_CASE("effective viscosity: derivative matches finite differences") {
    const EffectiveViscosity ev(ViscosityModel::hectorite(1.0, 1.0, 1.0));
    for (int i = 0; i < 20; ++i) {
        const double r = 0.05 + 8.0 * i / 19.0;
        const double h = 1e-5 * (1.0 + r);
        const double fd = (ev.eval(r + h).first - ev.eval(r - h).first) / (2.0 * h);
        CHECK(ev.eval(r).second == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("effective condition check") {
    const EffectiveViscosity newt(ViscosityModel::newtonian(1.5));
    const ConditionReport rep = check_effective_conditions(newt, 5.0, 30);
    CHECK(rep.ok);
    CHECK(rep.m_hat == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(rep.M_hat == doctest::Approx(1.5).epsilon(1e-12));

    const EffectiveViscosity hect(ViscosityModel::hectorite(1.0, 1.0, 1.0));
    const ConditionReport hrep = check_effective_conditions(hect, 5.0, 100);
    CHECK(hrep.ok);
    CHECK(hrep.m_hat > 0.0);

    CHECK_THROWS_AS(check_effective_conditions(hect, 0.0, 10), DomainError);
}

TEST_CASE("x / mu_m(x^2 + r^2) is strictly increasing when mu_m' >= 0") {
    const EffectiveViscosity ev(ViscosityModel::newtonian(0.7), 0.9);
    for (double r : {0.0, 0.5, 2.0}) {
        double prev = -1e300;
        for (int i = 0; i <= 50; ++i) {
            const double x = -2.0 + 4.0 * i / 50.0;
            const double v = x / ev.eval(x * x + r * r).first;
            CHECK(v > prev);
            prev = v;
        }
    }
}
