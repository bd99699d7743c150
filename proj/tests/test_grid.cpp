#include "mudflow/dft.hpp"
#include "mudflow/errors.hpp"
#include "mudflow/grid.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mudflow;

TEST_CASE("grid construction and node layout") {
    auto water = make_grid(8, 5, DomainTag::Water);
    CHECK(water->y(0) == 0.0);
    CHECK(water->y(4) == 1.0);
    CHECK(water->interface_index() == 0);
    CHECK(water->outer_index() == 4);

    auto mud = make_grid(8, 5, DomainTag::Mud);
    CHECK(mud->y(0) == -1.0);
    CHECK(mud->y(4) == 0.0);
    CHECK(mud->interface_index() == 4);

    for (int i = 1; i < 5; ++i) CHECK(water->y(i) > water->y(i - 1)); // strictly monotone

    CHECK_THROWS_AS(make_grid(7, 5, DomainTag::Water), DomainError);
    CHECK_THROWS_AS(make_grid(6, 5, DomainTag::Water), DomainError);
    CHECK_THROWS_AS(make_grid(8, 4, DomainTag::Water), DomainError);
}

TEST_CASE("differentiation matrices") {
    auto mud = make_grid(16, 9, DomainTag::Mud);

    SUBCASE("d/dy is exact on polynomials") {
        Eigen::VectorXd y2(9), expect(9);
        for (int i = 0; i < 9; ++i) {
            y2[i] = mud->y(i) * mud->y(i);
            expect[i] = 2.0 * mud->y(i);
        }
        const Eigen::VectorXd d = mud->dy1() * y2;
        for (int i = 0; i < 9; ++i) CHECK(d[i] == doctest::Approx(expect[i]).epsilon(1e-12));

        const Eigen::VectorXd dd = mud->dy2() * y2;
        for (int i = 0; i < 9; ++i) CHECK(dd[i] == doctest::Approx(2.0).epsilon(1e-11));
    }
    SUBCASE("derivatives annihilate constants") {
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(9);
        CHECK((mud->dy1() * ones).lpNorm<Eigen::Infinity>() < 1e-12);
        const Eigen::VectorXd onesx = Eigen::VectorXd::Ones(16);
        CHECK((mud->dx1() * onesx).lpNorm<Eigen::Infinity>() < 1e-13);
    }
    SUBCASE("d/dx is exact on resolved modes") {
        Eigen::VectorXd c3(16), expect(16);
        for (int j = 0; j < 16; ++j) {
            c3[j] = std::cos(3.0 * mud->x(j));
            expect[j] = -3.0 * std::sin(3.0 * mud->x(j));
        }
        const Eigen::VectorXd d = mud->dx1() * c3;
        for (int j = 0; j < 16; ++j) CHECK(d[j] == doctest::Approx(expect[j]).epsilon(1e-12));
    }
    SUBCASE("x derivative of mean-zero data stays mean-zero") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        Eigen::VectorXd v(16);
        for (int j = 0; j < 16; ++j) v[j] = dist(rng);
        v.array() -= v.mean();
        CHECK(std::abs((mud->dx1() * v).mean()) < 1e-14);
    }
}

TEST_CASE("field traces") {
    auto water = make_grid(16, 7, DomainTag::Water);
    auto mud = make_grid(16, 7, DomainTag::Mud);

    const Field2D konst = Field2D::sample(water, [](double, double) { return 3.25; });
    CHECK(sup_distance(trace(konst, Edge::Top), PeriodicProfile::constant(16, 3.25)) == 0.0);

    const Field2D linear = Field2D::sample(water, [](double, double y) { return y; });
    CHECK(trace(linear, Edge::Interface).sup_norm() == 0.0);

    const Field2D wavy =
        Field2D::sample(mud, [](double x, double y) { return std::sin(x) * std::cosh(y + 1.0); });
    const PeriodicProfile interface_row = trace(wavy, Edge::Interface);
    for (int ix = 0; ix < 16; ++ix)
        CHECK(interface_row.value(ix) ==
              doctest::Approx(std::sin(mud->x(ix)) * std::cosh(1.0)).epsilon(1e-14));

    CHECK_THROWS_AS(trace(wavy, Edge::Top), DomainError);    // mud has no top edge
    CHECK_THROWS_AS(trace(konst, Edge::Bottom), DomainError); // water has no bottom edge
}

TEST_CASE("discrete Fourier pair") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    std::vector<double> v(48);
    for (double& e : v) e = dist(rng);
    const auto coeffs = dft::analyze(v);
    const auto back = dft::synthesize(coeffs);
    for (size_t j = 0; j < v.size(); ++j) CHECK(back[j] == doctest::Approx(v[j]).epsilon(1e-13));

    // cos(kx) -> one conjugate bin pair; the mean sits in bin 0
    const PeriodicProfile c = PeriodicProfile::harmonic(48, 4, 2.0);
    CHECK(c.mode(4).real() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(c.mode(5)) < 1e-13);
    CHECK(PeriodicProfile::sample(48, [](double x) { return 1.5 + std::sin(x); }).mean() ==
          doctest::Approx(1.5).epsilon(1e-13));
}
