#include <cmath>
#include <random>

#include "aniso/geometry.hpp"
#include "doctest.h"

using namespace ag;
using doctest::Approx;

TEST_CASE("kappa") {
    CHECK(kappa(0.5) == 1.0);
    CHECK(kappa(1.0) == 1.0);
    CHECK(kappa(3.0) == Approx(4.0));
}

TEST_CASE("mu weight") {
    CHECK(mu_weight(PhasePoint::d1(0, 0), 1) == 1.0);
    CHECK(mu_weight(PhasePoint::d1(3, 8), 2) == Approx(1 + 3 + std::sqrt(8.0)).epsilon(1e-14));
    CHECK(mu_weight(PhasePoint::d1(0, 16), 4) == Approx(3.0).epsilon(1e-14));
}

TEST_CASE("solve_lambda reference values") {
    for (double s : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        CHECK(solve_lambda(PhasePoint::d1(1, 0), s) == Approx(1.0).epsilon(1e-14));
        CHECK(solve_lambda(PhasePoint::d1(-7.5, 0), s) == Approx(7.5).epsilon(1e-14));
        CHECK(solve_lambda(PhasePoint::d1(0, 81), s) == Approx(std::pow(81.0, 1 / s)).epsilon(1e-12));
    }
    // 4/l^2 + 16/l^4 = 1, bisection with mpmath at 30 digits
    CHECK(solve_lambda(PhasePoint::d1(2, 4), 2) == Approx(2.5440392990281379).epsilon(1e-13));
    CHECK_THROWS_AS(solve_lambda(PhasePoint::d1(0, 0), 1), DomainError);
}

TEST_CASE("project and ray") {
    auto p = project(PhasePoint::d1(-3, 0), 2);
    CHECK(p.x[0] == Approx(-1));
    CHECK(p.xi[0] == Approx(0));
    p = project(PhasePoint::d1(0, 9), 2);
    CHECK(p.xi[0] == Approx(1));

    auto r = ray(PhasePoint::d1(1, 1), 2, 3);
    CHECK(r.x[0] == 2);
    CHECK(r.xi[0] == 8);
    r = ray(PhasePoint::d1(1, 1), 1, 0.7);
    CHECK(r.x[0] == 1);
    CHECK(r.xi[0] == 1);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> th(0, 2 * kPi), lg(-3, 3);
    for (double s : {0.25, 0.5, 1.0, 2.0, 4.0})
        for (int k = 0; k < 50; ++k) {
            double t = th(rng), mu = std::pow(10.0, lg(rng));
            PhasePoint z0 = PhasePoint::d1(std::cos(t), std::sin(t));
            PhasePoint z = ray(z0, mu, s);
            CHECK(solve_lambda(z, s) == Approx(mu).epsilon(1e-10));
            PhasePoint q = project(z, s);
            CHECK(q.x[0] == Approx(z0.x[0]).epsilon(1e-9).scale(1));
            CHECK(q.xi[0] == Approx(z0.xi[0]).epsilon(1e-9).scale(1));
        }
}

TEST_CASE("projection in two dimensions stays on the sphere") {
    PhasePoint z({1.0, -2.0}, {0.5, 3.0});
    for (double s : {0.5, 2.0}) CHECK(project(z, s).norm() == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("s-conic neighborhoods") {
    PhasePoint z0 = PhasePoint::d1(0.6, 0.8);
    SConicNbhd nb(z0, 0.1, 2);
    CHECK(contains(nb, z0));
    CHECK(contains(nb, ray(z0, 37.0, 2)));
    CHECK_FALSE(contains(nb, PhasePoint::d1(-0.6, 0.8)));

    SConicNbhd all(z0, 2.01, 0.5);
    CHECK(contains(all, PhasePoint::d1(-0.6, -0.8)));
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (int k = 0; k < 200; ++k) CHECK(contains(all, PhasePoint::d1(nd(rng), nd(rng))));

    // Gamma_{z0, delta} inside the tilde neighborhood of radius epsilon
    const double eps = 0.3, delta = 0.05;
    SConicNbhd small(z0, delta, 2), tilde(z0, eps, 2, SConicNbhd::Kind::Tilde);
    int inside = 0;
    for (int k = 0; k < 2000; ++k) {
        PhasePoint z = PhasePoint::d1(3 * nd(rng), 3 * nd(rng));
        if (z.is_zero() || !contains(small, z)) continue;
        ++inside;
        CHECK(contains(tilde, z));
    }
    for (int k = 0; k < 200; ++k) {
        PhasePoint z = ray(project(PhasePoint::d1(0.6 + 0.02 * nd(rng), 0.8 + 0.02 * nd(rng)), 2),
                           std::exp(2 * nd(rng)), 2);
        if (!contains(small, z)) continue;
        ++inside;
        CHECK(contains(tilde, z));
    }
    CHECK(inside > 20);
}

TEST_CASE("angles") {
    CHECK(direction_angle(0, 1) == Approx(90));
    CHECK(direction_angle(0, -1) == Approx(270));
    CHECK(angle_diff(359, 1) == Approx(2));
    double x, xi;
    angle_point(180, x, xi);
    CHECK(x == Approx(-1));
}
