#include <cmath>

#include "aniso/symbols.hpp"
#include "doctest.h"

using namespace ag;
using doctest::Approx;

namespace {
Poly airy_symbol() { return Poly::term(0, 1) - Poly::term(2, 0); }
Poly harmonic() { return Poly::term(2, 0) + Poly::term(0, 2); }
}  // namespace

TEST_CASE("polynomial evaluation and derivatives") {
    Symbol a = Symbol::polynomial(Poly::term(1, 1), 2, 1);
    CHECK(a.derivative1(1, 1, 0.3, -7.0) == cplx(1.0));
    CHECK(a.derivative1(2, 0, 0.3, -7.0) == cplx(0.0));
    Symbol b = Symbol::polynomial(harmonic(), 2, 1);
    CHECK(b.eval1(1, 2) == cplx(5.0));

    Symbol c = Symbol::callable1([](double x, double) { return cplx(x * x * x); }, 3, 1);
    CHECK(std::abs(c.derivative1(1, 0, 2.0, 0.0) - 12.0) < 1e-6);
}

TEST_CASE("poly algebra and json") {
    Poly p = airy_symbol() * Poly::term(1, 0, cplx(0, 2));
    CHECK(p.coeff({3}, {0}) == cplx(0, -2));
    CHECK(p.degree() == 3);
    CHECK(Poly::from_json(p.to_json()).approx_equal(p));
    CHECK(p.swap_variables().coeff({1}, {1}) == cplx(0, 2));
    CHECK_THROWS_AS(Poly::from_json("[]"), DomainError);
}

TEST_CASE("seminorms") {
    SymbolSampling g;
    auto one = seminorm_estimate(Symbol::polynomial(Poly::constant(1, 1.0), 0, 1), 0, 1, 2, g);
    CHECK(one.find({0}, {0})->value == Approx(1.0));
    for (auto& e : one.entries)
        if (e.alpha[0] + e.beta[0] > 0) CHECK(e.value == 0.0);

    auto xi = seminorm_estimate(Symbol::polynomial(Poly::term(0, 1), 2, 2), 2, 2, 0, g);
    CHECK(xi.find({0}, {0})->value <= 1.0);

    // x^2 + xi^4 in G^{2, 1/2}
    Symbol km = Symbol::polynomial(Poly::term(2, 0) + Poly::term(0, 4), 2, 0.5);
    CHECK(check_membership(km, 2, 0.5, 3, g).bounded);
    // ... but not in G^{2, 1}
    CHECK_FALSE(check_membership(km, 2, 1.0, 3, g).bounded);
}

TEST_CASE("isotropic embedding") {
    CHECK(isotropic_embedding(2, 1) == std::pair<double, double>(2, 1));
    CHECK(isotropic_embedding(-3, 2) == std::pair<double, double>(-1.5, 0.5));
    CHECK(isotropic_embedding(2, 0.5) == std::pair<double, double>(4, 0.5));
}

TEST_CASE("cutoff") {
    PhasePoint z0 = project(PhasePoint::d1(1, 2), 1.5);
    Symbol chi = make_cutoff(z0, 0.3, 2, 1.5);
    CHECK(std::abs(chi(ray(z0, 4, 1.5)) - 1.0) < 1e-14);
    CHECK(std::abs(chi(ray(z0, 40, 1.5)) - 1.0) < 1e-14);
    CHECK(chi(PhasePoint::d1(0.5, 0.5)) == cplx(0));
    CHECK(chi(PhasePoint::d1(-0.9, 0.1)) == cplx(0));
    CHECK(chi(ray(PhasePoint::d1(-z0.x[0], z0.xi[0]), 10, 1.5)) == cplx(0));
    CHECK(check_membership(chi, 0, 1.5, 2, SymbolSampling{}).bounded);
    CHECK_THROWS_AS(make_cutoff(PhasePoint::d1(2, 0), 0.3, 2, 1), DomainError);
}

TEST_CASE("characteristic sets") {
    auto ch = char_set_poly(Symbol::polynomial(airy_symbol(), 2, 2), 2, 2);
    // (t, t^2) projects at s = 2 to a^2 = (sqrt 5 - 1)/2
    double a2 = 0.5 * (std::sqrt(5.0) - 1), a = std::sqrt(a2);
    double th = std::atan2(a2, a) * 180 / kPi;
    auto ang = ch.characteristic_angles();
    REQUIRE_FALSE(ang.empty());
    for (double d : ang) CHECK(std::min(angle_diff(d, th), angle_diff(d, 180 - th)) <= 2.0);
    bool lo = false, hi = false;
    for (double d : ang) lo = lo || angle_diff(d, th) <= 2, hi = hi || angle_diff(d, 180 - th) <= 2;
    CHECK(lo);
    CHECK(hi);

    CHECK(char_set_poly(Symbol::polynomial(Poly::constant(1, 1.0), 0, 1), 0.5, 0).characteristic_angles().empty());
    CHECK(char_set_poly(Symbol::polynomial(Poly::constant(1, 1.0), 0, 1), 3, 0).characteristic_angles().empty());
    CHECK(char_set_poly(Symbol::polynomial(harmonic(), 2, 1), 1, 2).characteristic_angles().empty());
}

TEST_CASE("asymptotic sums") {
    Symbol a1 = Symbol::polynomial(Poly::constant(1, 1.0), 0, 1);
    auto one = asymptotic_sum({{a1, 0}}, 1);
    CHECK(one.ok());
    CHECK(std::abs(one.a(PhasePoint::d1(50, 50)) - 1.0) < 1e-14);

    Symbol inv = Symbol::callable1([](double x, double xi) { return cplx(1.0 / (1 + x * x + xi * xi)); }, -2, 1);
    auto two = asymptotic_sum({{a1, 0}, {inv, -2}}, 1);
    CHECK(two.ok());
    REQUIRE(two.passed.size() == 2);
    CHECK(two.passed[0]);
    CHECK(two.passed[1]);
    CHECK_THROWS_AS(asymptotic_sum({{a1, 0}, {inv, 1}}, 1), DomainError);

    Symbol zero = Symbol::polynomial(Poly(1), -1, 1);
    auto pair = asymptotic_sum({{a1, 0}, {zero, -1}}, 1);
    Symbol sum = pair.a;
    Symbol resid = Symbol::callable1([sum](double x, double xi) { return sum.eval1(x, xi) - 1.0; }, -1, 1);
    CHECK(check_membership(resid, -1, 1, 2, SymbolSampling{}).bounded);
}
