#include <cmath>

#include "aniso/weyl.hpp"
#include "doctest.h"

using namespace ag;
using doctest::Approx;

namespace {
Symbol poly(const Poly& p, double m = 2, double s = 1) { return Symbol::polynomial(p, m, s); }
const Poly kX = Poly::term(1, 0), kXi = Poly::term(0, 1);
}  // namespace

TEST_CASE("grid spec") {
    GridSpec g(16, 256);
    CHECK(g.dx() == Approx(0.125));
    CHECK(g.X(256) == Approx(0.0));
    CHECK(g.xi(128) == 0.0);
    CHECK(g.xi_max() == Approx(kPi / 0.125));
    CHECK_THROWS_AS(GridSpec(16, 100), DomainError);
    CHECK_THROWS_AS(GridSpec(16, 4), DomainError);
}

TEST_CASE("quantized identity, derivative and harmonic oscillator") {
    GridSpec g(16, 256);
    for (double t : {0.0, 0.5, 1.0, 0.3}) {
        GridSpec gg = t == 0.3 ? GridSpec(16, 64) : g;
        auto id = quantize(poly(Poly::constant(1, 1.0), 0), t, gg);
        CHECK((id.M - Eigen::MatrixXcd::Identity(gg.n, gg.n)).cwiseAbs().maxCoeff() < 1e-8);
    }
    double w = g.xi(128 + 9);
    auto D = quantize(poly(kXi, 1), 0.5, g);
    auto e = sample_on(g, [w](double x) { return std::exp(cplx(0, w * x)); });
    auto De = D.apply(e);
    std::vector<cplx> we(e);
    for (auto& v : we) v *= w;
    CHECK(interior_abs_error(De, we, g) < 1e-6);

    auto H = quantize(poly(Poly::term(2, 0) + Poly::term(0, 2)), 0.5, g);
    auto h0 = hermite_vector(0, g), h3 = hermite_vector(3, g);
    CHECK(interior_rel_error(H.apply(h0), h0, g) < 1e-6);
    std::vector<cplx> h3x7(h3);
    for (auto& v : h3x7) v *= 7.0;
    CHECK(interior_rel_error(H.apply(h3), h3x7, g) < 1e-6);
}

TEST_CASE("adjoint symmetry") {
    GridSpec g(16, 256);
    Poly c = Poly::term(1, 1, cplx(1, 2)) + Poly::term(3, 0, cplx(0, 1)) + Poly::term(0, 2);
    auto Q = quantize(poly(c), 0.5, g), Qc = quantize(poly(c.conj()), 0.5, g);
    CHECK((Q.adjoint().M - Qc.M).cwiseAbs().maxCoeff() < 1e-8);
    auto R = quantize(poly(Poly::term(2, 1) + Poly::term(0, 3)), 0.5, g);
    CHECK((R.M - R.M.adjoint()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("Weyl product expansion") {
    Poly xxi = weyl_product_expansion(kX, kXi);
    CHECK(xxi.approx_equal(Poly::term(1, 1) + Poly::constant(1, cplx(0, 0.5))));
    CHECK(weyl_product_expansion(kXi, kX).approx_equal(Poly::term(1, 1) - Poly::constant(1, cplx(0, 0.5))));
    Poly sym = (weyl_product_expansion(kX, kXi) + weyl_product_expansion(kXi, kX)) * 0.5;
    CHECK(sym.approx_equal(Poly::term(1, 1)));
    Poly a = Poly::term(3, 2, 2.0) + Poly::term(0, 1, cplx(0, 1));
    CHECK(weyl_product_expansion(a, Poly::constant(1, 1.0)).approx_equal(a));
    CHECK(weyl_product_expansion(kX, kXi, 0).approx_equal(Poly::term(1, 1)));
}

TEST_CASE("composition agrees with matrix products") {
    GridSpec g(16, 256);
    Poly p1 = Poly::term(3, 0) + Poly::term(1, 1, 2.0), p2 = Poly::term(0, 3) + Poly::term(2, 1, cplx(0, 1));
    auto AB = quantize(poly(weyl_product_expansion(p1, p2), 6), 0.5, g);
    auto A = quantize(poly(p1, 3), 0.5, g), B = quantize(poly(p2, 3), 0.5, g);
    OperatorMatrix prod = A;
    prod.M = A.M * B.M;
    CHECK(operator_interior_error(AB, prod) < 1e-5);

    // x o (-i d/dx) has Weyl symbol x xi + i/2
    auto X = quantize(poly(kX, 1), 0.5, g), D = quantize(poly(kXi, 1), 0.5, g);
    OperatorMatrix xd = X;
    xd.M = X.M * D.M;
    CHECK(operator_interior_error(quantize(poly(weyl_product_expansion(kX, kXi)), 0.5, g), xd) < 1e-5);
}

TEST_CASE("quantization shifts") {
    GridSpec g(16, 256);
    Poly xxi = Poly::term(1, 1);
    CHECK(quantization_shift(xxi, 0.5, 0.5).approx_equal(xxi));
    CHECK(quantization_shift(kX, 0.5, 0.0).approx_equal(kX));
    CHECK(quantization_shift(xxi, 0.5, 0.0).approx_equal(xxi - Poly::constant(1, cplx(0, 0.5))));
    for (double t1 : {0.0, 0.5, 1.0})
        for (double t2 : {0.0, 0.5, 1.0}) {
            auto W = quantize(poly(xxi), t1, g);
            auto S = quantize(poly(quantization_shift(xxi, t1, t2)), t2, g);
            CHECK(operator_interior_error(W, S) < 1e-6);
        }
    GridSpec small(16, 128);
    CHECK(operator_interior_error(quantize(poly(xxi), 0.3, small),
                                  quantize(poly(quantization_shift(xxi, 0.3, 0.5)), 0.5, small)) < 1e-6);

    // grid path on a symbol decaying in xi
    Symbol dec = Symbol::callable1(
        [](double x, double xi) { return cplx(std::exp(-xi * xi / 8) * (1 + 0.1 * x * x), 0.2 * x * xi * std::exp(-xi * xi / 8)); },
        0, 1);
    auto sg = SymbolGrid::sample(dec, g);
    auto same = quantization_shift(sg, 0.5, 0.5);
    for (size_t k = 0; k < sg.v.size(); k += 997) CHECK(std::abs(same.v[k] - sg.v[k]) < 1e-12);
    for (double t2 : {0.0, 1.0}) {
        auto shifted = quantization_shift(sg, 0.5, t2);
        CHECK(operator_interior_error(quantize(sg, 0.5), quantize(shifted, t2)) < 1e-8);
    }
}

TEST_CASE("cross-Wigner pairing") {
    GridSpec g(16, 256);
    auto h0 = hermite_vector(0, g);
    auto W = wigner(h0, h0, g);
    CHECK(W.at(g.n, g.n / 2).real() == Approx(2.0).epsilon(1e-10));
    CHECK(W.max_imag() < 1e-10);

    auto f = hermite_vector(1, g), k = hermite_vector(2, g);
    for (size_t j = 0; j < k.size(); ++j) k[j] += 0.3 * f[j] + cplx(0, 0.1) * h0[j];
    auto one = poly(Poly::constant(1, 1.0), 0);
    cplx fk = 0;
    for (size_t j = 0; j < f.size(); ++j) fk += f[j] * std::conj(k[j]) * g.dx();
    CHECK(std::abs(weyl_apply_via_wigner(one, f, k, g) - fk) < 1e-8);
    CHECK(std::abs(pairing(quantize(one, 0.5, g), f, k) - fk) < 1e-8);

    cplx xfk = 0;
    for (int j = 0; j < g.n; ++j) xfk += g.x(j) * f[j] * std::conj(k[j]) * g.dx();
    CHECK(std::abs(weyl_apply_via_wigner(poly(kX, 1), f, k, g) - xfk) < 1e-8);
    CHECK(std::abs(pairing(quantize(poly(kX, 1), 0.5, g), f, k) - xfk) < 1e-8);

    Poly c = Poly::term(1, 1, cplx(1, 2)) + Poly::term(0, 2);
    CHECK(std::abs(weyl_apply_via_wigner(poly(c), f, k, g) - pairing(quantize(poly(c), 0.5, g), f, k)) < 1e-8);
}

TEST_CASE("parametrix") {
    auto chi = make_cutoff(PhasePoint::d1(1, 0), 0.5, 2, 1);
    auto triv = parametrix(poly(Poly::constant(1, 1.0), 0), chi, 1, 0, 0);
    for (double x : {0.5, 3.0, 20.0})
        for (double xi : {-2.0, 0.4}) {
            CHECK(std::abs(triv.b.eval1(x, xi) - chi.eval1(x, xi)) < 1e-12);
            CHECK(std::abs(triv.residuals[0].eval1(x, xi)) < 1e-9);
        }

    auto a = poly(Poly::term(2, 0) + Poly::term(0, 2));
    auto P = parametrix(a, chi, 1, 2, 1);
    // on the cone where chi = 1, r_0 = b_0 # a - 1 = -1/(x^2 + xi^2)^2
    double x = 16 * 0.99, xi = 16 * 0.141, rho2 = x * x + xi * xi;
    CHECK(P.residuals[0].eval1(x, xi).real() == Approx(-1 / (rho2 * rho2)).epsilon(5e-3));
    PhasePoint z0 = PhasePoint::d1(0.99, 0.141);
    double s0 = ray_decay_slope(P.residuals[0], z0, 1, 4, 32, 8);
    double s1 = ray_decay_slope(P.residuals[1], z0, 1, 4, 32, 8);
    CHECK(s0 == Approx(-4).epsilon(0.05));
    CHECK(s1 < s0 - 1.5);

    auto airy = poly(Poly::term(0, 1) - Poly::term(2, 0), 2, 2);
    auto chi2 = make_cutoff(PhasePoint::d1(0, 1), 0.3, 2, 2);
    auto P2 = parametrix(airy, chi2, 2, 2, 0);
    CHECK(ray_decay_slope(P2.residuals[0], PhasePoint::d1(0, 1), 2, 4, 64, 8) < -3);

    auto on_char = [&] {
        auto P3 = parametrix(airy, make_cutoff(project(PhasePoint::d1(1, 1), 2), 0.3, 2, 2), 2, 2, 1);
        return P3.b.eval1(2.0, 4.0);
    };
    CHECK_THROWS_AS(on_char(), SingularSymbol);
}

TEST_CASE("sampled Weyl application") {
    Signal u;
    u.t0 = -32;
    u.dt = 1.0 / 32;
    int n = 2048;
    double w = 3.0;
    for (int k = 0; k < n; ++k) {
        double y = u.t(k);
        u.v.push_back(std::exp(-y * y / 50) * std::exp(cplx(0, w * y)));
    }
    Signal v = apply_weyl_sampled(poly(kXi, 1), u);
    double err = 0, ref = 0;
    for (int k = n / 4; k < 3 * n / 4; ++k) {
        double y = u.t(k);
        cplx want = cplx(w, 0) * u.v[k] + cplx(0, 1) * (y / 25) * u.v[k];
        err = std::max(err, std::abs(v.v[k] - want));
        ref = std::max(ref, std::abs(want));
    }
    CHECK(err / ref < 1e-8);
}
