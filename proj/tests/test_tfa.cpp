#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "aniso/airy.hpp"
#include "aniso/tfa.hpp"
#include "doctest.h"

using namespace ag;
using doctest::Approx;

namespace {

const double kInvSqrt2Pi = 1 / std::sqrt(2 * kPi);

void check_close(cplx got, cplx want, double tol) {
    INFO("got " << got << " want " << want);
    CHECK(std::abs(got - want) <= tol * std::max(1.0, std::abs(want)));
}

Signal packet_sum(std::mt19937_64& rng, int n, double dt) {
    Signal s;
    s.t0 = -0.5 * n * dt;
    s.dt = dt;
    s.v.assign(n, 0.0);
    double T = 0.5 * n * dt, nyq = kPi / dt;
    std::uniform_real_distribution<double> pos(-0.4 * T, 0.4 * T), fr(-0.5 * nyq, 0.5 * nyq), ph(0, 2 * kPi);
    for (int p = 0; p < 6; ++p) {
        double c = pos(rng), w = fr(rng), a = ph(rng);
        for (int k = 0; k < n; ++k) {
            double y = s.t(k) - c;
            s.v[k] += std::exp(-0.5 * y * y) * std::exp(cplx(0, w * s.t(k) + a));
        }
    }
    return s;
}

}  // namespace

TEST_CASE("windows") {
    Window g = Window::gaussian();
    CHECK(g.l2_norm() == Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(g(0.0)) == Approx(std::pow(kPi, -0.25)).epsilon(1e-14));
    for (int k = 0; k < 5; ++k) {
        Window h = Window::hermite(k);
        CHECK(h.l2_norm() == Approx(1.0).epsilon(1e-12));
        CHECK(h.fourier().l2_norm() == Approx(1.0).epsilon(1e-12));
        // Hermite functions are eigenfunctions of F with eigenvalue (-i)^k
        cplx ev = std::pow(cplx(0, -1), k);
        for (double y : {-1.3, 0.2, 2.1}) check_close(h.fourier()(y), ev * h(y), 1e-12);
        for (double y : {-0.7, 1.9}) check_close(h.fourier().inverse_fourier()(y), h(y), 1e-12);
    }
    CHECK(Window::from_name("hermite_1").name() == Window::hermite(1).name());
    CHECK_THROWS_AS(Window::from_name("boxcar"), CatalogError);
}

TEST_CASE("Airy function values") {
    // mpmath airyai, 30 digits
    CHECK(airy_ai_real(0) == Approx(0.355028053887817239).epsilon(1e-13));
    CHECK(airy_ai_real(1) == Approx(0.135292416312881416).epsilon(1e-13));
    CHECK(airy_ai_real(-2) == Approx(0.227407428201685576).epsilon(1e-12));
    CHECK(airy_ai_real(5) == Approx(1.08344428136074417e-4).epsilon(1e-11));
    CHECK(airy_ai_real(-10) == Approx(0.0402412384864431907).epsilon(1e-10));
    check_close(airy_ai(cplx(1, 0)), 0.135292416312881416, 1e-13);
}

TEST_CASE("Gaussian STFT closed form") {
    auto o = generate_oracle("gaussian");
    StftEvaluator cf(o.u), q(o.u, Window::gaussian(), StftMethod::Quadrature);
    CHECK(cf.method() == StftMethod::ClosedForm);
    // (2 pi)^{-1/2} exp(-(x^2 + xi^2)/4 - i x xi / 2)
    for (double x : {-3.0, -0.5, 0.0, 0.7, 2.5})
        for (double xi : {-2.0, 0.0, 1.3, 4.0}) {
            cplx want = kInvSqrt2Pi * std::exp(cplx(-(x * x + xi * xi) / 4, -x * xi / 2));
            check_close(cf.eval(x, xi), want, 1e-13);
            check_close(q.eval(x, xi), want, 1e-11);
        }
    // mpmath quadrature of the defining integral
    check_close(cf.eval(0.7, 1.3), cplx(0.207788798105859886, -0.101657918059411040), 1e-13);
    check_close(cf.eval(-1.5, 2.0), cplx(0.00591524603580755509, 0.0834133684417650960), 1e-13);
}

TEST_CASE("chirp and Airy STFT values") {
    StftEvaluator c2(generate_oracle("chirp2").u);
    check_close(c2.eval(1.0, 2.0), cplx(0.453079774844065078, -0.216868554265636444), 1e-12);
    check_close(c2.eval(-3.0, -1.0), cplx(0.000710060138441488778, 0.0412258309207208681), 1e-12);
    check_close(c2.eval(2.0, -4.0), cplx(0.000809400168337827774, -0.000203594876496258382), 1e-12);

    auto airy = generate_oracle("airy").u;
    StftEvaluator ca(airy), qa(airy, Window::gaussian(), StftMethod::Quadrature);
    check_close(ca.eval(-2.0, 0.5), cplx(0.132415881647769303, 0.0332117488001163710), 1e-11);
    check_close(ca.eval(1.0, 0.0), cplx(0.134123385419065397, 0.0), 1e-11);
    check_close(ca.eval(-6.0, 2.5), cplx(0.124035477380311704, -0.0513199609853557511), 1e-11);
    check_close(qa.eval(-6.0, 2.5), cplx(0.124035477380311704, -0.0513199609853557511), 1e-9);
}

TEST_CASE("delta derivative STFT") {
    auto u = generate_oracle("delta", R"({"alpha": 1})").u;
    StftEvaluator e(u);
    // |V| = (2 pi)^{-1/2} |x phi(x) i + xi phi(x)| with phi the standard Gaussian
    for (double x : {-1.0, 0.0, 0.4, 2.0})
        for (double xi : {-3.0, 0.5, 7.0}) {
            double want = kInvSqrt2Pi * std::pow(kPi, -0.25) * std::exp(-x * x / 2) * std::hypot(x, xi);
            CHECK(std::abs(e.eval(x, xi)) == Approx(want).epsilon(1e-12));
        }
    auto d0 = generate_oracle("delta").u;
    StftEvaluator e0(d0);
    CHECK(std::abs(e0.eval(0, 1e3)) == Approx(kInvSqrt2Pi * std::pow(kPi, -0.25)).epsilon(1e-12));
}

TEST_CASE("constant signal STFT equals the window transform") {
    StftEvaluator e(generate_oracle("one").u);
    for (double x : {-5.0, 0.0, 3.0})
        for (double xi : {-1.0, 0.0, 2.0})
            CHECK(std::abs(e.eval(x, xi)) == Approx(std::pow(kPi, -0.25) * std::exp(-xi * xi / 2)).epsilon(1e-12));
}

TEST_CASE("STFT grid inversion and Moyal identity") {
    const int n = 512;
    const double dt = 0.1;
    for (auto name : {"gaussian", "hermite"}) {
        Signal u = sample(generate_oracle(name, name == std::string("hermite") ? R"({"k": 1})" : "{}").u,
                          -0.5 * n * dt, dt, n);
        for (auto w : {Window::gaussian(), Window::hermite(1)}) {
            Signal r = invert(stft_grid(u, w), w);
            double err = 0;
            for (int k = n / 8; k < n - n / 8; ++k) err = std::max(err, std::abs(r.v[k] - u.v[k]));
            CHECK(err < 1e-8);
        }
    }
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 10; ++trial) {
        Signal u = packet_sum(rng, n, dt);
        double nu = 0;
        for (auto& v : u.v) nu += std::norm(v) * dt;
        double ratio = stft_energy(stft_grid(u, Window::gaussian())) / nu;
        CHECK(ratio == Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("metaplectic actions") {
    // F delta = (2 pi)^{-1/2}
    auto fd = metaplectic(generate_oracle("delta").u, MetaplecticKind::Fourier);
    auto one = generate_oracle("one").u;
    StftEvaluator a(fd), b(one);
    for (double x : {-2.0, 1.0})
        for (double xi : {0.0, 0.8}) check_close(a.eval(x, xi), kInvSqrt2Pi * b.eval(x, xi), 1e-12);

    auto g = generate_oracle("gaussian").u;
    auto same = metaplectic(g, MetaplecticKind::Dilate, 1.0);
    check_close(StftEvaluator(same).eval(0.3, -1.1), StftEvaluator(g).eval(0.3, -1.1), 1e-13);

    auto ch = metaplectic(one, MetaplecticKind::ChirpMul, 2.0);
    auto pc = generate_oracle("poly_chirp", R"({"coeffs": [0, 0, 1.0]})").u;
    for (double y : {-2.0, 0.3, 1.5}) check_close(ch->value(y), pc->value(y), 1e-14);
    check_close(StftEvaluator(ch).eval(1.0, 2.5), StftEvaluator(pc).eval(1.0, 2.5), 1e-12);
}

TEST_CASE("oracle ground truths") {
    auto t = generate_oracle("chirp2").truth(1);
    CHECK(t.exact);
    CHECK(t.contains(std::atan2(2.0, 1.0) * 180 / kPi, 0.01));
    CHECK(t.contains(180 + std::atan2(2.0, 1.0) * 180 / kPi, 0.01));
    CHECK_FALSE(t.contains(0, 5));

    // (x, 3 x^2) at s = 2 projects with 3 a^2 = sqrt(1 - a^2)... solve a^2 + 9 a^4 = 1
    double a2 = (-1 + std::sqrt(1 + 36.0)) / 18, a = std::sqrt(a2);
    double th = std::atan2(3 * a2, a) * 180 / kPi;
    auto t3 = generate_oracle("chirp3").truth(2);
    CHECK(t3.contains(th, 0.01));
    CHECK(t3.contains(180 - th, 0.01));

    auto ta = generate_oracle("airy").truth(1);
    CHECK(ta.contains(180, 0.01));
    CHECK_FALSE(ta.contains(0, 5));
    auto th2 = generate_oracle("airy").truth(0.5);
    for (double sg : {1.0, -1.0}) {
        PhasePoint p = project(PhasePoint::d1(-1, sg), 0.5);
        CHECK(th2.contains(direction_angle(p.x[0], p.xi[0]), 0.01));
    }

    CHECK(generate_oracle("gaussian").truth(2).angles.empty());
    CHECK_THROWS_AS(generate_oracle("nope"), CatalogError);
    CHECK_THROWS_AS(generate_oracle("chirp2", "[1]"), CatalogError);
    CHECK(oracle_catalog().size() >= 10);
}

TEST_CASE("signal files") {
    Signal s;
    s.t0 = -1.25;
    s.dt = 0.125;
    for (int k = 0; k < 21; ++k) s.v.emplace_back(std::sin(0.1 * k) / 3, -1.0 / (k + 1));
    auto dir = std::filesystem::temp_directory_path();
    auto csv = (dir / "aniso_sig_test.csv").string(), bin = (dir / "aniso_sig_test.bin").string();
    s.write_csv(csv, "hello\nworld");
    s.write_binary(bin);
    for (const Signal& r : {Signal::read_csv(csv), Signal::read_binary(bin)}) {
        REQUIRE(r.size() == s.size());
        CHECK(r.t0 == s.t0);
        CHECK(r.dt == Approx(s.dt).epsilon(1e-15));
        for (size_t k = 0; k < s.size(); ++k) CHECK(r.v[k] == s.v[k]);
    }
    std::remove(csv.c_str());
    std::remove(bin.c_str());
}

TEST_CASE("edge taper") {
    Signal s;
    s.t0 = -8;
    s.dt = 0.5;
    s.v.assign(33, 1.0);
    Signal t = edge_tapered(s, 0.25);
    CHECK(t.v.front() == cplx(0));
    CHECK(t.v.back() == cplx(0));
    CHECK(t.v[16] == cplx(1));
    CHECK(t.v[8] == cplx(1));
    CHECK(std::abs(t.v[2]) < 1);
    CHECK_THROWS_AS(edge_tapered(s, 0.7), DomainError);
}
