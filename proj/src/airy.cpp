#include "aniso/airy.hpp"

#include <cmath>

#include "aniso/quadrature.hpp"

namespace ag {

namespace {

constexpr double kAi0 = 0.355028053887817239260;
constexpr double kAip0 = -0.258819403792806798405;
constexpr double kSwitch = 8.0;
constexpr double kSmall = 2.0;

AiryLog maclaurin(cplx z) {
    cplx z3 = z * z * z;
    cplx f = 1, g = z, fp = 0, gp = 1;
    cplx tf = 1, tg = z, dfp = z * z * 0.5, tgp = 1;
    fp = dfp;
    for (int k = 1; k < 400; ++k) {
        tf *= z3 / double(3 * k * (3 * k - 1));
        tg *= z3 / double((3 * k + 1) * (3 * k));
        tgp *= z3 / double(3 * k * (3 * k - 2));
        if (k >= 2) dfp *= z3 / double(3 * (k - 1) * (3 * k - 1));
        f += tf;
        g += tg;
        gp += tgp;
        if (k >= 2) fp += dfp;
        double m = std::abs(tf) + std::abs(tg) + std::abs(tgp) + std::abs(dfp);
        if (m < 1e-18 * (std::abs(f) + std::abs(g) + std::abs(fp) + std::abs(gp))) break;
    }
    return {0.0, kAi0 * f + kAip0 * g, kAi0 * fp + kAip0 * gp};
}

// |arg z| <= 2pi/3 and |z| >= kSwitch
AiryLog asymptotic(cplx z) {
    cplx sq = std::sqrt(z);
    cplx zeta = 2.0 / 3.0 * z * sq;
    cplx q = std::sqrt(sq);  // z^{1/4}
    cplx su = 1, sv = 1;
    double u = 1;
    cplx zk = 1;
    double last = 1e300;
    for (int k = 1; k < 60; ++k) {
        u *= (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / ((2.0 * k - 1) * 216.0 * k);
        double v = -(6.0 * k + 1) / (6.0 * k - 1) * u;
        zk *= -1.0 / zeta;
        double mag = u * std::abs(zk);
        if (mag > last) break;  // optimal truncation
        last = mag;
        su += u * zk;
        sv += v * zk;
        if (mag < 1e-18) break;
    }
    const double c = 0.5 / std::sqrt(kPi);
    return {-zeta, c * su / q, -c * q * sv};
}

// combine -w1 * A(w z) - w2 * A(w^2 z) style terms in log form
AiryLog combine(const AiryLog& a, cplx ca, cplx cap, const AiryLog& b, cplx cb, cplx cbp) {
    const AiryLog& hi = a.scale.real() >= b.scale.real() ? a : b;
    cplx ra = std::exp(a.scale - hi.scale), rb = std::exp(b.scale - hi.scale);
    return {hi.scale, ca * a.ai * ra + cb * b.ai * rb, cap * a.aip * ra + cbp * b.aip * rb};
}

// integrate y'' = z y radially inward from |z| = kSwitch; Ai grows inward in this sector
AiryLog inward(cplx z) {
    double r = std::abs(z);
    cplx c = z / r * kSwitch;
    AiryLog s = asymptotic(c);
    cplx e = std::exp(s.scale);
    cplx y0 = e * s.ai, y1 = e * s.aip;
    int steps = static_cast<int>(std::ceil((kSwitch - r) / 0.25));
    cplx h = (z - c) / double(steps);
    cplx a[72];
    for (int i = 0; i < steps; ++i) {
        // Taylor coefficients about c: (k+2)(k+1) a_{k+2} = c a_k + a_{k-1}
        a[0] = y0;
        a[1] = y1;
        a[2] = c * y0 * 0.5;
        for (int k = 1; k < 70; ++k) a[k + 2] = (c * a[k] + a[k - 1]) / double((k + 2) * (k + 1));
        cplx sy = 0, sd = 0, hk = 1;
        for (int k = 0; k < 72; ++k) {
            sy += a[k] * hk;
            if (k + 1 < 72) sd += double(k + 1) * a[k + 1] * hk;
            hk *= h;
        }
        y0 = sy;
        y1 = sd;
        c += h;
    }
    return {0.0, y0, y1};
}

}  // namespace

AiryLog airy_log(cplx z) {
    double r = std::abs(z);
    double ph = std::arg(z);
    if (r <= kSmall) return maclaurin(z);
    if (r < kSwitch) {
        if (std::fabs(ph) <= kPi / 3) return inward(z);
        return maclaurin(z);
    }
    if (std::fabs(ph) <= 2 * kPi / 3) return asymptotic(z);
    const cplx w = std::polar(1.0, 2 * kPi / 3);
    if (ph > 0) {
        // Ai(z) = -w Ai(w z) - w^2 Ai(w^2 z)
        AiryLog a = asymptotic(w * z), b = asymptotic(w * w * z);
        return combine(a, -w, -w * w, b, -w * w, -w);
    }
    cplx wb = std::conj(w);
    AiryLog a = asymptotic(wb * z), b = asymptotic(wb * wb * z);
    return combine(a, -wb, -wb * wb, b, -wb * wb, -wb);
}

cplx airy_ai(cplx z) {
    AiryLog a = airy_log(z);
    return std::exp(a.scale) * a.ai;
}

cplx airy_aip(cplx z) {
    AiryLog a = airy_log(z);
    return std::exp(a.scale) * a.aip;
}

double airy_ai_real(double x) {
    if (std::fabs(x) >= kSwitch) return airy_ai(cplx(x, 0)).real();
    // Ai(x) = (2 pi)^{-1} int exp(i((t + ic)^3/3 + x (t + ic))) dt, c on the descent side
    double c = std::sqrt(std::max(x, 1.0));
    auto f = [&](double t) {
        cplx w(t, c);
        return std::exp(cplx(0, 1) * (w * w * w / 3.0 + x * w));
    };
    double T = std::sqrt(45.0 / c);
    auto rate = [&](double a, double b) {
        double m = std::max(std::fabs(a), std::fabs(b));
        return m * m + c * c + std::fabs(x);
    };
    PanelResult res = integrate_panels(f, -T, T, rate, kPi / 4, 1 << 20);
    return res.value.real() / (2 * kPi);
}

}  // namespace ag
