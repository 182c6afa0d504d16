#include "aniso/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ag {

PhasePoint::PhasePoint(std::vector<double> x_, std::vector<double> xi_)
    : x(std::move(x_)), xi(std::move(xi_)) {
    if (x.size() != xi.size() || x.empty())
        throw DomainError("phase point: x and xi must have equal nonzero dimension");
    for (double v : x)
        if (!std::isfinite(v)) throw DomainError("phase point: non-finite entry");
    for (double v : xi)
        if (!std::isfinite(v)) throw DomainError("phase point: non-finite entry");
}

double PhasePoint::norm_x() const {
    double r = 0;
    for (double v : x) r += v * v;
    return std::sqrt(r);
}

double PhasePoint::norm_xi() const {
    double r = 0;
    for (double v : xi) r += v * v;
    return std::sqrt(r);
}

double PhasePoint::norm() const { return std::hypot(norm_x(), norm_xi()); }

double kappa(double t) {
    if (!(t > 0)) throw DomainError("kappa: t must be positive");
    return t <= 1 ? 1.0 : std::exp2(t - 1);
}

static void check_s(double s) {
    if (!(s > 0) || !std::isfinite(s)) throw DomainError("s must be positive");
}

double mu_weight(double ax, double axi, double s) {
    check_s(s);
    return 1.0 + ax + std::pow(axi, 1.0 / s);
}

double mu_weight(const PhasePoint& z, double s) { return mu_weight(z.norm_x(), z.norm_xi(), s); }

double solve_lambda(double a, double b, double s, double tol) {
    check_s(s);
    if (!(tol > 0)) throw DomainError("solve_lambda: tol must be positive");
    if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("solve_lambda: non-finite point");
    a = std::fabs(a);
    b = std::fabs(b);
    if (a == 0 && b == 0) throw DomainError("solve_lambda: zero point");
    if (b == 0) return a;
    if (a == 0) return std::pow(b, 1.0 / s);
    if (s == 1) return std::hypot(a, b);

    // residual in L = log(lambda), strictly decreasing
    const double la = std::log(a), lb = std::log(b);
    auto f = [&](double L) {
        return std::exp(2 * (la - L)) + std::exp(2 * (lb - s * L)) - 1.0;
    };
    auto fp = [&](double L) {
        return -2 * std::exp(2 * (la - L)) - 2 * s * std::exp(2 * (lb - s * L));
    };
    // each term is at most 1 at the root, and both at most 1/2 beyond hi
    double lo = std::max(la, lb / s);
    double hi = std::max(la + 0.5 * std::log(2.0), (lb + 0.5 * std::log(2.0)) / s);
    double L = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double r = f(L);
        if (r == 0) break;
        if (r > 0) lo = L; else hi = L;
        double step = -r / fp(L);
        double Ln = L + step;
        if (!(Ln > lo && Ln < hi)) Ln = 0.5 * (lo + hi);
        if (std::fabs(Ln - L) <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(L))) {
            L = Ln;
            break;
        }
        L = Ln;
        if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(L))) break;
    }
    double lam = std::exp(L);
    if (std::fabs(f(L)) > tol) {
        // polish by bisection on the bracket
        for (int it = 0; it < 200 && std::fabs(f(L)) > tol; ++it) {
            L = 0.5 * (lo + hi);
            if (f(L) > 0) lo = L; else hi = L;
        }
        lam = std::exp(L);
    }
    return lam;
}

double solve_lambda(const PhasePoint& z, double s, double tol) {
    return solve_lambda(z.norm_x(), z.norm_xi(), s, tol);
}

PhasePoint project(const PhasePoint& z, double s, double tol) {
    double lam = solve_lambda(z, s, tol);
    PhasePoint p = z;
    double lx = 1.0 / lam, lxi = std::pow(lam, -s);
    for (double& v : p.x) v *= lx;
    for (double& v : p.xi) v *= lxi;
    return p;
}

void project1(double x, double xi, double s, double& px, double& pxi) {
    double lam = solve_lambda(x, xi, s);
    px = x / lam;
    pxi = xi * std::pow(lam, -s);
}

PhasePoint ray(const PhasePoint& z, double lambda, double s) {
    if (!(lambda > 0)) throw DomainError("ray: lambda must be positive");
    check_s(s);
    PhasePoint r = z;
    double ls = std::pow(lambda, s);
    for (double& v : r.x) v *= lambda;
    for (double& v : r.xi) v *= ls;
    return r;
}

SConicNbhd::SConicNbhd(PhasePoint c, double eps, double s_, Kind k)
    : center(std::move(c)), epsilon(eps), s(s_), kind(k) {
    check_s(s);
    if (!(epsilon > 0)) throw DomainError("nbhd: epsilon must be positive");
    if (std::fabs(center.norm() - 1.0) > 1e-9) throw DomainError("nbhd: center must be on the unit sphere");
}

static double dist2(const PhasePoint& a, const PhasePoint& b) {
    double r = 0;
    for (size_t i = 0; i < a.x.size(); ++i) {
        double dx = a.x[i] - b.x[i], dxi = a.xi[i] - b.xi[i];
        r += dx * dx + dxi * dxi;
    }
    return r;
}

double ray_distance(const PhasePoint& z0, const PhasePoint& z, double s, const GeometryConfig& cfg) {
    if (z.is_zero()) throw DomainError("ray_distance: zero point");
    if (z0.dim() != z.dim()) throw DomainError("ray_distance: dimension mismatch");
    double L0 = -std::log(solve_lambda(z, s, cfg.lambda_tol));
    auto h = [&](double L) { return dist2(ray(z, std::exp(L), s), z0); };
    // coarse scan then golden section on the best bracket
    const int M = 41;
    double a = L0 - cfg.tilde_span, b = L0 + cfg.tilde_span;
    double step = (b - a) / (M - 1);
    int best = 0;
    double hb = h(a);
    for (int i = 1; i < M; ++i) {
        double v = h(a + i * step);
        if (v < hb) hb = v, best = i;
    }
    double lo = a + std::max(0, best - 1) * step, hi = a + std::min(M - 1, best + 1) * step;
    const double g = 0.5 * (std::sqrt(5.0) - 1);
    double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    double fc = h(c), fd = h(d);
    for (int it = 0; it < cfg.tilde_iters && hi - lo > 1e-14; ++it) {
        if (fc < fd) {
            hi = d; d = c; fd = fc; c = hi - g * (hi - lo); fc = h(c);
        } else {
            lo = c; c = d; fc = fd; d = lo + g * (hi - lo); fd = h(d);
        }
    }
    return std::sqrt(std::min({hb, fc, fd}));
}

bool contains(const SConicNbhd& nb, const PhasePoint& z, const GeometryConfig& cfg) {
    if (z.is_zero()) throw DomainError("contains: zero point");
    if (z.dim() != nb.center.dim()) throw DomainError("contains: dimension mismatch");
    if (nb.kind == SConicNbhd::Kind::Projection) {
        PhasePoint p = project(z, nb.s, cfg.lambda_tol);
        return dist2(p, nb.center) < nb.epsilon * nb.epsilon;
    }
    return ray_distance(nb.center, z, nb.s, cfg) < nb.epsilon;
}

double direction_angle(double x, double xi) {
    double a = std::atan2(xi, x) * 180.0 / kPi;
    return a < 0 ? a + 360.0 : a;
}

void angle_point(double deg, double& x, double& xi) {
    double r = deg * kPi / 180.0;
    x = std::cos(r);
    xi = std::sin(r);
}

double angle_diff(double a, double b) {
    double d = std::fmod(std::fabs(a - b), 360.0);
    return d > 180.0 ? 360.0 - d : d;
}

}  // namespace ag
