#include "aniso/quadrature.hpp"

#include <cmath>
#include <vector>

namespace ag {

const GaussLegendre16& gl16() {
    static const GaussLegendre16 rule = [] {
        GaussLegendre16 r;
        const int n = 16;
        for (int i = 0; i < n; ++i) {
            double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
            double dp = 0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1);
                double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-16) break;
            }
            r.x[i] = x;
            r.w[i] = 2 / ((1 - x * x) * dp * dp);
        }
        return r;
    }();
    return rule;
}

PanelResult integrate_panels(const std::function<cplx(double)>& f, double a, double b,
                             const std::function<double(double, double)>& rate, double phase_cap,
                             long panel_cap) {
    const auto& g = gl16();
    PanelResult res;
    std::vector<std::pair<double, double>> stack = {{a, b}};
    while (!stack.empty()) {
        auto [lo, hi] = stack.back();
        stack.pop_back();
        if (rate(lo, hi) * (hi - lo) > phase_cap && hi - lo > 1e-12 * (1 + std::fabs(lo))) {
            double mid = 0.5 * (lo + hi);
            stack.push_back({mid, hi});
            stack.push_back({lo, mid});
            if (res.panels + static_cast<long>(stack.size()) > panel_cap) {
                res.capped = true;
                return res;
            }
            continue;
        }
        double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        for (int i = 0; i < 16; ++i) {
            cplx v = f(c + h * g.x[i]);
            res.value += h * g.w[i] * v;
            res.abs_sum += h * g.w[i] * std::abs(v);
        }
        if (++res.panels > panel_cap) {
            res.capped = true;
            return res;
        }
    }
    return res;
}

}  // namespace ag
