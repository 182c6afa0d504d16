#include "aniso/wavefront.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "aniso/geometry.hpp"
#include "aniso/parallel.hpp"
#include "json.hpp"

namespace ag {

namespace {

using ojson = nlohmann::ordered_json;
const double kNegInf = -std::numeric_limits<double>::infinity();
const double kDeg = kPi / 180;

ojson num_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

struct CapValue {
    double v = kNegInf;
    bool valid = true;
    bool floored = false;
};

CapValue eval_dir(const StftEvaluator& e, double theta, double lambda, double s) {
    double x = lambda * std::cos(theta), xi = std::pow(lambda, s) * std::sin(theta);
    StftSample r = e.log_eval(x, xi);
    CapValue c;
    c.valid = r.valid;
    c.v = r.logv.real();
    c.floored = r.floored;
    return c;
}

bool cap_valid(const StftEvaluator& e, const std::vector<double>& thetas, double lambda, double s) {
    for (double th : thetas)
        if (!e.valid(lambda * std::cos(th), std::pow(lambda, s) * std::sin(th))) return false;
    return true;
}

// sup over the arc [lo, hi] of log|V| at fixed lambda: coarse scan, then golden section
CapValue cap_sup(const StftEvaluator& e, double lo, double hi, double lambda, double s, int coarse, int iters) {
    std::vector<double> th(coarse);
    std::vector<CapValue> val(coarse);
    int best = 0;
    for (int i = 0; i < coarse; ++i) {
        th[i] = coarse == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (coarse - 1);
        val[i] = eval_dir(e, th[i], lambda, s);
        if (!val[i].valid) return val[i];
        if (val[i].v > val[best].v) best = i;
    }
    CapValue top = val[best];
    if (coarse < 3 || iters <= 0 || top.v == kNegInf) return top;
    double a = th[std::max(0, best - 1)], b = th[std::min(coarse - 1, best + 1)];
    const double g = 0.5 * (std::sqrt(5.0) - 1);
    double c = b - g * (b - a), d = a + g * (b - a);
    CapValue fc = eval_dir(e, c, lambda, s), fd = eval_dir(e, d, lambda, s);
    for (int k = 0; k < iters; ++k) {
        if (!fc.valid || !fd.valid) break;
        if (fc.v > top.v) top = fc;
        if (fd.v > top.v) top = fd;
        if (fc.v >= fd.v) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = eval_dir(e, c, lambda, s);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = eval_dir(e, d, lambda, s);
        }
    }
    if (fc.valid && fc.v > top.v) top = fc;
    if (fd.valid && fd.v > top.v) top = fd;
    return top;
}

void least_squares(const std::vector<double>& X, const std::vector<double>& Y, double& slope, double& rms) {
    size_t n = X.size();
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += X[i];
        my += Y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (X[i] - mx) * (X[i] - mx);
        sxy += (X[i] - mx) * (Y[i] - my);
    }
    slope = sxy / sxx;
    double r = 0;
    for (size_t i = 0; i < n; ++i) {
        double e = Y[i] - (my + slope * (X[i] - mx));
        r += e * e;
    }
    rms = std::sqrt(r / n);
}

}  // namespace

std::string to_string(DirClass c) {
    switch (c) {
        case DirClass::Singular: return "singular";
        case DirClass::Regular: return "regular";
        default: return "inconclusive";
    }
}

DecayProfile decay_profile(const StftEvaluator& e, double angle_deg, double s, const EstimatorConfig& cfg) {
    if (!(s > 0)) throw DomainError("estimator: s must be positive");
    if (cfg.lambda_points < 2 || !(cfg.lambda_min > 0) || !(cfg.cap_radius > 0) || cfg.cap_radius > 2)
        throw DomainError("estimator: invalid configuration");
    DecayProfile P;
    P.angle = angle_deg;
    P.s = s;
    const double half = 2 * std::asin(cfg.cap_radius / 2);
    P.cap_half_angle = half / kDeg;
    const double th0 = angle_deg * kDeg, lo = th0 - half, hi = th0 + half;

    double lmax;
    if (e.method() == StftMethod::ClosedForm) {
        lmax = cfg.lambda_max > 0 ? cfg.lambda_max : std::min(cfg.x_reach, std::pow(cfg.xi_reach, 1.0 / s));
    } else {
        std::vector<double> probes = {lo, hi};
        for (int q = -4; q <= 8; ++q) {
            double ax = q * kPi / 2;
            if (ax > lo && ax < hi) probes.push_back(ax);
        }
        double upper = cfg.lambda_max > 0 ? cfg.lambda_max : cfg.lambda_search_cap;
        if (cap_valid(e, probes, upper, s)) {
            lmax = upper;
        } else if (!cap_valid(e, probes, cfg.lambda_min, s)) {
            lmax = 0;
        } else {
            double a = std::log(cfg.lambda_min), b = std::log(upper);
            for (int it = 0; it < 60; ++it) {
                double m = 0.5 * (a + b);
                (cap_valid(e, probes, std::exp(m), s) ? a : b) = m;
            }
            lmax = std::exp(a);
        }
    }
    P.lambda_max_valid = lmax;
    if (!(lmax > cfg.lambda_min)) {
        P.slope = std::numeric_limits<double>::quiet_NaN();
        return P;
    }

    const int K = cfg.lambda_points;
    for (int k = 0; k < K; ++k) {
        double lam = cfg.lambda_min * std::pow(lmax / cfg.lambda_min, double(k) / (K - 1));
        CapValue c = cap_sup(e, lo, hi, lam, s, cfg.cap_coarse, cfg.cap_refine_iters);
        P.lambda.push_back(lam);
        P.log_sup.push_back(c.v);
        P.valid.push_back(c.valid);
        P.floored.push_back(c.floored || (c.valid && c.v == kNegInf));
    }

    // fit the upper tail of the lambda range, stopping at the first floored sample;
    // a floor hit before the tail starts is a secant-slope regular direction
    const double tail_from = std::log(cfg.lambda_min) + (1 - cfg.fit_tail) * std::log(lmax / cfg.lambda_min);
    int first = -1, floor_at = -1;
    for (int k = 0; k < K; ++k) {
        if (!P.valid[k]) continue;
        if (first < 0) first = k;
        if (P.floored[k]) {
            floor_at = k;
            break;
        }
    }
    auto secant = [&](int a, int b) {
        if (a == b || P.log_sup[b] == kNegInf) return kNegInf;
        return (P.log_sup[b] - P.log_sup[a]) / (std::log(P.lambda[b]) - std::log(P.lambda[a]));
    };
    std::vector<double> X, Y;
    int tail_first = -1;
    int last = floor_at >= 0 ? floor_at : K - 1;
    for (int k = 0; k <= last; ++k) {
        if (!P.valid[k] || std::log(P.lambda[k]) < tail_from - 1e-12) continue;
        if (tail_first < 0) tail_first = k;
        X.push_back(std::log(P.lambda[k]));
        Y.push_back(P.log_sup[k]);
    }
    P.fit_points = static_cast<int>(X.size());
    P.residual = 0;
    if (first < 0) {
        P.slope = std::numeric_limits<double>::quiet_NaN();
        return P;
    }
    if (floor_at >= 0 && (tail_first < 0 || floor_at < tail_first || X.size() < 4)) {
        P.slope = secant(first, floor_at);
    } else if (floor_at >= 0 && Y.back() == kNegInf) {
        P.slope = kNegInf;
    } else if (X.size() >= 4) {
        least_squares(X, Y, P.slope, P.residual);
    } else {
        P.slope = std::numeric_limits<double>::quiet_NaN();
        return P;
    }
    if (P.slope <= -cfg.n_thresh) P.cls = DirClass::Regular;
    else if (P.slope > -cfg.n_thresh / 2 && P.residual < cfg.r_max) P.cls = DirClass::Singular;
    else P.cls = DirClass::Inconclusive;
    return P;
}

WaveFrontEstimate estimate_wavefront(const StftEvaluator& e, double s, const EstimatorConfig& cfg) {
    if (cfg.sphere_res < 4) throw DomainError("estimator: sphere resolution must be at least 4");
    WaveFrontEstimate W;
    W.s = s;
    W.cfg = cfg;
    W.dirs.resize(cfg.sphere_res);
    parallel_for(static_cast<size_t>(cfg.sphere_res), [&](size_t k) {
        W.dirs[k] = decay_profile(e, 360.0 * double(k) / cfg.sphere_res, s, cfg);
    });
    return W;
}

std::vector<double> WaveFrontEstimate::singular_angles() const {
    std::vector<double> a;
    for (auto& d : dirs)
        if (d.cls == DirClass::Singular) a.push_back(d.angle);
    return a;
}

int WaveFrontEstimate::count(DirClass c) const {
    return static_cast<int>(std::count_if(dirs.begin(), dirs.end(), [c](const DecayProfile& d) { return d.cls == c; }));
}

std::string WaveFrontEstimate::to_json(const std::string& config_json) const {
    ojson j;
    j["schema"] = "aniso-gabor/1";
    j["s"] = s;
    j["thresholds"] = {{"n_thresh", cfg.n_thresh}, {"r_max", cfg.r_max}};
    auto& arr = j["directions"] = ojson::array();
    for (auto& d : dirs) {
        ojson o;
        o["angle"] = d.angle;
        o["class"] = to_string(d.cls);
        o["slope"] = num_or_null(d.slope);
        o["residual"] = num_or_null(d.residual);
        o["lambda_max_valid"] = num_or_null(d.lambda_max_valid);
        arr.push_back(std::move(o));
    }
    j["counts"] = {{"singular", count(DirClass::Singular)},
                   {"regular", count(DirClass::Regular)},
                   {"inconclusive", count(DirClass::Inconclusive)}};
    ojson c = {{"cap_radius", cfg.cap_radius},       {"cap_coarse", cfg.cap_coarse},
               {"cap_refine_iters", cfg.cap_refine_iters}, {"lambda_min", cfg.lambda_min},
               {"lambda_max", cfg.lambda_max},       {"lambda_points", cfg.lambda_points},
               {"sphere_res", cfg.sphere_res},       {"x_reach", cfg.x_reach}, {"xi_reach", cfg.xi_reach}, {"fit_tail", cfg.fit_tail}};
    if (!config_json.empty()) c["run"] = ojson::parse(config_json);
    j["config"] = c;
    return j.dump(2);
}

std::string WaveFrontEstimate::decay_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "direction,lambda,log_abs_v\n";
    for (auto& d : dirs)
        for (size_t k = 0; k < d.lambda.size(); ++k) {
            if (!d.valid[k]) continue;
            os << d.angle << ',' << d.lambda[k] << ',';
            if (std::isfinite(d.log_sup[k])) os << d.log_sup[k];
            else os << "-inf";
            os << '\n';
        }
    return os.str();
}

// ---------------------------------------------------------------- comparisons

DirSet DirSet::from(const WaveFrontEstimate& e) {
    DirSet d;
    d.s = e.s;
    d.angles = e.singular_angles();
    d.inconclusive = e.count(DirClass::Inconclusive);
    return d;
}

DirSet DirSet::from(const GroundTruth& t) {
    DirSet d;
    d.s = t.s;
    d.angles = t.angles;
    d.exact = t.exact;
    return d;
}

DirSet DirSet::from_json(const std::string& text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const std::exception& e) {
        throw DomainError(std::string("direction set: ") + e.what());
    }
    DirSet d;
    if (!j.contains("s")) throw DomainError("direction set: missing s");
    d.s = j["s"].get<double>();
    if (j.contains("directions")) {
        for (auto& o : j["directions"]) {
            std::string c = o.value("class", "");
            if (c == "singular") d.angles.push_back(o["angle"].get<double>());
            else if (c == "inconclusive") ++d.inconclusive;
        }
    } else if (j.contains("angles")) {
        d.angles = j["angles"].get<std::vector<double>>();
        d.exact = j.value("exact", true);
    } else {
        throw DomainError("direction set: expected 'directions' or 'angles'");
    }
    return d;
}

static bool near_any(double a, const std::vector<double>& set, double tol) {
    return std::any_of(set.begin(), set.end(), [&](double b) { return angle_diff(a, b) <= tol; });
}

CompareReport compare(const DirSet& a, const DirSet& b, CompareMode mode, double tol) {
    if (std::fabs(a.s - b.s) > 1e-12) throw DomainError("compare: mismatched s");
    CompareReport r;
    r.mode = mode;
    r.tol = tol;
    r.excluded_a = a.inconclusive;
    r.excluded_b = b.inconclusive;
    for (double x : a.angles)
        if (!near_any(x, b.angles, tol)) r.unmatched_a.push_back(x);
    if (mode == CompareMode::Equal && b.exact)
        for (double x : b.angles)
            if (!near_any(x, a.angles, tol)) r.unmatched_b.push_back(x);
    r.passed = r.unmatched_a.empty() && r.unmatched_b.empty();
    return r;
}

std::string CompareReport::summary() const {
    std::ostringstream os;
    os << (passed ? "PASS" : "FAIL") << " (" << (mode == CompareMode::Subset ? "subset" : "equal") << ", tol "
       << tol << " deg): " << unmatched_a.size() << " unmatched in a, " << unmatched_b.size()
       << " unmatched in b, inconclusive excluded " << excluded_a << "/" << excluded_b;
    return os.str();
}

std::string CompareReport::to_json() const {
    ojson j;
    j["schema"] = "aniso-gabor/1";
    j["passed"] = passed;
    j["mode"] = mode == CompareMode::Subset ? "subset" : "equal";
    j["tol_deg"] = tol;
    j["unmatched_a"] = unmatched_a;
    j["unmatched_b"] = unmatched_b;
    j["inconclusive_excluded"] = {{"a", excluded_a}, {"b", excluded_b}};
    return j.dump(2);
}

DirSet map_directions(const DirSet& a, const std::function<void(double&, double&)>& f, double s_out) {
    DirSet out = a;
    out.s = s_out;
    out.angles.clear();
    for (double ang : a.angles) {
        double x, xi;
        angle_point(ang, x, xi);
        f(x, xi);
        if (x == 0 && xi == 0) continue;
        double px, pxi;
        project1(x, xi, s_out, px, pxi);
        out.angles.push_back(direction_angle(px, pxi));
    }
    return out;
}

// ---------------------------------------------------------------- invariance

std::vector<InvarianceCheck> invariance_suite(const DistPtr& u, double s, const EstimatorConfig& cfg,
                                              const InvarianceOptions& opt) {
    auto est = [&](const DistPtr& v, double ss, const Window& w = Window::gaussian()) {
        return DirSet::from(estimate_wavefront(StftEvaluator(v, w), ss, cfg));
    };
    std::vector<InvarianceCheck> out;
    auto record = [&](const std::string& name, const CompareReport& r, const std::string& extra = "") {
        out.push_back({name, r.passed, r.summary() + extra});
    };
    DirSet base = est(u, s);
    record("window_swap", compare(est(u, s, Window::hermite(1)), base, CompareMode::Equal, opt.tol));
    record("translation", compare(est(u->translated(opt.translate), s), base, CompareMode::Equal, opt.tol));
    record("modulation", compare(est(u->modulated(opt.modulate), s), base, CompareMode::Equal, opt.tol));

    DirSet dual = est(u, 1.0 / s);
    DirSet J = map_directions(dual, [](double& x, double& xi) {
        double t = x;
        x = xi;
        xi = -t;
    }, s);
    record("fourier", compare(est(u->fourier(), s), J, CompareMode::Equal, opt.tol));

    const double A = opt.dilate;
    DirSet dil = map_directions(base, [A](double& x, double& xi) {
        x /= A;
        xi *= A;
    }, s);
    record("dilation", compare(est(u->dilated(A), s), dil, CompareMode::Equal, opt.tol));

    const double B = opt.chirp;
    DistPtr v = u->chirp_multiplied(B);
    if (std::fabs(s - 1) < 1e-12) {
        DirSet sh = map_directions(base, [B](double& x, double& xi) { xi += B * x; }, 1.0);
        record("chirp", compare(est(v, 1.0), sh, CompareMode::Equal, opt.tol));
    } else if (s > 1) {
        record("chirp", compare(est(v, s), base, CompareMode::Equal, opt.tol));
    } else {
        // one-sided: (x, xi) in WF^s(u) with x != 0 implies (x, B x) in WF^1(v)
        DirSet src = base;
        src.angles.clear();
        for (double a : base.angles) {
            double x, xi;
            angle_point(a, x, xi);
            if (std::fabs(x) > std::sin(opt.tol * kDeg)) src.angles.push_back(a);
        }
        DirSet target = map_directions(src, [B](double&, double& xi) { xi = 0; }, 1.0);
        target = map_directions(target, [B](double& x, double& xi) { xi = B * x; }, 1.0);
        record("chirp", compare(target, est(v, 1.0), CompareMode::Subset, opt.tol), " (one-sided implication)");
    }
    return out;
}

}  // namespace ag
