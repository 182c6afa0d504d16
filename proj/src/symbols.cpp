#include "aniso/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "json.hpp"

namespace ag {

// ---------------------------------------------------------------- Poly

Poly Poly::constant(int dim, cplx c) {
    Poly p(dim);
    p.add(std::vector<int>(dim, 0), std::vector<int>(dim, 0), c);
    return p;
}

Poly Poly::monomial(const std::vector<int>& ax, const std::vector<int>& axi, cplx c) {
    Poly p(static_cast<int>(ax.size()));
    p.add(ax, axi, c);
    return p;
}

void Poly::add(const std::vector<int>& ax, const std::vector<int>& axi, cplx c) {
    if (static_cast<int>(ax.size()) != d_ || static_cast<int>(axi.size()) != d_)
        throw DomainError("poly: exponent dimension mismatch");
    Key k(ax);
    k.insert(k.end(), axi.begin(), axi.end());
    for (int e : k)
        if (e < 0) throw DomainError("poly: negative exponent");
    if (c == cplx(0)) return;
    auto it = c_.find(k);
    if (it == c_.end()) {
        c_.emplace(std::move(k), c);
    } else {
        it->second += c;
        if (it->second == cplx(0)) c_.erase(it);
    }
}

void Poly::prune() {
    for (auto it = c_.begin(); it != c_.end();) {
        if (it->second == cplx(0)) it = c_.erase(it); else ++it;
    }
}

int Poly::degree() const {
    int deg = 0;
    for (auto& [k, c] : c_) {
        int t = 0;
        for (int e : k) t += e;
        deg = std::max(deg, t);
    }
    return deg;
}

cplx Poly::coeff(const std::vector<int>& ax, const std::vector<int>& axi) const {
    Key k(ax);
    k.insert(k.end(), axi.begin(), axi.end());
    auto it = c_.find(k);
    return it == c_.end() ? cplx(0) : it->second;
}

Poly& Poly::operator+=(const Poly& o) {
    if (o.d_ != d_) throw DomainError("poly: dimension mismatch");
    for (auto& [k, c] : o.c_) c_[k] += c;
    prune();
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    if (o.d_ != d_) throw DomainError("poly: dimension mismatch");
    for (auto& [k, c] : o.c_) c_[k] -= c;
    prune();
    return *this;
}

Poly& Poly::operator*=(cplx c) {
    for (auto& [k, v] : c_) v *= c;
    prune();
    return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
    if (a.d_ != b.d_) throw DomainError("poly: dimension mismatch");
    Poly r(a.d_);
    for (auto& [ka, ca] : a.c_)
        for (auto& [kb, cb] : b.c_) {
            Poly::Key k(ka.size());
            for (size_t i = 0; i < k.size(); ++i) k[i] = ka[i] + kb[i];
            r.c_[k] += ca * cb;
        }
    r.prune();
    return r;
}

bool Poly::approx_equal(const Poly& o, double tol) const {
    Poly d = *this - o;
    for (auto& [k, c] : d.c_)
        if (std::abs(c) > tol) return false;
    return true;
}

Poly Poly::derivative(const std::vector<int>& alpha, const std::vector<int>& beta) const {
    if (static_cast<int>(alpha.size()) != d_ || static_cast<int>(beta.size()) != d_)
        throw DomainError("poly: multi-index dimension mismatch");
    Key ord(alpha);
    ord.insert(ord.end(), beta.begin(), beta.end());
    Poly r(d_);
    for (auto& [k, c] : c_) {
        Key nk = k;
        cplx f = c;
        bool zero = false;
        for (size_t i = 0; i < k.size() && !zero; ++i) {
            if (ord[i] > k[i]) { zero = true; break; }
            for (int j = 0; j < ord[i]; ++j) f *= double(k[i] - j);
            nk[i] = k[i] - ord[i];
        }
        if (!zero) r.c_[nk] += f;
    }
    r.prune();
    return r;
}

Poly Poly::conj() const {
    Poly r(*this);
    for (auto& [k, c] : r.c_) c = std::conj(c);
    return r;
}

Poly Poly::swap_variables() const {
    Poly r(d_);
    for (auto& [k, c] : c_) {
        Key nk(k.size());
        for (int i = 0; i < d_; ++i) {
            nk[i] = k[d_ + i];
            nk[d_ + i] = k[i];
        }
        r.c_[nk] = c;
    }
    return r;
}

static double ipow(double b, int e) {
    double r = 1;
    while (e > 0) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

cplx Poly::eval(std::span<const double> x, std::span<const double> xi) const {
    if (static_cast<int>(x.size()) != d_ || static_cast<int>(xi.size()) != d_)
        throw DomainError("poly: evaluation dimension mismatch");
    cplx r = 0;
    for (auto& [k, c] : c_) {
        double m = 1;
        for (int i = 0; i < d_; ++i) m *= ipow(x[i], k[i]) * ipow(xi[i], k[d_ + i]);
        r += c * m;
    }
    return r;
}

cplx Poly::eval1(double x, double xi) const {
    cplx r = 0;
    for (auto& [k, c] : c_) r += c * (ipow(x, k[0]) * ipow(xi, k[1]));
    return r;
}

std::string Poly::to_json() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (auto& [k, c] : c_) {
        nlohmann::ordered_json t;
        t["ax"] = std::vector<int>(k.begin(), k.begin() + d_);
        t["aξ"] = std::vector<int>(k.begin() + d_, k.end());
        t["re"] = c.real();
        t["im"] = c.imag();
        arr.push_back(t);
    }
    return arr.dump();
}

Poly Poly::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw DomainError(std::string("poly json: ") + e.what());
    }
    if (j.is_object() && j.contains("terms")) j = j["terms"];
    if (!j.is_array() || j.empty()) throw DomainError("poly json: expected a nonempty term list");
    int d = -1;
    Poly p(1);
    for (auto& t : j) {
        const char* kxi = t.contains("aξ") ? "aξ" : "axi";
        if (!t.contains("ax") || !t.contains(kxi)) throw DomainError("poly json: term needs ax and aξ");
        auto ax = t["ax"].get<std::vector<int>>();
        auto axi = t[kxi].get<std::vector<int>>();
        if (d < 0) {
            d = static_cast<int>(ax.size());
            p = Poly(d);
        }
        double re = t.value("re", 0.0), im = t.value("im", 0.0);
        p.add(ax, axi, cplx(re, im));
    }
    return p;
}

// ---------------------------------------------------------------- Symbol

Symbol Symbol::polynomial(Poly p, double m, double s) {
    if (!(s > 0)) throw DomainError("symbol: s must be positive");
    Symbol a;
    a.dim_ = p.dim();
    a.m_ = m;
    a.s_ = s;
    a.poly_ = std::make_shared<const Poly>(std::move(p));
    return a;
}

Symbol Symbol::callable(int dim, Fn f, double m, double s, DerivOptions opt) {
    if (!(s > 0)) throw DomainError("symbol: s must be positive");
    if (dim < 1) throw DomainError("symbol: dimension must be positive");
    Symbol a;
    a.dim_ = dim;
    a.m_ = m;
    a.s_ = s;
    a.opt_ = opt;
    a.fn_ = std::make_shared<const Fn>(std::move(f));
    return a;
}

Symbol Symbol::callable1(std::function<cplx(double, double)> f, double m, double s, DerivOptions opt) {
    return callable(
        1, [f = std::move(f)](std::span<const double> x, std::span<const double> xi) { return f(x[0], xi[0]); },
        m, s, opt);
}

const Poly& Symbol::poly() const {
    if (!poly_) throw DomainError("symbol is not polynomial");
    return *poly_;
}

Symbol Symbol::with_class(double m, double s) const {
    Symbol r = *this;
    r.m_ = m;
    r.s_ = s;
    return r;
}

Symbol Symbol::with_deriv_options(DerivOptions opt) const {
    Symbol r = *this;
    r.opt_ = opt;
    return r;
}

cplx Symbol::eval(std::span<const double> x, std::span<const double> xi) const {
    if (poly_) return poly_->eval(x, xi);
    return (*fn_)(x, xi);
}

cplx Symbol::eval1(double x, double xi) const {
    if (poly_) return poly_->eval1(x, xi);
    return (*fn_)(std::span<const double>(&x, 1), std::span<const double>(&xi, 1));
}

static double binom(int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

cplx Symbol::derivative(const std::vector<int>& alpha, const std::vector<int>& beta, const PhasePoint& z) const {
    if (static_cast<int>(alpha.size()) != dim_ || static_cast<int>(beta.size()) != dim_ || z.dim() != dim_)
        throw DomainError("derivative: dimension mismatch");
    if (poly_) return poly_->derivative(alpha, beta).eval(z);
    int k = 0;
    for (int v : alpha) k += v;
    for (int v : beta) k += v;
    if (k > opt_.max_order) throw OrderOverflow("derivative: order exceeds the configured maximum");
    if (k == 0) return eval(z.x, z.xi);

    double lam = z.is_zero() ? 1.0 : solve_lambda(z, s_);
    double sc = std::max(1.0, lam);
    // step grows with order so rounding stays below truncation
    double hk = std::max(opt_.h0, std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (k + 2)));
    double hx = hk * sc, hxi = hk * std::pow(sc, s_);

    std::vector<int> ord(alpha);
    ord.insert(ord.end(), beta.begin(), beta.end());
    std::vector<int> active;
    for (int i = 0; i < 2 * dim_; ++i)
        if (ord[i] > 0) active.push_back(i);

    std::vector<double> px(z.x), pxi(z.xi);
    std::vector<int> idx(active.size(), 0);
    cplx acc = 0;
    while (true) {
        double w = 1;
        for (size_t a = 0; a < active.size(); ++a) {
            int i = active[a], n = ord[i], j = idx[a];
            double h = i < dim_ ? hx : hxi;
            double off = (0.5 * n - j) * h;
            if (i < dim_) px[i] = z.x[i] + off; else pxi[i - dim_] = z.xi[i - dim_] + off;
            w *= ((j & 1) ? -1.0 : 1.0) * binom(n, j) / std::pow(h, n);
        }
        acc += w * eval(px, pxi);
        size_t a = 0;
        for (; a < active.size(); ++a) {
            if (++idx[a] <= ord[active[a]]) break;
            idx[a] = 0;
        }
        if (a == active.size()) break;
    }
    return acc;
}

cplx Symbol::derivative1(int a, int b, double x, double xi) const {
    if (poly_) return poly_->derivative({a}, {b}).eval1(x, xi);
    return derivative({a}, {b}, PhasePoint::d1(x, xi));
}

// ---------------------------------------------------------------- sampling

SymbolSampling SymbolSampling::refined() const {
    SymbolSampling r = *this;
    r.n_dirs *= 2;
    r.lambda_max *= 2;
    r.n_lambda = 2 * n_lambda;
    return r;
}

std::vector<PhasePoint> SymbolSampling::points(int dim, double s) const {
    if (n_dirs < 1 || n_lambda < 1 || !(lambda_min > 0) || !(lambda_max >= lambda_min))
        throw DomainError("sampling: empty grid");
    std::vector<std::vector<double>> dirs;
    if (dim == 1) {
        for (int k = 0; k < n_dirs; ++k) {
            double th = 2 * kPi * (k + 0.5) / n_dirs;
            dirs.push_back({std::cos(th), std::sin(th)});
        }
        // the axes carry the extreme weights
        dirs.push_back({1, 0});
        dirs.push_back({-1, 0});
        dirs.push_back({0, 1});
        dirs.push_back({0, -1});
    } else {
        std::mt19937 rng(seed);
        std::normal_distribution<double> g;
        for (int k = 0; k < n_dirs; ++k) {
            std::vector<double> v(2 * dim);
            double n = 0;
            for (double& c : v) c = g(rng), n += c * c;
            for (double& c : v) c /= std::sqrt(n);
            dirs.push_back(v);
        }
        for (int i = 0; i < 2 * dim; ++i)
            for (double sg : {1.0, -1.0}) {
                std::vector<double> v(2 * dim, 0.0);
                v[i] = sg;
                dirs.push_back(v);
            }
    }
    std::vector<PhasePoint> pts;
    if (include_origin) pts.emplace_back(std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0));
    for (auto& v : dirs) {
        PhasePoint w(std::vector<double>(v.begin(), v.begin() + dim), std::vector<double>(v.begin() + dim, v.end()));
        for (int i = 0; i < n_lambda; ++i) {
            double lam = n_lambda == 1 ? lambda_min
                                       : lambda_min * std::pow(lambda_max / lambda_min, double(i) / (n_lambda - 1));
            pts.push_back(ray(w, lam, s));
        }
    }
    return pts;
}

std::string SymbolSampling::describe() const {
    std::ostringstream os;
    os << "rays:" << n_dirs << " dirs, lambda " << lambda_min << ".." << lambda_max << " x" << n_lambda
       << (include_origin ? " +origin" : "");
    return os.str();
}

// multi-indices (alpha, beta) with |alpha| + |beta| <= j, ordered by total order
static std::vector<std::pair<std::vector<int>, std::vector<int>>> multi_indices(int dim, int j) {
    std::vector<std::pair<std::vector<int>, std::vector<int>>> out;
    for (int total = 0; total <= j; ++total) {
        std::vector<int> v(2 * dim, 0);
        std::function<void(int, int)> rec = [&](int i, int left) {
            if (i == 2 * dim - 1) {
                v[i] = left;
                out.emplace_back(std::vector<int>(v.begin(), v.begin() + dim), std::vector<int>(v.begin() + dim, v.end()));
                return;
            }
            for (int e = left; e >= 0; --e) {
                v[i] = e;
                rec(i + 1, left - e);
            }
        };
        rec(0, total);
    }
    return out;
}

double SeminormReport::max_value() const {
    double r = 0;
    for (auto& e : entries) r = std::max(r, e.value);
    return r;
}

bool SeminormReport::all_finite() const {
    return std::all_of(entries.begin(), entries.end(), [](const SeminormEntry& e) { return e.finite; });
}

const SeminormEntry* SeminormReport::find(const std::vector<int>& alpha, const std::vector<int>& beta) const {
    for (auto& e : entries)
        if (e.alpha == alpha && e.beta == beta) return &e;
    return nullptr;
}

static SeminormReport seminorm_on(const Symbol& a, double m, double s, int j, const std::vector<PhasePoint>& pts,
                                  std::string desc) {
    if (j < 0) throw DomainError("seminorm: negative order");
    if (!a.is_polynomial() && j > a.deriv_options().max_order)
        throw OrderOverflow("seminorm: order exceeds the derivative budget");
    SeminormReport rep;
    rep.j = j;
    rep.m = m;
    rep.s = s;
    rep.grid = std::move(desc);
    if (pts.empty()) throw DomainError("seminorm: empty grid");
    for (auto& [al, be] : multi_indices(a.dim(), j)) {
        SeminormEntry e;
        e.alpha = al;
        e.beta = be;
        e.where = pts.front();
        int na = 0, nb = 0;
        for (int v : al) na += v;
        for (int v : be) nb += v;
        const Poly* dp = nullptr;
        Poly dpoly;
        if (a.is_polynomial()) {
            dpoly = a.poly().derivative(al, be);
            dp = &dpoly;
        }
        for (auto& z : pts) {
            cplx v = dp ? dp->eval(z) : a.derivative(al, be, z);
            double w = std::pow(mu_weight(z, s), -m + na + s * nb) * std::abs(v);
            if (!std::isfinite(w)) {
                e.finite = false;
                e.value = std::numeric_limits<double>::infinity();
                e.where = z;
                break;
            }
            if (w > e.value) {
                e.value = w;
                e.where = z;
            }
        }
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

SeminormReport seminorm_estimate(const Symbol& a, double m, double s, int j, const SymbolSampling& grid) {
    return seminorm_on(a, m, s, j, grid.points(a.dim(), s), grid.describe());
}

MembershipVerdict check_membership(const Symbol& a, double m, double s, int j, const SymbolSampling& grid,
                                   double tol) {
    MembershipVerdict v;
    // baseline: the refined points inside the original lambda range, so the ratio only sees growth
    SymbolSampling fine = grid.refined();
    auto pts = fine.points(a.dim(), s);
    std::vector<PhasePoint> inner;
    for (auto& z : pts)
        if (z.is_zero() || solve_lambda(z, s) <= grid.lambda_max * (1 + 1e-9)) inner.push_back(z);
    v.coarse = seminorm_on(a, m, s, j, inner, fine.describe() + " (lambda <= " + std::to_string(grid.lambda_max) + ")");
    v.refined = seminorm_estimate(a, m, s, j, fine);
    v.bounded = v.coarse.all_finite() && v.refined.all_finite();
    double scale = std::max(1.0, v.coarse.max_value());
    for (size_t i = 0; i < v.coarse.entries.size() && v.bounded; ++i) {
        double c = v.coarse.entries[i].value, r = v.refined.entries[i].value;
        double floor = 1e-9 * scale;
        double ratio = (r <= floor) ? 1.0 : (c <= floor ? std::numeric_limits<double>::infinity() : r / c);
        v.worst_ratio = std::max(v.worst_ratio, ratio);
    }
    if (v.bounded) v.bounded = v.worst_ratio <= 1 + tol;
    return v;
}

std::pair<double, double> isotropic_embedding(double m, double s) {
    if (!(s > 0)) throw DomainError("isotropic_embedding: s must be positive");
    return {std::max(m, m / s), std::min(s, 1.0 / s)};
}

// ---------------------------------------------------------------- cutoff

double smooth_step(double t) {
    if (t <= 0) return 0;
    if (t >= 1) return 1;
    double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1 - t));
    return a / (a + b);
}

Symbol make_cutoff(const PhasePoint& z0, double epsilon, double r, double s) {
    if (!(epsilon > 0 && epsilon <= 1)) throw DomainError("make_cutoff: epsilon must lie in (0, 1]");
    if (!(r > 0)) throw DomainError("make_cutoff: r must be positive");
    if (!(s > 0)) throw DomainError("make_cutoff: s must be positive");
    if (std::fabs(z0.norm() - 1) > 1e-9) throw DomainError("make_cutoff: z0 must be a unit vector");
    int d = z0.dim();
    auto f = [z0, epsilon, r, s, d](std::span<const double> x, std::span<const double> xi) -> cplx {
        double nx = 0, nxi = 0;
        for (int i = 0; i < d; ++i) nx += x[i] * x[i], nxi += xi[i] * xi[i];
        double nz = std::sqrt(nx + nxi);
        double g = smooth_step(2 * nz / r - 1);
        if (g == 0) return 0.0;
        double lam = solve_lambda(std::sqrt(nx), std::sqrt(nxi), s);
        double lx = 1.0 / lam, lxi = std::pow(lam, -s), dist = 0;
        for (int i = 0; i < d; ++i) {
            double a = x[i] * lx - z0.x[i], b = xi[i] * lxi - z0.xi[i];
            dist += a * a + b * b;
        }
        return g * smooth_step((2 * epsilon - std::sqrt(dist)) / epsilon);
    };
    return Symbol::callable(d, f, 0.0, s);
}

// ---------------------------------------------------------------- char set

std::vector<double> CharSetEstimate::characteristic_angles() const {
    std::vector<double> r;
    for (size_t i = 0; i < angles.size(); ++i)
        if (characteristic[i]) r.push_back(angles[i]);
    return r;
}

std::string CharSetEstimate::to_json() const {
    nlohmann::ordered_json j;
    j["s"] = s;
    j["m1"] = m1;
    j["threshold"] = threshold;
    auto arr = nlohmann::ordered_json::array();
    for (size_t i = 0; i < angles.size(); ++i) {
        nlohmann::ordered_json d;
        d["angle"] = angles[i];
        d["class"] = characteristic[i] ? "characteristic" : "non-characteristic";
        d["C"] = C[i];
        d["R"] = R[i];
        d["deriv_bound"] = std::isfinite(deriv_bound[i]) ? nlohmann::ordered_json(deriv_bound[i]) : nlohmann::ordered_json();
        arr.push_back(d);
    }
    j["directions"] = arr;
    return j.dump();
}

CharSetEstimate char_set_poly(const Symbol& a, double s, double m1, const CharSetOptions& opt) {
    if (!a.is_polynomial()) throw DomainError("char_set_poly: polynomial symbol required");
    if (a.dim() != 1) throw DomainError("char_set_poly: only d = 1 sphere grids are supported");
    if (opt.sphere_res < 1 || opt.n_lambda < 2 || opt.cap_samples < 1 || !(opt.R_probe > 0) ||
        !(opt.lambda_max > opt.R_probe))
        throw DomainError("char_set_poly: empty probe set");
    if (!(s > 0)) throw DomainError("char_set_poly: s must be positive");
    const Poly& p = a.poly();
    std::vector<std::pair<int, int>> dord = {{1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
    std::vector<Poly> dp;
    for (auto [i, j] : dord) dp.push_back(p.derivative({i}, {j}));

    std::vector<double> lams(opt.n_lambda);
    for (int i = 0; i < opt.n_lambda; ++i)
        lams[i] = opt.R_probe * std::pow(opt.lambda_max / opt.R_probe, double(i) / (opt.n_lambda - 1));
    const double half = 2 * std::asin(std::min(1.0, opt.eps_probe / 2));
    const int half_n = opt.n_lambda / 2;

    CharSetEstimate est;
    est.s = s;
    est.m1 = m1;
    std::vector<bool> unstable(opt.sphere_res);
    for (int k = 0; k < opt.sphere_res; ++k) {
        double th = 2 * kPi * k / opt.sphere_res;
        double lo_min = std::numeric_limits<double>::infinity(), up_min = lo_min;
        double lo_d = 0, up_d = 0;
        for (int c = 0; c < opt.cap_samples; ++c) {
            double off = opt.cap_samples == 1 ? 0 : -half + 2 * half * c / (opt.cap_samples - 1);
            double wx = std::cos(th + off), wxi = std::sin(th + off);
            for (int i = 0; i < opt.n_lambda; ++i) {
                double lam = lams[i], x = lam * wx, xi = std::pow(lam, s) * wxi;
                double av = std::abs(p.eval1(x, xi));
                double ratio = av / std::pow(lam, m1);
                double dmax = 0;
                for (size_t q = 0; q < dp.size(); ++q) {
                    double dv = std::abs(dp[q].eval1(x, xi));
                    if (dv == 0) continue;
                    double scale = std::pow(lam, dord[q].first + s * dord[q].second);
                    dmax = std::max(dmax, av > 0 ? dv * scale / av : std::numeric_limits<double>::infinity());
                }
                if (i < half_n) {
                    lo_min = std::min(lo_min, ratio);
                    lo_d = std::max(lo_d, dmax);
                } else {
                    up_min = std::min(up_min, ratio);
                    up_d = std::max(up_d, dmax);
                }
            }
        }
        est.angles.push_back(360.0 * k / opt.sphere_res);
        est.C.push_back(std::min(lo_min, up_min));
        est.R.push_back(opt.R_probe);
        est.deriv_bound.push_back(std::max(lo_d, up_d));
        bool decaying = up_min < (1 - opt.stability_tol) * lo_min;
        bool dgrow = !std::isfinite(up_d) || up_d > (1 + opt.stability_tol) * lo_d + 1e-12;
        unstable[k] = decaying || dgrow;
    }
    double cmax = 0;
    for (double c : est.C)
        if (std::isfinite(c)) cmax = std::max(cmax, c);
    est.threshold = opt.rel_threshold * cmax;
    for (int k = 0; k < opt.sphere_res; ++k)
        est.characteristic.push_back(cmax == 0 || est.C[k] <= est.threshold || unstable[k]);
    return est;
}

// ---------------------------------------------------------------- asymptotic sums

bool AsymptoticSum::ok() const {
    return std::all_of(passed.begin(), passed.end(), [](bool b) { return b; });
}

AsymptoticSum asymptotic_sum(const std::vector<AsymptoticTerm>& terms, double s, const SymbolSampling& grid,
                             double t_cap) {
    if (terms.empty()) throw DomainError("asymptotic_sum: no terms");
    if (!(s > 0)) throw DomainError("asymptotic_sum: s must be positive");
    int dim = terms.front().a.dim();
    for (size_t j = 0; j < terms.size(); ++j) {
        if (terms[j].a.dim() != dim) throw DomainError("asymptotic_sum: dimension mismatch");
        if (j > 0 && !(terms[j].m < terms[j - 1].m)) throw DomainError("asymptotic_sum: orders must strictly decrease");
    }
    auto pts = grid.points(dim, s);

    auto excise = [s, dim](std::span<const double> x, std::span<const double> xi, double t) {
        double n = 0, ts = std::pow(t, s);
        for (int i = 0; i < dim; ++i) n += (x[i] / t) * (x[i] / t) + (xi[i] / ts) * (xi[i] / ts);
        return smooth_step(2 * std::sqrt(n) - 1);
    };

    AsymptoticSum out;
    std::vector<std::pair<Symbol, double>> parts;
    for (size_t jj = 0; jj < terms.size(); ++jj) {
        int j = static_cast<int>(jj) + 1;
        const Symbol aj = terms[jj].a;
        const double mj = terms[jj].m;
        int jcap = std::min(j, aj.is_polynomial() ? 4 : aj.deriv_options().max_order);
        auto idx = multi_indices(dim, jcap);
        double t = 1;
        bool pass = false;
        while (t <= t_cap) {
            Symbol tj = Symbol::callable(
                dim, [aj, t, excise](std::span<const double> x, std::span<const double> xi) -> cplx {
                    double e = excise(x, xi, t);
                    return e == 0 ? cplx(0) : e * aj.eval(x, xi);
                },
                mj, s, aj.deriv_options());
            pass = true;
            for (auto& z : pts) {
                for (auto& [al, be] : idx) {
                    int na = 0, nb = 0;
                    for (int v : al) na += v;
                    for (int v : be) nb += v;
                    double bound = std::exp2(-j) * std::pow(mu_weight(z, s), mj + 1 - na - s * nb);
                    if (std::abs(tj.derivative(al, be, z)) > bound) {
                        pass = false;
                        break;
                    }
                }
                if (!pass) break;
            }
            if (pass) break;
            t *= 2;
        }
        out.t.push_back(std::min(t, t_cap));
        out.passed.push_back(pass);
        parts.emplace_back(aj, std::min(t, t_cap));
    }
    double m0 = terms.front().m;
    out.a = Symbol::callable(
        dim,
        [parts, excise](std::span<const double> x, std::span<const double> xi) -> cplx {
            cplx r = 0;
            for (auto& [a, t] : parts) {
                double e = excise(x, xi, t);
                if (e != 0) r += e * a.eval(x, xi);
            }
            return r;
        },
        m0, s);
    return out;
}

}  // namespace ag
