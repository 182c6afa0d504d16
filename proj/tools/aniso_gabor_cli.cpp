#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "aniso/config.hpp"
#include "aniso/symbols.hpp"
#include "aniso/tfa.hpp"
#include "aniso/wavefront.hpp"
#include "aniso/weyl.hpp"
#include "json.hpp"

using namespace ag;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kPass = 0, kError = 1, kFail = 2;

struct Common {
    std::string config_path;
    std::optional<double> s, lambda_min, lambda_max, n_thresh, cap_radius, tol, noise, T, taper;
    std::optional<int> lambda_points, sphere_res, n;
    std::optional<std::string> window, out, decay_csv;
    std::optional<std::uint64_t> seed;
    std::string oracle, params = "{}", signal;

    RunConfig resolve() const {
        RunConfig c = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
        if (s) c.s = *s;
        if (window) c.window = *window;
        if (lambda_min) c.lambda_min = *lambda_min;
        if (lambda_max) c.lambda_max = *lambda_max;
        if (lambda_points) c.lambda_points = *lambda_points;
        if (n_thresh) c.n_thresh = *n_thresh;
        if (cap_radius) c.cap_radius = *cap_radius;
        if (sphere_res) c.sphere_res = *sphere_res;
        if (tol) c.tol_deg = *tol;
        if (T) c.grid_T = *T;
        if (n) c.grid_n = *n;
        if (taper) c.edge_taper = *taper;
        if (noise) c.noise = *noise;
        if (seed) c.seed = *seed;
        if (out) c.out = *out;
        if (decay_csv) c.decay_csv = *decay_csv;
        c.validate();
        return c;
    }
};

void add_common(CLI::App* sub, Common& o, bool input) {
    sub->add_option("--config", o.config_path, "TOML or JSON run config");
    sub->add_option("--s", o.s, "anisotropy exponent");
    sub->add_option("--window", o.window, "gaussian | hermite_<k>");
    sub->add_option("--lambda-min", o.lambda_min);
    sub->add_option("--lambda-max", o.lambda_max, "0 selects the evaluator cap");
    sub->add_option("--lambda-points", o.lambda_points);
    sub->add_option("--n-thresh", o.n_thresh);
    sub->add_option("--cap-radius", o.cap_radius);
    sub->add_option("--sphere-res", o.sphere_res);
    sub->add_option("--tol", o.tol, "angular tolerance in degrees");
    sub->add_option("--grid-T", o.T, "sampling half width");
    sub->add_option("--grid-n", o.n, "sampling points (power of two)");
    sub->add_option("--edge-taper", o.taper);
    sub->add_option("--seed", o.seed);
    sub->add_option("--noise", o.noise);
    sub->add_option("--out", o.out, "output path");
    sub->add_option("--decay-csv", o.decay_csv, "decay map CSV path");
    if (input) {
        auto* og = sub->add_option("--oracle", o.oracle, "oracle name");
        sub->add_option("--params", o.params, "oracle parameters (JSON object)");
        auto* sg = sub->add_option("--signal", o.signal, "sampled signal (.csv or .bin)");
        og->excludes(sg);
    }
}

bool ends_with(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

Signal read_signal(const std::string& path) {
    return ends_with(path, ".bin") ? Signal::read_binary(path) : Signal::read_csv(path);
}

void write_signal(const Signal& s, const std::string& path, const std::string& comment) {
    if (ends_with(path, ".bin")) s.write_binary(path);
    else s.write_csv(path, comment);
}

struct Input {
    std::optional<Oracle> oracle;
    DistPtr u;
    ojson desc;
};

Input resolve_input(const Common& o) {
    Input in;
    if (!o.oracle.empty()) {
        in.oracle = generate_oracle(o.oracle, o.params);
        in.u = in.oracle->u;
        in.desc = {{"oracle", o.oracle}, {"params", ojson::parse(in.oracle->params_json)}};
    } else if (!o.signal.empty()) {
        in.u = std::make_shared<SampledDist>(read_signal(o.signal));
        in.desc = {{"signal", o.signal}};
    } else {
        throw CLI::ValidationError("input", "one of --oracle or --signal is required");
    }
    return in;
}

Signal sample_grid(const DistPtr& u, const RunConfig& c) {
    if (auto* sd = dynamic_cast<const SampledDist*>(u.get())) return sd->signal();
    return sample(u, -c.grid_T, 2 * c.grid_T / c.grid_n, c.grid_n);
}

void emit(const RunConfig& c, const std::string& text, const std::string& fallback) {
    const std::string& path = c.out.empty() ? fallback : c.out;
    write_text_file(path, text + "\n");
    std::printf("wrote %s\n", path.c_str());
}

std::string comment_for(const RunConfig& c, const ojson& input) {
    ojson j = {{"schema", "aniso-gabor/1"}, {"input", input}, {"config", ojson::parse(c.to_json())}};
    return j.dump();
}

// ---------------------------------------------------------------- subcommands

int run_gen(const Common& o) {
    RunConfig c = o.resolve();
    if (o.oracle.empty()) throw CLI::ValidationError("--oracle", "gen requires an oracle");
    Input in = resolve_input(o);
    Signal s = sample_grid(in.u, c);
    if (c.noise > 0) {
        std::mt19937_64 rng(c.seed);
        std::normal_distribution<double> nd(0.0, c.noise / std::sqrt(2.0));
        for (auto& v : s.v) v += cplx(nd(rng), nd(rng));
    }
    std::string path = c.out.empty() ? o.oracle + ".csv" : c.out;
    write_signal(s, path, comment_for(c, in.desc));
    std::printf("gen: %s -> %s (%zu samples, dt = %.17g, noise = %g)\n", o.oracle.c_str(), path.c_str(), s.size(),
                s.dt, c.noise);
    return kPass;
}

int run_stft(const Common& o, std::pair<double, double> xr, std::pair<double, double> kr, int nx, int nk) {
    RunConfig c = o.resolve();
    Input in = resolve_input(o);
    if (nx < 1 || nk < 1) throw CLI::ValidationError("--nx/--nxi", "must be positive");
    StftEvaluator e(in.u, Window::from_name(c.window));
    std::ostringstream os;
    os.precision(17);
    std::istringstream cs(comment_for(c, in.desc));
    for (std::string line; std::getline(cs, line);) os << "# " << line << '\n';
    os << "x,xi,re,im,log_abs\n";
    for (int i = 0; i < nx; ++i) {
        double x = nx == 1 ? xr.first : xr.first + (xr.second - xr.first) * i / (nx - 1);
        for (int k = 0; k < nk; ++k) {
            double xi = nk == 1 ? kr.first : kr.first + (kr.second - kr.first) * k / (nk - 1);
            cplx v = e.eval(x, xi);
            double la = std::abs(v) > 0 ? std::log(std::abs(v)) : -INFINITY;
            os << x << ',' << xi << ',' << v.real() << ',' << v.imag() << ',';
            if (std::isfinite(la)) os << la;
            else os << "-inf";
            os << '\n';
        }
    }
    std::string path = c.out.empty() ? "stft.csv" : c.out;
    write_text_file(path, os.str());
    std::printf("stft: %d x %d grid -> %s\n", nx, nk, path.c_str());
    return kPass;
}

int run_wavefront(const Common& o) {
    RunConfig c = o.resolve();
    Input in = resolve_input(o);
    StftEvaluator e(in.u, Window::from_name(c.window));
    WaveFrontEstimate est = estimate_wavefront(e, c.s, c.estimator());
    ojson j = ojson::parse(est.to_json(c.to_json()));
    j["input"] = in.desc;
    int code = kPass;
    std::printf("wavefront: s = %g, singular %d, regular %d, inconclusive %d\n", c.s,
                est.count(DirClass::Singular), est.count(DirClass::Regular), est.count(DirClass::Inconclusive));
    if (in.oracle) {
        GroundTruth t = in.oracle->truth(c.s);
        CompareReport r = compare(DirSet::from(est), DirSet::from(t),
                                  t.exact ? CompareMode::Equal : CompareMode::Subset, c.tol_deg);
        j["truth_check"] = ojson::parse(r.to_json());
        std::printf("truth: %s\n", r.summary().c_str());
        if (!r.passed) code = kFail;
    }
    if (!c.decay_csv.empty()) write_text_file(c.decay_csv, est.decay_csv());
    emit(c, j.dump(2), "wavefront.json");
    return code;
}

ojson seminorm_json(const SeminormReport& r) {
    ojson j;
    j["j"] = r.j;
    j["m"] = r.m;
    j["s"] = r.s;
    j["grid"] = r.grid;
    auto arr = ojson::array();
    for (auto& e : r.entries) {
        ojson t;
        t["alpha"] = e.alpha;
        t["beta"] = e.beta;
        t["value"] = std::isfinite(e.value) ? ojson(e.value) : ojson(nullptr);
        t["finite"] = e.finite;
        t["where"] = {e.where.x.empty() ? 0.0 : e.where.x[0], e.where.xi.empty() ? 0.0 : e.where.xi[0]};
        arr.push_back(t);
    }
    j["entries"] = arr;
    return j;
}

int run_symbol_check(const Common& o, const std::string& sym_path, std::optional<double> m, int jmax) {
    RunConfig c = o.resolve();
    Symbol a = load_symbol(sym_path);
    double mm = m.value_or(a.order());
    MembershipVerdict v = check_membership(a, mm, c.s, jmax, SymbolSampling{});
    ojson j;
    j["schema"] = "aniso-gabor/1";
    j["symbol"] = sym_path;
    j["m"] = mm;
    j["s"] = c.s;
    j["bounded"] = v.bounded;
    j["worst_ratio"] = std::isfinite(v.worst_ratio) ? ojson(v.worst_ratio) : ojson(nullptr);
    j["coarse"] = seminorm_json(v.coarse);
    j["refined"] = seminorm_json(v.refined);
    j["config"] = ojson::parse(c.to_json());
    std::printf("symbol-check: G^{%g,%g} up to order %d: %s (worst refinement ratio %.4g)\n", mm, c.s, jmax,
                v.bounded ? "bounded" : "NOT bounded", v.worst_ratio);
    emit(c, j.dump(2), "symbol_check.json");
    return v.bounded ? kPass : kFail;
}

int run_charset(const Common& o, const std::string& sym_path, double m1) {
    RunConfig c = o.resolve();
    Symbol a = load_symbol(sym_path);
    CharSetOptions opt;
    opt.sphere_res = c.sphere_res;
    CharSetEstimate ch = char_set_poly(a, c.s, m1, opt);
    ojson j;
    j["schema"] = "aniso-gabor/1";
    j["symbol"] = sym_path;
    ojson body = ojson::parse(ch.to_json());
    for (auto& [k, v] : body.items()) j[k] = v;
    j["characteristic_angles"] = ch.characteristic_angles();
    j["config"] = ojson::parse(c.to_json());
    auto ang = ch.characteristic_angles();
    std::printf("charset: s = %g, m1 = %g, %zu characteristic directions", c.s, m1, ang.size());
    if (!ang.empty()) std::printf(" (first %g, last %g)", ang.front(), ang.back());
    std::printf("\n");
    emit(c, j.dump(2), "charset.json");
    return kPass;
}

int run_weyl_apply(const Common& o, const std::string& sym_path, double t) {
    RunConfig c = o.resolve();
    Input in = resolve_input(o);
    Symbol a = load_symbol(sym_path);
    std::string how;
    Signal v;
    if (a.is_polynomial() && in.oracle && in.u->pointwise()) {
        Poly p = t == 0.5 ? a.poly() : quantization_shift(a.poly(), t, 0.5);
        DistPtr w;
        try {
            w = weyl_apply_symbolic(p, in.u);
        } catch (const DomainError&) {
        }
        if (w) {
            v = sample(w, -c.grid_T, 2 * c.grid_T / c.grid_n, c.grid_n);
            how = "symbolic";
        }
    }
    if (how.empty()) {
        Symbol b = a;
        if (t != 0.5) {
            if (!a.is_polynomial())
                throw DomainError("weyl-apply: t != 1/2 needs a polynomial symbol (exact quantization shift)");
            b = Symbol::polynomial(quantization_shift(a.poly(), t, 0.5), a.order(), a.s());
        }
        Signal u = edge_tapered(sample_grid(in.u, c), c.edge_taper);
        v = apply_weyl_sampled(b, u);
        how = "sampled";
    }
    ojson desc = in.desc;
    desc["symbol"] = sym_path;
    desc["t"] = t;
    desc["method"] = how;
    std::string path = c.out.empty() ? "weyl_apply.csv" : c.out;
    write_signal(v, path, comment_for(c, desc));
    std::printf("weyl-apply: %s path, %zu samples -> %s\n", how.c_str(), v.size(), path.c_str());
    return kPass;
}

int run_compare(const Common& o, const std::string& a, const std::string& b, const std::string& mode) {
    RunConfig c = o.resolve();
    if (mode != "subset" && mode != "equal") throw CLI::ValidationError("--mode", "subset or equal");
    DirSet da = DirSet::from_json(read_text_file(a)), db = DirSet::from_json(read_text_file(b));
    CompareReport r = compare(da, db, mode == "subset" ? CompareMode::Subset : CompareMode::Equal, c.tol_deg);
    ojson j = ojson::parse(r.to_json());
    j["a"] = a;
    j["b"] = b;
    j["config"] = ojson::parse(c.to_json());
    std::printf("compare: %s\n", r.summary().c_str());
    emit(c, j.dump(2), "compare.json");
    return r.passed ? kPass : kFail;
}

int run_invariance(const Common& o) {
    RunConfig c = o.resolve();
    Input in = resolve_input(o);
    InvarianceOptions opt;
    opt.tol = c.tol_deg;
    auto checks = invariance_suite(in.u, c.s, c.estimator(), opt);
    ojson j;
    j["schema"] = "aniso-gabor/1";
    j["input"] = in.desc;
    j["s"] = c.s;
    auto arr = ojson::array();
    bool all = true;
    for (auto& ch : checks) {
        arr.push_back({{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
        std::printf("%-12s %s  %s\n", ch.name.c_str(), ch.passed ? "PASS" : "FAIL", ch.detail.c_str());
        all = all && ch.passed;
    }
    j["checks"] = arr;
    j["passed"] = all;
    j["config"] = ojson::parse(c.to_json());
    emit(c, j.dump(2), "invariance.json");
    return all ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anisotropic Gabor wave front toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "aniso-gabor 0.1.0");

    Common o;
    std::string sym, a_path, b_path, mode = "subset";
    std::optional<double> m;
    double m1 = 0, t = 0.5;
    int jmax = 2, nx = 65, nk = 65;
    std::pair<double, double> xr{-8, 8}, kr{-8, 8};

    auto* gen = app.add_subcommand("gen", "sample an oracle to a signal file");
    add_common(gen, o, true);
    auto* stft = app.add_subcommand("stft", "dump the STFT on a rectangular phase-space grid");
    add_common(stft, o, true);
    stft->add_option("--x-range", xr)->delimiter(',');
    stft->add_option("--xi-range", kr)->delimiter(',');
    stft->add_option("--nx", nx);
    stft->add_option("--nxi", nk);
    auto* wf = app.add_subcommand("wavefront", "estimate the s-Gabor wave front set");
    add_common(wf, o, true);
    auto* sc = app.add_subcommand("symbol-check", "seminorm sweep for a symbol class");
    add_common(sc, o, false);
    sc->add_option("--symbol", sym, "symbol JSON")->required();
    sc->add_option("--m", m, "order (default: the symbol's own)");
    sc->add_option("--order", jmax, "highest derivative order");
    auto* cs = app.add_subcommand("charset", "s-conic characteristic set of a polynomial symbol");
    add_common(cs, o, false);
    cs->add_option("--symbol", sym, "symbol JSON")->required();
    cs->add_option("--m1", m1)->required();
    auto* wa = app.add_subcommand("weyl-apply", "apply a quantized symbol to a signal or oracle");
    add_common(wa, o, true);
    wa->add_option("--symbol", sym, "symbol JSON")->required();
    wa->add_option("--t", t, "quantization parameter");
    auto* cmp = app.add_subcommand("compare", "compare two direction sets");
    add_common(cmp, o, false);
    cmp->add_option("--a", a_path)->required();
    cmp->add_option("--b", b_path)->required();
    cmp->add_option("--mode", mode)->check(CLI::IsMember({"subset", "equal"}));
    auto* inv = app.add_subcommand("invariance", "window, Heisenberg and metaplectic invariance checks");
    add_common(inv, o, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kError;
    }

    try {
        if (*gen) return run_gen(o);
        if (*stft) return run_stft(o, xr, kr, nx, nk);
        if (*wf) return run_wavefront(o);
        if (*sc) return run_symbol_check(o, sym, m, jmax);
        if (*cs) return run_charset(o, sym, m1);
        if (*wa) return run_weyl_apply(o, sym, t);
        if (*cmp) return run_compare(o, a_path, b_path, mode);
        if (*inv) return run_invariance(o);
    } catch (const CappedEvaluation& e) {
        std::fprintf(stderr, "error: %s (valid |xi| <= %.6g)\n", e.what(), e.max_valid_xi);
        return kError;
    } catch (const CLI::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kError;
    }
    return kError;
}
