#include "aniso/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "aniso/tfa.hpp"
#include "json.hpp"

#define TOML_EXCEPTIONS 1
#define TOML_HEADER_ONLY 1
#include "tomlplusplus/toml.hpp"

namespace ag {

namespace {

using ojson = nlohmann::ordered_json;

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

template <class T>
void take(const ojson& sec, const char* key, T& dst, const std::string& where) {
    if (!sec.contains(key)) return;
    const ojson& v = sec[key];
    if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
        dst = v.get<std::string>();
    } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
        dst = v.get<double>();
    } else {
        if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
            if (v.is_number_unsigned()) dst = v.get<T>();
            else if (v.get<long long>() < 0) throw ConfigError(where + "." + key + ": must be nonnegative");
            else dst = static_cast<T>(v.get<long long>());
        } else {
            dst = v.get<T>();
        }
    }
}

void reject_unknown(const ojson& sec, std::initializer_list<const char*> keys, const std::string& where) {
    if (!sec.is_object()) throw ConfigError(where + ": expected a table");
    for (auto it = sec.begin(); it != sec.end(); ++it) {
        bool ok = false;
        for (const char* k : keys) ok = ok || it.key() == k;
        if (!ok) throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
}

ojson toml_to_json(const toml::node& n) {
    if (auto t = n.as_table()) {
        ojson o = ojson::object();
        for (auto&& [k, v] : *t) o[std::string(k.str())] = toml_to_json(v);
        return o;
    }
    if (auto a = n.as_array()) {
        ojson o = ojson::array();
        for (auto&& v : *a) o.push_back(toml_to_json(v));
        return o;
    }
    if (auto v = n.as_string()) return v->get();
    if (auto v = n.as_integer()) return v->get();
    if (auto v = n.as_floating_point()) return v->get();
    if (auto v = n.as_boolean()) return v->get();
    throw ConfigError("config: unsupported TOML value type");
}

void json_to_toml(const ojson& j, toml::table& t) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const ojson& v = it.value();
        if (v.is_object()) {
            toml::table sub;
            json_to_toml(v, sub);
            t.insert(it.key(), std::move(sub));
        } else if (v.is_string()) {
            t.insert(it.key(), v.get<std::string>());
        } else if (v.is_number_unsigned()) {
            t.insert(it.key(), static_cast<int64_t>(v.get<uint64_t>()));
        } else if (v.is_number_integer()) {
            t.insert(it.key(), v.get<int64_t>());
        } else if (v.is_number_float()) {
            t.insert(it.key(), v.get<double>());
        } else if (v.is_boolean()) {
            t.insert(it.key(), v.get<bool>());
        }
    }
}

}  // namespace

void RunConfig::validate() const {
    auto fail = [](const std::string& m) { throw ConfigError("config: " + m); };
    if (!(s > 0) || !std::isfinite(s)) fail("s must be positive");
    try {
        (void)Window::from_name(window);
    } catch (const std::exception&) {
        fail("unknown window '" + window + "'");
    }
    if (!(grid_T > 0) || !std::isfinite(grid_T)) fail("grid.T must be positive");
    if (grid_n < 8 || !power_of_two(grid_n)) fail("grid.n must be a power of two >= 8");
    if (!(edge_taper >= 0 && edge_taper <= 0.5)) fail("grid.edge_taper must lie in [0, 0.5]");
    if (!(lambda_min > 0) || !std::isfinite(lambda_min)) fail("lambda.min must be positive");
    if (!(lambda_max == 0 || lambda_max > lambda_min)) fail("lambda.max must be 0 (automatic) or exceed lambda.min");
    if (lambda_points < 4) fail("lambda.points must be at least 4");
    if (!(n_thresh > 0)) fail("estimator.n_thresh must be positive");
    if (!(r_max > 0)) fail("estimator.r_max must be positive");
    if (!(cap_radius > 0 && cap_radius < 2)) fail("estimator.cap_radius must lie in (0, 2)");
    if (sphere_res < 4 || sphere_res > 36000) fail("estimator.sphere_res must lie in [4, 36000]");
    if (!(tol_deg > 0 && tol_deg < 180)) fail("estimator.tol_deg must lie in (0, 180)");
    if (!(noise >= 0) || !std::isfinite(noise)) fail("noise must be nonnegative");
    if (seed > static_cast<std::uint64_t>(INT64_MAX)) fail("seed must fit a signed 64-bit integer");
}

EstimatorConfig RunConfig::estimator() const {
    EstimatorConfig c;
    c.n_thresh = n_thresh;
    c.r_max = r_max;
    c.cap_radius = cap_radius;
    c.lambda_min = lambda_min;
    c.lambda_max = lambda_max;
    c.lambda_points = lambda_points;
    c.sphere_res = sphere_res;
    return c;
}

std::string RunConfig::to_json() const {
    ojson j;
    j["s"] = s;
    j["window"] = window;
    j["seed"] = seed;
    j["noise"] = noise;
    j["grid"] = {{"T", grid_T}, {"n", grid_n}, {"edge_taper", edge_taper}};
    j["lambda"] = {{"min", lambda_min}, {"max", lambda_max}, {"points", lambda_points}};
    j["estimator"] = {{"n_thresh", n_thresh}, {"r_max", r_max},         {"cap_radius", cap_radius},
                      {"sphere_res", sphere_res}, {"tol_deg", tol_deg}};
    j["output"] = {{"out", out}, {"decay_csv", decay_csv}};
    return j.dump(2);
}

RunConfig RunConfig::from_json(const std::string& text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    reject_unknown(j, {"s", "window", "seed", "noise", "grid", "lambda", "estimator", "output"}, "config");
    RunConfig c;
    take(j, "s", c.s, "config");
    take(j, "window", c.window, "config");
    take(j, "seed", c.seed, "config");
    take(j, "noise", c.noise, "config");
    if (j.contains("grid")) {
        const ojson& g = j["grid"];
        reject_unknown(g, {"T", "n", "edge_taper"}, "grid");
        take(g, "T", c.grid_T, "grid");
        take(g, "n", c.grid_n, "grid");
        take(g, "edge_taper", c.edge_taper, "grid");
    }
    if (j.contains("lambda")) {
        const ojson& l = j["lambda"];
        reject_unknown(l, {"min", "max", "points"}, "lambda");
        take(l, "min", c.lambda_min, "lambda");
        take(l, "max", c.lambda_max, "lambda");
        take(l, "points", c.lambda_points, "lambda");
    }
    if (j.contains("estimator")) {
        const ojson& e = j["estimator"];
        reject_unknown(e, {"n_thresh", "r_max", "cap_radius", "sphere_res", "tol_deg"}, "estimator");
        take(e, "n_thresh", c.n_thresh, "estimator");
        take(e, "r_max", c.r_max, "estimator");
        take(e, "cap_radius", c.cap_radius, "estimator");
        take(e, "sphere_res", c.sphere_res, "estimator");
        take(e, "tol_deg", c.tol_deg, "estimator");
    }
    if (j.contains("output")) {
        const ojson& o = j["output"];
        reject_unknown(o, {"out", "decay_csv"}, "output");
        take(o, "out", c.out, "output");
        take(o, "decay_csv", c.decay_csv, "output");
    }
    c.validate();
    return c;
}

std::string RunConfig::to_toml() const {
    toml::table t;
    json_to_toml(ojson::parse(to_json()), t);
    std::ostringstream os;
    os << toml::toml_formatter(t) << '\n';
    return os.str();
}

RunConfig RunConfig::from_toml(const std::string& text) {
    toml::table t;
    try {
        t = toml::parse(text);
    } catch (const toml::parse_error& e) {
        throw ConfigError(std::string("config: ") + std::string(e.description()));
    }
    return from_json(toml_to_json(t).dump());
}

static bool ends_with(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

RunConfig RunConfig::load(const std::string& path) {
    std::string text = read_text_file(path);
    if (ends_with(path, ".toml")) return from_toml(text);
    if (ends_with(path, ".json")) return from_json(text);
    throw ConfigError("config: unrecognized extension (expected .toml or .json): " + path);
}

void RunConfig::save(const std::string& path) const {
    if (ends_with(path, ".toml")) write_text_file(path, to_toml());
    else if (ends_with(path, ".json")) write_text_file(path, to_json() + "\n");
    else throw ConfigError("config: unrecognized extension (expected .toml or .json): " + path);
}

Symbol symbol_from_json(const std::string& text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("symbol: ") + e.what());
    }
    if (j.is_object() && j.value("kind", "") == "cutoff") {
        auto z = j.at("z0").get<std::vector<double>>();
        if (z.size() != 2) throw ConfigError("symbol: cutoff z0 must be [x, xi]");
        double n = std::hypot(z[0], z[1]);
        if (n == 0) throw ConfigError("symbol: cutoff z0 must be nonzero");
        double s = j.value("s", 1.0);
        PhasePoint p = project(PhasePoint::d1(z[0], z[1]), s);
        return make_cutoff(p, j.value("epsilon", 0.3), j.value("r", 2.0), s);
    }
    Poly p = Poly::from_json(text);
    double m = p.degree(), s = 1;
    if (j.is_object()) {
        m = j.value("m", m);
        s = j.value("s", s);
    }
    return Symbol::polynomial(p, m, s);
}

Symbol load_symbol(const std::string& path) { return symbol_from_json(read_text_file(path)); }

std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << text;
}

}  // namespace ag
