#include <filesystem>

#include "aniso/config.hpp"
#include "doctest.h"

using namespace ag;

TEST_CASE("run config round trips") {
    RunConfig c;
    c.s = 1.0 / 3;
    c.window = "hermite_1";
    c.cap_radius = 0.1;
    c.lambda_min = 4.000000000000001;
    c.lambda_max = 1e5;
    c.noise = 1e-300;
    c.seed = (1ull << 62) + 7;
    c.out = "a \"quoted\" path.json";
    CHECK(RunConfig::from_json(c.to_json()) == c);
    CHECK(RunConfig::from_toml(c.to_toml()) == c);
    CHECK(RunConfig::from_toml(RunConfig::from_json(c.to_json()).to_toml()) == c);

    auto dir = std::filesystem::temp_directory_path();
    for (auto ext : {".toml", ".json"}) {
        auto p = (dir / (std::string("aniso_cfg_test") + ext)).string();
        c.save(p);
        CHECK(RunConfig::load(p) == c);
        std::filesystem::remove(p);
    }
    CHECK_THROWS_AS(c.save((dir / "x.yaml").string()), ConfigError);
}

TEST_CASE("partial configs take defaults") {
    auto c = RunConfig::from_toml("s = 2\n[lambda]\npoints = 30\n");
    CHECK(c.s == 2.0);
    CHECK(c.lambda_points == 30);
    CHECK(c.sphere_res == 360);
    CHECK(c.estimator().lambda_points == 30);
    CHECK(RunConfig::from_json("{}") == RunConfig{});
}

TEST_CASE("malformed configs are rejected") {
    CHECK_THROWS_AS(RunConfig::from_json("{\"s\": -1}"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json("{\"grid\": {\"n\": 100}}"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json("{\"lambda\": {\"points\": 2.5}}"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json("{\"window\": \"boxcar\"}"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json("{\"bogus\": 1}"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json("{\"lambda\": {\"min\": 8, \"max\": 4}}"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json("{"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_toml("s = = 1"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_toml("[estimator]\ncap_radius = 3.0\n"), ConfigError);
}

TEST_CASE("symbol files") {
    Symbol a = symbol_from_json(R"([{"ax":[0],"axi":[1],"re":1},{"ax":[2],"aξ":[0],"re":-1}])");
    CHECK(a.is_polynomial());
    CHECK(a.order() == 2);
    CHECK(a.eval1(2, 4) == cplx(0));
    Symbol b = symbol_from_json(R"({"terms":[{"ax":[1],"axi":[0],"re":1}],"m":1,"s":2})");
    CHECK(b.s() == 2);
    Symbol chi = symbol_from_json(R"({"kind":"cutoff","z0":[1,2],"epsilon":0.3,"r":2,"s":1})");
    CHECK_FALSE(chi.is_polynomial());
    CHECK(std::abs(chi.eval1(10, 20) - 1.0) < 1e-14);
    CHECK(chi.eval1(10, -20) == cplx(0));
    CHECK_THROWS(symbol_from_json("[]"));
}
