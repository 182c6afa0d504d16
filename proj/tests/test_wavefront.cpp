#include <cmath>
#include <cstdlib>

#include "aniso/parallel.hpp"
#include "aniso/wavefront.hpp"
#include "doctest.h"

using namespace ag;
using doctest::Approx;

namespace {
double deg(double x, double xi) { return direction_angle(x, xi); }
}  // namespace

TEST_CASE("decay profiles") {
    StftEvaluator g(generate_oracle("gaussian").u);
    for (double a : {0.0, 45.0, 200.0}) {
        auto p = decay_profile(g, a, 1);
        CHECK(p.cls == DirClass::Regular);
        CHECK(p.slope <= -20);
    }

    StftEvaluator d(generate_oracle("delta").u);
    for (double s : {0.5, 1.0, 2.0}) {
        auto p = decay_profile(d, 90, s);
        CHECK(p.cls == DirClass::Singular);
        CHECK(p.slope >= -1e-6);
    }

    StftEvaluator c(generate_oracle("chirp2").u);
    auto on = decay_profile(c, deg(1, 2), 1);
    CHECK(on.cls == DirClass::Singular);
    CHECK(on.slope > -2.5);
    auto off = decay_profile(c, deg(1, -2), 1);
    CHECK(off.cls == DirClass::Regular);
    CHECK(off.slope <= -5);
    CHECK(on.lambda.size() == 24);
    CHECK(on.lambda.front() == Approx(4));
}

TEST_CASE("elementary wave front sets") {
    for (double s : {0.5, 2.0}) {
        auto pw = estimate_wavefront(StftEvaluator(generate_oracle("plane_wave", R"({"xi0": 1.5})").u), s);
        auto r = compare(DirSet::from(pw), DirSet::from(GroundTruth{s, {0, 180}}), CompareMode::Equal);
        CHECK(r.passed);
        CHECK(pw.count(DirClass::Inconclusive) == 0);
        auto mono = estimate_wavefront(StftEvaluator(generate_oracle("monomial", R"({"alpha": 2})").u), s);
        CHECK(compare(DirSet::from(mono), DirSet::from(GroundTruth{s, {0, 180}}), CompareMode::Equal).passed);
    }
}

TEST_CASE("comparison semantics") {
    DirSet a{1, {10, 20}, 0, true}, b{1, {12, 200}, 3, true};
    auto sub = compare(a, b, CompareMode::Subset, 5);
    CHECK_FALSE(sub.passed);
    REQUIRE(sub.unmatched_a.size() == 1);
    CHECK(sub.unmatched_a[0] == 20);
    CHECK(sub.excluded_b == 3);
    CHECK(compare(a, a, CompareMode::Equal).passed);
    DirSet loose{1, {10, 20, 30}, 0, false};
    CHECK(compare(a, loose, CompareMode::Equal).passed);
    CHECK_THROWS_AS(compare(a, DirSet{2, {}, 0, true}, CompareMode::Subset), DomainError);

    auto e = estimate_wavefront(StftEvaluator(generate_oracle("chirp2").u), 1);
    DirSet back = DirSet::from_json(e.to_json());
    CHECK(back.angles == e.singular_angles());
    CHECK(compare(back, DirSet::from(e), CompareMode::Equal).passed);
    DirSet truth = DirSet::from_json(R"({"s": 1, "angles": [63.43, 243.43]})");
    CHECK(compare(back, truth, CompareMode::Equal).passed);
    CHECK_THROWS_AS(DirSet::from_json("{\"angles\": []}"), DomainError);
}

TEST_CASE("estimates are deterministic and serialize with the schema tag") {
    auto u = generate_oracle("chirp3").u;
    auto a = estimate_wavefront(StftEvaluator(u), 2).to_json("{\"k\": 1}");
    auto b = estimate_wavefront(StftEvaluator(u), 2).to_json("{\"k\": 1}");
    CHECK(a == b);
    CHECK(a.find("\"schema\": \"aniso-gabor/1\"") != std::string::npos);
    CHECK(a.find("\"run\"") != std::string::npos);
    auto csv = estimate_wavefront(StftEvaluator(u), 2).decay_csv();
    CHECK(csv.rfind("direction,lambda,log_abs_v\n", 0) == 0);
}

TEST_CASE("direction maps") {
    DirSet a{1, {0, 90}, 0, true};
    auto J = map_directions(a, [](double& x, double& xi) {
        double t = x;
        x = xi;
        xi = -t;
    }, 1);
    REQUIRE(J.angles.size() == 2);
    CHECK(J.angles[0] == Approx(270));
    CHECK(angle_diff(J.angles[1], 0) < 1e-9);
}

TEST_CASE("invariance suite") {
    auto d = invariance_suite(generate_oracle("delta").u, 1);
    for (auto& c : d) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.passed);
    }
    auto g = invariance_suite(generate_oracle("gaussian").u, 2);
    for (auto& c : g) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.passed);
    }
    auto e = estimate_wavefront(StftEvaluator(generate_oracle("gaussian").u->chirp_multiplied(1.0)), 2);
    CHECK(e.singular_angles().empty());
}

TEST_CASE("thread count") {
    setenv("ANISO_GABOR_THREADS", "3", 1);
    CHECK(thread_count() == 3);
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), [&](size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    unsetenv("ANISO_GABOR_THREADS");
    CHECK(thread_count() >= 1);
    CHECK_THROWS_AS(parallel_for(10, [](size_t i) {
                        if (i == 7) throw std::runtime_error("boom");
                    }),
                    std::runtime_error);
}
