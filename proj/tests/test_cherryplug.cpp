#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "venice/cherryplug.hpp"

using namespace venice;
using namespace venice::cherryplug;

TEST_CASE("cherry field equilibria") {
    auto f = cherry_field();
    auto res = equilibria(f, 64);
    REQUIRE(res.points.size() == 2);

    const Equilibrium *saddle = nullptr, *sink = nullptr;
    for (const auto& e : res.points) {
        if (e.type == EqType::Saddle) saddle = &e;
        if (e.type == EqType::Sink) sink = &e;
    }
    REQUIRE(saddle != nullptr);
    REQUIRE(sink != nullptr);
    CHECK(std::abs(saddle->p[0]) <= 1e-9);
    CHECK(std::abs(saddle->p[1]) <= 1e-9);
    CHECK(saddle->eig1 == doctest::Approx(-0.5));
    CHECK(saddle->eig2 == doctest::Approx(1.0));
    CHECK(sink->p[0] == doctest::Approx(0.6));
    CHECK(std::abs(sink->p[1]) <= 1e-9);
    CHECK(sink->eig2 < 0.0);
}

TEST_CASE("degenerate inputs rejected") {
    PlanarField z;
    z.name = "zero";
    z.F = [](double, double) -> Vec2 { return {0.0, 0.0}; };
    CHECK_THROWS_AS(equilibria(z, 16), DomainError);
    CHECK_THROWS_AS(equilibria(cherry_field(), 1), DomainError);
}

TEST_CASE("perturbation family: support and t = 0") {
    auto fam = default_da_family();
    auto f0 = fam.perturb(0.0);
    auto ft = fam.perturb(0.75);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> xy(-1.0, 1.0);
    for (int k = 0; k < 10000; ++k) {
        double x = xy(rng), y = xy(rng);
        Vec2 a = fam.base.F(x, y), b = f0.F(x, y), c = ft.F(x, y);
        CHECK(a[0] == b[0]);
        CHECK(a[1] == b[1]);
        if (std::hypot(x, y) >= fam.radius) {
            CHECK(c[0] == a[0]);
            CHECK(c[1] == a[1]);  // support confined to the disk
        }
    }
    CHECK(bump(0.0, 0.15) == doctest::Approx(1.0));
    CHECK(bump(0.15, 0.15) == 0.0);
    CHECK(bump(0.2, 0.15) == 0.0);
}

TEST_CASE("finite-difference jacobian agrees with the analytic one") {
    auto f = cherry_field();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> xy(-1.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        double x = xy(rng), y = xy(rng);
        auto a = f.J(x, y);
        auto b = detail::fd_jacobian(f, x, y);
        for (int i = 0; i < 4; ++i)
            CHECK(std::abs(a[size_t(i)] - b[size_t(i)]) <= 1e-6);
    }
}

TEST_CASE("lorenz-like ordering") {
    CHECK(is_lorenz_like({-3.0, -1.0, 2.0}));
    CHECK_FALSE(is_lorenz_like({-1.0, -1.0, 2.0}));   // ss = s
    CHECK_FALSE(is_lorenz_like({-3.0, -1.0, 1.0}));   // u = -s
    CHECK_FALSE(is_lorenz_like({-3.0, -2.0, 1.0}));   // u < -s
    CHECK_FALSE(is_lorenz_like({-3.0, 1.0, 2.0}));    // s not stable
    // the ordering is scale invariant
    for (double c : {0.5, 2.0, 7.0})
        CHECK(is_lorenz_like({-3.0 * c, -1.0 * c, 2.0 * c}));
}

TEST_CASE("newton divergence is logged, not thrown") {
    PlanarField f;
    f.name = "rootless";
    f.F = [](double x, double y) -> Vec2 { return {x * x + 1.0, y}; };
    EquilibriaResult log;
    auto e = newton_from_seed(f, {0.3, 0.2}, log);
    CHECK_FALSE(e.has_value());
    REQUIRE(log.divergences.size() == 1);
    CHECK(log.points.empty());
}

TEST_CASE("default plug pipeline") {
    auto plug = build_plug();
    REQUIRE(plug.all_equilibria.size() == 4);

    int sources = 0, saddles = 0, sinks = 0;
    for (const auto& e : plug.all_equilibria) {
        if (e.type == EqType::Source) ++sources;
        if (e.type == EqType::Saddle) ++saddles;
        if (e.type == EqType::Sink) ++sinks;
    }
    CHECK(sources == 1);
    CHECK(saddles == 2);
    CHECK(sinks == 1);

    REQUIRE(plug.saddles.size() == 2);
    CHECK(plug.lorenz_like);
    for (const auto& s : plug.saddles) {
        CHECK(s.lorenz_like);
        CHECK(std::abs(s.planar.p[0]) <= 1e-6);
        auto sp = s.spectrum;
        CHECK(sp.ss < sp.s);
        CHECK(sp.s < 0.0);
        CHECK(-sp.s < sp.u);
        CHECK(sp.ss == doctest::Approx(-10.0));
    }
    // split pair symmetric about the x-axis
    CHECK(plug.saddles[0].planar.p[1] == doctest::Approx(-plug.saddles[1].planar.p[1]));
    CHECK(std::abs(plug.saddles[0].planar.p[1]) > 0.01);

    REQUIRE(plug.separatrices.hits.size() == 2);
    CHECK(plug.separatrices.distinct_components);
    for (const auto& h : plug.separatrices.hits) {
        CHECK(std::hypot(h.entry[0] - 0.6, h.entry[1]) <= 0.2 + 1e-9);
        CHECK(h.time > 0.0);
        CHECK(h.path.size() >= 2);
    }
}

TEST_CASE("plug equilibria stable under grid refinement") {
    auto a = build_plug(0.75, -10.0, 96);
    auto b = build_plug(0.75, -10.0, 192);
    REQUIRE(a.all_equilibria.size() == b.all_equilibria.size());
    for (const auto& ea : a.all_equilibria) {
        double best = 1e9;
        for (const auto& eb : b.all_equilibria)
            best = std::min(best, std::hypot(ea.p[0] - eb.p[0], ea.p[1] - eb.p[1]));
        CHECK(best <= 1e-8);
    }
}

TEST_CASE("separatrix tracing failure modes") {
    auto plug = build_plug();
    SeparatrixConfig cfg;
    cfg.t_max = 1e-3;  // far too small to reach the disk
    CHECK_THROWS_AS(trace_separatrix(plug.field, "s", {0.0, 0.5}, cfg), NoCrossing);

    // both branches seeded into the same half: no distinct components
    auto& s0 = plug.saddles[0];
    auto& s1 = plug.saddles[1];
    double ys = std::abs(s0.planar.p[1]);
    std::vector<std::pair<std::string, Vec2>> seeds = {
        {"a", {1e-4, ys}}, {"b", {1e-4, ys}}};
    (void)s1;
    auto rep = separatrix_targets(plug.field, seeds);
    CHECK_FALSE(rep.distinct_components);
    CHECK(rep.hits[0].component == rep.hits[1].component);
}
