#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "venice/suspension.hpp"

using namespace venice;
using namespace venice::suspension;

namespace {
const SingularSuspension& example_X() {
    static SingularSuspension s = build_example(ExampleKind::X);
    return s;
}
const SingularSuspension& example_Y() {
    static SingularSuspension s = build_example(ExampleKind::Y);
    return s;
}
}  // namespace

TEST_CASE("example assembly") {
    const auto& x = example_X();
    REQUIRE(x.singularities.size() == 2);
    CHECK(x.section.variant == skew2d::Variant::H);
    for (const auto& sg : x.singularities) {
        CHECK(cherryplug::is_lorenz_like(sg.spectrum));
        CHECK(sg.leaves.size() == 1);
    }
    CHECK(x.singularities[0].leaves[0] == skew2d::SingularLeafId::DPlus);
    CHECK(x.singularities[1].leaves[0] == skew2d::SingularLeafId::DMinus);

    const auto& y = example_Y();
    CHECK(y.section.variant == skew2d::Variant::G);
    CHECK(y.singularities.size() == 2);

    auto one = build_example(ExampleKind::OneSingularity);
    REQUIRE(one.singularities.size() == 1);
    CHECK(one.singularities[0].leaves.size() == 2);

    auto ctrl = build_control();
    CHECK(ctrl.section.variant == skew2d::Variant::Single);
    CHECK(ctrl.singularities.empty());
}

TEST_CASE("ceiling function") {
    const auto& x = example_X();
    CHECK(ceiling(x, 0.0) == doctest::Approx(1.0));   // P sits at distance 1/2
    CHECK(ceiling(x, 0.9) > 1.0);
    double prev = 0.0;
    for (double d : {1e-2, 1e-4, 1e-6, 1e-8}) {
        double c = ceiling(x, 0.5 - d);
        CHECK(c > prev);  // diverges toward the singular leaf
        prev = c;
    }
    double lam_u = x.singularities[0].spectrum.u;
    CHECK(ceiling(x, 0.5 - 1e-6) ==
          doctest::Approx(1.0 + std::log(0.5 / 1e-6) / lam_u));
}

TEST_CASE("flow orbit through P is periodic with unit return time") {
    const auto& x = example_X();
    auto P = skew2d::fixed_point_P(x.section);
    auto orb = flow_orbit(x, P, 20);
    REQUIRE(orb.completed);
    REQUIRE(orb.samples.size() == 21);
    for (size_t k = 0; k + 1 < orb.samples.size(); ++k) {
        CHECK(std::abs(orb.samples[k].p.u - P.u) <= 1e-10);
        CHECK(std::abs(orb.samples[k].p.y - P.y) <= 1e-9);
        CHECK(orb.samples[k + 1].t - orb.samples[k].t == doctest::Approx(1.0).epsilon(1e-8));
    }
    CHECK(orb.passages.empty());
    CHECK(orb.total_time == doctest::Approx(20.0));
}

TEST_CASE("flow orbit stagnates on a singular leaf") {
    const auto& x = example_X();
    CHECK_THROWS_AS(flow_orbit(x, {0.5, 0.3}, 5), StagnationAtSingularity);
    CHECK_THROWS_AS(flow_orbit(x, {-0.5, 0.3}, 5), StagnationAtSingularity);
}

TEST_CASE("near-singular passages are logged with diverging transit") {
    const auto& x = example_X();
    skew2d::Point start{0.5 - 1e-8, 0.4};
    auto orb = flow_orbit(x, start, 1);
    REQUIRE(orb.passages.size() == 1);
    CHECK(orb.passages[0].label == "sigma1");
    CHECK(orb.passages[0].dist == doctest::Approx(1e-8));
    CHECK(orb.passages[0].transit > 5.0 / x.singularities[0].spectrum.u);
    CHECK(orb.passages[0].side == -1);
    CHECK(orb.samples[1].t > 10.0);  // long return near the singularity
}

TEST_CASE("flow csv export") {
    const auto& x = example_X();
    auto orb = flow_orbit(x, {0.1, 0.3}, 5);
    std::ostringstream os;
    write_csv(orb, os);
    std::string s = os.str();
    CHECK(s.rfind("leaf,fiber,return_time,passage_label\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == int(orb.samples.size()) + 1);
}

TEST_CASE("periodic orbits are dense at modest scale") {
    const auto& x = example_X();
    auto res = dense_periodic_check(x, 0.05, 12);
    INFO("coverage = ", res.coverage, " covered ", res.cells_covered, "/", res.cells_total);
    CHECK(res.pass);
    CHECK(res.cells_total > 100);
    CHECK(res.max_period_used <= 12);

    auto weak = dense_periodic_check(x, 0.05, 1);
    CHECK_FALSE(weak.pass);
    CHECK(weak.coverage < res.coverage);

    auto mid = dense_periodic_check(x, 0.05, 6);
    CHECK(mid.coverage >= weak.coverage);
    CHECK(res.coverage >= mid.coverage);
}

TEST_CASE("transitivity witness") {
    const auto& x = example_X();
    auto rep = transitivity_witness(x, 200, 200, 42);
    CHECK(rep.structural_certificate);
    CHECK(rep.crossings == 0);
    CHECK(rep.verdict == TransitivityVerdict::NonTransitive);
    CHECK(rep.frac_plus > 0.2);
    CHECK(rep.frac_plus < 0.8);

    // deterministic across worker counts
    auto rep2 = transitivity_witness(x, 200, 200, 42, 4);
    CHECK(rep2.crossings == rep.crossings);
    CHECK(rep2.frac_plus == doctest::Approx(rep.frac_plus));

    auto ctrl = build_control();
    auto repc = transitivity_witness(ctrl, 200, 200, 42);
    CHECK_FALSE(repc.structural_certificate);
    CHECK(repc.verdict == TransitivityVerdict::Inconclusive);
    CHECK(repc.crossings > 0);  // iterates hop across the cut point

    auto rep0 = transitivity_witness(x, 0, 100, 42);
    CHECK(rep0.verdict == TransitivityVerdict::Inconclusive);
}

TEST_CASE("class structure: X collapses to the orbit through P") {
    const auto& x = example_X();
    auto rep = class_structure(x, 8, 0.05);
    CHECK(rep.verdict == "periodic_orbit");
    CHECK(rep.contains_P);
    CHECK(rep.base_multiplier > 1.0);
    CHECK(rep.base_multiplier == doctest::Approx(4.2));
    CHECK(rep.fiber_multiplier == doctest::Approx(1.0 / 3.0));
    CHECK(rep.fiber_multiplier < 1.0);
}

TEST_CASE("class structure: Y closes up on the singular traces") {
    const auto& y = example_Y();
    auto rep = class_structure(y, 8, 0.05);
    CHECK(rep.verdict == "singular_closure");
    CHECK(rep.contains_P);
    INFO("hausdorff = ", rep.hausdorff_to_traces);
    CHECK(rep.hausdorff_to_traces >= 0.0);
    CHECK(rep.hausdorff_to_traces <= 0.1);

    // intersection diameter settles (Cauchy in the generation)
    double d6 = skew2d::class_intersection(y.section, 6, 0.05).diameter;
    double d8 = skew2d::class_intersection(y.section, 8, 0.05).diameter;
    double d10 = skew2d::class_intersection(y.section, 10, 0.05).diameter;
    CHECK(std::abs(d8 - d10) <= std::abs(d6 - d8) + 1e-9);
    CHECK(d10 >= 0.1);  // genuinely not a point
}

TEST_CASE("unstable sets stay in the classes") {
    const auto& x = example_X();
    // the trace strips carry the full entering fiber interval, so the slack
    // must absorb the permanent fiber gaps of the attractor (about 0.03)
    for (const auto& label : {std::string("sigma1"), std::string("sigma2")}) {
        auto res = unstable_in_class(x, label, 8, 0.05);
        INFO(label, " max_dist = ", res.max_dist);
        CHECK(res.pass);
        CHECK(res.max_dist <= 0.03);
    }
    CHECK_FALSE(unstable_in_class(x, "sigma1", 8, 0.0).pass);
    CHECK_THROWS_AS(unstable_in_class(x, "sigma9", 8, 0.05), ConfigError);
}

TEST_CASE("sectional expansion audit") {
    const auto& x = example_X();
    auto rows = sectional_expansion_audit(x, 6);
    REQUIRE_FALSE(rows.empty());

    double lam = x.section.plus.expansion_const;
    bool sawP = false;
    for (const auto& r : rows) {
        CHECK(r.expansion_rate > 0.0);
        CHECK(r.contraction_rate < 0.0);
        CHECK(r.expansion_rate >= std::log(lam) / r.max_ceiling - 1e-9);
        CHECK(r.total_time >= double(r.period));
        if (r.period == 1 && std::abs(r.leaf0) <= 1e-10) {
            sawP = true;
            CHECK(r.expansion_rate == doctest::Approx(std::log(4.2)));
            CHECK(r.max_ceiling == doctest::Approx(1.0));
        }
    }
    CHECK(sawP);
}

TEST_CASE("bad plug parameters are rejected") {
    // tau below the split threshold leaves the origin a saddle: no Lorenz pair
    CHECK_THROWS_AS(build_example(ExampleKind::X, 0.1), ConfigError);
}
