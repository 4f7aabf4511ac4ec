#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "venice/branched1d.hpp"

using namespace venice;
using namespace venice::branched1d;

TEST_CASE("interval set basics") {
    IntervalSet s;
    s.add(Interval::open(0.0, 0.5));
    s.add(Interval::closed(0.5, 1.0));
    CHECK(s.count() == 1);  // shared endpoint with a closed flag connects
    CHECK(s.parts()[0].lo == 0.0);
    CHECK(s.parts()[0].hi == 1.0);
    CHECK(s.parts()[0].lo_open);
    CHECK_FALSE(s.parts()[0].hi_open);

    IntervalSet t;
    t.add(Interval::open(0.0, 0.3));
    t.add(Interval::open(0.3, 1.0));
    CHECK(t.count() == 2);  // both open at 0.3: disconnected
    CHECK(t.uncovered_length(0.0, 1.0) == doctest::Approx(0.0));
    CHECK_FALSE(t.contains(0.3));
}

TEST_CASE("monotone inverse of quadratic branches") {
    Polynomial q{{0.0, 4.2, -0.8}};  // bumped first branch
    double x = monotone_inverse(q, 0.0, 0.25, q(0.17));
    CHECK(x == doctest::Approx(0.17).epsilon(1e-12));
}

TEST_CASE("eval on the default map") {
    auto f = default_f();
    CHECK(eval(f, 0.0) == 0.0);
    CHECK(eval(f, 0.125) == doctest::Approx(0.5));
    CHECK(eval(f, 0.4) == doctest::Approx(0.16));
    CHECK(eval(f, 1.0) == doctest::Approx(eval(f, f.branch_point)));
    CHECK_THROWS_AS(eval(f, 0.5), DomainError);
    CHECK_THROWS_AS(eval(f, -0.1), DomainError);
    CHECK_THROWS_AS(eval(f, 1.1), DomainError);
}

TEST_CASE("one-sided limits") {
    auto f = default_f();
    CHECK(eval_one_sided(f, f.d_star, Side::Right) == doctest::Approx(0.0));
    CHECK(eval_one_sided(f, f.d_star, Side::Left) == doctest::Approx(0.0));
    CHECK(eval_one_sided(f, f.d1, Side::Right) == doctest::Approx(0.4));
    CHECK(eval_one_sided(f, f.d1, Side::Left) == doctest::Approx(1.0));
    CHECK(eval_one_sided(f, f.d2, Side::Right) == doctest::Approx(0.4));
    CHECK(eval_one_sided(f, f.d2, Side::Left) == doctest::Approx(1.0));
    CHECK_THROWS_AS(eval_one_sided(f, 0.0, Side::Left), DomainError);
    CHECK_THROWS_AS(eval_one_sided(f, 1.0, Side::Right), DomainError);
}

TEST_CASE("hypothesis suite on defaults") {
    for (auto m : {default_f(), default_f_plus(), default_f_minus_base()}) {
        auto rep = verify_hypotheses(m);
        for (const auto& e : rep.entries) {
            INFO(e.name, ": ", e.witness);
            CHECK(e.pass);
        }
    }
}

TEST_CASE("hypothesis suite catches violations") {
    auto bad = default_f();
    bad.branches[3].func = Polynomial{{1.168, -0.96}};  // slope below lambda
    auto rep = verify_hypotheses(bad);
    REQUIRE(rep.find("H5") != nullptr);
    CHECK_FALSE(rep.find("H5")->pass);
    CHECK_FALSE(rep.find("H5")->witness.empty());

    auto bad2 = default_f();
    bad2.branches[0].func = Polynomial{{0.1, 3.6}};  // f(0) = 0.1
    auto rep2 = verify_hypotheses(bad2);
    REQUIRE(rep2.find("H2") != nullptr);
    CHECK_FALSE(rep2.find("H2")->pass);
}

TEST_CASE("image_of_interval matches (H4)") {
    auto f = default_f();
    auto img = image_of_interval(f, Interval::lopen(0.8, 1.0));
    REQUIRE(img.count() == 1);
    CHECK(img.parts()[0].lo == doctest::Approx(0.16));
    CHECK(img.parts()[0].hi == doctest::Approx(0.4));
    CHECK_FALSE(img.parts()[0].lo_open);
    CHECK(img.parts()[0].hi_open);

    auto whole = image_of_interval(f, Interval::closed(0.0, 1.0));
    CHECK(whole.uncovered_length(0.0, 1.0) == doctest::Approx(0.0));

    auto mid = image_of_interval(f, Interval::open(0.45, 0.55));
    REQUIRE(mid.count() == 1);
    CHECK(mid.parts()[0].lo == doctest::Approx(0.0));
    CHECK(mid.parts()[0].hi == doctest::Approx(1.0 / 6.0));
    CHECK(mid.parts()[0].lo_open);
    CHECK(mid.parts()[0].hi_open);

    CHECK_THROWS_AS(image_of_interval(f, Interval::open(0.2, 0.2)), EmptyInput);
}

TEST_CASE("all four (H4) images with flags") {
    auto f = default_f();
    struct Case { Interval dom, want; };
    double fb = eval(f, f.branch_point);
    Case cases[] = {
        {Interval::closed(0.0, 0.25), Interval::closed(0.0, 1.0)},
        {Interval::open(0.25, 0.5), Interval::open(0.0, 0.4)},
        {Interval::lopen(0.5, 0.8), Interval::lopen(0.0, 1.0)},
        {Interval::lopen(0.8, 1.0), Interval::ropen(fb, 0.4)},
    };
    for (const auto& c : cases) {
        auto img = image_of_interval(f, c.dom);
        CHECK(img.same_as(IntervalSet(c.want), 1e-12));
    }
}

TEST_CASE("leo_check") {
    auto f = default_f();
    auto m1 = leo_check(f, Interval::open(0.0, 1.0), 10);
    REQUIRE(m1.has_value());
    CHECK(*m1 == 1);

    auto m3 = leo_check(f, Interval::open(0.45, 0.55), 10);
    REQUIRE(m3.has_value());
    CHECK(*m3 == 3);

    auto m0 = leo_check(f, Interval::closed(0.0, 1.0), 0);
    REQUIRE(m0.has_value());
    CHECK(*m0 == 0);

    // iteration consistency: if I needs m, f(I) needs at most m-1
    Interval I = Interval::open(0.3, 0.33);
    auto m = leo_check(f, I, 20);
    REQUIRE(m.has_value());
    REQUIRE(*m >= 1);
    auto img = image_of_interval(f, I);
    bool ok = false;
    for (const auto& p : img.parts()) {
        auto mm = leo_check(f, p, 20);
        if (mm && *mm <= *m - 1) ok = true;
    }
    CHECK(ok);
}

TEST_CASE("periodic points") {
    auto f = default_f();
    auto pts = periodic_points(f, 3);
    REQUIRE_FALSE(pts.empty());

    bool has_zero = false, has_57 = false;
    for (const auto& pp : pts) {
        if (std::abs(pp.x) <= 1e-10 && pp.period == 1) has_zero = true;
        if (std::abs(pp.x - 5.0 / 7.0) <= 1e-10 && pp.period == 1) has_57 = true;
    }
    CHECK(has_zero);
    CHECK(has_57);

    // independent forward re-evaluation
    for (const auto& pp : pts) {
        double z = pp.x == f.branch_point && pp.x != 0.0 ? pp.x : pp.x;
        for (int i = 0; i < pp.period; ++i) z = eval(f, z);
        CHECK(std::abs(z - pp.x) <= 1e-9);
    }
}

TEST_CASE("preimage tree") {
    auto f = default_f();
    auto p0 = preimage_tree(f, 0.3, 0);
    REQUIRE(p0.size() == 1);
    CHECK(p0[0] == doctest::Approx(0.3));

    auto p1 = preimage_tree(f, 0.5, 1);
    // branch 1 inverse 0.125, branch 3 inverse 0.65, plus the point itself
    bool h125 = false, h65 = false;
    for (double x : p1) {
        if (std::abs(x - 0.125) <= 1e-10) h125 = true;
        if (std::abs(x - 0.65) <= 1e-10) h65 = true;
    }
    CHECK(h125);
    CHECK(h65);

    // monotone in n_max
    auto a = preimage_tree(f, 0.3, 3);
    auto b = preimage_tree(f, 0.3, 4);
    for (double x : a) {
        double best = 1e9;
        for (double y : b) best = std::min(best, std::abs(x - y));
        CHECK(best <= 1e-9);
    }
}

TEST_CASE("reflect") {
    auto f = default_f();
    auto r = reflect(f);
    CHECK(r.mirrored);
    CHECK(r.cut_point() == doctest::Approx(-0.5));
    CHECK(eval_signed(r, -0.125) == doctest::Approx(-0.5));
    auto rr = reflect(r);
    for (int k = 0; k <= 1000; ++k) {
        double x = double(k) / 1000.0;
        if (x == f.d_star) continue;
        CHECK(eval_signed(rr, x) == doctest::Approx(eval(f, x)).epsilon(1e-14));
    }
}

TEST_CASE("arc length sandwich") {
    auto f = default_f();
    auto fp = default_f_plus();
    ArcLengthBudget budget;
    auto r = verify_arclength_eps(f, fp, budget);
    INFO("base1=", r.base1, " plus1=", r.plus1, " base2=", r.base2, " plus2=", r.plus2);
    CHECK(r.pass);
    CHECK(r.plus1 > r.base1);
    CHECK(r.plus2 > r.base2);

    // f+ = f fails the strict left inequality
    auto same = verify_arclength_eps(f, f, budget);
    CHECK_FALSE(same.pass);

    // epsilon = 0 is an empty sandwich
    ArcLengthBudget zero = budget;
    zero.epsilon = 0.0;
    CHECK_FALSE(verify_arclength_eps(f, fp, zero).pass);

    // mismatched cut data is a contract violation
    auto other = default_f();
    other.d1 = 0.3;
    CHECK_THROWS_AS(verify_arclength_eps(other, fp, budget), DomainError);
}

TEST_CASE("branch monotonicity via sampled derivative") {
    for (auto m : {default_f(), default_f_plus(), default_f_minus_base()}) {
        for (const auto& br : m.branches) {
            Polynomial d = br.func.derivative();
            int sign0 = 0;
            for (int k = 0; k <= 512; ++k) {
                double x = br.domain.lo + (br.domain.hi - br.domain.lo) * k / 512.0;
                int s = d(x) > 0 ? 1 : -1;
                if (sign0 == 0) sign0 = s;
                CHECK(s == sign0);
                CHECK(std::abs(d(x)) >= m.expansion_const - 1e-12);
            }
        }
    }
}

TEST_CASE("periodic net and preimage net at modest scale") {
    auto fp = default_f_plus();
    auto net = periodic_net_check(fp, 0.02, 14);
    INFO("coverage=", net.coverage, " first_uncovered=", net.first_uncovered);
    CHECK(net.pass);

    auto pre = preimage_net_check(fp, 0.3, 0.02, 12);
    INFO("coverage=", pre.coverage);
    CHECK(pre.pass);
}
