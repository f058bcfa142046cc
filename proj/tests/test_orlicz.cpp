#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "igkit/errors.hpp"
#include "igkit/orlicz.hpp"

#include <cmath>

using namespace igkit;

TEST_CASE("luxemburg norm closed forms") {
    // Constant |f| = c against a probability: cosh(c/a) - 1 = 1 at the norm,
    // so the norm is c / arccosh(2).
    Measure u = Measure::uniform_probability(SampleSpace::finite(3));
    double acosh2 = std::acosh(2.0);
    for (double c : {0.3, 1.0, 2.5}) {
        double n = orlicz_norm([c](const Point&) { return c; }, u,
                               YoungFunction::cosh_minus_one());
        CHECK(n == doctest::Approx(c / acosh2).epsilon(1e-9));
    }

    // phi = |t|^p gives the usual L^p norm: ||w||_p = (1/(p+1))^(1/p) on (0,1).
    Measure leb = Measure::reference(SampleSpace::grid(0.0, 1.0));
    for (double p : {2.0, 3.0}) {
        double n = orlicz_norm([](const Point& w) { return w.w(0); }, leb,
                               YoungFunction::power(p));
        CHECK(n == doctest::Approx(std::pow(1.0 / (p + 1), 1.0 / p)).epsilon(1e-8));
    }
    CHECK_THROWS_AS(YoungFunction::power(1.0), InvalidSpec);
}

TEST_CASE("stretching the gauge rescales the norm") {
    Measure leb = Measure::reference(SampleSpace::grid(0.0, 1.0));
    ScalarFn f = [](const Point& w) { return std::sin(3.0 * w.w(0)); };
    for (double lam : {0.5, 3.0})
        CHECK(stretch_equivalence_check(f, leb, YoungFunction::cosh_minus_one(), lam) <=
              1e-8);
}

TEST_CASE("unbounded exponential moments leave the orlicz space") {
    Measure leb = Measure::reference(SampleSpace::grid(0.0, 1.0));
    ScalarFn f = [](const Point& w) { return 1.0 / w.w(0); };
    CHECK_THROWS_AS(orlicz_norm(f, leb, YoungFunction::cosh_minus_one()),
                    NotInOrliczSpace);
    OrliczVerdict v = in_exponential_tangent(f, leb);
    CHECK(v.fails());
    CHECK_FALSE(v.trace.empty());
}

TEST_CASE("exponential tangent membership for mild singularities") {
    Measure leb = Measure::reference(SampleSpace::grid(0.0, 1.0));
    // exp(t * 2 log(1/w)) = w^(-2t) is integrable once t < 1/2.
    OrliczVerdict v = in_exponential_tangent(
        [](const Point& w) { return -2.0 * std::log(w.w(0)); }, leb);
    CHECK(v.holds());
    CHECK(v.witness <= 0.25);
}

TEST_CASE("dominance order between tail-heavy densities") {
    Space sp = SampleSpace::grid(0.0, 1.0);
    Measure leb = Measure::reference(sp);
    // Density exp(-t^(-1/3)): the inverse ratio exp(+t^(-1/3)) has no finite
    // p-th moment for any p > 1.
    Measure heavy = Measure::from_density(
        sp, [](const Point& w) { return std::exp(-std::pow(w.w(0), -1.0 / 3.0)); });
    CHECK(preceq(heavy, leb).holds());
    CHECK(preceq(leb, heavy).fails());
    CHECK(similar(heavy, leb).fails());

    // Bounded positive tilts stay similar.
    Measure tilted = tilt(leb, [](const Point& w) { return std::cos(w.w(0)); });
    OrliczVerdict s = similar(tilted, leb);
    CHECK(s.holds());
    CHECK(s.witness == doctest::Approx(2.0));
}

TEST_CASE("e-convergence diagnostic table") {
    Measure leb = Measure::reference(SampleSpace::grid(0.0, 1.0));
    std::vector<ScalarFn> gn;
    for (int n = 1; n <= 8; ++n)
        gn.push_back([n](const Point& w) { return 1.0 + w.w(0) / n; });
    EConvReport r =
        e_convergence_diagnostic(gn, [](const Point&) { return 1.0; }, leb);
    REQUIRE(r.rows.size() == 8);
    CHECK(r.all_finite);
    CHECK(r.l1_tail_monotone);
    CHECK(r.rows[0].l1 == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r.rows[7].l1 < r.rows[0].l1);
    CHECK(r.rows[0].ratio_norms.size() == 3);
}

TEST_CASE("segments of bounded tilts are similar inside") {
    Measure leb = Measure::reference(SampleSpace::grid(0.0, 1.0));
    SegmentReport r = segment_similarity(
        [](const Point&) { return 0.0; },
        [](const Point& w) { return w.w(0); }, leb, {0.25, 0.5, 0.75});
    CHECK(r.interior_pairwise_similar);
    CHECK(r.endpoints_dominate);
    CHECK_THROWS_AS(segment_similarity([](const Point&) { return 0.0; },
                                       [](const Point&) { return 0.0; }, leb,
                                       {0.0, 0.5}),
                    InvalidSpec);
}
