#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "igkit/errors.hpp"
#include "igkit/spaces.hpp"

#include <cmath>

using namespace igkit;

TEST_CASE("finite measures integrate as weighted sums") {
    Space sp = SampleSpace::finite(4);
    Measure m = Measure::from_weights(sp, {0.1, 0.2, 0.3, 0.4});
    CHECK(m.mass() == doctest::Approx(1.0).epsilon(1e-15));

    double oracle = 0.0;
    std::vector<double> w{0.1, 0.2, 0.3, 0.4};
    for (int i = 0; i < 4; ++i) oracle += w[i] * (i + 1) * (i + 1);
    double got = m.integrate_checked([](const Point& p) { return p.w(0) * p.w(0); });
    CHECK(got == doctest::Approx(oracle).epsilon(1e-15));

    CHECK_THROWS_AS(Measure::from_weights(sp, {0.1, -0.2, 0.3, 0.4}), InvalidSpec);
    Measure s = Measure::from_weights(sp, {0.1, -0.2, 0.3, 0.4}, true);
    CHECK(total_variation(s) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("grid measures integrate against lebesgue") {
    Space sp = SampleSpace::grid(0.0, 1.0);
    Measure leb = Measure::reference(sp);
    double got = leb.integrate_checked([](const Point& p) { return p.w(0) * p.w(0); });
    CHECK(got == doctest::Approx(1.0 / 3.0).epsilon(1e-10));

    Measure half = Measure::from_density(sp, [](const Point& p) { return 2.0 * p.w(0); });
    CHECK(half.mass() == doctest::Approx(1.0).epsilon(1e-10));

    IntegralResult bad = leb.integrate([](const Point& p) { return 1.0 / p.w(0); });
    CHECK(bad.status == QuadStatus::Divergent);
}

TEST_CASE("product spaces integrate factor by factor") {
    Space sp = SampleSpace::product(SampleSpace::finite(2), SampleSpace::grid(0.0, 1.0));
    Measure m = Measure::from_density(sp, [](const Point& p) {
        return p.c[0].atom == 0 ? 1.0 : p.w(1);
    });
    // atom 0 contributes 1, atom 1 contributes 1/2
    CHECK(m.mass() == doctest::Approx(1.5).epsilon(1e-10));
    double got = m.integrate_checked([](const Point& p) { return p.w(1); });
    CHECK(got == doctest::Approx(0.5 + 1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("uniform probability and space identity") {
    Space sp = SampleSpace::finite(5);
    Measure u = Measure::uniform_probability(sp);
    CHECK(u.density_value(Point::at_atom(2)) == doctest::Approx(0.2));
    CHECK(sp->same_as(*sp));
    CHECK_FALSE(sp->same_as(*SampleSpace::finite(4)));
    CHECK(SampleSpace::grid(0.0, 1.0)->same_as(*SampleSpace::grid(0.0, 1.0)));
    CHECK(sp->enumerable());
    CHECK_FALSE(SampleSpace::grid(0.0, 1.0)->enumerable());
}

TEST_CASE("radon-nikodym ratios") {
    Space sp = SampleSpace::finite(3);
    Measure a = Measure::from_weights(sp, {0.2, 0.3, 0.5});
    Measure b = Measure::from_weights(sp, {0.4, 0.3, 0.3});
    auto r = radon_nikodym(a, b);
    CHECK(r(Point::at_atom(0)) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r(Point::at_atom(2)) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));

    Measure z = Measure::from_weights(sp, {0.0, 0.5, 0.5});
    CHECK_THROWS_AS(radon_nikodym(a, z), ZeroDenominator);
}
