#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "igkit/errors.hpp"
#include "igkit/models.hpp"

#include <cmath>

using namespace igkit;

namespace {

// Finite-difference oracle for the directional log-density derivative,
// independent of the model's own differentiation path.
double fd_dlog(const ParametrizedModel& m, std::vector<double> x,
               const std::vector<double>& v, const Point& w, double h = 1e-6) {
    std::vector<double> xp = x, xm = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xp[i] += h * v[i];
        xm[i] -= h * v[i];
    }
    return (std::log(m.density_value(xp, w)) - std::log(m.density_value(xm, w))) /
           (2.0 * h);
}

} // namespace

TEST_CASE("bernoulli family basics") {
    ParametrizedModel m = ParametrizedModel::bernoulli();
    std::vector<double> x{0.3}, v{1.0};
    CHECK(m.statistical());
    CHECK(m.mass(x) == doctest::Approx(1.0).epsilon(1e-14));

    Measure p = m.density_at(x);
    CHECK(p.density_value(Point::at_atom(0)) == doctest::Approx(0.3));
    CHECK(p.density_value(Point::at_atom(1)) == doctest::Approx(0.7));

    CHECK(m.log_derivative(x, v, Point::at_atom(0)) ==
          doctest::Approx(1.0 / 0.3).epsilon(1e-14));
    CHECK(m.log_derivative(x, v, Point::at_atom(1)) ==
          doctest::Approx(fd_dlog(m, x, v, Point::at_atom(1))).epsilon(1e-7));

    std::vector<double> outside{1.5};
    CHECK_THROWS_AS(m.density_at(outside), OutOfDomain);
    m.validate();
}

TEST_CASE("exponential family has unit mass and consistent derivatives") {
    Space sp = SampleSpace::finite(3);
    ParamBox box;
    box.axes = {{-1.0, 1.0}, {-1.0, 1.0}};
    ParametrizedModel m = ParametrizedModel::exponential_family(
        sp, {{1.0, 0.0, -1.0}, {0.5, -0.5, 0.25}}, box);
    std::vector<double> x{0.3, -0.4};
    CHECK(m.mass(x) == doctest::Approx(1.0).epsilon(1e-12));
    for (int a = 0; a < 3; ++a) {
        std::vector<double> v{0.7, 0.2};
        CHECK(m.log_derivative(x, v, Point::at_atom(a)) ==
              doctest::Approx(fd_dlog(m, x, v, Point::at_atom(a))).epsilon(1e-6));
    }
    std::vector<double> e1{1.0, 0.0};
    auto md = m.mass_derivative_both(x, e1);
    CHECK(md.integral_route == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(md.fd_route == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("step models evaluate in closed form") {
    Space sp = SampleSpace::finite(3);
    Measure mu = Measure::from_weights(sp, {0.2, 0.3, 0.5});
    Statistic part = Statistic::from_class_lists(sp, {{0}, {1, 2}});
    ParametrizedModel m = make_step_model(mu, part, {1.5, -0.5}, 0.5);

    std::vector<double> x{0.8}, v{1.0};
    CHECK(m.density_value(x, Point::at_atom(0)) ==
          doctest::Approx(std::exp(0.3 * 1.5)).epsilon(1e-14));
    CHECK(m.log_derivative(x, v, Point::at_atom(2)) == doctest::Approx(-0.5));
    double mass_oracle = 0.2 * std::exp(0.3 * 1.5) + (0.3 + 0.5) * std::exp(-0.3 * 0.5);
    CHECK(m.mass(x) == doctest::Approx(mass_oracle).epsilon(1e-12));

    auto md = m.mass_derivative_both(x, v);
    CHECK(md.integral_route == doctest::Approx(md.fd_route).epsilon(1e-6));
}

TEST_CASE("scaling family on a reference measure") {
    Measure leb = Measure::reference(SampleSpace::grid(0.0, 1.0));
    ParametrizedModel m = ParametrizedModel::scaling(leb);
    std::vector<double> x{0.4}, v{1.0};
    CHECK(m.mass(x) == doctest::Approx(0.4).epsilon(1e-10));
    CHECK(m.log_derivative(x, v, Point::at_coord(0.3)) ==
          doctest::Approx(1.0 / 0.4).epsilon(1e-12));
}

TEST_CASE("integrability verdicts") {
    ParametrizedModel b = ParametrizedModel::bernoulli({0.1, 0.9});
    IntegrabilityReport r2 = check_k_integrability(b, 2);
    CHECK(r2.verdict == IntegrabilityReport::Verdict::Pass);
    CHECK(r2.max_jump < 0.5);

    // Norms must exist at every lattice point and for cross terms between
    // neighbours; exp(-x^2 / t^(1/3)) breaks exactly at x = 0 for k = 3.
    ParametrizedModel d = ParametrizedModel::exp_root_decay(3);
    LatticeConfig cfg;
    cfg.points_per_axis = 7;
    cfg.range = {{-1.0, 1.0}};
    IntegrabilityReport r3 = check_k_integrability(d, 3, cfg);
    CHECK(r3.verdict == IntegrabilityReport::Verdict::Divergent);
    REQUIRE(r3.witness_point >= 0);
    CHECK(std::abs(r3.lattice[r3.witness_point][0]) < 1e-12);
}

TEST_CASE("reparametrization composes the chain rule") {
    ParametrizedModel base = ParametrizedModel::bernoulli();
    ParamBox nbox;
    nbox.axes = {{0.35, 0.9}};
    ParametrizedModel rep =
        reparametrize(base, {Expression::parse("x1 ^ 2")}, nbox);
    std::vector<double> y{0.6}, v{1.0};
    // dlog at atom 0 of bernoulli is 1/x; chain rule gives 2y / y^2.
    CHECK(rep.log_derivative(y, v, Point::at_atom(0)) ==
          doctest::Approx(2.0 * 0.6 / 0.36).epsilon(1e-6));
    CHECK(rep.density_value(y, Point::at_atom(1)) == doctest::Approx(0.64).epsilon(1e-12));
}

TEST_CASE("expression models reject bad densities") {
    Space sp = SampleSpace::finite(2);
    ParamBox box;
    box.axes = {{-1.0, 1.0}};
    ParametrizedModel m = ParametrizedModel::from_expression(
        box, sp, Measure::reference(sp), Expression::parse("x1"), false);
    std::vector<double> x{-0.5};
    CHECK_THROWS_AS(m.density_at(x), NonPositiveDensity);
}
