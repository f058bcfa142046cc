#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "igkit/errors.hpp"
#include "igkit/natgrad.hpp"

#include <cmath>

using namespace igkit;

TEST_CASE("natural direction solves the damped fisher system") {
    ParametrizedModel m = ParametrizedModel::bernoulli();
    std::vector<double> x{0.3};
    Eigen::VectorXd g(1);
    g << 2.0;
    double fisher = 1.0 / (0.3 * 0.7);
    Eigen::VectorXd d = natural_direction(m, x, g, 1e-10);
    CHECK(d(0) == doctest::Approx(2.0 / (fisher + 1e-10)).epsilon(1e-10));
}

TEST_CASE("a singular metric is rejected when undamped") {
    // h = 0 makes every log-derivative vanish, so the Fisher matrix is zero.
    Space sp = SampleSpace::finite(2);
    ParamBox box;
    box.axes = {{-1.0, 1.0}};
    ParametrizedModel flat =
        ParametrizedModel::exponential_family(sp, {{0.0, 0.0}}, box);
    std::vector<double> x{0.2};
    Eigen::VectorXd g(1);
    g << 1.0;
    CHECK_THROWS_AS(natural_direction(flat, x, g, 0.0), SingularMetric);
}

TEST_CASE("kl descent on the bernoulli family hits the target") {
    ParametrizedModel m = ParametrizedModel::bernoulli();
    Measure q = Measure::from_weights(m.space(), {0.7, 0.3});
    DifferentiableObjective obj = kl_to_target(m, q);

    std::vector<double> x{0.2};
    CHECK(obj.value(x) == doctest::Approx(0.7 * std::log(0.7 / 0.2) +
                                          0.3 * std::log(0.3 / 0.8))
                              .epsilon(1e-12));

    NatGradConfig cfg;
    cfg.eta = 0.5;
    Trajectory tr = descend(m, {0.2}, obj, cfg);
    CHECK(tr.converged);
    CHECK(tr.monotone_decrease);
    // Fisher preconditioning makes the update x + eta (q - x).
    REQUIRE(tr.xs.size() >= 3);
    CHECK(tr.xs[1][0] == doctest::Approx(0.45).epsilon(1e-7));
    CHECK(tr.xs.back()[0] == doctest::Approx(0.7).epsilon(1e-6));
    CHECK(tr.objectives.back() <= 1e-10);
}

TEST_CASE("expression objectives differentiate numerically") {
    ParamBox box;
    box.axes = {{0.0, 1.0}};
    DifferentiableObjective obj =
        expression_objective(Expression::parse("(x1 - 0.3) ^ 2"), box);
    std::vector<double> x{0.8};
    CHECK(obj.value(x) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(obj.gradient(x)(0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("persistent clipping raises a boundary error") {
    ParametrizedModel m = ParametrizedModel::bernoulli();
    // Minimizing -x1 pushes the iterates against the upper box face.
    DifferentiableObjective obj =
        expression_objective(Expression::parse("0 - x1"), m.box());
    NatGradConfig cfg;
    cfg.eta = 2.0;
    CHECK_THROWS_AS(descend(m, {0.5}, obj, cfg), LeftDomain);
}
