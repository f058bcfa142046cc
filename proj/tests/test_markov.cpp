#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "igkit/errors.hpp"
#include "igkit/markov.hpp"

#include <cmath>

using namespace igkit;

namespace {

// p(x) = (x, (1-x)/2, (1-x)/2): lumping atoms 1 and 2 is sufficient.
ParametrizedModel split_tail_model() {
    Space sp = SampleSpace::finite(3);
    ParamBox box;
    box.axes = {{0.05, 0.95}};
    Expression e = Expression::parse(
        "x1 * ((w1 - 2) * (w1 - 3) / 2) + "
        "((1 - x1) / 2) * ((w1 - 1) * (w1 - 2) / 2 - (w1 - 1) * (w1 - 3))");
    return ParametrizedModel::from_expression(box, sp, Measure::reference(sp), e, true);
}

} // namespace

TEST_CASE("kernel construction and algebra") {
    Space s2 = SampleSpace::finite(2), s3 = SampleSpace::finite(3);
    CHECK_THROWS_AS(MarkovKernel::from_matrix(s2, s3, {{0.5, 0.5, 0.1}, {0, 0, 1}}),
                    NotProbability);
    MarkovKernel k =
        MarkovKernel::from_matrix(s2, s3, {{0.2, 0.3, 0.5}, {0.0, 0.4, 0.6}});

    Measure nu = Measure::from_weights(s2, {0.25, 0.75});
    Measure pushed = k.pushforward(nu);
    // (0.25, 0.75) * K computed by hand
    CHECK(pushed.density_value(Point::at_atom(0)) == doctest::Approx(0.05));
    CHECK(pushed.density_value(Point::at_atom(1)) == doctest::Approx(0.375));
    CHECK(pushed.density_value(Point::at_atom(2)) == doctest::Approx(0.575));

    MarkovKernel back = MarkovKernel::from_matrix(
        s3, s2, {{1.0, 0.0}, {0.5, 0.5}, {0.0, 1.0}});
    MarkovKernel comp = k.compose(back);
    CHECK(comp.entry(0, 0) == doctest::Approx(0.2 + 0.15).epsilon(1e-15));
    CHECK(comp.entry(1, 1) == doctest::Approx(0.2 + 0.6).epsilon(1e-15));
}

TEST_CASE("congruent embeddings are exactly the left inverses") {
    Space s3 = SampleSpace::finite(3);
    Statistic kappa = Statistic::from_class_lists(s3, {{0}, {1, 2}});
    MarkovKernel emb = congruent_embedding(kappa, {{1.0}, {0.4, 0.6}});
    CHECK(left_inverse_check(emb, kappa));
    CHECK(emb.entry(1, 1) == doctest::Approx(0.4));
    CHECK(emb.entry(1, 0) == 0.0);

    MarkovKernel dense = MarkovKernel::from_matrix(
        SampleSpace::finite(2), s3,
        {{0.2, 0.4, 0.4}, {0.5, 0.25, 0.25}});
    CHECK_FALSE(left_inverse_check(dense, kappa));
    CHECK_THROWS_AS(congruent_embedding(kappa, {{1.0}, {0.0, 0.0}}), ZeroRow);
    CHECK_THROWS_AS(congruent_embedding(kappa, {{1.0}, {1.0}}), SupportViolation);
}

TEST_CASE("sufficiency verdicts") {
    ParametrizedModel m = split_tail_model();
    Statistic kappa = Statistic::from_class_lists(m.space(), {{0}, {1, 2}});
    SufficiencyVerdict v = check_sufficiency(m, kappa);
    CHECK(v.verdict == SufficiencyVerdict::Verdict::Sufficient);

    ParametrizedModel cat = ParametrizedModel::categorical(3);
    Statistic lump = Statistic::from_class_lists(cat.space(), {{0, 1}, {2}});
    SufficiencyVerdict bad = check_sufficiency(cat, lump);
    CHECK(bad.verdict == SufficiencyVerdict::Verdict::NotSufficient);
    CHECK(bad.has_witness);
}

TEST_CASE("pushforward models carry exact class masses") {
    ParametrizedModel m = split_tail_model();
    Statistic kappa = Statistic::from_class_lists(m.space(), {{0}, {1, 2}});
    ParametrizedModel pm = pushforward_model(m, kappa);
    std::vector<double> x{0.3}, v{1.0};
    Measure q = pm.density_at(x);
    CHECK(q.density_value(Point::at_atom(0)) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(q.density_value(Point::at_atom(1)) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(q.mass() == doctest::Approx(1.0).epsilon(1e-12));
    // Fiber average of dlog over the lumped class.
    double d1 = m.log_derivative(x, v, Point::at_atom(1));
    double d2 = m.log_derivative(x, v, Point::at_atom(2));
    Measure p = m.density_at(x);
    double avg = (p.density_value(Point::at_atom(1)) * d1 +
                  p.density_value(Point::at_atom(2)) * d2) /
                 0.7;
    CHECK(pm.log_derivative(x, v, Point::at_atom(1)) ==
          doctest::Approx(avg).epsilon(1e-9));
}

TEST_CASE("lift and decomposition of a positive kernel") {
    ParametrizedModel m = ParametrizedModel::bernoulli({0.1, 0.9});
    Space s3 = SampleSpace::finite(3);
    MarkovKernel k = MarkovKernel::from_matrix(
        m.space(), s3, {{0.6, 0.3, 0.1}, {0.2, 0.3, 0.5}});
    Measure mu2 = Measure::uniform_probability(s3);

    ParametrizedModel lift = lift_model_by_kernel(m, k, mu2);
    std::vector<double> x{0.3};
    CHECK(lift.mass(x) == doctest::Approx(1.0).epsilon(1e-12));

    KernelDecomposition d = decompose_markov_morphism(m, k, mu2);
    CHECK(d.residual <= 1e-10);
    CHECK(d.pi1_sufficiency.verdict == SufficiencyVerdict::Verdict::Sufficient);

    // Marginal of the lift reproduces the kernel pushforward by hand.
    Measure joint = lift.density_at(x);
    double m0 = 0.0;
    for (int j = 0; j < 3; ++j)
        m0 += joint.density_value(Point::pair({true, 0, 0.0}, {true, j, 0.0}));
    CHECK(m0 == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("conditional distributions normalize the fibers") {
    ParametrizedModel m = ParametrizedModel::bernoulli({0.1, 0.9});
    Space s3 = SampleSpace::finite(3);
    MarkovKernel k = MarkovKernel::from_matrix(
        m.space(), s3, {{0.6, 0.3, 0.1}, {0.2, 0.3, 0.5}});
    ParametrizedModel lift = lift_model_by_kernel(m, k, Measure::uniform_probability(s3));
    std::vector<double> x{0.3};
    std::vector<Measure> cond = conditional_distribution(lift, x);
    REQUIRE(cond.size() == 2);
    CHECK(cond[0].mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cond[0].density_value(Point::at_atom(0)) == doctest::Approx(0.6).epsilon(1e-12));
}
