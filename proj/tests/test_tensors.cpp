#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "igkit/tensors.hpp"

#include <cmath>

using namespace igkit;

namespace {

// Brute-force tensor oracle on an enumerable space: sum density * product
// of log-derivatives over all atoms.
double brute_moment(const ParametrizedModel& m, const std::vector<double>& x,
                    const std::vector<double>& v, int order) {
    Measure p = m.density_at(x);
    double s = 0.0;
    for (const Point& w : m.space()->atoms())
        s += p.density_value(w) * std::pow(m.log_derivative(x, v, w), order);
    return s;
}

} // namespace

TEST_CASE("bernoulli closed forms") {
    ParametrizedModel m = ParametrizedModel::bernoulli();
    std::vector<double> x{0.3}, v{1.0};
    CHECK(one_form_A(m, x, v).value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(fisher_form(m, x, v, v).value ==
          doctest::Approx(1.0 / (0.3 * 0.7)).epsilon(1e-12));
    CHECK(ac_tensor(m, x, v, v, v).value ==
          doctest::Approx(1.0 / 0.09 - 1.0 / 0.49).epsilon(1e-10));
}

TEST_CASE("fisher matrix matches the brute-force sum") {
    ParametrizedModel m = ParametrizedModel::categorical(3);
    std::vector<double> x{0.25, 0.45};
    Eigen::MatrixXd g = fisher_matrix(m, x);
    REQUIRE(g.rows() == 2);
    CHECK(g(0, 1) == doctest::Approx(g(1, 0)).epsilon(1e-12));

    Measure p = m.density_at(x);
    std::vector<std::vector<double>> e{{1.0, 0.0}, {0.0, 1.0}};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double s = 0.0;
            for (const Point& w : m.space()->atoms())
                s += p.density_value(w) * m.log_derivative(x, e[i], w) *
                     m.log_derivative(x, e[j], w);
            CHECK(g(i, j) == doctest::Approx(s).epsilon(1e-10));
        }
}

TEST_CASE("moment tensors agree with direct summation") {
    Space sp = SampleSpace::finite(4);
    Measure mu = Measure::from_weights(sp, {0.1, 0.2, 0.3, 0.4});
    Statistic part = Statistic::from_class_lists(sp, {{0, 1}, {2}, {3}});
    ParametrizedModel m = make_step_model(mu, part, {1.0, -2.0, 0.5}, 0.5);
    std::vector<double> x{0.7}, v{1.0};
    for (int n = 1; n <= 3; ++n)
        CHECK(moment_tensor(m, x, v, n).value ==
              doctest::Approx(brute_moment(m, x, v, n)).epsilon(1e-12));
}

TEST_CASE("one-form equals the mass derivative") {
    Measure leb = Measure::reference(SampleSpace::grid(0.0, 1.0));
    ParametrizedModel m = ParametrizedModel::scaling(leb);
    std::vector<double> x{0.4}, v{2.0};
    // mass(x) = x, so d/dV mass = 2.
    CHECK(one_form_A(m, x, v).value == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fisher_form(m, x, v, v).value == doctest::Approx(4.0 / 0.4).epsilon(1e-9));
}

TEST_CASE("zero directions short-circuit") {
    ParametrizedModel m = ParametrizedModel::bernoulli();
    std::vector<double> x{0.3}, z{0.0}, v{1.0};
    CHECK(fisher_form(m, x, z, v).value == 0.0);
    CHECK(ac_tensor(m, x, v, z, v).value == 0.0);
}
