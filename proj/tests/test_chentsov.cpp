#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "igkit/chentsov.hpp"
#include "igkit/errors.hpp"

#include <cmath>
#include <map>

using namespace igkit;

namespace {

// p(x) = (x, x^2, 1 - x - x^2), lumping the first two atoms loses information.
ParametrizedModel quadratic_model() {
    Space sp = SampleSpace::finite(3);
    ParamBox box;
    box.axes = {{0.1, 0.6}};
    Expression e = Expression::parse(
        "x1 * ((w1 - 2) * (w1 - 3) / 2) - x1 ^ 2 * ((w1 - 1) * (w1 - 3)) + "
        "(1 - x1 - x1 ^ 2) * ((w1 - 1) * (w1 - 2) / 2)");
    return ParametrizedModel::from_expression(box, sp, Measure::reference(sp), e, true);
}

} // namespace

TEST_CASE("monotonicity gap against a hand-computed value") {
    ParametrizedModel m = quadratic_model();
    Statistic kappa = Statistic::from_class_lists(m.space(), {{0, 1}, {2}});
    double x = 0.3;
    // Full model: sum p_i'^2 / p_i with p = (x, x^2, 1 - x - x^2).
    double g = 1.0 / x + (2 * x) * (2 * x) / (x * x) +
               (1 + 2 * x) * (1 + 2 * x) / (1 - x - x * x);
    // Lumped: q = (x + x^2, 1 - x - x^2).
    double gt = (1 + 2 * x) * (1 + 2 * x) * (1.0 / (x + x * x) + 1.0 / (1 - x - x * x));
    std::vector<double> xv{x}, v{1.0};
    double gap = monotonicity_gap(m, kappa, xv, v);
    CHECK(gap == doctest::Approx(g - gt).epsilon(1e-6));
    CHECK(gap > 0.0);
    CHECK(monotonicity_gap(m, Statistic::identity(m.space()), xv, v) == 0.0);
}

TEST_CASE("information loss accounts for the whole gap") {
    ParametrizedModel m = quadratic_model();
    Statistic kappa = Statistic::from_class_lists(m.space(), {{0, 1}, {2}});
    std::vector<double> x{0.3}, v{1.0};
    InfoLoss il = information_loss(m, kappa, x, v);
    CHECK(il.loss > 0.0);
    CHECK(il.residual <= 1e-8);
}

TEST_CASE("invariance is only certified for sufficient statistics") {
    ParametrizedModel m = quadratic_model();
    Statistic kappa = Statistic::from_class_lists(m.space(), {{0, 1}, {2}});
    CHECK_THROWS_AS(invariance_report(m, kappa), NotSufficient);
}

TEST_CASE("span fitting recovers exact coefficients per bin") {
    std::vector<FieldSample> samples;
    for (int i = 0; i < 200; ++i) {
        double mass = (2 + i % 4 + 0.5) * 0.05;
        double b1 = 0.1 + 0.01 * i, b2 = std::sin(1.0 + i);
        samples.push_back({mass, {b1, b2}, 3.0 * b1 - 2.0 * b2});
    }
    ChentsovFit fit = fit_in_span(samples, 2);
    REQUIRE(fit.bins.size() == 4);
    for (const auto& b : fit.bins) {
        CHECK_FALSE(b.degenerate);
        CHECK(b.coeffs[0] == doctest::Approx(3.0).epsilon(1e-9));
        CHECK(b.coeffs[1] == doctest::Approx(-2.0).epsilon(1e-9));
        CHECK(b.residual <= 1e-9);
    }
}

TEST_CASE("rank-deficient bins are flagged, strict mode throws") {
    std::vector<FieldSample> samples;
    for (int i = 0; i < 50; ++i) {
        double b = 1.0 + 0.1 * i;
        samples.push_back({0.3, {b, 2.0 * b}, b}); // collinear basis columns
    }
    ChentsovFit fit = fit_in_span(samples, 2);
    REQUIRE(fit.bins.size() == 1);
    CHECK(fit.bins[0].degenerate);
    CHECK_THROWS_AS(fit_in_span(samples, 2, 0.05, true), IllConditioned);
}

TEST_CASE("step tensor sampling is deterministic and covers every bin") {
    std::vector<StepTensorSample> a = sample_step_tensors(123, 600);
    std::vector<StepTensorSample> b = sample_step_tensors(123, 600);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].mass == b[i].mass);
        CHECK(a[i].a == b[i].a);
        CHECK(a[i].fisher == b[i].fisher);
        CHECK(a[i].ac == b[i].ac);
    }
    std::map<long, int> counts;
    for (const auto& s : sample_step_tensors(7, 3000))
        ++counts[std::lround(s.mass / 0.05 - 0.5)];
    CHECK(counts.size() == 28);
    for (const auto& [bin, n] : counts) CHECK(n >= 50);
}

TEST_CASE("step moments reduce to weighted powers of the slopes") {
    std::vector<StepTensorSample> s = sample_step_tensors(99, 20);
    for (const auto& smp : s) {
        // At the anchor the n-th moment is sum d_i tau_i^n; the first three
        // are reported directly.
        CHECK(std::isfinite(smp.a));
        CHECK(smp.fisher >= 0.0);
    }
    Space sp = SampleSpace::finite(2);
    Measure mu = Measure::from_weights(sp, {0.4, 0.6});
    Statistic part = Statistic::from_class_lists(sp, {{0}, {1}});
    ParametrizedModel m = make_step_model(mu, part, {1.2, -0.7}, 0.5);
    std::vector<double> x{0.5}, v{1.0};
    for (int n = 1; n <= 3; ++n) {
        double oracle = 0.4 * std::pow(1.2, n) + 0.6 * std::pow(-0.7, n);
        CHECK(moment_tensor(m, x, v, n).value == doctest::Approx(oracle).epsilon(1e-12));
    }
}
