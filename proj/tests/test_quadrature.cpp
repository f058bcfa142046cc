#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "igkit/errors.hpp"
#include "igkit/quadrature.hpp"

#include <cmath>

using namespace igkit;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
    const auto& [nodes, weights] = gauss_legendre(16);
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        s += weights[i] * std::pow(nodes[i], 8);
    CHECK(s == doctest::Approx(2.0 / 9.0).epsilon(1e-14));

    QuadResult r = integrate_interval([](double t) { return t * t * t * t * t; }, 0.0, 1.0);
    CHECK(r.status == QuadStatus::Converged);
    CHECK(r.value == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("integrable endpoint singularity converges") {
    QuadResult r = integrate_interval([](double t) { return 1.0 / std::sqrt(t); }, 0.0, 1.0);
    CHECK(r.status == QuadStatus::Converged);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));

    r = integrate_interval([](double t) { return std::log(t); }, 0.0, 1.0);
    CHECK(r.status == QuadStatus::Converged);
    CHECK(r.value == doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("divergent integrands are flagged, not averaged away") {
    QuadResult r = integrate_interval([](double t) { return 1.0 / t; }, 0.0, 1.0);
    CHECK(r.status == QuadStatus::Divergent);
    CHECK(r.level_values.size() > 1);
    CHECK(r.level_values.back() > r.level_values.front());

    CHECK_THROWS_AS(
        integrate_interval_checked([](double t) { return 1.0 / (t * t); }, 0.0, 1.0),
        DivergentIntegral);
}

TEST_CASE("config validation rejects nonsense") {
    QuadratureConfig cfg;
    cfg.base_panels = 1;
    CHECK_THROWS_AS(cfg.validate(), InvalidSpec);
    CHECK_THROWS_AS(integrate_interval([](double) { return 1.0; }, 1.0, 0.0),
                    InvalidSpec);
}
