#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "igkit/errors.hpp"
#include "igkit/modelspec.hpp"

#include <cstdio>
#include <fstream>

using namespace igkit;
using json = nlohmann::ordered_json;

TEST_CASE("builtin specs parse and evaluate") {
    json doc = json::parse(R"json({
        "space": {"finite": 2},
        "potential": {"builtin": {"name": "bernoulli"}}
    })json");
    ModelSpec spec = parse_model_spec(doc);
    std::vector<double> x{0.3};
    CHECK(spec.model.statistical());
    CHECK(spec.model.mass(x) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(spec.resolved["statistical"].get<bool>());
    CHECK(spec.resolved["param_box"].size() == 1);
}

TEST_CASE("expression specs need a parameter box") {
    json doc = json::parse(R"json({
        "space": {"grid": [0.0, 1.0]},
        "potential": {"expression": "exp(x1 * w1)"}
    })json");
    CHECK_THROWS_AS(parse_model_spec(doc), InvalidSpec);

    doc["param_box"] = json::array({json::array({-1.0, 1.0})});
    ModelSpec spec = parse_model_spec(doc);
    CHECK(spec.model.density_value(std::vector<double>{0.5}, Point::at_coord(0.2)) ==
          doctest::Approx(std::exp(0.1)).epsilon(1e-14));
}

TEST_CASE("unknown keys are rejected at every level") {
    json doc = json::parse(R"json({
        "space": {"finite": 2},
        "potential": {"builtin": {"name": "bernoulli"}},
        "flavor": "grape"
    })json");
    CHECK_THROWS_AS(parse_model_spec(doc), InvalidSpec);

    json nested = json::parse(R"json({
        "space": {"finite": 2, "padding": 3},
        "potential": {"builtin": {"name": "bernoulli"}}
    })json");
    CHECK_THROWS_AS(parse_model_spec(nested), InvalidSpec);

    json builtin = json::parse(R"json({
        "space": {"finite": 2},
        "potential": {"builtin": {"name": "bernoulli", "spice": 1}}
    })json");
    CHECK_THROWS_AS(parse_model_spec(builtin), InvalidSpec);
}

TEST_CASE("statistic and kernel blocks") {
    json doc = json::parse(R"json({
        "space": {"finite": 3},
        "potential": {"builtin": {"name": "categorical", "n": 3}},
        "statistic": {"classes": [[0], [1, 2]]},
        "kernel": {"rows": [[0.5, 0.5], [0.2, 0.8], [1.0, 0.0]]},
        "seed": 7
    })json");
    ModelSpec spec = parse_model_spec(doc);
    REQUIRE(spec.statistic.has_value());
    CHECK(spec.statistic->class_of(Point::at_atom(2)) == 1);
    REQUIRE(spec.kernel.has_value());
    CHECK(spec.kernel->entry(1, 1) == doctest::Approx(0.8));
    CHECK(spec.seed == 7);

    doc["kernel"]["rows"][0][0] = 0.9; // row no longer sums to one
    CHECK_THROWS_AS(parse_model_spec(doc), NotProbability);
}

TEST_CASE("step builtin and interval statistics") {
    json doc = json::parse(R"json({
        "space": {"finite": 4},
        "reference": {"weights": [0.1, 0.2, 0.3, 0.4]},
        "potential": {"builtin": {"name": "step", "tau": [1.0, -0.5],
                                  "x0": 0.5, "classes": [[0, 1], [2, 3]]}}
    })json");
    ModelSpec spec = parse_model_spec(doc);
    std::vector<double> x{0.8}, v{1.0};
    CHECK(spec.model.log_derivative(x, v, Point::at_atom(3)) == doctest::Approx(-0.5));

    json grid = json::parse(R"json({
        "space": {"grid": [0.0, 1.0]},
        "potential": {"builtin": {"name": "exp_root_decay", "k": 2}},
        "statistic": {"cuts": [0.5]}
    })json");
    ModelSpec g = parse_model_spec(grid);
    CHECK(g.statistic->class_of(Point::at_coord(0.7)) == 1);
}

TEST_CASE("files load and malformed json is wrapped") {
    std::string path = "modelspec_test_tmp.json";
    {
        std::ofstream f(path);
        f << R"json({"space": {"finite": 2}, "potential": {"builtin": {"name": "bernoulli"}}})json";
    }
    ModelSpec spec = load_model_spec(path);
    CHECK(spec.model.dim() == 1);

    {
        std::ofstream f(path);
        f << "{not json";
    }
    CHECK_THROWS_AS(load_model_spec(path), InvalidSpec);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_model_spec("no_such_file.json"), InvalidSpec);
}
