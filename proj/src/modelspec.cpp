#include "igkit/modelspec.hpp"

#include "igkit/errors.hpp"

#include <fstream>

namespace igkit {

namespace {

using json = nlohmann::ordered_json;

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
    if (!j.is_object()) throw InvalidSpec(where + " must be an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw InvalidSpec("unknown key '" + key + "' in " + where);
    }
}

QuadratureConfig parse_quadrature(const json& j) {
    check_keys(j,
               {"base_panels", "nodes_per_panel", "refinement_levels",
                "divergence_growth_threshold", "relative_tolerance"},
               "quadrature");
    QuadratureConfig q;
    if (j.contains("base_panels")) q.base_panels = j["base_panels"].get<int>();
    if (j.contains("nodes_per_panel"))
        q.nodes_per_panel = j["nodes_per_panel"].get<int>();
    if (j.contains("refinement_levels"))
        q.refinement_levels = j["refinement_levels"].get<int>();
    if (j.contains("divergence_growth_threshold"))
        q.divergence_growth_threshold = j["divergence_growth_threshold"].get<double>();
    if (j.contains("relative_tolerance"))
        q.relative_tolerance = j["relative_tolerance"].get<double>();
    q.validate();
    return q;
}

Space parse_space(const json& j, const QuadratureConfig& quad) {
    check_keys(j, {"finite", "grid", "product"}, "space");
    if (j.size() != 1) throw InvalidSpec("space needs exactly one of finite/grid/product");
    if (j.contains("finite")) {
        int n = j["finite"].get<int>();
        return SampleSpace::finite(n);
    }
    if (j.contains("grid")) {
        const json& g = j["grid"];
        if (!g.is_array() || g.size() != 2)
            throw InvalidSpec("grid must be [lower, upper]");
        return SampleSpace::grid(g[0].get<double>(), g[1].get<double>(), quad);
    }
    const json& p = j["product"];
    if (!p.is_array() || p.size() != 2)
        throw InvalidSpec("product must list exactly two factor spaces");
    return SampleSpace::product(parse_space(p[0], quad), parse_space(p[1], quad));
}

Measure parse_reference(const json& j, const Space& space) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "counting" || s == "lebesgue") return Measure::reference(space);
        if (s == "uniform") return Measure::uniform_probability(space);
        throw InvalidSpec("reference string must be counting, lebesgue or uniform");
    }
    check_keys(j, {"weights", "density"}, "reference");
    if (j.size() != 1) throw InvalidSpec("reference needs weights or density");
    if (j.contains("weights"))
        return Measure::from_weights(space, j["weights"].get<std::vector<double>>());
    Expression e = Expression::parse(j["density"].get<std::string>());
    if (e.param_dim() > 0)
        throw InvalidSpec("reference density may not depend on parameters");
    return Measure::from_density(space, [e](const Point& w) {
        std::vector<double> none;
        return e.eval(none, w);
    });
}

ParamBox parse_box(const json& j) {
    if (!j.is_array() || j.empty()) throw InvalidSpec("param_box must be a list of axes");
    ParamBox box;
    for (const json& a : j) {
        if (!a.is_array() || a.size() != 2)
            throw InvalidSpec("each param_box axis must be [lower, upper]");
        box.axes.push_back({a[0].get<double>(), a[1].get<double>()});
    }
    return box;
}

Statistic parse_statistic(const json& j, const Space& space) {
    if (j.is_string()) {
        if (j.get<std::string>() == "identity") return Statistic::identity(space);
        throw InvalidSpec("statistic string must be 'identity'");
    }
    check_keys(j, {"classes", "cuts", "projection"}, "statistic");
    if (j.size() != 1)
        throw InvalidSpec("statistic needs exactly one of classes/cuts/projection");
    if (j.contains("classes"))
        return Statistic::from_class_lists(
            space, j["classes"].get<std::vector<std::vector<int>>>());
    if (j.contains("cuts"))
        return Statistic::interval_partition(space, j["cuts"].get<std::vector<double>>());
    return Statistic::projection(space, j["projection"].get<int>());
}

MarkovKernel parse_kernel(const json& j, const Space& source) {
    check_keys(j, {"rows"}, "kernel");
    auto rows = j["rows"].get<std::vector<std::vector<double>>>();
    if (rows.empty()) throw InvalidSpec("kernel needs at least one row");
    Space target = SampleSpace::finite(static_cast<int>(rows[0].size()));
    return MarkovKernel::from_matrix(source, target, std::move(rows));
}

ParametrizedModel parse_builtin(const json& b, const Space& space, const Measure& ref,
                                const json& doc) {
    check_keys(b, {"name", "n", "k", "box", "h", "tau", "x0", "classes"}, "builtin");
    std::string name = b.at("name").get<std::string>();
    auto box_pair = [&](std::pair<double, double> dflt) {
        if (!b.contains("box")) return dflt;
        const json& bx = b["box"];
        if (!bx.is_array() || bx.size() != 2)
            throw InvalidSpec("builtin box must be [lower, upper]");
        return std::make_pair(bx[0].get<double>(), bx[1].get<double>());
    };
    if (name == "bernoulli")
        return ParametrizedModel::bernoulli(box_pair({1e-4, 1.0 - 1e-4}));
    if (name == "categorical") return ParametrizedModel::categorical(b.at("n").get<int>());
    if (name == "exponential") {
        if (!doc.contains("param_box"))
            throw InvalidSpec("exponential builtin needs a param_box");
        return ParametrizedModel::exponential_family(
            space, b.at("h").get<std::vector<std::vector<double>>>(),
            parse_box(doc["param_box"]));
    }
    if (name == "scaling") return ParametrizedModel::scaling(ref);
    if (name == "exp_root_decay")
        return ParametrizedModel::exp_root_decay(b.at("k").get<int>(),
                                                 box_pair({-1.5, 1.5}));
    if (name == "step") {
        Statistic part = Statistic::from_class_lists(
            space, b.at("classes").get<std::vector<std::vector<int>>>());
        return make_step_model(ref, part, b.at("tau").get<std::vector<double>>(),
                               b.at("x0").get<double>());
    }
    throw InvalidSpec("unknown builtin '" + name + "'");
}

} // namespace

ModelSpec parse_model_spec(const json& doc) {
    check_keys(doc,
               {"space", "reference", "potential", "param_box", "statistical",
                "statistic", "kernel", "quadrature", "seed"},
               "model spec");
    if (!doc.contains("space")) throw InvalidSpec("missing 'space'");
    if (!doc.contains("potential")) throw InvalidSpec("missing 'potential'");

    QuadratureConfig quad;
    if (doc.contains("quadrature")) quad = parse_quadrature(doc["quadrature"]);
    Space space = parse_space(doc["space"], quad);
    Measure ref = doc.contains("reference") ? parse_reference(doc["reference"], space)
                                            : Measure::reference(space);
    bool statistical =
        doc.contains("statistical") && doc["statistical"].get<bool>();

    const json& pot = doc["potential"];
    check_keys(pot, {"expression", "builtin"}, "potential");
    if (pot.size() != 1)
        throw InvalidSpec("potential needs exactly one of expression/builtin");

    ModelSpec out;
    if (pot.contains("expression")) {
        if (!doc.contains("param_box"))
            throw InvalidSpec("expression potentials need a param_box");
        out.model = ParametrizedModel::from_expression(
            parse_box(doc["param_box"]), space, ref,
            Expression::parse(pot["expression"].get<std::string>()), statistical);
    } else {
        out.model = parse_builtin(pot["builtin"], space, ref, doc);
        if (statistical && !out.model.statistical())
            throw InvalidSpec("builtin is not a statistical family");
    }

    if (doc.contains("statistic"))
        out.statistic = parse_statistic(doc["statistic"], space);
    if (doc.contains("kernel")) out.kernel = parse_kernel(doc["kernel"], space);
    if (doc.contains("seed")) out.seed = doc["seed"].get<std::uint64_t>();

    out.resolved = doc;
    out.resolved["statistical"] = out.model.statistical();
    json box = json::array();
    for (auto [lo, hi] : out.model.box().axes) box.push_back(json::array({lo, hi}));
    out.resolved["param_box"] = box;
    return out;
}

ModelSpec load_model_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidSpec("cannot open spec file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidSpec(std::string("malformed JSON: ") + e.what());
    }
    return parse_model_spec(doc);
}

} // namespace igkit
