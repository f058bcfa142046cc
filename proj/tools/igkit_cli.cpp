#include "igkit/acceptance.hpp"
#include "igkit/chentsov.hpp"
#include "igkit/errors.hpp"
#include "igkit/modelspec.hpp"
#include "igkit/natgrad.hpp"
#include "igkit/orlicz.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using json = nlohmann::ordered_json;
using namespace igkit;

constexpr const char* kVersion = "1.0.0";

struct Tolerances {
    double sufficient_below = 1e-7;
    double not_sufficient_above = 1e-4;
    double invariance_abs = 1e-8;
    double infoloss_residual = 1e-8;
    double decomposition_residual = 1e-10;
    double fit_residual = 1e-8;
};

Tolerances profile_tolerances(const std::string& profile) {
    Tolerances t;
    if (profile == "strict") {
        t.sufficient_below = 1e-9;
        t.not_sufficient_above = 1e-6;
        t.invariance_abs = 1e-10;
        t.infoloss_residual = 1e-9;
        t.decomposition_residual = 1e-11;
        t.fit_residual = 1e-9;
    } else if (profile != "default") {
        throw InvalidSpec("tolerance profile must be strict or default");
    }
    return t;
}

std::vector<double> parse_x(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw InvalidSpec("bad --x value: " + tok);
        }
    }
    if (out.empty()) throw InvalidSpec("--x needs at least one value");
    return out;
}

std::string write_report(const std::string& out_dir, const std::string& name,
                         const json& body) {
    std::filesystem::create_directories(out_dir);
    std::string path = out_dir + "/" + name + ".json";
    std::ofstream f(path);
    f << body.dump(2) << "\n";
    if (!f) throw InvalidSpec("cannot write report: " + path);
    return path;
}

json report_shell(const std::string& subcommand, const ModelSpec* spec) {
    json j;
    j["version"] = kVersion;
    j["subcommand"] = subcommand;
    if (spec) j["spec"] = spec->resolved;
    return j;
}

json verdict_json(const OrliczVerdict& v) {
    json j;
    switch (v.status) {
        case OrliczVerdict::Status::Holds: j["status"] = "holds"; break;
        case OrliczVerdict::Status::Fails: j["status"] = "fails"; break;
        case OrliczVerdict::Status::Inconclusive: j["status"] = "inconclusive"; break;
    }
    if (v.holds()) j["witness"] = v.witness;
    json trace = json::array();
    for (const auto& t : v.trace) {
        json e;
        e["exponent"] = t.exponent;
        e["value"] = std::isfinite(t.value) ? json(t.value) : json("inf");
        e["converged"] = t.status == QuadStatus::Converged;
        trace.push_back(std::move(e));
    }
    j["trace"] = std::move(trace);
    return j;
}

std::vector<double> default_x(const ParametrizedModel& m, const std::string& x_csv) {
    return x_csv.empty() ? m.box().midpoint() : parse_x(x_csv);
}

std::vector<double> ones(int d) { return std::vector<double>(d, 1.0); }

const Statistic& require_statistic(const ModelSpec& spec) {
    if (!spec.statistic) throw InvalidSpec("this subcommand needs a 'statistic' block");
    return *spec.statistic;
}

int run_tensors(const ModelSpec& spec, const std::string& x_csv,
                const std::string& out) {
    const ParametrizedModel& m = spec.model;
    std::vector<double> x = default_x(m, x_csv);
    int d = m.dim();
    json rep = report_shell("tensors", &spec);
    rep["x"] = x;

    std::vector<std::vector<double>> basis(d, std::vector<double>(d, 0.0));
    for (int i = 0; i < d; ++i) basis[i][i] = 1.0;
    json a = json::array();
    for (int i = 0; i < d; ++i) a.push_back(one_form_A(m, x, basis[i]).value);
    rep["one_form"] = a;

    Eigen::MatrixXd g = fisher_matrix(m, x);
    json gm = json::array();
    for (int i = 0; i < d; ++i) {
        json row = json::array();
        for (int j = 0; j < d; ++j) row.push_back(g(i, j));
        gm.push_back(std::move(row));
    }
    rep["fisher"] = gm;

    json ac = json::array();
    for (int i = 0; i < d; ++i)
        ac.push_back(ac_tensor(m, x, basis[i], basis[i], basis[i]).value);
    rep["amari_chentsov_diagonal"] = ac;

    std::cout << "fisher[0][0] = " << g(0, 0) << "\n";
    write_report(out, "tensors", rep);
    return 0;
}

int run_integrability(const ModelSpec& spec, int k, const std::string& out) {
    IntegrabilityReport r = check_k_integrability(spec.model, k);
    json rep = report_shell("integrability", &spec);
    rep["k"] = k;
    const char* verdict = r.verdict == IntegrabilityReport::Verdict::Pass ? "pass"
                          : r.verdict == IntegrabilityReport::Verdict::Fail
                              ? "fail"
                              : "divergent";
    rep["verdict"] = verdict;
    rep["max_jump"] = r.max_jump;
    if (r.witness_point >= 0) {
        rep["witness_point"] = r.lattice[r.witness_point];
        rep["witness_direction"] = r.witness_direction;
    }
    rep["lattice"] = r.lattice;
    rep["norms"] = r.norms;
    std::cout << "integrability k=" << k << ": " << verdict << "\n";
    write_report(out, "integrability", rep);
    return r.verdict == IntegrabilityReport::Verdict::Pass ? 0 : 1;
}

json sufficiency_json(const SufficiencyVerdict& v) {
    json j;
    switch (v.verdict) {
        case SufficiencyVerdict::Verdict::Sufficient: j["verdict"] = "sufficient"; break;
        case SufficiencyVerdict::Verdict::NotSufficient:
            j["verdict"] = "not_sufficient";
            break;
        case SufficiencyVerdict::Verdict::Inconclusive:
            j["verdict"] = "inconclusive";
            break;
    }
    j["max_deviation"] = v.max_deviation;
    if (v.has_witness) {
        j["witness_x"] = v.witness_x;
        j["witness_x2"] = v.witness_x2;
    }
    return j;
}

int run_sufficiency(const ModelSpec& spec, const Tolerances& tol,
                    const std::string& out) {
    SufficiencyConfig cfg;
    cfg.sufficient_below = tol.sufficient_below;
    cfg.not_sufficient_above = tol.not_sufficient_above;
    SufficiencyVerdict v = check_sufficiency(spec.model, require_statistic(spec), cfg);
    json rep = report_shell("sufficiency", &spec);
    rep["result"] = sufficiency_json(v);
    std::cout << "sufficiency: " << rep["result"]["verdict"].get<std::string>() << "\n";
    write_report(out, "sufficiency", rep);
    return v.verdict == SufficiencyVerdict::Verdict::Sufficient ? 0 : 1;
}

int run_invariance(const ModelSpec& spec, const Tolerances& tol,
                   const std::string& out) {
    InvarianceReport r = invariance_report(spec.model, require_statistic(spec));
    json rep = report_shell("invariance", &spec);
    rep["one_form_abs"] = r.a_abs;
    rep["fisher_abs"] = r.fisher_abs;
    rep["amari_chentsov_abs"] = r.ac_abs;
    rep["tolerance"] = tol.invariance_abs;
    bool ok = r.worst_abs() <= tol.invariance_abs;
    rep["passed"] = ok;
    std::cout << "invariance max deviation = " << r.worst_abs() << "\n";
    write_report(out, "invariance", rep);
    return ok ? 0 : 1;
}

int run_monotonicity(const ModelSpec& spec, const std::string& x_csv,
                     const std::string& out) {
    const ParametrizedModel& m = spec.model;
    std::vector<double> x = default_x(m, x_csv);
    double gap = monotonicity_gap(m, require_statistic(spec), x, ones(m.dim()));
    json rep = report_shell("monotonicity", &spec);
    rep["x"] = x;
    rep["gap"] = gap;
    bool ok = gap >= -1e-9;
    rep["passed"] = ok;
    std::cout << "monotonicity gap = " << gap << "\n";
    write_report(out, "monotonicity", rep);
    return ok ? 0 : 1;
}

int run_infoloss(const ModelSpec& spec, const std::string& x_csv, const Tolerances& tol,
                 const std::string& out) {
    const ParametrizedModel& m = spec.model;
    std::vector<double> x = default_x(m, x_csv);
    InfoLoss il = information_loss(m, require_statistic(spec), x, ones(m.dim()));
    json rep = report_shell("infoloss", &spec);
    rep["x"] = x;
    rep["loss"] = il.loss;
    rep["identity_residual"] = il.residual;
    bool ok = il.residual <= tol.infoloss_residual;
    rep["passed"] = ok;
    std::cout << "information loss = " << il.loss << " (residual " << il.residual
              << ")\n";
    write_report(out, "infoloss", rep);
    return ok ? 0 : 1;
}

int run_decompose(const ModelSpec& spec, const Tolerances& tol,
                  const std::string& out) {
    if (!spec.kernel) throw InvalidSpec("this subcommand needs a 'kernel' block");
    Measure mu2 = Measure::uniform_probability(spec.kernel->target());
    KernelDecomposition d = decompose_markov_morphism(spec.model, *spec.kernel, mu2);
    json rep = report_shell("decompose-kernel", &spec);
    rep["residual"] = d.residual;
    rep["pi1_sufficiency"] = sufficiency_json(d.pi1_sufficiency);
    bool ok = d.residual <= tol.decomposition_residual &&
              d.pi1_sufficiency.verdict == SufficiencyVerdict::Verdict::Sufficient;
    rep["passed"] = ok;
    std::cout << "decomposition residual = " << d.residual << "\n";
    write_report(out, "decompose-kernel", rep);
    return ok ? 0 : 1;
}

int run_chentsov_fit(int order, std::uint64_t seed, const Tolerances& tol,
                     const std::string& out) {
    std::vector<StepTensorSample> s = sample_step_tensors(seed, 3000);
    std::vector<FieldSample> samples;
    for (const auto& t : s) {
        FieldSample fs;
        fs.mass = t.mass;
        if (order == 1) {
            fs.basis = {t.a};
            fs.value = t.a;
        } else if (order == 2) {
            fs.basis = {t.fisher, t.a * t.a};
            fs.value = t.fisher;
        } else {
            fs.basis = {t.ac, t.a * t.a * t.a, t.a * t.fisher};
            fs.value = t.ac;
        }
        samples.push_back(std::move(fs));
    }
    ChentsovFit fit = fit_in_span(samples, order == 1 ? 1 : order);
    json rep = report_shell("chentsov-fit", nullptr);
    rep["order"] = order;
    rep["seed"] = seed;
    json bins = json::array();
    for (const auto& b : fit.bins) {
        json e;
        e["mass"] = b.mass_center;
        e["count"] = b.count;
        e["coeffs"] = b.coeffs;
        e["residual"] = b.residual;
        e["degenerate"] = b.degenerate;
        bins.push_back(std::move(e));
    }
    rep["bins"] = std::move(bins);
    bool ok = fit.max_residual() <= tol.fit_residual;
    rep["passed"] = ok;
    std::cout << "chentsov fit order " << order << ": max residual "
              << fit.max_residual() << "\n";
    write_report(out, "chentsov-fit", rep);
    return ok ? 0 : 1;
}

int run_orlicz(const ModelSpec& spec, const std::string& mode,
               const std::string& x_csv, const std::string& out) {
    const ParametrizedModel& m = spec.model;
    std::vector<double> x = default_x(m, x_csv);
    Measure ref = m.reference();
    ParametrizedModel mm = m;
    std::vector<double> xv = x;
    ScalarFn logdens = [mm, xv](const Point& w) {
        return std::log(mm.density_value(xv, w));
    };

    json rep = report_shell("orlicz", &spec);
    rep["mode"] = mode;
    rep["x"] = x;
    int rc = 0;

    if (mode == "norm") {
        try {
            double n = orlicz_norm(logdens, ref, YoungFunction::cosh_minus_one());
            rep["norm"] = n;
            std::cout << "orlicz norm = " << n << "\n";
        } catch (const NotInOrliczSpace& e) {
            rep["norm"] = "infinite";
            rep["error"] = e.what();
            std::cout << "orlicz norm: not in the Orlicz space\n";
            rc = 1;
        }
    } else if (mode == "tangent") {
        OrliczVerdict v = in_exponential_tangent(logdens, ref);
        rep["result"] = verdict_json(v);
        std::cout << "exponential tangent: "
                  << rep["result"]["status"].get<std::string>() << "\n";
        rc = v.holds() ? 0 : 1;
    } else if (mode == "preceq" || mode == "similar") {
        Measure px = m.density_at(x);
        OrliczVerdict v = mode == "preceq" ? preceq(px, ref) : similar(px, ref);
        rep["result"] = verdict_json(v);
        std::cout << mode << ": " << rep["result"]["status"].get<std::string>() << "\n";
        rc = v.holds() ? 0 : 1;
    } else if (mode == "econv") {
        std::vector<ScalarFn> gn;
        for (int n = 1; n <= 8; ++n) {
            std::vector<double> xn = x;
            for (double& c : xn) c *= static_cast<double>(n) / (n + 1);
            gn.push_back([mm, xn](const Point& w) { return mm.density_value(xn, w); });
        }
        EConvReport r = e_convergence_diagnostic(
            gn, [mm, xv](const Point& w) { return mm.density_value(xv, w); }, ref);
        json rows = json::array();
        for (const auto& row : r.rows) {
            json e;
            e["n"] = row.n;
            e["l1"] = row.l1;
            e["ratio_norms"] = row.ratio_norms;
            e["inverse_ratio_norms"] = row.inv_ratio_norms;
            e["diverged"] = row.diverged;
            rows.push_back(std::move(e));
        }
        rep["rows"] = std::move(rows);
        rep["l1_tail_monotone"] = r.l1_tail_monotone;
        rep["all_finite"] = r.all_finite;
        std::cout << "e-convergence diagnostic: "
                  << (r.all_finite ? "all entries finite" : "divergent entries")
                  << "\n";
        rc = r.all_finite ? 0 : 1;
    } else if (mode == "segment") {
        SegmentReport r = segment_similarity([](const Point&) { return 0.0; }, logdens,
                                             ref, {0.25, 0.5, 0.75});
        rep["interior_pairwise_similar"] = r.interior_pairwise_similar;
        rep["endpoints_dominate"] = r.endpoints_dominate;
        std::cout << "segment: interior similar = "
                  << (r.interior_pairwise_similar ? "yes" : "no")
                  << ", endpoints dominate = "
                  << (r.endpoints_dominate ? "yes" : "no") << "\n";
        rc = r.interior_pairwise_similar && r.endpoints_dominate ? 0 : 1;
    } else {
        throw InvalidSpec("unknown orlicz mode: " + mode);
    }
    write_report(out, "orlicz", rep);
    return rc;
}

int run_natgrad(const ModelSpec& spec, const std::string& x_csv,
                const std::string& out) {
    const ParametrizedModel& m = spec.model;
    if (!m.space()->enumerable())
        throw InvalidSpec("natgrad subcommand needs an enumerable sample space");
    std::vector<double> x0 = x_csv.empty()
                                 ? m.box().midpoint()
                                 : parse_x(x_csv);
    Measure target = Measure::uniform_probability(m.space());
    NatGradConfig cfg;
    cfg.eta = 0.5;
    Trajectory tr = descend(m, x0, kl_to_target(m, target), cfg);

    std::filesystem::create_directories(out);
    std::string csv = out + "/natgrad_trajectory.csv";
    {
        std::ofstream f(csv);
        f << "iteration";
        for (int k = 0; k < m.dim(); ++k) f << ",x" << (k + 1);
        f << ",objective,step_norm\n";
        f.precision(17);
        for (std::size_t i = 0; i < tr.xs.size(); ++i) {
            f << i;
            for (double c : tr.xs[i]) f << "," << c;
            f << "," << tr.objectives[i] << ","
              << (i == 0 ? 0.0 : tr.step_norms[i - 1]) << "\n";
        }
    }
    json rep = report_shell("natgrad", &spec);
    rep["x0"] = x0;
    rep["iterations"] = tr.xs.size() - 1;
    rep["converged"] = tr.converged;
    rep["monotone_decrease"] = tr.monotone_decrease;
    rep["final_x"] = tr.xs.back();
    rep["final_objective"] = tr.objectives.back();
    rep["trajectory_csv"] = "natgrad_trajectory.csv";
    std::cout << "natgrad: " << (tr.converged ? "converged" : "iteration budget hit")
              << " at objective " << tr.objectives.back() << "\n";
    write_report(out, "natgrad", rep);
    return tr.converged ? 0 : 1;
}

int run_verify_all(std::uint64_t seed, const std::string& profile,
                   const std::string& out) {
    AcceptanceReport rep = run_acceptance(seed);
    json j = report_to_json(rep);
    j["version"] = kVersion;
    j["tolerance_profile"] = profile;
    for (const auto& c : rep.criteria)
        std::cout << "criterion " << c.id << " " << c.name << ": "
                  << (c.passed ? "PASS" : "FAIL") << " (" << c.detail << ")\n";
    write_report(out, "verify_all", j);
    return rep.all_passed() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"information-geometry verification toolkit"};
    app.require_subcommand(1);

    std::string spec_path, x_csv, out_dir = ".", profile = "default";
    int k_order = 2, fit_order = 1;
    std::uint64_t seed = 42;
    std::string orlicz_mode;

    auto add_common = [&](CLI::App* cmd, bool needs_spec) {
        if (needs_spec)
            cmd->add_option("--spec", spec_path, "model spec JSON path")->required();
        cmd->add_option("--x", x_csv, "parameter point as CSV floats");
        cmd->add_option("--seed", seed, "random seed");
        cmd->add_option("--out", out_dir, "report output directory");
        cmd->add_option("--tolerance-profile", profile, "strict or default");
        return cmd;
    };

    auto* c_tensors = add_common(app.add_subcommand("tensors"), true);
    auto* c_integr = add_common(app.add_subcommand("integrability"), true);
    c_integr->add_option("--k", k_order, "integrability order")->required();
    auto* c_suff = add_common(app.add_subcommand("sufficiency"), true);
    auto* c_inv = add_common(app.add_subcommand("invariance"), true);
    auto* c_mono = add_common(app.add_subcommand("monotonicity"), true);
    auto* c_loss = add_common(app.add_subcommand("infoloss"), true);
    auto* c_dec = add_common(app.add_subcommand("decompose-kernel"), true);
    auto* c_fit = add_common(app.add_subcommand("chentsov-fit"), false);
    c_fit->add_option("--order", fit_order, "1, 2 or 3")->required();
    auto* c_orl = add_common(app.add_subcommand("orlicz"), true);
    c_orl->add_option("mode", orlicz_mode,
                      "norm|tangent|preceq|similar|econv|segment")
        ->required();
    auto* c_nat = add_common(app.add_subcommand("natgrad"), true);
    auto* c_all = add_common(app.add_subcommand("verify-all"), false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        Tolerances tol = profile_tolerances(profile);
        auto spec = [&]() { return load_model_spec(spec_path); };
        if (c_tensors->parsed()) return run_tensors(spec(), x_csv, out_dir);
        if (c_integr->parsed()) return run_integrability(spec(), k_order, out_dir);
        if (c_suff->parsed()) return run_sufficiency(spec(), tol, out_dir);
        if (c_inv->parsed()) return run_invariance(spec(), tol, out_dir);
        if (c_mono->parsed()) return run_monotonicity(spec(), x_csv, out_dir);
        if (c_loss->parsed()) return run_infoloss(spec(), x_csv, tol, out_dir);
        if (c_dec->parsed()) return run_decompose(spec(), tol, out_dir);
        if (c_fit->parsed()) {
            if (fit_order < 1 || fit_order > 3)
                throw InvalidSpec("--order must be 1, 2 or 3");
            return run_chentsov_fit(fit_order, seed, tol, out_dir);
        }
        if (c_orl->parsed()) return run_orlicz(spec(), orlicz_mode, x_csv, out_dir);
        if (c_nat->parsed()) return run_natgrad(spec(), x_csv, out_dir);
        if (c_all->parsed()) return run_verify_all(seed, profile, out_dir);
    } catch (const InvalidSpec& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const SyntaxError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
