#include "igkit/chentsov.hpp"

#include "igkit/errors.hpp"
#include "igkit/rng.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>

namespace igkit {

namespace {

std::vector<std::vector<double>> box_lattice(const ParamBox& box, int per_axis) {
    std::size_t total = 1;
    for (int a = 0; a < box.dim(); ++a) total *= per_axis;
    std::vector<std::vector<double>> pts;
    pts.reserve(total);
    for (std::size_t n = 0; n < total; ++n) {
        std::vector<double> x(box.dim());
        std::size_t rem = n;
        for (int a = box.dim() - 1; a >= 0; --a) {
            int i = static_cast<int>(rem % per_axis);
            rem /= per_axis;
            x[a] = box.axes[a].first +
                   (i + 1) * (box.axes[a].second - box.axes[a].first) / (per_axis + 1);
        }
        pts.push_back(std::move(x));
    }
    return pts;
}

void track(double a, double b, double& abs_out, double& rel_out) {
    double d = std::abs(a - b);
    abs_out = std::max(abs_out, d);
    rel_out = std::max(rel_out, d / std::max({std::abs(a), std::abs(b), 1e-12}));
}

} // namespace

InvarianceReport invariance_report(const ParametrizedModel& m, const Statistic& kappa,
                                   int lattice_points) {
    SufficiencyVerdict sv = check_sufficiency(m, kappa);
    if (sv.verdict != SufficiencyVerdict::Verdict::Sufficient)
        throw NotSufficient("invariance certified only for sufficient statistics");

    ParametrizedModel pm = pushforward_model(m, kappa);
    int d = m.dim();
    std::vector<std::vector<double>> basis(d, std::vector<double>(d, 0.0));
    for (int i = 0; i < d; ++i) basis[i][i] = 1.0;

    InvarianceReport rep;
    for (const auto& x : box_lattice(m.box(), lattice_points)) {
        for (int i = 0; i < d; ++i)
            track(one_form_A(m, x, basis[i]).value, one_form_A(pm, x, basis[i]).value,
                  rep.a_abs, rep.a_rel);
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j)
                track(fisher_form(m, x, basis[i], basis[j]).value,
                      fisher_form(pm, x, basis[i], basis[j]).value, rep.fisher_abs,
                      rep.fisher_rel);
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j)
                for (int l = j; l < d; ++l)
                    track(ac_tensor(m, x, basis[i], basis[j], basis[l]).value,
                          ac_tensor(pm, x, basis[i], basis[j], basis[l]).value,
                          rep.ac_abs, rep.ac_rel);
    }
    return rep;
}

double monotonicity_gap(const ParametrizedModel& m, const Statistic& kappa,
                        std::span<const double> x, std::span<const double> v) {
    if (kappa.kind() == Statistic::Kind::Identity) return 0.0;
    double g = fisher_form(m, x, v, v).value;
    ParametrizedModel pm = pushforward_model(m, kappa);
    return g - fisher_form(pm, x, v, v).value;
}

InfoLoss information_loss(const ParametrizedModel& m, const Statistic& kappa,
                          std::span<const double> x, std::span<const double> v) {
    ParametrizedModel pm = pushforward_model(m, kappa);
    Measure px = m.density_at(x);
    std::vector<double> xv(x.begin(), x.end());
    std::vector<double> vv(v.begin(), v.end());
    Statistic k = kappa;
    ParametrizedModel base = m;

    // Precompute the fiber-averaged log-derivative per class.
    int n_cls = kappa.target()->atom_count();
    std::vector<double> avg(n_cls);
    for (int c = 0; c < n_cls; ++c)
        avg[c] = pm.log_derivative(xv, vv, Point::at_atom(c));

    InfoLoss out;
    out.loss = px.integrate_checked([&](const Point& w) {
        double diff = base.log_derivative(xv, vv, w) - avg[k.class_of(w)];
        return diff * diff;
    });
    double gap = fisher_form(m, x, v, v).value - fisher_form(pm, x, v, v).value;
    out.residual = std::abs(gap - out.loss);
    return out;
}

// ---------------------------------------------------------------------------

double ChentsovFit::max_residual() const {
    double r = 0.0;
    for (const auto& b : bins) r = std::max(r, b.residual);
    return r;
}

ChentsovFit fit_in_span(const std::vector<FieldSample>& samples, int n_basis,
                        double bin_width, bool strict) {
    if (n_basis < 1) throw InvalidSpec("need at least one basis field");
    if (!(bin_width > 0.0)) throw InvalidSpec("bin width must be positive");
    ChentsovFit fit;
    fit.n_basis = n_basis;
    fit.bin_width = bin_width;

    std::map<long, std::vector<const FieldSample*>> bins;
    for (const auto& s : samples) {
        if (static_cast<int>(s.basis.size()) != n_basis)
            throw InvalidSpec("sample basis size mismatch");
        bins[static_cast<long>(std::floor(s.mass / bin_width))].push_back(&s);
    }

    for (const auto& [key, group] : bins) {
        int n = static_cast<int>(group.size());
        Eigen::MatrixXd X(n, n_basis);
        Eigen::VectorXd y(n);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n_basis; ++c) X(r, c) = group[r]->basis[c];
            y(r) = group[r]->value;
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU |
                                                     Eigen::ComputeThinV);
        double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
        svd.setThreshold(1e-10);
        bool degenerate = smax <= 0.0 || svd.rank() < n_basis;
        if (degenerate && strict)
            throw IllConditioned("rank-deficient design matrix in a mass bin");
        Eigen::VectorXd c = svd.solve(y);
        double resid = (X * c - y).norm();

        ChentsovFit::Bin bin;
        bin.mass_center = (key + 0.5) * bin_width;
        bin.count = n;
        bin.coeffs.assign(c.data(), c.data() + n_basis);
        bin.residual = resid;
        bin.degenerate = degenerate;
        for (double cc : bin.coeffs)
            if (!std::isfinite(cc)) throw IllConditioned("non-finite fit coefficient");
        fit.bins.push_back(std::move(bin));
    }
    return fit;
}

ChentsovFit fit_invariant_oneform(const std::vector<FieldSample>& samples) {
    return fit_in_span(samples, 1);
}
ChentsovFit fit_invariant_quadratic(const std::vector<FieldSample>& samples) {
    return fit_in_span(samples, 2);
}
ChentsovFit fit_invariant_cubic(const std::vector<FieldSample>& samples) {
    return fit_in_span(samples, 3);
}

std::vector<StepTensorSample> sample_step_tensors(std::uint64_t seed, int trials) {
    std::vector<StepTensorSample> out;
    out.reserve(trials);
    for (int t = 0; t < trials; ++t) {
        Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(t)));
        int n = 2 + static_cast<int>(rng.index(4));
        // Stride through the mass bins so every bin gets its share of trials.
        double mass = (2 + t % 28 + 0.5) * 0.05;

        std::vector<double> d(n), tau(n);
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            d[i] = rng.uniform(0.1, 1.0);
            s += d[i];
        }
        for (int i = 0; i < n; ++i) d[i] *= mass / s;
        for (int i = 0; i < n; ++i) tau[i] = rng.uniform(-2.0, 2.0);

        Space sp = SampleSpace::finite(n);
        Measure mu = Measure::from_weights(sp, d);
        std::vector<int> cls(n);
        for (int i = 0; i < n; ++i) cls[i] = i;
        Statistic ident_classes = Statistic::from_classes(sp, cls, n);
        ParametrizedModel m = make_step_model(mu, ident_classes, tau, 0.5);

        std::vector<double> x{0.5}, v{1.0};
        StepTensorSample smp;
        smp.mass = m.mass(x);
        smp.a = moment_tensor(m, x, v, 1).value;
        smp.fisher = moment_tensor(m, x, v, 2).value;
        smp.ac = moment_tensor(m, x, v, 3).value;
        out.push_back(smp);
    }
    return out;
}

} // namespace igkit
