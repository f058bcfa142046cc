#include "igkit/markov.hpp"

#include "igkit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace igkit {

namespace {

constexpr double kRowSumTol = 1e-12;

void check_finite(const Space& s, const char* what) {
    if (!s || !s->is_finite()) throw SpaceMismatch(std::string(what) + " must be finite");
}

} // namespace

MarkovKernel MarkovKernel::from_matrix(Space source, Space target,
                                       std::vector<std::vector<double>> rows) {
    check_finite(source, "kernel source");
    check_finite(target, "kernel target");
    if (static_cast<int>(rows.size()) != source->atom_count())
        throw SpaceMismatch("one row per source atom required");
    bool pos = true;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != target->atom_count())
            throw SpaceMismatch("row length must match target atom count");
        double s = 0.0;
        for (double e : row) {
            if (e < 0.0) throw NotProbability("negative kernel entry");
            if (e <= 0.0) pos = false;
            s += e;
        }
        if (std::abs(s - 1.0) > kRowSumTol)
            throw NotProbability("kernel row does not sum to 1");
    }
    MarkovKernel k;
    k.source_ = std::move(source);
    k.target_ = std::move(target);
    k.rows_ = std::move(rows);
    k.strictly_positive_ = pos;
    return k;
}

MarkovKernel MarkovKernel::identity(Space finite_space) {
    check_finite(finite_space, "kernel source");
    int n = finite_space->atom_count();
    std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) rows[i][i] = 1.0;
    return from_matrix(finite_space, finite_space, std::move(rows));
}

MarkovKernel MarkovKernel::from_row_expressions(Space source, Space grid_target,
                                                std::vector<Expression> rows) {
    check_finite(source, "kernel source");
    if (!grid_target || !grid_target->is_grid())
        throw SpaceMismatch("expression rows need a grid target");
    if (static_cast<int>(rows.size()) != source->atom_count())
        throw SpaceMismatch("one row per source atom required");
    bool pos = true;
    std::vector<double> none;
    for (const auto& e : rows) {
        auto f = [&](double t) { return e.eval(none, Point::at_coord(t)); };
        QuadResult q = integrate_interval(f, grid_target->lower(), grid_target->upper(),
                                          grid_target->quad());
        if (q.status != QuadStatus::Converged || std::abs(q.value - 1.0) > 1e-7)
            throw NotProbability("kernel row density does not integrate to 1");
        for (int i = 0; i < 17; ++i) {
            double t = grid_target->lower() +
                       (i + 0.5) * (grid_target->upper() - grid_target->lower()) / 17.0;
            double v = f(t);
            if (v < 0.0) throw NotProbability("negative kernel row density");
            if (v <= 0.0) pos = false;
        }
    }
    MarkovKernel k;
    k.source_ = std::move(source);
    k.target_ = std::move(grid_target);
    k.row_exprs_ = std::move(rows);
    k.strictly_positive_ = pos;
    return k;
}

double MarkovKernel::entry(int i, int j) const {
    if (rows_.empty()) throw SpaceMismatch("entry() needs a finite target");
    return rows_.at(i).at(j);
}

Measure MarkovKernel::row(int i) const {
    if (!rows_.empty()) return Measure::from_weights(target_, rows_.at(i));
    Expression e = row_exprs_.at(i);
    return Measure::from_density(target_, [e](const Point& p) {
        std::vector<double> none;
        return e.eval(none, p);
    });
}

double MarkovKernel::row_density_wrt(int i, const Measure& mu2, const Point& w2) const {
    double d = mu2.density_value(w2);
    if (d == 0.0) throw ZeroDenominator("reference vanishes on the target");
    if (!rows_.empty()) return rows_.at(i)[w2.c[0].atom] / d;
    std::vector<double> none;
    return row_exprs_.at(i).eval(none, w2) / d;
}

Measure MarkovKernel::pushforward(const Measure& nu) const {
    if (!nu.space()->same_as(*source_))
        throw SpaceMismatch("measure lives on a different space than the kernel");
    if (!rows_.empty()) {
        std::vector<double> out(target_->atom_count(), 0.0);
        for (int i = 0; i < source_->atom_count(); ++i) {
            double ni = nu.density_value(Point::at_atom(i));
            for (std::size_t j = 0; j < out.size(); ++j) out[j] += ni * rows_[i][j];
        }
        return Measure::from_weights(target_, std::move(out), nu.signed_allowed());
    }
    std::vector<double> w(source_->atom_count());
    for (int i = 0; i < source_->atom_count(); ++i)
        w[i] = nu.density_value(Point::at_atom(i));
    auto exprs = row_exprs_;
    return Measure::from_density(
        target_,
        [w, exprs](const Point& p) {
            std::vector<double> none;
            double acc = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i)
                acc += w[i] * exprs[i].eval(none, p);
            return acc;
        },
        nu.signed_allowed());
}

MarkovKernel MarkovKernel::compose(const MarkovKernel& other) const {
    if (!target_->same_as(*other.source_))
        throw SpaceMismatch("kernel composition needs matching middle space");
    if (rows_.empty() || other.rows_.empty())
        throw SpaceMismatch("composition supported for finite kernels only");
    int n = source_->atom_count();
    int m = other.target_->atom_count();
    int mid = target_->atom_count();
    std::vector<std::vector<double>> rows(n, std::vector<double>(m, 0.0));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < mid; ++k)
            for (int j = 0; j < m; ++j) rows[i][j] += rows_[i][k] * other.rows_[k][j];
    return from_matrix(source_, other.target_, std::move(rows));
}

MarkovKernel congruent_embedding(const Statistic& kappa,
                                 const std::vector<std::vector<double>>& weights) {
    if (kappa.kind() != Statistic::Kind::Classes &&
        kappa.kind() != Statistic::Kind::Identity)
        throw SpaceMismatch("congruent embedding needs a finite class statistic");
    const Space& atoms = kappa.source();
    check_finite(atoms, "statistic source");
    if (kappa.kind() == Statistic::Kind::Identity) {
        int n = atoms->atom_count();
        for (int i = 0; i < n; ++i)
            if (static_cast<int>(weights.at(i).size()) != 1 ||
                std::abs(weights[i][0] - 1.0) > kRowSumTol)
                throw SupportViolation("identity classes admit only unit weights");
        return MarkovKernel::identity(atoms);
    }
    int n_cls = kappa.target()->atom_count();
    int m = atoms->atom_count();
    if (static_cast<int>(weights.size()) != n_cls)
        throw SupportViolation("one weight list per class required");

    std::vector<std::vector<int>> members(n_cls);
    for (int j = 0; j < m; ++j) members[kappa.classes()[j]].push_back(j);

    std::vector<std::vector<double>> rows(n_cls, std::vector<double>(m, 0.0));
    for (int c = 0; c < n_cls; ++c) {
        if (weights[c].size() != members[c].size())
            throw SupportViolation("weights do not match the class preimage");
        double s = 0.0;
        for (std::size_t t = 0; t < weights[c].size(); ++t) {
            double w = weights[c][t];
            if (w < 0.0) throw SupportViolation("negative row weight");
            rows[c][members[c][t]] = w;
            s += w;
        }
        if (s == 0.0) throw ZeroRow("class row has no mass");
        if (std::abs(s - 1.0) > kRowSumTol)
            throw SupportViolation("row weights must sum to 1");
    }
    return MarkovKernel::from_matrix(kappa.target(), atoms, std::move(rows));
}

bool left_inverse_check(const MarkovKernel& k, const Statistic& kappa) {
    if (!k.finite_target()) throw SpaceMismatch("finite spaces required");
    if (!k.target()->same_as(*kappa.source()) || !k.source()->same_as(*kappa.target()))
        throw SpaceMismatch("statistic must lump the kernel target back to its source");
    int n = k.source()->atom_count();
    int m = k.target()->atom_count();
    for (int i = 0; i < n; ++i) {
        std::vector<double> lumped(n, 0.0);
        for (int j = 0; j < m; ++j)
            lumped[kappa.class_of(Point::at_atom(j))] += k.entry(i, j);
        for (int c = 0; c < n; ++c) {
            double want = c == i ? 1.0 : 0.0;
            if (std::abs(lumped[c] - want) > kRowSumTol) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------

namespace {

/// Integral of fn * density over the preimage of class c under kappa.
double fiber_integrate(const ParametrizedModel& m, const Statistic& k,
                       std::span<const double> x, int c,
                       const std::function<double(const Point&)>& fn) {
    const Space& S = m.space();
    const Measure& ref = m.reference();
    std::vector<double> xv(x.begin(), x.end());
    auto weight = [&](const Point& p) {
        return fn(p) * m.density_value(xv, p) * ref.density_value(p);
    };
    switch (k.kind()) {
        case Statistic::Kind::Classes: {
            double acc = 0.0;
            for (const Point& p : S->atoms())
                if (k.class_of(p) == c) acc += weight(p);
            return acc;
        }
        case Statistic::Kind::Intervals: {
            const auto& cuts = k.cuts();
            auto f = [&](double t) { return weight(Point::at_coord(t)); };
            QuadResult q = integrate_interval(f, cuts[c], cuts[c + 1], S->quad());
            if (q.status != QuadStatus::Converged)
                throw DivergentIntegral("fiber integral did not converge");
            return q.value;
        }
        case Statistic::Kind::Projection: {
            if (S->enumerable()) {
                double acc = 0.0;
                for (const Point& p : S->atoms())
                    if (p.c[k.which_factor() - 1].atom == c) acc += weight(p);
                return acc;
            }
            if (k.which_factor() == 1 && S->left()->is_finite() &&
                S->right()->is_grid()) {
                const Space& R = S->right();
                auto f = [&](double t) {
                    return weight(Point::pair({true, c, 0.0}, {false, 0, t}));
                };
                QuadResult q = integrate_interval(f, R->lower(), R->upper(), R->quad());
                if (q.status != QuadStatus::Converged)
                    throw DivergentIntegral("fiber integral did not converge");
                return q.value;
            }
            throw SpaceMismatch("unsupported projection fiber");
        }
        case Statistic::Kind::Identity:
            throw SpaceMismatch("identity statistic has no proper fibers");
    }
    throw SpaceMismatch("unreachable");
}

std::vector<Point> ratio_sample_points(const Space& s) {
    if (s->enumerable()) return s->atoms();
    std::vector<Point> pts;
    if (s->is_grid()) {
        for (int i = 0; i < 9; ++i)
            pts.push_back(Point::at_coord(
                s->lower() + (i + 0.5) * (s->upper() - s->lower()) / 9.0));
        return pts;
    }
    const Space& L = s->left();
    const Space& R = s->right();
    if (L->is_finite() && R->is_grid()) {
        for (int i = 0; i < L->atom_count(); ++i)
            for (int j = 0; j < 9; ++j)
                pts.push_back(Point::pair(
                    {true, i, 0.0},
                    {false, 0,
                     R->lower() + (j + 0.5) * (R->upper() - R->lower()) / 9.0}));
        return pts;
    }
    throw SpaceMismatch("unsupported space shape");
}

} // namespace

ParametrizedModel pushforward_model(const ParametrizedModel& m, const Statistic& kappa) {
    if (!kappa.source()->same_as(*m.space()))
        throw SpaceMismatch("statistic is over a different space than the model");
    if (kappa.kind() == Statistic::Kind::Identity) return m;
    if (!kappa.target()->is_finite())
        throw SpaceMismatch("pushforward models need a finite class space");

    Measure kmu = pushforward_statistic(m.reference(), kappa);
    for (double w : kmu.weights())
        if (!(w > 0.0)) throw ZeroMarginal("reference vanishes on a class");

    ParametrizedModel base = m;
    Statistic k = kappa;
    std::vector<double> kmu_w = kmu.weights();

    auto density = [base, k, kmu_w](std::span<const double> x, const Point& w) {
        int c = w.c[0].atom;
        double mass = fiber_integrate(base, k, x, c, [](const Point&) { return 1.0; });
        return mass / kmu_w[c];
    };
    auto dlog = [base, k](std::span<const double> x, std::span<const double> v,
                          const Point& w) {
        int c = w.c[0].atom;
        double mass = fiber_integrate(base, k, x, c, [](const Point&) { return 1.0; });
        if (mass == 0.0) throw ZeroMarginal("class has no mass under p(x)");
        double num = fiber_integrate(base, k, x, c, [&](const Point& p) {
            return base.log_derivative(x, v, p);
        });
        return num / mass;
    };
    return ParametrizedModel::from_callbacks(m.box(), kappa.target(), kmu, density,
                                             dlog, m.statistical(), "pushforward");
}

ParametrizedModel congruent_embed_model(const ParametrizedModel& m,
                                        const Statistic& kappa, const MarkovKernel& k) {
    if (kappa.kind() != Statistic::Kind::Classes)
        throw SpaceMismatch("embedding needs a finite class statistic");
    if (!kappa.target()->same_as(*m.space()))
        throw SpaceMismatch("statistic classes must form the model space");
    if (!left_inverse_check(k, kappa))
        throw SupportViolation("kernel is not a congruent embedding for the statistic");

    int atoms = kappa.source()->atom_count();
    const std::vector<int>& cls = kappa.classes();
    std::vector<double> ref_w(atoms);
    for (int j = 0; j < atoms; ++j) {
        double e = k.entry(cls[j], j);
        if (!(e > 0.0))
            throw ZeroRow("embedding weights must be positive on every fiber atom");
        ref_w[j] = e * m.reference().density_value(Point::at_atom(cls[j]));
    }
    Measure ref = Measure::from_weights(kappa.source(), std::move(ref_w));

    ParametrizedModel base = m;
    std::vector<int> c = cls;
    auto density = [base, c](std::span<const double> x, const Point& w) {
        return base.density_value(x, Point::at_atom(c[w.c[0].atom]));
    };
    auto dlog = [base, c](std::span<const double> x, std::span<const double> v,
                          const Point& w) {
        return base.log_derivative(x, v, Point::at_atom(c[w.c[0].atom]));
    };
    return ParametrizedModel::from_callbacks(m.box(), kappa.source(), ref, density,
                                             dlog, m.statistical(), "embedded");
}

SufficiencyVerdict check_sufficiency(const ParametrizedModel& m, const Statistic& kappa,
                                     const SufficiencyConfig& cfg) {
    SufficiencyVerdict out;
    if (kappa.kind() == Statistic::Kind::Identity) {
        out.verdict = SufficiencyVerdict::Verdict::Sufficient;
        return out;
    }
    ParametrizedModel pm = pushforward_model(m, kappa);

    std::vector<std::vector<double>> lattice;
    {
        std::vector<std::pair<double, double>> range = m.box().axes;
        int per = cfg.points_per_axis;
        std::size_t total = 1;
        for (std::size_t a = 0; a < range.size(); ++a) total *= per;
        for (std::size_t n = 0; n < total; ++n) {
            std::vector<double> x(range.size());
            std::size_t rem = n;
            for (int a = static_cast<int>(range.size()) - 1; a >= 0; --a) {
                int i = static_cast<int>(rem % per);
                rem /= per;
                x[a] = range[a].first +
                       (i + 1) * (range[a].second - range[a].first) / (per + 1);
            }
            lattice.push_back(std::move(x));
        }
    }

    for (const Point& w : ratio_sample_points(m.space())) {
        Point cls = Point::at_atom(kappa.class_of(w));
        double lo = 0.0, hi = 0.0;
        std::vector<double> lo_x, hi_x;
        bool first = true;
        for (const auto& x : lattice) {
            double denom = pm.density_value(x, cls);
            if (denom == 0.0) throw ZeroDenominator("pushforward density vanishes");
            double r = m.density_value(x, w) / denom;
            if (first || r < lo) { lo = r; lo_x = x; }
            if (first || r > hi) { hi = r; hi_x = x; }
            first = false;
        }
        double dev = (hi - lo) / std::max({std::abs(hi), std::abs(lo), 1e-12});
        if (dev > out.max_deviation) {
            out.max_deviation = dev;
            out.witness_x = lo_x;
            out.witness_x2 = hi_x;
            out.witness_w = w;
            out.has_witness = true;
        }
    }
    if (out.max_deviation <= cfg.sufficient_below)
        out.verdict = SufficiencyVerdict::Verdict::Sufficient;
    else if (out.max_deviation >= cfg.not_sufficient_above)
        out.verdict = SufficiencyVerdict::Verdict::NotSufficient;
    else
        out.verdict = SufficiencyVerdict::Verdict::Inconclusive;
    return out;
}

std::vector<Measure> conditional_distribution(const ParametrizedModel& m,
                                              std::span<const double> x) {
    const Space& S = m.space();
    if (!S->is_product() || !S->left()->is_finite())
        throw SpaceMismatch("conditionals need a product with a finite first factor");
    Statistic pi1 = Statistic::projection(S, 1);
    std::vector<Measure> fibers;
    std::vector<double> xv(x.begin(), x.end());
    ParametrizedModel base = m;
    for (int i = 0; i < S->left()->atom_count(); ++i) {
        double marg =
            fiber_integrate(m, pi1, x, i, [](const Point&) { return 1.0; });
        if (!(marg > 0.0)) throw ZeroMarginal("first-factor marginal vanishes");
        if (S->enumerable()) {
            std::vector<double> w(S->right()->atom_count());
            for (int j = 0; j < S->right()->atom_count(); ++j) {
                Point p = Point::pair({true, i, 0.0}, {true, j, 0.0});
                w[j] = m.density_value(xv, p) * m.reference().density_value(p) / marg;
            }
            fibers.push_back(Measure::from_weights(S->right(), std::move(w)));
        } else {
            Measure ref = m.reference();
            fibers.push_back(Measure::from_density(
                S->right(), [base, ref, xv, i, marg](const Point& p2) {
                    Point p = Point::pair({true, i, 0.0}, p2.c[0]);
                    return base.density_value(xv, p) * ref.density_value(p) / marg;
                }));
        }
    }
    return fibers;
}

ParametrizedModel lift_model_by_kernel(const ParametrizedModel& m,
                                       const MarkovKernel& k, const Measure& mu2) {
    if (!k.source()->same_as(*m.space()))
        throw SpaceMismatch("kernel source must be the model space");
    if (!k.strictly_positive())
        throw InvalidSpec("lifting requires a strictly positive kernel");
    if (!mu2.space()->same_as(*k.target()))
        throw SpaceMismatch("reference must live on the kernel target");
    if (std::abs(mu2.mass() - 1.0) > 1e-9)
        throw NotProbability("target reference must be a probability measure");

    Space prod = SampleSpace::product(m.space(), k.target());
    Measure ref1 = m.reference();
    Measure joint_ref = [&]() {
        if (prod->enumerable()) {
            int n1 = m.space()->atom_count();
            int n2 = k.target()->atom_count();
            std::vector<double> w(n1 * n2);
            for (int i = 0; i < n1; ++i)
                for (int j = 0; j < n2; ++j)
                    w[i * n2 + j] = ref1.density_value(Point::at_atom(i)) *
                                    mu2.density_value(Point::at_atom(j));
            return Measure::from_weights(prod, std::move(w));
        }
        Measure m2 = mu2;
        return Measure::from_density(prod, [ref1, m2](const Point& p) {
            Point a = Point::at_atom(p.c[0].atom);
            Point b;
            b.c[0] = p.c[1];
            return ref1.density_value(a) * m2.density_value(b);
        });
    }();

    ParametrizedModel base = m;
    MarkovKernel kk = k;
    Measure m2 = mu2;
    auto density = [base, kk, m2](std::span<const double> x, const Point& p) {
        Point w1 = Point::at_atom(p.c[0].atom);
        Point w2;
        w2.c[0] = p.c[1];
        return kk.row_density_wrt(p.c[0].atom, m2, w2) * base.density_value(x, w1);
    };
    auto dlog = [base](std::span<const double> x, std::span<const double> v,
                       const Point& p) {
        return base.log_derivative(x, v, Point::at_atom(p.c[0].atom));
    };
    return ParametrizedModel::from_callbacks(m.box(), prod, joint_ref, density, dlog,
                                             m.statistical(), "lift");
}

KernelDecomposition decompose_markov_morphism(const ParametrizedModel& m,
                                              const MarkovKernel& k, const Measure& mu2,
                                              int lattice_points) {
    KernelDecomposition out{
        lift_model_by_kernel(m, k, mu2),
        {},
        {},
        0.0,
    };
    Statistic pi1 = Statistic::projection(out.lift.space(), 1);
    Statistic pi2 = Statistic::projection(out.lift.space(), 2);
    out.pi1_sufficiency = check_sufficiency(out.lift, pi1);
    out.pi2_model = pushforward_model(out.lift, pi2);

    if (!k.finite_target()) return out; // residual check needs atom weights

    const auto& axes = m.box().axes;
    std::size_t total = 1;
    for (std::size_t a = 0; a < axes.size(); ++a) total *= lattice_points;
    for (std::size_t n = 0; n < total; ++n) {
        std::vector<double> x(axes.size());
        std::size_t rem = n;
        for (int a = static_cast<int>(axes.size()) - 1; a >= 0; --a) {
            int i = static_cast<int>(rem % lattice_points);
            rem /= lattice_points;
            x[a] = axes[a].first +
                   (i + 1) * (axes[a].second - axes[a].first) / (lattice_points + 1);
        }
        Measure via_lift = pushforward_statistic(out.lift.density_at(x), pi2);
        Measure via_kernel = k.pushforward(m.density_at(x));
        for (int j = 0; j < k.target()->atom_count(); ++j) {
            double d = std::abs(via_lift.weights()[j] - via_kernel.weights()[j]);
            out.residual = std::max(out.residual, d);
        }
    }
    return out;
}

} // namespace igkit
