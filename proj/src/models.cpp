#include "igkit/models.hpp"

#include "igkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace igkit {

namespace {

constexpr double kFdStepScale = 6.055454452393343e-06; // cbrt(machine eps)

double fd_step(std::span<const double> x) {
    double xmax = 1.0;
    for (double xi : x) xmax = std::max(xmax, std::abs(xi));
    return kFdStepScale * xmax;
}

/// Largest step h such that x +- h*v stays strictly inside the box.
double clamp_step(const ParamBox& box, std::span<const double> x,
                  std::span<const double> v, double h) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (v[i] == 0.0) continue;
        double room = std::min(x[i] - box.axes[i].first, box.axes[i].second - x[i]);
        h = std::min(h, 0.5 * room / std::abs(v[i]));
    }
    return h;
}

std::vector<std::vector<double>> build_lattice(
    const std::vector<std::pair<double, double>>& range, int per_axis) {
    if (per_axis < 1) throw InvalidSpec("lattice needs at least one point per axis");
    int d = static_cast<int>(range.size());
    std::size_t total = 1;
    for (int a = 0; a < d; ++a) total *= per_axis;
    std::vector<std::vector<double>> pts;
    pts.reserve(total);
    std::vector<int> idx(d, 0);
    for (std::size_t n = 0; n < total; ++n) {
        std::vector<double> x(d);
        std::size_t rem = n;
        for (int a = d - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(rem % per_axis);
            rem /= per_axis;
        }
        for (int a = 0; a < d; ++a) {
            auto [lo, hi] = range[a];
            x[a] = lo + (idx[a] + 1) * (hi - lo) / (per_axis + 1);
        }
        pts.push_back(std::move(x));
    }
    return pts;
}

std::vector<Point> spot_points(const Space& s) {
    if (s->enumerable()) return s->atoms();
    std::vector<Point> pts;
    if (s->is_grid()) {
        for (int i = 0; i < 7; ++i) {
            double t = s->lower() + (i + 0.5) * (s->upper() - s->lower()) / 7.0;
            pts.push_back(Point::at_coord(t));
        }
        return pts;
    }
    const Space& L = s->left();
    const Space& R = s->right();
    if (L->is_finite() && R->is_grid()) {
        for (int i = 0; i < L->atom_count(); ++i)
            for (int j = 0; j < 7; ++j) {
                double t = R->lower() + (j + 0.5) * (R->upper() - R->lower()) / 7.0;
                pts.push_back(Point::pair({true, i, 0.0}, {false, 0, t}));
            }
        return pts;
    }
    throw SpaceMismatch("unsupported space shape");
}

} // namespace

bool ParamBox::contains(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!(x[i] > axes[i].first && x[i] < axes[i].second)) return false;
    return true;
}

std::vector<double> ParamBox::midpoint() const {
    std::vector<double> m(axes.size());
    for (std::size_t i = 0; i < axes.size(); ++i)
        m[i] = 0.5 * (axes[i].first + axes[i].second);
    return m;
}

static void check_box(const ParamBox& box) {
    if (box.dim() < 1 || box.dim() > 8)
        throw InvalidSpec("parameter box dimension must be in 1..8");
    for (auto [lo, hi] : box.axes)
        if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
            throw InvalidSpec("box axes must be finite open intervals");
}

ParametrizedModel ParametrizedModel::from_expression(ParamBox box, Space space,
                                                     Measure reference,
                                                     Expression potential,
                                                     bool statistical) {
    check_box(box);
    if (!space || !reference.space()->same_as(*space))
        throw SpaceMismatch("reference measure must live on the model space");
    if (potential.param_dim() > box.dim())
        throw InvalidSpec("potential references parameters beyond the box dimension");
    ParametrizedModel m;
    m.box_ = std::move(box);
    m.space_ = std::move(space);
    m.reference_ = std::move(reference);
    m.expr_ = std::move(potential);
    m.statistical_ = statistical;
    m.family_ = "expression";
    Expression e = *m.expr_;
    m.density_ = [e](std::span<const double> x, const Point& w) { return e.eval(x, w); };
    return m;
}

ParametrizedModel ParametrizedModel::from_callbacks(ParamBox box, Space space,
                                                    Measure reference, DensityFn density,
                                                    DlogFn exact_dlog, bool statistical,
                                                    std::string family) {
    check_box(box);
    if (!space || !reference.space()->same_as(*space))
        throw SpaceMismatch("reference measure must live on the model space");
    if (!density) throw InvalidSpec("density callback required");
    ParametrizedModel m;
    m.box_ = std::move(box);
    m.space_ = std::move(space);
    m.reference_ = std::move(reference);
    m.density_ = std::move(density);
    m.exact_dlog_ = std::move(exact_dlog);
    m.statistical_ = statistical;
    m.family_ = std::move(family);
    return m;
}

ParametrizedModel ParametrizedModel::from_step(StepPotential step, Measure reference) {
    const Statistic& kappa = step.partition;
    if (!reference.space()->same_as(*kappa.source()))
        throw PartitionMismatch("partition is over a different space");
    if (!kappa.target()->is_finite() ||
        kappa.target()->atom_count() != static_cast<int>(step.tau.size()))
        throw PartitionMismatch("one coefficient per class required");
    if (!(step.x0 > 0.0 && step.x0 < 1.0))
        throw InvalidSpec("anchor must lie in (0,1)");
    double x0 = step.x0;
    std::vector<double> tau = step.tau;
    Statistic part = kappa;
    auto m = from_callbacks(
        ParamBox{{{1e-9, 1.0 - 1e-9}}}, reference.space(), reference,
        [part, tau, x0](std::span<const double> x, const Point& w) {
            return std::exp((x[0] - x0) * tau[part.class_of(w)]);
        },
        [part, tau](std::span<const double>, std::span<const double> v, const Point& w) {
            return v[0] * tau[part.class_of(w)];
        },
        false, "step");
    m.step_ = std::move(step);
    return m;
}

ParametrizedModel ParametrizedModel::bernoulli(std::pair<double, double> box) {
    if (!(box.first > 0.0 && box.second < 1.0 && box.first < box.second))
        throw InvalidSpec("success probability box must sit inside (0,1)");
    Space space = SampleSpace::finite(2);
    return from_callbacks(
        ParamBox{{box}}, space, Measure::reference(space),
        [](std::span<const double> x, const Point& w) {
            return w.c[0].atom == 0 ? x[0] : 1.0 - x[0];
        },
        [](std::span<const double> x, std::span<const double> v, const Point& w) {
            return w.c[0].atom == 0 ? v[0] / x[0] : -v[0] / (1.0 - x[0]);
        },
        true, "bernoulli");
}

ParametrizedModel ParametrizedModel::categorical(int n) {
    if (n < 2) throw InvalidSpec("categorical needs n >= 2");
    int d = n - 1;
    ParamBox box;
    for (int a = 0; a < d; ++a)
        box.axes.push_back({1e-4, 1.0 / d - (d == 1 ? 1e-4 : 1e-4 / d)});
    Space space = SampleSpace::finite(n);
    auto density = [n](std::span<const double> x, const Point& w) {
        int i = w.c[0].atom;
        if (i < n - 1) return x[i];
        double s = std::accumulate(x.begin(), x.end(), 0.0);
        return 1.0 - s;
    };
    auto dlog = [n](std::span<const double> x, std::span<const double> v, const Point& w) {
        int i = w.c[0].atom;
        if (i < n - 1) return v[i] / x[i];
        double s = std::accumulate(x.begin(), x.end(), 0.0);
        double sv = std::accumulate(v.begin(), v.end(), 0.0);
        return -sv / (1.0 - s);
    };
    return from_callbacks(std::move(box), space, Measure::reference(space), density,
                          dlog, true, n == 2 ? "bernoulli" : "categorical");
}

ParametrizedModel ParametrizedModel::exponential_family(
    Space finite_space, std::vector<std::vector<double>> h, ParamBox box) {
    if (!finite_space || !finite_space->is_finite())
        throw SpaceMismatch("exponential family needs a finite space");
    int n = finite_space->atom_count();
    int d = box.dim();
    if (static_cast<int>(h.size()) != d)
        throw InvalidSpec("one sufficient-statistic row per parameter");
    for (const auto& row : h)
        if (static_cast<int>(row.size()) != n)
            throw InvalidSpec("statistic rows must match the atom count");

    auto theta_dot = [h, d](std::span<const double> x, int j) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += x[k] * h[k][j];
        return s;
    };
    auto psi = [theta_dot, n](std::span<const double> x) {
        double z = 0.0;
        for (int j = 0; j < n; ++j) z += std::exp(theta_dot(x, j)) / n;
        return std::log(z);
    };
    auto density = [theta_dot, psi](std::span<const double> x, const Point& w) {
        return std::exp(theta_dot(x, w.c[0].atom) - psi(x));
    };
    auto dlog = [h, theta_dot, psi, n, d](std::span<const double> x,
                                          std::span<const double> v, const Point& w) {
        double lognorm = psi(x);
        std::vector<double> mean(d, 0.0);
        for (int j = 0; j < n; ++j) {
            double pj = std::exp(theta_dot(x, j) - lognorm) / n;
            for (int k = 0; k < d; ++k) mean[k] += pj * h[k][j];
        }
        double out = 0.0;
        for (int k = 0; k < d; ++k) out += v[k] * (h[k][w.c[0].atom] - mean[k]);
        return out;
    };
    return from_callbacks(std::move(box), finite_space,
                          Measure::uniform_probability(finite_space), density, dlog,
                          true, "exponential");
}

ParametrizedModel ParametrizedModel::scaling(Measure mu) {
    Space space = mu.space();
    return from_callbacks(
        ParamBox{{{1e-6, 1.0 - 1e-6}}}, space, std::move(mu),
        [](std::span<const double> x, const Point&) { return x[0]; },
        [](std::span<const double> x, std::span<const double> v, const Point&) {
            return v[0] / x[0];
        },
        false, "scaling");
}

ParametrizedModel ParametrizedModel::exp_root_decay(int k,
                                                    std::pair<double, double> box) {
    if (k < 2 || k > 6) throw InvalidSpec("root exponent must be in 2..6");
    Space space = SampleSpace::grid(0.0, 1.0);
    double inv = 1.0 / k;
    return from_callbacks(
        ParamBox{{box}}, space, Measure::reference(space),
        [inv](std::span<const double> x, const Point& w) {
            return std::exp(-x[0] * x[0] * std::pow(w.c[0].t, -inv));
        },
        [inv](std::span<const double> x, std::span<const double> v, const Point& w) {
            return -2.0 * x[0] * v[0] * std::pow(w.c[0].t, -inv);
        },
        false, "exp_root_decay");
}

double ParametrizedModel::density_value(std::span<const double> x,
                                        const Point& w) const {
    return density_(x, w);
}

Measure ParametrizedModel::density_at(std::span<const double> x) const {
    if (!box_.contains(x))
        throw OutOfDomain("parameter outside the open parameter box");
    for (const Point& w : spot_points(space_)) {
        double v = density_(x, w) * reference_.density_value(w);
        if (!(v > 0.0)) throw NonPositiveDensity("density not positive at a spot point");
    }
    std::vector<double> xv(x.begin(), x.end());
    if (space_->enumerable()) {
        std::vector<double> weights;
        weights.reserve(space_->atom_count());
        for (const Point& w : space_->atoms())
            weights.push_back(density_(xv, w) * reference_.density_value(w));
        return Measure::from_weights(space_, std::move(weights));
    }
    Measure ref = reference_;
    DensityFn f = density_;
    return Measure::from_density(space_, [f, ref, xv](const Point& w) {
        return f(xv, w) * ref.density_value(w);
    });
}

double ParametrizedModel::log_derivative(std::span<const double> x,
                                         std::span<const double> v,
                                         const Point& w) const {
    if (static_cast<int>(x.size()) != dim() || v.size() != x.size())
        throw InvalidSpec("parameter/direction dimension mismatch");
    bool zero = std::all_of(v.begin(), v.end(), [](double c) { return c == 0.0; });
    if (zero) return 0.0;
    if (exact_dlog_) return exact_dlog_(x, v, w);
    if (expr_) return dlog_dv(*expr_, x, v, w);
    double h = clamp_step(box_, x, v, fd_step(x));
    std::vector<double> plus(x.begin(), x.end()), minus(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        plus[i] += h * v[i];
        minus[i] -= h * v[i];
    }
    double fp = density_(plus, w), fm = density_(minus, w);
    if (fp <= 0.0 || fm <= 0.0)
        throw DomainError("density not positive on the difference stencil");
    return (std::log(fp) - std::log(fm)) / (2.0 * h);
}

double ParametrizedModel::mass(std::span<const double> x) const {
    return density_at(x).mass();
}

ParametrizedModel::MassDerivative ParametrizedModel::mass_derivative_both(
    std::span<const double> x, std::span<const double> v) const {
    MassDerivative out;
    Measure px = density_at(x);
    out.integral_route = px.integrate_checked(
        [&](const Point& w) { return log_derivative(x, v, w); });

    double h = clamp_step(box_, x, v, fd_step(x));
    std::vector<double> plus(x.begin(), x.end()), minus(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        plus[i] += h * v[i];
        minus[i] -= h * v[i];
    }
    out.fd_route = (mass(plus) - mass(minus)) / (2.0 * h);
    return out;
}

double ParametrizedModel::mass_derivative(std::span<const double> x,
                                          std::span<const double> v) const {
    return mass_derivative_both(x, v).integral_route;
}

void ParametrizedModel::validate(const LatticeConfig& cfg) const {
    auto range = cfg.range.empty() ? box_.axes : cfg.range;
    for (const auto& x : build_lattice(range, cfg.points_per_axis)) {
        Measure px = density_at(x); // positivity spot check inside
        if (statistical_) {
            double m = px.mass();
            if (std::abs(m - 1.0) > 1e-9)
                throw NotProbability("mass deviates from 1 on the lattice");
        }
    }
}

IntegrabilityReport check_k_integrability(const ParametrizedModel& m, int k,
                                          const LatticeConfig& cfg) {
    if (k < 1) throw InvalidSpec("integrability order must be >= 1");
    IntegrabilityReport rep;
    rep.k = k;
    auto range = cfg.range.empty() ? m.box().axes : cfg.range;
    int per_axis = cfg.points_per_axis;
    rep.lattice = build_lattice(range, per_axis);
    int d = m.dim();
    int npts = static_cast<int>(rep.lattice.size());
    rep.norms.assign(npts, std::vector<double>(d, 0.0));

    auto basis = [d](int j) {
        std::vector<double> v(d, 0.0);
        v[j] = 1.0;
        return v;
    };

    // L^k norm of dlog(at_x, dir) against the measure p(meas_x). The usual
    // norm takes at_x == meas_x; cross pairs probe whether neighbouring
    // log-derivatives stay integrable, which a norm at an isolated point
    // cannot show.
    auto lk_raw = [&](const std::vector<double>& meas_x,
                      const std::vector<double>& at_x, int j) {
        Measure px = m.density_at(meas_x);
        auto dir = basis(j);
        return px.integrate([&](const Point& w) {
            double g = m.log_derivative(at_x, dir, w);
            return std::pow(std::abs(g), k);
        });
    };

    for (int p = 0; p < npts && rep.verdict == IntegrabilityReport::Verdict::Pass; ++p) {
        for (int j = 0; j < d; ++j) {
            IntegralResult r = lk_raw(rep.lattice[p], rep.lattice[p], j);
            if (r.status != QuadStatus::Converged) {
                rep.verdict = IntegrabilityReport::Verdict::Divergent;
                rep.witness_point = p;
                rep.witness_direction = j;
                break;
            }
            rep.norms[p][j] = std::pow(r.value, 1.0 / k);
        }
    }
    if (rep.verdict != IntegrabilityReport::Verdict::Pass) return rep;

    // Neighbour pairs: stride over the flattened lattice along each axis.
    std::vector<int> stride(d, 1);
    for (int a = d - 2; a >= 0; --a) stride[a] = stride[a + 1] * per_axis;
    auto axis_index = [&](int flat, int a) { return (flat / stride[a]) % per_axis; };

    double global = 1e-12;
    for (const auto& row : rep.norms)
        for (double n : row) global = std::max(global, n);

    for (int p = 0; p < npts; ++p) {
        for (int a = 0; a < d; ++a) {
            if (axis_index(p, a) + 1 >= per_axis) continue;
            int q = p + stride[a];
            for (int j = 0; j < d; ++j) {
                IntegralResult r1 = lk_raw(rep.lattice[p], rep.lattice[q], j);
                IntegralResult r2 = lk_raw(rep.lattice[q], rep.lattice[p], j);
                if (r1.status != QuadStatus::Converged ||
                    r2.status != QuadStatus::Converged) {
                    rep.verdict = IntegrabilityReport::Verdict::Divergent;
                    rep.witness_point = r1.status != QuadStatus::Converged ? p : q;
                    rep.witness_direction = j;
                    return rep;
                }
                double jump = std::abs(rep.norms[p][j] - rep.norms[q][j]) / global;
                if (jump > rep.max_jump) rep.max_jump = jump;
                if (jump > cfg.continuity_jump_threshold &&
                    rep.verdict == IntegrabilityReport::Verdict::Pass) {
                    rep.verdict = IntegrabilityReport::Verdict::Fail;
                    rep.witness_point = p;
                    rep.witness_direction = j;
                }
            }
        }
    }
    return rep;
}

ParametrizedModel make_step_model(const Measure& mu, const Statistic& kappa,
                                  std::vector<double> tau, double x0) {
    StepPotential sp;
    sp.partition = kappa;
    sp.tau = std::move(tau);
    sp.x0 = x0;
    return ParametrizedModel::from_step(std::move(sp), mu);
}

ParametrizedModel reparametrize(const ParametrizedModel& m, std::vector<Expression> f,
                                ParamBox n_box) {
    check_box(n_box);
    if (static_cast<int>(f.size()) != m.dim())
        throw InvalidSpec("need one coordinate map per target parameter");
    for (const auto& fi : f) {
        if (fi.sample_arity() > 0)
            throw InvalidSpec("parameter maps may not reference sample variables");
        if (fi.param_dim() > n_box.dim())
            throw InvalidSpec("map references parameters beyond the new box");
    }

    auto apply = [f](std::span<const double> y) {
        std::vector<double> x(f.size());
        Point dummy = Point::at_atom(0);
        for (std::size_t i = 0; i < f.size(); ++i) x[i] = f[i].eval(y, dummy);
        return x;
    };

    for (const auto& y : build_lattice(n_box.axes, 5))
        if (!m.box().contains(apply(y)))
            throw OutOfDomain("map leaves the parameter box on the check lattice");

    ParametrizedModel base = m;
    ParamBox nb = n_box;
    auto density = [base, apply](std::span<const double> y, const Point& w) {
        return base.density_value(apply(y), w);
    };
    auto dlog = [base, apply, nb](std::span<const double> y, std::span<const double> v,
                                  const Point& w) {
        double h = clamp_step(nb, y, v, fd_step(y));
        std::vector<double> yp(y.begin(), y.end()), ym(y.begin(), y.end());
        for (std::size_t i = 0; i < y.size(); ++i) {
            yp[i] += h * v[i];
            ym[i] -= h * v[i];
        }
        std::vector<double> xp = apply(yp), xm = apply(ym), x0 = apply(y);
        std::vector<double> jv(xp.size());
        for (std::size_t i = 0; i < xp.size(); ++i) jv[i] = (xp[i] - xm[i]) / (2.0 * h);
        return base.log_derivative(x0, jv, w);
    };
    return ParametrizedModel::from_callbacks(std::move(n_box), m.space(), m.reference(),
                                             density, dlog, m.statistical(),
                                             "reparametrized");
}

} // namespace igkit
