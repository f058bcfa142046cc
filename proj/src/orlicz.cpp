#include "igkit/orlicz.hpp"

#include "igkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace igkit {

YoungFunction YoungFunction::cosh_minus_one() {
    return YoungFunction(Base::CoshMinusOne, 2.0);
}

YoungFunction YoungFunction::power(double p) {
    if (!(p > 1.0)) throw InvalidSpec("power base needs p > 1");
    return YoungFunction(Base::PowerP, p);
}

YoungFunction YoungFunction::exp_abs_minus_linear() {
    return YoungFunction(Base::ExpAbsMinusLinear, 2.0);
}

YoungFunction YoungFunction::stretched(double lambda) const {
    if (!(lambda > 0.0)) throw InvalidSpec("stretch must be positive");
    YoungFunction y = *this;
    y.lambda_ *= lambda;
    return y;
}

YoungFunction YoungFunction::powered(double q) const {
    if (!(q >= 1.0)) throw InvalidSpec("power must be >= 1");
    YoungFunction y = *this;
    y.q_ *= q;
    return y;
}

double YoungFunction::operator()(double t) const {
    double u = lambda_ * std::abs(t);
    double v = 0.0;
    switch (base_) {
        case Base::CoshMinusOne: v = std::cosh(u) - 1.0; break;
        case Base::PowerP: v = std::pow(u, p_); break;
        case Base::ExpAbsMinusLinear: v = std::expm1(u) - u; break;
    }
    return q_ == 1.0 ? v : std::pow(v, q_);
}

namespace {

/// Integral of phi(f/a); divergence and non-convergence both read as "too
/// small a" for bracketing purposes.
double gauge(const ScalarFn& f, const Measure& mu, const YoungFunction& phi, double a) {
    IntegralResult r =
        mu.integrate([&](const Point& w) { return phi(f(w) / a); });
    if (r.status != QuadStatus::Converged || !std::isfinite(r.value))
        return std::numeric_limits<double>::infinity();
    return r.value;
}

} // namespace

double orlicz_norm(const ScalarFn& f, const Measure& mu, const YoungFunction& phi) {
    double a = 1.0;
    int guard = 0;
    while (gauge(f, mu, phi, a) > 1.0) {
        a *= 2.0;
        if (++guard > 64) throw NotInOrliczSpace("no finite scale admits the gauge");
    }
    double hi = a, lo = 0.0;
    while (hi > 1e-300 && gauge(f, mu, phi, hi / 2.0) <= 1.0) hi /= 2.0;
    if (hi <= 1e-300) return 0.0; // f vanishes mu-a.e. within resolution
    lo = hi / 2.0;
    while ((hi - lo) / hi > 1e-10) {
        double mid = 0.5 * (lo + hi);
        if (gauge(f, mu, phi, mid) <= 1.0)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double stretch_equivalence_check(const ScalarFn& f, const Measure& mu,
                                 const YoungFunction& phi, double lambda) {
    double stretched = orlicz_norm(f, mu, phi.stretched(lambda));
    double plain = orlicz_norm(f, mu, phi);
    return std::abs(stretched - lambda * plain);
}

namespace {

OrliczVerdict exponent_search(const std::vector<double>& grid,
                              const std::function<IntegralResult(double)>& probe) {
    OrliczVerdict out;
    bool any_unclear = false;
    for (double e : grid) {
        IntegralResult r = probe(e);
        out.trace.push_back({e, r.value, r.status});
        if (r.status == QuadStatus::Converged && std::isfinite(r.value)) {
            out.status = OrliczVerdict::Status::Holds;
            out.witness = e;
            return out;
        }
        if (r.status == QuadStatus::NotConverged) any_unclear = true;
    }
    out.status = any_unclear ? OrliczVerdict::Status::Inconclusive
                             : OrliczVerdict::Status::Fails;
    return out;
}

} // namespace

OrliczVerdict in_exponential_tangent(const ScalarFn& f, const Measure& mu) {
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(std::ldexp(1.0, -i));
    return exponent_search(grid, [&](double t) {
        return mu.integrate([&](const Point& w) { return std::exp(t * std::abs(f(w))); });
    });
}

OrliczVerdict preceq(const Measure& mu2, const Measure& mu) {
    auto ratio = radon_nikodym(mu2, mu);
    // A denominator underflowing to zero is divergence evidence when mu2
    // still has mass there, and a negligible point when both densities
    // underflow together; neither is a spec error.
    auto safe_ratio = [&ratio, &mu2](const Point& w) {
        try {
            return ratio(w);
        } catch (const ZeroDenominator&) {
            return mu2.density_value(w) == 0.0
                       ? 0.0
                       : std::numeric_limits<double>::infinity();
        }
    };
    std::vector<double> grid;
    for (int i = 0; i <= 14; ++i) grid.push_back(1.0 + std::ldexp(1.0, -i));
    return exponent_search(grid, [&](double p) {
        return mu.integrate(
            [&](const Point& w) { return std::pow(std::abs(safe_ratio(w)), p); });
    });
}

OrliczVerdict similar(const Measure& mu2, const Measure& mu) {
    OrliczVerdict fwd = preceq(mu2, mu);
    OrliczVerdict bwd = preceq(mu, mu2);
    OrliczVerdict out;
    out.trace = fwd.trace;
    out.trace.insert(out.trace.end(), bwd.trace.begin(), bwd.trace.end());
    if (fwd.holds() && bwd.holds()) {
        out.status = OrliczVerdict::Status::Holds;
        out.witness = std::min(fwd.witness, bwd.witness);
    } else if (fwd.fails() || bwd.fails()) {
        out.status = OrliczVerdict::Status::Fails;
    } else {
        out.status = OrliczVerdict::Status::Inconclusive;
    }
    return out;
}

EConvReport e_convergence_diagnostic(const std::vector<ScalarFn>& gn, const ScalarFn& g,
                                     const Measure& mu) {
    const std::vector<double> ps{2.0, 4.0, 8.0};
    EConvReport rep;
    rep.all_finite = true;
    for (std::size_t n = 0; n < gn.size(); ++n) {
        EConvRow row;
        row.n = static_cast<int>(n) + 1;
        const ScalarFn& h = gn[n];

        auto lp = [&](const std::function<double(const Point&)>& f, double p) {
            IntegralResult r = mu.integrate(
                [&](const Point& w) { return std::pow(std::abs(f(w)), p); });
            if (r.status != QuadStatus::Converged || !std::isfinite(r.value)) {
                row.diverged = true;
                return std::numeric_limits<double>::infinity();
            }
            return std::pow(r.value, 1.0 / p);
        };

        row.l1 = lp([&](const Point& w) { return h(w) - g(w); }, 1.0);
        for (double p : ps) {
            row.ratio_norms.push_back(
                lp([&](const Point& w) { return h(w) / g(w) - 1.0; }, p));
            row.inv_ratio_norms.push_back(
                lp([&](const Point& w) { return g(w) / h(w) - 1.0; }, p));
        }
        if (row.diverged) rep.all_finite = false;
        rep.rows.push_back(std::move(row));
    }
    rep.l1_tail_monotone = true;
    for (std::size_t n = rep.rows.size() / 2; n + 1 < rep.rows.size(); ++n)
        if (rep.rows[n + 1].l1 > rep.rows[n].l1 + 1e-12) rep.l1_tail_monotone = false;
    return rep;
}

Measure tilt(const Measure& mu, const ScalarFn& f) {
    if (mu.has_weights()) {
        std::vector<double> w = mu.weights();
        auto atoms = mu.space()->atoms();
        for (std::size_t i = 0; i < w.size(); ++i) w[i] *= std::exp(f(atoms[i]));
        return Measure::from_weights(mu.space(), std::move(w));
    }
    Measure base = mu;
    ScalarFn fn = f;
    return Measure::from_density(mu.space(), [base, fn](const Point& w) {
        return base.density_value(w) * std::exp(fn(w));
    });
}

SegmentReport segment_similarity(const ScalarFn& f0, const ScalarFn& f1,
                                 const Measure& mu0,
                                 const std::vector<double>& lambdas) {
    SegmentReport rep;
    rep.lambdas = lambdas;
    for (double l : lambdas)
        if (!(l > 0.0 && l < 1.0))
            throw InvalidSpec("segment grid must be interior to (0,1)");

    auto at = [&](double l) {
        return tilt(mu0, [&, l](const Point& w) {
            double a = f0(w), b = f1(w);
            return a + l * (b - a);
        });
    };
    Measure end0 = tilt(mu0, f0);
    Measure end1 = tilt(mu0, f1);

    rep.interior_pairwise_similar = true;
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        for (std::size_t j = i + 1; j < lambdas.size(); ++j) {
            OrliczVerdict v = similar(at(lambdas[i]), at(lambdas[j]));
            if (!v.holds()) rep.interior_pairwise_similar = false;
            rep.interior_verdicts.push_back(std::move(v));
        }

    rep.endpoints_dominate = true;
    for (double l : lambdas) {
        Measure ml = at(l);
        OrliczVerdict a = preceq(ml, end0);
        OrliczVerdict b = preceq(ml, end1);
        if (!a.holds() || !b.holds()) rep.endpoints_dominate = false;
        rep.endpoint_verdicts.push_back(std::move(a));
        rep.endpoint_verdicts.push_back(std::move(b));
    }
    return rep;
}

} // namespace igkit
