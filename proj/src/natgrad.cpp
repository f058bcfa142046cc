#include "igkit/natgrad.hpp"

#include "igkit/errors.hpp"
#include "igkit/tensors.hpp"

#include <cmath>

namespace igkit {

Eigen::VectorXd natural_direction(const ParametrizedModel& m, std::span<const double> x,
                                  const Eigen::VectorXd& g, double damping) {
    if (damping < 0.0) throw InvalidSpec("damping must be nonnegative");
    int d = m.dim();
    if (g.size() != d) throw InvalidSpec("gradient dimension mismatch");
    Eigen::MatrixXd G = fisher_matrix(m, x);
    G.diagonal().array() += damping;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw SingularMetric("damped Fisher matrix is not positive definite");
    return G.ldlt().solve(g);
}

DifferentiableObjective kl_to_target(const ParametrizedModel& m, const Measure& q) {
    if (!m.space()->enumerable())
        throw SpaceMismatch("KL objective supported on enumerable spaces");
    if (!q.space()->same_as(*m.space()))
        throw SpaceMismatch("target lives on a different space");
    if (std::abs(q.mass() - 1.0) > 1e-9)
        throw NotProbability("KL target must be a probability measure");

    ParametrizedModel base = m;
    Measure target = q;
    DifferentiableObjective obj;
    obj.value = [base, target](std::span<const double> x) {
        Measure px = base.density_at(x);
        double kl = 0.0;
        for (const Point& w : base.space()->atoms()) {
            double qa = target.density_value(w);
            if (qa == 0.0) continue;
            double pa = px.density_value(w);
            if (pa <= 0.0) throw ZeroDenominator("model vanishes where target does not");
            kl += qa * std::log(qa / pa);
        }
        return kl;
    };
    obj.gradient = [base, target](std::span<const double> x) {
        int d = base.dim();
        Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
        std::vector<double> e(d, 0.0);
        for (int k = 0; k < d; ++k) {
            e[k] = 1.0;
            double acc = 0.0;
            for (const Point& w : base.space()->atoms())
                acc -= target.density_value(w) * base.log_derivative(x, e, w);
            g(k) = acc;
            e[k] = 0.0;
        }
        return g;
    };
    return obj;
}

DifferentiableObjective expression_objective(Expression e, const ParamBox& box) {
    if (e.sample_arity() > 0)
        throw InvalidSpec("objective may not reference sample variables");
    if (e.param_dim() > box.dim())
        throw InvalidSpec("objective references parameters beyond the box");
    ParamBox b = box;
    DifferentiableObjective obj;
    obj.value = [e](std::span<const double> x) {
        return e.eval(x, Point::at_atom(0));
    };
    obj.gradient = [e, b](std::span<const double> x) {
        int d = b.dim();
        Eigen::VectorXd g(d);
        double xmax = 1.0;
        for (double xi : x) xmax = std::max(xmax, std::abs(xi));
        double h = 6.055454452393343e-06 * xmax;
        for (int k = 0; k < d; ++k) {
            std::vector<double> p(x.begin(), x.end()), q(x.begin(), x.end());
            double room = std::min(x[k] - b.axes[k].first, b.axes[k].second - x[k]);
            double hk = std::min(h, 0.5 * room);
            p[k] += hk;
            q[k] -= hk;
            g(k) = (e.eval(p, Point::at_atom(0)) - e.eval(q, Point::at_atom(0))) /
                   (2.0 * hk);
        }
        return g;
    };
    return obj;
}

Trajectory descend(const ParametrizedModel& m, std::vector<double> x0,
                   const DifferentiableObjective& obj, const NatGradConfig& cfg) {
    if (!(cfg.eta > 0.0) || !(cfg.stop_tolerance > 0.0) || cfg.max_iterations < 1)
        throw InvalidSpec("step size, tolerance and iteration budget must be positive");
    if (!m.box().contains(x0)) throw OutOfDomain("start point outside the box");

    Trajectory tr;
    std::vector<double> x = std::move(x0);
    tr.xs.push_back(x);
    tr.objectives.push_back(obj.value(x));

    for (int it = 0; it < cfg.max_iterations; ++it) {
        Eigen::VectorXd g = obj.gradient(x);
        Eigen::VectorXd dir = natural_direction(m, x, g, cfg.damping);

        bool clipped = false;
        std::vector<double> xn(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) {
            xn[k] = x[k] - cfg.eta * dir(static_cast<int>(k));
            auto [lo, hi] = m.box().axes[k];
            double margin = 1e-9 * (hi - lo);
            if (xn[k] <= lo + margin) { xn[k] = lo + margin; clipped = true; }
            if (xn[k] >= hi - margin) { xn[k] = hi - margin; clipped = true; }
        }
        if (clipped) ++tr.clipped_steps;

        double step = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k)
            step += (xn[k] - x[k]) * (xn[k] - x[k]);
        step = std::sqrt(step);

        x = std::move(xn);
        double f = obj.value(x);
        if (f > tr.objectives.back() + 1e-12) tr.monotone_decrease = false;
        tr.xs.push_back(x);
        tr.objectives.push_back(f);
        tr.step_norms.push_back(step);

        int done = it + 1;
        if (done >= 10 &&
            tr.clipped_steps > cfg.max_clip_fraction * static_cast<double>(done))
            throw LeftDomain("descent keeps hitting the box boundary");
        if (step <= cfg.stop_tolerance) {
            // A zero step produced by clamping is a pinned iterate, not a
            // stationary point.
            if (clipped) throw LeftDomain("descent is pinned to the box boundary");
            tr.converged = true;
            break;
        }
    }
    return tr;
}

} // namespace igkit
