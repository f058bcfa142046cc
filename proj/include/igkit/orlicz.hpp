#pragma once

#include "igkit/spaces.hpp"

#include <functional>
#include <vector>

namespace igkit {

using ScalarFn = std::function<double(const Point&)>;

/// Convex superlinear gauge: a base shape, an argument stretch and a
/// pointwise power. phi(t) = base(lambda*|t|)^q.
class YoungFunction {
public:
    enum class Base { CoshMinusOne, PowerP, ExpAbsMinusLinear };

    static YoungFunction cosh_minus_one();
    static YoungFunction power(double p); ///< |t|^p, p > 1
    static YoungFunction exp_abs_minus_linear();

    YoungFunction stretched(double lambda) const;
    YoungFunction powered(double q) const;

    double operator()(double t) const;

    Base base() const { return base_; }
    double exponent() const { return p_; }
    double stretch() const { return lambda_; }
    double power_q() const { return q_; }

private:
    YoungFunction(Base b, double p) : base_(b), p_(p) {}
    Base base_ = Base::CoshMinusOne;
    double p_ = 2.0;
    double lambda_ = 1.0;
    double q_ = 1.0;
};

/// inf{a > 0 : integral of phi(f/a) dmu <= 1}, by bracketing and bisection
/// to 1e-10 relative. Throws NotInOrliczSpace when no finite bracket exists.
double orlicz_norm(const ScalarFn& f, const Measure& mu, const YoungFunction& phi);

/// |norm under phi(lambda .) - lambda * norm under phi|.
double stretch_equivalence_check(const ScalarFn& f, const Measure& mu,
                                 const YoungFunction& phi, double lambda);

struct OrliczVerdict {
    enum class Status { Holds, Fails, Inconclusive };
    struct TraceEntry {
        double exponent = 0.0;
        double value = 0.0;
        QuadStatus status = QuadStatus::Converged;
    };
    Status status = Status::Inconclusive;
    double witness = 0.0; ///< exponent at which the integral converged
    std::vector<TraceEntry> trace;

    bool holds() const { return status == Status::Holds; }
    bool fails() const { return status == Status::Fails; }
};

/// Searches t over {1, 1/2, ..., 2^-20} for a convergent integral of
/// exp(t|f|) dmu.
OrliczVerdict in_exponential_tangent(const ScalarFn& f, const Measure& mu);

/// Searches p over {2, 1.5, 1.25, ..., 1 + 2^-14} for a convergent integral
/// of (dmu2/dmu)^p dmu.
OrliczVerdict preceq(const Measure& mu2, const Measure& mu);

/// Both preceq directions; witness is the smaller of the two.
OrliczVerdict similar(const Measure& mu2, const Measure& mu);

struct EConvRow {
    int n = 0;
    double l1 = 0.0;
    std::vector<double> ratio_norms;     ///< ||g_n/g - 1||_p for p in {2,4,8}
    std::vector<double> inv_ratio_norms; ///< ||g/g_n - 1||_p
    bool diverged = false;
};

struct EConvReport {
    std::vector<EConvRow> rows;
    bool l1_tail_monotone = false;
    bool all_finite = false;
};

/// Diagnostic table for exponential convergence of densities g_n -> g
/// against mu; no limit is certified.
EConvReport e_convergence_diagnostic(const std::vector<ScalarFn>& gn, const ScalarFn& g,
                                     const Measure& mu);

struct SegmentReport {
    std::vector<double> lambdas;
    bool interior_pairwise_similar = false;
    bool endpoints_dominate = false; ///< each interior measure preceq both endpoints
    std::vector<OrliczVerdict> interior_verdicts;
    std::vector<OrliczVerdict> endpoint_verdicts;
};

/// Log-linear segment exp(f0 + lambda (f1 - f0)) mu0: interior measures
/// should be pairwise similar and dominated by both endpoints.
SegmentReport segment_similarity(const ScalarFn& f0, const ScalarFn& f1,
                                 const Measure& mu0, const std::vector<double>& lambdas);

/// exp(f) density tilt of a measure (same space).
Measure tilt(const Measure& mu, const ScalarFn& f);

} // namespace igkit
