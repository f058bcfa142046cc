#pragma once

#include "igkit/markov.hpp"
#include "igkit/tensors.hpp"

#include <cstdint>
#include <vector>

namespace igkit {

/// Max deviations between tensor values on a model and on its pushforward
/// under a sufficient statistic, over a parameter lattice and basis
/// directions.
struct InvarianceReport {
    double a_abs = 0.0, a_rel = 0.0;
    double fisher_abs = 0.0, fisher_rel = 0.0;
    double ac_abs = 0.0, ac_rel = 0.0;

    double worst_abs() const {
        return std::max({a_abs, fisher_abs, ac_abs});
    }
};

/// Refuses (NotSufficient) unless check_sufficiency certifies kappa.
InvarianceReport invariance_report(const ParametrizedModel& m, const Statistic& kappa,
                                   int lattice_points = 5);

/// Fisher value minus the pushforward Fisher value at (x, V); nonnegative
/// up to roundoff, zero exactly for sufficient statistics.
double monotonicity_gap(const ParametrizedModel& m, const Statistic& kappa,
                        std::span<const double> x, std::span<const double> v);

struct InfoLoss {
    double loss = 0.0;     ///< expected fiber-conditional Fisher value
    double residual = 0.0; ///< |gap - loss|
};

InfoLoss information_loss(const ParametrizedModel& m, const Statistic& kappa,
                          std::span<const double> x, std::span<const double> v);

/// One observation for the span fitter: total mass, the basis tensor values
/// at that sample, and the candidate field's value.
struct FieldSample {
    double mass = 0.0;
    std::vector<double> basis;
    double value = 0.0;
};

struct ChentsovFit {
    struct Bin {
        double mass_center = 0.0;
        int count = 0;
        std::vector<double> coeffs;
        double residual = 0.0;
        bool degenerate = false; ///< design matrix rank-deficient in this bin
    };
    int n_basis = 0;
    double bin_width = 0.05;
    std::vector<Bin> bins;

    double max_residual() const;
};

/// Least squares per mass bin; coefficients are piecewise constant in the
/// total mass. Throws IllConditioned in strict mode when a bin's design
/// matrix is rank-deficient; otherwise the bin is flagged degenerate.
ChentsovFit fit_in_span(const std::vector<FieldSample>& samples, int n_basis,
                        double bin_width = 0.05, bool strict = false);

/// basis {A}
ChentsovFit fit_invariant_oneform(const std::vector<FieldSample>& samples);
/// basis {fisher, A^2}
ChentsovFit fit_invariant_quadratic(const std::vector<FieldSample>& samples);
/// basis {amari-chentsov, A^3, A*fisher}
ChentsovFit fit_invariant_cubic(const std::vector<FieldSample>& samples);

/// Tensor values of a randomly generated piecewise-log-linear model at its
/// anchor point; the canonical sample generator for the span fitters. Masses
/// land exactly on bin centers of width 0.05.
struct StepTensorSample {
    double mass = 0.0;
    double a = 0.0;      ///< 1st moment
    double fisher = 0.0; ///< 2nd moment
    double ac = 0.0;     ///< 3rd moment
};

std::vector<StepTensorSample> sample_step_tensors(std::uint64_t seed, int trials);

} // namespace igkit
