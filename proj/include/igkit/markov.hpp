#pragma once

#include "igkit/models.hpp"
#include "igkit/statistic.hpp"

#include <cstdint>
#include <vector>

namespace igkit {

/// Row-stochastic transition kernel between finite spaces (optionally a
/// finite source with expression-density rows over a grid target).
class MarkovKernel {
public:
    static MarkovKernel from_matrix(Space source, Space target,
                                    std::vector<std::vector<double>> rows);
    static MarkovKernel identity(Space finite_space);
    /// Rows given as probability densities in w1 over a grid target.
    static MarkovKernel from_row_expressions(Space source, Space grid_target,
                                             std::vector<Expression> rows);

    const Space& source() const { return source_; }
    const Space& target() const { return target_; }
    bool finite_target() const { return target_->is_finite(); }
    bool strictly_positive() const { return strictly_positive_; }

    double entry(int i, int j) const;
    const std::vector<std::vector<double>>& matrix() const { return rows_; }
    /// Row i as a probability measure on the target.
    Measure row(int i) const;
    /// Row density with respect to a reference probability measure mu2 on
    /// the target; throws ZeroDenominator where mu2 vanishes.
    double row_density_wrt(int i, const Measure& mu2, const Point& w2) const;

    Measure pushforward(const Measure& nu) const;
    /// (this o other): apply this kernel first, then other.
    MarkovKernel compose(const MarkovKernel& other) const;

private:
    MarkovKernel() = default;
    Space source_, target_;
    std::vector<std::vector<double>> rows_;
    std::vector<Expression> row_exprs_;
    bool strictly_positive_ = false;
};

/// Kernel from the class space of kappa back into its source, with row i
/// supported exactly on the preimage of class i. weights[i] lists the
/// masses of class i's atoms in increasing atom order.
MarkovKernel congruent_embedding(const Statistic& kappa,
                                 const std::vector<std::vector<double>>& weights);

/// True iff lumping by kappa after the kernel is the identity, i.e. the
/// kernel is a congruent embedding for kappa.
bool left_inverse_check(const MarkovKernel& k, const Statistic& kappa);

struct SufficiencyVerdict {
    enum class Verdict { Sufficient, NotSufficient, Inconclusive };
    Verdict verdict = Verdict::Inconclusive;
    double max_deviation = 0.0;
    std::vector<double> witness_x, witness_x2;
    Point witness_w = Point::at_atom(0);
    bool has_witness = false;
};

struct SufficiencyConfig {
    int points_per_axis = 7;
    double sufficient_below = 1e-7;
    double not_sufficient_above = 1e-4;
};

/// Fisher-Neyman ratio test: the density divided by the pushforward density
/// must not depend on the parameter.
SufficiencyVerdict check_sufficiency(const ParametrizedModel& m, const Statistic& kappa,
                                     const SufficiencyConfig& cfg = {});

/// The model of pushforward measures: density is the class mass ratio,
/// log-derivative the fiber average of the original one.
ParametrizedModel pushforward_model(const ParametrizedModel& m, const Statistic& kappa);

/// Spread a model over the atoms of kappa's source through a congruent
/// embedding kernel with strictly positive row weights; kappa is then
/// sufficient for the result and lumping by it recovers the original.
ParametrizedModel congruent_embed_model(const ParametrizedModel& m,
                                        const Statistic& kappa, const MarkovKernel& k);

/// Normalized fiber measures over the first factor of a product-space model.
std::vector<Measure> conditional_distribution(const ParametrizedModel& m,
                                              std::span<const double> x);

/// Joint model on source x target with density (row density) * p(x, w1);
/// the first-factor marginal reproduces the original model.
ParametrizedModel lift_model_by_kernel(const ParametrizedModel& m,
                                       const MarkovKernel& k, const Measure& mu2);

struct KernelDecomposition {
    ParametrizedModel lift;
    SufficiencyVerdict pi1_sufficiency;
    ParametrizedModel pi2_model;
    double residual = 0.0; ///< max |pi2-pushforward of lift - kernel pushforward|
};

KernelDecomposition decompose_markov_morphism(const ParametrizedModel& m,
                                              const MarkovKernel& k, const Measure& mu2,
                                              int lattice_points = 7);

} // namespace igkit
