#pragma once

#include "igkit/models.hpp"

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace igkit {

struct NatGradConfig {
    double eta = 0.1;
    int max_iterations = 200;
    double damping = 1e-10;       ///< rho, added to the Fisher matrix diagonal
    double stop_tolerance = 1e-10; ///< on the step norm
    double max_clip_fraction = 0.5;
};

/// Solves (fisher_matrix(m,x) + rho I) dir = g. Throws SingularMetric when
/// the damped matrix is not positive definite.
Eigen::VectorXd natural_direction(const ParametrizedModel& m, std::span<const double> x,
                                  const Eigen::VectorXd& g, double damping = 1e-10);

struct DifferentiableObjective {
    std::function<double(std::span<const double>)> value;
    std::function<Eigen::VectorXd(std::span<const double>)> gradient;
};

/// KL(q || p(x)) for finite-space models, with exact gradient via the
/// model's log-derivatives.
DifferentiableObjective kl_to_target(const ParametrizedModel& m, const Measure& q);

/// Scalar expression in x1..xd; gradient by central differences.
DifferentiableObjective expression_objective(Expression e, const ParamBox& box);

struct Trajectory {
    std::vector<std::vector<double>> xs; ///< iterates, x0 first
    std::vector<double> objectives;
    std::vector<double> step_norms;
    bool converged = false;
    bool monotone_decrease = true;
    int clipped_steps = 0;
};

/// Fisher-preconditioned descent with clip-to-box. Throws LeftDomain when
/// clipping activates on more than cfg.max_clip_fraction of the steps.
Trajectory descend(const ParametrizedModel& m, std::vector<double> x0,
                   const DifferentiableObjective& obj, const NatGradConfig& cfg = {});

} // namespace igkit
