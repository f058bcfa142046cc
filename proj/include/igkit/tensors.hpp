#pragma once

#include "igkit/models.hpp"

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace igkit {

/// One evaluated tensor contraction with its quadrature error estimate.
struct TensorValue {
    int order = 1;
    double value = 0.0;
    double error_estimate = 0.0;
};

/// Integral of the log-derivative along V against p(x) (the canonical
/// 1-form); coincides with the mass derivative.
TensorValue one_form_A(const ParametrizedModel& m, std::span<const double> x,
                       std::span<const double> v);

/// Fisher pairing: integral of the product of two log-derivatives.
TensorValue fisher_form(const ParametrizedModel& m, std::span<const double> x,
                        std::span<const double> v, std::span<const double> w);

Eigen::MatrixXd fisher_matrix(const ParametrizedModel& m, std::span<const double> x);

/// Symmetric cubic pairing of three log-derivatives.
TensorValue ac_tensor(const ParametrizedModel& m, std::span<const double> x,
                      std::span<const double> v, std::span<const double> w,
                      std::span<const double> u);

/// n-th diagonal moment: integral of the n-th power of the log-derivative.
TensorValue moment_tensor(const ParametrizedModel& m, std::span<const double> x,
                          std::span<const double> v, int n);

} // namespace igkit
