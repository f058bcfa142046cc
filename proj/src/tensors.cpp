#include "igkit/tensors.hpp"

#include "igkit/errors.hpp"

#include <cmath>

namespace igkit {

namespace {

bool all_zero(std::span<const double> v) {
    for (double c : v)
        if (c != 0.0) return false;
    return true;
}

TensorValue contract(const ParametrizedModel& m, std::span<const double> x,
                     const std::vector<std::span<const double>>& dirs) {
    TensorValue out;
    out.order = static_cast<int>(dirs.size());
    for (const auto& d : dirs)
        if (all_zero(d)) return out;
    Measure px = m.density_at(x);
    IntegralResult r = px.integrate([&](const Point& w) {
        double prod = 1.0;
        for (const auto& d : dirs) prod *= m.log_derivative(x, d, w);
        return prod;
    });
    if (r.status != QuadStatus::Converged)
        throw DivergentIntegral("tensor integral did not converge");
    out.value = r.value;
    out.error_estimate = r.error_estimate;
    return out;
}

} // namespace

TensorValue one_form_A(const ParametrizedModel& m, std::span<const double> x,
                       std::span<const double> v) {
    return contract(m, x, {v});
}

TensorValue fisher_form(const ParametrizedModel& m, std::span<const double> x,
                        std::span<const double> v, std::span<const double> w) {
    return contract(m, x, {v, w});
}

Eigen::MatrixXd fisher_matrix(const ParametrizedModel& m, std::span<const double> x) {
    int d = m.dim();
    Eigen::MatrixXd g(d, d);
    std::vector<std::vector<double>> basis(d, std::vector<double>(d, 0.0));
    for (int i = 0; i < d; ++i) basis[i][i] = 1.0;
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            double v = fisher_form(m, x, basis[i], basis[j]).value;
            g(i, j) = v;
            g(j, i) = v;
        }
    return g;
}

TensorValue ac_tensor(const ParametrizedModel& m, std::span<const double> x,
                      std::span<const double> v, std::span<const double> w,
                      std::span<const double> u) {
    return contract(m, x, {v, w, u});
}

TensorValue moment_tensor(const ParametrizedModel& m, std::span<const double> x,
                          std::span<const double> v, int n) {
    if (n < 1) throw InvalidSpec("moment order must be >= 1");
    TensorValue out;
    out.order = n;
    if (all_zero(v)) return out;
    Measure px = m.density_at(x);
    IntegralResult r = px.integrate([&](const Point& w) {
        return std::pow(m.log_derivative(x, v, w), n);
    });
    if (r.status != QuadStatus::Converged)
        throw DivergentIntegral("moment integral did not converge");
    out.value = r.value;
    out.error_estimate = r.error_estimate;
    return out;
}

} // namespace igkit
