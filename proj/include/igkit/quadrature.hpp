#pragma once

#include <functional>
#include <vector>

namespace igkit {

/// Settings for the composite Gauss-Legendre rule on an open interval.
/// The rule never evaluates endpoints; panels are graded dyadically toward
/// both endpoints so integrable endpoint singularities converge under
/// refinement while genuinely divergent integrands keep growing.
struct QuadratureConfig {
    int base_panels = 4;        ///< uniform subdivisions of each dyadic panel (>= 4 means 1 split)
    int nodes_per_panel = 16;   ///< Gauss-Legendre nodes per subpanel
    int refinement_levels = 6;  ///< number of grading refinements
    double divergence_growth_threshold = 10.0; ///< growth factor declaring divergence
    double relative_tolerance = 1e-9;

    void validate() const;
};

enum class QuadStatus { Converged, Divergent, NotConverged };

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0; ///< change between the last two refinement levels
    QuadStatus status = QuadStatus::NotConverged;
    std::vector<double> level_values; ///< per-level trace (divergence evidence)
};

/// n-point Gauss-Legendre nodes and weights on (-1, 1).
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n);

/// Integrate f over the open interval (a, b). Singularities at the endpoints
/// are admissible; divergence is reported through the result status rather
/// than thrown.
QuadResult integrate_interval(const std::function<double(double)>& f, double a,
                              double b, const QuadratureConfig& cfg = {});

/// Like integrate_interval but throws DivergentIntegral / NonFinite on failure.
double integrate_interval_checked(const std::function<double(double)>& f,
                                  double a, double b,
                                  const QuadratureConfig& cfg = {});

} // namespace igkit
