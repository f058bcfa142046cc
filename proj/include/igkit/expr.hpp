#pragma once

#include "igkit/spaces.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace igkit {

/// Parsed arithmetic expression over parameter variables x1..xd, sample
/// variables w1 (w2 on products), the operators + - * / ^ and the functions
/// exp, log, sqrt, cosh, abs, pow. Immutable after parsing.
class Expression {
public:
    static Expression parse(const std::string& text);

    /// Canonical text form; parse(print()) reproduces the same tree.
    std::string print() const;

    /// Highest referenced x-index (0 when no parameter appears).
    int param_dim() const;
    /// Highest referenced w-index (0, 1 or 2).
    int sample_arity() const;

    /// IEEE double evaluation; throws DomainError / NonFinite.
    double eval(std::span<const double> x, const Point& w) const;

    bool same_tree(const Expression& other) const;

    struct Node;

private:
    std::shared_ptr<const Node> root_;
};

/// Central-difference settings for directional derivatives of ln p.
struct DiffConfig {
    /// h = step_scale * max(1, |x|_inf); step_scale defaults to cbrt(eps).
    double step_scale = 6.055454452393343e-06;
    /// per-axis override (empty = use the rule above)
    std::vector<double> step_override;
};

/// Directional derivative of ln e at x along V, evaluated at sample point w:
/// (ln e(x+hV) - ln e(x-hV)) / 2h. The density must stay positive on the
/// stencil; throws DomainError otherwise.
double dlog_dv(const Expression& e, std::span<const double> x,
               std::span<const double> v, const Point& w,
               const DiffConfig& cfg = {});

} // namespace igkit
