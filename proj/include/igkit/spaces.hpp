#pragma once

#include "igkit/quadrature.hpp"

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace igkit {

class SampleSpace;
using Space = std::shared_ptr<const SampleSpace>;

/// A point of a sample space: an atom index (finite), a coordinate (grid),
/// or a pair of those (product, depth <= 2).
struct Point {
    struct Coord {
        bool is_atom = true;
        int atom = 0;
        double t = 0.0;
    };
    Coord c[2];
    int arity = 1;

    static Point at_atom(int i) {
        Point p;
        p.c[0] = {true, i, 0.0};
        return p;
    }
    static Point at_coord(double t) {
        Point p;
        p.c[0] = {false, 0, t};
        return p;
    }
    static Point pair(Point::Coord left, Point::Coord right) {
        Point p;
        p.arity = 2;
        p.c[0] = left;
        p.c[1] = right;
        return p;
    }

    /// Value seen by expressions: atom index is 1-based, grids use the coordinate.
    double w(int i) const {
        const Coord& cc = c[i];
        return cc.is_atom ? static_cast<double>(cc.atom + 1) : cc.t;
    }
};

/// Sample space: finite weighted set, open-interval quadrature grid, or a
/// pair product of those.
class SampleSpace : public std::enable_shared_from_this<SampleSpace> {
public:
    enum class Kind { Finite, Grid, Product };

    static Space finite(int n, std::vector<std::string> labels = {});
    static Space grid(double a, double b, QuadratureConfig quad = {});
    static Space product(Space left, Space right);

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::Finite; }
    bool is_grid() const { return kind_ == Kind::Grid; }
    bool is_product() const { return kind_ == Kind::Product; }

    int atom_count() const;                    ///< Finite only
    const std::vector<std::string>& labels() const { return labels_; }
    double lower() const { return a_; }        ///< Grid only
    double upper() const { return b_; }
    const QuadratureConfig& quad() const { return quad_; }
    const Space& left() const { return left_; }
    const Space& right() const { return right_; }

    /// True when the space can be enumerated atom by atom
    /// (Finite, or Finite x Finite).
    bool enumerable() const;
    std::vector<Point> atoms() const;

    bool same_as(const SampleSpace& other) const;

private:
    SampleSpace() = default;
    Kind kind_ = Kind::Finite;
    int n_ = 0;
    std::vector<std::string> labels_;
    double a_ = 0.0, b_ = 1.0;
    QuadratureConfig quad_;
    Space left_, right_;
};

/// Outcome of integrating against a measure; mirrors QuadResult but finite
/// sums are always exact/converged.
struct IntegralResult {
    double value = 0.0;
    double error_estimate = 0.0;
    QuadStatus status = QuadStatus::Converged;
};

/// A finite measure: weights per atom on finite spaces, a density callback
/// against the uniform (Lebesgue) reference on grids. Immutable.
class Measure {
public:
    using DensityFn = std::function<double(const Point&)>;

    static Measure from_weights(Space space, std::vector<double> weights,
                                bool signed_allowed = false);
    static Measure from_density(Space space, DensityFn density,
                                bool signed_allowed = false);
    /// Counting measure (weight 1 per atom) or Lebesgue density 1.
    static Measure reference(Space space);
    static Measure uniform_probability(Space space);

    const Space& space() const { return space_; }
    bool has_weights() const { return !weights_.empty(); }
    const std::vector<double>& weights() const { return weights_; }
    bool signed_allowed() const { return signed_allowed_; }

    /// Pointwise value of the density w.r.t. the reference measure
    /// (for finite spaces the weight itself, i.e. w.r.t. counting measure).
    double density_value(const Point& p) const;

    /// Integral of g against this measure, with divergence evidence.
    IntegralResult integrate(const std::function<double(const Point&)>& g) const;
    /// Same but throws DivergentIntegral on failure.
    double integrate_checked(const std::function<double(const Point&)>& g) const;

    double mass() const; ///< integral of 1

    Measure() = default; ///< empty; only useful as a to-be-assigned slot

private:
    Space space_;
    std::vector<double> weights_;
    DensityFn density_;
    bool signed_allowed_ = false;
};

/// Total variation norm; equals the mass for nonnegative measures.
double total_variation(const Measure& m);

/// Pointwise Radon-Nikodym ratio dm1/dm2 on the common space. m2 must be
/// strictly positive where evaluated; throws ZeroDenominator otherwise.
std::function<double(const Point&)> radon_nikodym(const Measure& m1,
                                                  const Measure& m2);

} // namespace igkit
