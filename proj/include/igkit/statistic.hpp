#pragma once

#include "igkit/spaces.hpp"

#include <vector>

namespace igkit {

/// A surjective statistic between sample spaces: a class assignment on a
/// finite space, an interval partition on a grid, or a factor projection
/// on a product.
class Statistic {
public:
    enum class Kind { Identity, Classes, Intervals, Projection };

    static Statistic identity(Space source);
    /// cls[i] = 0-based class of atom i; classes 0..n_classes-1 must all occur.
    static Statistic from_classes(Space source, std::vector<int> cls, int n_classes);
    /// Convenience: classes given as lists of 0-based atom indices.
    static Statistic from_class_lists(Space source,
                                      const std::vector<std::vector<int>>& classes);
    /// Interior cut points a < c1 < ... < c_{k-1} < b; class i is the i-th cell.
    static Statistic interval_partition(Space grid_source, std::vector<double> cuts);
    /// which = 1 or 2; target is the corresponding factor space.
    static Statistic projection(Space product_source, int which);
    /// Permutation of a finite space: perm[i] = target atom of source atom i.
    static Statistic permutation(Space source, std::vector<int> perm);

    Kind kind() const { return kind_; }
    const Space& source() const { return source_; }
    const Space& target() const { return target_; }
    int which_factor() const { return which_; }

    /// Target class index of a source point (finite-target statistics).
    int class_of(const Point& p) const;
    /// Image point in the target space.
    Point map(const Point& p) const;

    const std::vector<int>& classes() const { return cls_; }
    const std::vector<double>& cuts() const { return cuts_; }

    Statistic() = default; ///< empty; only useful as a to-be-assigned slot

private:
    Kind kind_ = Kind::Identity;
    Space source_, target_;
    std::vector<int> cls_;
    std::vector<double> cuts_; // including endpoints a, b
    int which_ = 0;
};

/// Push a measure forward: target mass of a class is the measure of its
/// preimage. Mass-preserving for nonnegative measures.
Measure pushforward_statistic(const Measure& m, const Statistic& k);

} // namespace igkit
