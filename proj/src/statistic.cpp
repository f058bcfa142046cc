#include "igkit/statistic.hpp"

#include "igkit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace igkit {

Statistic Statistic::identity(Space source) {
    if (!source) throw InvalidSpec("statistic needs a source space");
    Statistic k;
    k.kind_ = Kind::Identity;
    k.source_ = source;
    k.target_ = source;
    return k;
}

Statistic Statistic::from_classes(Space source, std::vector<int> cls, int n_classes) {
    if (!source || !source->enumerable())
        throw SpaceMismatch("class assignment needs an enumerable source");
    if (static_cast<int>(cls.size()) != source->atom_count())
        throw PartitionMismatch("class vector length must match atom count");
    if (n_classes < 1) throw PartitionMismatch("need at least one class");
    std::vector<bool> seen(n_classes, false);
    for (int c : cls) {
        if (c < 0 || c >= n_classes) throw PartitionMismatch("class index out of range");
        seen[c] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
        throw PartitionMismatch("every class must be hit (surjectivity)");
    Statistic k;
    k.kind_ = Kind::Classes;
    k.source_ = source;
    k.target_ = SampleSpace::finite(n_classes);
    k.cls_ = std::move(cls);
    return k;
}

Statistic Statistic::from_class_lists(Space source,
                                      const std::vector<std::vector<int>>& classes) {
    if (!source || !source->enumerable())
        throw SpaceMismatch("class assignment needs an enumerable source");
    std::vector<int> cls(source->atom_count(), -1);
    for (std::size_t c = 0; c < classes.size(); ++c) {
        if (classes[c].empty()) throw PartitionMismatch("empty class");
        for (int i : classes[c]) {
            if (i < 0 || i >= static_cast<int>(cls.size()))
                throw PartitionMismatch("atom index out of range");
            if (cls[i] != -1) throw PartitionMismatch("atom assigned twice");
            cls[i] = static_cast<int>(c);
        }
    }
    for (int c : cls)
        if (c == -1) throw PartitionMismatch("atom left unassigned");
    return from_classes(source, std::move(cls), static_cast<int>(classes.size()));
}

Statistic Statistic::interval_partition(Space grid_source, std::vector<double> cuts) {
    if (!grid_source || !grid_source->is_grid())
        throw SpaceMismatch("interval partition needs a grid source");
    double a = grid_source->lower(), b = grid_source->upper();
    std::vector<double> edges;
    edges.push_back(a);
    for (double c : cuts) {
        if (!(c > edges.back() && c < b))
            throw PartitionMismatch("cut points must be strictly increasing inside the interval");
        edges.push_back(c);
    }
    edges.push_back(b);
    Statistic k;
    k.kind_ = Kind::Intervals;
    k.source_ = grid_source;
    k.target_ = SampleSpace::finite(static_cast<int>(edges.size()) - 1);
    k.cuts_ = std::move(edges);
    return k;
}

Statistic Statistic::projection(Space product_source, int which) {
    if (!product_source || !product_source->is_product())
        throw SpaceMismatch("projection needs a product source");
    if (which != 1 && which != 2) throw InvalidSpec("projection factor must be 1 or 2");
    Statistic k;
    k.kind_ = Kind::Projection;
    k.source_ = product_source;
    k.target_ = which == 1 ? product_source->left() : product_source->right();
    k.which_ = which;
    return k;
}

Statistic Statistic::permutation(Space source, std::vector<int> perm) {
    if (!source || !source->is_finite())
        throw SpaceMismatch("permutation needs a finite source");
    int n = source->atom_count();
    if (static_cast<int>(perm.size()) != n)
        throw PartitionMismatch("permutation length must match atom count");
    std::vector<bool> seen(n, false);
    for (int p : perm) {
        if (p < 0 || p >= n || seen[p]) throw PartitionMismatch("not a permutation");
        seen[p] = true;
    }
    Statistic k;
    k.kind_ = Kind::Classes;
    k.source_ = source;
    k.target_ = SampleSpace::finite(n);
    k.cls_ = std::move(perm);
    return k;
}

int Statistic::class_of(const Point& p) const {
    switch (kind_) {
        case Kind::Identity: {
            if (p.arity != 1 || !p.c[0].is_atom)
                throw SpaceMismatch("class_of needs an atomic point");
            return p.c[0].atom;
        }
        case Kind::Classes: {
            int flat;
            if (p.arity == 1) {
                flat = p.c[0].atom;
            } else {
                flat = p.c[0].atom * source_->right()->atom_count() + p.c[1].atom;
            }
            if (flat < 0 || flat >= static_cast<int>(cls_.size()))
                throw SpaceMismatch("atom out of range");
            return cls_[flat];
        }
        case Kind::Intervals: {
            if (p.arity != 1 || p.c[0].is_atom)
                throw SpaceMismatch("interval statistic needs a coordinate point");
            double t = p.c[0].t;
            for (std::size_t i = 1; i + 1 < cuts_.size(); ++i)
                if (t < cuts_[i]) return static_cast<int>(i) - 1;
            return static_cast<int>(cuts_.size()) - 2;
        }
        case Kind::Projection: {
            const Point::Coord& cc = p.c[which_ - 1];
            if (!cc.is_atom)
                throw SpaceMismatch("class_of on a projection to a non-finite factor");
            return cc.atom;
        }
    }
    throw SpaceMismatch("unreachable");
}

Point Statistic::map(const Point& p) const {
    if (kind_ == Kind::Identity) return p;
    if (kind_ == Kind::Projection) {
        Point out;
        out.arity = 1;
        out.c[0] = p.c[which_ - 1];
        return out;
    }
    return Point::at_atom(class_of(p));
}

Measure pushforward_statistic(const Measure& m, const Statistic& k) {
    if (!m.space()->same_as(*k.source()))
        throw SpaceMismatch("measure lives on a different space than the statistic");
    if (k.kind() == Statistic::Kind::Identity) return m;

    const Space& target = k.target();

    if (k.kind() == Statistic::Kind::Intervals) {
        const auto& cuts = k.cuts();
        std::vector<double> w(cuts.size() - 1, 0.0);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            auto cell = [&](double t) { return m.density_value(Point::at_coord(t)); };
            QuadResult q = integrate_interval(cell, cuts[i], cuts[i + 1],
                                              m.space()->quad());
            if (q.status != QuadStatus::Converged)
                throw DivergentIntegral("cell mass did not converge");
            w[i] = q.value;
        }
        return Measure::from_weights(target, std::move(w), m.signed_allowed());
    }

    if (k.kind() == Statistic::Kind::Classes) {
        std::vector<double> w(target->atom_count(), 0.0);
        for (const Point& p : m.space()->atoms())
            w[k.class_of(p)] += m.density_value(p);
        return Measure::from_weights(target, std::move(w), m.signed_allowed());
    }

    // Projection
    const Space& L = m.space()->left();
    const Space& R = m.space()->right();
    if (m.space()->enumerable()) {
        std::vector<double> w(target->atom_count(), 0.0);
        for (const Point& p : m.space()->atoms())
            w[p.c[k.which_factor() - 1].atom] += m.density_value(p);
        return Measure::from_weights(target, std::move(w), m.signed_allowed());
    }
    if (L->is_finite() && R->is_grid()) {
        if (k.which_factor() == 1) {
            std::vector<double> w(L->atom_count(), 0.0);
            for (int i = 0; i < L->atom_count(); ++i) {
                auto fiber = [&](double t) {
                    return m.density_value(Point::pair({true, i, 0.0}, {false, 0, t}));
                };
                QuadResult q =
                    integrate_interval(fiber, R->lower(), R->upper(), R->quad());
                if (q.status != QuadStatus::Converged)
                    throw DivergentIntegral("fiber mass did not converge");
                w[i] = q.value;
            }
            return Measure::from_weights(target, std::move(w), m.signed_allowed());
        }
        int n = L->atom_count();
        return Measure::from_density(
            target,
            [m, n](const Point& p) {
                double acc = 0.0;
                for (int i = 0; i < n; ++i)
                    acc += m.density_value(Point::pair({true, i, 0.0}, p.c[0]));
                return acc;
            },
            m.signed_allowed());
    }
    throw SpaceMismatch("pushforward unsupported on this product shape");
}

} // namespace igkit
