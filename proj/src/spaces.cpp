#include "igkit/spaces.hpp"

#include "igkit/errors.hpp"

#include <cmath>
#include <set>

namespace igkit {

Space SampleSpace::finite(int n, std::vector<std::string> labels) {
    if (n < 1) throw InvalidSpec("finite space needs n >= 1");
    if (labels.empty()) {
        labels.reserve(n);
        for (int i = 0; i < n; ++i) labels.push_back(std::to_string(i + 1));
    }
    if (static_cast<int>(labels.size()) != n)
        throw InvalidSpec("label count must match n");
    std::set<std::string> uniq(labels.begin(), labels.end());
    if (static_cast<int>(uniq.size()) != n)
        throw InvalidSpec("labels must be distinct");
    auto s = std::shared_ptr<SampleSpace>(new SampleSpace());
    s->kind_ = Kind::Finite;
    s->n_ = n;
    s->labels_ = std::move(labels);
    return s;
}

Space SampleSpace::grid(double a, double b, QuadratureConfig quad) {
    if (!(a < b)) throw InvalidSpec("grid requires a < b");
    quad.validate();
    auto s = std::shared_ptr<SampleSpace>(new SampleSpace());
    s->kind_ = Kind::Grid;
    s->a_ = a;
    s->b_ = b;
    s->quad_ = quad;
    return s;
}

Space SampleSpace::product(Space left, Space right) {
    if (!left || !right) throw InvalidSpec("product factors must be set");
    if (left->is_product() || right->is_product())
        throw InvalidSpec("products deeper than pairs are not supported");
    auto s = std::shared_ptr<SampleSpace>(new SampleSpace());
    s->kind_ = Kind::Product;
    s->left_ = std::move(left);
    s->right_ = std::move(right);
    return s;
}

int SampleSpace::atom_count() const {
    if (kind_ == Kind::Finite) return n_;
    if (kind_ == Kind::Product && enumerable())
        return left_->atom_count() * right_->atom_count();
    throw SpaceMismatch("atom_count on a non-enumerable space");
}

bool SampleSpace::enumerable() const {
    if (kind_ == Kind::Finite) return true;
    if (kind_ == Kind::Product) return left_->is_finite() && right_->is_finite();
    return false;
}

std::vector<Point> SampleSpace::atoms() const {
    std::vector<Point> pts;
    if (kind_ == Kind::Finite) {
        for (int i = 0; i < n_; ++i) pts.push_back(Point::at_atom(i));
        return pts;
    }
    if (kind_ == Kind::Product && enumerable()) {
        for (int i = 0; i < left_->atom_count(); ++i)
            for (int j = 0; j < right_->atom_count(); ++j)
                pts.push_back(Point::pair({true, i, 0.0}, {true, j, 0.0}));
        return pts;
    }
    throw SpaceMismatch("atoms() on a non-enumerable space");
}

bool SampleSpace::same_as(const SampleSpace& o) const {
    if (kind_ != o.kind_) return false;
    switch (kind_) {
        case Kind::Finite: return n_ == o.n_;
        case Kind::Grid: return a_ == o.a_ && b_ == o.b_;
        case Kind::Product:
            return left_->same_as(*o.left_) && right_->same_as(*o.right_);
    }
    return false;
}

// ---------------------------------------------------------------------------

Measure Measure::from_weights(Space space, std::vector<double> weights,
                              bool signed_allowed) {
    if (!space || !space->enumerable())
        throw SpaceMismatch("weight representation needs an enumerable space");
    if (static_cast<int>(weights.size()) != space->atom_count())
        throw SpaceMismatch("weight count must match atom count");
    if (!signed_allowed)
        for (double w : weights)
            if (w < 0.0) throw InvalidSpec("negative weight without signed_allowed");
    Measure m;
    m.space_ = std::move(space);
    m.weights_ = std::move(weights);
    m.signed_allowed_ = signed_allowed;
    return m;
}

Measure Measure::from_density(Space space, DensityFn density, bool signed_allowed) {
    if (!space || space->enumerable())
        throw SpaceMismatch("density representation is for spaces with a grid factor");
    Measure m;
    m.space_ = std::move(space);
    m.density_ = std::move(density);
    m.signed_allowed_ = signed_allowed;
    return m;
}

Measure Measure::reference(Space space) {
    if (space->enumerable())
        return from_weights(space, std::vector<double>(space->atom_count(), 1.0));
    return from_density(space, [](const Point&) { return 1.0; });
}

Measure Measure::uniform_probability(Space space) {
    if (space->enumerable()) {
        int n = space->atom_count();
        return from_weights(space, std::vector<double>(n, 1.0 / n));
    }
    if (space->is_grid()) {
        double len = space->upper() - space->lower();
        return from_density(space, [len](const Point&) { return 1.0 / len; });
    }
    throw SpaceMismatch("uniform probability unsupported on this space");
}

namespace {
int flat_index(const SampleSpace& space, const Point& p) {
    if (space.kind() == SampleSpace::Kind::Finite) {
        if (p.arity != 1 || !p.c[0].is_atom)
            throw SpaceMismatch("point does not address a finite space");
        int i = p.c[0].atom;
        if (i < 0 || i >= space.atom_count()) throw SpaceMismatch("atom out of range");
        return i;
    }
    // enumerable product
    int nr = space.right()->atom_count();
    return p.c[0].atom * nr + p.c[1].atom;
}
} // namespace

double Measure::density_value(const Point& p) const {
    if (has_weights()) return weights_[flat_index(*space_, p)];
    return density_(p);
}

IntegralResult Measure::integrate(const std::function<double(const Point&)>& g) const {
    IntegralResult out;
    if (has_weights()) {
        double acc = 0.0;
        for (const Point& p : space_->atoms()) acc += density_value(p) * g(p);
        out.value = acc;
        out.status = std::isfinite(acc) ? QuadStatus::Converged : QuadStatus::Divergent;
        return out;
    }
    if (space_->is_grid()) {
        auto integrand = [&](double t) {
            Point p = Point::at_coord(t);
            return density_(p) * g(p);
        };
        QuadResult q = integrate_interval(integrand, space_->lower(), space_->upper(),
                                          space_->quad());
        return {q.value, q.error_estimate, q.status};
    }
    // Product with a grid factor: iterate the finite factor, integrate the grid one.
    const Space& L = space_->left();
    const Space& R = space_->right();
    if (L->is_finite() && R->is_grid()) {
        double acc = 0.0, err = 0.0;
        for (int i = 0; i < L->atom_count(); ++i) {
            auto integrand = [&](double t) {
                Point p = Point::pair({true, i, 0.0}, {false, 0, t});
                return density_(p) * g(p);
            };
            QuadResult q =
                integrate_interval(integrand, R->lower(), R->upper(), R->quad());
            if (q.status != QuadStatus::Converged) return {q.value, q.error_estimate, q.status};
            acc += q.value;
            err += q.error_estimate;
        }
        return {acc, err, QuadStatus::Converged};
    }
    throw SpaceMismatch("integration unsupported on this product shape");
}

double Measure::integrate_checked(const std::function<double(const Point&)>& g) const {
    IntegralResult r = integrate(g);
    if (r.status == QuadStatus::Divergent)
        throw DivergentIntegral("measure integral grows under refinement");
    if (r.status == QuadStatus::NotConverged)
        throw DivergentIntegral("measure integral failed to converge");
    return r.value;
}

double Measure::mass() const {
    return integrate_checked([](const Point&) { return 1.0; });
}

double total_variation(const Measure& m) {
    if (m.has_weights()) {
        double acc = 0.0;
        for (double w : m.weights()) acc += std::abs(w);
        return acc;
    }
    return m.integrate_checked([&](const Point& p) {
        return m.density_value(p) < 0.0 ? -1.0 : 1.0;
    });
}

std::function<double(const Point&)> radon_nikodym(const Measure& m1,
                                                  const Measure& m2) {
    if (!m1.space()->same_as(*m2.space()))
        throw SpaceMismatch("radon_nikodym requires a common space");
    if (m2.has_weights())
        for (double w : m2.weights())
            if (w == 0.0) throw ZeroDenominator("m2 vanishes at an atom");
    return [m1, m2](const Point& p) {
        double d = m2.density_value(p);
        if (d == 0.0) throw ZeroDenominator("m2 vanishes at evaluation point");
        return m1.density_value(p) / d;
    };
}

} // namespace igkit
