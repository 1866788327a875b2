#include "seqclt/grid.hpp"

#include <algorithm>
#include <cmath>

#include "seqclt/errors.hpp"
#include "seqclt/holder.hpp"
#include "seqclt/parallel.hpp"

namespace seqclt {

GridFunction::GridFunction(std::size_t intervals, double alpha)
    : values_(intervals + 1, 0.0), alpha_(alpha) {
    if (intervals < 4) {
        throw DomainError("grid needs at least 4 intervals");
    }
}

GridFunction::GridFunction(std::vector<double> values, double alpha)
    : values_(std::move(values)), alpha_(alpha) {
    if (values_.size() < 5) {
        throw DomainError("grid needs at least 4 intervals");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw DomainError("grid function has a non-finite value");
        }
    }
}

GridFunction GridFunction::from(const std::function<double(double)>& f, std::size_t intervals,
                                double alpha) {
    GridFunction g(intervals, alpha);
    for (std::size_t i = 0; i <= intervals; ++i) {
        g.values_[i] = f(g.node(i));
    }
    return g;
}

double GridFunction::operator()(double x) const {
    const std::size_t G = intervals();
    const double s = std::clamp(x, 0.0, 1.0) * static_cast<double>(G);
    const std::size_t i = std::min(static_cast<std::size_t>(s), G - 1);
    const double t = s - static_cast<double>(i);
    return values_[i] * (1.0 - t) + values_[i + 1] * t;
}

double GridFunction::cubic(double x) const {
    const std::size_t G = intervals();
    const double s = std::clamp(x, 0.0, 1.0) * static_cast<double>(G);
    const std::size_t i = std::min(static_cast<std::size_t>(s), G - 1);
    const std::size_t i0 = std::clamp<std::size_t>(i == 0 ? 0 : i - 1, 0, G - 3);
    const double u = s - static_cast<double>(i0);
    const double f0 = values_[i0], f1 = values_[i0 + 1], f2 = values_[i0 + 2], f3 = values_[i0 + 3];
    const double v = -f0 * (u - 1) * (u - 2) * (u - 3) / 6 + f1 * u * (u - 2) * (u - 3) / 2 -
                     f2 * u * (u - 1) * (u - 3) / 2 + f3 * u * (u - 1) * (u - 2) / 6;
    const double lo = std::min(values_[i], values_[i + 1]);
    const double hi = std::max(values_[i], values_[i + 1]);
    return std::clamp(v, lo, hi);
}

double GridFunction::integral() const {
    const std::size_t G = intervals();
    std::vector<double> cells(G);
    for (std::size_t i = 0; i < G; ++i) {
        cells[i] = 0.5 * (values_[i] + values_[i + 1]);
    }
    return pairwise_sum(cells) / static_cast<double>(G);
}

double GridFunction::sup_norm() const {
    double m = 0.0;
    for (double v : values_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

double GridFunction::min() const {
    return *std::min_element(values_.begin(), values_.end());
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
    if (o.values_.size() != values_.size()) {
        throw DomainError("grid size mismatch");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] += o.values_[i];
    }
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
    if (o.values_.size() != values_.size()) {
        throw DomainError("grid size mismatch");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] -= o.values_[i];
    }
    return *this;
}

GridFunction& GridFunction::operator*=(double s) {
    for (double& v : values_) {
        v *= s;
    }
    return *this;
}

GridFunction& GridFunction::multiply(const GridFunction& o) {
    if (o.values_.size() != values_.size()) {
        throw DomainError("grid size mismatch");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] *= o.values_[i];
    }
    return *this;
}

double inner(const GridFunction& a, const GridFunction& b) {
    GridFunction p = a;
    p.multiply(b);
    return p.integral();
}

GridDensity::GridDensity(GridFunction f) : f_(std::move(f)) {
    if (f_.min() < 0.0) {
        throw DomainError("density has a negative value");
    }
    const double mass = f_.integral();
    if (std::abs(mass - 1.0) > 1e-8) {
        throw DomainError("density integrates to " + std::to_string(mass) + ", not 1");
    }
}

GridDensity GridDensity::uniform(std::size_t intervals, double alpha) {
    GridFunction f(intervals, alpha);
    std::fill(f.values().begin(), f.values().end(), 1.0);
    return GridDensity(std::move(f));
}

GridDensity GridDensity::normalized(const std::function<double(double)>& f, std::size_t intervals,
                                    double alpha) {
    return normalized(GridFunction::from(f, intervals, alpha));
}

GridDensity GridDensity::normalized(GridFunction f) {
    const double mass = f.integral();
    if (!(mass > 1e-300) || f.min() < 0.0) {
        throw DomainError("cannot normalize a degenerate density");
    }
    f *= 1.0 / mass;
    return GridDensity(std::move(f));
}

double GridDensity::log_seminorm() const {
    if (!seminorm_cache_) {
        seminorm_cache_ = log_holder_seminorm(f_, f_.alpha());
    }
    return *seminorm_cache_;
}

}  // namespace seqclt
