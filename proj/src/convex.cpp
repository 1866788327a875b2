#include "seqclt/convex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "seqclt/errors.hpp"

namespace seqclt {

namespace {

std::string vec_string(const Eigen::VectorXd& v) {
    std::string out = "[";
    char buf[32];
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.6g", i ? ";" : "", v(i));
        out += buf;
    }
    return out + "]";
}

}  // namespace

ConvexSet::ConvexSet(Shape shape) : shape_(std::move(shape)) {
    if (auto* h = std::get_if<HalfSpace>(&shape_)) {
        if (h->a.size() == 0 || std::abs(h->a.norm() - 1.0) > 1e-12) {
            throw DomainError("half-space normal must have unit length");
        }
    } else if (auto* b = std::get_if<Ball>(&shape_)) {
        if (!(b->r > 0.0) || b->c.size() == 0) {
            throw DomainError("ball radius must be positive");
        }
    } else {
        const auto& x = std::get<AxisBox>(shape_);
        if (x.lo.size() != x.hi.size() || x.lo.size() == 0 || !(x.lo.array() < x.hi.array()).all()) {
            throw DomainError("box needs lo < hi componentwise");
        }
    }
}

ConvexSet ConvexSet::half_space(Eigen::VectorXd a, double b) {
    return ConvexSet(HalfSpace{std::move(a), b});
}

ConvexSet ConvexSet::ball(Eigen::VectorXd c, double r) {
    return ConvexSet(Ball{std::move(c), r});
}

ConvexSet ConvexSet::box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
    return ConvexSet(AxisBox{std::move(lo), std::move(hi)});
}

std::size_t ConvexSet::dim() const {
    return std::visit(
        [](const auto& s) -> std::size_t {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, HalfSpace>) {
                return static_cast<std::size_t>(s.a.size());
            } else if constexpr (std::is_same_v<S, Ball>) {
                return static_cast<std::size_t>(s.c.size());
            } else {
                return static_cast<std::size_t>(s.lo.size());
            }
        },
        shape_);
}

std::string ConvexSet::kind() const {
    static const char* names[] = {"halfspace", "ball", "box"};
    return names[shape_.index()];
}

std::string ConvexSet::describe() const {
    char buf[32];
    if (const auto* h = std::get_if<HalfSpace>(&shape_)) {
        std::snprintf(buf, sizeof buf, "%.6g", h->b);
        return "a=" + vec_string(h->a) + " b=" + buf;
    }
    if (const auto* b = std::get_if<Ball>(&shape_)) {
        std::snprintf(buf, sizeof buf, "%.6g", b->r);
        return "c=" + vec_string(b->c) + " r=" + buf;
    }
    const auto& x = std::get<AxisBox>(shape_);
    return "lo=" + vec_string(x.lo) + " hi=" + vec_string(x.hi);
}

bool ConvexSet::contains(const Eigen::VectorXd& x) const {
    if (const auto* h = std::get_if<HalfSpace>(&shape_)) {
        return h->a.dot(x) <= h->b;
    }
    if (const auto* b = std::get_if<Ball>(&shape_)) {
        return (x - b->c).squaredNorm() <= b->r * b->r;
    }
    const auto& bx = std::get<AxisBox>(shape_);
    return (x.array() >= bx.lo.array()).all() && (x.array() <= bx.hi.array()).all();
}

double ConvexSet::dist(const Eigen::VectorXd& x) const {
    if (const auto* h = std::get_if<HalfSpace>(&shape_)) {
        return std::max(h->a.dot(x) - h->b, 0.0);
    }
    if (const auto* b = std::get_if<Ball>(&shape_)) {
        return std::max((x - b->c).norm() - b->r, 0.0);
    }
    const auto& bx = std::get<AxisBox>(shape_);
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double e = std::max({bx.lo(i) - x(i), 0.0, x(i) - bx.hi(i)});
        s += e * e;
    }
    return std::sqrt(s);
}

Eigen::VectorXd ConvexSet::project(const Eigen::VectorXd& x) const {
    if (const auto* h = std::get_if<HalfSpace>(&shape_)) {
        const double excess = h->a.dot(x) - h->b;
        return excess > 0.0 ? Eigen::VectorXd(x - excess * h->a) : x;
    }
    if (const auto* b = std::get_if<Ball>(&shape_)) {
        const Eigen::VectorXd v = x - b->c;
        const double n = v.norm();
        return n > b->r ? Eigen::VectorXd(b->c + v * (b->r / n)) : x;
    }
    const auto& bx = std::get<AxisBox>(shape_);
    return x.cwiseMax(bx.lo).cwiseMin(bx.hi);
}

ConvexSet ConvexSet::inflated(double eps) const {
    if (const auto* h = std::get_if<HalfSpace>(&shape_)) {
        return half_space(h->a, h->b + eps);
    }
    if (const auto* b = std::get_if<Ball>(&shape_)) {
        return ball(b->c, b->r + eps);
    }
    const auto& bx = std::get<AxisBox>(shape_);
    return box(bx.lo.array() - eps, bx.hi.array() + eps);
}

std::optional<ConvexSet> ConvexSet::shrunk(double eps) const {
    if (const auto* h = std::get_if<HalfSpace>(&shape_)) {
        return half_space(h->a, h->b - eps);
    }
    if (const auto* b = std::get_if<Ball>(&shape_)) {
        if (b->r <= eps) {
            return std::nullopt;
        }
        return ball(b->c, b->r - eps);
    }
    const auto& bx = std::get<AxisBox>(shape_);
    const Eigen::VectorXd lo = bx.lo.array() + eps;
    const Eigen::VectorXd hi = bx.hi.array() - eps;
    if (!(lo.array() < hi.array()).all()) {
        return std::nullopt;
    }
    return box(lo, hi);
}

double dist_to_convex(const ConvexSet& C, const Eigen::VectorXd& x) {
    return C.dist(x);
}

}  // namespace seqclt
