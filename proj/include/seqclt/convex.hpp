#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace seqclt {

struct HalfSpace {
    Eigen::VectorXd a;  // unit normal
    double b = 0.0;     // {x : a.x <= b}
};

struct Ball {
    Eigen::VectorXd c;
    double r = 1.0;
};

struct AxisBox {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
};

class ConvexSet {
public:
    using Shape = std::variant<HalfSpace, Ball, AxisBox>;

    explicit ConvexSet(Shape shape);

    static ConvexSet half_space(Eigen::VectorXd a, double b);
    static ConvexSet ball(Eigen::VectorXd c, double r);
    static ConvexSet box(Eigen::VectorXd lo, Eigen::VectorXd hi);

    const Shape& shape() const { return shape_; }
    std::size_t dim() const;
    std::string kind() const;
    /// Short stable description of the parameters.
    std::string describe() const;

    bool contains(const Eigen::VectorXd& x) const;
    double dist(const Eigen::VectorXd& x) const;
    /// Nearest point of the set.
    Eigen::VectorXd project(const Eigen::VectorXd& x) const;

    /// C^eps = {dist <= eps}; exact for half-spaces and balls. For boxes the
    /// rounded corners are replaced by the enclosing box, so callers that
    /// need exactness use dist() instead.
    ConvexSet inflated(double eps) const;
    /// C^{-eps} = {dist(x, complement) > eps}; empty results give nullopt.
    std::optional<ConvexSet> shrunk(double eps) const;

private:
    Shape shape_;
};

double dist_to_convex(const ConvexSet& C, const Eigen::VectorXd& x);

}  // namespace seqclt
