#include "seqclt/maps.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <sstream>

#include "seqclt/errors.hpp"

namespace seqclt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string format_c(double c) {
    std::ostringstream out;
    out << c;
    return out.str();
}

}  // namespace

PiecewiseExpandingMap::PiecewiseExpandingMap(std::string label, std::vector<BranchSpec> branches,
                                             int integer_slope, int grid_per_branch)
    : label_(std::move(label)),
      branches_(std::move(branches)),
      integer_slope_(integer_slope),
      grid_per_branch_(grid_per_branch) {
    if (branches_.empty()) {
        throw DomainError("map '" + label_ + "' has no branches");
    }
    if (std::abs(branches_.front().left) > 1e-15 || std::abs(branches_.back().right - 1.0) > 1e-15) {
        throw DomainError("branches of map '" + label_ + "' do not cover [0,1]");
    }
    for (std::size_t b = 0; b < branches_.size(); ++b) {
        const auto& br = branches_[b];
        if (!br.forward || !br.derivative) {
            throw DomainError("branch " + std::to_string(b) + " of map '" + label_ + "' lacks callables");
        }
        if (!(br.right > br.left)) {
            throw DomainError("branch " + std::to_string(b) + " of map '" + label_ + "' is empty");
        }
        if (b > 0 && std::abs(branches_[b - 1].right - br.left) > 1e-15) {
            throw DomainError("branches of map '" + label_ + "' are not contiguous");
        }
        increasing_.push_back(br.forward(br.right) > br.forward(br.left));
    }

    min_slope_ = std::numeric_limits<double>::infinity();
    distortion_ = 0.0;
    for (std::size_t b = 0; b < branches_.size(); ++b) {
        const auto& br = branches_[b];
        for (int i = 0; i <= grid_per_branch_; ++i) {
            const double x = br.left + (br.right - br.left) * i / grid_per_branch_;
            const double d = std::abs(br.derivative(x));
            min_slope_ = std::min(min_slope_, d);
            if (d > 0.0) {
                distortion_ = std::max(distortion_, std::abs(branch_second(b, x)) / (d * d));
            }
        }
    }
    if (!(min_slope_ > 0.0)) {
        throw DomainError("map '" + label_ + "' has a critical point");
    }
}

std::vector<double> PiecewiseExpandingMap::branch_endpoints() const {
    std::vector<double> out;
    out.reserve(branches_.size() + 1);
    for (const auto& br : branches_) {
        out.push_back(br.left);
    }
    out.push_back(1.0);
    return out;
}

std::size_t PiecewiseExpandingMap::branch_of(double x) const {
    if (x >= 1.0 || x < 0.0) {
        x = x - std::floor(x);
    }
    for (std::size_t b = 0; b + 1 < branches_.size(); ++b) {
        if (x < branches_[b].right) {
            return b;
        }
    }
    return branches_.size() - 1;
}

double PiecewiseExpandingMap::eval(double x) const {
    if (x >= 1.0 || x < 0.0) {
        x = x - std::floor(x);
    }
    const double y = branch_forward(branch_of(x), x);
    if (y >= 1.0) {
        return 0.0;
    }
    return std::max(y, 0.0);
}

double PiecewiseExpandingMap::derivative(double x) const {
    return branch_derivative(branch_of(x), x);
}

double PiecewiseExpandingMap::second_derivative(double x) const {
    return branch_second(branch_of(x), x);
}

double PiecewiseExpandingMap::branch_forward(std::size_t b, double x) const {
    return branches_.at(b).forward(x);
}

double PiecewiseExpandingMap::branch_derivative(std::size_t b, double x) const {
    return branches_.at(b).derivative(x);
}

double PiecewiseExpandingMap::branch_second(std::size_t b, double x) const {
    const auto& br = branches_.at(b);
    if (br.second_derivative) {
        return br.second_derivative(x);
    }
    const double h = 1e-6 * (br.right - br.left);
    const double lo = std::max(br.left, x - h);
    const double hi = std::min(br.right, x + h);
    return (br.derivative(hi) - br.derivative(lo)) / (hi - lo);
}

double PiecewiseExpandingMap::branch_inverse(std::size_t b, double y) const {
    const auto& br = branches_.at(b);
    if (br.inverse) {
        return std::clamp(br.inverse(y), br.left, br.right);
    }
    // Safeguarded Newton on the monotone branch.
    double lo = br.left;
    double hi = br.right;
    const bool inc = increasing_[b];
    double x = lo + (hi - lo) * (inc ? y : 1.0 - y);
    for (int iter = 0; iter < 200; ++iter) {
        const double r = br.forward(x) - y;
        if (r == 0.0) {
            return x;
        }
        if ((r > 0.0) == inc) {
            hi = x;
        } else {
            lo = x;
        }
        const double d = br.derivative(x);
        double next = x - r / d;
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - x) <= 1e-16 || hi - lo <= 4e-16) {
            return next;
        }
        x = next;
    }
    throw NumericError("inverse of branch " + std::to_string(b) + " of map '" + label_ +
                       "' did not converge");
}

std::vector<PreImage> PiecewiseExpandingMap::inverse_branches(double y) const {
    std::vector<PreImage> out;
    out.reserve(branches_.size());
    for (std::size_t b = 0; b < branches_.size(); ++b) {
        const double x = branch_inverse(b, y);
        out.push_back({b, x, std::abs(branches_[b].derivative(x))});
    }
    return out;
}

double to_unit(std::uint64_t bits) {
    const double x = static_cast<double>(bits) * 0x1.0p-64;
    return x < 1.0 ? x : std::nextafter(1.0, 0.0);
}

std::uint64_t from_unit(double x, DigitSource& digits) {
    if (!(x > 0.0)) {
        return digits.bits(11);
    }
    if (x >= 1.0) {
        x = std::nextafter(1.0, 0.0);
    }
    const auto hi = static_cast<std::uint64_t>(std::ldexp(x, 64));
    return (hi & ~std::uint64_t{0x7ff}) | digits.bits(11);
}

std::uint64_t PiecewiseExpandingMap::step_bits(std::uint64_t bits, DigitSource& digits) const {
    if (integer_slope_ > 0) {
        const auto m = static_cast<std::uint64_t>(integer_slope_);
        return bits * m + digits.below(m);
    }
    return from_unit(eval(to_unit(bits)), digits);
}

double eval_map(const PiecewiseExpandingMap& map, double x) {
    return map.eval(x);
}

std::vector<PreImage> inverse_branches(const PiecewiseExpandingMap& map, double y) {
    return map.inverse_branches(y);
}

MapPtr make_affine(int m, std::string label) {
    if (m < 2) {
        throw DomainError("affine map needs integer slope >= 2, got " + std::to_string(m));
    }
    if (label.empty()) {
        label = m == 2 ? "doubling" : m == 3 ? "tripling" : "affine" + std::to_string(m);
    }
    std::vector<BranchSpec> branches;
    const double md = m;
    for (int k = 0; k < m; ++k) {
        BranchSpec br;
        br.left = k / md;
        br.right = (k + 1) / md;
        const double kd = k;
        br.forward = [md, kd](double x) { return md * x - kd; };
        br.derivative = [md](double) { return md; };
        br.second_derivative = [](double) { return 0.0; };
        br.inverse = [md, kd](double y) { return (y + kd) / md; };
        branches.push_back(std::move(br));
    }
    return std::make_shared<const PiecewiseExpandingMap>(std::move(label), std::move(branches), m);
}

MapPtr make_perturbed(double c, std::string label) {
    if (!(std::abs(c) < 1.0 / std::numbers::pi)) {
        throw DomainError("perturbed map needs |c| < 1/pi, got " + format_c(c));
    }
    if (c == 0.0) {
        return make_affine(2, label.empty() ? "perturbed(0)" : std::move(label));
    }
    if (label.empty()) {
        label = "perturbed(" + format_c(c) + ")";
    }
    std::vector<BranchSpec> branches;
    for (int k = 0; k < 2; ++k) {
        BranchSpec br;
        br.left = 0.5 * k;
        br.right = 0.5 * (k + 1);
        const double kd = k;
        br.forward = [c, kd](double x) { return 2.0 * x + c * std::sin(kTwoPi * x) - kd; };
        br.derivative = [c](double x) { return 2.0 + kTwoPi * c * std::cos(kTwoPi * x); };
        br.second_derivative = [c](double x) { return -kTwoPi * kTwoPi * c * std::sin(kTwoPi * x); };
        branches.push_back(std::move(br));
    }
    return std::make_shared<const PiecewiseExpandingMap>(std::move(label), std::move(branches));
}

MapPtr make_circle_diffeo(double c, std::string label) {
    if (!(std::abs(c) < 1.0)) {
        throw DomainError("circle map needs |c| < 1, got " + format_c(c));
    }
    if (label.empty()) {
        label = "circle(" + format_c(c) + ")";
    }
    BranchSpec br;
    br.forward = [c](double x) { return x + c * std::sin(kTwoPi * x) / kTwoPi; };
    br.derivative = [c](double x) { return 1.0 + c * std::cos(kTwoPi * x); };
    br.second_derivative = [c](double x) { return -kTwoPi * c * std::sin(kTwoPi * x); };
    return std::make_shared<const PiecewiseExpandingMap>(std::move(label), std::vector<BranchSpec>{br});
}

}  // namespace seqclt
