#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "seqclt/grid.hpp"
#include "seqclt/transfer.hpp"

namespace seqclt {

/// amplitude * cos(2 pi k x) or amplitude * sin(2 pi k x); k = 0 with cos
/// is a constant.
struct TrigTerm {
    enum class Kind { Cos, Sin } kind = Kind::Cos;
    int k = 1;
    double amplitude = 1.0;
};

/// One scalar component: either a trigonometric polynomial (fast path) or
/// an arbitrary callable.
class ObservableComponent {
public:
    ObservableComponent() = default;
    explicit ObservableComponent(std::vector<TrigTerm> terms);
    explicit ObservableComponent(std::function<double(double)> f, double norm_bound);

    double operator()(double x) const;
    /// Upper bound on sup|f| + Lip(f), which dominates the alpha-norm.
    double norm_bound() const { return norm_bound_; }
    bool is_trig() const { return !callable_; }
    const std::vector<TrigTerm>& terms() const { return terms_; }

private:
    std::vector<TrigTerm> terms_;
    std::function<double(double)> callable_;
    double norm_bound_ = 0.0;
};

class VectorObservable {
public:
    VectorObservable() = default;
    VectorObservable(std::vector<ObservableComponent> components, double alpha = 1.0,
                     Eigen::VectorXd offset = {});

    std::size_t dim() const { return components_.size(); }
    double alpha() const { return alpha_; }
    /// Certified bound on the alpha-norm of every component, at least 1.
    double L() const { return L_; }
    const Eigen::VectorXd& offset() const { return offset_; }
    const ObservableComponent& component(std::size_t r) const { return components_[r]; }

    /// Component r minus its offset.
    double eval(std::size_t r, double x) const { return components_[r](x) - offset_(static_cast<Eigen::Index>(r)); }
    void eval(double x, double* out) const;
    Eigen::VectorXd operator()(double x) const;

    VectorObservable with_offset(Eigen::VectorXd offset) const;
    VectorObservable scaled(double s) const;

private:
    std::vector<ObservableComponent> components_;
    double alpha_ = 1.0;
    double L_ = 1.0;
    Eigen::VectorXd offset_;
};

/// phi_n = scale_n (phi - offset_n) for n = 0..N-1.
struct ObservableSequence {
    VectorObservable phi;
    std::vector<Eigen::VectorXd> offsets;
    std::vector<double> scale;

    std::size_t length() const { return offsets.size(); }
    void eval(std::size_t n, double x, double* out) const;
};

/// phi - mu(phi o T_n), with the mean computed as lambda(phi P_{1,n} rho).
/// The returned norm bound doubles.
VectorObservable center_observable(const VectorObservable& phi, const TransferChain& chain,
                                   std::size_t n, const GridDensity& mu);

/// Centres phi at every n = 0..N-1 with one pass of pushed densities.
ObservableSequence center_sequence(const VectorObservable& phi, const TransferChain& chain,
                                   std::size_t N, const GridDensity& mu);

/// phi_n = phi for every n, no centring.
ObservableSequence constant_sequence(const VectorObservable& phi, std::size_t N);

/// Parses "cos(2 pi k x)"-style shorthand: "cos:k", "sin:k", "const:c", "zero",
/// optionally prefixed by an amplitude as in "0.3*cos:2".
ObservableComponent parse_component(const std::string& text);

}  // namespace seqclt
