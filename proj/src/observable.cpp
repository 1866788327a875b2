#include "seqclt/observable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "seqclt/errors.hpp"

namespace seqclt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

ObservableComponent::ObservableComponent(std::vector<TrigTerm> terms) : terms_(std::move(terms)) {
    for (const auto& t : terms_) {
        if (t.k < 0) {
            throw ConfigError("trigonometric term needs k >= 0");
        }
        norm_bound_ += std::abs(t.amplitude) * (1.0 + kTwoPi * t.k);
    }
}

ObservableComponent::ObservableComponent(std::function<double(double)> f, double norm_bound)
    : callable_(std::move(f)), norm_bound_(norm_bound) {}

double ObservableComponent::operator()(double x) const {
    if (callable_) {
        return callable_(x);
    }
    double v = 0.0;
    for (const auto& t : terms_) {
        const double arg = kTwoPi * t.k * x;
        v += t.amplitude * (t.kind == TrigTerm::Kind::Cos ? std::cos(arg) : std::sin(arg));
    }
    return v;
}

VectorObservable::VectorObservable(std::vector<ObservableComponent> components, double alpha,
                                   Eigen::VectorXd offset)
    : components_(std::move(components)), alpha_(alpha), offset_(std::move(offset)) {
    if (components_.empty()) {
        throw ConfigError("observable needs at least one component");
    }
    if (offset_.size() == 0) {
        offset_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(components_.size()));
    }
    if (static_cast<std::size_t>(offset_.size()) != components_.size()) {
        throw DomainError("observable offset has the wrong dimension");
    }
    L_ = 1.0;
    for (std::size_t r = 0; r < components_.size(); ++r) {
        L_ = std::max(L_, components_[r].norm_bound() + std::abs(offset_(static_cast<Eigen::Index>(r))));
    }
}

void VectorObservable::eval(double x, double* out) const {
    for (std::size_t r = 0; r < components_.size(); ++r) {
        out[r] = eval(r, x);
    }
}

Eigen::VectorXd VectorObservable::operator()(double x) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(dim()));
    eval(x, v.data());
    return v;
}

VectorObservable VectorObservable::with_offset(Eigen::VectorXd offset) const {
    return VectorObservable(components_, alpha_, std::move(offset));
}

VectorObservable VectorObservable::scaled(double s) const {
    std::vector<ObservableComponent> comps;
    for (const auto& c : components_) {
        if (c.is_trig()) {
            auto terms = c.terms();
            for (auto& t : terms) {
                t.amplitude *= s;
            }
            comps.emplace_back(std::move(terms));
        } else {
            comps.emplace_back([c, s](double x) { return s * c(x); }, std::abs(s) * c.norm_bound());
        }
    }
    return VectorObservable(std::move(comps), alpha_, offset_ * s);
}

void ObservableSequence::eval(std::size_t n, double x, double* out) const {
    const auto& off = offsets[n];
    const double s = scale.empty() ? 1.0 : scale[n];
    for (std::size_t r = 0; r < phi.dim(); ++r) {
        out[r] = s * (phi.component(r)(x) - off(static_cast<Eigen::Index>(r)));
    }
}

namespace {

Eigen::VectorXd grid_means(const VectorObservable& phi, const GridFunction& rho,
                           const std::vector<GridFunction>& sampled) {
    Eigen::VectorXd m(static_cast<Eigen::Index>(phi.dim()));
    for (std::size_t r = 0; r < phi.dim(); ++r) {
        m(static_cast<Eigen::Index>(r)) = inner(sampled[r], rho) / rho.integral();
    }
    return m;
}

std::vector<GridFunction> sample_components(const VectorObservable& phi, std::size_t G) {
    std::vector<GridFunction> out;
    for (std::size_t r = 0; r < phi.dim(); ++r) {
        const auto& c = phi.component(r);
        out.push_back(GridFunction::from([&c](double x) { return c(x); }, G));
    }
    return out;
}

}  // namespace

VectorObservable center_observable(const VectorObservable& phi, const TransferChain& chain,
                                   std::size_t n, const GridDensity& mu) {
    const GridFunction rho = chain.compose(1, n, mu.function());
    const auto sampled = sample_components(phi, rho.intervals());
    VectorObservable out = phi.with_offset(grid_means(phi, rho, sampled));
    return out;
}

ObservableSequence center_sequence(const VectorObservable& phi, const TransferChain& chain,
                                   std::size_t N, const GridDensity& mu) {
    ObservableSequence seq{phi.with_offset({}), {}, {}};
    const auto sampled = sample_components(phi, mu.intervals());
    GridFunction rho = mu.function();
    for (std::size_t n = 0; n < N; ++n) {
        if (n > 0) {
            rho = chain.at(n).apply(rho);
            rho *= 1.0 / rho.integral();
        }
        seq.offsets.push_back(grid_means(phi, rho, sampled));
    }
    return seq;
}

ObservableSequence constant_sequence(const VectorObservable& phi, std::size_t N) {
    return ObservableSequence{phi.with_offset({}), std::vector<Eigen::VectorXd>(N, phi.offset()), {}};
}

ObservableComponent parse_component(const std::string& text) {
    std::string s;
    for (char ch : text) {
        if (ch != ' ') {
            s += ch;
        }
    }
    if (s == "zero") {
        return ObservableComponent(std::vector<TrigTerm>{});
    }
    double amplitude = 1.0;
    const auto star = s.find('*');
    try {
        if (star != std::string::npos) {
            amplitude = std::stod(s.substr(0, star));
            s = s.substr(star + 1);
        }
        const auto colon = s.find(':');
        if (colon == std::string::npos) {
            throw ConfigError("observable component '" + text + "' lacks ':'");
        }
        const std::string kind = s.substr(0, colon);
        const std::string arg = s.substr(colon + 1);
        if (kind == "const") {
            return ObservableComponent({TrigTerm{TrigTerm::Kind::Cos, 0, amplitude * std::stod(arg)}});
        }
        const int k = std::stoi(arg);
        if (kind == "cos") {
            return ObservableComponent({TrigTerm{TrigTerm::Kind::Cos, k, amplitude}});
        }
        if (kind == "sin") {
            return ObservableComponent({TrigTerm{TrigTerm::Kind::Sin, k, amplitude}});
        }
    } catch (const std::logic_error&) {
        throw ConfigError("cannot parse observable component '" + text + "'");
    }
    throw ConfigError("unknown observable component '" + text + "'");
}

}  // namespace seqclt
