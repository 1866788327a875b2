#include "seqclt/stein.hpp"

#include <algorithm>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>

#include "seqclt/errors.hpp"
#include "seqclt/gaussian_measure.hpp"
#include "seqclt/smoothing.hpp"

namespace seqclt {

namespace {

constexpr double kLineRange = 9.0;
constexpr double kPanelWidth = 0.5;
constexpr std::size_t kPanelOrder = 12;

/// int f(z) dz over [lo, hi] with the given interior breakpoints, using
/// Gauss-Legendre panels no wider than kPanelWidth.
double panel_integral(const std::function<double(double)>& f, std::vector<double> breaks, double lo,
                      double hi) {
    breaks.erase(std::remove_if(breaks.begin(), breaks.end(),
                                [&](double b) { return !(b > lo && b < hi) || !std::isfinite(b); }),
                 breaks.end());
    breaks.push_back(lo);
    breaks.push_back(hi);
    std::sort(breaks.begin(), breaks.end());
    const QuadratureRule gl = gauss_legendre(kPanelOrder);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double a = breaks[k];
        const double b = breaks[k + 1];
        if (!(b > a)) {
            continue;
        }
        const auto panels = static_cast<std::size_t>(std::ceil((b - a) / kPanelWidth));
        const double width = (b - a) / static_cast<double>(panels);
        for (std::size_t p = 0; p < panels; ++p) {
            const double mid = a + width * (static_cast<double>(p) + 0.5);
            double part = 0.0;
            for (std::size_t i = 0; i < kPanelOrder; ++i) {
                part += gl.weights[i] * f(mid + 0.5 * width * gl.nodes[i]);
            }
            total += 0.5 * width * part;
        }
    }
    return total;
}

/// E[f(Z)] for scalar Z ~ N(0,1).
double line_expectation(const std::function<double(double)>& f, std::vector<double> breaks) {
    return panel_integral([&](double z) { return f(z) * normal_pdf(z); }, std::move(breaks), -kLineRange,
                          kLineRange);
}

/// e^{-x} I_0(x).
double scaled_bessel_i0(double x) {
    if (x < 700.0) {
        return boost::math::cyl_bessel_i(0, x) * std::exp(-x);
    }
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= 8; ++k) {
        term *= (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
        sum += term;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

/// Density of |v + Z| for Z ~ N_d, |v| = lambda, d in {1, 2, 3}.
double noncentral_chi_pdf(std::size_t d, double lambda, double u) {
    if (u < 0.0) {
        return 0.0;
    }
    switch (d) {
        case 1:
            return normal_pdf(u - lambda) + normal_pdf(u + lambda);
        case 2: {
            const double diff = u - lambda;
            return u * std::exp(-0.5 * diff * diff) * scaled_bessel_i0(lambda * u);
        }
        default: {
            if (lambda == 0.0) {
                return 2.0 * u * u * normal_pdf(u);
            }
            const double x = lambda * u;
            if (x > 20.0) {
                return (u / lambda) * (normal_pdf(u - lambda) - normal_pdf(u + lambda));
            }
            const double sinh_ratio = x < 1e-4 ? u * (1.0 + x * x / 6.0) : std::sinh(x) / lambda;
            return 2.0 * u * normal_pdf(u) * std::exp(-0.5 * lambda * lambda) * sinh_ratio;
        }
    }
}

double psi_of_excess(double excess, double eps) {
    return smoothing_psi(std::max(excess, 0.0) / eps);
}

double half_space_expectation(const HalfSpace& hs, double eps, const Eigen::VectorXd& mean, double scale) {
    const double mu0 = hs.a.dot(mean) - hs.b;
    auto f = [&](double z) { return psi_of_excess(mu0 + scale * z, eps); };
    std::vector<double> breaks;
    for (double t : {0.0, 0.5 * eps, eps}) {
        breaks.push_back((t - mu0) / scale);
    }
    return line_expectation(f, breaks);
}

double ball_expectation(const Ball& ball, double eps, const Eigen::VectorXd& mean, double scale) {
    const std::size_t d = static_cast<std::size_t>(ball.c.size());
    const double lambda = (mean - ball.c).norm() / scale;
    auto f = [&](double u) {
        return psi_of_excess(scale * u - ball.r, eps) * noncentral_chi_pdf(d, lambda, u);
    };
    std::vector<double> breaks;
    for (double t : {0.0, 0.5 * eps, eps}) {
        breaks.push_back((ball.r + t) / scale);
    }
    const double lo = std::max(0.0, lambda - 10.0);
    const double hi = std::max(lambda, std::sqrt(static_cast<double>(d))) + 10.0;
    return panel_integral(f, breaks, lo, hi);
}

double axis_excess(double x, double lo, double hi) {
    return std::max({lo - x, 0.0, x - hi});
}

double box_expectation(const AxisBox& box, double eps, const Eigen::VectorXd& mean, double scale) {
    auto edge_breaks = [&](Eigen::Index i, const std::vector<double>& offsets) {
        std::vector<double> out;
        for (double t : offsets) {
            out.push_back((box.lo(i) - t - mean(i)) / scale);
            out.push_back((box.hi(i) + t - mean(i)) / scale);
        }
        return out;
    };
    if (box.lo.size() == 1) {
        auto f = [&](double z) { return psi_of_excess(axis_excess(mean(0) + scale * z, box.lo(0), box.hi(0)), eps); };
        return line_expectation(f, edge_breaks(0, {0.0, 0.5 * eps, eps}));
    }
    // d = 2: outer over axis 0, inner over axis 1 with breakpoints where the
    // Euclidean excess crosses eps/2 and eps.
    auto inner = [&](double e0) {
        if (e0 >= eps) {
            return 0.0;
        }
        std::vector<double> offsets{0.0};
        for (double t : {0.5 * eps, eps}) {
            if (t > e0) {
                offsets.push_back(std::sqrt(t * t - e0 * e0));
            }
        }
        auto f = [&](double z) {
            const double e1 = axis_excess(mean(1) + scale * z, box.lo(1), box.hi(1));
            return smoothing_psi(std::sqrt(e0 * e0 + e1 * e1) / eps);
        };
        return line_expectation(f, edge_breaks(1, offsets));
    };
    auto outer = [&](double z) { return inner(axis_excess(mean(0) + scale * z, box.lo(0), box.hi(0))); };
    return line_expectation(outer, edge_breaks(0, {0.0, 0.5 * eps, eps}));
}

/// E[f(U) He_2(U)] and E[f(U) He_3(U)] for scalar U ~ N(0,1).
std::pair<double, double> line_hermite(const std::function<double(double)>& f, const std::vector<double>& breaks) {
    const double e2 = line_expectation([&](double u) { return f(u) * (u * u - 1.0); }, breaks);
    const double e3 = line_expectation([&](double u) { return f(u) * u * (u * u - 3.0); }, breaks);
    return {e2, e3};
}

}  // namespace

GaussianRule tensor_gauss_hermite(std::size_t d, std::size_t order) {
    const QuadratureRule gh = gauss_hermite(order);
    std::size_t count = 1;
    for (std::size_t k = 0; k < d; ++k) {
        count *= order;
    }
    GaussianRule rule;
    rule.points.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(d));
    rule.weights.resize(static_cast<Eigen::Index>(count));
    rule.scheme = "gauss-hermite-" + std::to_string(order);
    for (std::size_t idx = 0; idx < count; ++idx) {
        std::size_t rem = idx;
        double w = 1.0;
        for (std::size_t k = 0; k < d; ++k) {
            const std::size_t j = rem % order;
            rem /= order;
            rule.points(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(k)) = gh.nodes[j];
            w *= gh.weights[j];
        }
        rule.weights(static_cast<Eigen::Index>(idx)) = w;
    }
    return rule;
}

GaussianRule quasi_random_gaussian(std::size_t d, std::size_t count) {
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    if (d > std::size(primes)) {
        throw DomainError("quasi-random rule supports at most 16 dimensions");
    }
    GaussianRule rule;
    rule.points.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(d));
    rule.weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(count), 1.0 / static_cast<double>(count));
    rule.scheme = "halton-" + std::to_string(count);
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            const int base = primes[k];
            double f = 1.0;
            double r = 0.0;
            for (std::size_t n = i + 1; n > 0; n /= static_cast<std::size_t>(base)) {
                f /= base;
                r += f * static_cast<double>(n % static_cast<std::size_t>(base));
            }
            rule.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = normal_quantile(r);
        }
    }
    return rule;
}

GaussianRule default_gaussian_rule(std::size_t d) {
    return d <= 3 ? tensor_gauss_hermite(d, 24) : quasi_random_gaussian(d, std::size_t{1} << 14);
}

SteinQuadrature SteinQuadrature::defaults(std::size_t d, std::size_t tau_per_half) {
    SteinQuadrature q;
    q.tau = tau_rule(tau_per_half);
    q.gauss = default_gaussian_rule(d);
    q.gauss_coarse = d <= 3 ? tensor_gauss_hermite(d, 12) : quasi_random_gaussian(d, std::size_t{1} << 12);
    return q;
}

double TestFunction::gaussian_expectation(const Eigen::VectorXd& mean, double scale,
                                          const GaussianRule& rule) const {
    if (rule.dim() != dim()) {
        throw DomainError("Gaussian rule dimension does not match the test function");
    }
    double sum = 0.0;
    Eigen::VectorXd x(mean.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
        x = mean + scale * rule.points.row(static_cast<Eigen::Index>(i)).transpose();
        sum += rule.weights(static_cast<Eigen::Index>(i)) * (*this)(x);
    }
    return sum;
}

CallableTestFunction::CallableTestFunction(std::size_t d, std::function<double(const Eigen::VectorXd&)> h)
    : d_(d), h_(std::move(h)) {}

LinearTestFunction::LinearTestFunction(Eigen::VectorXd a, double b) : a_(std::move(a)), b_(b) {}

double LinearTestFunction::gaussian_expectation(const Eigen::VectorXd& mean, double,
                                                const GaussianRule&) const {
    return a_.dot(mean) + b_;
}

SmoothedIndicatorFunction::SmoothedIndicatorFunction(ConvexSet set, double eps)
    : set_(std::move(set)), eps_(eps) {
    if (!(eps_ > 0.0)) {
        throw DomainError("smoothing width must be positive");
    }
}

double SmoothedIndicatorFunction::operator()(const Eigen::VectorXd& x) const {
    return smoothed_indicator(set_, eps_, x);
}

bool SmoothedIndicatorFunction::exact_expectation() const {
    const auto& shape = set_.shape();
    if (std::holds_alternative<HalfSpace>(shape)) {
        return true;
    }
    if (std::holds_alternative<Ball>(shape)) {
        return set_.dim() <= 3;
    }
    return set_.dim() <= 2;
}

bool TestFunction::hermite_moments(const Eigen::VectorXd&, double, Eigen::MatrixXd&, std::vector<double>&) const {
    return false;
}

bool SmoothedIndicatorFunction::hermite_moments(const Eigen::VectorXd& mean, double scale, Eigen::MatrixXd& m2,
                                                std::vector<double>& m3) const {
    if (scale == 0.0) {
        return false;
    }
    const std::size_t d = dim();
    const auto& shape = set_.shape();
    Eigen::VectorXd a;
    std::function<double(double)> f;
    std::vector<double> breaks;
    const double eps = eps_;
    const std::vector<double> offsets{0.0, 0.5 * eps, eps};
    if (const auto* hs = std::get_if<HalfSpace>(&shape)) {
        a = hs->a;
        const double mu0 = hs->a.dot(mean) - hs->b;
        f = [=](double u) { return psi_of_excess(mu0 + scale * u, eps); };
        for (double t : offsets) {
            breaks.push_back((t - mu0) / scale);
        }
    } else if (d == 1) {
        a = Eigen::VectorXd::Ones(1);
        double lo = 0.0;
        double hi = 0.0;
        if (const auto* b = std::get_if<Ball>(&shape)) {
            lo = b->c(0) - b->r;
            hi = b->c(0) + b->r;
        } else {
            const auto& box = std::get<AxisBox>(shape);
            lo = box.lo(0);
            hi = box.hi(0);
        }
        const double m0 = mean(0);
        f = [=](double u) { return psi_of_excess(axis_excess(m0 + scale * u, lo, hi), eps); };
        for (double t : offsets) {
            breaks.push_back((lo - t - m0) / scale);
            breaks.push_back((hi + t - m0) / scale);
        }
    } else {
        return false;
    }
    // E[He_rs(Z) | a.Z = u] = a_r a_s He_2(u), and likewise for He_rst.
    const auto [e2, e3] = line_hermite(f, breaks);
    const auto D = static_cast<Eigen::Index>(d);
    m2 = e2 * a * a.transpose();
    m3.assign(d * d * d, 0.0);
    for (Eigen::Index r = 0; r < D; ++r) {
        for (Eigen::Index q = 0; q < D; ++q) {
            for (Eigen::Index t = 0; t < D; ++t) {
                m3[static_cast<std::size_t>((r * D + q) * D + t)] = e3 * a(r) * a(q) * a(t);
            }
        }
    }
    return true;
}

double SmoothedIndicatorFunction::gaussian_expectation(const Eigen::VectorXd& mean, double scale,
                                                       const GaussianRule& rule) const {
    if (!exact_expectation() || !(scale > 0.0)) {
        if (!(scale > 0.0)) {
            return (*this)(mean);
        }
        return TestFunction::gaussian_expectation(mean, scale, rule);
    }
    const auto& shape = set_.shape();
    if (const auto* hs = std::get_if<HalfSpace>(&shape)) {
        return half_space_expectation(*hs, eps_, mean, scale);
    }
    if (const auto* b = std::get_if<Ball>(&shape)) {
        return ball_expectation(*b, eps_, mean, scale);
    }
    return box_expectation(std::get<AxisBox>(shape), eps_, mean, scale);
}

double gaussian_mean(const TestFunction& h, const SteinQuadrature& quad) {
    return h.gaussian_expectation(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(h.dim())), 1.0, quad.gauss);
}

namespace {

SteinValue g_with_mean(const TestFunction& h, const Eigen::VectorXd& w, double tau,
                       const SteinQuadrature& quad, double mean_h, double mean_h_coarse) {
    if (!(tau > 0.0 && tau < 1.0)) {
        throw DomainError("tau must lie in (0,1)");
    }
    const double factor = -1.0 / (2.0 * (1.0 - tau));
    const Eigen::VectorXd m = std::sqrt(1.0 - tau) * w;
    const double s = std::sqrt(tau);
    const double e = h.gaussian_expectation(m, s, quad.gauss);
    SteinValue out{factor * (e - mean_h), 0.0};
    if (h.exact_expectation()) {
        out.error = 1e-14 * std::abs(factor);
    } else {
        const double ec = h.gaussian_expectation(m, s, quad.gauss_coarse);
        out.error = std::abs(factor * (ec - mean_h_coarse) - out.value);
    }
    return out;
}

}  // namespace

SteinValue stein_g(const TestFunction& h, const Eigen::VectorXd& w, double tau, const SteinQuadrature& quad) {
    const double mean_h = gaussian_mean(h, quad);
    const double mean_hc = h.exact_expectation()
                               ? mean_h
                               : h.gaussian_expectation(Eigen::VectorXd::Zero(w.size()), 1.0, quad.gauss_coarse);
    return g_with_mean(h, w, tau, quad, mean_h, mean_hc);
}

SteinValue stein_solution(const TestFunction& h, const Eigen::VectorXd& w, const SteinQuadrature& quad) {
    const double mean_h = gaussian_mean(h, quad);
    const double mean_hc = h.exact_expectation()
                               ? mean_h
                               : h.gaussian_expectation(Eigen::VectorXd::Zero(w.size()), 1.0, quad.gauss_coarse);
    SteinValue out;
    for (std::size_t j = 0; j < quad.tau.size(); ++j) {
        const auto g = g_with_mean(h, w, quad.tau.nodes[j], quad, mean_h, mean_hc);
        out.value += quad.tau.weights[j] * g.value;
        out.error += quad.tau.weights[j] * g.error;
    }
    return out;
}

double hermite3(const Eigen::VectorXd& z, std::size_t r, std::size_t s, std::size_t t) {
    const auto R = static_cast<Eigen::Index>(r);
    const auto S = static_cast<Eigen::Index>(s);
    const auto T = static_cast<Eigen::Index>(t);
    return z(R) * z(S) * z(T) - z(R) * (s == t) - z(S) * (r == t) - z(T) * (r == s);
}

SteinDerivatives stein_g_derivs(const TestFunction& h, const Eigen::VectorXd& w, double tau,
                                const SteinQuadrature& quad) {
    if (!(tau > 0.0 && tau < 1.0)) {
        throw DomainError("tau must lie in (0,1)");
    }
    const std::size_t d = h.dim();
    const auto D = static_cast<Eigen::Index>(d);
    SteinDerivatives out;
    out.d = d;
    out.g_rs = Eigen::MatrixXd::Zero(D, D);
    out.g_rst.assign(d * d * d, 0.0);
    const Eigen::VectorXd m = std::sqrt(1.0 - tau) * w;
    const double s = std::sqrt(tau);
    const double c3 = -std::sqrt(1.0 - tau) / (2.0 * tau * s);
    std::vector<double> m3;
    if (h.hermite_moments(m, -s, out.g_rs, m3)) {
        out.g_rs *= -1.0 / (2.0 * tau);
        for (std::size_t k = 0; k < m3.size(); ++k) {
            out.g_rst[k] = -c3 * m3[k];
        }
        return out;
    }
    Eigen::VectorXd x(D);
    for (std::size_t i = 0; i < quad.gauss.size(); ++i) {
        const Eigen::VectorXd z = quad.gauss.points.row(static_cast<Eigen::Index>(i)).transpose();
        x = m - s * z;
        const double hw = quad.gauss.weights(static_cast<Eigen::Index>(i)) * h(x);
        if (hw == 0.0) {
            continue;
        }
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t q = 0; q < d; ++q) {
                const auto Rr = static_cast<Eigen::Index>(r);
                const auto Qq = static_cast<Eigen::Index>(q);
                out.g_rs(Rr, Qq) += hw * (z(Rr) * z(Qq) - (r == q ? 1.0 : 0.0));
                for (std::size_t t = 0; t < d; ++t) {
                    out.g_rst[(r * d + q) * d + t] -= hw * hermite3(z, r, q, t);
                }
            }
        }
    }
    out.g_rs *= -1.0 / (2.0 * tau);
    for (double& v : out.g_rst) {
        v *= c3;
    }
    return out;
}

ResidualReport stein_residual(const TestFunction& h, const Eigen::VectorXd& w, const SteinQuadrature& quad,
                              double fd_step) {
    const std::size_t d = h.dim();
    const double step = fd_step * std::max(1.0, w.norm());
    ResidualReport rep;
    rep.rhs = h(w) - gaussian_mean(h, quad);

    auto lhs_at = [&](double hstep, double& quad_err) {
        const auto f0 = stein_solution(h, w, quad);
        quad_err = f0.error;
        double lap = 0.0;
        double drift = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            Eigen::VectorXd wp = w;
            Eigen::VectorXd wm = w;
            wp(static_cast<Eigen::Index>(k)) += hstep;
            wm(static_cast<Eigen::Index>(k)) -= hstep;
            const auto fp = stein_solution(h, wp, quad);
            const auto fm = stein_solution(h, wm, quad);
            quad_err = std::max({quad_err, fp.error, fm.error});
            lap += (fp.value - 2.0 * f0.value + fm.value) / (hstep * hstep);
            drift += w(static_cast<Eigen::Index>(k)) * (fp.value - fm.value) / (2.0 * hstep);
        }
        return lap - drift;
    };
    double qerr = 0.0;
    double qerr2 = 0.0;
    rep.lhs = lhs_at(step, qerr);
    const double lhs2 = lhs_at(2.0 * step, qerr2);
    rep.residual = std::abs(rep.lhs - rep.rhs);
    // Central differences are second order, so the step-h error is about a
    // third of the change from 2h to h.
    rep.fd_error = std::abs(lhs2 - rep.lhs) / 3.0;
    rep.quad_error = 4.0 * static_cast<double>(d) * qerr / (step * step);
    rep.budget = rep.fd_error + rep.quad_error;
    rep.flagged = rep.residual > std::max(rep.budget, 1e-3);
    return rep;
}

std::vector<double> gauss_third_deriv_functional(const TestFunction& h, double tau, const SteinQuadrature& quad) {
    if (!(tau > 0.0 && tau < 1.0)) {
        throw DomainError("tau must lie in (0,1)");
    }
    const std::size_t d = h.dim();
    const double c = 0.5 * std::sqrt(1.0 - tau);
    std::vector<double> out(d * d * d, 0.0);
    Eigen::MatrixXd m2;
    std::vector<double> m3;
    if (h.hermite_moments(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d)), 1.0, m2, m3)) {
        for (std::size_t k = 0; k < m3.size(); ++k) {
            out[k] = -c * m3[k];
        }
        return out;
    }
    for (std::size_t i = 0; i < quad.gauss.size(); ++i) {
        const Eigen::VectorXd z = quad.gauss.points.row(static_cast<Eigen::Index>(i)).transpose();
        const double hw = quad.gauss.weights(static_cast<Eigen::Index>(i)) * h(z);
        if (hw == 0.0) {
            continue;
        }
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t s = 0; s < d; ++s) {
                for (std::size_t t = 0; t < d; ++t) {
                    out[(r * d + s) * d + t] -= hw * hermite3(z, r, s, t);
                }
            }
        }
    }
    for (double& v : out) {
        v *= c;
    }
    return out;
}

double third_deriv_abs_integral(std::size_t d) {
    // int |phi_rst| factorises over distinct indices into E|He_k(Z)| terms.
    auto abs_moment = [](int k) {
        std::vector<double> roots;
        std::function<double(double)> he;
        if (k == 1) {
            he = [](double z) { return z; };
            roots = {0.0};
        } else if (k == 2) {
            he = [](double z) { return z * z - 1.0; };
            roots = {-1.0, 1.0};
        } else {
            he = [](double z) { return z * z * z - 3.0 * z; };
            roots = {-std::sqrt(3.0), 0.0, std::sqrt(3.0)};
        }
        return line_expectation([&](double z) { return std::abs(he(z)); }, roots);
    };
    const double m1 = abs_moment(1);
    const double m2 = abs_moment(2);
    const double m3 = abs_moment(3);
    double best = m3;
    if (d >= 2) {
        best = std::max(best, m2 * m1);
    }
    if (d >= 3) {
        best = std::max(best, m1 * m1 * m1);
    }
    return best;
}

}  // namespace seqclt
