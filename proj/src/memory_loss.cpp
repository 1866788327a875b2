#include "seqclt/memory_loss.hpp"

#include <algorithm>
#include <cmath>

#include "seqclt/errors.hpp"
#include "seqclt/holder.hpp"
#include "seqclt/quadrature.hpp"

namespace seqclt {

LogLinearFit fit_log_linear(const std::vector<double>& x, const std::vector<double>& y, double floor) {
    std::vector<double> xs;
    std::vector<double> ls;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (y[i] > floor) {
            xs.push_back(x[i]);
            ls.push_back(std::log(y[i]));
        }
    }
    LogLinearFit fit;
    fit.points = xs.size();
    if (xs.size() < 2) {
        return fit;
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ls[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ls[i] - my);
        syy += (ls[i] - my) * (ls[i] - my);
    }
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

DecayCurve memory_loss_decay(const TransferChain& chain, const GridFunction& u, std::size_t n_max,
                             const MemoryLossOptions& options) {
    if (std::abs(u.integral()) > 1e-8) {
        throw DomainError("memory loss needs a mean-zero function");
    }
    DecayCurve curve;
    curve.intervals = u.intervals();
    curve.alpha = options.alpha;

    GridFunction current = u;
    GridFunction h(u.intervals(), u.alpha());
    std::fill(h.values().begin(), h.values().end(), 1.0);
    const double u_seminorm = holder_seminorm(u, options.alpha);

    std::vector<double> ns;
    std::vector<double> norms;
    for (std::size_t n = 0; n <= n_max; ++n) {
        if (n > 0) {
            const auto& op = chain.at(options.start + n - 1);
            current = op.apply(current);
            if (options.drift_correction) {
                h = op.apply(h);
                h *= 1.0 / h.integral();
                GridFunction correction = h;
                correction *= current.integral();
                current -= correction;
            }
        }
        DecayPoint pt;
        pt.n = n;
        pt.sup = current.sup_norm();
        pt.seminorm = holder_seminorm(current, options.alpha);
        pt.norm = pt.sup + pt.seminorm;
        if (options.coupling) {
            pt.bound = options.coupling->decay_bound(static_cast<double>(n)) * u_seminorm;
        }
        curve.points.push_back(pt);
        ns.push_back(static_cast<double>(n));
        norms.push_back(pt.norm);
    }
    const auto fit = fit_log_linear(ns, norms, options.fit_floor);
    curve.q_emp = fit.points >= 2 ? std::exp(fit.slope) : 0.0;
    curve.r_squared = fit.r_squared;
    curve.fit_points = fit.points;
    return curve;
}

GridDensity conditioned_density(const GridDensity& mu, const CylinderSet& a) {
    GridFunction f = mu.function();
    const double G = static_cast<double>(f.intervals());
    for (std::size_t i = 0; i <= f.intervals(); ++i) {
        const double x = static_cast<double>(i) / G;
        if (x < a.left || x > a.right) {
            f[i] = 0.0;
        }
    }
    const double mass = f.integral();
    if (!(mass > 1e-12)) {
        throw DomainError("degenerate cylinder: mu(a) = " + std::to_string(mass));
    }
    f *= 1.0 / mass;
    return GridDensity(std::move(f));
}

GridFunction transfer_conditioned(const SequentialSchedule& schedule,
                                  const std::function<double(double)>& psi, const CylinderSet& a,
                                  std::size_t intervals) {
    const auto rule = gauss_legendre(32);
    double mass = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = a.left + a.width() * 0.5 * (rule.nodes[i] + 1.0);
        mass += 0.5 * a.width() * rule.weights[i] * psi(x);
    }
    if (!(mass > 1e-12)) {
        throw DomainError("degenerate cylinder: mu(a) = " + std::to_string(mass));
    }
    GridFunction out(intervals);
    for (std::size_t i = 0; i <= intervals; ++i) {
        const double y = static_cast<double>(i) / static_cast<double>(intervals);
        const double x = invert_word(schedule, a.start, a.word, y);
        double slope = 1.0;
        double z = x;
        for (std::size_t s = 0; s < a.word.size(); ++s) {
            const auto& map = schedule.map_at(a.start + s);
            slope *= std::abs(map.branch_derivative(a.word[s], z));
            z = map.branch_forward(a.word[s], z);
        }
        out[i] = psi(x) / (mass * slope);
    }
    return out;
}

std::vector<ConditionedDecayPoint> conditioned_memory_loss(
    const TransferChain& chain, const std::function<double(double)>& psi, double A,
    const CylinderSet& a, std::size_t n_max, double K, const CouplingConstants& coupling,
    double alpha) {
    const auto& schedule = chain.schedule();
    const std::size_t G = chain.intervals();
    const std::size_t m = a.depth;
    GridFunction diff = chain.at(a.start).apply(psi, alpha);
    diff = chain.compose(a.start + 1, a.start + m - 1, diff);
    diff -= transfer_conditioned(schedule, psi, a, G);

    const double Kp = std::pow(schedule.Kprime(), alpha);
    const double c = K + A * Kp;
    std::vector<ConditionedDecayPoint> out;
    for (std::size_t n = 0; n <= n_max; ++n) {
        if (n > 0) {
            diff = chain.at(a.start + m + n - 1).apply(diff);
        }
        const double bound =
            2.0 * c * std::exp(c) * coupling.C_sharp * std::exp(coupling.log_q * static_cast<double>(n));
        out.push_back({n, holder_norm(diff, alpha), bound});
    }
    return out;
}

}  // namespace seqclt
