#include "seqclt/correlation.hpp"

#include <algorithm>

#include "seqclt/cylinders.hpp"
#include "seqclt/errors.hpp"
#include "seqclt/quadrature.hpp"

namespace seqclt {

namespace {

void check_sorted(const std::vector<TimedFunction>& terms) {
    for (std::size_t i = 1; i < terms.size(); ++i) {
        if (terms[i].time < terms[i - 1].time) {
            throw DomainError("chain expectation needs nondecreasing times");
        }
    }
}

std::vector<TimedFunction> centered_terms(const std::vector<TimedFunction>& terms,
                                          const std::vector<double>& means) {
    std::vector<TimedFunction> out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const ScalarFn f = terms[i].f;
        const double c = means[i];
        out.push_back({terms[i].time, [f, c](double x) { return f(x) - c; }});
    }
    return out;
}

CorrelationResult centered_correlation(const TransferChain& chain,
                                       const std::vector<TimedFunction>& raw,
                                       const GridDensity& mu, std::size_t max_orbit_steps) {
    CorrelationResult result;
    std::vector<double> means;
    for (const auto& t : raw) {
        means.push_back(orbit_mean(chain, mu, t.f, t.time));
    }
    result.transfer = chain_expectation_transfer(chain, mu, centered_terms(raw, means));
    if (raw.back().time <= max_orbit_steps) {
        std::vector<double> orbit_means;
        for (const auto& t : raw) {
            orbit_means.push_back(
                chain_expectation_orbit(chain.schedule(), mu, {t}, max_orbit_steps));
        }
        result.orbit = chain_expectation_orbit(chain.schedule(), mu,
                                               centered_terms(raw, orbit_means), max_orbit_steps);
        result.orbit_available = true;
    }
    return result;
}

}  // namespace

double orbit_mean(const TransferChain& chain, const GridDensity& mu, const ScalarFn& f, std::size_t t) {
    return chain_expectation_transfer(chain, mu, {{t, f}});
}

double chain_expectation_transfer(const TransferChain& chain, const GridDensity& mu,
                                  const std::vector<TimedFunction>& terms) {
    check_sorted(terms);
    GridFunction v = mu.function();
    std::size_t now = 0;
    for (const auto& term : terms) {
        v = chain.compose(now + 1, term.time, std::move(v));
        now = term.time;
        for (std::size_t i = 0; i <= v.intervals(); ++i) {
            v[i] *= term.f(v.node(i));
        }
    }
    return v.integral();
}

double chain_expectation_orbit(const SequentialSchedule& schedule, const GridDensity& mu,
                               const std::vector<TimedFunction>& terms, std::size_t max_steps) {
    check_sorted(terms);
    const std::size_t depth = terms.empty() ? 0 : terms.back().time;
    if (depth > max_steps) {
        throw ResourceError("orbit quadrature refused at " + std::to_string(depth) +
                            " composition steps (cap " + std::to_string(max_steps) + ")");
    }
    std::vector<CylinderSet> cylinders;
    if (depth == 0) {
        cylinders.push_back({0.0, 1.0, 0, 1, {}});
    } else {
        cylinders = cylinder_partition(schedule, 1, depth);
    }
    const std::size_t panels = std::max<std::size_t>(1, 512 / cylinders.size());
    const QuadratureRule gl = gauss_legendre(12);

    double total = 0.0;
    for (const auto& cyl : cylinders) {
        double cyl_sum = 0.0;
        const double panel_width = cyl.width() / static_cast<double>(panels);
        for (std::size_t p = 0; p < panels; ++p) {
            const double a = cyl.left + panel_width * static_cast<double>(p);
            for (std::size_t q = 0; q < gl.size(); ++q) {
                const double x0 = a + 0.5 * panel_width * (gl.nodes[q] + 1.0);
                double x = x0;
                double prod = 1.0;
                std::size_t now = 0;
                for (const auto& term : terms) {
                    for (; now < term.time; ++now) {
                        x = schedule.map_at(now + 1).branch_forward(cyl.word[now], x);
                    }
                    prod *= term.f(x);
                }
                cyl_sum += gl.weights[q] * prod * mu(x0);
            }
        }
        total += 0.5 * panel_width * cyl_sum;
    }
    return total;
}

CorrelationResult correlation2(const TransferChain& chain, const ScalarFn& psi1,
                               const ScalarFn& psi2, std::size_t n, std::size_t m,
                               const GridDensity& mu, std::size_t max_orbit_steps) {
    return centered_correlation(chain, {{n, psi1}, {n + m, psi2}}, mu, max_orbit_steps);
}

CorrelationResult correlation3(const TransferChain& chain, const ScalarFn& psi1,
                               const ScalarFn& psi2, const ScalarFn& psi3, std::size_t n,
                               std::size_t m, std::size_t k, const GridDensity& mu,
                               std::size_t max_orbit_steps) {
    return centered_correlation(chain, {{n, psi1}, {n + m, psi2}, {n + m + k, psi3}}, mu,
                                max_orbit_steps);
}

}  // namespace seqclt
