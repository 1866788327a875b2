#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "seqclt/grid.hpp"
#include "seqclt/transfer.hpp"

namespace seqclt {

using ScalarFn = std::function<double(double)>;

/// f evaluated along the orbit at time t, i.e. f o T_t o ... o T_1.
struct TimedFunction {
    std::size_t time = 0;
    ScalarFn f;
};

/// mu(f o T_t) = lambda(f P_{1,t} rho).
double orbit_mean(const TransferChain& chain, const GridDensity& mu, const ScalarFn& f, std::size_t t);

/// mu(prod_i f_i o T_{t_i}) through interleaved transfer and multiplication.
/// Times must be nondecreasing.
double chain_expectation_transfer(const TransferChain& chain, const GridDensity& mu,
                                  const std::vector<TimedFunction>& terms);

/// Same expectation by composite Gauss-Legendre on every cylinder of depth
/// max t_i, where the integrand is smooth. Refuses depths above max_steps.
double chain_expectation_orbit(const SequentialSchedule& schedule, const GridDensity& mu,
                               const std::vector<TimedFunction>& terms, std::size_t max_steps = 16);

struct CorrelationResult {
    double transfer = 0.0;
    double orbit = 0.0;
    bool orbit_available = false;

    double difference() const { return orbit_available ? transfer - orbit : 0.0; }
};

/// mu(psi1bar^n psi2bar^{n+m}) with psibar^t = psi o T_t - mu(psi o T_t).
CorrelationResult correlation2(const TransferChain& chain, const ScalarFn& psi1,
                               const ScalarFn& psi2, std::size_t n, std::size_t m,
                               const GridDensity& mu, std::size_t max_orbit_steps = 16);

/// mu(psi1bar^n psi2bar^{n+m} psi3bar^{n+m+k}).
CorrelationResult correlation3(const TransferChain& chain, const ScalarFn& psi1,
                               const ScalarFn& psi2, const ScalarFn& psi3, std::size_t n,
                               std::size_t m, std::size_t k, const GridDensity& mu,
                               std::size_t max_orbit_steps = 16);

}  // namespace seqclt
