#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "seqclt/coupling.hpp"
#include "seqclt/cylinders.hpp"
#include "seqclt/grid.hpp"
#include "seqclt/transfer.hpp"

namespace seqclt {

struct DecayPoint {
    std::size_t n = 0;
    double sup = 0.0;
    double seminorm = 0.0;
    double norm = 0.0;
    double bound = 0.0;  // 0 when no coupling constants were supplied
};

struct LogLinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
};

struct DecayCurve {
    std::vector<DecayPoint> points;
    double q_emp = 0.0;
    double r_squared = 0.0;
    std::size_t fit_points = 0;
    std::size_t intervals = 0;
    double alpha = 1.0;
};

/// Least squares of log(y) on x over entries with y > floor.
LogLinearFit fit_log_linear(const std::vector<double>& x, const std::vector<double>& y,
                            double floor = 1e-300);

struct MemoryLossOptions {
    std::size_t start = 1;  // apply P_start, P_{start+1}, ...
    double alpha = 1.0;
    /// Removes the O(h^3) mass leak of the discrete operator by projecting
    /// along the pushed-forward Lebesgue density after every step.
    bool drift_correction = true;
    /// Points with norm below this are treated as exact zeros in the fit.
    double fit_floor = 1e-13;
    std::optional<CouplingConstants> coupling;
};

/// ||P_{start, start+n-1} u||_alpha for n = 0..n_max with a log-linear fit.
DecayCurve memory_loss_decay(const TransferChain& chain, const GridFunction& u, std::size_t n_max,
                             const MemoryLossOptions& options = {});

/// mu restricted to the cylinder nodes and rescaled to unit trapezoid mass.
GridDensity conditioned_density(const GridDensity& mu, const CylinderSet& a);

/// P_{j, j+depth-1}(psi_a) evaluated exactly per node through the cylinder
/// word, with psi_a = mu(a)^{-1} psi 1_a and mu(a) by Gauss-Legendre.
GridFunction transfer_conditioned(const SequentialSchedule& schedule,
                                  const std::function<double(double)>& psi, const CylinderSet& a,
                                  std::size_t intervals);

struct ConditionedDecayPoint {
    std::size_t n = 0;
    double norm = 0.0;
    double bound = 0.0;
};

/// ||P_{j, j+m+n-1}(psi - psi_a)||_alpha for n = 0..n_max, m = depth(a),
/// against 2(K + A K'^alpha) e^{K + A K'^alpha} C_# q^n.
std::vector<ConditionedDecayPoint> conditioned_memory_loss(
    const TransferChain& chain, const std::function<double(double)>& psi, double A,
    const CylinderSet& a, std::size_t n_max, double K, const CouplingConstants& coupling,
    double alpha = 1.0);

}  // namespace seqclt
