#pragma once

#include <cstddef>
#include <vector>

namespace seqclt {

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;  // after Birge inflation
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double chi2 = 0.0;
    double birge = 1.0;
    bool weighted = false;
    std::size_t points = 0;

    bool ci_covers(double value) const { return ci_lo <= value && value <= ci_hi; }
};

/// Weighted least squares of log(dc) on log(N) with delta-method weights
/// (se/dc)^-2; unweighted when any se is nonpositive. The 95% interval is
/// 1.96 standard errors, inflated by max(1, sqrt(chi2 / (n - 2))).
RateFit fit_rate(const std::vector<double>& Ns, const std::vector<double>& dcs,
                 const std::vector<double>& ses);

}  // namespace seqclt
