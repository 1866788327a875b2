#include "seqclt/rate.hpp"

#include <algorithm>
#include <cmath>

#include "seqclt/errors.hpp"

namespace seqclt {

RateFit fit_rate(const std::vector<double>& Ns, const std::vector<double>& dcs, const std::vector<double>& ses) {
    const std::size_t n = Ns.size();
    if (n < 3) {
        throw DomainError("rate fit needs at least 3 points, got " + std::to_string(n));
    }
    if (dcs.size() != n || (!ses.empty() && ses.size() != n)) {
        throw DomainError("rate fit inputs have different lengths");
    }
    RateFit fit;
    fit.points = n;
    fit.weighted = !ses.empty() && std::all_of(ses.begin(), ses.end(), [](double s) { return s > 0.0; });
    std::vector<double> x(n), y(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(Ns[i] > 0.0) || !(dcs[i] > 0.0)) {
            throw DomainError("rate fit needs positive N and dc values");
        }
        x[i] = std::log(Ns[i]);
        y[i] = std::log(dcs[i]);
        const double sigma = fit.weighted ? ses[i] / dcs[i] : 1.0;
        w[i] = 1.0 / (sigma * sigma);
    }
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
    }
    const double xbar = sx / sw;
    const double ybar = sy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
        sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
    }
    if (!(sxx > 0.0)) {
        throw DomainError("rate fit needs at least two distinct N");
    }
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        fit.chi2 += w[i] * r * r;
    }
    const double dof = static_cast<double>(n - 2);
    if (fit.weighted) {
        fit.birge = std::max(1.0, std::sqrt(fit.chi2 / dof));
        fit.slope_se = fit.birge / std::sqrt(sxx);
    } else {
        fit.slope_se = std::sqrt(fit.chi2 / dof / sxx);
    }
    fit.ci_lo = fit.slope - 1.96 * fit.slope_se;
    fit.ci_hi = fit.slope + 1.96 * fit.slope_se;
    return fit;
}

}  // namespace seqclt
