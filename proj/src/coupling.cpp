#include "seqclt/coupling.hpp"

#include <cmath>

#include "seqclt/errors.hpp"

namespace seqclt {

double CouplingConstants::decay_bound(double n) const {
    return C_sharp * std::exp(log_q * n / p_tilde);
}

CouplingConstants coupling_bound(double K, double Lambda, double alpha, double Kprime, int p) {
    if (!(Lambda > 1.0)) {
        throw DomainError("coupling bound needs Lambda > 1");
    }
    if (!(K >= 0.0) || !(Kprime >= 1.0) || p < 1 || !(alpha > 0.0 && alpha <= 1.0)) {
        throw DomainError("coupling bound needs K >= 0, Kprime >= 1, p >= 1, alpha in (0,1]");
    }
    CouplingConstants c;
    const double contraction = std::pow(Lambda, -alpha);
    c.R = 2.0 * K / (1.0 - contraction);
    c.xi = std::exp(-c.R) * (1.0 - contraction) / 2.0;
    c.p_tilde = (std::ceil(std::log(Kprime) / std::log(Lambda)) + 1.0) * p;
    c.q = 1.0 - c.xi;
    c.log_q = std::log1p(-c.xi);
    c.C_sharp = 4.0 * std::exp(c.R) * (1.0 + c.R) / c.q;
    return c;
}

}  // namespace seqclt
