#pragma once

namespace seqclt {

struct CouplingConstants {
    double R = 0.0;
    double xi = 0.0;
    double p_tilde = 1.0;
    /// 1 - xi; rounds to 1 when xi is below machine epsilon, so decay
    /// bounds use log_q instead.
    double q = 1.0;
    double log_q = 0.0;
    double C_sharp = 0.0;

    /// C_# q^{n / p_tilde}.
    double decay_bound(double n) const;
};

CouplingConstants coupling_bound(double K, double Lambda, double alpha, double Kprime, int p);

}  // namespace seqclt
