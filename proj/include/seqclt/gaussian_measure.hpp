#pragma once

#include "seqclt/convex.hpp"

namespace seqclt {

double normal_cdf(double x);
double normal_pdf(double x);
double normal_quantile(double p);

/// P(chi^2_d <= x).
double chi_squared_cdf(double d, double x);

/// P(chi'^2_d(lambda) <= x) by the Poisson mixture of central chi-squared
/// CDFs, summed outward from the Poisson mode until the remaining weight
/// is below rel_tol of the partial sum.
double noncentral_chi_squared_cdf(double d, double lambda, double x, double rel_tol = 1e-10,
                                  int max_terms = 100000);

/// N_d(C): exact for half-spaces and boxes, series for off-centre balls.
double gaussian_measure(const ConvexSet& C);

}  // namespace seqclt
