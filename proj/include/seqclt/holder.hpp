#pragma once

#include "seqclt/grid.hpp"

namespace seqclt {

/// Lower estimate of |f|_alpha from node pairs at strides 1, 2, 4, ..., G.
double holder_seminorm(const GridFunction& f, double alpha);
double holder_seminorm(const GridFunction& f);

/// |log f|_alpha; throws DomainError if f has a nonpositive node value.
double log_holder_seminorm(const GridFunction& f, double alpha);

/// sup |f| + |f|_alpha.
double holder_norm(const GridFunction& f, double alpha);

}  // namespace seqclt
