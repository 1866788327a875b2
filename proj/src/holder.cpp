#include "seqclt/holder.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "seqclt/errors.hpp"

namespace seqclt {

namespace {

double stride_seminorm(const std::vector<double>& v, double alpha) {
    const std::size_t G = v.size() - 1;
    double best = 0.0;
    for (std::size_t s = 1; s <= G; s *= 2) {
        const double scale = std::pow(static_cast<double>(s) / static_cast<double>(G), -alpha);
        for (std::size_t i = 0; i + s <= G; ++i) {
            best = std::max(best, std::abs(v[i + s] - v[i]) * scale);
        }
    }
    return best;
}

}  // namespace

double holder_seminorm(const GridFunction& f, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw DomainError("Hoelder exponent must lie in (0,1]");
    }
    return stride_seminorm(f.values(), alpha);
}

double holder_seminorm(const GridFunction& f) {
    return holder_seminorm(f, f.alpha());
}

double log_holder_seminorm(const GridFunction& f, double alpha) {
    std::vector<double> logs(f.values().size());
    for (std::size_t i = 0; i < logs.size(); ++i) {
        if (!(f[i] > 0.0)) {
            throw DomainError("log-Hoelder seminorm of a function with nonpositive value at node " +
                              std::to_string(i));
        }
        logs[i] = std::log(f[i]);
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw DomainError("Hoelder exponent must lie in (0,1]");
    }
    return stride_seminorm(logs, alpha);
}

double holder_norm(const GridFunction& f, double alpha) {
    return f.sup_norm() + holder_seminorm(f, alpha);
}

}  // namespace seqclt
