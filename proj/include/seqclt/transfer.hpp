#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <vector>

#include "seqclt/grid.hpp"
#include "seqclt/schedule.hpp"

namespace seqclt {

enum class Interpolation { Linear, LimitedCubic };

/// Grid discretisation of the transfer operator of one map. For each node y
/// and branch b the preimage x_b(y), its interpolation stencil and the
/// weight 1/|T'(x_b)| are precomputed.
class TransferOperator {
public:
    TransferOperator(MapPtr map, std::size_t intervals,
                     Interpolation interpolation = Interpolation::LimitedCubic);

    GridFunction apply(const GridFunction& f) const;
    /// Evaluates f exactly at the preimages instead of interpolating.
    GridFunction apply(const std::function<double(double)>& f, double alpha = 1.0) const;

    std::size_t intervals() const { return intervals_; }
    const PiecewiseExpandingMap& map() const { return *map_; }

private:
    struct Entry {
        std::size_t cell;   // x_b lies in [cell, cell + 1] / G
        std::size_t first;  // first node of the four-point stencil
        double weight[4];   // stencil weights (linear uses the first two)
        double inv_slope;
        double x;
    };

    MapPtr map_;
    std::size_t intervals_;
    Interpolation interpolation_;
    std::size_t branches_;
    std::vector<Entry> entries_;  // node-major
};

GridFunction apply_transfer(const PiecewiseExpandingMap& map, const GridFunction& f);

/// Transfer operators for every map a schedule can produce, built once.
class TransferChain {
public:
    TransferChain(const SequentialSchedule& schedule, std::size_t intervals,
                  Interpolation interpolation = Interpolation::LimitedCubic);

    const TransferOperator& at(std::size_t n) const;
    /// P_k ... P_j f; identity when k < j.
    GridFunction compose(std::size_t j, std::size_t k, GridFunction f) const;

    const SequentialSchedule& schedule() const { return schedule_; }
    std::size_t intervals() const { return intervals_; }

private:
    SequentialSchedule schedule_;
    std::size_t intervals_;
    std::map<const PiecewiseExpandingMap*, TransferOperator> ops_;
};

GridFunction compose_transfer(const SequentialSchedule& schedule, std::size_t j, std::size_t k,
                              const GridFunction& f);

}  // namespace seqclt
