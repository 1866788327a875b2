#include "seqclt/transfer.hpp"

#include <algorithm>
#include <cmath>

#include "seqclt/errors.hpp"

namespace seqclt {

TransferOperator::TransferOperator(MapPtr map, std::size_t intervals, Interpolation interpolation)
    : map_(std::move(map)),
      intervals_(intervals),
      interpolation_(interpolation),
      branches_(map_->branch_count()) {
    if (intervals_ < 4) {
        throw DomainError("transfer operator needs at least 4 grid intervals");
    }
    const double G = static_cast<double>(intervals_);
    entries_.resize((intervals_ + 1) * branches_);
    for (std::size_t i = 0; i <= intervals_; ++i) {
        const double y = static_cast<double>(i) / G;
        const auto pre = map_->inverse_branches(y);
        for (std::size_t b = 0; b < branches_; ++b) {
            Entry& e = entries_[i * branches_ + b];
            e.x = pre[b].x;
            e.inv_slope = 1.0 / pre[b].abs_derivative;
            const double s = std::clamp(e.x, 0.0, 1.0) * G;
            e.cell = std::min(static_cast<std::size_t>(s), intervals_ - 1);
            if (interpolation_ == Interpolation::Linear) {
                const double t = s - static_cast<double>(e.cell);
                e.first = e.cell;
                e.weight[0] = 1.0 - t;
                e.weight[1] = t;
                e.weight[2] = e.weight[3] = 0.0;
            } else {
                e.first = std::clamp<std::size_t>(e.cell == 0 ? 0 : e.cell - 1, 0, intervals_ - 3);
                const double u = s - static_cast<double>(e.first);
                e.weight[0] = -(u - 1) * (u - 2) * (u - 3) / 6;
                e.weight[1] = u * (u - 2) * (u - 3) / 2;
                e.weight[2] = -u * (u - 1) * (u - 3) / 2;
                e.weight[3] = u * (u - 1) * (u - 2) / 6;
            }
        }
    }
}

GridFunction TransferOperator::apply(const GridFunction& f) const {
    if (f.intervals() != intervals_) {
        throw DomainError("grid size mismatch in transfer operator");
    }
    const auto& v = f.values();
    GridFunction out(intervals_, f.alpha());
    for (std::size_t i = 0; i <= intervals_; ++i) {
        double acc = 0.0;
        for (std::size_t b = 0; b < branches_; ++b) {
            const Entry& e = entries_[i * branches_ + b];
            double val;
            if (interpolation_ == Interpolation::Linear) {
                val = e.weight[0] * v[e.first] + e.weight[1] * v[e.first + 1];
            } else {
                val = e.weight[0] * v[e.first] + e.weight[1] * v[e.first + 1] +
                      e.weight[2] * v[e.first + 2] + e.weight[3] * v[e.first + 3];
                const double a = v[e.cell];
                const double c = v[e.cell + 1];
                val = std::clamp(val, std::min(a, c), std::max(a, c));
            }
            acc += val * e.inv_slope;
        }
        out[i] = acc;
    }
    return out;
}

GridFunction TransferOperator::apply(const std::function<double(double)>& f, double alpha) const {
    GridFunction out(intervals_, alpha);
    for (std::size_t i = 0; i <= intervals_; ++i) {
        double acc = 0.0;
        for (std::size_t b = 0; b < branches_; ++b) {
            const Entry& e = entries_[i * branches_ + b];
            acc += f(e.x) * e.inv_slope;
        }
        out[i] = acc;
    }
    return out;
}

GridFunction apply_transfer(const PiecewiseExpandingMap& map, const GridFunction& f) {
    const MapPtr alias(std::shared_ptr<const PiecewiseExpandingMap>(), &map);
    return TransferOperator(alias, f.intervals()).apply(f);
}

TransferChain::TransferChain(const SequentialSchedule& schedule, std::size_t intervals,
                             Interpolation interpolation)
    : schedule_(schedule), intervals_(intervals) {
    for (const auto& m : schedule_.rule_maps()) {
        ops_.emplace(m.get(), TransferOperator(m, intervals_, interpolation));
    }
}

const TransferOperator& TransferChain::at(std::size_t n) const {
    return ops_.at(&schedule_.map_at(n));
}

GridFunction TransferChain::compose(std::size_t j, std::size_t k, GridFunction f) const {
    for (std::size_t n = j; n <= k; ++n) {
        f = at(n).apply(f);
    }
    return f;
}

GridFunction compose_transfer(const SequentialSchedule& schedule, std::size_t j, std::size_t k,
                              const GridFunction& f) {
    return TransferChain(schedule, f.intervals()).compose(j, k, f);
}

}  // namespace seqclt
