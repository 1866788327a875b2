#include "seqclt/schedule.hpp"

#include <algorithm>

#include "seqclt/errors.hpp"

namespace seqclt {

namespace {

MapPtr resolve(const Atlas& atlas, const std::string& label) {
    const auto it = atlas.find(label);
    if (it == atlas.end() || !it->second) {
        throw ConfigError("unresolved map label '" + label + "'");
    }
    return it->second;
}

}  // namespace

SequentialSchedule::SequentialSchedule(ScheduleRule rule, Atlas atlas, int p, double Lambda,
                                       double Kprime)
    : rule_(std::move(rule)), atlas_(std::move(atlas)), p_(p), Lambda_(Lambda), Kprime_(Kprime) {
    if (p_ < 1) {
        throw ConfigError("schedule block length p must be >= 1");
    }
    if (!(Lambda_ > 1.0)) {
        throw ConfigError("schedule expansion constant Lambda must exceed 1");
    }
    if (!(Kprime_ >= 1.0)) {
        throw ConfigError("schedule constant Kprime must be >= 1");
    }
    std::visit(
        [this](const auto& r) {
            using R = std::decay_t<decltype(r)>;
            const std::vector<std::string>* labels = nullptr;
            if constexpr (std::is_same_v<R, ExplicitRule>) {
                labels = &r.labels;
            } else if constexpr (std::is_same_v<R, CyclicRule>) {
                labels = &r.pattern;
            } else {
                labels = &r.alphabet;
                for (std::size_t w : r.omega) {
                    if (w >= r.alphabet.size()) {
                        throw ConfigError("omega index " + std::to_string(w) + " outside alphabet");
                    }
                }
                omega_ = r.omega;
            }
            if (labels->empty()) {
                throw ConfigError("schedule rule has no map labels");
            }
            for (const auto& label : *labels) {
                resolved_.push_back(resolve(atlas_, label));
            }
        },
        rule_);
}

const MapPtr& SequentialSchedule::map_ptr_at(std::size_t n) const {
    if (n == 0) {
        throw DomainError("map index starts at 1");
    }
    switch (rule_.index()) {
        case 0:
            if (n > resolved_.size()) {
                throw DomainError("explicit schedule has no map at index " + std::to_string(n));
            }
            return resolved_[n - 1];
        case 1:
            return resolved_[(n - 1) % resolved_.size()];
        default:
            if (n > omega_.size()) {
                throw DomainError("omega sequence has no entry at index " + std::to_string(n));
            }
            return resolved_[omega_[n - 1]];
    }
}

const PiecewiseExpandingMap& SequentialSchedule::map_at(std::size_t n) const {
    return *map_ptr_at(n);
}

std::size_t SequentialSchedule::horizon() const {
    switch (rule_.index()) {
        case 0:
            return resolved_.size();
        case 1:
            return 0;
        default:
            return omega_.size();
    }
}

std::vector<MapPtr> SequentialSchedule::distinct_maps(std::size_t n) const {
    std::vector<MapPtr> out;
    for (std::size_t i = 1; i <= n; ++i) {
        const MapPtr& m = map_ptr_at(i);
        bool seen = false;
        for (const auto& o : out) {
            seen = seen || o.get() == m.get();
        }
        if (!seen) {
            out.push_back(m);
        }
        if (rule_.index() == 1 && i >= resolved_.size()) {
            break;
        }
    }
    return out;
}

std::vector<MapPtr> SequentialSchedule::rule_maps() const {
    std::vector<MapPtr> out;
    for (const auto& m : resolved_) {
        if (std::none_of(out.begin(), out.end(), [&](const MapPtr& o) { return o.get() == m.get(); })) {
            out.push_back(m);
        }
    }
    return out;
}

double compose_eval(const SequentialSchedule& schedule, std::size_t j, std::size_t k, double x) {
    for (std::size_t n = j; n <= k; ++n) {
        x = schedule.map_at(n).eval(x);
    }
    return x;
}

double compose_derivative(const SequentialSchedule& schedule, std::size_t j, std::size_t k, double x) {
    double d = 1.0;
    for (std::size_t n = j; n <= k; ++n) {
        const auto& map = schedule.map_at(n);
        d *= map.derivative(x);
        x = map.eval(x);
    }
    return d;
}

SequentialSchedule single_map_schedule(const MapPtr& map) {
    return SequentialSchedule(CyclicRule{{map->label()}}, Atlas{{map->label(), map}}, 1,
                              map->min_slope(), 1.0);
}

}  // namespace seqclt
