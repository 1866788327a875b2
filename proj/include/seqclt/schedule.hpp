#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "seqclt/maps.hpp"

namespace seqclt {

using Atlas = std::map<std::string, MapPtr>;

struct ExplicitRule {
    std::vector<std::string> labels;  // T_1, T_2, ...
};

struct CyclicRule {
    std::vector<std::string> pattern;  // T_n = pattern[(n - 1) mod size]
};

struct OmegaRule {
    std::vector<std::string> alphabet;
    std::vector<std::size_t> omega;  // T_n = alphabet[omega[n - 1]]
};

using ScheduleRule = std::variant<ExplicitRule, CyclicRule, OmegaRule>;

class SequentialSchedule {
public:
    SequentialSchedule(ScheduleRule rule, Atlas atlas, int p = 1, double Lambda = 2.0,
                       double Kprime = 1.0);

    /// T_n for n >= 1.
    const PiecewiseExpandingMap& map_at(std::size_t n) const;
    const MapPtr& map_ptr_at(std::size_t n) const;
    /// Largest n for which map_at is defined, or 0 when the rule is unbounded.
    std::size_t horizon() const;

    const ScheduleRule& rule() const { return rule_; }
    const Atlas& atlas() const { return atlas_; }
    int p() const { return p_; }
    double Lambda() const { return Lambda_; }
    double Kprime() const { return Kprime_; }

    /// Every map the rule can produce, each once.
    std::vector<MapPtr> rule_maps() const;

    /// Maps occurring among T_1..T_n, each once, in first-use order.
    std::vector<MapPtr> distinct_maps(std::size_t n) const;

private:
    const std::string& label_at(std::size_t n) const;

    ScheduleRule rule_;
    Atlas atlas_;
    int p_;
    double Lambda_;
    double Kprime_;
    std::vector<MapPtr> resolved_;  // parallel to the rule's label list
    std::vector<std::size_t> omega_;
};

/// T_k o ... o T_j applied to x; identity when k < j.
double compose_eval(const SequentialSchedule& schedule, std::size_t j, std::size_t k, double x);

/// Chain-rule derivative of T_k o ... o T_j at x.
double compose_derivative(const SequentialSchedule& schedule, std::size_t j, std::size_t k, double x);

SequentialSchedule single_map_schedule(const MapPtr& map);

}  // namespace seqclt
