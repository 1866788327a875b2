#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "seqclt/orbit.hpp"

namespace seqclt {

struct DeltaTriple {
    double delta1 = 0.0;
    double delta = 0.0;
    double delta2 = 1.0;
};

struct TripleResult {
    DeltaTriple triple;
    std::string branch;  // "C1" or "C2"
    bool skipped = false;  // empty outer window
    double lambda_max = 0.0;  // of Sigma_N(delta1, delta2)
    double lambda_min_sub = 0.0;  // of the sub-window named by the branch
    double required_C0 = 0.0;  // at K0 = 1 and C0' = 1; infinity if unattainable
    bool pass = true;  // at the fitted constants
};

struct GrowthReport {
    static constexpr std::array<double, 3> kK0Grid{0.0, 0.5, 1.0};

    double C0_fit = 1.0;  // at K0 = 1, C0' = 1
    double C0prime_fit = 1.0;  // smallest C0' at K0 = 1 when C0 = 1
    double K0_fit = 1.0;
    std::array<double, 3> C0_by_K0{};  // C0 needed for each K0 in the grid
    std::vector<TripleResult> triples;
    std::size_t skipped = 0;
    std::size_t failed = 0;

    bool pass() const { return failed == 0 && std::isfinite(C0_fit); }
};

/// All triples delta1 <= delta <= delta2 from the grid {0, 1/k, ..., 1}.
std::vector<DeltaTriple> dyadic_triples(std::size_t k);

/// Breakpoints needed so that every window of the triples aligns with a
/// simulated segment.
std::vector<std::size_t> triple_breakpoints(const std::vector<DeltaTriple>& triples, std::size_t N);

/// Evaluates (C1)/(C2) for every triple from segment sums of one simulation.
GrowthReport check_c1_c2(const SegmentSums& sums, std::size_t N,
                         const std::vector<DeltaTriple>& triples);

}  // namespace seqclt
