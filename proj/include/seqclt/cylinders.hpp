#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "seqclt/schedule.hpp"

namespace seqclt {

inline constexpr std::size_t kDefaultCylinderCap = std::size_t{1} << 20;

struct CylinderSet {
    double left = 0.0;
    double right = 1.0;
    std::size_t depth = 0;
    std::size_t start = 1;
    std::vector<std::size_t> word;

    double width() const { return right - left; }
};

/// Preimage of y in [0,1] under T_{start+depth-1} o ... o T_start restricted
/// to the cylinder with the given branch word.
double invert_word(const SequentialSchedule& schedule, std::size_t start,
                   const std::vector<std::size_t>& word, double y);

/// Forward image of x along the word, using the closed branches so that
/// cylinder endpoints map to 0 or 1 rather than wrapping.
double forward_word(const SequentialSchedule& schedule, std::size_t start,
                    const std::vector<std::size_t>& word, double x);

std::vector<CylinderSet> cylinder_partition(const SequentialSchedule& schedule, std::size_t j,
                                            std::size_t n, std::size_t cap = kDefaultCylinderCap);

void write_cylinders_csv(std::ostream& out, const std::vector<CylinderSet>& cylinders);

struct ExpansionFactor {
    double value = 0.0;
    std::size_t points_per_cylinder = 0;
    std::size_t cylinders = 0;
    double argmin_left = 0.0;
    double argmin_right = 1.0;
};

/// Grid infimum of |(T_k o ... o T_j)'| over all cylinders of depth k-j+1.
ExpansionFactor expansion_factor(const SequentialSchedule& schedule, std::size_t j, std::size_t k,
                                 std::size_t cap = kDefaultCylinderCap);

struct UeViolation {
    std::size_t j = 0;
    std::string check;
    double value = 0.0;
    double bound = 0.0;
    double cylinder_left = 0.0;
    double cylinder_right = 0.0;
};

struct UeReport {
    int p = 1;
    double Lambda = 0.0;
    double Kprime = 1.0;
    double a = 0.0;  // min slope over T_1..T_nmax
    double B = 0.0;  // distortion over T_1..T_nmax
    double C_star = 0.0;
    int mesh_per_branch = 0;
    bool lambda_ok = true;
    bool kprime_ok = true;
    std::vector<UeViolation> violations;

    bool ok() const { return lambda_ok && kprime_ok; }
    /// The distortion constant used as K in the coupling bound.
    double K() const { return C_star; }
};

UeReport verify_ue(const SequentialSchedule& schedule, std::size_t n_max);

/// B min{1,a}^{-p} Lambda / (1 - Lambda^{-1/p}).
double distortion_constant(double a, double B, int p, double Lambda);

}  // namespace seqclt
