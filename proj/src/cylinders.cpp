#include "seqclt/cylinders.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "seqclt/errors.hpp"

namespace seqclt {

double invert_word(const SequentialSchedule& schedule, std::size_t start,
                   const std::vector<std::size_t>& word, double y) {
    for (std::size_t i = word.size(); i-- > 0;) {
        y = schedule.map_at(start + i).branch_inverse(word[i], y);
    }
    return y;
}

double forward_word(const SequentialSchedule& schedule, std::size_t start,
                    const std::vector<std::size_t>& word, double x) {
    for (std::size_t i = 0; i < word.size(); ++i) {
        x = schedule.map_at(start + i).branch_forward(word[i], x);
    }
    return x;
}

std::vector<CylinderSet> cylinder_partition(const SequentialSchedule& schedule, std::size_t j,
                                            std::size_t n, std::size_t cap) {
    if (n == 0) {
        throw DomainError("cylinder depth must be >= 1");
    }
    std::vector<std::size_t> radix(n);
    double count = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        radix[i] = schedule.map_at(j + i).branch_count();
        count *= static_cast<double>(radix[i]);
        if (count > static_cast<double>(cap)) {
            throw ResourceError("cylinder partition at depth " + std::to_string(n) +
                                " exceeds the cap of " + std::to_string(cap) + " cells");
        }
    }

    std::vector<CylinderSet> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<std::size_t> word(n, 0);
    while (true) {
        const double a = invert_word(schedule, j, word, 0.0);
        const double b = invert_word(schedule, j, word, 1.0);
        out.push_back({std::min(a, b), std::max(a, b), n, j, word});
        std::size_t pos = n;
        while (pos-- > 0) {
            if (++word[pos] < radix[pos]) {
                break;
            }
            word[pos] = 0;
        }
        if (pos == static_cast<std::size_t>(-1)) {
            break;
        }
    }
    std::sort(out.begin(), out.end(),
              [](const CylinderSet& l, const CylinderSet& r) { return l.left < r.left; });
    return out;
}

void write_cylinders_csv(std::ostream& out, const std::vector<CylinderSet>& cylinders) {
    out << "left,right,depth,word\n";
    char buf[64];
    for (const auto& c : cylinders) {
        std::snprintf(buf, sizeof buf, "%.17g,", c.left);
        out << buf;
        std::snprintf(buf, sizeof buf, "%.17g,", c.right);
        out << buf << c.depth << ',';
        for (std::size_t i = 0; i < c.word.size(); ++i) {
            out << (i ? "." : "") << c.word[i];
        }
        out << '\n';
    }
}

ExpansionFactor expansion_factor(const SequentialSchedule& schedule, std::size_t j, std::size_t k,
                                 std::size_t cap) {
    if (k < j) {
        throw DomainError("expansion factor needs j <= k");
    }
    const auto cylinders = cylinder_partition(schedule, j, k - j + 1, cap);
    ExpansionFactor result;
    result.cylinders = cylinders.size();
    result.points_per_cylinder = std::clamp<std::size_t>(
        (std::size_t{1} << 16) / cylinders.size(), 32, 4096);
    result.value = std::numeric_limits<double>::infinity();
    const std::size_t pts = result.points_per_cylinder;
    for (const auto& cyl : cylinders) {
        for (std::size_t i = 0; i <= pts; ++i) {
            double x = cyl.left + cyl.width() * static_cast<double>(i) / static_cast<double>(pts);
            double d = 1.0;
            for (std::size_t s = 0; s < cyl.word.size(); ++s) {
                const auto& map = schedule.map_at(j + s);
                d *= std::abs(map.branch_derivative(cyl.word[s], x));
                x = map.branch_forward(cyl.word[s], x);
            }
            if (d < result.value) {
                result.value = d;
                result.argmin_left = cyl.left;
                result.argmin_right = cyl.right;
            }
        }
    }
    return result;
}

double distortion_constant(double a, double B, int p, double Lambda) {
    if (!(Lambda > 1.0)) {
        throw DomainError("distortion constant needs Lambda > 1");
    }
    return B * std::pow(std::min(1.0, a), -p) * Lambda / (1.0 - std::pow(Lambda, -1.0 / p));
}

UeReport verify_ue(const SequentialSchedule& schedule, std::size_t n_max) {
    UeReport report;
    report.p = schedule.p();
    report.Lambda = schedule.Lambda();
    report.Kprime = schedule.Kprime();
    report.a = std::numeric_limits<double>::infinity();
    const auto p = static_cast<std::size_t>(report.p);

    for (std::size_t n = 1; n <= n_max; ++n) {
        const auto& map = schedule.map_at(n);
        report.a = std::min(report.a, map.min_slope());
        report.B = std::max(report.B, map.distortion_bound());
        report.mesh_per_branch = map.grid_per_branch();
    }
    constexpr double rel_tol = 1e-12;
    for (std::size_t j = 1; j + p <= n_max + 1; ++j) {
        const auto ef = expansion_factor(schedule, j, j + p - 1);
        if (ef.value < report.Lambda * (1.0 - rel_tol)) {
            report.lambda_ok = false;
            report.violations.push_back(
                {j, "expansion", ef.value, report.Lambda, ef.argmin_left, ef.argmin_right});
        }
        for (std::size_t n = 1; n < p; ++n) {
            const auto partial = expansion_factor(schedule, j, j + n - 1);
            if (partial.value * report.Kprime < 1.0 - rel_tol) {
                report.kprime_ok = false;
                report.violations.push_back({j, "backward_lipschitz", partial.value,
                                             1.0 / report.Kprime, partial.argmin_left,
                                             partial.argmin_right});
            }
        }
    }
    report.C_star = distortion_constant(report.a, report.B, report.p, report.Lambda);
    return report;
}

}  // namespace seqclt
