#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace seqclt {

struct IidBase {
    std::vector<double> weights;
};

struct MarkovBase {
    Eigen::MatrixXd transition;
    Eigen::VectorXd initial;
};

/// Finite-state base process driving the choice of map at each step.
class BaseProcess {
public:
    using Kind = std::variant<IidBase, MarkovBase>;

    /// Throws ConfigError for negative entries or rows not summing to 1
    /// within 1e-12.
    BaseProcess(std::vector<std::string> alphabet, Kind kind);

    const std::vector<std::string>& alphabet() const { return alphabet_; }
    const Kind& kind() const { return kind_; }
    std::string kind_name() const;

    /// omega_1..omega_N from one seeded stream, so shorter draws are
    /// prefixes of longer ones.
    std::vector<std::size_t> sample_omega(std::size_t N, std::uint64_t seed) const;

    /// 1 - |second largest eigenvalue| of the transition matrix (1 for iid).
    double spectral_gap() const;
    /// Irreducible and aperiodic: some power of the transition matrix is
    /// strictly positive.
    bool primitive() const;
    Eigen::VectorXd stationary() const;

private:
    Eigen::MatrixXd transition() const;

    std::vector<std::string> alphabet_;
    Kind kind_;
};

}  // namespace seqclt
