#include "seqclt/base_process.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "seqclt/errors.hpp"
#include "seqclt/rng.hpp"

namespace seqclt {

namespace {

void check_distribution(const Eigen::VectorXd& p, const std::string& what) {
    if ((p.array() < 0.0).any() || !p.allFinite()) {
        throw ConfigError(what + " has negative or non-finite entries");
    }
    if (std::abs(p.sum() - 1.0) > 1e-12) {
        throw ConfigError(what + " does not sum to 1 within 1e-12");
    }
}

std::size_t draw(const Eigen::VectorXd& p, double u) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        acc += p(k);
        if (u < acc) {
            return static_cast<std::size_t>(k);
        }
    }
    for (Eigen::Index k = p.size() - 1; k >= 0; --k) {
        if (p(k) > 0.0) {
            return static_cast<std::size_t>(k);
        }
    }
    return 0;
}

}  // namespace

BaseProcess::BaseProcess(std::vector<std::string> alphabet, Kind kind)
    : alphabet_(std::move(alphabet)), kind_(std::move(kind)) {
    if (alphabet_.empty()) {
        throw ConfigError("base process alphabet is empty");
    }
    const auto n = static_cast<Eigen::Index>(alphabet_.size());
    if (const auto* iid = std::get_if<IidBase>(&kind_)) {
        if (static_cast<Eigen::Index>(iid->weights.size()) != n) {
            throw ConfigError("iid weights must match the alphabet size");
        }
        check_distribution(Eigen::Map<const Eigen::VectorXd>(iid->weights.data(), n), "iid weights");
    } else {
        const auto& mk = std::get<MarkovBase>(kind_);
        if (mk.transition.rows() != n || mk.transition.cols() != n || mk.initial.size() != n) {
            throw ConfigError("transition matrix and initial distribution must match the alphabet size");
        }
        for (Eigen::Index r = 0; r < n; ++r) {
            check_distribution(mk.transition.row(r).transpose(), "transition row " + std::to_string(r));
        }
        check_distribution(mk.initial, "initial distribution");
    }
}

std::string BaseProcess::kind_name() const {
    return std::holds_alternative<IidBase>(kind_) ? "iid" : "markov";
}

std::vector<std::size_t> BaseProcess::sample_omega(std::size_t N, std::uint64_t seed) const {
    if (N == 0) {
        throw DomainError("omega length must be positive");
    }
    Rng rng(derive_seed(seed, 0));
    std::vector<std::size_t> omega(N);
    if (const auto* iid = std::get_if<IidBase>(&kind_)) {
        const Eigen::Map<const Eigen::VectorXd> w(iid->weights.data(), static_cast<Eigen::Index>(iid->weights.size()));
        for (auto& o : omega) {
            o = draw(w, rng.uniform());
        }
        return omega;
    }
    const auto& mk = std::get<MarkovBase>(kind_);
    omega[0] = draw(mk.initial, rng.uniform());
    for (std::size_t n = 1; n < N; ++n) {
        omega[n] = draw(mk.transition.row(static_cast<Eigen::Index>(omega[n - 1])).transpose(), rng.uniform());
    }
    return omega;
}

Eigen::MatrixXd BaseProcess::transition() const {
    if (const auto* iid = std::get_if<IidBase>(&kind_)) {
        const auto n = static_cast<Eigen::Index>(iid->weights.size());
        const Eigen::Map<const Eigen::VectorXd> w(iid->weights.data(), n);
        return Eigen::VectorXd::Ones(n) * w.transpose();
    }
    return std::get<MarkovBase>(kind_).transition;
}

double BaseProcess::spectral_gap() const {
    const Eigen::MatrixXd P = transition();
    if (P.rows() == 1) {
        return 1.0;
    }
    const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(P).eigenvalues();
    std::vector<double> mags(static_cast<std::size_t>(ev.size()));
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        mags[static_cast<std::size_t>(k)] = std::abs(ev(k));
    }
    std::sort(mags.begin(), mags.end(), std::greater<>());
    return 1.0 - mags[1];
}

bool BaseProcess::primitive() const {
    const Eigen::MatrixXd P = transition();
    const Eigen::Index n = P.rows();
    // Wielandt: a primitive n x n matrix has P^k > 0 for k = (n-1)^2 + 1.
    const Eigen::Index k_max = (n - 1) * (n - 1) + 1;
    Eigen::MatrixXd pattern = (P.array() > 0.0).cast<double>().matrix();
    Eigen::MatrixXd power = pattern;
    for (Eigen::Index k = 1; k < k_max; ++k) {
        power = ((power * pattern).array() > 0.0).cast<double>().matrix();
    }
    return (power.array() > 0.0).all();
}

Eigen::VectorXd BaseProcess::stationary() const {
    const Eigen::MatrixXd P = transition();
    const Eigen::Index n = P.rows();
    Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(n, n);
    A.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    return A.colPivHouseholderQr().solve(b);
}

}  // namespace seqclt
