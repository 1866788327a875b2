#include "seqclt/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "seqclt/errors.hpp"
#include "seqclt/parallel.hpp"
#include "seqclt/quadrature.hpp"
#include "seqclt/sampling.hpp"

namespace seqclt {

PuncturedSums::PuncturedSums(Eigen::MatrixXd Y, std::size_t N, std::size_t d)
    : Y_(std::move(Y)), N_(N), d_(d) {
    if (N_ == 0 || d_ == 0 || static_cast<std::size_t>(Y_.cols()) != N_ * d_) {
        throw DomainError("punctured sums need N*d columns");
    }
}

PuncturedSums PuncturedSums::from_segments(const SegmentSums& sums, const Eigen::MatrixXd& inv_sqrt) {
    const auto& bp = sums.breakpoints();
    for (std::size_t i = 0; i < bp.size(); ++i) {
        if (bp[i] != i) {
            throw DomainError("punctured sums need unit-length segments starting at 0");
        }
    }
    const std::size_t N = sums.segments();
    const std::size_t d = sums.dim();
    Eigen::MatrixXd Y(static_cast<Eigen::Index>(sums.samples()), static_cast<Eigen::Index>(N * d));
    for (std::size_t s = 0; s < sums.samples(); ++s) {
        for (std::size_t i = 0; i < N; ++i) {
            const Eigen::Map<const Eigen::VectorXd> raw(sums.row(s, i), static_cast<Eigen::Index>(d));
            Y.row(static_cast<Eigen::Index>(s)).segment(static_cast<Eigen::Index>(i * d), static_cast<Eigen::Index>(d)) =
                (inv_sqrt * raw).transpose();
        }
    }
    return PuncturedSums(std::move(Y), N, d);
}

Eigen::VectorXd PuncturedSums::Y(std::size_t sample, std::size_t i) const {
    return Y_.row(static_cast<Eigen::Index>(sample))
        .segment(static_cast<Eigen::Index>(i * d_), static_cast<Eigen::Index>(d_))
        .transpose();
}

Eigen::VectorXd PuncturedSums::W(std::size_t sample) const {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d_));
    for (std::size_t i = 0; i < N_; ++i) {
        w += Y(sample, i);
    }
    return w;
}

Eigen::VectorXd PuncturedSums::W_punctured(std::size_t sample, std::size_t n, long m) const {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d_));
    for (std::size_t i = 0; i < N_; ++i) {
        const long gap = std::labs(static_cast<long>(i) - static_cast<long>(n));
        if (gap > m) {
            w += Y(sample, i);
        }
    }
    return w;
}

Eigen::VectorXd PuncturedSums::Y_ring(std::size_t sample, std::size_t n, std::size_t m) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d_));
    if (n >= m) {
        y += Y(sample, n - m);
    }
    if (m > 0 && n + m < N_) {
        y += Y(sample, n + m);
    }
    return y;
}

FdDerivatives::FdDerivatives(std::function<double(const Eigen::VectorXd&)> f, double rel_step)
    : f_(std::move(f)), rel_step_(rel_step) {
    if (!(rel_step_ > 0.0)) {
        throw DomainError("finite-difference step must be positive");
    }
}

double FdDerivatives::step(const Eigen::VectorXd& w) const {
    return rel_step_ * std::max(1.0, w.norm());
}

Eigen::VectorXd FdDerivatives::gradient(const Eigen::VectorXd& w) const {
    const double h = step(w);
    Eigen::VectorXd g(w.size());
    Eigen::VectorXd x = w;
    for (Eigen::Index r = 0; r < w.size(); ++r) {
        x(r) = w(r) + h;
        const double fp = f_(x);
        x(r) = w(r) - h;
        const double fm = f_(x);
        x(r) = w(r);
        g(r) = (fp - fm) / (2.0 * h);
    }
    return g;
}

Eigen::MatrixXd FdDerivatives::hessian(const Eigen::VectorXd& w) const {
    const double h = step(w);
    const auto d = w.size();
    Eigen::MatrixXd H(d, d);
    Eigen::VectorXd x = w;
    const double f0 = f_(w);
    for (Eigen::Index r = 0; r < d; ++r) {
        x(r) = w(r) + h;
        const double fp = f_(x);
        x(r) = w(r) - h;
        const double fm = f_(x);
        x(r) = w(r);
        H(r, r) = (fp - 2.0 * f0 + fm) / (h * h);
        for (Eigen::Index s = r + 1; s < d; ++s) {
            double acc = 0.0;
            for (int sr : {1, -1}) {
                for (int ss : {1, -1}) {
                    x(r) = w(r) + sr * h;
                    x(s) = w(s) + ss * h;
                    acc += sr * ss * f_(x);
                }
            }
            x(r) = w(r);
            x(s) = w(s);
            H(r, s) = H(s, r) = acc / (4.0 * h * h);
        }
    }
    return H;
}

ChebyshevInterpolant::ChebyshevInterpolant(const std::function<double(double)>& f, double lo, double hi,
                                           std::size_t degree)
    : lo_(lo), hi_(hi), coeffs_(degree + 1, 0.0) {
    if (!(hi > lo) || degree == 0) {
        throw DomainError("Chebyshev interpolant needs lo < hi and positive degree");
    }
    const std::size_t n = degree + 1;
    std::vector<double> values(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double t = std::cos(std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(n));
        values[j] = f(0.5 * (lo + hi) + 0.5 * (hi - lo) * t);
    }
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            acc += values[j] * std::cos(std::numbers::pi * static_cast<double>(k) * (static_cast<double>(j) + 0.5) /
                                        static_cast<double>(n));
        }
        coeffs_[k] = (k == 0 ? 1.0 : 2.0) * acc / static_cast<double>(n);
    }
}

double ChebyshevInterpolant::operator()(double x) const {
    if (x < lo_ || x > hi_) {
        throw DomainError("Chebyshev interpolant evaluated outside [" + std::to_string(lo_) + ", " +
                          std::to_string(hi_) + "]");
    }
    const double t = (2.0 * x - lo_ - hi_) / (hi_ - lo_);
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t k = coeffs_.size() - 1; k > 0; --k) {
        const double b0 = 2.0 * t * b1 - b2 + coeffs_[k];
        b2 = b1;
        b1 = b0;
    }
    return t * b1 - b2 + coeffs_[0];
}

double ChebyshevInterpolant::tail() const {
    const std::size_t start = coeffs_.size() - std::max<std::size_t>(1, coeffs_.size() / 8);
    double best = 0.0;
    for (std::size_t k = start; k < coeffs_.size(); ++k) {
        best = std::max(best, std::abs(coeffs_[k]));
    }
    return best;
}

namespace {

constexpr std::size_t kTerms = 11;  // E1..E7, lhs, r, defect, z

struct Accum {
    std::array<double, kTerms> sum{};
    double z2 = 0.0;
};

double quad_form(const Eigen::VectorXd& a, const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    return a.dot(A * b);
}

}  // namespace

EiReport ei_decomposition(const FdDerivatives& f, const PuncturedSums& sums, unsigned threads,
                          std::size_t gl_order) {
    const std::size_t M = sums.samples();
    const std::size_t N = sums.N();
    const auto d = static_cast<Eigen::Index>(sums.dim());
    if (M == 0) {
        throw DomainError("E_i decomposition needs at least one sample");
    }
    const QuadratureRule gl = gauss_legendre(gl_order, 0.0, 1.0);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
    const Eigen::MatrixXd H0 = f.hessian(zero);
    const Eigen::VectorXd g0 = f.gradient(zero);
    const std::size_t chunks = (M + kChunkSize - 1) / kChunkSize;

    // Hessians at W^{n,m} for m = -1..N-1; entries past full coverage are at 0.
    auto hessians = [&](std::size_t s, std::size_t n, std::vector<Eigen::MatrixXd>& H) {
        H.resize(N + 1);
        for (std::size_t k = 0; k <= N; ++k) {
            const long m = static_cast<long>(k) - 1;
            const bool covered = m >= 0 && static_cast<std::size_t>(m) >= n &&
                                 n + static_cast<std::size_t>(m) + 1 >= N;
            H[k] = covered ? H0 : f.hessian(sums.W_punctured(s, n, m));
        }
    };

    // Pass 1: mu(delta^{n,k}) and mu(D^2 f(W)).
    std::vector<std::vector<Eigen::MatrixXd>> chunk_delta(chunks);
    std::vector<Eigen::MatrixXd> chunk_A(chunks);
    parallel_chunks(chunks, threads, [&](std::size_t c) {
        std::vector<Eigen::MatrixXd> acc(N * N, Eigen::MatrixXd::Zero(d, d));
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
        std::vector<Eigen::MatrixXd> H;
        const std::size_t end = std::min(M, (c + 1) * kChunkSize);
        for (std::size_t s = c * kChunkSize; s < end; ++s) {
            for (std::size_t n = 0; n < N; ++n) {
                hessians(s, n, H);
                if (n == 0) {
                    A += H[0];
                }
                for (std::size_t k = 0; k < N; ++k) {
                    acc[n * N + k] += H[k] - H[k + 1];
                }
            }
        }
        chunk_delta[c] = std::move(acc);
        chunk_A[c] = std::move(A);
    });
    std::vector<Eigen::MatrixXd> mu_delta(N * N, Eigen::MatrixXd::Zero(d, d));
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t c = 0; c < chunks; ++c) {
        for (std::size_t i = 0; i < N * N; ++i) {
            mu_delta[i] += chunk_delta[c][i];
        }
        A += chunk_A[c];
    }
    const double inv_M = 1.0 / static_cast<double>(M);
    for (auto& m : mu_delta) {
        m *= inv_M;
    }
    A *= inv_M;
    const double trA = A.trace();

    // Pass 2: per-sample contributions.
    std::vector<Accum> chunk_acc(chunks);
    parallel_chunks(chunks, threads, [&](std::size_t c) {
        Accum acc;
        std::vector<Eigen::MatrixXd> H;
        const std::size_t end = std::min(M, (c + 1) * kChunkSize);
        for (std::size_t s = c * kChunkSize; s < end; ++s) {
            std::array<double, kTerms> t{};
            const Eigen::VectorXd W = sums.W(s);
            const Eigen::VectorXd gW = f.gradient(W);
            for (std::size_t n = 0; n < N; ++n) {
                const Eigen::VectorXd Yn = sums.Y(s, n);
                hessians(s, n, H);
                Eigen::VectorXd increments = Eigen::VectorXd::Zero(d);
                for (std::size_t m = 0; m < N; ++m) {
                    const Eigen::VectorXd Ynm = sums.Y_ring(s, n, m);
                    if (m > 0 && n < m && n + m >= N) {
                        break;
                    }
                    const Eigen::VectorXd Wnm = sums.W_punctured(s, n, static_cast<long>(m));
                    Eigen::MatrixXd integral = Eigen::MatrixXd::Zero(d, d);
                    for (std::size_t j = 0; j < gl.size(); ++j) {
                        integral += gl.weights[j] * f.hessian(Wnm + gl.nodes[j] * Ynm);
                    }
                    increments += integral * Ynm;
                    const double e12 = -quad_form(Yn, integral - H[m + 1], Ynm);
                    if (m == 0) {
                        t[1] += e12;
                        for (std::size_t k = 1; k < N; ++k) {
                            t[4] -= quad_form(Yn, H[k] - H[k + 1] - mu_delta[n * N + k], Yn);
                        }
                        t[6] += quad_form(Yn, mu_delta[n * N], Yn);
                    } else {
                        t[0] += e12;
                        Eigen::MatrixXd mean_part = Eigen::MatrixXd::Zero(d, d);
                        for (std::size_t k = 0; k <= m; ++k) {
                            mean_part += mu_delta[n * N + k];
                        }
                        t[5] += quad_form(Yn, mean_part, Ynm);
                        for (std::size_t k = m + 1; k < N; ++k) {
                            const double v = quad_form(Yn, H[k] - H[k + 1] - mu_delta[n * N + k], Ynm);
                            t[k <= 2 * m ? 2 : 3] -= v;
                        }
                    }
                }
                t[9] += Yn.dot(gW - g0 - increments);
            }
            Eigen::MatrixXd HW = f.hessian(W);
            t[7] = HW.trace() - W.dot(gW);
            t[8] = W.dot(g0) + quad_form(W, A, W) - trA;
            double total = 0.0;
            for (std::size_t i = 0; i < 7; ++i) {
                total += t[i];
            }
            t[10] = total - t[7];
            for (std::size_t i = 0; i < kTerms; ++i) {
                acc.sum[i] += t[i];
            }
            acc.z2 += t[10] * t[10];
        }
        chunk_acc[c] = acc;
    });
    Accum all;
    for (const auto& c : chunk_acc) {
        for (std::size_t i = 0; i < kTerms; ++i) {
            all.sum[i] += c.sum[i];
        }
        all.z2 += c.z2;
    }

    EiReport rep;
    for (std::size_t i = 0; i < 7; ++i) {
        rep.E[i] = all.sum[i] * inv_M;
        rep.total += rep.E[i];
    }
    rep.lhs = all.sum[7] * inv_M;
    rep.mean_r = all.sum[8] * inv_M;
    rep.defect = all.sum[9] * inv_M;
    const double z_mean = all.sum[10] * inv_M;
    const double z_var = M > 1 ? std::max(0.0, (all.z2 - static_cast<double>(M) * z_mean * z_mean) /
                                                   static_cast<double>(M - 1))
                               : 0.0;
    rep.se = std::sqrt(z_var * inv_M);
    rep.residual = std::abs(rep.total - rep.lhs);
    rep.budget = 3.0 * rep.se + std::abs(rep.defect);
    rep.algebraic_gap = std::abs(rep.total - rep.lhs - rep.mean_r - rep.defect);
    rep.pass = rep.residual <= rep.budget;
    rep.dominant_error = 3.0 * rep.se >= std::abs(rep.defect) ? "monte-carlo" : "quadrature";
    return rep;
}

}  // namespace seqclt
