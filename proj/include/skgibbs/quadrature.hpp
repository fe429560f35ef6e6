#ifndef SKGIBBS_QUADRATURE_HPP
#define SKGIBBS_QUADRATURE_HPP

// Gauss-Hermite rules for expectations against the standard normal law.

#include <cmath>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "skgibbs/numeric.hpp"

namespace skgibbs {

inline constexpr int kMaxHermiteOrder = 512;
inline constexpr int kDefaultQuadOrder = 61;

/// Nodes and weights with E[f(g)] ~ sum_i w_i f(x_i), g ~ N(0,1).
/// Immutable once built.
class HermiteRule {
public:
    HermiteRule(std::vector<double> nodes, std::vector<double> weights)
        : nodes_(std::move(nodes)), weights_(std::move(weights)) {
        if (nodes_.empty() || nodes_.size() != weights_.size())
            throw std::invalid_argument("HermiteRule: nodes and weights must be non-empty and equal length");
        log_weights_.reserve(weights_.size());
        for (double w : weights_) log_weights_.push_back(std::log(w));
    }

    int order() const noexcept { return static_cast<int>(nodes_.size()); }
    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }
    /// log of each weight; -inf where a weight underflowed to zero.
    std::span<const double> log_weights() const noexcept { return log_weights_; }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> log_weights_;
};

/// Golub-Welsch on the Jacobi matrix of the probabilists' Hermite
/// polynomials (zero diagonal, off-diagonal sqrt(k)). The result is
/// symmetrized so that nodes are exactly antisymmetric and weights symmetric.
inline HermiteRule hermite_rule(int order) {
    if (order < 1 || order > kMaxHermiteOrder)
        throw std::invalid_argument("hermite_rule: order must lie in [1, " +
                                    std::to_string(kMaxHermiteOrder) + "], got " +
                                    std::to_string(order));
    const int n = order;
    std::vector<double> nodes(n), weights(n);
    if (n == 1) {
        nodes[0] = 0.0;
        weights[0] = 1.0;
        return HermiteRule(std::move(nodes), std::move(weights));
    }

    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n - 1);
    for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(static_cast<double>(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("hermite_rule: eigen-decomposition failed");

    const Eigen::VectorXd& vals = solver.eigenvalues();
    const Eigen::MatrixXd& vecs = solver.eigenvectors();
    for (int i = 0; i < n; ++i) {
        nodes[i] = vals[i];
        weights[i] = vecs(0, i) * vecs(0, i);
    }
    for (int i = 0; i < n / 2; ++i) {
        const int j = n - 1 - i;
        const double x = 0.5 * (nodes[j] - nodes[i]);
        const double w = 0.5 * (weights[i] + weights[j]);
        nodes[i] = -x;
        nodes[j] = x;
        weights[i] = weights[j] = w;
    }
    if (n % 2 == 1) nodes[n / 2] = 0.0;

    // Sum the weights outward-in (small first) before normalizing.
    double total = 0.0;
    for (int i = 0; i < n / 2; ++i) total += 2.0 * weights[i];
    if (n % 2 == 1) total += weights[n / 2];
    for (double& w : weights) w /= total;
    return HermiteRule(std::move(nodes), std::move(weights));
}

/// Default order, overridable through SKGIBBS_QUAD_ORDER.
inline int default_quad_order() {
    if (const char* env = std::getenv("SKGIBBS_QUAD_ORDER")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1 && n <= kMaxHermiteOrder) return n;
        } catch (const std::exception&) {
        }
    }
    return kDefaultQuadOrder;
}

/// sum_i w_i f(x_i). Throws NumericDomainError naming the first node where
/// f is not finite.
template <class F>
double gauss_expect(F&& f, const HermiteRule& rule) {
    const auto x = rule.nodes();
    const auto w = rule.weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = f(x[i]);
        if (!std::isfinite(v))
            throw NumericDomainError("gauss_expect: integrand is not finite at node " +
                                         std::to_string(i) + " (x = " + std::to_string(x[i]) + ")",
                                     static_cast<int>(i), x[i]);
        acc += w[i] * v;
    }
    return acc;
}

/// log E[exp(log_f(g))], evaluated in log-space.
template <class F>
double log_gauss_expect_exp(F&& log_f, const HermiteRule& rule) {
    const auto x = rule.nodes();
    const auto lw = rule.log_weights();
    LogSumExp acc;
    for (std::size_t i = 0; i < x.size(); ++i) acc.add(lw[i] + log_f(x[i]));
    return acc.value();
}

/// Nested expectation E_0[ E_1[ f(g0, g1) ] ] as an outer loop over g0.
template <class F>
double gauss_expect2(F&& f, const HermiteRule& outer, const HermiteRule& inner) {
    return gauss_expect(
        [&](double g0) { return gauss_expect([&](double g1) { return f(g0, g1); }, inner); }, outer);
}

}  // namespace skgibbs

#endif  // SKGIBBS_QUADRATURE_HPP
