#ifndef SKGIBBS_NUMERIC_HPP
#define SKGIBBS_NUMERIC_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

namespace skgibbs {

// Error taxonomy shared by every module. Invalid inputs raise
// std::invalid_argument directly; the two types below carry extra context.

/// A function evaluated to a non-finite value where a finite one is required.
class NumericDomainError : public std::domain_error {
public:
    NumericDomainError(const std::string& what, int index, double node)
        : std::domain_error(what), index_(index), node_(node) {}

    int index() const noexcept { return index_; }
    double node() const noexcept { return node_; }

private:
    int index_;
    double node_;
};

/// An iterative solver ran out of budget. Carries the last iterate.
class NoConvergenceError : public std::runtime_error {
public:
    NoConvergenceError(const std::string& what, double last_iterate, double residual,
                       double last_iterate_2 = std::numeric_limits<double>::quiet_NaN())
        : std::runtime_error(what),
          last_(last_iterate), last_2_(last_iterate_2), residual_(residual) {}

    double last_iterate() const noexcept { return last_; }
    double last_iterate_2() const noexcept { return last_2_; }
    double residual() const noexcept { return residual_; }

private:
    double last_;
    double last_2_;
    double residual_;
};

inline constexpr double kLog2 = std::numbers::ln2;

/// log(cosh(x)) without overflow for large |x|.
inline double log_cosh(double x) noexcept {
    const double a = std::fabs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - kLog2;
}

/// Fills log cosh(x) and tanh(x) from a single exponential.
inline void log_cosh_tanh(double x, double& lc, double& th) noexcept {
    const double a = std::fabs(x);
    const double e = std::exp(-2.0 * a);
    lc = a + std::log1p(e) - kLog2;
    const double t = (1.0 - e) / (1.0 + e);
    th = std::copysign(t, x);
}

/// log(sum_i exp(v_i)); returns -inf for an empty or all -inf input.
inline double log_sum_exp(std::span<const double> v) noexcept {
    if (v.empty()) return -std::numeric_limits<double>::infinity();
    const double mx = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

/// Streaming log-sum-exp accumulator.
class LogSumExp {
public:
    void add(double x) noexcept {
        if (x == -std::numeric_limits<double>::infinity()) return;
        if (x <= max_) {
            sum_ += std::exp(x - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - x) + 1.0;
            max_ = x;
        }
    }

    double value() const noexcept {
        if (sum_ == 0.0) return -std::numeric_limits<double>::infinity();
        return max_ + std::log(sum_);
    }

private:
    double max_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
};

}  // namespace skgibbs

#endif  // SKGIBBS_NUMERIC_HPP
