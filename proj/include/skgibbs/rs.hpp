#ifndef SKGIBBS_RS_HPP
#define SKGIBBS_RS_HPP

// Replica-symmetric functionals of the SK model.
//
//   T(q)     = E tanh^2(h + beta sqrt(q) g)
//   F_rs(q)  = E log cosh(h + beta sqrt(q) g) + beta^2/4 (1 - q)^2
//   G_rs(q)  = E log cosh(h + beta sqrt(q) g) + beta^2/4 (1 - T)(1 + T - 2q)
//
// F_rs - G_rs = beta^2/4 (q - T(q))^2, so both agree exactly at fixed
// points of T and G_rs lies below F_rs elsewhere.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "skgibbs/numeric.hpp"
#include "skgibbs/parallel.hpp"
#include "skgibbs/params.hpp"
#include "skgibbs/quadrature.hpp"

namespace skgibbs::rs {

namespace detail {
inline void check_overlap(double q, const char* who) {
    if (!(q >= 0.0 && q <= 1.0))
        throw std::invalid_argument(std::string(who) + ": q must lie in [0, 1], got " + std::to_string(q));
}

struct Moments {
    double log_cosh = 0.0;  // E log cosh(.)
    double tanh2 = 0.0;     // E tanh^2(.)
};

inline Moments moments(double q, const ModelParams& p, const HermiteRule& rule) {
    const double s = p.beta * std::sqrt(q);
    const auto x = rule.nodes();
    const auto w = rule.weights();
    Moments m;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double lc, th;
        log_cosh_tanh(p.h + s * x[i], lc, th);
        m.log_cosh += w[i] * lc;
        m.tanh2 += w[i] * th * th;
    }
    return m;
}
}  // namespace detail

/// T(q) = E tanh^2(h + beta sqrt(q) g), in [0, 1].
inline double t_overlap(double q, const ModelParams& p, const HermiteRule& rule) {
    detail::check_overlap(q, "t_overlap");
    return detail::moments(q, p, rule).tanh2;
}

inline double f_rs(double q, const ModelParams& p, const HermiteRule& rule) {
    detail::check_overlap(q, "f_rs");
    const double b2 = p.beta * p.beta;
    return detail::moments(q, p, rule).log_cosh + 0.25 * b2 * (1.0 - q) * (1.0 - q);
}

/// First-order expansion of the RS Gibbs potential.
inline double g_rs(double q, const ModelParams& p, const HermiteRule& rule) {
    detail::check_overlap(q, "g_rs");
    const double b2 = p.beta * p.beta;
    const auto m = detail::moments(q, p, rule);
    return m.log_cosh + 0.25 * b2 * (1.0 - m.tanh2) * (1.0 + m.tanh2 - 2.0 * q);
}

/// dF_rs/dq = beta^2/2 (q - T(q)), by Gaussian integration by parts.
inline double f_rs_derivative(double q, const ModelParams& p, const HermiteRule& rule) {
    return 0.5 * p.beta * p.beta * (q - t_overlap(q, p, rule));
}

struct RsSolution {
    double q_hat = 0.0;
    double value = 0.0;
    double residual = 0.0;  // |q_hat - T(q_hat)|
    bool at_stable = false;
    double at_margin = 0.0;
    int iterations = 0;
    bool used_bisection = false;
    /// |value - G_rs(q_hat)|, zero up to the fixed-point residual.
    double g_rs_gap = 0.0;
};

struct FixedPointResult {
    double q_hat = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool used_bisection = false;
};

inline constexpr double kDefaultTolerance = 1e-12;
inline constexpr int kDefaultMaxIter = 20000;

/// All roots of q - T(q) in [0, 1], located by sign changes on a uniform
/// grid and refined by bisection. Includes q = 0 when it is an exact root.
inline std::vector<double> scan_fixed_points(const ModelParams& p, const HermiteRule& rule,
                                             int grid_points = 1024, double tol = 1e-14) {
    p.validate();
    if (grid_points < 2) throw std::invalid_argument("scan_fixed_points: need at least 2 grid points");
    auto r = [&](double q) { return q - t_overlap(q, p, rule); };
    std::vector<double> roots;
    double q_prev = 0.0;
    double r_prev = r(0.0);
    if (r_prev == 0.0) roots.push_back(0.0);
    for (int k = 1; k <= grid_points; ++k) {
        const double q = static_cast<double>(k) / grid_points;
        const double rq = r(q);
        if (rq == 0.0) {
            roots.push_back(q);
        } else if (r_prev != 0.0 && (r_prev < 0.0) != (rq < 0.0)) {
            double lo = q_prev, hi = q;
            const bool lo_neg = r_prev < 0.0;
            for (int it = 0; it < 200 && hi - lo > tol; ++it) {
                const double mid = 0.5 * (lo + hi);
                ((r(mid) < 0.0) == lo_neg ? lo : hi) = mid;
            }
            roots.push_back(0.5 * (lo + hi));
        }
        q_prev = q;
        r_prev = rq;
    }
    return roots;
}

/// Damped iteration q <- (1 - 1/2) q + 1/2 T(q) from max(tanh^2 h, 1e-3).
/// Falls back to bracketing on q - T(q) when the iteration stalls, choosing
/// the root closest to the last iterate.
inline FixedPointResult rs_fixed_point(const ModelParams& p, const HermiteRule& rule,
                                       double tol = kDefaultTolerance, int max_iter = kDefaultMaxIter) {
    p.validate();
    if (!(tol > 0.0)) throw std::invalid_argument("rs_fixed_point: tol must be > 0");
    constexpr double damping = 0.5;
    const double th = std::tanh(p.h);
    double q = std::max(th * th, 1e-3);
    double res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        const double t = t_overlap(q, p, rule);
        res = std::fabs(q - t);
        if (res < tol) return {q, res, it, false};
        q = std::clamp((1.0 - damping) * q + damping * t, 0.0, 1.0);
    }

    const auto roots = scan_fixed_points(p, rule);
    if (roots.empty())
        throw NoConvergenceError("rs_fixed_point: iteration did not converge and no root was bracketed",
                                 q, res);
    double best = roots.front();
    for (double r : roots)
        if (std::fabs(r - q) < std::fabs(best - q)) best = r;
    const double best_res = std::fabs(best - t_overlap(best, p, rule));
    if (!(best_res < std::max(tol, 1e-10)))
        throw NoConvergenceError("rs_fixed_point: bracketed root misses the tolerance", best, best_res);
    return {best, best_res, max_iter, true};
}

struct AtStability {
    bool stable = false;
    double margin = 0.0;
    double q_hat = 0.0;
};

/// de Almeida-Thouless criterion, 1 - beta^2 E sech^4(h + beta sqrt(q) g),
/// taken from the standard literature.
inline double at_margin_at(double q, const ModelParams& p, const HermiteRule& rule) {
    const double s = p.beta * std::sqrt(q);
    const double e = gauss_expect(
        [&](double g) {
            const double c = 1.0 / std::cosh(p.h + s * g);
            const double c2 = c * c;
            return c2 * c2;
        },
        rule);
    return 1.0 - p.beta * p.beta * e;
}

inline AtStability at_stability(const ModelParams& p, const HermiteRule& rule) {
    const auto fp = rs_fixed_point(p, rule);
    const double margin = at_margin_at(fp.q_hat, p, rule);
    return {margin > 0.0, margin, fp.q_hat};
}

/// RS solution F_rs(q_hat) at the fixed point of T.
inline RsSolution rs_solution(const ModelParams& p, const HermiteRule& rule,
                              double tol = kDefaultTolerance, int max_iter = kDefaultMaxIter) {
    const auto fp = rs_fixed_point(p, rule, tol, max_iter);
    RsSolution out;
    out.q_hat = fp.q_hat;
    out.residual = fp.residual;
    out.iterations = fp.iterations;
    out.used_bisection = fp.used_bisection;
    out.value = f_rs(fp.q_hat, p, rule);
    out.g_rs_gap = std::fabs(out.value - g_rs(fp.q_hat, p, rule));
    out.at_margin = at_margin_at(fp.q_hat, p, rule);
    out.at_stable = out.at_margin > 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// Derivative scans over q.

struct GridSpec {
    double q_min = 0.005;
    double q_max = 0.995;
    int points = 199;

    double at(int k) const {
        if (points == 1) return q_min;
        return q_min + (q_max - q_min) * static_cast<double>(k) / static_cast<double>(points - 1);
    }
};

enum class ScanTarget { f_rs, g_rs, both };

struct RsPoint {
    double q = 0.0;
    double t_of_q = 0.0;
    double f_rs = 0.0;
    double g_rs = 0.0;
    double d1_f = 0.0;  // analytic
    double d1_g = std::numeric_limits<double>::quiet_NaN();
    double d2_f = std::numeric_limits<double>::quiet_NaN();
    double d2_g = std::numeric_limits<double>::quiet_NaN();
};

inline constexpr double kDefaultScanStep = 1e-3;

/// Second derivative by a central difference with one Richardson step:
/// (4 D(s/2) - D(s)) / 3. The step shrinks near the ends of [0, 1].
template <class F>
double second_derivative(F&& f, double q, double step) {
    const double s = std::min({step, 0.5 * q, 0.5 * (1.0 - q)});
    const double f0 = f(q);
    auto d2 = [&](double hh) { return (f(q + hh) - 2.0 * f0 + f(q - hh)) / (hh * hh); };
    return (4.0 * d2(0.5 * s) - d2(s)) / 3.0;
}

template <class F>
double first_derivative(F&& f, double q, double step) {
    const double s = std::min({step, 0.5 * q, 0.5 * (1.0 - q)});
    auto d1 = [&](double hh) { return (f(q + hh) - f(q - hh)) / (2.0 * hh); };
    return (4.0 * d1(0.5 * s) - d1(s)) / 3.0;
}

/// Evaluates F_rs, G_rs and their derivatives along a grid inside (0, 1).
/// Grid points are processed in parallel; the output follows grid order.
inline std::vector<RsPoint> derivative_scan(ScanTarget which, const ModelParams& p, const GridSpec& grid,
                                            const HermiteRule& rule, double base_step = kDefaultScanStep) {
    p.validate();
    if (grid.points < 2) throw std::invalid_argument("derivative_scan: grid needs at least 2 points");
    if (!(grid.q_min > 0.0 && grid.q_min < grid.q_max && grid.q_max < 1.0))
        throw std::invalid_argument("derivative_scan: grid must satisfy 0 < q_min < q_max < 1");
    if (!(base_step > 0.0)) throw std::invalid_argument("derivative_scan: step must be > 0");

    std::vector<RsPoint> out(static_cast<std::size_t>(grid.points));
    auto fq = [&](double q) { return f_rs(q, p, rule); };
    auto gq = [&](double q) { return g_rs(q, p, rule); };
    parallel_for(out.size(), [&](std::size_t k) {
        RsPoint& pt = out[k];
        pt.q = grid.at(static_cast<int>(k));
        pt.t_of_q = t_overlap(pt.q, p, rule);
        pt.f_rs = fq(pt.q);
        pt.g_rs = gq(pt.q);
        pt.d1_f = 0.5 * p.beta * p.beta * (pt.q - pt.t_of_q);
        if (which != ScanTarget::g_rs) pt.d2_f = second_derivative(fq, pt.q, base_step);
        if (which != ScanTarget::f_rs) {
            pt.d1_g = first_derivative(gq, pt.q, base_step);
            pt.d2_g = second_derivative(gq, pt.q, base_step);
        }
    });
    return out;
}

}  // namespace skgibbs::rs

#endif  // SKGIBBS_RS_HPP
