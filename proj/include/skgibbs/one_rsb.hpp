#ifndef SKGIBBS_ONE_RSB_HPP
#define SKGIBBS_ONE_RSB_HPP

// One-step replica symmetry breaking.
//
// With a(g0, g1) = h + beta sqrt(q0) g0 + beta sqrt(q1 - q0) g1 and
// W = cosh(a)^m1, the inner measure nu1 tilts g1 by W, the outer measure nu0
// tilts g0 by exp(m0 f0(g0)) where f0 = (1/m1) log E1 W. Every inner
// expectation is computed in log-space.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "skgibbs/numeric.hpp"
#include "skgibbs/parallel.hpp"
#include "skgibbs/params.hpp"
#include "skgibbs/quadrature.hpp"
#include "skgibbs/rs.hpp"

namespace skgibbs::one_rsb {

struct OneRsbPoint {
    double q0 = 0.0;
    double q1 = 0.0;
    double m0 = 0.0;
    double m1 = 1.0;

    void validate() const {
        if (!(q0 >= 0.0 && q0 <= 1.0 && q1 >= 0.0 && q1 <= 1.0))
            throw std::invalid_argument("OneRsbPoint: overlaps must lie in [0, 1]");
        if (q1 < q0) throw std::invalid_argument("OneRsbPoint: requires q0 <= q1");
        if (!(m0 >= 0.0 && m1 <= 1.0 && m0 <= m1))
            throw std::invalid_argument("OneRsbPoint: requires 0 <= m0 <= m1 <= 1");
    }
};

struct InnerStats {
    double nu1_tanh = 0.0;   // nu1[Tanh] at fixed g0
    double nu1_tanh2 = 0.0;  // nu1[Tanh^2] at fixed g0
    double f0 = 0.0;         // (1/m1) log E1 cosh(a)^m1
};

/// Below this, (1/m) log E exp(m L) is replaced by E L + m Var(L) / 2.
inline constexpr double kSmallTilt = 1e-6;

namespace detail {

/// Inner statistics with the log-weights shifted by log_shift; the shift
/// cancels analytically and exists only to probe log-space stability.
inline InnerStats inner_stats_shifted(double g0, const OneRsbPoint& x, const ModelParams& p,
                                      const HermiteRule& rule, double log_shift) {
    const auto nodes = rule.nodes();
    const auto lw = rule.log_weights();
    const auto w = rule.weights();
    const std::size_t n = nodes.size();
    const double base = p.h + p.beta * std::sqrt(x.q0) * g0;
    const double spread = p.beta * std::sqrt(x.q1 - x.q0);

    // Stack storage for the usual orders; larger rules fall back to heap.
    constexpr std::size_t kStack = 128;
    std::array<double, kStack> lc_buf{}, th_buf{}, lt_buf{};
    std::vector<double> lc_vec, th_vec, lt_vec;
    double* lc = lc_buf.data();
    double* th = th_buf.data();
    double* lt = lt_buf.data();
    if (n > kStack) {
        lc_vec.resize(n);
        th_vec.resize(n);
        lt_vec.resize(n);
        lc = lc_vec.data();
        th = th_vec.data();
        lt = lt_vec.data();
    }

    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        log_cosh_tanh(base + spread * nodes[j], lc[j], th[j]);
        lt[j] = lw[j] + x.m1 * lc[j] + log_shift;
        mx = std::max(mx, lt[j]);
    }
    double z = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double e = std::exp(lt[j] - mx);
        z += e;
        s1 += e * th[j];
        s2 += e * th[j] * th[j];
    }
    InnerStats out;
    out.nu1_tanh = s1 / z;
    out.nu1_tanh2 = s2 / z;
    if (x.m1 > kSmallTilt) {
        out.f0 = (mx + std::log(z) - log_shift) / x.m1;
    } else {
        double mean = 0.0, sq = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            mean += w[j] * lc[j];
            sq += w[j] * lc[j] * lc[j];
        }
        out.f0 = mean + 0.5 * x.m1 * (sq - mean * mean);
    }
    return out;
}

}  // namespace detail

/// nu1-averages of Tanh and Tanh^2 and the value f0 at a fixed outer node g0.
inline InnerStats inner_stats(double g0, const OneRsbPoint& x, const ModelParams& p, const HermiteRule& rule) {
    x.validate();
    return detail::inner_stats_shifted(g0, x, p, rule, 0.0);
}

/// Every outer quantity the 1RSB functionals need, from one nested sweep.
struct NestedAverages {
    double phi0 = 0.0;             // (1/m0) log E0 exp(m0 f0); E0 f0 at m0 = 0
    double nu0_nu1_tanh_sq = 0.0;  // nu0[ nu1[Tanh]^2 ]
    double nu_tanh2 = 0.0;         // nu[ Tanh^2 ]
    double nu_tanh = 0.0;          // nu[ Tanh ]
};

inline NestedAverages nested_averages(const OneRsbPoint& x, const ModelParams& p, const HermiteRule& outer,
                                      const HermiteRule& inner, double log_shift = 0.0) {
    x.validate();
    const auto g0 = outer.nodes();
    const auto w0 = outer.weights();
    const auto lw0 = outer.log_weights();
    const std::size_t n = g0.size();
    std::vector<InnerStats> stats(n);
    for (std::size_t i = 0; i < n; ++i) stats[i] = detail::inner_stats_shifted(g0[i], x, p, inner, log_shift);

    std::vector<double> omega(n);
    NestedAverages out;
    if (x.m0 > 0.0) {
        std::vector<double> lt(n);
        for (std::size_t i = 0; i < n; ++i) lt[i] = lw0[i] + x.m0 * stats[i].f0;
        const double lz = log_sum_exp(lt);
        for (std::size_t i = 0; i < n; ++i) omega[i] = std::exp(lt[i] - lz);
        if (x.m0 > kSmallTilt) {
            out.phi0 = lz / x.m0;
        } else {
            double mean = 0.0, sq = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                mean += w0[i] * stats[i].f0;
                sq += w0[i] * stats[i].f0 * stats[i].f0;
            }
            out.phi0 = mean + 0.5 * x.m0 * (sq - mean * mean);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            omega[i] = w0[i];
            out.phi0 += w0[i] * stats[i].f0;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        out.nu0_nu1_tanh_sq += omega[i] * stats[i].nu1_tanh * stats[i].nu1_tanh;
        out.nu_tanh2 += omega[i] * stats[i].nu1_tanh2;
        out.nu_tanh += omega[i] * stats[i].nu1_tanh;
    }
    return out;
}

inline NestedAverages nested_averages(const OneRsbPoint& x, const ModelParams& p, const HermiteRule& rule) {
    return nested_averages(x, p, rule, rule);
}

/// nu0-average of fn(InnerStats). At m0 = 0 nu0 is the standard Gaussian;
/// for m0 > 0 nodes are tilted by exp(m0 f0) and normalized in log-space.
template <class Fn>
double outer_average(Fn&& fn, const OneRsbPoint& x, const ModelParams& p, const HermiteRule& rule) {
    x.validate();
    const auto g0 = rule.nodes();
    const auto w0 = rule.weights();
    const auto lw0 = rule.log_weights();
    const std::size_t n = g0.size();
    std::vector<InnerStats> stats(n);
    for (std::size_t i = 0; i < n; ++i) stats[i] = detail::inner_stats_shifted(g0[i], x, p, rule, 0.0);
    double acc = 0.0;
    if (x.m0 == 0.0) {
        for (std::size_t i = 0; i < n; ++i) acc += w0[i] * fn(stats[i]);
        return acc;
    }
    std::vector<double> lt(n);
    for (std::size_t i = 0; i < n; ++i) lt[i] = lw0[i] + x.m0 * stats[i].f0;
    const double lz = log_sum_exp(lt);
    for (std::size_t i = 0; i < n; ++i) acc += std::exp(lt[i] - lz) * fn(stats[i]);
    return acc;
}

/// Phi_0(q; m) at alpha = 0.
inline double phi0(const OneRsbPoint& x, const ModelParams& p, const HermiteRule& rule) {
    return nested_averages(x, p, rule).phi0;
}

struct QStarPair {
    double q0_star = 0.0;
    double q1_star = 0.0;
};

/// Dual variables at alpha = 0:
///   q0* = beta^2/2 (m0 - m1) nu0[nu1[Tanh]^2]
///   q1* = beta^2/2 - beta^2/2 (1 - m1) nu[Tanh^2]
inline QStarPair qstar_map(const OneRsbPoint& x, const ModelParams& p, const HermiteRule& rule) {
    const auto avg = nested_averages(x, p, rule);
    const double hb2 = 0.5 * p.beta * p.beta;
    return {hb2 * (x.m0 - x.m1) * avg.nu0_nu1_tanh_sq, hb2 - hb2 * (1.0 - x.m1) * avg.nu_tanh2};
}

/// First-order expansion of the 1RSB Gibbs potential. The m0 term uses the
/// fourth power of nu[Tanh]; it vanishes at m0 = 0.
inline double g_1rsb(const NestedAverages& avg, const OneRsbPoint& x, const ModelParams& p) {
    const double b2 = p.beta * p.beta;
    const double a = avg.nu0_nu1_tanh_sq;
    const double b = avg.nu_tanh2;
    const double c2 = avg.nu_tanh * avg.nu_tanh;
    return avg.phi0 - 0.5 * b2 * x.q0 * (x.m0 - x.m1) * a - 0.5 * b2 * x.q1 +
           0.5 * b2 * x.q1 * (1.0 - x.m1) * b + 0.25 * b2 - 0.25 * b2 * x.m0 * c2 * c2 -
           0.25 * b2 * (x.m1 - x.m0) * a * a - 0.25 * b2 * (1.0 - x.m1) * b * b;
}

inline double g_1rsb(const OneRsbPoint& x, const ModelParams& p, const HermiteRule& rule) {
    return g_1rsb(nested_averages(x, p, rule), x, p);
}

/// Collapsed 1RSB functional at m0 = 0:
///   E0[(1/m1) log E1 cosh(a)^m1] + beta^2/4 (1 - 2 q1 + m1 q0^2 + (1 - m1) q1^2).
/// m1 = 0 is taken as the limit E0 E1 log cosh(a).
inline double parisi_1rsb_value(double q0, double q1, double m1, const ModelParams& p, const HermiteRule& rule) {
    if (!(m1 >= 0.0 && m1 <= 1.0)) throw std::invalid_argument("parisi_1rsb_value: m1 must lie in [0, 1]");
    const OneRsbPoint x{q0, q1, 0.0, m1};
    const double b2 = p.beta * p.beta;
    return phi0(x, p, rule) + 0.25 * b2 * (1.0 - 2.0 * q1 + m1 * q0 * q0 + (1.0 - m1) * q1 * q1);
}

// ---------------------------------------------------------------------------
// Fixed points q0 = nu0[nu1[Tanh]^2], q1 = nu[Tanh^2] at m0 = 0.

struct OneRsbFixedPoint {
    double q0 = 0.0;
    double q1 = 0.0;
    double residual = 0.0;
    int iterations = 0;
    int newton_steps = 0;
};

struct FixedPointOptions {
    double tol = 1e-12;
    int max_iter = 20000;
    double damping = 0.5;
    /// Residual below which a Newton polish step is attempted.
    double newton_threshold = 1e-4;
    double fd_step = 1e-7;
    std::optional<std::array<double, 2>> start;
};

namespace detail {

inline void project(double& q0, double& q1) {
    q0 = std::clamp(q0, 0.0, 1.0);
    q1 = std::clamp(q1, 0.0, 1.0);
    if (q1 < q0) q0 = q1 = 0.5 * (q0 + q1);
}

struct MapValue {
    double a = 0.0;  // nu0[nu1[Tanh]^2]
    double b = 0.0;  // nu[Tanh^2]
};

inline MapValue fixed_point_map(double q0, double q1, double m1, const ModelParams& p, const HermiteRule& rule) {
    const auto avg = nested_averages(OneRsbPoint{q0, q1, 0.0, m1}, p, rule);
    return {avg.nu0_nu1_tanh_sq, avg.nu_tanh2};
}

/// One Newton step on R(q) = M(q) - q with a one-sided difference Jacobian
/// whose stencil stays inside 0 <= q0 <= q1 <= 1. Returns false when no
/// admissible stencil exists or the system is singular.
inline bool newton_step(double& q0, double& q1, const MapValue& m, double m1, const ModelParams& p,
                        const HermiteRule& rule, double eps) {
    double d0;
    if (q0 - eps >= 0.0) d0 = -eps;
    else if (q0 + eps <= q1) d0 = eps;
    else return false;
    double d1;
    if (q1 + eps <= 1.0) d1 = eps;
    else if (q1 - eps >= q0) d1 = -eps;
    else return false;

    const MapValue m_0 = fixed_point_map(q0 + d0, q1, m1, p, rule);
    const MapValue m_1 = fixed_point_map(q0, q1 + d1, m1, p, rule);
    // Jacobian of R = M - I.
    const double j00 = (m_0.a - m.a) / d0 - 1.0;
    const double j10 = (m_0.b - m.b) / d0;
    const double j01 = (m_1.a - m.a) / d1;
    const double j11 = (m_1.b - m.b) / d1 - 1.0;
    const double det = j00 * j11 - j01 * j10;
    if (!std::isfinite(det) || det == 0.0) return false;
    const double r0 = m.a - q0;
    const double r1 = m.b - q1;
    q0 -= (j11 * r0 - j01 * r1) / det;
    q1 -= (-j10 * r0 + j00 * r1) / det;
    project(q0, q1);
    return true;
}

}  // namespace detail

/// Starting point for the fixed-point iteration: spreads q0 and q1 around
/// the RS overlap so that a nontrivial 1RSB branch can be reached.
inline std::array<double, 2> default_start(const ModelParams& p, const HermiteRule& rule) {
    double q_rs = 0.0;
    try {
        q_rs = rs::rs_fixed_point(p, rule, 1e-10).q_hat;
    } catch (const NoConvergenceError& e) {
        q_rs = std::clamp(e.last_iterate(), 0.0, 1.0);
    }
    return {0.5 * q_rs, 0.5 * (1.0 + q_rs)};
}

/// Damped simultaneous iteration of the 1RSB fixed-point equations at m0 = 0,
/// projected onto 0 <= q0 <= q1 <= 1, with Newton polishing once the
/// residual is small. A Newton step is kept only if it lowers the residual.
inline OneRsbFixedPoint onersb_fixed_point(double m1, const ModelParams& p, const HermiteRule& rule,
                                           const FixedPointOptions& opt = {}) {
    p.validate();
    if (!(m1 >= 0.0 && m1 <= 1.0)) throw std::invalid_argument("onersb_fixed_point: m1 must lie in [0, 1]");
    if (!(opt.tol > 0.0)) throw std::invalid_argument("onersb_fixed_point: tol must be > 0");
    auto start = opt.start ? *opt.start : default_start(p, rule);
    double q0 = start[0], q1 = start[1];
    detail::project(q0, q1);

    OneRsbFixedPoint out;
    double res = std::numeric_limits<double>::infinity();
    auto residual = [](double a0, double a1, const detail::MapValue& m) {
        return std::max(std::fabs(m.a - a0), std::fabs(m.b - a1));
    };
    for (int it = 0; it < opt.max_iter; ++it) {
        const auto m = detail::fixed_point_map(q0, q1, m1, p, rule);
        res = residual(q0, q1, m);
        if (res < opt.tol) {
            out.q0 = q0;
            out.q1 = q1;
            out.residual = res;
            out.iterations = it;
            return out;
        }
        if (res < opt.newton_threshold) {
            double n0 = q0, n1 = q1;
            if (detail::newton_step(n0, n1, m, m1, p, rule, opt.fd_step)) {
                const auto mn = detail::fixed_point_map(n0, n1, m1, p, rule);
                if (residual(n0, n1, mn) < res) {
                    q0 = n0;
                    q1 = n1;
                    ++out.newton_steps;
                    continue;
                }
            }
        }
        q0 += opt.damping * (m.a - q0);
        q1 += opt.damping * (m.b - q1);
        detail::project(q0, q1);
    }
    throw NoConvergenceError("onersb_fixed_point: no convergence for m1 = " + std::to_string(m1), q0, res, q1);
}

/// Runs the fixed-point solver from several starts and keeps the distinct
/// solutions (separated by more than `distinct_tol` in either overlap).
inline std::vector<OneRsbFixedPoint> onersb_fixed_points_multistart(double m1, const ModelParams& p,
                                                                    const HermiteRule& rule,
                                                                    std::vector<std::array<double, 2>> starts = {},
                                                                    double distinct_tol = 1e-6) {
    if (starts.empty()) {
        const auto s = default_start(p, rule);
        starts = {s, {0.0, 0.5}, {0.05, 0.95}, {0.5, 0.5}, {0.3, 0.7}};
    }
    std::vector<OneRsbFixedPoint> found;
    for (const auto& s : starts) {
        FixedPointOptions opt;
        opt.start = s;
        try {
            const auto fp = onersb_fixed_point(m1, p, rule, opt);
            const bool seen = std::any_of(found.begin(), found.end(), [&](const OneRsbFixedPoint& f) {
                return std::fabs(f.q0 - fp.q0) < distinct_tol && std::fabs(f.q1 - fp.q1) < distinct_tol;
            });
            if (!seen) found.push_back(fp);
        } catch (const NoConvergenceError&) {
        }
    }
    return found;
}

/// Finite-difference gradient of G_1rsb in (q0, q1) at m0 = 0. Used to probe
/// whether 1RSB fixed points are also critical points of the Gibbs potential.
inline std::array<double, 2> g_1rsb_gradient(double q0, double q1, double m1, const ModelParams& p,
                                             const HermiteRule& rule, double step = 1e-5) {
    auto g = [&](double a0, double a1) { return g_1rsb(OneRsbPoint{a0, a1, 0.0, m1}, p, rule); };
    auto partial = [&](auto&& f, double at, double lo, double hi) {
        const double up = std::min(step, hi - at);
        const double dn = std::min(step, at - lo);
        if (up > 0.0 && dn > 0.0) return (f(at + up) - f(at - dn)) / (up + dn);
        if (up > 0.0) return (f(at + up) - f(at)) / up;
        if (dn > 0.0) return (f(at) - f(at - dn)) / dn;
        return 0.0;
    };
    const double d0 = partial([&](double v) { return g(v, q1); }, q0, 0.0, q1);
    const double d1 = partial([&](double v) { return g(q0, v); }, q1, q0, 1.0);
    return {d0, d1};
}

// ---------------------------------------------------------------------------
// Minimization over m1.

struct GridEntry {
    double m1 = 0.0;
    double q0 = 0.0;
    double q1 = 0.0;
    double value = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
};

struct OneRsbSolution {
    double m1 = 1.0;
    double q0 = 0.0;
    double q1 = 0.0;
    double value = 0.0;
    double residual = 0.0;
    std::vector<GridEntry> grid;
    int failures = 0;
    int refinement_evaluations = 0;
};

struct SolveOptions {
    int grid_points = 64;
    double m1_tol = 1e-6;
    FixedPointOptions fixed_point{};
};

/// Fixed point in (q0, q1) for each m1 on the grid k / grid_points, then
/// golden-section refinement of m1 around the best grid point.
inline OneRsbSolution parisi_1rsb_solve(const ModelParams& p, const HermiteRule& rule, const SolveOptions& opt = {}) {
    p.validate();
    if (opt.grid_points < 2) throw std::invalid_argument("parisi_1rsb_solve: need at least 2 grid points");
    FixedPointOptions fp_opt = opt.fixed_point;
    if (!fp_opt.start) fp_opt.start = default_start(p, rule);

    OneRsbSolution sol;
    sol.grid.resize(static_cast<std::size_t>(opt.grid_points));
    parallel_for(sol.grid.size(), [&](std::size_t k) {
        GridEntry& e = sol.grid[k];
        e.m1 = static_cast<double>(k + 1) / static_cast<double>(opt.grid_points);
        try {
            const auto fp = onersb_fixed_point(e.m1, p, rule, fp_opt);
            e.q0 = fp.q0;
            e.q1 = fp.q1;
            e.residual = fp.residual;
            e.value = parisi_1rsb_value(fp.q0, fp.q1, e.m1, p, rule);
            e.converged = true;
        } catch (const NoConvergenceError& err) {
            e.residual = err.residual();
        }
    });

    std::size_t best = sol.grid.size();
    for (std::size_t k = 0; k < sol.grid.size(); ++k) {
        if (!sol.grid[k].converged) {
            ++sol.failures;
            continue;
        }
        if (best == sol.grid.size() || sol.grid[k].value < sol.grid[best].value) best = k;
    }
    if (best == sol.grid.size())
        throw NoConvergenceError("parisi_1rsb_solve: every fixed-point solve failed", 0.0,
                                 std::numeric_limits<double>::infinity());
    const GridEntry& g = sol.grid[best];
    sol.m1 = g.m1;
    sol.q0 = g.q0;
    sol.q1 = g.q1;
    sol.value = g.value;
    sol.residual = g.residual;

    // Golden section on the bracket around the grid minimizer, warm-started
    // from the grid solution.
    const double step = 1.0 / static_cast<double>(opt.grid_points);
    double lo = std::max(0.0, g.m1 - step);
    double hi = std::min(1.0, g.m1 + step);
    FixedPointOptions warm = fp_opt;
    warm.start = std::array<double, 2>{g.q0, g.q1};
    auto evaluate = [&](double m1, GridEntry& e) {
        e.m1 = m1;
        try {
            const auto fp = onersb_fixed_point(m1, p, rule, warm);
            e.q0 = fp.q0;
            e.q1 = fp.q1;
            e.residual = fp.residual;
            e.value = parisi_1rsb_value(fp.q0, fp.q1, m1, p, rule);
            e.converged = true;
        } catch (const NoConvergenceError&) {
            e.value = std::numeric_limits<double>::infinity();
            e.converged = false;
        }
        ++sol.refinement_evaluations;
        if (e.converged && e.value < sol.value) {
            sol.m1 = e.m1;
            sol.q0 = e.q0;
            sol.q1 = e.q1;
            sol.value = e.value;
            sol.residual = e.residual;
        }
    };
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    GridEntry c, d;
    evaluate(hi - inv_phi * (hi - lo), c);
    evaluate(lo + inv_phi * (hi - lo), d);
    while (hi - lo > opt.m1_tol) {
        if (c.value <= d.value) {
            hi = d.m1;
            d = c;
            evaluate(hi - inv_phi * (hi - lo), c);
        } else {
            lo = c.m1;
            c = d;
            evaluate(lo + inv_phi * (hi - lo), d);
        }
    }
    return sol;
}

}  // namespace skgibbs::one_rsb

#endif  // SKGIBBS_ONE_RSB_HPP
