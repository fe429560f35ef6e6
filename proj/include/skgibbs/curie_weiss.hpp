#ifndef SKGIBBS_CURIE_WEISS_HPP
#define SKGIBBS_CURIE_WEISS_HPP

// Curie-Weiss ferromagnet: rate function, limiting variational principle
// and the exact finite-volume free energy.

#include <cmath>
#include <stdexcept>
#include <string>

#include "skgibbs/numeric.hpp"
#include "skgibbs/params.hpp"

namespace skgibbs::cw {

struct CwSolution {
    double m_hat = 0.0;
    double free_energy = 0.0;
    /// beta * (1 - m_hat^2) < 1, the region where the high-temperature
    /// expansion of the Gibbs potential converges. Reported, never enforced.
    bool constraint_ok = false;
};

/// Entropy cost of magnetization x for an Ising spin:
/// (1+x)/2 log(1+x) + (1-x)/2 log(1-x), equal to log 2 at |x| = 1.
inline double rate_function(double x) {
    if (!(std::fabs(x) <= 1.0))
        throw std::invalid_argument("rate_function: |x| must be <= 1, got " + std::to_string(x));
    auto term = [](double y) { return y == 0.0 ? 0.0 : 0.5 * y * std::log(y); };
    return term(1.0 + x) + term(1.0 - x);
}

/// m -> h m + beta m^2 / 2 - I(m).
inline double mean_field_functional(double m, const ModelParams& p) {
    return p.h * m + 0.5 * p.beta * m * m - rate_function(m);
}

/// Maximizer of the mean-field functional, a root of m = tanh(beta m + h).
/// The global maximizer has the sign of h; at h = 0 the nonnegative root is
/// returned.
inline double cw_fixed_point(const ModelParams& p) {
    p.validate();
    const double sign = p.h < 0.0 ? -1.0 : 1.0;
    const double field = std::fabs(p.h);
    const double beta = p.beta;
    auto residual = [&](double m) { return m - std::tanh(beta * m + field); };

    double lo = 0.0;
    if (field == 0.0) {
        if (beta <= 1.0) return 0.0;
        // m - tanh(beta m) is negative just right of 0 for beta > 1.
        lo = 1e-12;
        if (residual(lo) >= 0.0) return 0.0;
    }
    double hi = 1.0;
    if (residual(hi) <= 0.0) return sign * 1.0;  // tanh saturated to 1.0

    // Unique root in (lo, 1): tanh(beta m + |h|) - m is concave for m >= 0.
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (residual(mid) < 0.0 ? lo : hi) = mid;
    }
    double m = 0.5 * (lo + hi);
    for (int it = 0; it < 5; ++it) {
        const double t = std::tanh(beta * m + field);
        const double d = 1.0 - beta * (1.0 - t * t);
        if (d == 0.0) break;
        const double next = m - (m - t) / d;
        if (!(next >= 0.0 && next <= 1.0)) break;
        if (std::fabs(residual(next)) > std::fabs(residual(m))) break;
        m = next;
    }
    return sign * m;
}

/// Limiting free energy max_m { h m + beta m^2/2 - I(m) }.
inline CwSolution cw_free_energy_limit(const ModelParams& p) {
    const double m = cw_fixed_point(p);
    return {m, mean_field_functional(m, p), p.beta * (1.0 - m * m) < 1.0};
}

inline constexpr long kMaxCwVolume = 1'000'000;

/// (1/N) log( 2^-N sum_k C(N,k) exp(beta (S_k^2 - N)/(2N) + h S_k) ),
/// S_k = 2k - N, summed over the N+1 magnetization sectors in log-space.
inline double cw_free_energy_exact(long n, const ModelParams& p) {
    p.validate();
    if (n < 1 || n > kMaxCwVolume)
        throw std::invalid_argument("cw_free_energy_exact: N must lie in [1, 1e6], got " +
                                    std::to_string(n));
    const double nd = static_cast<double>(n);
    LogSumExp acc;
    double log_binom = 0.0;  // log C(n, k), updated incrementally
    for (long k = 0; k <= n; ++k) {
        if (k > 0) log_binom += std::log(static_cast<double>(n - k + 1) / static_cast<double>(k));
        const double s = static_cast<double>(2 * k - n);
        acc.add(log_binom + p.beta * (s * s - nd) / (2.0 * nd) + p.h * s);
    }
    return (acc.value() - nd * kLog2) / nd;
}

}  // namespace skgibbs::cw

#endif  // SKGIBBS_CURIE_WEISS_HPP
