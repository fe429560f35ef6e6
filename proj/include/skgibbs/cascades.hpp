#ifndef SKGIBBS_CASCADES_HPP
#define SKGIBBS_CASCADES_HPP

// Truncated Poisson-Dirichlet point processes and Monte Carlo checks of the
// cascade representation of the 1RSB functional.
//
// A PD(m) sample is built from the arrival times t_1 < t_2 < ... of a
// unit-rate Poisson process: atoms x_i = t_i^(-1/m), normalized. Two-level
// cascades multiply the unnormalized atoms of each level and normalize over
// the whole tree.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "skgibbs/numeric.hpp"
#include "skgibbs/one_rsb.hpp"
#include "skgibbs/parallel.hpp"
#include "skgibbs/params.hpp"
#include "skgibbs/quadrature.hpp"
#include "skgibbs/random.hpp"

namespace skgibbs::cascades {

inline constexpr int kMinAtoms = 16;
/// Estimated tail mass above which a truncated sample is flagged.
inline constexpr double kTruncationFlagThreshold = 0.05;

struct CascadeSample {
    double m = 0.0;
    std::vector<double> weights;  // descending, sum to 1
    int k_atoms = 0;
    /// x_k / sum_i x_i: weight of the last kept atom.
    double truncation_mass_bound = 0.0;
    /// Expected share of the discarded atoms, int_{t_k}^inf t^(-1/m) dt
    /// relative to the full mass.
    double tail_mass_estimate = 0.0;
    bool truncation_flagged = false;
};

namespace detail {

inline void check_m(double m, const char* who) {
    if (!(m > 0.0 && m < 1.0))
        throw std::invalid_argument(std::string(who) + ": m must lie in (0, 1), got " + std::to_string(m));
}

/// log x_i for the first k atoms of a PD(m) process, plus log of the
/// integrated tail beyond the last arrival.
struct LogAtoms {
    std::vector<double> log_x;
    double log_tail = 0.0;
};

template <class Rng>
void draw_log_atoms(double m, int k, Rng& rng, LogAtoms& out) {
    std::exponential_distribution<double> expo(1.0);
    out.log_x.resize(static_cast<std::size_t>(k));
    double t = 0.0;
    for (int i = 0; i < k; ++i) {
        t += expo(rng);
        out.log_x[i] = -std::log(t) / m;
    }
    // int_t^inf s^(-1/m) ds = t^(1 - 1/m) m / (1 - m)
    out.log_tail = (1.0 - 1.0 / m) * std::log(t) + std::log(m / (1.0 - m));
}

inline void check_atoms(int k, const char* who) {
    if (k < kMinAtoms)
        throw std::invalid_argument(std::string(who) + ": need at least 16 atoms, got " + std::to_string(k));
}

/// Mean and standard error with Bessel's correction.
inline std::pair<double, double> mean_stderr(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    const double mean = s / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double var = v.size() > 1 ? ss / static_cast<double>(v.size() - 1) : 0.0;
    return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

}  // namespace detail

template <class Rng>
CascadeSample sample_pd(double m, int k_atoms, Rng& rng) {
    detail::check_m(m, "sample_pd");
    detail::check_atoms(k_atoms, "sample_pd");
    detail::LogAtoms atoms;
    detail::draw_log_atoms(m, k_atoms, rng, atoms);
    const double lz = log_sum_exp(atoms.log_x);
    CascadeSample s;
    s.m = m;
    s.k_atoms = k_atoms;
    s.weights.resize(atoms.log_x.size());
    for (std::size_t i = 0; i < s.weights.size(); ++i) s.weights[i] = std::exp(atoms.log_x[i] - lz);
    s.truncation_mass_bound = s.weights.back();
    const double l_all = std::log1p(std::exp(atoms.log_tail - lz)) + lz;
    s.tail_mass_estimate = std::exp(atoms.log_tail - l_all);
    s.truncation_flagged = s.tail_mass_estimate > kTruncationFlagThreshold;
    return s;
}

inline CascadeSample sample_pd(double m, int k_atoms, std::uint64_t seed) {
    auto rng = make_stream(seed, 0, StreamTag::pd_sample);
    return sample_pd(m, k_atoms, rng);
}

/// Outcome of a Monte Carlo comparison against a quadrature value.
struct McReport {
    double mc_mean = 0.0;
    double mc_stderr = 0.0;
    double quadrature_value = 0.0;
    double difference = 0.0;  // mc_mean - quadrature_value
    /// Truncation bias estimate: the shift between truncating each replica at
    /// k and at k/2, extrapolated with the k^(1 - 1/m) decay of the tail.
    double truncation_allowance = 0.0;
    double mean_tail_mass = 0.0;
    bool within_3sigma = false;
    bool within_3sigma_plus_allowance = false;
    int n_mc = 0;
    int k_atoms = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline McReport summarize(const std::vector<double>& full, const std::vector<double>& half,
                          const std::vector<double>& tail, double quad, double m_slowest, int n_mc, int k,
                          std::uint64_t seed) {
    McReport r;
    const auto [mean, se] = mean_stderr(full);
    std::vector<double> diff(full.size());
    for (std::size_t i = 0; i < full.size(); ++i) diff[i] = full[i] - half[i];
    const double shift = mean_stderr(diff).first;
    const double decay = std::pow(2.0, 1.0 / m_slowest - 1.0) - 1.0;
    r.mc_mean = mean;
    r.mc_stderr = se;
    r.quadrature_value = quad;
    r.difference = mean - quad;
    r.truncation_allowance = std::fabs(shift) / decay;
    r.mean_tail_mass = mean_stderr(tail).first;
    r.within_3sigma = std::fabs(r.difference) <= 3.0 * se;
    r.within_3sigma_plus_allowance = std::fabs(r.difference) <= 3.0 * se + r.truncation_allowance;
    r.n_mc = n_mc;
    r.k_atoms = k;
    r.seed = seed;
    return r;
}

}  // namespace detail

/// E log sum_i eta_i W_i with W_i = cosh(h + b g_i) against (1/m) log E W^m.
inline McReport smoothing_identity_check(double m, double b, double h, int n_mc, int k_atoms, std::uint64_t seed,
                                         const HermiteRule& rule) {
    detail::check_m(m, "smoothing_identity_check");
    detail::check_atoms(k_atoms, "smoothing_identity_check");
    if (n_mc < 2) throw std::invalid_argument("smoothing_identity_check: need at least 2 replicas");

    const double quad = log_gauss_expect_exp([&](double g) { return m * log_cosh(h + b * g); }, rule) / m;
    const std::size_t half_k = static_cast<std::size_t>(k_atoms / 2);
    std::vector<double> full(n_mc), half(n_mc), tail(n_mc);
    parallel_for(full.size(), [&](std::size_t r) {
        auto rng = make_stream(seed, r, StreamTag::smoothing);
        std::normal_distribution<double> normal;
        detail::LogAtoms atoms;
        detail::draw_log_atoms(m, k_atoms, rng, atoms);
        LogSumExp num, den, num_half, den_half;
        for (std::size_t i = 0; i < atoms.log_x.size(); ++i) {
            const double v = atoms.log_x[i] + log_cosh(h + b * normal(rng));
            num.add(v);
            den.add(atoms.log_x[i]);
            if (i < half_k) {
                num_half.add(v);
                den_half.add(atoms.log_x[i]);
            }
        }
        full[r] = num.value() - den.value();
        half[r] = num_half.value() - den_half.value();
        tail[r] = std::exp(atoms.log_tail - (std::log1p(std::exp(atoms.log_tail - den.value())) + den.value()));
    });
    return detail::summarize(full, half, tail, quad, m, n_mc, k_atoms, seed);
}

/// Two-level cascade estimate of Phi_0(q; m) for a single spin:
///   E log sum_{i0,i1} eta_{i0,i1} cosh(h + beta sqrt(q0) g0_{i0} + beta sqrt(q1-q0) g1_{i0,i1}).
/// At m0 = 0 the outer level is a single plain Gaussian branch.
inline McReport cascade_functional_mc(const one_rsb::OneRsbPoint& x, const ModelParams& p, int n_mc, int k_atoms,
                                      std::uint64_t seed, const HermiteRule& rule) {
    x.validate();
    p.validate();
    if (!(x.m1 > 0.0 && x.m1 < 1.0)) throw std::invalid_argument("cascade_functional_mc: m1 must lie in (0, 1)");
    if (x.m0 < 0.0 || x.m0 > x.m1) throw std::invalid_argument("cascade_functional_mc: requires 0 <= m0 <= m1");
    detail::check_atoms(k_atoms, "cascade_functional_mc");
    if (n_mc < 2) throw std::invalid_argument("cascade_functional_mc: need at least 2 replicas");

    const double quad = one_rsb::phi0(x, p, rule);
    const double s0 = p.beta * std::sqrt(x.q0);
    const double s1 = p.beta * std::sqrt(x.q1 - x.q0);
    const std::size_t k = static_cast<std::size_t>(k_atoms);
    const std::size_t half_k = k / 2;
    std::vector<double> full(n_mc), half(n_mc), tail(n_mc);

    parallel_for(full.size(), [&](std::size_t r) {
        auto rng = make_stream(seed, r, StreamTag::cascade);
        std::normal_distribution<double> normal;
        detail::LogAtoms inner;

        // Inner level for one outer branch: log sum_j x_j W_j, log sum_j x_j,
        // over all k atoms and over the first k/2.
        struct Branch {
            double num, den, num_half, den_half, tail;
        };
        auto branch = [&](double g0) {
            detail::draw_log_atoms(x.m1, k_atoms, rng, inner);
            const double base = p.h + s0 * g0;
            LogSumExp num, den, num_h, den_h;
            for (std::size_t j = 0; j < k; ++j) {
                const double v = inner.log_x[j] + log_cosh(base + s1 * normal(rng));
                num.add(v);
                den.add(inner.log_x[j]);
                if (j < half_k) {
                    num_h.add(v);
                    den_h.add(inner.log_x[j]);
                }
            }
            const double d = den.value();
            const double t = std::exp(inner.log_tail - (std::log1p(std::exp(inner.log_tail - d)) + d));
            return Branch{num.value(), d, num_h.value(), den_h.value(), t};
        };

        if (x.m0 == 0.0) {
            const Branch b = branch(normal(rng));
            full[r] = b.num - b.den;
            half[r] = b.num_half - b.den_half;
            tail[r] = b.tail;
            return;
        }

        detail::LogAtoms outer;
        detail::draw_log_atoms(x.m0, k_atoms, rng, outer);
        LogSumExp num, den, num_h, den_h;
        double tail_acc = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const Branch b = branch(normal(rng));
            num.add(outer.log_x[i] + b.num);
            den.add(outer.log_x[i] + b.den);
            if (i < half_k) {
                num_h.add(outer.log_x[i] + b.num_half);
                den_h.add(outer.log_x[i] + b.den_half);
            }
            tail_acc += b.tail;
        }
        full[r] = num.value() - den.value();
        half[r] = num_h.value() - den_h.value();
        const double lx = log_sum_exp(outer.log_x);
        const double outer_tail = std::exp(outer.log_tail - (std::log1p(std::exp(outer.log_tail - lx)) + lx));
        tail[r] = outer_tail + tail_acc / static_cast<double>(k);
    });
    return detail::summarize(full, half, tail, quad, x.m1, n_mc, k_atoms, seed);
}

}  // namespace skgibbs::cascades

#endif  // SKGIBBS_CASCADES_HPP
