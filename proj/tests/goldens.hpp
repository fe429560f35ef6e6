#ifndef SKGIBBS_TESTS_GOLDENS_HPP
#define SKGIBBS_TESTS_GOLDENS_HPP

// Frozen reference values. Everything except the finite-N pair comes from
// tests/oracles/goldens.py (mpmath adaptive quadrature and bisection for
// one-dimensional quantities, an order-241 numpy Hermite rule with scipy root
// finding for nested ones). The finite-N pair is a recorded reference run.

namespace golden {

inline constexpr double kRate05 = 0.13081203594113696;
inline constexpr double kCwMBeta2 = 0.95750402407726874;
inline constexpr double kCwLimitBeta2 = 0.32652388742692387;

inline constexpr double kTOverlapB1H02Q05 = 0.28653626539564044;
inline constexpr double kFRsB09H02Q03 = 0.22577107876011193;
inline constexpr double kGRsB115H02Q01 = 0.34761709781357945;
inline constexpr double kFRsB115H02Q01 = 0.34795741275468369;
inline constexpr double kRsQB09H02 = 0.099798663989504145;
inline constexpr double kRsValueB09H02 = 0.22153232252827526;
inline constexpr double kRsQB13H02 = 0.27604255255933471;
inline constexpr double kRsValueB13H02 = 0.43340298499952687;
/// Positive: (1.3, 0.2) lies on the stable side of the AT line.
inline constexpr double kAtMarginB13H02 = 0.0035768099790357719;

// inner_stats at g0 = 0, (beta, h) = (1, 0.2), x = (0.1, 0.4, 0, 0.5)
inline constexpr double kInnerNu1Tanh = 0.17669503475123932;
inline constexpr double kInnerNu1Tanh2 = 0.23651972733522447;
inline constexpr double kInnerF0 = 0.15883872630629803;
// nu0-average of f0 at (beta, h) = (1, 0.2), x = (0.1, 0.4, 0.3, 0.5)
inline constexpr double kOuterF0M03 = 0.20263415865487194;
// qstar_map at (beta, h) = (1.3, 0.2), x = (0.1, 0.4, 0, 0.5)
inline constexpr double kQStarQ0 = -0.050287780614920834;
inline constexpr double kQStarQ1 = 0.68417149281330969;
// g_1rsb at (beta, h) = (1.3, 0.2), x = (0.05, 0.35, 0, 0.4)
inline constexpr double kG1rsbRef = 0.43418710434750668;
// 1RSB fixed point at (beta, h) = (1.3, 0.2), m1 = 0.5: collapses onto the RS overlap.
inline constexpr double kOneRsbQ0M05 = 0.27604255255932397;
inline constexpr double kOneRsbQ1M05 = 0.2760425525593454;
inline constexpr double kOneRsbValueM05 = 0.43340298499952673;
/// RS value minus the 1RSB minimum at (1.3, 0.2).
inline constexpr double kImprovementMarginB13H02 = 3.4416913763379853e-15;
// 1RSB minimum at (beta, h) = (2, 0), attained near m1 = 0.2818.
inline constexpr double kOneRsbBestValueB2H0 = 0.8892705041984855;

// quenched_estimate(12, (0.6, 0.2), 2000, seed 42)
inline constexpr double kFiniteNMean = 0.10032335599309503;
inline constexpr double kFiniteNStderr = 0.000352682720773476;

}  // namespace golden

#endif  // SKGIBBS_TESTS_GOLDENS_HPP
