#ifndef SKGIBBS_TOOLS_CLI_HPP
#define SKGIBBS_TOOLS_CLI_HPP

// Command-line driver: argument parsing, dispatch and output formatting.
// Curves go out as CSV, scalar results as JSON.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "skgibbs/cascades.hpp"
#include "skgibbs/curie_weiss.hpp"
#include "skgibbs/finite_n.hpp"
#include "skgibbs/numeric.hpp"
#include "skgibbs/one_rsb.hpp"
#include "skgibbs/parallel.hpp"
#include "skgibbs/params.hpp"
#include "skgibbs/quadrature.hpp"
#include "skgibbs/rs.hpp"

#ifndef SKGIBBS_VERSION
#define SKGIBBS_VERSION "0.0.0"
#endif

namespace skgibbs::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitNoConvergence = 3;

inline constexpr const char* kCsvHeader = "q,F_rs,G_rs,d2F,d2G";

enum class Command { rs_scan, rs_solve, rsb_solve, cw, finite_n, cascade_check };

inline const char* command_name(Command c) {
    switch (c) {
        case Command::rs_scan: return "rs-scan";
        case Command::rs_solve: return "rs-solve";
        case Command::rsb_solve: return "rsb-solve";
        case Command::cw: return "cw";
        case Command::finite_n: return "finite-n";
        case Command::cascade_check: return "cascade-check";
    }
    return "?";
}

struct RunConfig {
    Command command = Command::rs_solve;
    ModelParams params{};
    rs::GridSpec grid{};
    int quad_order = kDefaultQuadOrder;
    std::uint64_t seed = 42;
    int n_samples = 2000;
    std::string out_path;  // empty: standard output
    int threads = 0;       // 0: environment or hardware default

    double tol = rs::kDefaultTolerance;
    int max_iter = rs::kDefaultMaxIter;
    double fd_step = rs::kDefaultScanStep;
    bool scan_fixed_points = false;

    int m1_grid = 64;
    bool multistart = false;
    bool check_critical = false;

    long n = 12;  // volume for cw and finite-n

    std::string cascade_mode = "smoothing";  // or "functional"
    double pd_m = 0.5;
    double smoothing_b = 0.7;
    int atoms = 2048;
    one_rsb::OneRsbPoint point{0.1, 0.4, 0.3, 0.6};
};

/// Checks the invariants every command relies on.
inline void validate(const RunConfig& c) {
    c.params.validate();
    if (c.grid.points < 2) throw std::invalid_argument("grid needs at least 2 points");
    if (c.quad_order < 1 || c.quad_order > kMaxHermiteOrder)
        throw std::invalid_argument("quad order must lie in [1, 512]");
    if (c.command == Command::finite_n && c.n_samples < 2) throw std::invalid_argument("need at least 2 samples");
    if (!(c.tol > 0.0)) throw std::invalid_argument("tolerance must be > 0");
    if (c.max_iter < 1) throw std::invalid_argument("max-iter must be >= 1");
}

/// "a:b:n" -> GridSpec.
inline rs::GridSpec parse_grid(const std::string& text) {
    rs::GridSpec g;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &g.q_min, &g.q_max, &g.points, &extra) != 3)
        throw std::invalid_argument("grid must look like q_min:q_max:points, got '" + text + "'");
    return g;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline Json metadata(const RunConfig& c, Json tolerances, bool with_seed) {
    Json m;
    m["quad_order"] = c.quad_order;
    m["tolerances"] = std::move(tolerances);
    if (with_seed) m["seed"] = c.seed;
    else m["seed"] = nullptr;
    m["versions"] = {{"skgibbs", SKGIBBS_VERSION}, {"json_schema", 1}};
    return m;
}

inline Json params_json(const ModelParams& p) { return {{"beta", p.beta}, {"h", p.h}}; }

// ---------------------------------------------------------------------------
// Commands. Each returns the text to emit.

inline std::string run_rs_scan(const RunConfig& c, const HermiteRule& rule, Json& sidecar) {
    const auto pts = rs::derivative_scan(rs::ScanTarget::both, c.params, c.grid, rule, c.fd_step);
    std::ostringstream os;
    os << kCsvHeader << '\n';
    for (const auto& p : pts)
        os << format_double(p.q) << ',' << format_double(p.f_rs) << ',' << format_double(p.g_rs) << ','
           << format_double(p.d2_f) << ',' << format_double(p.d2_g) << '\n';
    sidecar["command"] = command_name(c.command);
    sidecar["params"] = params_json(c.params);
    sidecar["grid"] = {{"q_min", c.grid.q_min}, {"q_max", c.grid.q_max}, {"points", c.grid.points}};
    sidecar["columns"] = kCsvHeader;
    sidecar["second_derivative"] = "central difference with one Richardson step";
    sidecar["metadata"] = metadata(c, {{"fd_base_step", c.fd_step}}, false);
    return os.str();
}

inline Json run_rs_solve(const RunConfig& c, const HermiteRule& rule) {
    const auto sol = rs::rs_solution(c.params, rule, c.tol, c.max_iter);
    Json j;
    j["command"] = command_name(c.command);
    j["params"] = params_json(c.params);
    j["q_hat"] = sol.q_hat;
    j["value"] = sol.value;
    j["g_rs_at_q_hat"] = rs::g_rs(sol.q_hat, c.params, rule);
    j["residual"] = sol.residual;
    j["iterations"] = sol.iterations;
    j["used_bisection"] = sol.used_bisection;
    j["at_stability"] = {{"stable", sol.at_stable},
                         {"margin", sol.at_margin},
                         {"criterion", "1 - beta^2 E sech^4(h + beta sqrt(q) g)"},
                         {"source", "external literature (de Almeida-Thouless line)"}};
    if (c.scan_fixed_points) {
        Json roots = Json::array();
        for (double q : rs::scan_fixed_points(c.params, rule)) {
            roots.push_back({{"q", q},
                             {"f_rs", rs::f_rs(q, c.params, rule)},
                             {"at_margin", rs::at_margin_at(q, c.params, rule)}});
        }
        j["fixed_points"] = std::move(roots);
    }
    j["metadata"] = metadata(c, {{"fixed_point", c.tol}}, false);
    return j;
}

inline Json run_rsb_solve(const RunConfig& c, const HermiteRule& rule) {
    one_rsb::SolveOptions opt;
    opt.grid_points = c.m1_grid;
    opt.fixed_point.tol = c.tol;
    opt.fixed_point.max_iter = c.max_iter;
    const auto sol = one_rsb::parisi_1rsb_solve(c.params, rule, opt);
    const auto rs_sol = rs::rs_solution(c.params, rule, c.tol);
    Json j;
    j["command"] = command_name(c.command);
    j["params"] = params_json(c.params);
    j["m1"] = sol.m1;
    j["q0"] = sol.q0;
    j["q1"] = sol.q1;
    j["value"] = sol.value;
    j["residual"] = sol.residual;
    j["rs_value"] = rs_sol.value;
    j["improvement_over_rs"] = rs_sol.value - sol.value;
    j["grid_failures"] = sol.failures;
    Json grid = Json::array();
    for (const auto& e : sol.grid) {
        Json row = {{"m1", e.m1}, {"converged", e.converged}};
        if (e.converged) {
            row["q0"] = e.q0;
            row["q1"] = e.q1;
            row["value"] = e.value;
        }
        grid.push_back(std::move(row));
    }
    j["grid"] = std::move(grid);
    if (c.check_critical) {
        const auto grad = one_rsb::g_1rsb_gradient(sol.q0, sol.q1, sol.m1, c.params, rule);
        j["g_1rsb_gradient_at_fixed_point"] = {{"d_q0", grad[0]},
                                               {"d_q1", grad[1]},
                                               {"note", "reported only; criticality is not asserted"}};
    }
    if (c.multistart) {
        Json basins = Json::array();
        for (const auto& fp : one_rsb::onersb_fixed_points_multistart(sol.m1, c.params, rule)) {
            basins.push_back({{"q0", fp.q0},
                              {"q1", fp.q1},
                              {"value", one_rsb::parisi_1rsb_value(fp.q0, fp.q1, sol.m1, c.params, rule)}});
        }
        j["fixed_points_at_m1"] = std::move(basins);
    }
    j["m0"] = 0.0;
    j["nu_tanh_fourth_power_term"] = {{"reading", "(nu[Tanh])^4"}, {"flagged", false}};
    j["metadata"] = metadata(c, {{"fixed_point", c.tol}, {"m1", opt.m1_tol}}, false);
    return j;
}

inline Json run_cw(const RunConfig& c) {
    const auto sol = cw::cw_free_energy_limit(c.params);
    Json j;
    j["command"] = command_name(c.command);
    j["params"] = params_json(c.params);
    j["m_hat"] = sol.m_hat;
    j["free_energy_limit"] = sol.free_energy;
    j["constraint_ok"] = sol.constraint_ok;
    j["fixed_point_residual"] = std::fabs(sol.m_hat - std::tanh(c.params.beta * sol.m_hat + c.params.h));
    j["n"] = c.n;
    j["free_energy_exact"] = cw::cw_free_energy_exact(c.n, c.params);
    j["metadata"] = metadata(c, {{"fixed_point", 1e-12}}, false);
    return j;
}

inline Json run_finite_n(const RunConfig& c, const HermiteRule& rule) {
    if (c.n < 1 || c.n > finite_n::kMaxVolume) throw std::invalid_argument("n must lie in [1, 24]");
    const auto est = finite_n::quenched_estimate(static_cast<int>(c.n), c.params, c.n_samples, c.seed);
    one_rsb::SolveOptions opt;
    opt.grid_points = c.m1_grid;
    const auto rep = finite_n::bound_check(est, rule, opt);
    Json j;
    j["command"] = command_name(c.command);
    j["params"] = params_json(c.params);
    j["n"] = est.n;
    j["n_samples"] = est.n_samples;
    j["mean"] = est.mean;
    j["stderr"] = est.std_error;
    j["rs_bound"] = rep.rs_bound;
    j["onersb_bound"] = rep.onersb_bound;
    j["onersb_parameters"] = {{"m1", rep.onersb_m1}, {"q0", rep.onersb_q0}, {"q1", rep.onersb_q1}};
    j["margins"] = {{"rs", rep.rs_margin}, {"onersb", rep.onersb_margin}};
    j["flags"] = {{"rs_bound_ok", rep.rs_ok}, {"onersb_bound_ok", rep.onersb_ok}};
    j["check"] = "infinite-volume bound compared with a finite-N estimate: mean <= bound + 3 stderr";
    j["metadata"] = metadata(c, {{"fixed_point", 1e-12}, {"bound_sigma", 3}}, true);
    return j;
}

inline Json mc_json(const cascades::McReport& r) {
    return {{"mc_mean", r.mc_mean},
            {"mc_stderr", r.mc_stderr},
            {"quadrature_value", r.quadrature_value},
            {"difference", r.difference},
            {"abs_difference", std::fabs(r.difference)},
            {"truncation_allowance", r.truncation_allowance},
            {"mean_tail_mass", r.mean_tail_mass},
            {"within_3sigma", r.within_3sigma},
            {"within_3sigma_plus_allowance", r.within_3sigma_plus_allowance},
            {"n_mc", r.n_mc},
            {"k_atoms", r.k_atoms}};
}

inline Json run_cascade_check(const RunConfig& c, const HermiteRule& rule) {
    Json j;
    j["command"] = command_name(c.command);
    j["mode"] = c.cascade_mode;
    if (c.cascade_mode == "smoothing") {
        const auto r = cascades::smoothing_identity_check(c.pd_m, c.smoothing_b, c.params.h, c.n_samples, c.atoms,
                                                          c.seed, rule);
        j["m"] = c.pd_m;
        j["b"] = c.smoothing_b;
        j["h"] = c.params.h;
        j["report"] = mc_json(r);
    } else if (c.cascade_mode == "functional") {
        const auto r = cascades::cascade_functional_mc(c.point, c.params, c.n_samples, c.atoms, c.seed, rule);
        j["params"] = params_json(c.params);
        j["point"] = {{"q0", c.point.q0}, {"q1", c.point.q1}, {"m0", c.point.m0}, {"m1", c.point.m1}};
        j["report"] = mc_json(r);
    } else {
        throw std::invalid_argument("cascade mode must be 'smoothing' or 'functional'");
    }
    j["metadata"] = metadata(c, {{"sigma", 3}}, true);
    return j;
}

inline void emit(const RunConfig& c, const std::string& text, std::ostream& out) {
    if (c.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(c.out_path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file '" + c.out_path + "'");
    f << text;
    if (!f) throw std::invalid_argument("failed writing '" + c.out_path + "'");
}

/// Executes a validated configuration. Returns the process exit status;
/// error messages go to `err`.
inline int run(const RunConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    try {
        validate(c);
        if (c.threads > 0) set_thread_count(c.threads);
        const HermiteRule rule = hermite_rule(c.quad_order);
        std::string text;
        switch (c.command) {
            case Command::rs_scan: {
                Json sidecar;
                text = run_rs_scan(c, rule, sidecar);
                if (!c.out_path.empty()) {
                    RunConfig meta = c;
                    meta.out_path = c.out_path + ".meta.json";
                    emit(meta, sidecar.dump(2) + "\n", out);
                }
                break;
            }
            case Command::rs_solve: text = run_rs_solve(c, rule).dump(2) + "\n"; break;
            case Command::rsb_solve: text = run_rsb_solve(c, rule).dump(2) + "\n"; break;
            case Command::cw: text = run_cw(c).dump(2) + "\n"; break;
            case Command::finite_n: text = run_finite_n(c, rule).dump(2) + "\n"; break;
            case Command::cascade_check: text = run_cascade_check(c, rule).dump(2) + "\n"; break;
        }
        emit(c, text, out);
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const NoConvergenceError& e) {
        err << "no convergence: " << e.what() << " (last iterate " << e.last_iterate() << ", residual "
            << e.residual() << ")\n";
        return kExitNoConvergence;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNoConvergence;
    }
}

struct ParseOutcome {
    std::optional<RunConfig> config;
    int exit_code = kExitOk;
};

/// Parses argv into a RunConfig. On --help or a parse error, config is empty
/// and exit_code holds the status to return.
inline ParseOutcome parse_args(int argc, const char* const* argv, std::ostream& out = std::cout,
                               std::ostream& err = std::cerr) {
    RunConfig c;
    c.quad_order = default_quad_order();

    CLI::App app{"Variational functionals of the SK model: RS and 1RSB Gibbs potentials, "
                 "finite-N bounds and cascade checks"};
    app.set_help_flag("--help", "print this help and exit");
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("skgibbs ") + SKGIBBS_VERSION);

    std::string grid_text = "0.005:0.995:199";
    long seed = 42;
    // Subcommands with differing defaults get their own storage; CLI11 writes
    // defaults at registration time.
    int cw_n = 1000, fin_n = 12, fin_samples = 2000, cas_mc = 20000;
    double cas_beta = 1.0, cas_h = 0.2;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--beta", c.params.beta, "inverse temperature")->required();
        sub->add_option("--h", c.params.h, "external field")->default_val(0.0);
        sub->add_option("--quad-order", c.quad_order, "Gauss-Hermite order (env SKGIBBS_QUAD_ORDER)");
        sub->add_option("--threads", c.threads, "worker threads (env SKGIBBS_THREADS)");
        sub->add_option("--out", c.out_path, "output file (default: stdout)");
    };

    auto* scan = app.add_subcommand("rs-scan", "F_rs/G_rs values and second derivatives on a q-grid (CSV)");
    common(scan);
    scan->add_option("--grid", grid_text, "q_min:q_max:points")->default_val(grid_text);
    scan->add_option("--step", c.fd_step, "base finite-difference step")->default_val(c.fd_step);

    auto* rs_solve = app.add_subcommand("rs-solve", "RS fixed point, RS value and AT diagnostic (JSON)");
    common(rs_solve);
    rs_solve->add_option("--tol", c.tol, "fixed-point tolerance")->default_val(c.tol);
    rs_solve->add_option("--max-iter", c.max_iter, "iteration cap")->default_val(c.max_iter);
    rs_solve->add_flag("--scan-fixed-points", c.scan_fixed_points, "bracket every root of q - T(q)");

    auto* rsb = app.add_subcommand("rsb-solve", "1RSB fixed points and minimization over m1 (JSON)");
    common(rsb);
    rsb->add_option("--tol", c.tol, "fixed-point tolerance")->default_val(c.tol);
    rsb->add_option("--max-iter", c.max_iter, "iteration cap per fixed point")->default_val(c.max_iter);
    rsb->add_option("--m1-grid", c.m1_grid, "number of m1 grid points")->default_val(c.m1_grid);
    rsb->add_flag("--multistart", c.multistart, "report distinct fixed points at the optimal m1");
    rsb->add_flag("--check-critical", c.check_critical, "finite-difference gradient of G_1rsb at the solution");

    auto* cw_cmd = app.add_subcommand("cw", "Curie-Weiss limit and exact finite-N free energy (JSON)");
    common(cw_cmd);
    cw_cmd->add_option("--n", cw_n, "volume for the exact free energy")->default_val(1000);

    auto* fin = app.add_subcommand("finite-n", "quenched finite-N free energy vs RS/1RSB bounds (JSON)");
    common(fin);
    fin->add_option("--n", fin_n, "volume (<= 24)")->default_val(12);
    fin->add_option("--samples", fin_samples, "disorder samples")->default_val(2000);
    fin->add_option("--seed", seed, "master seed")->default_val(42);
    fin->add_option("--m1-grid", c.m1_grid, "number of m1 grid points")->default_val(c.m1_grid);

    auto* cas = app.add_subcommand("cascade-check", "Monte Carlo checks of the cascade representation (JSON)");
    cas->add_option("--mode", c.cascade_mode, "smoothing | functional")->default_val("smoothing");
    cas->add_option("--beta", cas_beta, "inverse temperature (functional mode)")->default_val(1.0);
    cas->add_option("--h", cas_h, "external field")->default_val(0.2);
    cas->add_option("--m", c.pd_m, "PD parameter (smoothing mode)")->default_val(0.5);
    cas->add_option("--b", c.smoothing_b, "Gaussian scale (smoothing mode)")->default_val(0.7);
    cas->add_option("--q0", c.point.q0)->default_val(0.1);
    cas->add_option("--q1", c.point.q1)->default_val(0.4);
    cas->add_option("--m0", c.point.m0)->default_val(0.3);
    cas->add_option("--m1", c.point.m1)->default_val(0.6);
    cas->add_option("--mc", cas_mc, "Monte Carlo replicas")->default_val(20000);
    cas->add_option("--atoms", c.atoms, "atoms kept per level")->default_val(2048);
    cas->add_option("--seed", seed, "master seed")->default_val(42);
    cas->add_option("--quad-order", c.quad_order, "Gauss-Hermite order (env SKGIBBS_QUAD_ORDER)");
    cas->add_option("--threads", c.threads, "worker threads (env SKGIBBS_THREADS)");
    cas->add_option("--out", c.out_path, "output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return {std::nullopt, code == 0 ? kExitOk : kExitInvalidConfig};
    }

    if (*scan) {
        c.command = Command::rs_scan;
        try {
            c.grid = parse_grid(grid_text);
        } catch (const std::invalid_argument& e) {
            err << "error: " << e.what() << '\n';
            return {std::nullopt, kExitInvalidConfig};
        }
    } else if (*rs_solve) {
        c.command = Command::rs_solve;
    } else if (*rsb) {
        c.command = Command::rsb_solve;
    } else if (*cw_cmd) {
        c.command = Command::cw;
        c.n = cw_n;
    } else if (*fin) {
        c.command = Command::finite_n;
        c.n = fin_n;
        c.n_samples = fin_samples;
    } else {
        c.command = Command::cascade_check;
        c.params = {cas_beta, cas_h};
        c.n_samples = cas_mc;
    }
    if (seed < 0) {
        err << "error: seed must be nonnegative\n";
        return {std::nullopt, kExitInvalidConfig};
    }
    c.seed = static_cast<std::uint64_t>(seed);
    return {c, kExitOk};
}

/// parse_args + run.
inline int main_entry(int argc, const char* const* argv, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
    auto parsed = parse_args(argc, argv, out, err);
    if (!parsed.config) return parsed.exit_code;
    return run(*parsed.config, out, err);
}

}  // namespace skgibbs::cli

#endif  // SKGIBBS_TOOLS_CLI_HPP
