#pragma once

#include "eigenmoment/bounds.hpp"
#include "eigenmoment/comparison.hpp"
#include "eigenmoment/growth.hpp"
#include "eigenmoment/io.hpp"
#include "eigenmoment/moments.hpp"
#include "eigenmoment/warping.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace eigenmoment::cli {

enum class Command { lambda1, moments, bounds, build_comparison, check_balance, sweep, reconcile };

inline std::optional<Command> parse_command(const std::string& name) {
    if (name == "lambda1") return Command::lambda1;
    if (name == "moments") return Command::moments;
    if (name == "bounds") return Command::bounds;
    if (name == "build-comparison") return Command::build_comparison;
    if (name == "check-balance") return Command::check_balance;
    if (name == "sweep") return Command::sweep;
    if (name == "reconcile") return Command::reconcile;
    return std::nullopt;
}

/// Radius sweep start:stop:step, all endpoints inclusive.
struct SweepRange {
    double start = 0.0, stop = 0.0, step = 0.0;

    std::vector<double> radii() const {
        std::vector<double> out;
        for (double r = start; r <= stop + 1e-12 * step; r += step) out.push_back(r);
        return out;
    }
};

/// One resolved run: command, space or spec descriptor, numerics, output.
struct RunConfig {
    Command command = Command::lambda1;
    std::optional<double> space_form_b;
    std::optional<std::string> warping_file;
    std::optional<std::string> spec_file;
    int dim = 3;
    double radius = 1.0;
    double h_sup = 0.0;
    double tol = kDefaultTolerance;
    int k_max = kDefaultMaxDepth;
    int grid_n = kDefaultGridSize;
    bool strict_balance = false;
    int k_small = 10;
    std::optional<SweepRange> sweep;
    std::string output = ".";

    void validate() const {
        if (!(tol > 0.0)) throw ConfigError("tol must be positive");
        if (k_max < 2) throw ConfigError("k_max must be at least 2");
        if (grid_n < 17) throw ConfigError("grid_n must be at least 17");
    }
};

inline SweepRange parse_sweep_range(const std::string& text) {
    SweepRange range;
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw ConfigError("sweep range must be start:stop:step, got \"" + text + "\"");
    try {
        range.start = std::stod(text.substr(0, c1));
        range.stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        range.step = std::stod(text.substr(c2 + 1));
    } catch (const std::exception&) {
        throw ConfigError("sweep range has non-numeric parts: \"" + text + "\"");
    }
    if (!(range.step > 0.0) || !(range.stop >= range.start))
        throw ConfigError("sweep range must satisfy start <= stop, step > 0");
    return range;
}

/// Merge settings from a JSON config file; command-line flags override later.
inline void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    io::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("config file " + path.string() + ": " + e.what());
    }
    if (j.contains("command")) {
        auto cmd = parse_command(j.at("command").get<std::string>());
        if (!cmd) throw ConfigError("unknown command in config file");
        config.command = *cmd;
    }
    if (j.contains("b")) config.space_form_b = j.at("b").get<double>();
    if (j.contains("warping_file")) config.warping_file = j.at("warping_file").get<std::string>();
    if (j.contains("spec_file")) config.spec_file = j.at("spec_file").get<std::string>();
    if (j.contains("dim")) config.dim = j.at("dim").get<int>();
    if (j.contains("radius")) config.radius = j.at("radius").get<double>();
    if (j.contains("h_sup")) config.h_sup = j.at("h_sup").get<double>();
    if (j.contains("tol")) config.tol = j.at("tol").get<double>();
    if (j.contains("k_max")) config.k_max = j.at("k_max").get<int>();
    if (j.contains("grid_n")) config.grid_n = j.at("grid_n").get<int>();
    if (j.contains("strict")) config.strict_balance = j.at("strict").get<bool>();
    if (j.contains("k_small")) config.k_small = j.at("k_small").get<int>();
    if (j.contains("sweep")) config.sweep = parse_sweep_range(j.at("sweep").get<std::string>());
    if (j.contains("output")) config.output = j.at("output").get<std::string>();
}

namespace detail {

inline WarpingFunction resolve_warping(const RunConfig& config, double needed_radius) {
    if (config.warping_file) {
        std::ifstream in(*config.warping_file);
        if (!in) throw ConfigError("cannot read warping file " + *config.warping_file);
        io::json j;
        in >> j;
        return io::load_warping(j);
    }
    const double b = config.space_form_b.value_or(0.0);
    return space_form_warping(CurvatureConstant{b}, std::max(kDefaultDomainCap, 2.0 * needed_radius));
}

inline ModelSpace resolve_space(const RunConfig& config) {
    return ModelSpace(config.dim, resolve_warping(config, config.radius), config.radius);
}

inline ComparisonSpaceSpec resolve_spec(const RunConfig& config) {
    if (config.spec_file) {
        std::ifstream in(*config.spec_file);
        if (!in) throw ConfigError("cannot read spec file " + *config.spec_file);
        io::json j;
        in >> j;
        return io::load_comparison_spec(j);
    }
    // degenerate preset: g = 1, h constant (default 0) over the chosen space form
    return ComparisonSpaceSpec{resolve_warping(config, config.radius),
                               BoundingFunctions{BoundingFunction::one(),
                                                 BoundingFunction::constant(config.h_sup)},
                               config.dim, config.radius};
}

inline int worker_count() {
    if (const char* env = std::getenv("EIGENMOMENT_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

} // namespace detail

/**
 * @brief Execute a resolved run and write its artifacts.
 *
 * Exit status: 0 on success, 2 on infeasible hypotheses or unbalanced
 * comparison spaces, 1 on numerical failure.
 */
inline int run(const RunConfig& config) {
    config.validate();
    namespace fs = std::filesystem;
    const fs::path out_dir(config.output);
    fs::create_directories(out_dir);

    switch (config.command) {
    case Command::lambda1: {
        const ModelSpace space = detail::resolve_space(config);
        MomentHierarchy hierarchy(space, config.grid_n);
        EigenEstimate est = [&] {
            try {
                return lambda1_sandwich(space, config.tol, config.k_max, config.grid_n);
            } catch (NotConverged& nc) {
                std::cerr << "warning: " << nc.what() << "\n";
                return std::move(nc.partial);
            }
        }();
        hierarchy.extend(est.iterations);
        io::write_json(io::estimate_to_json(est), out_dir / "lambda1.json");
        io::write_moments_csv(hierarchy, out_dir / "moments.csv");
        io::write_profile_csv({"g"}, {&est.eigenfunction}, out_dir / "eigenfunction.csv");
        io::write_plot_script(out_dir / "lambda1.gp", "moments.csv",
                              {{2, "rho_k"}, {3, "sigma_k"}}, "k", "sandwich quotients");
        return est.converged ? 0 : 1;
    }
    case Command::moments: {
        const ModelSpace space = detail::resolve_space(config);
        const MomentHierarchy hierarchy = build_hierarchy(space, config.k_max, config.grid_n);
        io::write_moments_csv(hierarchy, out_dir / "moments.csv");
        io::write_plot_script(out_dir / "moments.gp", "moments.csv",
                              {{2, "rho_k"}, {3, "sigma_k"}, {4, "ln A_k"}}, "k",
                              "moment quotients");
        return 0;
    }
    case Command::bounds: {
        if (!config.space_form_b)
            throw ConfigError("bounds needs a space-form curvature (--space-form)");
        const BoundsReport report =
            bounds_report(CurvatureConstant{*config.space_form_b}, config.dim, config.radius,
                          config.h_sup, config.tol, config.k_max, config.grid_n);
        io::write_json(io::bounds_to_json(report), out_dir / "bounds.json");
        return report.consistent ? 0 : 1;
    }
    case Command::build_comparison: {
        const ComparisonSpaceSpec spec = detail::resolve_spec(config);
        const ComparisonSpaceResult built = build_comparison_space(spec, config.grid_n);
        const RadialGrid& grid = built.lambda_profile.grid;
        std::vector<double> wos(static_cast<std::size_t>(grid.count()));
        for (int i = 0; i < grid.count(); ++i)
            wos[static_cast<std::size_t>(i)] = built.model.warping.value(built.stretch[i]);
        const RadialSamples w_composed(grid, std::move(wos));
        io::write_profile_csv({"s", "lambda", "z", "W_of_s"},
                              {&built.stretch, &built.lambda_profile, &built.log_ratio, &w_composed},
                              out_dir / "comparison_profile.csv");
        const BalanceReport balance = balance_check(built, spec, config.strict_balance);
        io::json j{{"stretched_radius", built.stretched_radius},
                   {"W_prime_origin", built.model.warping.deriv(0.0)},
                   {"balance", io::balance_to_json(balance)}};
        io::write_json(j, out_dir / "comparison.json");
        io::write_plot_script(out_dir / "comparison.gp", "comparison_profile.csv",
                              {{2, "s(r)"}, {5, "W(s(r))"}}, "r", "comparison space profiles");
        return 0;
    }
    case Command::check_balance: {
        const ComparisonSpaceSpec spec = detail::resolve_spec(config);
        const ComparisonSpaceResult built = build_comparison_space(spec, config.grid_n);
        const BalanceReport balance = balance_check(built, spec, config.strict_balance);
        const ConvexityReport convexity =
            transplanted_convexity_check(built, spec, config.k_small, false);
        io::json j{{"balance", io::balance_to_json(balance)},
                   {"convexity",
                    io::json{{"checked", convexity.checked},
                             {"holds", convexity.holds},
                             {"worst_defect", convexity.worst_defect},
                             {"worst_k", convexity.worst_k},
                             {"worst_radius", convexity.worst_radius},
                             {"diagnostic", convexity.diagnostic}}}};
        io::write_json(j, out_dir / "balance.json");
        std::cout << "balanced: " << (balance.balanced ? "true" : "false") << "\n";
        return balance.balanced ? 0 : 2;
    }
    case Command::sweep: {
        if (!config.sweep) throw ConfigError("sweep needs --radius start:stop:step");
        const std::vector<double> radii = config.sweep->radii();
        const double b = config.space_form_b.value_or(0.0);
        struct Row {
            double R, lambda_lo, lambda_hi;
            std::optional<double> mckean, cheung_leung, bessa_montenegro;
        };
        std::vector<Row> rows(radii.size());
        const int workers = std::min<int>(detail::worker_count(), static_cast<int>(radii.size()));
        std::atomic<std::size_t> cursor{0};
        auto work = [&]() {
            for (;;) {
                const std::size_t i = cursor.fetch_add(1);
                if (i >= radii.size()) return;
                const double R = radii[i];
                ModelSpace space(config.dim,
                                 space_form_warping(CurvatureConstant{b},
                                                    std::max(kDefaultDomainCap, 2.0 * R)),
                                 R);
                const EigenEstimate est =
                    lambda1_sandwich(space, config.tol, config.k_max, config.grid_n);
                Row row{R, est.lower, est.upper, std::nullopt, std::nullopt, std::nullopt};
                if (b <= 0.0) {
                    row.mckean = mckean_bound(config.dim, CurvatureConstant{b});
                    row.cheung_leung =
                        cheung_leung_bound(config.dim, CurvatureConstant{b}, config.h_sup, R);
                    row.bessa_montenegro =
                        bessa_montenegro_bound(config.dim, CurvatureConstant{b}, R);
                }
                rows[i] = row;
            }
        };
        std::vector<std::thread> pool;
        for (int t = 1; t < workers; ++t) pool.emplace_back(work);
        work();
        for (auto& t : pool) t.join();

        std::ofstream out(out_dir / "sweep.csv");
        if (!out) throw ConfigError("cannot open sweep.csv for writing");
        out << "R,mckean,cheung_leung,bessa_montenegro,lambda_lo,lambda_hi\n";
        auto cell = [&](const std::optional<double>& v) {
            return v ? io::format_double(*v) : std::string();
        };
        for (const Row& row : rows)
            out << io::format_double(row.R) << ',' << cell(row.mckean) << ','
                << cell(row.cheung_leung) << ',' << cell(row.bessa_montenegro) << ','
                << io::format_double(row.lambda_lo) << ',' << io::format_double(row.lambda_hi)
                << '\n';
        io::write_plot_script(out_dir / "sweep.gp", "sweep.csv",
                              {{5, "lambda_lo"}, {6, "lambda_hi"}}, "R",
                              "first eigenvalue over the radius sweep");
        return 0;
    }
    case Command::reconcile: {
        const ModelSpace space = detail::resolve_space(config);
        const EigenEstimate est = lambda1_sandwich(space, config.tol, config.k_max, config.grid_n);
        MomentHierarchy hierarchy(space, config.grid_n);
        hierarchy.extend(std::max(est.iterations, std::max(10, config.k_max / 4)));
        const ReconciliationReport report = reconcile(hierarchy, est);
        const GrowthEstimate verbatim = lambda1_growth(hierarchy, Normalization::analyst);
        io::json j{{"ratio", report.growth.ratio_estimate},
                   {"root", report.growth.root_estimate},
                   {"normalization", to_string(report.growth.normalization)},
                   {"gap_vs_sandwich", report.ratio_gap},
                   {"root_gap_vs_sandwich", report.root_gap},
                   {"flagged", report.flagged},
                   {"verbatim", io::growth_to_json(verbatim)},
                   {"sandwich", io::estimate_to_json(est)}};
        io::write_json(j, out_dir / "reconcile.json");
        return report.flagged ? 1 : 0;
    }
    }
    return 1;
}

/// run() with the documented exit-code mapping for errors.
inline int run_with_status(const RunConfig& config) {
    try {
        return run(config);
    } catch (const InfeasibleHypothesis& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const UnbalancedSpec& e) {
        std::cerr << "unbalanced: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 64;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace eigenmoment::cli
