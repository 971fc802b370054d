// Command-line frontend for the eigenmoment library: computes exit-time
// moment spectra, sandwich eigenvalue estimates, comparison spaces and
// closed-form bounds, emitting CSV/JSON artifacts and gnuplot scripts.

#include "eigenmoment/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

using eigenmoment::cli::Command;
using eigenmoment::cli::RunConfig;

// Accept "-1", "b=-1" and similar for the space-form flag.
double parse_curvature(const std::string& text) {
    std::string t = text;
    if (t.rfind("b=", 0) == 0) t = t.substr(2);
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw CLI::ValidationError("--space-form expects a curvature value, got \"" + text + "\"");
    }
}

void add_common(CLI::App* cmd, RunConfig& config, std::string& config_file,
                std::string& space_form, bool with_space = true) {
    cmd->add_option("--config", config_file, "JSON config file; flags override its values");
    if (with_space) {
        cmd->add_option("--space-form", space_form, "space-form curvature b (accepts '-1' or 'b=-1')");
        cmd->add_option("--warping", config.warping_file, "warping profile JSON file");
        cmd->add_option("--dim,-m", config.dim, "model dimension (>= 2)");
        cmd->add_option("--radius,-R", config.radius, "ball radius");
    }
    cmd->add_option("--tol", config.tol, "relative sandwich tolerance");
    cmd->add_option("--k-max", config.k_max, "maximum hierarchy depth");
    cmd->add_option("--grid-n", config.grid_n, "radial grid nodes");
    cmd->add_option("--output,-o", config.output, "output directory");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exit-time moment spectra and first Dirichlet eigenvalues of geodesic balls"};
    app.require_subcommand(1);

    RunConfig config;
    std::string config_file, space_form, sweep_range;

    auto* lambda1 = app.add_subcommand("lambda1", "two-sided estimate of the first eigenvalue");
    add_common(lambda1, config, config_file, space_form);

    auto* moments = app.add_subcommand("moments", "moment quotient sequences up to k_max");
    add_common(moments, config, config_file, space_form);

    auto* bounds = app.add_subcommand("bounds", "closed-form bounds around the sandwich estimate");
    add_common(bounds, config, config_file, space_form);
    bounds->add_option("--h-sup", config.h_sup, "mean-curvature bound h_sup");

    auto* build = app.add_subcommand("build-comparison", "compile a comparison space");
    add_common(build, config, config_file, space_form);
    build->add_option("--spec", config.spec_file, "comparison spec JSON file");
    build->add_option("--h-sup", config.h_sup, "constant curvature bound for the degenerate preset");

    auto* balance = app.add_subcommand("check-balance", "balance and convexity verification");
    add_common(balance, config, config_file, space_form);
    balance->add_option("--spec", config.spec_file, "comparison spec JSON file");
    balance->add_option("--h-sup", config.h_sup, "constant curvature bound for the degenerate preset");
    balance->add_flag("--strict", config.strict_balance, "require strict inequality everywhere");
    balance->add_option("--k-small", config.k_small, "transplant convexity depth (<= 10)");

    auto* sweep = app.add_subcommand("sweep", "eigenvalue estimates over a radius sweep");
    sweep->add_option("--config", config_file, "JSON config file; flags override its values");
    sweep->add_option("--space-form", space_form, "space-form curvature b");
    sweep->add_option("--dim,-m", config.dim, "model dimension");
    sweep->add_option("--radius,-R", sweep_range, "radius sweep start:stop:step")->required();
    sweep->add_option("--h-sup", config.h_sup, "mean-curvature bound for the closed-form columns");
    sweep->add_option("--tol", config.tol, "relative sandwich tolerance");
    sweep->add_option("--k-max", config.k_max, "maximum hierarchy depth");
    sweep->add_option("--grid-n", config.grid_n, "radial grid nodes");
    sweep->add_option("--output,-o", config.output, "output directory");

    auto* rec = app.add_subcommand("reconcile", "growth-rate extraction vs sandwich estimate");
    add_common(rec, config, config_file, space_form);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }

    try {
        // config file first, then flags that were actually given
        if (!config_file.empty()) {
            RunConfig merged;
            eigenmoment::cli::apply_config_file(merged, config_file);
            auto* sub = app.get_subcommands().front();
            auto passed = [&](const char* name) {
                auto* opt = sub->get_option_no_throw(name);
                return opt && opt->count() > 0;
            };
            if (passed("--warping")) merged.warping_file = config.warping_file;
            if (passed("--spec")) merged.spec_file = config.spec_file;
            if (passed("--dim")) merged.dim = config.dim;
            if (passed("--radius") && sweep_range.empty()) merged.radius = config.radius;
            if (passed("--h-sup")) merged.h_sup = config.h_sup;
            if (passed("--tol")) merged.tol = config.tol;
            if (passed("--k-max")) merged.k_max = config.k_max;
            if (passed("--grid-n")) merged.grid_n = config.grid_n;
            if (passed("--strict")) merged.strict_balance = config.strict_balance;
            if (passed("--k-small")) merged.k_small = config.k_small;
            if (passed("--output")) merged.output = config.output;
            config = merged;
        }

        if (lambda1->parsed()) config.command = Command::lambda1;
        if (moments->parsed()) config.command = Command::moments;
        if (bounds->parsed()) config.command = Command::bounds;
        if (build->parsed()) config.command = Command::build_comparison;
        if (balance->parsed()) config.command = Command::check_balance;
        if (sweep->parsed()) config.command = Command::sweep;
        if (rec->parsed()) config.command = Command::reconcile;

        if (!space_form.empty()) config.space_form_b = parse_curvature(space_form);
        if (!sweep_range.empty()) config.sweep = eigenmoment::cli::parse_sweep_range(sweep_range);

        return eigenmoment::cli::run_with_status(config);
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return 64;
    } catch (const eigenmoment::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 64;
    } catch (const eigenmoment::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
