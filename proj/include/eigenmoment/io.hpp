#pragma once

#include "eigenmoment/bounds.hpp"
#include "eigenmoment/comparison.hpp"
#include "eigenmoment/errors.hpp"
#include "eigenmoment/growth.hpp"
#include "eigenmoment/moments.hpp"
#include "eigenmoment/warping.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace eigenmoment::io {

using nlohmann::json;

/// Shortest round-tripping decimal form of a double.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    double parsed = 0.0;
    std::sscanf(buf, "%lf", &parsed);
    if (parsed == v) {
        for (int prec = 1; prec < 17; ++prec) {
            char shorter[32];
            std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
            std::sscanf(shorter, "%lf", &parsed);
            if (parsed == v) return shorter;
        }
    }
    return buf;
}

/**
 * @brief Load a warping profile from JSON.
 *
 * { "kind": "space_form", "b": -1.0 }  or
 * { "kind": "tabulated", "samples": [[r, w], ...] }.
 */
inline WarpingFunction load_warping(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw ConfigError("warping document needs a \"kind\" field");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "space_form") {
        if (!j.contains("b")) throw ConfigError("space_form warping needs field \"b\"");
        return space_form_warping(CurvatureConstant{j.at("b").get<double>()});
    }
    if (kind == "tabulated") {
        if (!j.contains("samples")) throw ConfigError("tabulated warping needs field \"samples\"");
        std::vector<std::array<double, 2>> samples;
        for (const auto& row : j.at("samples")) {
            if (!row.is_array() || row.size() != 2)
                throw ConfigError("tabulated samples must be [r, w] pairs");
            samples.push_back({row[0].get<double>(), row[1].get<double>()});
        }
        return tabulated_warping(samples);
    }
    throw ConfigError("unknown warping kind \"" + kind + "\"");
}

/**
 * @brief Load a bounding function from JSON.
 *
 * Accepts {"kind": "constant", "value": c}, the presets {"kind": "one"} /
 * {"kind": "zero"}, or {"kind": "tabulated", "samples": [[r, v], ...]}.
 */
inline BoundingFunction load_bounding_function(const json& j) {
    if (j.is_number()) return BoundingFunction::constant(j.get<double>());
    if (j.is_string()) {
        const std::string name = j.get<std::string>();
        if (name == "one") return BoundingFunction::one();
        if (name == "zero") return BoundingFunction::zero();
        throw ConfigError("unknown bounding preset \"" + name + "\"");
    }
    if (!j.is_object() || !j.contains("kind"))
        throw ConfigError("bounding function needs a \"kind\" field");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") return BoundingFunction::constant(j.at("value").get<double>());
    if (kind == "one") return BoundingFunction::one();
    if (kind == "zero") return BoundingFunction::zero();
    if (kind == "tabulated") {
        std::vector<std::array<double, 2>> samples;
        for (const auto& row : j.at("samples"))
            samples.push_back({row[0].get<double>(), row[1].get<double>()});
        return BoundingFunction::tabulated(samples);
    }
    throw ConfigError("unknown bounding kind \"" + kind + "\"");
}

/// Load { "w": {...}, "g": {...}, "h": {...}, "m": 3, "R": 2.0 }.
inline ComparisonSpaceSpec load_comparison_spec(const json& j) {
    for (const char* field : {"w", "g", "h", "m", "R"})
        if (!j.contains(field))
            throw ConfigError(std::string("comparison spec needs field \"") + field + "\"");
    return ComparisonSpaceSpec{load_warping(j.at("w")),
                               BoundingFunctions{load_bounding_function(j.at("g")),
                                                 load_bounding_function(j.at("h"))},
                               j.at("m").get<int>(), j.at("R").get<double>()};
}

/// CSV of the quotient sequences: header k,rho_k,sigma_k,ln_A_k.
inline void write_moments_csv(const MomentHierarchy& hierarchy, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
    out << "k,rho_k,sigma_k,ln_A_k\n";
    for (int k = 1; k <= hierarchy.depth(); ++k)
        out << k << ',' << format_double(hierarchy.lower_quotient(k)) << ','
            << format_double(hierarchy.upper_quotient(k)) << ','
            << format_double(hierarchy.log_moment(k)) << '\n';
}

/// CSV of radial profiles: header r,<name> per column.
inline void write_profile_csv(const std::vector<std::string>& names,
                              const std::vector<const RadialSamples*>& columns,
                              const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
    out << "r";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    const RadialGrid& grid = columns.front()->grid;
    for (int i = 0; i < grid.count(); ++i) {
        out << format_double(grid.node(i));
        for (const auto* c : columns) out << ',' << format_double((*c)[i]);
        out << '\n';
    }
}

inline json estimate_to_json(const EigenEstimate& est) {
    return json{{"lambda_lower", est.lower},
                {"lambda_upper", est.upper},
                {"midpoint", est.midpoint()},
                {"relative_width", est.relative_width()},
                {"iterations", est.iterations},
                {"converged", est.converged},
                {"residual_norm", est.residual_norm}};
}

inline json balance_to_json(const BalanceReport& report) {
    return json{{"balanced", report.balanced},
                {"strictly_balanced", report.strictly_balanced},
                {"positivity_ok", report.positivity_ok},
                {"worst_margin", report.worst_margin},
                {"worst_radius", report.worst_radius},
                {"tolerance_at_worst", report.tolerance_at_worst},
                {"violating_radii", report.violating_radii},
                {"note", report.note}};
}

inline json growth_to_json(const GrowthEstimate& g) {
    return json{{"ratio", g.ratio_estimate},
                {"root", g.root_estimate},
                {"n_used", g.n_used},
                {"normalization", to_string(g.normalization)}};
}

inline json bounds_to_json(const BoundsReport& report) {
    json j{{"torsional_lower", report.torsional.lower},
           {"torsional_upper", report.torsional.upper},
           {"lambda", estimate_to_json(report.lambda)},
           {"h_sup", report.h_sup},
           {"consistent", report.consistent}};
    auto put = [&](const char* name, const std::optional<double>& v) {
        if (v)
            j[name] = *v;
        else
            j[name] = nullptr;
    };
    put("mckean", report.mckean);
    put("cheung_leung", report.cheung_leung);
    put("bessa_montenegro", report.bessa_montenegro);
    put("l_r", report.l_r);
    return j;
}

inline void write_json(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

/// Plain-text gnuplot commands for a CSV artifact.
inline void write_plot_script(const std::filesystem::path& path, const std::string& csv_name,
                              const std::vector<std::pair<int, std::string>>& series,
                              const std::string& xlabel, const std::string& title) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
    out << "set datafile separator ','\n";
    out << "set key autotitle columnhead\n";
    out << "set xlabel '" << xlabel << "'\n";
    out << "set title '" << title << "'\n";
    out << "plot ";
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (i) out << ", \\\n     ";
        out << "'" << csv_name << "' using 1:" << series[i].first << " with lines title '"
            << series[i].second << "'";
    }
    out << '\n';
}

} // namespace eigenmoment::io
