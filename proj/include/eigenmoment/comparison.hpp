#pragma once

#include "eigenmoment/errors.hpp"
#include "eigenmoment/moments.hpp"
#include "eigenmoment/radial_grid.hpp"
#include "eigenmoment/warping.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace eigenmoment {

/**
 * @brief Radial bound with value and derivative, registered analytically,
 * as a constant, or from tabulated samples (finite-difference derivative).
 */
class BoundingFunction {
public:
    using Fn = std::function<double(double)>;

    double value(double r) const { return value_(r); }
    double derivative(double r) const {
        if (!deriv_) throw NonSmoothBounds("bounding function has no derivative available");
        return deriv_(r);
    }
    const std::string& kind() const { return kind_; }

    static BoundingFunction constant(double c) {
        return BoundingFunction([c](double) { return c; }, [](double) { return 0.0; }, "constant");
    }
    static BoundingFunction one() {
        BoundingFunction b = constant(1.0);
        b.kind_ = "one";
        return b;
    }
    static BoundingFunction zero() {
        BoundingFunction b = constant(0.0);
        b.kind_ = "zero";
        return b;
    }
    static BoundingFunction analytic(Fn value, Fn deriv, std::string kind = "analytic") {
        return BoundingFunction(std::move(value), std::move(deriv), std::move(kind));
    }
    static BoundingFunction tabulated(const std::vector<std::array<double, 2>>& samples) {
        if (samples.size() < 4)
            throw PreconditionViolation("tabulated bound needs at least four samples");
        std::vector<double> x, y;
        for (const auto& s : samples) {
            x.push_back(s[0]);
            y.push_back(s[1]);
        }
        auto dy = detail::fd_derivative(x, y);
        auto val = std::make_shared<CubicInterpolant>(x, y);
        auto der = std::make_shared<CubicInterpolant>(x, dy);
        return BoundingFunction([val](double r) { return val->value(r); },
                                [der](double r) { return der->value(r); }, "tabulated");
    }

private:
    BoundingFunction(Fn value, Fn deriv, std::string kind)
        : value_(std::move(value)), deriv_(std::move(deriv)), kind_(std::move(kind)) {}

    Fn value_, deriv_;
    std::string kind_;
};

/**
 * @brief The pair of radial bounds defining a comparison space:
 * tangency g (lower bound on the radial gradient norm, g(0)=1, 0<g<=1)
 * and mean_curvature h (radial mean-curvature bound).
 */
struct BoundingFunctions {
    BoundingFunction tangency;       // g
    BoundingFunction mean_curvature; // h
};

/// Base warping plus bounds; compiles into a new model space.
struct ComparisonSpaceSpec {
    WarpingFunction base_warping;
    BoundingFunctions bounds;
    int dim;
    double radius;
};

/// Enforce the structural requirements on g and h over [0, R].
inline void validate_spec(const ComparisonSpaceSpec& spec, int sample_n = 257) {
    if (spec.dim < 2) throw PreconditionViolation("comparison space needs dimension >= 2");
    if (!(spec.radius > 0.0)) throw NonPositiveRadius("comparison space needs a positive radius");
    const ValidationReport warp = validate_warping(spec.base_warping, spec.dim);
    if (!warp.valid)
        throw PreconditionViolation("base warping invalid: " + warp.violations.front());
    const double g0 = spec.bounds.tangency.value(0.0);
    if (std::abs(g0 - 1.0) > 1e-9)
        throw PreconditionViolation("tangency bound must satisfy g(0) = 1, got g(0) = " +
                                    std::to_string(g0));
    for (int i = 0; i < sample_n; ++i) {
        const double r = spec.radius * i / (sample_n - 1);
        const double g = spec.bounds.tangency.value(r);
        if (!(g > 0.0) || g > 1.0 + 1e-12)
            throw PreconditionViolation("tangency bound must lie in (0, 1] on [0, R]");
        if (!std::isfinite(spec.bounds.mean_curvature.value(r)))
            throw PreconditionViolation("curvature bound must be finite on [0, R]");
    }
}

/**
 * @brief Stretching s(r) = ∫_0^r dt / g(t) induced by the tangency bound.
 *
 * Strictly increasing with s(0) = 0 and s'(0) = 1; its inverse r(s)
 * reparametrizes the comparison space.
 */
inline RadialSamples stretching(const BoundingFunctions& bounds, double radius,
                                int grid_n = kDefaultGridSize) {
    const RadialGrid grid(radius, grid_n);
    const RadialSamples integrand =
        sample(grid, [&](double r) { return 1.0 / bounds.tangency.value(r); });
    return cumulative_integral(integrand);
}

/**
 * @brief A compiled comparison space.
 *
 * The model field is an ordinary model space over [0, s(R)] whose warping is
 *
 *   W(s) = Lambda^{1/(m-1)}(r(s)),   Lambda = w^{m-1} e^z,
 *
 * with z the log-ratio solved below. lambda_profile, stretch and the
 * log-ratio data stay on the base r-grid for balance diagnostics.
 */
struct ComparisonSpaceResult {
    double stretched_radius;
    ModelSpace model;
    RadialSamples lambda_profile; // Lambda(r)
    RadialSamples stretch;        // s(r)
    RadialSamples log_ratio;      // z(r) = ln(Lambda / w^{m-1})
    RadialSamples log_ratio_rate; // z'(r)
};

namespace detail {

/**
 * Right-hand side of the log-ratio equation
 *
 *   z' = m (eta_w - h)/g^2 - m eta_w - (ln g)'
 *      = m eta_w (1 - g^2)/g^2 - m h / g^2 - g'/g ,
 *
 * where the singular eta_w terms are combined so z' stays bounded at the
 * pole with limit -(2m+1) g'(0) - m h(0).
 */
class LogRatioRate {
public:
    LogRatioRate(const ComparisonSpaceSpec& spec)
        : spec_(spec), pole_cut_(kPoleFraction * spec.radius) {}

    double operator()(double r) const {
        if (r < pole_cut_) {
            const double gp0 = spec_.bounds.tangency.derivative(0.0);
            return -(2.0 * spec_.dim + 1.0) * gp0 - spec_.dim * spec_.bounds.mean_curvature.value(0.0);
        }
        const double g = spec_.bounds.tangency.value(r);
        const double gp = spec_.bounds.tangency.derivative(r);
        const double h = spec_.bounds.mean_curvature.value(r);
        const double e = eta(spec_.base_warping, r);
        return spec_.dim * e * (1.0 - g * g) / (g * g) - spec_.dim * h / (g * g) - gp / g;
    }

private:
    const ComparisonSpaceSpec& spec_;
    double pole_cut_;
};

} // namespace detail

/**
 * @brief Compile a comparison-space spec into a model space.
 *
 * The first-order equation for Lambda is integrated in the regularized
 * variable z = ln(Lambda / w^{m-1}) with z(0) = 0 (the boundary condition
 * W'(0) = 1 in disguise) using a classical fourth-order one-step method on
 * the shared grid. Then W(s(r)) = w(r) exp(z(r)/(m-1)).
 */
inline ComparisonSpaceResult build_comparison_space(const ComparisonSpaceSpec& spec,
                                                    int grid_n = kDefaultGridSize) {
    validate_spec(spec);
    const int m = spec.dim;
    const RadialGrid grid(spec.radius, grid_n);
    const int n = grid.count();
    const double h = grid.spacing();
    const detail::LogRatioRate rate(spec);

    std::vector<double> z(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i + 1 < n; ++i) {
        const double r = grid.node(i);
        const double k1 = rate(r);
        const double k2 = rate(r + 0.5 * h);
        const double k3 = k2; // the rate depends on r only
        const double k4 = rate(r + h);
        z[static_cast<std::size_t>(i + 1)] =
            z[static_cast<std::size_t>(i)] + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (std::abs(z[static_cast<std::size_t>(i + 1)]) > 700.0)
            throw OdeBlowup("log-ratio left [-700, 700] near r = " + std::to_string(grid.node(i + 1)));
    }

    std::vector<double> zp(static_cast<std::size_t>(n));
    std::vector<double> lambda(static_cast<std::size_t>(n));
    std::vector<double> wv(static_cast<std::size_t>(n)), wp(static_cast<std::size_t>(n));
    std::vector<double> gv(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double r = grid.node(i);
        zp[static_cast<std::size_t>(i)] = rate(r);
        wv[static_cast<std::size_t>(i)] = spec.base_warping.value(r);
        wp[static_cast<std::size_t>(i)] = spec.base_warping.deriv(r);
        gv[static_cast<std::size_t>(i)] = spec.bounds.tangency.value(r);
        lambda[static_cast<std::size_t>(i)] =
            std::pow(wv[static_cast<std::size_t>(i)], m - 1) * std::exp(z[static_cast<std::size_t>(i)]);
    }
    for (int i = 1; i < n; ++i)
        if (!(lambda[static_cast<std::size_t>(i)] > 0.0))
            throw OdeBlowup("Lambda lost positivity at r = " + std::to_string(grid.node(i)));

    std::vector<double> inv_g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) inv_g[static_cast<std::size_t>(i)] = 1.0 / gv[static_cast<std::size_t>(i)];
    RadialSamples stretch_samples = cumulative_integral(RadialSamples(grid, std::move(inv_g)));
    for (int i = 0; i + 1 < n; ++i)
        if (!(stretch_samples[i + 1] > stretch_samples[i]))
            throw OdeBlowup("stretching lost strict monotonicity");

    // W and dW/ds at the stretched nodes; both known analytically there.
    std::vector<double> W(static_cast<std::size_t>(n)), dW(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double scale = std::exp(z[static_cast<std::size_t>(i)] / (m - 1));
        W[static_cast<std::size_t>(i)] = wv[static_cast<std::size_t>(i)] * scale;
        dW[static_cast<std::size_t>(i)] =
            (wp[static_cast<std::size_t>(i)] +
             wv[static_cast<std::size_t>(i)] * zp[static_cast<std::size_t>(i)] / (m - 1)) *
            scale * gv[static_cast<std::size_t>(i)];
    }
    if (std::abs(W[0]) > 1e-12 || std::abs(dW[0] - 1.0) > 1e-6)
        throw OdeBlowup("comparison warping failed its pole normalization");

    WarpingFunction Wf = sampled_warping(stretch_samples.values, W, dW, "comparison");
    const double sR = stretch_samples.values.back();
    ModelSpace model(m, std::move(Wf), sR);
    return ComparisonSpaceResult{sR,
                                 std::move(model),
                                 RadialSamples(grid, std::move(lambda)),
                                 std::move(stretch_samples),
                                 RadialSamples(grid, std::move(z)),
                                 RadialSamples(grid, std::move(zp))};
}

/// Outcome of the balance verification.
struct BalanceReport {
    bool balanced = false;          // margins >= -tolerance at every node r > 0
    bool strictly_balanced = false; // raw margins > 0 at every node r > 0
    bool positivity_ok = false;     // eta_w - h > 0 on (0, R]
    double worst_margin = 0.0;
    double worst_radius = 0.0;
    double tolerance_at_worst = 0.0;
    std::vector<double> violating_radii; // capped listing
    std::string note;
};

/**
 * @brief Check the balance inequality of a compiled comparison space:
 *
 *   q_W(s) (eta_w(r(s)) - h(r(s))) >= g(r(s)) / m   for all r in [0, R],
 *
 * with q_W(s) = ∫_0^{r(s)} Lambda/g du / Lambda(r(s)). At the pole the
 * margin tends to 0 for every admissible spec, so the scan covers r > 0 and
 * carries a discretization allowance that absorbs the scale-degenerate
 * layer next to r = 0.
 */
inline BalanceReport balance_check(const ComparisonSpaceResult& result,
                                   const ComparisonSpaceSpec& spec, bool strict = false) {
    const RadialGrid& grid = result.lambda_profile.grid;
    const int n = grid.count();
    const int m = spec.dim;
    const double h = grid.spacing();

    // ∫_0^r Lambda/g with pole-exact quadrature: Lambda/g = u^{m-1} psi(u),
    // psi(0) = 1 by the pole normalization.
    std::vector<double> psi(static_cast<std::size_t>(n));
    psi[0] = 1.0;
    for (int i = 1; i < n; ++i)
        psi[static_cast<std::size_t>(i)] = result.lambda_profile[i] /
                                           (std::pow(grid.node(i), m - 1) *
                                            spec.bounds.tangency.value(grid.node(i)));
    const RadialSamples I = cumulative_power_integral(RadialSamples(grid, std::move(psi)), m - 1);

    // discretization allowance: the base term follows the second derivative
    // of the log-ratio; the pole term covers the quadrature noise of q_W
    // where the true margin itself is O(r).
    double z2max = 0.0;
    for (int i = 1; i + 1 < n; ++i)
        z2max = std::max(z2max, std::abs(result.log_ratio_rate[i + 1] - result.log_ratio_rate[i - 1]) /
                                    (2.0 * h));
    const double zp0 = result.log_ratio_rate[0];
    const double base_eps = 10.0 * h * h * z2max + 1e-14;

    BalanceReport report;
    report.balanced = true;
    report.strictly_balanced = true;
    report.positivity_ok = true;
    bool first = true;
    for (int i = 1; i < n; ++i) {
        const double r = grid.node(i);
        const double g = spec.bounds.tangency.value(r);
        const double hb = spec.bounds.mean_curvature.value(r);
        const double e = eta(spec.base_warping, r);
        if (!(e - hb > 0.0)) report.positivity_ok = false;
        const double q = I[i] / result.lambda_profile[i];
        const double margin = q * (e - hb) - g / m;
        const double ratio = h / r;
        const double eps = base_eps + 16.0 * (g / m) * h * h * (1.0 + zp0 * zp0) *
                                          std::min(1.0, ratio * ratio * 16.0);
        if (first || margin < report.worst_margin) {
            report.worst_margin = margin;
            report.worst_radius = r;
            report.tolerance_at_worst = eps;
            first = false;
        }
        if (margin < -eps) report.balanced = false;
        if (!(margin > 0.0)) report.strictly_balanced = false;
        const bool violation = strict ? !(margin > 0.0) : (margin < -eps);
        if (violation && report.violating_radii.size() < 32) report.violating_radii.push_back(r);
    }
    if (!report.positivity_ok) {
        report.balanced = false;
        report.strictly_balanced = false;
        report.note = "eta_w - h lost positivity";
    }
    return report;
}

/// Outcome of the transplant convexity verification.
struct ConvexityReport {
    bool checked = false; // false when skipped by the balance gate
    bool holds = false;
    int worst_k = 0;
    double worst_defect = 0.0;
    double worst_radius = 0.0;
    double tolerance_at_worst = 0.0;
    std::vector<double> worst_defect_per_k;
    std::string diagnostic;
};

/**
 * @brief Verify f_k'' - eta_w f_k' >= 0 for the transplanted hierarchy
 * f_k = u_k^W ∘ s, k <= k_small.
 *
 * Pulled back through the stretching, the hierarchy on the comparison model
 * satisfies the same Green recursion with area weight Lambda/g, so f_k is
 * computed natively on the base grid; the defect then uses centered
 * differences with a pole-aware discretization allowance. The inequality is
 * guaranteed for spaces that are balanced from below; the check is gated on
 * balance_check unless force is set.
 */
inline ConvexityReport transplanted_convexity_check(const ComparisonSpaceResult& result,
                                                    const ComparisonSpaceSpec& spec, int k_small,
                                                    bool force = false) {
    if (k_small < 1 || k_small > 10)
        throw PreconditionViolation("transplant convexity check expects 1 <= k_small <= 10");
    ConvexityReport report;
    const BalanceReport balance = balance_check(result, spec, false);
    if (!balance.balanced && !force) {
        report.checked = false;
        report.diagnostic = "skipped: spec is not balanced from below (worst margin " +
                            std::to_string(balance.worst_margin) + " at r = " +
                            std::to_string(balance.worst_radius) + ")";
        return report;
    }
    report.checked = true;

    const RadialGrid& grid = result.lambda_profile.grid;
    const int n = grid.count();
    const int m = spec.dim;
    const double h = grid.spacing();

    // area weight of the transplanted recursion: Lambda/g = u^{m-1} psi(u)
    std::vector<double> psi(static_cast<std::size_t>(n));
    psi[0] = 1.0;
    for (int i = 1; i < n; ++i)
        psi[static_cast<std::size_t>(i)] = result.lambda_profile[i] /
                                           (std::pow(grid.node(i), m - 1) *
                                            spec.bounds.tangency.value(grid.node(i)));
    const RadialSamples weight(grid, std::move(psi));

    std::vector<double> etav(static_cast<std::size_t>(n));
    for (int i = 1; i < n; ++i) etav[static_cast<std::size_t>(i)] = eta(spec.base_warping, grid.node(i));

    RadialSamples f = sample(grid, [](double) { return 1.0; });
    report.holds = true;
    bool first = true;
    for (int k = 1; k <= k_small; ++k) {
        RadialSamples next = detail::green_apply_weighted(weight, m - 1, f);
        const double c = next[0];
        if (!(c > 0.0)) throw NonFiniteIteration("transplanted hierarchy lost positivity");
        for (double& v : next.values) v /= c;
        f = std::move(next);

        // derivative-magnitude estimates for the tolerance model
        double m3 = 0.0, m4 = 0.0, m2 = 0.0;
        for (int i = 2; i + 2 < n; ++i) {
            const double d3 = (f[i + 2] - 2.0 * f[i + 1] + 2.0 * f[i - 1] - f[i - 2]) / (2.0 * h * h * h);
            const double d4 = (f[i + 2] - 4.0 * f[i + 1] + 6.0 * f[i] - 4.0 * f[i - 1] + f[i - 2]) /
                              (h * h * h * h);
            m3 = std::max(m3, std::abs(d3));
            m4 = std::max(m4, std::abs(d4));
        }
        for (int i = 1; i + 1 < n; ++i)
            m2 = std::max(m2, std::abs(f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h));

        double worst = 0.0, worst_r = 0.0, worst_eps = 0.0;
        bool kfirst = true;
        for (int i = 1; i + 1 < n; ++i) {
            const double d1 = (f[i + 1] - f[i - 1]) / (2.0 * h);
            const double d2 = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
            const double defect = d2 - etav[static_cast<std::size_t>(i)] * d1;
            const double eps = 8.0 * h * h * (m4 / 12.0 + etav[static_cast<std::size_t>(i)] * m3 / 6.0) +
                               1e-12 * std::max(1.0, m2);
            if (kfirst || defect < worst) {
                worst = defect;
                worst_r = grid.node(i);
                worst_eps = eps;
                kfirst = false;
            }
            if (defect < -eps) report.holds = false;
        }
        report.worst_defect_per_k.push_back(worst);
        if (first || worst < report.worst_defect) {
            report.worst_defect = worst;
            report.worst_k = k;
            report.worst_radius = worst_r;
            report.tolerance_at_worst = worst_eps;
            first = false;
        }
    }
    if (!report.holds)
        report.diagnostic = "convexity defect " + std::to_string(report.worst_defect) + " at r = " +
                            std::to_string(report.worst_radius) + ", k = " +
                            std::to_string(report.worst_k);
    return report;
}

} // namespace eigenmoment
