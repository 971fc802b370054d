#pragma once

#include "eigenmoment/comparison.hpp"
#include "eigenmoment/errors.hpp"
#include "eigenmoment/moments.hpp"
#include "eigenmoment/warping.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace eigenmoment {

namespace detail {

// sqrt(-b) coth(R sqrt(-b)), read as 1/R when b = 0.
inline double coth_term(double b, double R) {
    if (b == 0.0) return 1.0 / R;
    const double s = std::sqrt(-b);
    return s / std::tanh(R * s);
}

} // namespace detail

/**
 * @brief Fundamental-tone lower bound (n-1)^2 |b| / 4 for curvature <= b <= 0.
 */
inline double mckean_bound(int n, CurvatureConstant b) {
    if (n < 2) throw PreconditionViolation("dimension must be at least 2");
    if (b.value > 0.0) throw PositiveCurvature("bound requires curvature <= 0");
    return 0.25 * (n - 1) * (n - 1) * std::abs(b.value);
}

/**
 * @brief Lower bound for domains in a submanifold with mean curvature bounded
 * by h_sup inside a space of curvature <= b <= 0:
 *
 *   1/4 ((m-1) sqrt(-b) coth(R sqrt(-b)) - m h_sup)^2 ,
 *
 * valid only when the feasibility condition
 * (m-1) sqrt(-b) coth(R sqrt(-b)) >= m h_sup holds; empty otherwise.
 */
inline std::optional<double> cheung_leung_bound(int m, CurvatureConstant b, double h_sup, double R) {
    if (m < 2) throw PreconditionViolation("dimension must be at least 2");
    if (!(R > 0.0)) throw NonPositiveRadius("bound needs R > 0");
    if (b.value > 0.0) throw PositiveCurvature("bound requires curvature <= 0");
    const double c = (m - 1) * detail::coth_term(b.value, R);
    if (c < m * h_sup) return std::nullopt;
    const double L = c - m * h_sup;
    return 0.25 * L * L;
}

/**
 * @brief Intrinsic first-eigenvalue lower bound
 *
 *   1/4 max(n/R, (n-1) sqrt(-b) coth(R sqrt(-b)))^2 ,
 *
 * which dominates both the flat 1/R term and the curvature term.
 */
inline double bessa_montenegro_bound(int n, CurvatureConstant b, double R) {
    if (n < 2) throw PreconditionViolation("dimension must be at least 2");
    if (!(R > 0.0)) throw NonPositiveRadius("bound needs R > 0");
    if (b.value > 0.0) throw PositiveCurvature("bound requires curvature <= 0");
    const double t = std::max(n / R, (n - 1) * detail::coth_term(b.value, R));
    return 0.25 * t * t;
}

namespace detail {

inline bool tangency_is_identity(const ComparisonSpaceSpec& spec, int sample_n = 129) {
    for (int i = 0; i <= sample_n; ++i) {
        const double r = spec.radius * i / sample_n;
        if (std::abs(spec.bounds.tangency.value(r) - 1.0) > 1e-12) return false;
    }
    return true;
}

} // namespace detail

/**
 * @brief Poincare-type lower bound for the comparison model with g = 1:
 *
 *   L_R = (m-1) inf_[0,R] eta_w - m sup_[0,R] h ,   bound = L_R^2 / 4 .
 *
 * The infimum scans grid nodes r > 0 (eta_w diverges at the pole, so the
 * infimum is attained away from it). Requires L_R >= 0.
 */
inline double l_r_bound(const ComparisonSpaceSpec& spec, int grid_n = kDefaultGridSize) {
    if (!detail::tangency_is_identity(spec))
        throw PreconditionViolation("the Poincare bound requires the tangency bound g = 1");
    const RadialGrid grid(spec.radius, grid_n);
    double inf_eta = std::numeric_limits<double>::infinity();
    double sup_h = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid.count(); ++i) {
        const double r = grid.node(i);
        if (i > 0) inf_eta = std::min(inf_eta, eta(spec.base_warping, r));
        sup_h = std::max(sup_h, spec.bounds.mean_curvature.value(r));
    }
    const double L = (spec.dim - 1) * inf_eta - spec.dim * sup_h;
    if (!(L >= 0.0))
        throw InfeasibleHypothesis("(m-1) inf eta_w >= m sup h fails: L_R = " + std::to_string(L));
    return 0.25 * L * L;
}

/// A constellation-level eigenvalue statement about the compiled model.
struct ConstellationEstimate {
    EigenEstimate estimate;   // sandwich on the comparison model
    BalanceReport balance;
    double stretched_radius;
    double chained_upper;     // Vol(B^W) / A_1(B^W); upper-bound chain endpoint
    double rayleigh_lower;    // L_R^2/4 when g = 1; 0 otherwise
};

/**
 * @brief Upper bound for lambda_1 of a domain dominated from below:
 * compile C_{w,g,h}, verify balance, and estimate lambda_1(B^W_{s(R)}).
 *
 * The balance gate is hard here; without it the transplant argument behind
 * the upper bound does not apply.
 */
inline ConstellationEstimate extrinsic_upper(const ComparisonSpaceSpec& spec,
                                             double tol = kDefaultTolerance,
                                             int k_max = kDefaultMaxDepth,
                                             int grid_n = kDefaultGridSize) {
    const ComparisonSpaceResult built = build_comparison_space(spec, grid_n);
    const BalanceReport balance = balance_check(built, spec, false);
    if (!balance.balanced)
        throw UnbalancedSpec("comparison space is not balanced from below (worst margin " +
                             std::to_string(balance.worst_margin) + " at r = " +
                             std::to_string(balance.worst_radius) + ")");
    EigenEstimate est = lambda1_sandwich(built.model, tol, k_max, grid_n);
    const TorsionalBounds tb = torsional_bounds(built.model, grid_n);
    return ConstellationEstimate{std::move(est), balance, built.stretched_radius, tb.upper, 0.0};
}

/**
 * @brief Lower bound for lambda_1 of a domain dominated from above:
 * compile C_{w,1,h} (identity stretching) and estimate lambda_1(B^W_R),
 * together with the closed-form Poincare value L_R^2/4.
 *
 * The balance verdict is reported rather than enforced: the eigenvalue of
 * the compiled model and its Poincare bound stand on their own, while the
 * transplant interpretation additionally needs the balanced flag.
 */
inline ConstellationEstimate extrinsic_lower(const ComparisonSpaceSpec& spec,
                                             double tol = kDefaultTolerance,
                                             int k_max = kDefaultMaxDepth,
                                             int grid_n = kDefaultGridSize) {
    if (!detail::tangency_is_identity(spec))
        throw PreconditionViolation("the lower constellation requires the tangency bound g = 1");
    const ComparisonSpaceResult built = build_comparison_space(spec, grid_n);
    const BalanceReport balance = balance_check(built, spec, false);
    EigenEstimate est = lambda1_sandwich(built.model, tol, k_max, grid_n);
    const TorsionalBounds tb = torsional_bounds(built.model, grid_n);
    const double rayleigh = l_r_bound(spec, grid_n);
    return ConstellationEstimate{std::move(est), balance, built.stretched_radius, tb.upper, rayleigh};
}

/// Interval data for the eigenvalue comparison of two ordered models.
struct OrderingReport {
    EigenEstimate lower_curvature;  // estimate on the space with the smaller profile
    EigenEstimate higher_curvature; // estimate on the space with the larger profile
    bool ordered;                   // lambda(higher curvature) <= lambda(lower curvature)
    double margin;                  // lower_curvature.lower - higher_curvature.upper
};

/**
 * @brief Eigenvalue ordering under pointwise-ordered curvature profiles.
 *
 * If -w''/w of space_lo stays below that of space_hi on the shared grid,
 * then the ball in the higher-curvature space has the smaller lambda_1.
 */
inline OrderingReport intrinsic_ordering_check(const ModelSpace& space_lo, const ModelSpace& space_hi,
                                               double tol = kDefaultTolerance,
                                               int k_max = kDefaultMaxDepth,
                                               int grid_n = kDefaultGridSize) {
    if (space_lo.dim != space_hi.dim)
        throw NotComparable("ordering check needs matching dimensions");
    if (std::abs(space_lo.radius - space_hi.radius) > 1e-12 * space_lo.radius)
        throw NotComparable("ordering check needs matching radii");
    const RadialGrid grid(space_lo.radius, grid_n);
    for (int i = 1; i < grid.count(); ++i) {
        const double r = grid.node(i);
        if (curvature_profile(space_lo.warping, r) >
            curvature_profile(space_hi.warping, r) + 1e-10)
            throw NotComparable("curvature profiles are not pointwise ordered");
    }
    EigenEstimate lo = lambda1_sandwich(space_lo, tol, k_max, grid_n);
    EigenEstimate hi = lambda1_sandwich(space_hi, tol, k_max, grid_n);
    const double margin = lo.lower - hi.upper;
    const bool ordered = hi.midpoint() <= lo.midpoint() * (1.0 + 2.0 * tol);
    return OrderingReport{std::move(lo), std::move(hi), ordered, margin};
}

/// Collected closed-form bounds around one sandwich estimate.
struct BoundsReport {
    std::optional<double> mckean;
    std::optional<double> cheung_leung;
    std::optional<double> bessa_montenegro;
    std::optional<double> l_r;
    TorsionalBounds torsional;
    EigenEstimate lambda;
    double h_sup = 0.0;
    bool consistent = true; // every present lower bound <= lambda.upper, torsional.upper >= lambda.lower
};

/**
 * @brief Evaluate every applicable closed-form bound for a space-form ball
 * alongside the sandwich estimate. Curvature bounds apply only for b <= 0.
 */
inline BoundsReport bounds_report(CurvatureConstant b, int m, double R, double h_sup = 0.0,
                                  double tol = kDefaultTolerance, int k_max = kDefaultMaxDepth,
                                  int grid_n = kDefaultGridSize) {
    ModelSpace space(m, space_form_warping(b, std::max(kDefaultDomainCap, 2.0 * R)), R);
    EigenEstimate lambda = lambda1_sandwich(space, tol, k_max, grid_n);
    const TorsionalBounds torsional = torsional_bounds(space, grid_n);
    BoundsReport report{std::nullopt, std::nullopt,      std::nullopt, std::nullopt,
                        torsional,    std::move(lambda), h_sup,        true};
    if (b.value <= 0.0) {
        report.mckean = mckean_bound(m, b);
        report.cheung_leung = cheung_leung_bound(m, b, h_sup, R);
        report.bessa_montenegro = bessa_montenegro_bound(m, b, R);
        ComparisonSpaceSpec spec{space.warping,
                                 BoundingFunctions{BoundingFunction::one(),
                                                   BoundingFunction::constant(h_sup)},
                                 m, R};
        try {
            report.l_r = l_r_bound(spec, grid_n);
        } catch (const InfeasibleHypothesis&) {
            report.l_r = std::nullopt;
        }
    }
    auto check_lower = [&](const std::optional<double>& v) {
        if (v && *v > report.lambda.upper * (1.0 + 1e-9)) report.consistent = false;
    };
    check_lower(report.mckean);
    check_lower(report.cheung_leung);
    check_lower(report.bessa_montenegro);
    check_lower(report.l_r);
    if (report.torsional.upper < report.lambda.lower * (1.0 - 1e-9)) report.consistent = false;
    if (report.torsional.lower > report.lambda.upper * (1.0 + 1e-9)) report.consistent = false;
    return report;
}

} // namespace eigenmoment
