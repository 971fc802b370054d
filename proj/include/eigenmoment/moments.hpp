#pragma once

#include "eigenmoment/errors.hpp"
#include "eigenmoment/radial_grid.hpp"
#include "eigenmoment/warping.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace eigenmoment {

inline constexpr double kDefaultTolerance = 1e-4;
inline constexpr int kDefaultMaxDepth = 200;

// Relative slack for monotonicity assertions; the exact sequences are
// strictly monotone but plateau below machine precision once converged.
inline constexpr double kMonotoneSlack = 1e-12;

namespace detail {

/**
 * Green operator for radial Dirichlet functions against an area weight a(s):
 *
 *   G(u)(r) = ∫_r^R [ ∫_0^t a(s) u(s) ds / a(t) ] dt ,
 *
 * where a = s^p * psi(s) with smooth positive psi. The inner quotient is
 * assigned its analytic limit 0 at t = 0 and the output vanishes at r = R.
 */
inline RadialSamples green_apply_weighted(const RadialSamples& psi, int p, const RadialSamples& u) {
    const RadialGrid& grid = psi.grid;
    const int n = grid.count();
    std::vector<double> prod(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) prod[static_cast<std::size_t>(i)] = psi[i] * u[i];
    const RadialSamples inner_cum = cumulative_power_integral(RadialSamples(grid, std::move(prod)), p);
    std::vector<double> quotient(static_cast<std::size_t>(n));
    quotient[0] = 0.0;
    for (int i = 1; i < n; ++i) {
        const double a = std::pow(grid.node(i), p) * psi[i];
        quotient[static_cast<std::size_t>(i)] = inner_cum[i] / a;
    }
    return tail_integral(RadialSamples(grid, std::move(quotient)));
}

} // namespace detail

/**
 * @brief Green operator of the geodesic ball B_R in a model space:
 *
 *   G(u)(r) = ∫_r^R [ ∫_0^t w^{m-1}(s) u(s) ds / w^{m-1}(t) ] dt .
 *
 * Inverts the (negative) radial Dirichlet Laplacian: the mean exit time of
 * Brownian motion from B_R is G(1).
 */
inline RadialSamples green_apply(const ModelSpace& space, const RadialSamples& u) {
    if (u.grid.radius() > space.radius * (1.0 + 1e-12))
        throw OutOfDomain("samples extend beyond the ball radius");
    for (double v : u.values)
        if (!std::isfinite(v)) throw PreconditionViolation("green_apply needs finite samples");
    const RadialSamples psi = detail::warp_power_factor(space.warping, space.dim, u.grid);
    return detail::green_apply_weighted(psi, space.dim - 1, u);
}

namespace detail {

// sigma_k = k A_{k-1} / A_k evaluated from the stored log-moments; routed
// through one helper so every consumer shares the exact same arithmetic.
inline double moment_quotient(double log_prev, double log_next, int k) {
    return std::exp(std::log(static_cast<double>(k)) + log_prev - log_next);
}

} // namespace detail

/**
 * @brief Exit-time moment hierarchy of a geodesic ball.
 *
 * Iterates the normalized functions g_k = u_k / u_k(0) through the Green
 * operator (g_0 = 1, g_k = G(g_{k-1}) / G(g_{k-1})(0)) and accumulates
 * ln u_k(0) and ln A_k in the log domain. Raw u_k and moments A_k grow
 * factorially, so only the normalized shape and log chains are stored:
 *
 *   rho_k   = k u_{k-1}(0) / u_k(0)   (nondecreasing lower bounds for lambda_1)
 *   sigma_k = k A_{k-1} / A_k         (nonincreasing upper bounds)
 */
class MomentHierarchy {
public:
    explicit MomentHierarchy(const ModelSpace& space, int grid_n = kDefaultGridSize)
        : space_(space), grid_(space.radius, grid_n),
          psi_(detail::warp_power_factor(space.warping, space.dim, grid_)),
          log_area_(std::log(unit_sphere_area(space.dim))) {
        normalized_.emplace_back(sample(grid_, [](double) { return 1.0; }));
        log_center_.push_back(0.0); // u_0 = 1
        const double I0 = weighted_integral(normalized_.front());
        log_moments_.push_back(log_area_ + std::log(I0)); // A_0 = Vol(B_R)
    }

    const ModelSpace& space() const { return space_; }
    const RadialGrid& grid() const { return grid_; }
    int depth() const { return static_cast<int>(lower_.size()); }

    /// Advance the hierarchy until depth >= k_target.
    void extend(int k_target) {
        while (depth() < k_target) step();
    }

    double lower_quotient(int k) const { return lower_.at(index1(k)); }   // rho_k
    double upper_quotient(int k) const { return upper_.at(index1(k)); }   // sigma_k
    double log_center_value(int k) const { return log_center_.at(index0(k)); } // ln u_k(0)
    double log_moment(int k) const { return log_moments_.at(index0(k)); }      // ln A_k
    const RadialSamples& normalized_function(int k) const { return normalized_.at(index0(k)); }

    const std::vector<double>& lower_quotients() const { return lower_; }
    const std::vector<double>& upper_quotients() const { return upper_; }
    const std::vector<double>& log_moments() const { return log_moments_; }

    /**
     * Barta quotient profile k u_{k-1}(r) / u_k(r) at the grid nodes r < R
     * (the quotient is 0/0 at the boundary). Nondecreasing in r.
     */
    std::vector<double> quotient_profile(int k) const {
        const RadialSamples& prev = normalized_function(k - 1);
        const RadialSamples& cur = normalized_function(k);
        const double rho = lower_quotient(k);
        std::vector<double> q(static_cast<std::size_t>(grid_.count() - 1));
        for (int i = 0; i + 1 < grid_.count(); ++i)
            q[static_cast<std::size_t>(i)] = rho * prev[i] / cur[i];
        return q;
    }

    /**
     * Boundary-derivative route to sigma_k: (k+1) u'_k(R) / u'_{k+1}(R) with
     * one-sided second-order differences. Diagnostic only; the log-moment
     * route is better conditioned and is the one reported.
     */
    double boundary_upper_quotient(int k) const {
        if (k < 1 || k + 1 > depth()) throw IndexOutOfRange("boundary quotient needs depth k+1");
        const double dprev = boundary_derivative(normalized_function(k));
        const double dnext = boundary_derivative(normalized_function(k + 1));
        const double rho_next = lower_quotient(k + 1);
        return rho_next * dprev / dnext;
    }

    double weighted_integral(const RadialSamples& g) const {
        std::vector<double> prod(static_cast<std::size_t>(grid_.count()));
        for (int i = 0; i < grid_.count(); ++i) prod[static_cast<std::size_t>(i)] = psi_[i] * g[i];
        return cumulative_power_integral(RadialSamples(grid_, std::move(prod)), space_.dim - 1)
            .values.back();
    }

private:
    void step() {
        const int k = depth() + 1;
        const RadialSamples raw = detail::green_apply_weighted(psi_, space_.dim - 1, normalized_.back());
        const double c = raw[0];
        if (!(c > 0.0) || !std::isfinite(c))
            throw NonFiniteIteration("Green iteration produced a non-positive normalization at k=" +
                                     std::to_string(k));
        RadialSamples g(grid_, raw.values);
        for (double& v : g.values) v /= c;
        g.values.back() = 0.0;

        lower_.push_back(1.0 / c);
        log_center_.push_back(log_center_.back() + std::log(static_cast<double>(k)) + std::log(c));
        const double Ik = weighted_integral(g);
        if (!(Ik > 0.0) || !std::isfinite(Ik))
            throw NonFiniteIteration("moment integral lost positivity at k=" + std::to_string(k));
        log_moments_.push_back(log_center_.back() + log_area_ + std::log(Ik));
        upper_.push_back(detail::moment_quotient(log_moments_[static_cast<std::size_t>(k - 1)],
                                                 log_moments_[static_cast<std::size_t>(k)], k));
        normalized_.push_back(std::move(g));
    }

    double boundary_derivative(const RadialSamples& g) const {
        const int n = grid_.count();
        const double h = grid_.spacing();
        return (3.0 * g[n - 1] - 4.0 * g[n - 2] + g[n - 3]) / (2.0 * h);
    }

    std::size_t index0(int k) const {
        if (k < 0 || k > depth()) throw IndexOutOfRange("index " + std::to_string(k) + " beyond depth");
        return static_cast<std::size_t>(k);
    }
    std::size_t index1(int k) const {
        if (k < 1 || k > depth()) throw IndexOutOfRange("index " + std::to_string(k) + " beyond depth");
        return static_cast<std::size_t>(k - 1);
    }

    ModelSpace space_;
    RadialGrid grid_;
    RadialSamples psi_;
    double log_area_;
    std::vector<RadialSamples> normalized_; // g_0 .. g_depth
    std::vector<double> lower_, upper_;     // rho_k, sigma_k (k = 1..depth)
    std::vector<double> log_center_;        // ln u_k(0), k = 0..depth
    std::vector<double> log_moments_;       // ln A_k, k = 0..depth
};

/// Build the hierarchy up to k_max.
inline MomentHierarchy build_hierarchy(const ModelSpace& space, int k_max,
                                       int grid_n = kDefaultGridSize) {
    if (k_max < 2) throw PreconditionViolation("hierarchy depth must be at least 2");
    MomentHierarchy h(space, grid_n);
    h.extend(k_max);
    return h;
}

/// Log-scaled moment ln A_k.
inline double log_moment(const MomentHierarchy& hierarchy, int k) { return hierarchy.log_moment(k); }

/// The two independent routes to A_k and their relative disagreement.
struct MomentVerification {
    double log_moment;          // ln A_k from the volume integral
    double log_moment_boundary; // ln A_k from the boundary flux -u'_{k+1}(R) Vol(S_R)/(k+1)
    double relative_gap;
};

/**
 * @brief Cross-check A_k against the boundary-derivative formula.
 *
 * The divergence theorem ties the volume integral of u_k to the boundary
 * flux of u_{k+1}; numerically the flux route uses a one-sided difference
 * at R, so agreement is limited by that stencil.
 */
inline MomentVerification verify_moment(MomentHierarchy& hierarchy, int k) {
    if (k < 1) throw IndexOutOfRange("moment verification needs k >= 1");
    hierarchy.extend(k + 1);
    const RadialGrid& grid = hierarchy.grid();
    const RadialSamples& gnext = hierarchy.normalized_function(k + 1);
    const int n = grid.count();
    const double h = grid.spacing();
    const double dR = (3.0 * gnext[n - 1] - 4.0 * gnext[n - 2] + gnext[n - 3]) / (2.0 * h);
    if (!(dR < 0.0))
        throw NonFiniteIteration("boundary derivative lost its sign");
    const double wall = std::log(sphere_volume(hierarchy.space(), hierarchy.space().radius));
    const double log_bnd = hierarchy.log_center_value(k + 1) + std::log(-dR) + wall -
                           std::log(static_cast<double>(k + 1));
    const double log_vol = hierarchy.log_moment(k);
    return MomentVerification{log_vol, log_bnd, std::abs(std::expm1(log_bnd - log_vol))};
}

/// Two-sided eigenvalue estimate extracted from the hierarchy.
struct EigenEstimate {
    double lower;    // rho_k at the final iteration
    double upper;    // sigma_k at the final iteration
    int iterations;
    bool converged;
    RadialSamples eigenfunction; // normalized g_k, approaching the ground state
    double residual_norm;

    double midpoint() const { return 0.5 * (lower + upper); }
    double relative_width() const { return (upper - lower) / lower; }
};

/// Raised when the sandwich fails to close by k_max; carries the partial estimate.
struct NotConverged : Error {
    EigenEstimate partial;
    NotConverged(std::string msg, EigenEstimate p) : Error(std::move(msg)), partial(std::move(p)) {}
};

/**
 * @brief Max-norm residual of the radial eigen-equation
 *
 *   g'' + (m-1) eta_w g' + lambda g = 0
 *
 * over the trimmed interior [0.05 R, 0.95 R], normalized by max |g|.
 * Centered second-order differences; the trim keeps the pole singularity
 * and the one-sided boundary stencil out of the norm.
 */
inline double eigen_residual(const ModelSpace& space, double lambda, const RadialSamples& g) {
    if (!(lambda > 0.0)) throw PreconditionViolation("eigen residual needs lambda > 0");
    const RadialGrid& grid = g.grid;
    const int n = grid.count();
    const double h = grid.spacing();
    double gmax = 0.0;
    for (double v : g.values) gmax = std::max(gmax, std::abs(v));
    if (gmax == 0.0) return 0.0;
    const double lo = 0.05 * grid.radius(), hi = 0.95 * grid.radius();
    double worst = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
        const double r = grid.node(i);
        if (r < lo || r > hi) continue;
        const double d1 = (g[i + 1] - g[i - 1]) / (2.0 * h);
        const double d2 = (g[i + 1] - 2.0 * g[i] + g[i - 1]) / (h * h);
        const double res = d2 + (space.dim - 1) * eta(space.warping, r) * d1 + lambda * g[i];
        worst = std::max(worst, std::abs(res));
    }
    return worst / gmax;
}

/**
 * @brief Monotone two-sided estimator for the first Dirichlet eigenvalue.
 *
 * Runs the hierarchy until sigma_k - rho_k <= tol * rho_k, asserting at each
 * step that rho is nondecreasing, sigma nonincreasing and rho_k <= sigma_k.
 * Both sequences converge to lambda_1 and g_k to its eigenfunction.
 */
inline EigenEstimate lambda1_sandwich(const ModelSpace& space, double tol = kDefaultTolerance,
                                      int k_max = kDefaultMaxDepth, int grid_n = kDefaultGridSize) {
    if (!(tol > 0.0)) throw PreconditionViolation("tolerance must be positive");
    MomentHierarchy hierarchy(space, grid_n);
    auto snapshot = [&](int k, bool ok) {
        const double rho = hierarchy.lower_quotient(k);
        const double sig = hierarchy.upper_quotient(k);
        RadialSamples ef = hierarchy.normalized_function(k);
        const double res = eigen_residual(space, 0.5 * (rho + sig), ef);
        return EigenEstimate{rho, sig, k, ok, std::move(ef), res};
    };
    for (int k = 1; k <= k_max; ++k) {
        hierarchy.extend(k);
        const double rho = hierarchy.lower_quotient(k);
        const double sig = hierarchy.upper_quotient(k);
        if (k > 1) {
            const double rho_prev = hierarchy.lower_quotient(k - 1);
            const double sig_prev = hierarchy.upper_quotient(k - 1);
            if (rho < rho_prev * (1.0 - kMonotoneSlack))
                throw NonFiniteIteration("lower quotients lost monotonicity at k=" + std::to_string(k));
            if (sig > sig_prev * (1.0 + kMonotoneSlack))
                throw NonFiniteIteration("upper quotients lost monotonicity at k=" + std::to_string(k));
        }
        if (rho > sig * (1.0 + kMonotoneSlack))
            throw NonFiniteIteration("sandwich ordering violated at k=" + std::to_string(k));
        if (sig - rho <= tol * rho)
            return snapshot(k, true);
    }
    throw NotConverged("sandwich did not close within k_max = " + std::to_string(k_max),
                       snapshot(k_max, false));
}

/// Closed-form first-eigenvalue bracket from torsional data.
struct TorsionalBounds {
    double lower; // 1 / ∫_0^R q_w(t) dt
    double upper; // Vol(B_R) / A_1
};

/**
 * @brief Bracket lambda_1 between the isoperimetric-quotient integral and
 * the volume-to-torsional-rigidity ratio. Coincides with (rho_1, sigma_1).
 */
inline TorsionalBounds torsional_bounds(const ModelSpace& space, int grid_n = kDefaultGridSize) {
    const RadialGrid grid(space.radius, grid_n);
    const RadialSamples psi = detail::warp_power_factor(space.warping, space.dim, grid);
    // q_w samples with the analytic limit t/m represented by q(0) = 0
    const RadialSamples P = cumulative_power_integral(psi, space.dim - 1);
    std::vector<double> q(static_cast<std::size_t>(grid.count()));
    q[0] = 0.0;
    for (int i = 1; i < grid.count(); ++i)
        q[static_cast<std::size_t>(i)] =
            P[i] / (std::pow(grid.node(i), space.dim - 1) * psi[i]);
    const double integral_q = cumulative_integral(RadialSamples(grid, std::move(q))).values.back();

    const RadialSamples ones = sample(grid, [](double) { return 1.0; });
    const RadialSamples u1 = detail::green_apply_weighted(psi, space.dim - 1, ones);
    std::vector<double> pu(static_cast<std::size_t>(grid.count()));
    for (int i = 0; i < grid.count(); ++i) pu[static_cast<std::size_t>(i)] = psi[i] * u1[i];
    const double A1 =
        cumulative_power_integral(RadialSamples(grid, std::move(pu)), space.dim - 1).values.back();
    const double vol = P.values.back();
    return TorsionalBounds{1.0 / integral_q, vol / A1};
}

} // namespace eigenmoment
