#pragma once

#include "eigenmoment/errors.hpp"
#include "eigenmoment/radial_grid.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace eigenmoment {

/// Sectional curvature of a constant-curvature space form (1/length^2).
struct CurvatureConstant {
    double value = 0.0;
};

/// Computational window for warpings that never vanish (curvature <= 0).
inline constexpr double kDefaultDomainCap = 1.0e3;

// Radius fraction below which removable singularities at the pole are
// evaluated through their analytic limits instead of direct quotients.
inline constexpr double kPoleFraction = 1.0e-6;

/**
 * @brief Radial warping profile w(r) with its first two derivatives.
 *
 * A valid profile satisfies w(0) = 0, w'(0) = 1 and w > 0 on (0, domain_end].
 * It fixes the geometry of a rotationally symmetric space: distance spheres
 * have area proportional to w^{m-1} and mean curvature w'/w.
 */
class WarpingFunction {
public:
    using Fn = std::function<double(double)>;

    WarpingFunction(Fn value, Fn deriv, Fn deriv2, double domain_end, std::string kind)
        : value_(std::move(value)), deriv_(std::move(deriv)), deriv2_(std::move(deriv2)),
          domain_end_(domain_end), kind_(std::move(kind)) {
        if (!(domain_end_ > 0.0))
            throw PreconditionViolation("warping domain must have positive length");
        if (!value_ || !deriv_)
            throw NonSmoothBounds("warping requires value and first derivative");
    }

    double value(double r) const { return value_(r); }
    double deriv(double r) const { return deriv_(r); }
    double deriv2(double r) const {
        if (!deriv2_) throw NonSmoothBounds("warping has no second derivative registered");
        return deriv2_(r);
    }
    double domain_end() const { return domain_end_; }
    const std::string& kind() const { return kind_; }

private:
    Fn value_, deriv_, deriv2_;
    double domain_end_;
    std::string kind_;
};

/**
 * @brief Warping of the constant-curvature space form of curvature b.
 *
 *   w_b(r) = sin(sqrt(b) r)/sqrt(b)   (b > 0, domain (0, pi/sqrt(b)))
 *   w_b(r) = r                        (b = 0)
 *   w_b(r) = sinh(sqrt(-b) r)/sqrt(-b)(b < 0)
 *
 * Unbounded domains (b <= 0) are capped at domain_cap.
 */
inline WarpingFunction space_form_warping(CurvatureConstant b, double domain_cap = kDefaultDomainCap) {
    const double bv = b.value;
    if (bv > 0.0) {
        const double sb = std::sqrt(bv);
        return WarpingFunction(
            [sb](double r) { return std::sin(sb * r) / sb; },
            [sb](double r) { return std::cos(sb * r); },
            [bv, sb](double r) { return -bv * std::sin(sb * r) / sb; },
            std::numbers::pi / sb, "space_form");
    }
    if (bv == 0.0) {
        return WarpingFunction(
            [](double r) { return r; },
            [](double) { return 1.0; },
            [](double) { return 0.0; },
            domain_cap, "space_form");
    }
    const double sb = std::sqrt(-bv);
    return WarpingFunction(
        [sb](double r) { return std::sinh(sb * r) / sb; },
        [sb](double r) { return std::cosh(sb * r); },
        [bv, sb](double r) { return -bv * std::sinh(sb * r) / sb; },
        domain_cap, "space_form");
}

/// Analytic profile registered with explicit derivatives.
inline WarpingFunction custom_warping(WarpingFunction::Fn value, WarpingFunction::Fn deriv,
                                      WarpingFunction::Fn deriv2, double domain_end,
                                      std::string kind = "custom") {
    return WarpingFunction(std::move(value), std::move(deriv), std::move(deriv2), domain_end,
                           std::move(kind));
}

namespace detail {

// Three-point finite-difference derivative samples on possibly non-uniform
// abscissae; one-sided at the ends.
inline std::vector<double> fd_derivative(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> d(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = x[i] - x[i - 1], hr = x[i + 1] - x[i];
        d[i] = (hl * hl * y[i + 1] - hr * hr * y[i - 1] + (hr * hr - hl * hl) * y[i]) /
               (hl * hr * (hl + hr));
    }
    {
        const double h0 = x[1] - x[0], h1 = x[2] - x[1];
        d[0] = -(2.0 * h0 + h1) / (h0 * (h0 + h1)) * y[0] + (h0 + h1) / (h0 * h1) * y[1] -
               h0 / (h1 * (h0 + h1)) * y[2];
    }
    {
        const double h0 = x[n - 1] - x[n - 2], h1 = x[n - 2] - x[n - 3];
        d[n - 1] = (2.0 * h0 + h1) / (h0 * (h0 + h1)) * y[n - 1] -
                   (h0 + h1) / (h0 * h1) * y[n - 2] + h0 / (h1 * (h0 + h1)) * y[n - 3];
    }
    return d;
}

struct SampledProfile {
    CubicInterpolant value, deriv, deriv2;
};

} // namespace detail

/**
 * @brief Profile built from (s_i, w_i, w'_i) samples; w'' by finite differences.
 *
 * Used for warpings that are themselves the product of a computation
 * (e.g. comparison-space warpings) where values and first derivatives are
 * known accurately at the sample points.
 */
inline WarpingFunction sampled_warping(const std::vector<double>& x, const std::vector<double>& w,
                                       const std::vector<double>& dw, std::string kind = "sampled") {
    auto d2 = detail::fd_derivative(x, dw);
    auto prof = std::make_shared<detail::SampledProfile>(detail::SampledProfile{
        CubicInterpolant(x, w), CubicInterpolant(x, dw), CubicInterpolant(x, d2)});
    const double end = x.back();
    return WarpingFunction(
        [prof](double r) { return prof->value.value(r); },
        [prof](double r) { return prof->deriv.value(r); },
        [prof](double r) { return prof->deriv2.value(r); },
        end, std::move(kind));
}

/// Profile from tabulated (r_i, w_i) pairs; derivatives by finite differences.
inline WarpingFunction tabulated_warping(const std::vector<std::array<double, 2>>& samples) {
    if (samples.size() < 4)
        throw PreconditionViolation("tabulated warping needs at least four samples");
    std::vector<double> x, y;
    x.reserve(samples.size());
    y.reserve(samples.size());
    for (const auto& s : samples) {
        x.push_back(s[0]);
        y.push_back(s[1]);
    }
    auto dy = detail::fd_derivative(x, y);
    return sampled_warping(x, y, dy, "tabulated");
}

/**
 * @brief Rotationally symmetric model space: dimension, warping, ball radius.
 *
 * The geodesic ball of radius R about the pole is the computational domain
 * for every moment and eigenvalue routine.
 */
struct ModelSpace {
    int dim;
    WarpingFunction warping;
    double radius;

    ModelSpace(int m, WarpingFunction w, double R) : dim(m), warping(std::move(w)), radius(R) {
        if (dim < 2) throw PreconditionViolation("model dimension must be at least 2");
        if (!(radius > 0.0)) throw NonPositiveRadius("ball radius must be positive");
        if (radius > warping.domain_end() * (1.0 + 1e-12))
            throw PreconditionViolation("ball radius exceeds the warping domain");
        // the warping must stay genuinely positive up to R (rules out e.g.
        // spherical space forms evaluated at the antipode)
        double maxw = 0.0, minw = std::numeric_limits<double>::infinity();
        for (int i = 1; i <= 128; ++i) {
            const double w = warping.value(radius * i / 128.0);
            maxw = std::max(maxw, w);
            minw = std::min(minw, w);
        }
        if (!(minw > 1e-12 * maxw))
            throw PreconditionViolation("warping vanishes inside the requested ball");
    }
};

/// Surface measure of the unit (m-1)-sphere, 2 pi^{m/2} / Gamma(m/2).
inline double unit_sphere_area(int m) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m);
}

/**
 * @brief Mean curvature of the distance sphere of radius r: w'(r)/w(r).
 *
 * Below the pole threshold the removable singularity is expanded
 * analytically: w'/w = 1/r + w''(r)/3 + O(r^3).
 */
inline double eta(const WarpingFunction& w, double r) {
    if (!(r > 0.0)) throw NonPositiveRadius("eta needs r > 0");
    if (r > w.domain_end() * (1.0 + 1e-12)) throw OutOfDomain("eta beyond warping domain");
    const double r_eps = kPoleFraction * w.domain_end();
    if (r < r_eps) return 1.0 / r + w.deriv2(r) / 3.0;
    return w.deriv(r) / w.value(r);
}

/// Radial sectional curvature profile -w''(r)/w(r).
inline double curvature_profile(const WarpingFunction& w, double r) {
    if (!(r > 0.0)) throw NonPositiveRadius("curvature profile needs r > 0");
    if (r > w.domain_end() * (1.0 + 1e-12)) throw OutOfDomain("curvature profile beyond warping domain");
    return -w.deriv2(r) / w.value(r);
}

/// Area of the geodesic r-sphere: omega_{m-1} w(r)^{m-1}.
inline double sphere_volume(const ModelSpace& space, double r) {
    if (r < 0.0 || r > space.radius * (1.0 + 1e-12)) throw OutOfDomain("sphere radius outside [0, R]");
    if (r == 0.0) return 0.0;
    return unit_sphere_area(space.dim) * std::pow(space.warping.value(r), space.dim - 1);
}

namespace detail {

// psi(r) = (w(r)/r)^{m-1} with the limit 1 at r = 0; smooth factor of w^{m-1}.
inline RadialSamples warp_power_factor(const WarpingFunction& w, int dim, const RadialGrid& grid) {
    std::vector<double> v(static_cast<std::size_t>(grid.count()));
    v[0] = 1.0;
    for (int i = 1; i < grid.count(); ++i) {
        const double r = grid.node(i);
        v[static_cast<std::size_t>(i)] = std::pow(w.value(r) / r, dim - 1);
    }
    return RadialSamples(grid, std::move(v));
}

// ∫_0^r w^{m-1}(t) dt with pole-exact quadrature.
inline double warp_power_integral(const WarpingFunction& w, int dim, double r, int grid_n) {
    const RadialGrid grid(r, grid_n);
    return cumulative_power_integral(warp_power_factor(w, dim, grid), dim - 1).values.back();
}

} // namespace detail

/// Volume of the geodesic r-ball: ∫_0^r sphere_volume(t) dt.
inline double ball_volume(const ModelSpace& space, double r, int grid_n = kDefaultGridSize) {
    if (r < 0.0 || r > space.radius * (1.0 + 1e-12)) throw OutOfDomain("ball radius outside [0, R]");
    if (r == 0.0) return 0.0;
    return unit_sphere_area(space.dim) * detail::warp_power_integral(space.warping, space.dim, r, grid_n);
}

/**
 * @brief Isoperimetric quotient q_w(t) = ∫_0^t w^{m-1} ds / w^{m-1}(t).
 *
 * Tends to t/m as t -> 0; that limit is returned below the pole threshold.
 */
inline double isoperimetric_quotient(const ModelSpace& space, double t, int grid_n = kDefaultGridSize) {
    if (!(t > 0.0)) throw NonPositiveRadius("isoperimetric quotient needs t > 0");
    if (t > space.radius * (1.0 + 1e-12)) throw OutOfDomain("quotient radius outside (0, R]");
    if (t < kPoleFraction * space.radius) return t / space.dim;
    return detail::warp_power_integral(space.warping, space.dim, t, grid_n) /
           std::pow(space.warping.value(t), space.dim - 1);
}

/// Outcome of checking a profile against the model-space normalization.
struct ValidationReport {
    bool valid = true;
    std::vector<std::string> violations;

    void flag(std::string msg) {
        valid = false;
        violations.push_back(std::move(msg));
    }
};

/**
 * @brief Check w(0) = 0, w'(0) = 1 and positivity on a sampling grid.
 *
 * Violations are reported, never thrown. Higher-order flatness of the even
 * derivatives at the pole is assumed for tabulated input, not checked.
 */
inline ValidationReport validate_warping(const WarpingFunction& w, int dim, int sample_n = 257,
                                         double tolerance = 1e-4) {
    ValidationReport report;
    if (dim < 2) report.flag("dimension must be at least 2");
    const double scale = std::min(w.domain_end(), 1.0);
    const double w0 = w.value(0.0);
    if (!(std::abs(w0) <= tolerance * scale))
        report.flag("w(0) = " + std::to_string(w0) + " violates w(0) = 0");
    const double dw0 = w.deriv(0.0);
    if (!(std::abs(dw0 - 1.0) <= tolerance))
        report.flag("w'(0) = " + std::to_string(dw0) + " violates w'(0) = 1");
    for (int i = 1; i < sample_n; ++i) {
        const double r = w.domain_end() * i / (sample_n - 1);
        if (!(w.value(r) > 0.0)) {
            report.flag("w not positive at r = " + std::to_string(r));
            break;
        }
    }
    return report;
}

} // namespace eigenmoment
