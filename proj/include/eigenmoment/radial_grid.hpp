#pragma once

#include "eigenmoment/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace eigenmoment {

inline constexpr int kMinGridSize = 16;
inline constexpr int kDefaultGridSize = 4097;

/**
 * @brief Uniform discretization of a radial interval [0, R].
 *
 * Nodes are strictly increasing with nodes[0] = 0 and nodes[N-1] = R.
 * All quadrature and interpolation in the library runs on these grids.
 */
class RadialGrid {
public:
    RadialGrid(double radius, int count) : radius_(radius), count_(count) {
        if (count < kMinGridSize)
            throw InvalidGrid("grid needs at least " + std::to_string(kMinGridSize) + " nodes");
        if (!(radius > 0.0) || !std::isfinite(radius))
            throw InvalidGrid("grid radius must be positive and finite");
        nodes_.resize(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i)
            nodes_[static_cast<std::size_t>(i)] = radius * static_cast<double>(i) / (count - 1);
        nodes_.back() = radius; // exact endpoint
    }

    int count() const { return count_; }
    double radius() const { return radius_; }
    double spacing() const { return radius_ / (count_ - 1); }
    double node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& nodes() const { return nodes_; }

    bool operator==(const RadialGrid& other) const {
        return count_ == other.count_ && radius_ == other.radius_;
    }

private:
    double radius_;
    int count_;
    std::vector<double> nodes_;
};

inline RadialGrid uniform_grid(double radius, int count) { return RadialGrid(radius, count); }

/// Values of a radial function aligned with a grid's nodes.
struct RadialSamples {
    RadialGrid grid;
    std::vector<double> values;

    RadialSamples(RadialGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
        if (static_cast<int>(values.size()) != grid.count())
            throw InvalidGrid("sample count does not match grid");
    }

    double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
    int count() const { return grid.count(); }
};

/// Samples of f on a grid from a callable.
template <typename F>
RadialSamples sample(const RadialGrid& grid, F&& f) {
    std::vector<double> v(static_cast<std::size_t>(grid.count()));
    for (int i = 0; i < grid.count(); ++i)
        v[static_cast<std::size_t>(i)] = f(grid.node(i));
    return RadialSamples(grid, std::move(v));
}

namespace detail {

/**
 * Cumulative quadrature on a uniform grid. Even nodes use classic composite
 * Simpson pairs; odd nodes are completed with cubic 4-point rules so every
 * node value is exact for polynomials up to degree three. A trapezoid
 * fallback covers the final interval when the node count is even.
 */
inline std::vector<double> cumulative_values(const std::vector<double>& f, double h) {
    const int n = static_cast<int>(f.size());
    std::vector<double> F(static_cast<std::size_t>(n), 0.0);
    auto at = [&](int i) -> double { return f[static_cast<std::size_t>(i)]; };
    int i = 0;
    while (i + 2 <= n - 1) {
        F[static_cast<std::size_t>(i + 2)] =
            F[static_cast<std::size_t>(i)] + h / 3.0 * (at(i) + 4.0 * at(i + 1) + at(i + 2));
        i += 2;
    }
    const int last_pair_end = i;
    for (int j = 1; j <= last_pair_end && j <= n - 1; j += 2) {
        if (j == 1) {
            F[1] = (n >= 4) ? h / 24.0 * (9.0 * at(0) + 19.0 * at(1) - 5.0 * at(2) + at(3))
                            : h / 12.0 * (5.0 * at(0) + 8.0 * at(1) - at(2));
        } else {
            F[static_cast<std::size_t>(j)] =
                F[static_cast<std::size_t>(j - 1)] +
                h / 24.0 * (-at(j - 2) + 13.0 * at(j - 1) + 13.0 * at(j) - at(j + 1));
        }
    }
    if (last_pair_end == n - 2)
        F[static_cast<std::size_t>(n - 1)] =
            F[static_cast<std::size_t>(n - 2)] + h / 2.0 * (at(n - 2) + at(n - 1));
    return F;
}

} // namespace detail

/**
 * @brief Cumulative integral F(t) = ∫_0^t f(s) ds at every node.
 *
 * Composite Simpson on the uniform grid with cubic completion at the
 * half-pair nodes (trapezoid fallback on the final odd interval).
 * Error O(spacing^4) for smooth f. Integrands with removable 0/0 behavior
 * at r = 0 must carry their analytic limit in the first sample.
 */
inline RadialSamples cumulative_integral(const RadialSamples& f) {
    return RadialSamples(f.grid, detail::cumulative_values(f.values, f.grid.spacing()));
}

/// Tail integral T(r) = F(R) - F(r); T(R) = 0 exactly, T(0) = F(R) exactly.
inline RadialSamples tail_integral(const RadialSamples& f) {
    RadialSamples F = cumulative_integral(f);
    const double total = F.values.back();
    for (double& v : F.values) v = total - v;
    F.values.back() = 0.0;
    return F;
}

// Number of leading intervals integrated with exact power moments in
// cumulative_power_integral. Past the patch the generic node rules take
// over; 64 intervals keep their relative noise below 1e-8 even for s^4
// weights.
inline constexpr int kPolePatchIntervals = 64;

/**
 * @brief Cumulative integral of s^p * psi(s) with exact treatment of the pole.
 *
 * The first few intervals are integrated with exact moments of s^p against a
 * local quadratic fit of psi, which keeps the RELATIVE error near s = 0 at
 * O(spacing^3) regardless of p. (Generic node rules lose relative accuracy
 * there because the integrand vanishes like s^p.) psi[0] must carry the
 * analytic limit of the smooth factor at s = 0.
 */
inline RadialSamples cumulative_power_integral(const RadialSamples& psi, int p) {
    const int n = psi.count();
    const double h = psi.grid.spacing();
    // integrand on the full grid for the far region
    std::vector<double> f(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        f[static_cast<std::size_t>(i)] = std::pow(psi.grid.node(i), p) * psi[i];
    f[0] = (p == 0) ? psi[0] : 0.0;
    std::vector<double> F = detail::cumulative_values(f, h);

    auto power_moment = [&](double a, double b, int q) {
        // ∫_a^b u^q du
        return (std::pow(b, q + 1) - std::pow(a, q + 1)) / (q + 1);
    };
    const int patch = std::min(kPolePatchIntervals, n - 3);
    std::vector<double> Fp(static_cast<std::size_t>(patch) + 1, 0.0);
    for (int j = 0; j < patch; ++j) {
        // quadratic fit of psi in (u - r_j) through psi_j, psi_{j+1}, psi_{j+2}
        const double a = psi.grid.node(j), b = psi.grid.node(j + 1);
        const double c0 = psi[j];
        const double c1 = (-3.0 * psi[j] + 4.0 * psi[j + 1] - psi[j + 2]) / (2.0 * h);
        const double c2 = (psi[j] - 2.0 * psi[j + 1] + psi[j + 2]) / (2.0 * h * h);
        const double m0 = power_moment(a, b, p);
        const double m1 = power_moment(a, b, p + 1) - a * m0;
        const double m2 = power_moment(a, b, p + 2) - 2.0 * a * power_moment(a, b, p + 1) + a * a * m0;
        Fp[static_cast<std::size_t>(j) + 1] = Fp[static_cast<std::size_t>(j)] + c0 * m0 + c1 * m1 + c2 * m2;
    }
    const double shift = Fp[static_cast<std::size_t>(patch)] - F[static_cast<std::size_t>(patch)];
    for (int i = 0; i <= patch; ++i) F[static_cast<std::size_t>(i)] = Fp[static_cast<std::size_t>(i)];
    for (int i = patch + 1; i < n; ++i) F[static_cast<std::size_t>(i)] += shift;
    return RadialSamples(psi.grid, std::move(F));
}

/**
 * @brief Monotonicity-preserving cubic Hermite interpolant (PCHIP).
 *
 * Exact at the data points; C1 between them; never overshoots monotone data.
 * Handles non-uniform abscissae.
 */
class CubicInterpolant {
public:
    CubicInterpolant(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw InvalidGrid("interpolant needs at least two aligned samples");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i + 1] > x_[i]))
                throw NotMonotone("interpolation abscissae must be strictly increasing");
        compute_slopes();
    }

    double min_x() const { return x_.front(); }
    double max_x() const { return x_.back(); }

    double value(double q) const {
        const std::size_t i = interval(q);
        const double h = x_[i + 1] - x_[i], t = (q - x_[i]) / h;
        const double y0 = y_[i], y1 = y_[i + 1], m0 = d_[i] * h, m1 = d_[i + 1] * h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
               (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
    }

    double derivative(double q) const {
        const std::size_t i = interval(q);
        const double h = x_[i + 1] - x_[i], t = (q - x_[i]) / h;
        const double y0 = y_[i], y1 = y_[i + 1], m0 = d_[i] * h, m1 = d_[i + 1] * h;
        const double t2 = t * t;
        return ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0 +
                (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * m1) / h;
    }

private:
    std::size_t interval(double q) const {
        if (q < x_.front() - 1e-12 * (1.0 + std::abs(x_.front())) ||
            q > x_.back() + 1e-12 * (1.0 + std::abs(x_.back())))
            throw OutOfDomain("interpolation query outside sampled domain");
        q = std::clamp(q, x_.front(), x_.back());
        auto it = std::upper_bound(x_.begin(), x_.end(), q);
        std::size_t i = static_cast<std::size_t>(std::distance(x_.begin(), it));
        if (i > 0) --i;
        if (i >= x_.size() - 1) i = x_.size() - 2;
        return i;
    }

    void compute_slopes() {
        const std::size_t n = x_.size();
        d_.assign(n, 0.0);
        std::vector<double> hsteps(n - 1), delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            hsteps[i] = x_[i + 1] - x_[i];
            delta[i] = (y_[i + 1] - y_[i]) / hsteps[i];
        }
        if (n == 2) {
            d_[0] = d_[1] = delta[0];
            return;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                d_[i] = 0.0;
            } else {
                const double w1 = 2.0 * hsteps[i] + hsteps[i - 1];
                const double w2 = hsteps[i] + 2.0 * hsteps[i - 1];
                d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        d_[0] = edge_slope(hsteps[0], hsteps[1], delta[0], delta[1]);
        d_[n - 1] = edge_slope(hsteps[n - 2], hsteps[n - 3], delta[n - 2], delta[n - 3]);
    }

    // Three-point edge estimate clamped for shape preservation.
    static double edge_slope(double h0, double h1, double del0, double del1) {
        double d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
        if (d * del0 <= 0.0)
            d = 0.0;
        else if (del0 * del1 < 0.0 && std::abs(d) > 3.0 * std::abs(del0))
            d = 3.0 * del0;
        return d;
    }

    std::vector<double> x_, y_;
    std::vector<double> d_;
};

/// Monotone-preserving cubic interpolation of grid samples at r; exact at nodes.
inline double interpolate(const RadialSamples& f, double r) {
    if (r < -1e-12 * f.grid.radius() || r > f.grid.radius() * (1.0 + 1e-12))
        throw OutOfDomain("interpolation point outside [0, R]");
    return CubicInterpolant(f.grid.nodes(), f.values).value(r);
}

/**
 * @brief Solve f(r) = y for strictly increasing samples.
 *
 * Bisection on the monotone interpolant refined by secant steps until
 * |f(r) - y| <= 1e-10 * (1 + |y|).
 */
inline double invert_monotone(const RadialSamples& f, double y) {
    const int n = f.count();
    for (int i = 0; i + 1 < n; ++i)
        if (!(f[i + 1] > f[i]))
            throw NotMonotone("samples are not strictly increasing");
    if (y < f[0] || y > f[n - 1])
        throw OutOfRange("target value outside the sampled range");
    CubicInterpolant curve(f.grid.nodes(), f.values);
    const double tol = 1e-10 * (1.0 + std::abs(y));
    double lo = 0.0, hi = f.grid.radius();
    double flo = f[0] - y, fhi = f[n - 1] - y;
    if (std::abs(flo) <= tol) return lo;
    if (std::abs(fhi) <= tol) return hi;
    double r = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double fr = curve.value(r) - y;
        if (std::abs(fr) <= tol) return r;
        if (fr > 0.0) { hi = r; fhi = fr; } else { lo = r; flo = fr; }
        // secant proposal, kept only if it stays safely inside the bracket
        double next = r - fr * (hi - lo) / (fhi - flo);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        r = next;
        if (hi - lo < std::numeric_limits<double>::epsilon() * (1.0 + hi))
            return 0.5 * (lo + hi);
    }
    return r;
}

} // namespace eigenmoment
