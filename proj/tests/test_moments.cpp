#include "eigenmoment/moments.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace eigenmoment;
namespace num = std::numbers;

namespace {

ModelSpace unit_disk() { return ModelSpace(2, space_form_warping({0.0}), 1.0); }
ModelSpace unit_ball3() { return ModelSpace(3, space_form_warping({0.0}), 1.0); }
ModelSpace hemisphere() { return ModelSpace(2, space_form_warping({1.0}), num::pi / 2); }

} // namespace

TEST_CASE("Green operator on flat balls", "[moments]") {
    SECTION("mean exit time of the unit disk is (1 - r^2)/4") {
        const ModelSpace space = unit_disk();
        const RadialGrid grid(1.0, 1025);
        const RadialSamples u = green_apply(space, sample(grid, [](double) { return 1.0; }));
        double worst = 0.0;
        for (int i = 0; i < grid.count(); ++i)
            worst = std::max(worst, std::abs(u[i] - (1.0 - grid.node(i) * grid.node(i)) / 4.0));
        CHECK(worst <= 1e-10);
    }
    SECTION("mean exit time of the unit 3-ball is (1 - r^2)/6") {
        const ModelSpace space = unit_ball3();
        const RadialGrid grid(1.0, 1025);
        const RadialSamples u = green_apply(space, sample(grid, [](double) { return 1.0; }));
        double worst = 0.0;
        for (int i = 0; i < grid.count(); ++i)
            worst = std::max(worst, std::abs(u[i] - (1.0 - grid.node(i) * grid.node(i)) / 6.0));
        CHECK(worst <= 1e-10);
    }
    SECTION("linearity: zero input maps to zero") {
        const ModelSpace space = unit_disk();
        const RadialGrid grid(1.0, 257);
        const RadialSamples u = green_apply(space, sample(grid, [](double) { return 0.0; }));
        for (double v : u.values) CHECK(v == 0.0);
    }
}

TEST_CASE("hierarchy construction", "[moments]") {
    SECTION("first lower quotients of the flat balls") {
        MomentHierarchy disk(unit_disk(), 1025);
        disk.extend(2);
        CHECK(disk.lower_quotient(1) == Catch::Approx(4.0).epsilon(1e-10));
        MomentHierarchy ball(unit_ball3(), 1025);
        ball.extend(2);
        CHECK(ball.lower_quotient(1) == Catch::Approx(6.0).epsilon(1e-10));
    }
    SECTION("boundary condition and normalization of every iterate") {
        MomentHierarchy h(hemisphere(), 513);
        h.extend(6);
        for (int k = 1; k <= 6; ++k) {
            const RadialSamples& g = h.normalized_function(k);
            CHECK(g[0] == 1.0);
            CHECK(g.values.back() == 0.0);
            for (int i = 0; i + 1 < g.count(); ++i) CHECK(g[i + 1] <= g[i] + 1e-14);
        }
    }
    SECTION("depth guard") {
        CHECK_THROWS_AS(build_hierarchy(unit_disk(), 1, 257), PreconditionViolation);
        MomentHierarchy h(unit_disk(), 257);
        h.extend(3);
        CHECK_THROWS_AS(h.lower_quotient(4), IndexOutOfRange);
        CHECK_THROWS_AS(h.log_moment(-1), IndexOutOfRange);
    }
}

TEST_CASE("moment spectrum values", "[moments]") {
    SECTION("torsional rigidity of the unit disk is pi/8") {
        MomentHierarchy h(unit_disk());
        h.extend(2);
        CHECK(std::exp(h.log_moment(1)) == Catch::Approx(num::pi / 8).epsilon(1e-10));
    }
    SECTION("torsional rigidity of the unit 3-ball is 4 pi / 45") {
        MomentHierarchy h(unit_ball3());
        h.extend(2);
        CHECK(std::exp(h.log_moment(1)) == Catch::Approx(4 * num::pi / 45).epsilon(1e-10));
    }
    SECTION("volume and boundary routes agree") {
        MomentHierarchy h(hemisphere());
        for (int k : {1, 2, 5}) {
            const MomentVerification v = verify_moment(h, k);
            CHECK(v.relative_gap <= 1e-5);
        }
    }
}

TEST_CASE("sandwich estimator on closed-form cases", "[moments]") {
    SECTION("unit 3-ball brackets pi^2") {
        const EigenEstimate est = lambda1_sandwich(unit_ball3(), 1e-4, 100);
        CHECK(est.converged);
        CHECK(est.lower <= num::pi * num::pi);
        CHECK(est.upper >= num::pi * num::pi);
        CHECK(est.relative_width() <= 1e-4);
    }
    SECTION("unit disk against the Sturm-Liouville oracle") {
        const EigenEstimate est = lambda1_sandwich(unit_disk(), 1e-4, 100);
        const double oracle =
            oracles::sturm_liouville_lowest(2, [](double r) { return r; }, 1.0, 8193);
        CHECK(std::abs(est.midpoint() - oracle) <= 1e-3 * oracle);
    }
    SECTION("hemisphere brackets 2 and cos r is its eigenfunction") {
        const EigenEstimate est = lambda1_sandwich(hemisphere(), 1e-4, 100);
        CHECK(est.lower <= 2.0);
        CHECK(est.upper >= 2.0);
        const RadialGrid grid(num::pi / 2, 4097);
        const double res =
            eigen_residual(hemisphere(), 2.0, sample(grid, [](double r) { return std::cos(r); }));
        CHECK(res <= 1e-6);
    }
    SECTION("exhausted depth raises with the partial estimate attached") {
        try {
            lambda1_sandwich(unit_disk(), 1e-12, 3, 513);
            FAIL("expected NotConverged");
        } catch (const NotConverged& nc) {
            CHECK(nc.partial.iterations == 3);
            CHECK_FALSE(nc.partial.converged);
            CHECK(nc.partial.lower <= nc.partial.upper);
        }
    }
}

TEST_CASE("eigen residual", "[moments]") {
    SECTION("exact flat eigenfunction sin(pi r)/r") {
        const RadialGrid grid(1.0, 4097);
        const RadialSamples g = sample(grid, [](double r) {
            return r > 0 ? std::sin(num::pi * r) / r : num::pi;
        });
        CHECK(eigen_residual(unit_ball3(), num::pi * num::pi, g) <= 1e-6);
    }
    SECTION("zero function has zero residual") {
        const RadialGrid grid(1.0, 257);
        CHECK(eigen_residual(unit_disk(), 1.0, sample(grid, [](double) { return 0.0; })) == 0.0);
    }
}

TEST_CASE("torsional bracket", "[moments]") {
    SECTION("closed forms for the flat balls") {
        const TorsionalBounds disk = torsional_bounds(unit_disk());
        CHECK(disk.lower == Catch::Approx(4.0).epsilon(1e-10));
        CHECK(disk.upper == Catch::Approx(8.0).epsilon(1e-10));
        const TorsionalBounds ball = torsional_bounds(unit_ball3());
        CHECK(ball.lower == Catch::Approx(6.0).epsilon(1e-10));
        CHECK(ball.upper == Catch::Approx(15.0).epsilon(1e-10));
    }
    SECTION("the bracket contains every sandwich estimate") {
        for (double b : {-1.0, 0.0, 1.0}) {
            const ModelSpace space(3, space_form_warping({b}), 1.0);
            const TorsionalBounds tb = torsional_bounds(space);
            const EigenEstimate est = lambda1_sandwich(space);
            CHECK(tb.lower <= est.lower * (1.0 + 1e-12));
            CHECK(tb.upper >= est.upper * (1.0 - 1e-12));
        }
    }
}

TEST_CASE("hierarchy invariants", "[moments]") {
    SECTION("sandwich monotonicity on mixed-curvature spaces") {
        for (double b : {-1.0, 0.0, 1.0}) {
            MomentHierarchy h(ModelSpace(2, space_form_warping({b}), 1.0), 1025);
            h.extend(30);
            for (int k = 2; k <= 30; ++k) {
                CHECK(h.lower_quotient(k) >= h.lower_quotient(k - 1) * (1.0 - kMonotoneSlack));
                CHECK(h.upper_quotient(k) <= h.upper_quotient(k - 1) * (1.0 + kMonotoneSlack));
                CHECK(h.lower_quotient(k) <= h.upper_quotient(k) * (1.0 + kMonotoneSlack));
            }
        }
    }
    SECTION("Barta quotient profiles are nondecreasing in r") {
        for (double b : {-1.0, 0.0}) {
            MomentHierarchy h(ModelSpace(2, space_form_warping({b}), 1.0), 1025);
            h.extend(10);
            for (int k = 1; k <= 10; ++k) {
                const std::vector<double> q = h.quotient_profile(k);
                for (std::size_t i = 0; i + 1 < q.size(); ++i)
                    CHECK(q[i + 1] >= q[i] * (1.0 - 1e-10));
            }
        }
    }
    SECTION("boundary-derivative route reproduces sigma_k") {
        MomentHierarchy h(unit_disk());
        h.extend(9);
        for (int k : {2, 5, 8})
            CHECK(h.boundary_upper_quotient(k) == Catch::Approx(h.upper_quotient(k)).epsilon(1e-4));
    }
    SECTION("residual of a tightly converged estimate halves under grid doubling") {
        const ModelSpace space = unit_disk();
        const EigenEstimate coarse = lambda1_sandwich(space, 1e-10, 200, 513);
        const EigenEstimate fine = lambda1_sandwich(space, 1e-10, 200, 1025);
        CHECK(coarse.residual_norm / fine.residual_norm >= 2.0);
    }
    SECTION("eigenvalue estimates decrease with the ball radius") {
        double previous = std::numeric_limits<double>::infinity();
        for (double R : {1.0, 1.5, 2.0, 3.0}) {
            const ModelSpace space(2, space_form_warping({-1.0}), R);
            const double mid = lambda1_sandwich(space).midpoint();
            CHECK(mid < previous);
            previous = mid;
        }
    }
    SECTION("torsional bracket coincides with the first quotients") {
        MomentHierarchy h(unit_disk());
        h.extend(1);
        const TorsionalBounds tb = torsional_bounds(unit_disk());
        CHECK(tb.lower == Catch::Approx(h.lower_quotient(1)).epsilon(1e-13));
        CHECK(tb.upper == Catch::Approx(h.upper_quotient(1)).epsilon(1e-13));
    }
}
