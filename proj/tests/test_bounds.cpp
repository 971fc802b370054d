#include "eigenmoment/bounds.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace eigenmoment;
namespace num = std::numbers;

namespace {

ComparisonSpaceSpec intrinsic_spec(double b, int m, double R, double h_const = 0.0) {
    return ComparisonSpaceSpec{space_form_warping({b}),
                               BoundingFunctions{BoundingFunction::one(),
                                                 BoundingFunction::constant(h_const)},
                               m, R};
}

} // namespace

TEST_CASE("fundamental tone bound", "[bounds]") {
    CHECK(mckean_bound(2, {-1.0}) == 0.25);
    CHECK(mckean_bound(3, {-4.0}) == 4.0);
    CHECK(mckean_bound(4, {0.0}) == 0.0);
    CHECK_THROWS_AS(mckean_bound(2, {1.0}), PositiveCurvature);
}

TEST_CASE("mean-curvature lower bound", "[bounds]") {
    SECTION("large balls recover the fundamental tone") {
        const auto v = cheung_leung_bound(2, {-1.0}, 0.0, 50.0);
        REQUIRE(v.has_value());
        CHECK(*v == Catch::Approx(0.25).margin(1e-12));
    }
    SECTION("mean curvature h_sup = alpha/m eats into the bound") {
        const auto v = cheung_leung_bound(3, {-1.0}, 1.0 / 3.0, 60.0);
        REQUIRE(v.has_value());
        CHECK(*v == Catch::Approx(0.25).margin(1e-10));
    }
    SECTION("feasibility gate") {
        CHECK_FALSE(cheung_leung_bound(2, {0.0}, 1.0, 1.0).has_value());
    }
}

TEST_CASE("max-form intrinsic bound", "[bounds]") {
    CHECK(bessa_montenegro_bound(3, {0.0}, 1.0) == Catch::Approx(2.25));
    CHECK(bessa_montenegro_bound(2, {-1.0}, 50.0) == Catch::Approx(0.25).margin(1e-10));
    SECTION("dominates the curvature-only term") {
        for (double R : {0.5, 1.0, 3.0, 10.0})
            for (int n : {2, 3, 5}) {
                const auto cl = cheung_leung_bound(n, {-1.0}, 0.0, R);
                REQUIRE(cl.has_value());
                CHECK(bessa_montenegro_bound(n, {-1.0}, R) >= *cl - 1e-14);
            }
    }
}

TEST_CASE("Poincare lower bound for the compiled model", "[bounds]") {
    SECTION("hyperbolic closed form") {
        const double coth2 = std::cosh(2.0) / std::sinh(2.0);
        CHECK(l_r_bound(intrinsic_spec(-1.0, 3, 2.0)) == Catch::Approx(coth2 * coth2).epsilon(1e-9));
    }
    SECTION("flat closed form") {
        CHECK(l_r_bound(intrinsic_spec(0.0, 3, 1.0)) == Catch::Approx(1.0).epsilon(1e-9));
    }
    SECTION("infeasible hypothesis") {
        const double big = (2.0 / 3.0) * (1.0 / 1.0) + 1.0; // above (m-1)/m eta_w(R)
        CHECK_THROWS_AS(l_r_bound(intrinsic_spec(0.0, 3, 1.0, big)), InfeasibleHypothesis);
    }
    SECTION("requires the identity tangency") {
        ComparisonSpaceSpec spec{space_form_warping({-1.0}),
                                 BoundingFunctions{BoundingFunction::analytic(
                                                       [](double r) { return 1.0 / (1.0 + r); },
                                                       [](double r) { return -1.0 / ((1 + r) * (1 + r)); }),
                                                   BoundingFunction::zero()},
                                 3, 2.0};
        CHECK_THROWS_AS(l_r_bound(spec), PreconditionViolation);
    }
}

TEST_CASE("upper constellation estimate", "[bounds]") {
    SECTION("degenerate bounds reproduce the base ball") {
        const ConstellationEstimate upper = extrinsic_upper(intrinsic_spec(-1.0, 3, 2.0), 1e-5, 200);
        const EigenEstimate base =
            lambda1_sandwich(ModelSpace(3, space_form_warping({-1.0}), 2.0), 1e-5, 200);
        CHECK(upper.estimate.midpoint() == Catch::Approx(base.midpoint()).epsilon(1e-4));
        CHECK(upper.chained_upper >= upper.estimate.upper * (1.0 - 1e-12));
        CHECK(upper.balance.balanced);
    }
    SECTION("a genuine stretching enlarges the model and lowers the eigenvalue") {
        ComparisonSpaceSpec spec{space_form_warping({-1.0}),
                                 BoundingFunctions{BoundingFunction::analytic(
                                                       [](double r) { return 1.0 / (1.0 + r); },
                                                       [](double r) { return -1.0 / ((1 + r) * (1 + r)); }),
                                                   BoundingFunction::zero()},
                                 3, 2.0};
        const ConstellationEstimate upper = extrinsic_upper(spec, 1e-4, 200);
        CHECK(upper.stretched_radius == Catch::Approx(4.0).margin(1e-9));
        // same compiled warping, smaller ball: domain monotonicity
        const ComparisonSpaceResult built = build_comparison_space(spec);
        const EigenEstimate small =
            lambda1_sandwich(ModelSpace(3, built.model.warping, 2.0), 1e-4, 200);
        CHECK(upper.estimate.midpoint() < small.midpoint());
    }
    SECTION("the balance gate is hard") {
        CHECK_THROWS_AS(extrinsic_upper(intrinsic_spec(-1.0, 3, 2.0, 0.1)), UnbalancedSpec);
    }
}

TEST_CASE("lower constellation estimate", "[bounds]") {
    SECTION("degenerate bounds reproduce the base ball") {
        const ConstellationEstimate lower = extrinsic_lower(intrinsic_spec(-1.0, 3, 2.0), 1e-5, 200);
        const EigenEstimate base =
            lambda1_sandwich(ModelSpace(3, space_form_warping({-1.0}), 2.0), 1e-5, 200);
        CHECK(lower.estimate.midpoint() == Catch::Approx(base.midpoint()).epsilon(1e-4));
    }
    SECTION("the sandwich dominates the Poincare bound") {
        const ConstellationEstimate lower = extrinsic_lower(intrinsic_spec(-1.0, 3, 2.0, 0.1));
        CHECK(lower.rayleigh_lower > 0.0);
        CHECK(lower.estimate.lower >= lower.rayleigh_lower);
        // the transplant interpretation is flagged: this spec is not balanced
        CHECK_FALSE(lower.balance.balanced);
    }
    SECTION("non-identity tangency is rejected") {
        ComparisonSpaceSpec spec{space_form_warping({-1.0}),
                                 BoundingFunctions{BoundingFunction::analytic(
                                                       [](double r) { return 1.0 / (1.0 + r); },
                                                       [](double r) { return -1.0 / ((1 + r) * (1 + r)); }),
                                                   BoundingFunction::zero()},
                                 3, 2.0};
        CHECK_THROWS_AS(extrinsic_lower(spec), PreconditionViolation);
    }
}

TEST_CASE("intrinsic eigenvalue ordering", "[bounds]") {
    const ModelSpace hyperbolic(2, space_form_warping({-1.0}), 1.0);
    const ModelSpace flat(2, space_form_warping({0.0}), 1.0);
    const ModelSpace spherical(2, space_form_warping({1.0}), 1.0);
    SECTION("hyperbolic disk dominates the flat disk") {
        const OrderingReport report = intrinsic_ordering_check(hyperbolic, flat);
        CHECK(report.ordered);
        CHECK(report.margin > 0.0);
    }
    SECTION("flat disk dominates the spherical cap") {
        const OrderingReport report = intrinsic_ordering_check(flat, spherical);
        CHECK(report.ordered);
        CHECK(report.margin > 0.0);
    }
    SECTION("identical spaces coincide within twice the tolerance") {
        const OrderingReport report = intrinsic_ordering_check(flat, flat, 1e-4);
        CHECK(report.ordered);
        CHECK(std::abs(report.higher_curvature.midpoint() - report.lower_curvature.midpoint()) <=
              2e-4 * report.lower_curvature.midpoint());
    }
    SECTION("misordered profiles and mismatched shapes are rejected") {
        CHECK_THROWS_AS(intrinsic_ordering_check(flat, hyperbolic), NotComparable);
        const ModelSpace flat3(3, space_form_warping({0.0}), 1.0);
        CHECK_THROWS_AS(intrinsic_ordering_check(flat3, flat), NotComparable);
        const ModelSpace small(2, space_form_warping({0.0}), 0.5);
        CHECK_THROWS_AS(intrinsic_ordering_check(small, flat), NotComparable);
    }
}

TEST_CASE("aggregated bounds report", "[bounds]") {
    const BoundsReport report = bounds_report({-1.0}, 2, 1.0);
    CHECK(report.consistent);
    REQUIRE(report.mckean.has_value());
    REQUIRE(report.bessa_montenegro.has_value());
    REQUIRE(report.l_r.has_value());
    CHECK(*report.mckean <= report.lambda.upper);
    CHECK(*report.bessa_montenegro <= report.lambda.upper);
    CHECK(report.torsional.lower <= report.lambda.lower * (1 + 1e-12));
    CHECK(report.torsional.upper >= report.lambda.upper * (1 - 1e-12));
    SECTION("positive curvature drops the closed-form bounds") {
        const BoundsReport cap = bounds_report({1.0}, 2, 1.0);
        CHECK_FALSE(cap.mckean.has_value());
        CHECK(cap.consistent);
    }
}
