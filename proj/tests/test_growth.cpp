#include "eigenmoment/growth.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace eigenmoment;
namespace num = std::numbers;

TEST_CASE("growth extraction calibration", "[growth]") {
    SECTION("probabilist ratio recovers pi^2 on the unit 3-ball") {
        MomentHierarchy h(ModelSpace(3, space_form_warping({0.0}), 1.0));
        h.extend(60);
        const GrowthEstimate g = lambda1_growth(h, Normalization::probabilist);
        CHECK(std::abs(g.ratio_estimate - num::pi * num::pi) <= 0.01 * num::pi * num::pi);
        CHECK(g.n_used == 60);
    }
    SECTION("verbatim normalization lands on twice the eigenvalue") {
        MomentHierarchy h(ModelSpace(2, space_form_warping({0.0}), 1.0));
        h.extend(60);
        const double lambda =
            oracles::sturm_liouville_lowest(2, [](double r) { return r; }, 1.0, 8193);
        const GrowthEstimate g = lambda1_growth(h, Normalization::analyst);
        CHECK(std::abs(g.ratio_estimate - 2.0 * lambda) <= 0.01 * 2.0 * lambda);
    }
    SECTION("shallow hierarchies are rejected") {
        MomentHierarchy h(ModelSpace(2, space_form_warping({0.0}), 1.0), 257);
        h.extend(5);
        CHECK_THROWS_AS(lambda1_growth(h, Normalization::probabilist), InsufficientDepth);
    }
}

TEST_CASE("growth invariants", "[growth]") {
    MomentHierarchy h(ModelSpace(2, space_form_warping({0.0}), 1.0));
    h.extend(60);
    SECTION("probabilist ratio is exactly the last upper quotient") {
        const GrowthEstimate g = lambda1_growth(h, Normalization::probabilist);
        CHECK(g.ratio_estimate == h.upper_quotient(60));
    }
    SECTION("root and ratio agree to 5% by depth 50 and keep closing") {
        MomentHierarchy h50(ModelSpace(2, space_form_warping({0.0}), 1.0));
        h50.extend(50);
        const GrowthEstimate g50 = lambda1_growth(h50, Normalization::probabilist);
        CHECK(std::abs(g50.ratio_estimate - g50.root_estimate) <= 0.05 * g50.ratio_estimate);
        double previous = std::numeric_limits<double>::infinity();
        for (int n = 20; n <= 60; n += 5) {
            MomentHierarchy hn(ModelSpace(2, space_form_warping({0.0}), 1.0));
            hn.extend(n);
            const GrowthEstimate g = lambda1_growth(hn, Normalization::probabilist);
            const double gap = std::abs(g.ratio_estimate - g.root_estimate);
            CHECK(gap <= previous + 1e-12);
            previous = gap;
        }
    }
}

TEST_CASE("reconciliation with the sandwich", "[growth]") {
    SECTION("unit disk") {
        const ModelSpace space(2, space_form_warping({0.0}), 1.0);
        const EigenEstimate est = lambda1_sandwich(space);
        MomentHierarchy h(space);
        h.extend(40);
        const ReconciliationReport report = reconcile(h, est);
        CHECK(report.ratio_gap <= 0.01);
        CHECK_FALSE(report.flagged);
    }
    SECTION("hemisphere against the exact eigenvalue 2") {
        const ModelSpace space(2, space_form_warping({1.0}), num::pi / 2);
        const EigenEstimate est = lambda1_sandwich(space);
        MomentHierarchy h(space);
        h.extend(40);
        const ReconciliationReport report = reconcile(h, est);
        CHECK(report.ratio_gap <= 0.01);
        CHECK(std::abs(report.growth.ratio_estimate - 2.0) <= 0.01 * 2.0);
    }
    SECTION("unconverged sandwich is rejected") {
        const ModelSpace space(2, space_form_warping({0.0}), 1.0);
        MomentHierarchy h(space, 257);
        h.extend(12);
        try {
            lambda1_sandwich(space, 1e-13, 3, 257);
            FAIL("expected NotConverged");
        } catch (const NotConverged& nc) {
            CHECK_THROWS_AS(reconcile(h, nc.partial), PreconditionViolation);
        }
    }
}
